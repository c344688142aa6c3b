//! The identity verification suite: grids, oracle depths, slack constants
//! and deterministic parallel execution.
//!
//! Every family expands into independent jobs, one per grid point. Jobs run
//! on the rayon pool and their reports are collected in job order, so the
//! output does not depend on the number of threads.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, RandBigInt};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{verify_euler_identities, EulerTable};
use crate::fermionic::{
    alternating_power_sum, change_of_variable, monomial, truncated_moments, verify_shift_identities, Integrand,
    DEFAULT_EVALUATION_CAP,
};
use crate::padic::{rational, ExactRational, PadicContext, PadicNumber};
use crate::report::{checked, Check, Status, VerificationReport};
use crate::zeta_char::{
    character_sum, distribution_char, dzeta_char_dx, ell, ell_limit_oracle, functional_char, positive_n_char,
    power_series_zeta, raabe_char, reflection_char, representation_sum, zeta_char, zeta_char_oracle,
    zeta_char_special, zeta_char_with_modulus,
};
use crate::zeta_czp::{distribution_special_exact, SeriesBudget, ZetaArgumentCZp, ZetaEngine, DEFAULT_MAX_TERMS};

/// Identity families in run order.
pub const FAMILIES: &[&str] = &[
    "euler-exact",
    "alt-power-sum",
    "shift-identities",
    "integral-convergence",
    "change-of-variable",
    "zeta-one",
    "special-neg",
    "special-pos",
    "oracle-czp",
    "functional-czp",
    "reflection-czp",
    "distribution-czp",
    "derivative-czp",
    "shifted-czp",
    "raabe-czp",
    "oracle-char",
    "ell-oracle",
    "ell-even",
    "zeta-char-one",
    "functional-char",
    "reflection-char",
    "positive-n-char",
    "distribution-char",
    "derivative-char",
    "special-char",
    "raabe-char",
    "representation-char",
    "power-series-char",
];

/// Families whose comparisons involve a truncated oracle or a difference
/// quotient, and therefore a calibrated slack constant.
pub const SLACK_FAMILIES: &[&str] = &[
    "change-of-variable",
    "special-pos",
    "oracle-czp",
    "derivative-czp",
    "raabe-czp",
    "oracle-char",
    "ell-oracle",
    "derivative-char",
    "raabe-char",
];

/// Default oracle depth `N` per prime, keeping `p^N` in the low thousands.
pub fn default_oracle_depth(p: u32) -> u32 {
    match p {
        3 => 6,
        5 => 5,
        7 => 4,
        _ => 3,
    }
}

/// Highest degree the Euler identities are checked to.
pub const EULER_MAX_M: usize = 20;

/// Calibrated slack constants `c` per family.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackTable {
    pub version: u32,
    pub slack: BTreeMap<String, i64>,
}

const EMBEDDED_SLACK: &str = include_str!("../fixtures/slack.json");

impl SlackTable {
    /// The checked-in calibration fixture.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_SLACK).expect("embedded slack fixture is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("slack fixture: {e}")))
    }

    pub fn get(&self, family: &str) -> i64 {
        self.slack.get(family).copied().unwrap_or(0)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Largest shortfall per slack family over `reports`. Informational
    /// records and hypothesis violations are skipped.
    pub fn measure(reports: &[VerificationReport]) -> Self {
        let mut slack: BTreeMap<String, i64> = SLACK_FAMILIES.iter().map(|f| (f.to_string(), 0)).collect();
        for r in reports {
            if matches!(r.status, Status::Informational | Status::HypothesisViolation) {
                continue;
            }
            if let Some(entry) = slack.get_mut(&r.identity) {
                *entry = (*entry).max(r.shortfall());
            }
        }
        SlackTable { version: 1, slack }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub primes: Vec<u32>,
    pub workprec: u32,
    pub guard: u32,
    /// Overrides [`default_oracle_depth`] for every prime.
    pub oracle_depth: Option<u32>,
    pub max_terms: usize,
    pub evaluation_cap: u64,
    pub seed: u64,
    /// Families to run; empty means all.
    pub families: Vec<String>,
    /// Also emit the alternative printed closed forms as informational records.
    pub report_both_forms: bool,
    pub slack: SlackTable,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            primes: vec![3, 5, 7],
            workprec: 16,
            guard: 4,
            oracle_depth: None,
            max_terms: DEFAULT_MAX_TERMS,
            evaluation_cap: DEFAULT_EVALUATION_CAP,
            seed: 0x5eed,
            families: Vec::new(),
            report_both_forms: false,
            slack: SlackTable::embedded(),
        }
    }
}

impl VerifyConfig {
    fn selected(&self) -> Result<Vec<&'static str>> {
        for f in &self.families {
            if !FAMILIES.contains(&f.as_str()) {
                return Err(Error::Parse(format!("unknown identity {f:?}; known: {}", FAMILIES.join(", "))));
            }
        }
        Ok(FAMILIES
            .iter()
            .copied()
            .filter(|f| self.families.is_empty() || self.families.iter().any(|g| g == f))
            .collect())
    }

    pub fn depth_for(&self, p: u32) -> u32 {
        self.oracle_depth.unwrap_or_else(|| default_oracle_depth(p))
    }
}

/// Counts of each status.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub hypothesis_violation: usize,
    pub budget: usize,
    pub informational: usize,
}

impl Summary {
    pub fn of(reports: &[VerificationReport]) -> Self {
        let mut s = Summary { total: reports.len(), ..Default::default() };
        for r in reports {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::HypothesisViolation => s.hypothesis_violation += 1,
                Status::Budget => s.budget += 1,
                Status::Informational => s.informational += 1,
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.fail == 0 && self.budget == 0
    }
}

type Job = Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync>;

/// Everything the jobs for one prime share.
struct Setup {
    p: u32,
    ctx: PadicContext,
    engine: ZetaEngine,
    table: Arc<EulerTable>,
    n: u32,
    cap: u64,
    slack: SlackTable,
    both_forms: bool,
    /// Exponents for the CZ_p grid: 0, ±1, ±2, 3 and a random element of Z_p.
    s_czp: Vec<ExactRational>,
    /// Exponents for the Z_p grid.
    s_char: Vec<ExactRational>,
    x_czp: Vec<ExactRational>,
    x_char: Vec<i64>,
    /// Random points of CZ_p for the `s = 1` check.
    x_random: Vec<ExactRational>,
}

impl Setup {
    fn check(&self, identity: &str) -> Check {
        Check::new(identity).param("p", self.p)
    }

    fn slack(&self, family: &str) -> i64 {
        self.slack.get(family)
    }

    fn padic(&self, q: &ExactRational) -> PadicNumber {
        self.ctx.from_rational(q)
    }

    fn chars(&self, vs: &[u32]) -> Vec<DirichletCharacter> {
        let mut out = Vec::new();
        for &v in vs {
            for k in 0..(self.p - 1) {
                out.push(DirichletCharacter::new(self.p, v, k as i64).expect("valid character"));
            }
        }
        out
    }

    /// Characters for the expensive oracle grids: trivial, ω and ω^{p-2}.
    fn oracle_chars(&self, vs: &[u32]) -> Vec<DirichletCharacter> {
        let mut ks = vec![0, 1, self.p as i64 - 2];
        ks.dedup();
        let mut out = Vec::new();
        for &v in vs {
            for &k in &ks {
                out.push(DirichletCharacter::new(self.p, v, k).expect("valid character"));
            }
        }
        out
    }
}

fn random_zp(rng: &mut ChaCha8Rng, p: u32, digits: u32) -> ExactRational {
    let bound = BigInt::from(p).pow(digits);
    BigRational::from_integer(rng.gen_bigint_range(&BigInt::zero(), &bound))
}

fn random_czp(rng: &mut ChaCha8Rng, p: u32) -> ExactRational {
    let p = p as i64;
    let num = loop {
        let n: i64 = rng.gen_range(1..p.pow(6));
        if n % p != 0 {
            break n;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let k: u32 = rng.gen_range(1..=3);
    rational(sign * num, p.pow(k))
}

fn dedup_rationals(xs: Vec<ExactRational>) -> Vec<ExactRational> {
    let mut out: Vec<ExactRational> = Vec::new();
    for x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn build_setups(config: &VerifyConfig) -> Result<Vec<Arc<Setup>>> {
    let mut contexts = Vec::new();
    let mut degree = EULER_MAX_M + 1;
    for &p in &config.primes {
        let ctx = PadicContext::new(p as u64, config.workprec, config.guard)?;
        let budget = SeriesBudget { max_terms: config.max_terms, target_prec: config.workprec };
        degree = degree.max(ZetaEngine::degree_for(&ctx, budget));
        contexts.push((p, ctx, budget));
    }
    let table = Arc::new(EulerTable::build(degree));
    contexts
        .into_iter()
        .map(|(p, ctx, budget)| {
            let engine = ZetaEngine::with_table(&ctx, budget, table.clone())?;
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (p as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let random_s = random_zp(&mut rng, p, config.workprec);
            let x_random = (0..50).map(|_| random_czp(&mut rng, p)).collect();
            let pi = p as i64;
            let s_czp = [0, 1, -1, 2, -2, 3].iter().map(|&s| rational(s, 1)).chain([random_s]).collect();
            let s_char = [0, 1, -1, 2].iter().map(|&s| rational(s, 1)).collect();
            let x_czp = dedup_rationals(vec![rational(1, pi), rational(2, pi), rational(3, pi * pi), rational(-1, pi)]);
            Ok(Arc::new(Setup {
                p,
                ctx,
                engine,
                table: table.clone(),
                n: config.depth_for(p),
                cap: config.evaluation_cap,
                slack: config.slack.clone(),
                both_forms: config.report_both_forms,
                s_czp,
                s_char,
                x_czp,
                x_char: vec![0, 1, 2, pi],
                x_random,
            }))
        })
        .collect()
}

/// Runs the selected families and returns their reports in a fixed order.
pub fn run(config: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    let families = config.selected()?;
    let setups = build_setups(config)?;
    let table = setups.first().map(|s| s.table.clone()).unwrap_or_else(|| Arc::new(EulerTable::build(EULER_MAX_M + 1)));
    let mut jobs: Vec<Job> = Vec::new();
    for family in families {
        match family {
            "euler-exact" => {
                let t = table.clone();
                jobs.push(Box::new(move || match verify_euler_identities(&t, EULER_MAX_M) {
                    Ok(r) => r,
                    Err(e) => vec![Check::new("euler-exact").error(&e)],
                }));
            }
            "alt-power-sum" => alt_power_sum_jobs(&table, &mut jobs),
            "shift-identities" => shift_jobs(&table, &mut jobs),
            _ => {
                for setup in &setups {
                    prime_jobs(family, setup, &mut jobs);
                }
            }
        }
    }
    Ok(jobs.par_iter().map(|job| job()).collect::<Vec<_>>().into_iter().flatten().collect())
}

/// Calibration run: executes the suite with zero slack and returns the
/// measured constants.
pub fn calibrate(config: &VerifyConfig) -> Result<SlackTable> {
    let mut config = config.clone();
    config.slack = SlackTable::default();
    let reports = run(&config)?;
    Ok(SlackTable::measure(&reports))
}

fn push(jobs: &mut Vec<Job>, f: impl Fn() -> Vec<VerificationReport> + Send + Sync + 'static) {
    jobs.push(Box::new(f));
}

fn alt_power_sum_jobs(table: &Arc<EulerTable>, jobs: &mut Vec<Job>) {
    for x in [rational(0, 1), rational(1, 2), rational(3, 1), rational(-2, 3)] {
        for rho in [1u64, 2, 9, 10, 27, 729] {
            let t = table.clone();
            let x = x.clone();
            push(jobs, move || {
                (0..=8usize)
                    .map(|m| {
                        let check = Check::new("alt-power-sum").param("m", m).param("rho", rho).rational_param("x", &x);
                        checked(check, |c| {
                            let closed = alternating_power_sum(&t, m, rho, &x)?;
                            let mut literal = BigRational::zero();
                            for a in 0..rho {
                                let term = num_traits::pow(&x + BigRational::from_integer(BigInt::from(a)), m);
                                literal = if a % 2 == 0 { literal + term } else { literal - term };
                            }
                            Ok(c.compare_exact(&closed, &literal))
                        })
                    })
                    .collect()
            });
        }
    }
}

fn shift_jobs(table: &Arc<EulerTable>, jobs: &mut Vec<Job>) {
    let ctx = PadicContext::new(3, 4, 0).expect("valid context");
    let mut polys: Vec<Vec<ExactRational>> = (0..=6).map(monomial).collect();
    polys.push(vec![rational(1, 3), rational(-2, 1), rational(0, 1), rational(5, 7)]);
    for coefficients in polys {
        let t = table.clone();
        let f = Integrand::polynomial(coefficients, &ctx);
        push(jobs, move || {
            [rational(0, 1), rational(3, 1), rational(1, 2), rational(-5, 4)]
                .iter()
                .flat_map(|x| match verify_shift_identities(&t, &f, x) {
                    Ok(r) => r,
                    Err(e) => vec![Check::new("shift-identities").rational_param("x", x).error(&e)],
                })
                .collect()
        });
    }
}

fn prime_jobs(family: &str, setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    match family {
        "integral-convergence" => integral_convergence(setup, jobs),
        "change-of-variable" => change_of_variable_jobs(setup, jobs),
        "zeta-one" => zeta_one(setup, jobs),
        "special-neg" => special_neg(setup, jobs),
        "special-pos" => special_pos(setup, jobs),
        "oracle-czp" => oracle_czp(setup, jobs),
        "functional-czp" => functional_czp(setup, jobs),
        "reflection-czp" => reflection_czp(setup, jobs),
        "distribution-czp" => distribution_czp(setup, jobs),
        "derivative-czp" => derivative_czp(setup, jobs),
        "shifted-czp" => shifted_czp(setup, jobs),
        "raabe-czp" => raabe_czp(setup, jobs),
        "oracle-char" => oracle_char(setup, jobs),
        "ell-oracle" => ell_oracle(setup, jobs),
        "ell-even" => ell_even(setup, jobs),
        "zeta-char-one" => zeta_char_one(setup, jobs),
        "functional-char" => functional_char_jobs(setup, jobs),
        "reflection-char" => reflection_char_jobs(setup, jobs),
        "positive-n-char" => positive_n_jobs(setup, jobs),
        "distribution-char" => distribution_char_jobs(setup, jobs),
        "derivative-char" => derivative_char(setup, jobs),
        "special-char" => special_char(setup, jobs),
        "raabe-char" => raabe_char_jobs(setup, jobs),
        "representation-char" => representation_char(setup, jobs),
        "power-series-char" => power_series_char(setup, jobs),
        _ => unreachable!("family list and dispatch agree"),
    }
}

/// One job per point of `points`, each producing the reports of `f`.
fn per_point<T: Clone + Send + Sync + 'static>(
    setup: &Arc<Setup>,
    jobs: &mut Vec<Job>,
    points: Vec<T>,
    f: fn(&Setup, &T) -> Vec<VerificationReport>,
) {
    for point in points {
        let setup = setup.clone();
        push(jobs, move || f(&setup, &point));
    }
}

fn grid2<A: Clone, B: Clone>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))).collect()
}

fn integral_convergence(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let xs = vec![rational(0, 1), rational(1, 1), rational(1, 2), rational(3, 1)];
    per_point(setup, jobs, xs, |s, x| {
        const MAX_M: usize = 12;
        let depths: Vec<u32> = (2..=6).collect();
        let base = || s.check("integral-convergence").rational_param("x", x);
        let sums = match truncated_moments(&s.ctx, x, MAX_M, &depths, s.cap) {
            Ok(v) => v,
            Err(e) => return vec![base().error(&e)],
        };
        let mut out = Vec::new();
        for (n, row) in depths.iter().zip(&sums) {
            for (m, sum) in row.iter().enumerate() {
                let check = base().param("m", m).param("N", n);
                out.push(checked(check, |c| {
                    let exact = s.padic(&s.table.euler_poly_eval(m, x)?);
                    Ok(c.compare(sum, &exact, Some(*n as i64), None, Some(*n as i64), 0))
                }));
            }
        }
        out
    });
}

fn change_of_variable_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.oracle_chars(&[1, 2]), &[0i64, 2]);
    per_point(setup, jobs, points, |s, (chi, x)| {
        let xp = s.ctx.integer(*x);
        (0..=2usize)
            .map(|d| {
                let check = s
                    .check("change-of-variable")
                    .param("char", chi)
                    .param("f", format!("y^{d}"))
                    .param("x", x)
                    .param("N", s.n);
                checked(check, |c| {
                    let f = Integrand::polynomial(monomial(d), &s.ctx);
                    let (lhs, rhs) = change_of_variable(&s.table, chi, &f, &xp, s.n, s.cap)?;
                    // f((x+a)/p^v) has coefficients of valuation down to -d·v.
                    let claim = s.n as i64 - (d as i64) * chi.v() as i64;
                    Ok(c.compare(&lhs, &rhs, None, Some(claim), None, s.slack("change-of-variable")))
                })
            })
            .collect()
    });
}

fn zeta_one(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    per_point(setup, jobs, vec![()], |s, _| {
        s.x_random
            .iter()
            .map(|x| {
                let check = s.check("zeta-one").rational_param("x", x);
                checked(check, |c| {
                    let z = s.engine.zeta_czp(&s.ctx.one(), &s.padic(x))?;
                    Ok(c.compare(&z, &s.ctx.one(), None, None, Some(s.ctx.workprec() as i64), 0))
                })
            })
            .collect()
    });
}

fn special_neg(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let xs = setup.x_czp.clone();
    per_point(setup, jobs, xs, |s, x| {
        (1..=8usize)
            .map(|m| {
                let check = s.check("special-neg").param("m", m).rational_param("x", x);
                checked(check, |c| {
                    let series = s.engine.zeta_czp(&s.ctx.integer(1 - m as i64), &s.padic(x))?;
                    let exact = s.engine.zeta_special_neg(m, x)?;
                    Ok(c.compare(&series, &exact, None, None, Some(s.ctx.workprec() as i64), 0))
                })
            })
            .collect()
    });
}

fn special_pos(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&[1i64, 2, 3, -1, -3], &setup.x_czp);
    per_point(setup, jobs, points, |s, (m, x)| {
        let check = s.check("special-pos").param("m", m).rational_param("x", x).param("N", s.n);
        vec![checked(check, |c| {
            let (formula, other) = s.engine.zeta_special_pos(*m, x, s.n, s.cap)?;
            if *m < 0 {
                Ok(c.note("exact special value").compare(&formula, &other, None, None, None, 0))
            } else {
                Ok(c.compare(&formula, &other, None, Some(s.n as i64), None, s.slack("special-pos")))
            }
        })]
    });
}

fn oracle_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.s_czp, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let check = s.check("oracle-czp").rational_param("s", sv).rational_param("x", x).param("N", s.n);
        vec![checked(check, |c| {
            let sp = s.padic(sv);
            let xp = s.padic(x);
            let value = s.engine.zeta_czp(&sp, &xp)?;
            let oracle = s.engine.zeta_czp_oracle(&sp, &xp, s.n, s.cap)?;
            Ok(c.compare(&value, &oracle, None, Some(s.n as i64), None, s.slack("oracle-czp")))
        })]
    });
}

fn functional_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.s_czp, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let check = s.check("functional-czp").rational_param("s", sv).rational_param("x", x);
        vec![checked(check, |c| {
            let (l, r) = s.engine.functional_czp(&s.padic(sv), &s.padic(x))?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })]
    });
}

fn reflection_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.s_czp, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let check = s.check("reflection-czp").rational_param("s", sv).rational_param("x", x);
        vec![checked(check, |c| {
            let (l, r) = s.engine.reflection_czp(&s.padic(sv), &s.padic(x))?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })]
    });
}

fn nonpositive_integer(q: &ExactRational) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    q.to_integer().to_i64().filter(|&k| k <= 0)
}

fn odd_coprime(p: u32) -> Vec<u64> {
    [3u64, 5].into_iter().filter(|n| n % p as u64 != 0).collect()
}

fn distribution_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&grid2(&setup.s_czp, &setup.x_czp), &odd_coprime(setup.p));
    per_point(setup, jobs, points, |s, ((sv, x), n)| {
        let base = || s.check("distribution-czp").rational_param("s", sv).rational_param("x", x).param("N", n);
        let pair = s.engine.distribution_czp(&s.padic(sv), &s.padic(x), *n);
        let mut out = vec![checked(base().param("form", "corrected"), |c| {
            let (l, r) = pair.clone()?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })];
        if s.both_forms {
            out.push(checked(base().param("form", "printed").informational(), |c| {
                let (l, _) = pair.clone()?;
                let nx = s.padic(x).mul_int(*n as i64);
                let printed = s.engine.zeta_czp(&s.padic(sv), &nx)?;
                Ok(c.note("sum against ζ(s,Nx) without the ⟨N⟩^{s-1} factor").compare(&l, &printed, None, None, None, 0))
            }));
        }
        // At s = 1 - m both sides reduce to Euler polynomials.
        if let Some(m) = nonpositive_integer(sv).map(|k| (1 - k) as usize) {
            out.push(checked(base().param("form", "exact-euler"), |c| {
                let (l, _) = pair.clone()?;
                let exact = distribution_special_exact(&s.table, m, x, *n)?;
                let w = ZetaArgumentCZp::new(&s.padic(x))?.omega_v().pow(-(m as i64))?;
                Ok(c.compare(&l, &w.mul(&s.padic(&exact)), None, None, None, 0))
            }));
        }
        out
    });
}

fn derivative_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.s_czp, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let sp = s.padic(sv);
        let xp = s.padic(x);
        let formula = s.engine.dzeta_dx(&sp, &xp);
        [4i64, 6, 8]
            .iter()
            .map(|&k| {
                let check = s.check("derivative-czp").rational_param("s", sv).rational_param("x", x).param("k", k);
                checked(check, |c| {
                    let f = formula.clone()?;
                    let h = s.ctx.p_power(k);
                    let dq = s.engine.zeta_czp(&sp, &xp.add(&h))?.sub(&s.engine.zeta_czp(&sp, &xp)?).div(&h)?;
                    Ok(c.compare(&dq, &f, Some(k), None, None, s.slack("derivative-czp")))
                })
            })
            .collect()
    });
}

fn shifted_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.s_czp, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let sp = s.padic(sv);
        [rational(0, 1), rational(1, 1), rational(1, 2), rational(-3, 1)]
            .iter()
            .map(|u| {
                let check = s.check("shifted-czp").rational_param("s", sv).rational_param("x", x).rational_param("u", u);
                checked(check, |c| {
                    let shifted = s.engine.zeta_shifted(&sp, &s.padic(x), u)?;
                    let direct = s.engine.zeta_czp(&sp, &s.padic(&(x + u)))?;
                    Ok(c.compare(&shifted, &direct, None, None, None, 0))
                })
            })
            .collect()
    });
}

fn raabe_czp(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let ss: Vec<ExactRational> = setup.s_czp.iter().filter(|s| **s != rational(-2, 1)).cloned().collect();
    let points = grid2(&ss, &setup.x_czp);
    per_point(setup, jobs, points, |s, (sv, x)| {
        let sp = s.padic(sv);
        let xp = s.padic(x);
        let base = || s.check("raabe-czp").rational_param("s", sv).rational_param("x", x);
        let integral = s.engine.integral_of_zeta(&sp, &xp);
        let closed = s.engine.raabe_closed_form(&sp, &xp);
        let oracle = s.engine.raabe_oracle(&sp, &xp, s.n, s.cap);
        let mut out = vec![
            checked(base().param("form", "integral-vs-oracle").param("N", s.n), |c| {
                Ok(c.compare(&integral.clone()?, &oracle.clone()?, None, Some(s.n as i64), None, s.slack("raabe-czp")))
            }),
            checked(base().param("form", "closed-vs-integral"), |c| {
                Ok(c.compare(&closed.clone()?, &integral.clone()?, None, None, None, 0))
            }),
            checked(base().param("form", "closed-vs-oracle").param("N", s.n), |c| {
                Ok(c.compare(&closed.clone()?, &oracle.clone()?, None, Some(s.n as i64), None, s.slack("raabe-czp")))
            }),
        ];
        if s.both_forms {
            out.push(checked(base().param("form", "printed-vs-integral").informational(), |c| {
                let printed = s.engine.raabe_printed_form(&sp, &xp)?;
                let residual = printed.sub(&integral.clone()?);
                Ok(c.note(format!("residual printed - integral = {}", residual.render_text()))
                    .compare(&printed, &integral.clone()?, None, None, None, 0))
            }));
        }
        out
    });
}

fn oracle_char(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&grid2(&setup.oracle_chars(&[1, 2]), &setup.s_char), &setup.x_char);
    per_point(setup, jobs, points, |s, ((chi, sv), x)| {
        let check =
            s.check("oracle-char").param("char", chi).rational_param("s", sv).param("x", x).param("N", s.n);
        vec![checked(check, |c| {
            let sp = s.padic(sv);
            let xp = s.ctx.integer(*x);
            let value = zeta_char(&s.engine, chi, &sp, &xp)?;
            let oracle = zeta_char_oracle(&s.engine, chi, &sp, &xp, s.n, s.cap)?;
            Ok(c.compare(&value, &oracle, None, Some(s.n as i64), None, s.slack("oracle-char")))
        })]
    });
}

fn ell_oracle(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let odd: Vec<DirichletCharacter> = setup.chars(&[1]).into_iter().filter(|c| !c.is_even()).collect();
    let points = grid2(&odd, &setup.s_czp);
    per_point(setup, jobs, points, |s, (chi, sv)| {
        let sp = s.padic(sv);
        let value = ell(&s.engine, chi, &sp);
        (s.n.saturating_sub(2).max(1)..=s.n)
            .map(|n| {
                let check = s.check("ell-oracle").param("char", chi).rational_param("s", sv).param("N", n);
                checked(check, |c| {
                    let oracle = ell_limit_oracle(&s.engine, chi, &sp, n, s.cap)?;
                    Ok(c.compare(&value.clone()?, &oracle, None, Some(n as i64), None, s.slack("ell-oracle")))
                })
            })
            .collect()
    });
}

fn ell_even(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let even: Vec<DirichletCharacter> = setup.chars(&[1, 2]).into_iter().filter(|c| c.is_even()).collect();
    let points = grid2(&even, &setup.s_czp);
    per_point(setup, jobs, points, |s, (chi, sv)| {
        let check = s.check("ell-even").param("char", chi).rational_param("s", sv);
        vec![checked(check, |c| {
            let value = ell(&s.engine, chi, &s.padic(sv))?;
            Ok(c.compare(&value, &s.ctx.zero(), None, None, Some(s.ctx.workprec() as i64), 0))
        })]
    });
}

fn zeta_char_one(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.chars(&[1, 2]), &setup.x_char);
    per_point(setup, jobs, points, |s, (chi, x)| {
        let check = s.check("zeta-char-one").param("char", chi).param("x", x);
        vec![checked(check, |c| {
            let xp = s.ctx.integer(*x);
            let value = zeta_char(&s.engine, chi, &s.ctx.one(), &xp)?;
            Ok(c.compare(&value, &character_sum(chi, &xp)?, None, None, Some(s.ctx.workprec() as i64), 0))
        })]
    });
}

fn char_grid(setup: &Setup) -> Vec<((DirichletCharacter, ExactRational), i64)> {
    grid2(&grid2(&setup.chars(&[1, 2]), &setup.s_char), &setup.x_char)
}

fn functional_char_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    per_point(setup, jobs, char_grid(setup), |s, ((chi, sv), x)| {
        let check = s.check("functional-char").param("char", chi).rational_param("s", sv).param("x", x);
        vec![checked(check, |c| {
            let (l, r) = functional_char(&s.engine, chi, &s.padic(sv), &s.ctx.integer(*x))?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })]
    });
}

fn reflection_char_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    per_point(setup, jobs, char_grid(setup), |s, ((chi, sv), x)| {
        let check = s.check("reflection-char").param("char", chi).rational_param("s", sv).param("x", x);
        vec![checked(check, |c| {
            let (l, r) = reflection_char(&s.engine, chi, &s.padic(sv), &s.ctx.integer(*x))?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })]
    });
}

fn positive_n_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.chars(&[1, 2]), &setup.s_char);
    per_point(setup, jobs, points, |s, (chi, sv)| {
        (1..=3u64)
            .map(|n| {
                let check = s.check("positive-n-char").param("char", chi).rational_param("s", sv).param("n", n);
                checked(check, |c| {
                    let (l, r) = positive_n_char(&s.engine, chi, &s.padic(sv), n)?;
                    Ok(c.compare(&l, &r, None, None, None, 0))
                })
            })
            .collect()
    });
}

fn distribution_char_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&char_grid(setup), &odd_coprime(setup.p));
    per_point(setup, jobs, points, |s, (((chi, sv), x), n)| {
        let base = || {
            s.check("distribution-char").param("char", chi).rational_param("s", sv).param("x", x).param("N", n)
        };
        let sides = distribution_char(&s.engine, chi, &s.padic(sv), &s.ctx.integer(*x), *n);
        let mut out = vec![checked(base().param("form", "corrected"), |c| {
            let (l, r, _) = sides.clone()?;
            Ok(c.compare(&l, &r, None, None, None, 0))
        })];
        if s.both_forms {
            out.push(checked(base().param("form", "printed").informational(), |c| {
                let (l, _, bare) = sides.clone()?;
                Ok(c.note("sum against χ^{-1}(N)ζ(χ,s,Nx) without the ⟨N⟩^{s-1} factor")
                    .compare(&l, &bare, None, None, None, 0))
            }));
        }
        out
    });
}

fn derivative_char(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&grid2(&setup.oracle_chars(&[1, 2]), &setup.s_char), &setup.x_char);
    per_point(setup, jobs, points, |s, ((chi, sv), x)| {
        let sp = s.padic(sv);
        let xp = s.ctx.integer(*x);
        let formula = dzeta_char_dx(&s.engine, chi, &sp, &xp);
        let mut out: Vec<VerificationReport> = [4i64, 6, 8]
            .iter()
            .map(|&k| {
                let check =
                    s.check("derivative-char").param("char", chi).rational_param("s", sv).param("x", x).param("k", k);
                checked(check, |c| {
                    let h = s.ctx.p_power(k);
                    let dq = zeta_char(&s.engine, chi, &sp, &xp.add(&h))?
                        .sub(&zeta_char(&s.engine, chi, &sp, &xp)?)
                        .div(&h)?;
                    Ok(c.compare(&dq, &formula.clone()?, Some(k), None, None, s.slack("derivative-char")))
                })
            })
            .collect();
        if sv.is_zero() {
            // ∂/∂x ζ(χω, 0, x) is the finite character sum of χ.
            let base = chi.twist(-1);
            let check = s.check("derivative-char").param("char", base).param("x", x).param("form", "character-sum");
            out.push(checked(check, |c| {
                let d = dzeta_char_dx(&s.engine, chi, &s.ctx.zero(), &xp)?;
                Ok(c.compare(&d, &character_sum(&base, &xp)?, None, None, None, 0))
            }));
        }
        out
    });
}

fn special_char(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&setup.chars(&[1, 2]), &setup.x_char);
    per_point(setup, jobs, points, |s, (chi, x)| {
        (1..=6usize)
            .map(|k| {
                let check = s.check("special-char").param("char", chi).param("k", k).param("x", x);
                checked(check, |c| {
                    let (l, r) = zeta_char_special(&s.engine, chi, k, &s.ctx.integer(*x))?;
                    Ok(c.compare(&l, &r, None, None, None, 0))
                })
            })
            .collect()
    });
}

fn raabe_char_jobs(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let points = grid2(&grid2(&setup.oracle_chars(&[1, 2]), &setup.s_char), &setup.x_char);
    per_point(setup, jobs, points, |s, ((chi, sv), x)| {
        let check = s.check("raabe-char").param("char", chi).rational_param("s", sv).param("x", x).param("N", s.n);
        vec![checked(check, |c| {
            let (oracle, formula) = raabe_char(&s.engine, chi, &s.padic(sv), &s.ctx.integer(*x), s.n, s.cap)?;
            Ok(c.compare(&formula, &oracle, None, Some(s.n as i64), None, s.slack("raabe-char")))
        })]
    });
}

fn representation_char(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    per_point(setup, jobs, char_grid(setup), |s, ((chi, sv), x)| {
        let factor = if s.p == 3 { 5 } else { 3 };
        let m = factor * chi.modulus();
        let sp = s.padic(sv);
        let xp = s.ctx.integer(*x);
        let base = || s.check("representation-char").param("char", chi).rational_param("s", sv).param("x", x).param("M", m);
        let direct = zeta_char(&s.engine, chi, &sp, &xp);
        let mut out = vec![checked(base().param("form", "corrected"), |c| {
            let other = zeta_char_with_modulus(&s.engine, chi, &sp, &xp, m)?;
            Ok(c.compare(&other, &direct.clone()?, None, None, None, 0))
        })];
        if s.both_forms {
            out.push(checked(base().param("form", "printed").informational(), |c| {
                let bare = representation_sum(&s.engine, chi, &sp, &xp, m)?;
                Ok(c.note("modulus-M sum without the ⟨M⟩^{1-s} factor").compare(&bare, &direct.clone()?, None, None, None, 0))
            }));
        }
        out
    });
}

fn power_series_char(setup: &Arc<Setup>, jobs: &mut Vec<Job>) {
    let mut points = Vec::new();
    for chi in setup.oracle_chars(&[1, 2]) {
        let q = chi.modulus() as i64;
        for x in [0, q, 2 * q, setup.p as i64 * q] {
            for sv in &setup.s_char {
                points.push((chi, sv.clone(), x));
            }
        }
    }
    per_point(setup, jobs, points, |s, (chi, sv, x)| {
        let check = s.check("power-series-char").param("char", chi).rational_param("s", sv).param("x", x);
        vec![checked(check, |c| {
            let sp = s.padic(sv);
            let xp = s.ctx.integer(*x);
            let series = power_series_zeta(&s.engine, chi, &sp, &xp, None)?;
            let direct = zeta_char(&s.engine, chi, &sp, &xp)?;
            Ok(c.compare(&series, &direct, None, None, Some(s.ctx.workprec() as i64), 0))
        })]
    });
}

//! ζ_{p,E}(s, x) for `x ∈ CZ_p = Q_p \ Z_p`.
//!
//! Evaluation uses the Laurent expansion
//! `ζ(s,x) = ⟨x⟩^{1-s} Σ_i C(1-s, i) E_i(0) x^{-i}`. Term `i` has valuation at
//! least `i·e - v_p(i!)` where `e = -v_p(x) >= 1`, because `|E_i(0)|_p <= 1`
//! and the falling factorial `(1-s)(−s)…` is integral; with
//! `v_p(i!) <= (i-1)/(p-1)` this bound increases with `i`, so the series is
//! cut at the first index where it reaches the target.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::euler::EulerTable;
use crate::fermionic::{alternating_sum_range, truncation_count};
use crate::padic::{angle, omega_v, power_st, ExactRational, PadicContext, PadicNumber};

pub const DEFAULT_MAX_TERMS: usize = 4096;

/// How far a series may run, and how many digits its value must carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesBudget {
    pub max_terms: usize,
    pub target_prec: u32,
}

impl SeriesBudget {
    pub fn for_context(ctx: &PadicContext) -> Self {
        SeriesBudget { max_terms: DEFAULT_MAX_TERMS, target_prec: ctx.workprec() }
    }
}

/// An element of CZ_p together with its Teichmüller decomposition.
#[derive(Clone, Debug)]
pub struct ZetaArgumentCZp {
    x: PadicNumber,
    angle: PadicNumber,
    omega_v: PadicNumber,
}

impl ZetaArgumentCZp {
    pub fn new(x: &PadicNumber) -> Result<Self> {
        match x.valuation() {
            Some(v) if v <= -1 => Ok(ZetaArgumentCZp {
                x: x.clone(),
                angle: angle(x)?,
                omega_v: omega_v(x)?,
            }),
            _ => Err(Error::ArgumentInZp),
        }
    }

    pub fn x(&self) -> &PadicNumber {
        &self.x
    }

    pub fn angle(&self) -> &PadicNumber {
        &self.angle
    }

    pub fn omega_v(&self) -> &PadicNumber {
        &self.omega_v
    }

    /// `e = -v_p(x)`.
    pub fn depth(&self) -> i64 {
        -self.x.valuation().expect("nonzero")
    }
}

/// `1 - s`, after checking `s ∈ Z_p`.
fn one_minus(s: &PadicNumber) -> Result<PadicNumber> {
    if !s.is_integral() {
        return Err(Error::ExponentOutsideDomain);
    }
    Ok(s.ctx().one().sub(s))
}

/// Evaluator for the zeta functions of one context: the context, an Euler
/// table long enough for the series, its embedding, and the series budget.
/// Cheap to clone and shareable across threads.
#[derive(Clone, Debug)]
pub struct ZetaEngine {
    ctx: PadicContext,
    budget: SeriesBudget,
    table: Arc<EulerTable>,
    e0: Arc<Vec<PadicNumber>>,
}

impl ZetaEngine {
    pub fn new(ctx: &PadicContext) -> Self {
        Self::with_budget(ctx, SeriesBudget::for_context(ctx))
    }

    pub fn with_budget(ctx: &PadicContext, budget: SeriesBudget) -> Self {
        let degree = Self::degree_for(ctx, budget);
        Self::with_table(ctx, budget, Arc::new(EulerTable::build(degree))).expect("table is long enough")
    }

    /// Uses a prebuilt table, which must reach [`ZetaEngine::degree_for`].
    pub fn with_table(ctx: &PadicContext, budget: SeriesBudget, table: Arc<EulerTable>) -> Result<Self> {
        let degree = Self::degree_for(ctx, budget);
        if table.max_degree() < degree {
            return Err(Error::DegreeOverflow { requested: degree, available: table.max_degree() });
        }
        let e0 = Arc::new(table.embed_zero_values(ctx));
        Ok(ZetaEngine { ctx: ctx.clone(), budget, table, e0 })
    }

    /// Euler-table degree the series can consume: the term count for
    /// `e = 1` (the slowest case) plus two for the shifted and integrated sums.
    pub fn degree_for(ctx: &PadicContext, budget: SeriesBudget) -> usize {
        let target = (budget.target_prec + ctx.guard()) as i64;
        let n = terms_for(ctx.p(), 1, target).min(budget.max_terms);
        n + 2
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn budget(&self) -> SeriesBudget {
        self.budget
    }

    pub fn table(&self) -> &Arc<EulerTable> {
        &self.table
    }

    /// Same table, different budget (the table must still be long enough).
    pub fn rebudget(&self, budget: SeriesBudget) -> Result<Self> {
        Self::with_table(&self.ctx, budget, self.table.clone())
    }

    fn check_ctx(&self, x: &PadicNumber) -> Result<()> {
        if x.ctx() != &self.ctx {
            return Err(Error::PrimeMismatch(x.p(), self.ctx.p()));
        }
        Ok(())
    }

    /// Digits the series must reach before truncation: the target plus guard.
    fn series_target(&self) -> i64 {
        (self.budget.target_prec + self.ctx.guard()) as i64
    }

    fn finish(&self, value: PadicNumber) -> PadicNumber {
        value.cap_absprec(self.budget.target_prec as i64)
    }

    /// Number of series terms for per-term valuation growth `e`.
    pub fn terms_needed(&self, e: i64) -> Result<usize> {
        let n = terms_for(self.ctx.p(), e, self.series_target());
        if n > self.budget.max_terms {
            return Err(Error::BudgetExhausted { needed: n, max_terms: self.budget.max_terms });
        }
        Ok(n)
    }

    /// `C(t, i)` for `i < n`, built incrementally.
    fn binomials(t: &PadicNumber, n: usize) -> Vec<PadicNumber> {
        let mut out = Vec::with_capacity(n);
        let mut b = t.ctx().one();
        for i in 0..n {
            out.push(b.clone());
            b = b.mul(&t.add_int(-(i as i64))).div_int(i as u64 + 1);
        }
        out
    }

    /// `⟨x⟩^t Σ_{i<n} c_i y^i`, Horner in `y`.
    fn laurent(&self, t: &PadicNumber, x: &PadicNumber, y: &PadicNumber, coefficients: &[PadicNumber]) -> Result<PadicNumber> {
        let sum = coefficients.iter().rev().fold(self.ctx.zero(), |acc, c| acc.mul(y).add(c));
        Ok(power_st(x, t)?.mul(&sum))
    }

    /// Series coefficients `C(1-s, i) E_{i+shift}(0)` for `i < n`.
    fn prepared(&self, t: &PadicNumber, n: usize, shift: usize) -> Result<Vec<PadicNumber>> {
        if n + shift > self.e0.len() {
            return Err(Error::DegreeOverflow { requested: n + shift - 1, available: self.table.max_degree() });
        }
        Ok(Self::binomials(t, n).iter().enumerate().map(|(i, b)| b.mul(&self.e0[i + shift])).collect())
    }

    /// Fixes `s` and the depth `e`, so that ζ(s, ·) can be evaluated at many
    /// points with `v_p(x) <= -e` without rebuilding the coefficients.
    pub fn prepare(&self, s: &PadicNumber, e: i64) -> Result<PreparedZeta> {
        if e < 1 {
            return Err(Error::ArgumentInZp);
        }
        let t = one_minus(s)?;
        let n = self.terms_needed(e)?;
        let coefficients = self.prepared(&t, n, 0)?;
        Ok(PreparedZeta { engine: self.clone(), t, e, coefficients })
    }

    pub fn zeta_czp(&self, s: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
        self.check_ctx(x)?;
        self.zeta_czp_arg(s, &ZetaArgumentCZp::new(x)?)
    }

    pub fn zeta_czp_arg(&self, s: &PadicNumber, arg: &ZetaArgumentCZp) -> Result<PadicNumber> {
        let t = one_minus(s)?;
        let n = self.terms_needed(arg.depth())?;
        let c = self.prepared(&t, n, 0)?;
        Ok(self.finish(self.laurent(&t, &arg.x, &arg.x.inv()?, &c)?))
    }

    /// ζ(s, ·) at many points with one shared exponent `s`.
    pub fn zeta_czp_batch(&self, s: &PadicNumber, xs: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        let t = one_minus(s)?;
        let mut cache: Vec<(i64, Vec<PadicNumber>)> = Vec::new();
        xs.iter()
            .map(|x| {
                self.check_ctx(x)?;
                let arg = ZetaArgumentCZp::new(x)?;
                let e = arg.depth();
                if !cache.iter().any(|(d, _)| *d == e) {
                    let n = self.terms_needed(e)?;
                    cache.push((e, self.prepared(&t, n, 0)?));
                }
                let c = &cache.iter().find(|(d, _)| *d == e).expect("cached").1;
                Ok(self.finish(self.laurent(&t, x, &x.inv()?, c)?))
            })
            .collect()
    }

    /// `⟨x⟩^{1-s} Σ C(1-s,i) E_i(u) x^{-i}`, the expansion of ζ(s, x+u).
    /// Needs `x ∈ CZ_p` and `v_p(x) - v_p(u) <= -1`.
    pub fn zeta_shifted(&self, s: &PadicNumber, x: &PadicNumber, u: &ExactRational) -> Result<PadicNumber> {
        self.check_ctx(x)?;
        let arg = ZetaArgumentCZp::new(x)?;
        let vx = -arg.depth();
        let vu = crate::padic::valuation_rational(u, self.ctx.p());
        if let Some(vu) = vu {
            if vx - vu > -1 {
                return Err(Error::ShiftConditionViolated);
            }
        }
        let e = arg.depth() + vu.map_or(0, |v| v.min(0));
        let t = one_minus(s)?;
        let n = self.terms_needed(e)?;
        let b = Self::binomials(&t, n);
        let c = (0..n)
            .map(|i| Ok(b[i].mul(&self.ctx.from_rational(&self.table.euler_poly_eval(i, u)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.finish(self.laurent(&t, x, &x.inv()?, &c)?))
    }

    /// `ω_v(x)^{-m} E_m(x)` from the exact Euler table.
    pub fn zeta_special_neg(&self, m: usize, x: &ExactRational) -> Result<PadicNumber> {
        let xp = self.ctx.from_rational(x);
        let arg = ZetaArgumentCZp::new(&xp)?;
        let e = self.ctx.from_rational(&self.table.euler_poly_eval(m, x)?);
        Ok(arg.omega_v.pow(-(m as i64))?.mul(&e))
    }

    /// `ζ(1+m, x)` from the series, and `ω_v(x)^m Σ_{a<p^N} (x+a)^{-m}(-1)^a`
    /// (for `m < 0` the exact special value instead of the truncated sum).
    pub fn zeta_special_pos(
        &self,
        m: i64,
        x: &ExactRational,
        n: u32,
        cap: u64,
    ) -> Result<(PadicNumber, PadicNumber)> {
        if m == 0 {
            return Err(Error::ArgumentViolation("m must be nonzero".into()));
        }
        let xp = self.ctx.from_rational(x);
        let arg = ZetaArgumentCZp::new(&xp)?;
        let formula = self.zeta_czp_arg(&self.ctx.integer(1 + m), &arg)?;
        if m < 0 {
            return Ok((formula, self.zeta_special_neg((-m) as usize, x)?));
        }
        let count = truncation_count(self.ctx.p(), n, cap)?;
        let sum = alternating_sum_range(&self.ctx, 0, count, |a| {
            xp.add(&self.ctx.from_bigint(&BigInt::from(a))).pow(-m)
        })?;
        Ok((formula, arg.omega_v.pow(m)?.mul(&sum)))
    }

    /// `(1-s)/ω_v(x) · ζ(s+1, x)`.
    pub fn dzeta_dx(&self, s: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
        let arg = ZetaArgumentCZp::new(x)?;
        let t = one_minus(s)?;
        let z = self.zeta_czp_arg(&s.add_int(1), &arg)?;
        Ok(t.mul(&z).div(&arg.omega_v)?)
    }

    /// `Σ_{j<N} (-1)^j ζ(s, x + j/N)` and `⟨N⟩^{s-1} ζ(s, Nx)`.
    ///
    /// Splitting `a = j + N b` in `∫⟨Nx+a⟩^{1-s}` pulls out `⟨N⟩^{1-s}`, so
    /// the two sides agree only with that factor (it is 1 when `s = 1`).
    pub fn distribution_czp(&self, s: &PadicNumber, x: &PadicNumber, n: u64) -> Result<(PadicNumber, PadicNumber)> {
        check_distribution_n(n, self.ctx.p())?;
        let arg = ZetaArgumentCZp::new(x)?;
        let nq = self.ctx.integer(n as i64);
        let xs: Vec<PadicNumber> = (0..n)
            .map(|j| x.add(&self.ctx.from_rational(&BigRational::new(BigInt::from(j), BigInt::from(n)))))
            .collect();
        let vals = self.zeta_czp_batch(s, &xs)?;
        let lhs = vals
            .iter()
            .enumerate()
            .fold(self.ctx.zero(), |acc, (j, z)| if j % 2 == 0 { acc.add(z) } else { acc.sub(z) });
        let rhs = power_st(&nq, &s.add_int(-1))?.mul(&self.zeta_czp(s, &arg.x.mul(&nq))?);
        Ok((lhs, rhs))
    }

    /// `ζ(s, 1-x)` and `ζ(s, x)`.
    pub fn reflection_czp(&self, s: &PadicNumber, x: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
        let lhs = self.zeta_czp(s, &self.ctx.one().sub(x))?;
        Ok((lhs, self.zeta_czp(s, x)?))
    }

    /// `ζ(s,x+1) + ζ(s,x)` and `2x / (ω_v(x)⟨x⟩^s)`.
    pub fn functional_czp(&self, s: &PadicNumber, x: &PadicNumber) -> Result<(PadicNumber, PadicNumber)> {
        let arg = ZetaArgumentCZp::new(x)?;
        let lhs = self.zeta_czp(s, &x.add_int(1))?.add(&self.zeta_czp_arg(s, &arg)?);
        let rhs = x.mul_int(2).div(&arg.omega_v.mul(&power_st(x, s)?))?;
        Ok((lhs, rhs))
    }

    /// `∫ ζ(s, x+a) dμ_{-1}(a)` integrated term by term:
    /// `2ζ(s,x) + 2⟨x⟩^{1-s} Σ C(1-s,i) x^{-i} E_{i+1}(0)`.
    pub fn integral_of_zeta(&self, s: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
        let arg = ZetaArgumentCZp::new(x)?;
        let t = one_minus(s)?;
        let n = self.terms_needed(arg.depth())?;
        let c = self.prepared(&t, n, 1)?;
        let tail = self.laurent(&t, x, &x.inv()?, &c)?;
        let z = self.zeta_czp_arg(s, &arg)?;
        Ok(self.finish(z.add(&tail).mul_int(2)))
    }

    /// `2(1-x)ζ(s,x) + 2ω_v(x)ζ(s-1,x)`.
    pub fn raabe_closed_form(&self, s: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
        let arg = ZetaArgumentCZp::new(x)?;
        let a = self.ctx.one().sub(x).mul(&self.zeta_czp_arg(s, &arg)?);
        let b = arg.omega_v.mul(&self.zeta_czp_arg(&s.add_int(-1), &arg)?);
        Ok(a.add(&b).mul_int(2))
    }

    /// `2(1+1/x)ζ(s,x) - 2/(x⟨x⟩)·ζ(s-1,x)`, the closed form as printed in
    /// the source; it disagrees with the integral already at `s = 1`.
    pub fn raabe_printed_form(&self, s: &PadicNumber, x: &PadicNumber) -> Result<PadicNumber> {
        let arg = ZetaArgumentCZp::new(x)?;
        let inv_x = x.inv()?;
        let a = self.ctx.one().add(&inv_x).mul(&self.zeta_czp_arg(s, &arg)?);
        let b = self.zeta_czp_arg(&s.add_int(-1), &arg)?.div(&x.mul(&arg.angle))?;
        Ok(a.sub(&b).mul_int(2))
    }

    /// `Σ_{a<p^N} ζ(s, x+a)(-1)^a`.
    pub fn raabe_oracle(&self, s: &PadicNumber, x: &PadicNumber, n: u32, cap: u64) -> Result<PadicNumber> {
        let arg = ZetaArgumentCZp::new(x)?;
        let t = one_minus(s)?;
        let terms = self.terms_needed(arg.depth())?;
        let c = self.prepared(&t, terms, 0)?;
        let count = truncation_count(self.ctx.p(), n, cap)?;
        alternating_sum_range(&self.ctx, 0, count, |a| {
            let y = x.add(&self.ctx.from_bigint(&BigInt::from(a)));
            Ok(self.finish(self.laurent(&t, &y, &y.inv()?, &c)?))
        })
    }

    /// The defining truncated integral `Σ_{a<p^N} ⟨x+a⟩^{1-s}(-1)^a`.
    pub fn zeta_czp_oracle(&self, s: &PadicNumber, x: &PadicNumber, n: u32, cap: u64) -> Result<PadicNumber> {
        ZetaArgumentCZp::new(x)?;
        let t = one_minus(s)?;
        let count = truncation_count(self.ctx.p(), n, cap)?;
        alternating_sum_range(&self.ctx, 0, count, |a| {
            power_st(&x.add(&self.ctx.from_bigint(&BigInt::from(a))), &t)
        })
    }
}

/// ζ(s, ·) with `s` fixed; see [`ZetaEngine::prepare`].
#[derive(Clone, Debug)]
pub struct PreparedZeta {
    engine: ZetaEngine,
    t: PadicNumber,
    e: i64,
    coefficients: Vec<PadicNumber>,
}

impl PreparedZeta {
    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        match x.valuation() {
            Some(v) if -v >= self.e => {}
            Some(v) if v <= -1 => {
                return Err(Error::ArgumentViolation(format!(
                    "prepared for v_p(x) <= {}, got {v}",
                    -self.e
                )))
            }
            _ => return Err(Error::ArgumentInZp),
        }
        let e = &self.engine;
        Ok(e.finish(e.laurent(&self.t, x, &x.inv()?, &self.coefficients)?))
    }
}

/// Smallest `n >= 1` with `n·e - floor((n-1)/(p-1)) >= target`: every term
/// of index `>= n` is then below the target.
fn terms_for(p: u32, e: i64, target: i64) -> usize {
    let p = p as i64;
    let mut n: i64 = 1;
    while n * e - (n - 1) / (p - 1) < target {
        n += 1;
    }
    n as usize
}

pub(crate) fn check_distribution_n(n: u64, p: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::ArgumentViolation("N must be positive".into()));
    }
    if n % 2 == 0 {
        return Err(Error::EvenN);
    }
    if n % p as u64 == 0 {
        return Err(Error::ArgumentViolation(format!("p = {p} divides N = {n}")));
    }
    Ok(())
}

/// `Σ_{j<N} (-1)^j ζ(s, x + j/N)` over exact rationals at `s = 1 - m`, via the
/// special values; used to cross-check the distribution relation.
pub fn distribution_special_exact(table: &EulerTable, m: usize, x: &ExactRational, n: u64) -> Result<ExactRational> {
    let mut acc = BigRational::zero();
    for j in 0..n {
        let y = x + BigRational::new(BigInt::from(j), BigInt::from(n));
        let e = table.euler_poly_eval(m, &y)?;
        acc = if j % 2 == 0 { acc + e } else { acc - e };
    }
    Ok(acc)
}

//! The fermionic integral `I_{-1}(f) = lim Σ_{a<p^N} f(a)(-1)^a`.
//!
//! Polynomial integrands have exact closed forms through Euler polynomials;
//! everything else goes through truncated alternating sums, which serve as
//! the oracles for the zeta modules.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::character::DirichletCharacter;
use crate::error::{Error, Result};
use crate::euler::{binomial_row, EulerTable};
use crate::padic::{rational, ExactRational, PadicContext, PadicNumber};
use crate::report::{Check, VerificationReport};

/// Default bound on the number of integrand evaluations of one truncated sum.
pub const DEFAULT_EVALUATION_CAP: u64 = 1_000_000;

/// Terms per work unit of a truncated sum. Partial sums are formed per chunk
/// and combined in index order, so the result never depends on scheduling.
const CHUNK: u64 = 2048;

type EvalFn = dyn Fn(u64) -> Result<PadicNumber> + Send + Sync;

#[derive(Clone, Debug, PartialEq)]
pub enum Smoothness {
    /// `f(a) = Σ c_i a^i` with the listed exact coefficients.
    Polynomial(Vec<ExactRational>),
    LocallyAnalytic,
}

/// A function on the nonnegative integer representatives of Z_p.
#[derive(Clone)]
pub struct Integrand {
    eval: Arc<EvalFn>,
    smoothness: Smoothness,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand").field("smoothness", &self.smoothness).finish()
    }
}

impl Integrand {
    /// `a ↦ Σ c_i a^i`.
    pub fn polynomial(coefficients: Vec<ExactRational>, ctx: &PadicContext) -> Self {
        let embedded: Vec<PadicNumber> = coefficients.iter().map(|c| ctx.from_rational(c)).collect();
        let ctx = ctx.clone();
        let eval = move |a: u64| -> Result<PadicNumber> {
            let y = ctx.from_bigint(&BigInt::from(a));
            Ok(horner(&embedded, &y, &ctx))
        };
        Integrand { eval: Arc::new(eval), smoothness: Smoothness::Polynomial(coefficients) }
    }

    /// `a ↦ (x + a)^m`.
    pub fn monomial_shift(m: usize, x: &ExactRational, ctx: &PadicContext) -> Self {
        Self::polynomial(shift_coefficients(&monomial(m), x), ctx)
    }

    pub fn locally_analytic(f: impl Fn(u64) -> Result<PadicNumber> + Send + Sync + 'static) -> Self {
        Integrand { eval: Arc::new(f), smoothness: Smoothness::LocallyAnalytic }
    }

    pub fn eval(&self, a: u64) -> Result<PadicNumber> {
        (self.eval)(a)
    }

    pub fn smoothness(&self) -> &Smoothness {
        &self.smoothness
    }

    pub fn coefficients(&self) -> Option<&[ExactRational]> {
        match &self.smoothness {
            Smoothness::Polynomial(c) => Some(c),
            Smoothness::LocallyAnalytic => None,
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients().map(|c| c.len().saturating_sub(1))
    }

    /// The polynomial at a p-adic point.
    pub fn eval_padic(&self, y: &PadicNumber) -> Result<PadicNumber> {
        let c = self
            .coefficients()
            .ok_or_else(|| Error::Integrand("p-adic evaluation needs a polynomial integrand".into()))?;
        let ctx = y.ctx();
        let embedded: Vec<PadicNumber> = c.iter().map(|q| ctx.from_rational(q)).collect();
        Ok(horner(&embedded, y, ctx))
    }

    /// The polynomial at an exact point.
    pub fn eval_exact(&self, y: &ExactRational) -> Result<ExactRational> {
        let c = self
            .coefficients()
            .ok_or_else(|| Error::Integrand("exact evaluation needs a polynomial integrand".into()))?;
        Ok(c.iter().rev().fold(BigRational::zero(), |acc, q| acc * y + q))
    }
}

fn horner(coefficients: &[PadicNumber], y: &PadicNumber, ctx: &PadicContext) -> PadicNumber {
    coefficients.iter().rev().fold(ctx.zero(), |acc, c| acc.mul(y).add(c))
}

/// Coefficients of `a^m`.
pub fn monomial(m: usize) -> Vec<ExactRational> {
    let mut c = vec![BigRational::zero(); m + 1];
    c[m] = BigRational::one();
    c
}

/// Coefficients of `a ↦ f(a + t)` given those of `f`.
pub fn shift_coefficients(coefficients: &[ExactRational], t: &ExactRational) -> Vec<ExactRational> {
    let mut out = vec![BigRational::zero(); coefficients.len()];
    for (m, c) in coefficients.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let row = binomial_row(m);
        let mut tp = BigRational::one();
        // c (a + t)^m = Σ_i C(m,i) t^{m-i} a^i; walk i downward so t^{m-i} grows
        for i in (0..=m).rev() {
            out[i] += c * BigRational::from_integer(row[i].clone()) * &tp;
            tp *= t;
        }
    }
    out
}

/// `∫ Σ c_m (x+a)^m dμ_{-1}(a) = Σ c_m E_m(x)`, exactly.
pub fn integrate_polynomial_exact(
    table: &EulerTable,
    coefficients: &[ExactRational],
    x: &ExactRational,
) -> Result<ExactRational> {
    let mut acc = BigRational::zero();
    for (m, c) in coefficients.iter().enumerate() {
        if !c.is_zero() {
            acc += c * table.euler_poly_eval(m, x)?;
        }
    }
    Ok(acc)
}

/// `∫ (x+a)^m dμ_{-1}(a) = E_m(x)`, embedded in Q_p.
pub fn integrate_monomial_shift(
    table: &EulerTable,
    m: usize,
    x: &ExactRational,
    ctx: &PadicContext,
) -> Result<PadicNumber> {
    Ok(ctx.from_rational(&table.euler_poly_eval(m, x)?))
}

/// `p^N`, refusing depths whose evaluation count exceeds `cap`.
pub fn truncation_count(p: u32, n: u32, cap: u64) -> Result<u64> {
    let needed = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(Error::TruncationCapExceeded { needed, cap });
    }
    Ok(needed as u64)
}

fn signed(a: u64, value: PadicNumber) -> PadicNumber {
    if a % 2 == 0 {
        value
    } else {
        value.neg()
    }
}

/// `Σ_{a ∈ [start, end)} f(a)(-1)^a`, chunked and combined in index order.
pub fn alternating_sum_range<F>(ctx: &PadicContext, start: u64, end: u64, f: F) -> Result<PadicNumber>
where
    F: Fn(u64) -> Result<PadicNumber> + Sync,
{
    let chunks = (end.saturating_sub(start)).div_ceil(CHUNK);
    let partials: Vec<PadicNumber> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(end);
            let mut acc = ctx.zero();
            for a in lo..hi {
                acc = acc.add(&signed(a, f(a)?));
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(partials.iter().fold(ctx.zero(), |acc, s| acc.add(s)))
}

/// Vector-valued form of [`alternating_sum_range`]: `f` returns `width` values per index.
pub fn alternating_sum_range_vec<F>(
    ctx: &PadicContext,
    start: u64,
    end: u64,
    width: usize,
    f: F,
) -> Result<Vec<PadicNumber>>
where
    F: Fn(u64) -> Result<Vec<PadicNumber>> + Sync,
{
    let chunks = (end.saturating_sub(start)).div_ceil(CHUNK);
    let partials: Vec<Vec<PadicNumber>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = start + c * CHUNK;
            let hi = (lo + CHUNK).min(end);
            let mut acc = vec![ctx.zero(); width];
            for a in lo..hi {
                let vals = f(a)?;
                for (slot, v) in acc.iter_mut().zip(vals) {
                    *slot = slot.add(&signed(a, v));
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![ctx.zero(); width];
    for part in &partials {
        for (slot, v) in total.iter_mut().zip(part) {
            *slot = slot.add(v);
        }
    }
    Ok(total)
}

/// The partial sum `Σ_{a<p^N} f(a)(-1)^a`. No convergence claim is made.
pub fn integrate_truncated(f: &Integrand, n: u32, ctx: &PadicContext, cap: u64) -> Result<PadicNumber> {
    if n == 0 {
        return Err(Error::ArgumentViolation("truncation depth must be >= 1".into()));
    }
    let count = truncation_count(ctx.p(), n, cap)?;
    alternating_sum_range(ctx, 0, count, |a| f.eval(a))
}

/// Partial sums at every depth in `depths` (ascending), sharing the work:
/// the sum to `p^N` extends the sum to `p^{N-1}`.
pub fn integrate_truncated_depths<F>(
    ctx: &PadicContext,
    depths: &[u32],
    width: usize,
    cap: u64,
    f: F,
) -> Result<Vec<Vec<PadicNumber>>>
where
    F: Fn(u64) -> Result<Vec<PadicNumber>> + Sync,
{
    if depths.windows(2).any(|w| w[0] >= w[1]) || depths.first() == Some(&0) {
        return Err(Error::ArgumentViolation("depths must be ascending and >= 1".into()));
    }
    let mut out = Vec::with_capacity(depths.len());
    let mut running = vec![ctx.zero(); width];
    let mut reached = 0u64;
    for &n in depths {
        let end = truncation_count(ctx.p(), n, cap)?;
        let part = alternating_sum_range_vec(ctx, reached, end, width, &f)?;
        for (slot, v) in running.iter_mut().zip(&part) {
            *slot = slot.add(v);
        }
        reached = end;
        out.push(running.clone());
    }
    Ok(out)
}

/// `Σ_{a<p^N} (x+a)^m (-1)^a` for all `m <= max_m` and each depth in `depths`.
pub fn truncated_moments(
    ctx: &PadicContext,
    x: &ExactRational,
    max_m: usize,
    depths: &[u32],
    cap: u64,
) -> Result<Vec<Vec<PadicNumber>>> {
    let xp = ctx.from_rational(x);
    integrate_truncated_depths(ctx, depths, max_m + 1, cap, |a| {
        let y = xp.add(&ctx.from_bigint(&BigInt::from(a)));
        let mut powers = Vec::with_capacity(max_m + 1);
        let mut cur = ctx.one();
        for _ in 0..=max_m {
            powers.push(cur.clone());
            cur = cur.mul(&y);
        }
        Ok(powers)
    })
}

/// `Σ_{a<ρ} (-1)^a (x+a)^m = (E_m(x) - (-1)^ρ E_m(x+ρ)) / 2`.
pub fn alternating_power_sum(table: &EulerTable, m: usize, rho: u64, x: &ExactRational) -> Result<ExactRational> {
    if rho == 0 {
        return Err(Error::ArgumentViolation("rho must be >= 1".into()));
    }
    let shifted = table.euler_poly_eval(m, &(x + BigRational::from_integer(BigInt::from(rho))))?;
    let e = table.euler_poly_eval(m, x)?;
    let total = if rho % 2 == 0 { e - shifted } else { e + shifted };
    Ok(total / rational(2, 1))
}

/// Checks the shift identities of a polynomial integrand at `x`, exactly:
/// `∫f(x+1+a) + ∫f(x+a) = 2f(x)`,
/// `∫f(x+a) = f(x) - ½∫(Δf)(x+a)`, and `∫f(x+a) = f(x-1) + ½∫(∇f)(x+a)`.
pub fn verify_shift_identities(
    table: &EulerTable,
    f: &Integrand,
    x: &ExactRational,
) -> Result<Vec<VerificationReport>> {
    let c = f
        .coefficients()
        .ok_or_else(|| Error::Integrand("shift identities need a polynomial integrand".into()))?;
    let one = BigRational::one();
    let half = rational(1, 2);
    let int_at = |t: &ExactRational| integrate_polynomial_exact(table, c, t);
    let i0 = int_at(x)?;
    let i_plus = int_at(&(x + &one))?;
    let i_minus = int_at(&(x - &one))?;
    let fx = f.eval_exact(x)?;
    let fxm = f.eval_exact(&(x - &one))?;
    let degree = f.degree().unwrap_or(0);
    let check = |name: &str| Check::new(name).param("degree", degree).rational_param("x", x);
    Ok(vec![
        check("shift-sum").compare_exact(&(&i_plus + &i0), &(rational(2, 1) * &fx)),
        // ∫(Δf)(x+a) = ∫f(x+1+a) - ∫f(x+a)
        check("shift-delta").compare_exact(&i0, &(&fx - &half * (&i_plus - &i0))),
        // ∫(∇f)(x+a) = ∫f(x+a) - ∫f(x-1+a)
        check("shift-nabla").compare_exact(&i0, &(&fxm + &half * (&i0 - &i_minus))),
    ])
}

/// Both sides of the change of variable for a polynomial `f` and `x ∈ Z_p`:
/// `Σ_{j<p^v} χ(x+j) g((x+j)/p^v)(-1)^j` with `g(y) = ∫f(y+a)dμ_{-1}(a)`
/// in closed form, and the depth-`N` truncation of `∫χ(x+a) f((x+a)/p^v)dμ_{-1}(a)`.
pub fn change_of_variable(
    table: &EulerTable,
    chi: &DirichletCharacter,
    f: &Integrand,
    x: &PadicNumber,
    n: u32,
    cap: u64,
) -> Result<(PadicNumber, PadicNumber)> {
    let ctx = x.ctx();
    let c = f
        .coefficients()
        .ok_or_else(|| Error::Integrand("change of variable needs a polynomial integrand".into()))?;
    if !x.is_integral() {
        return Err(Error::ArgumentNotInZp);
    }
    let q = chi.modulus();
    let inv_q = ctx.p_power(-(chi.v() as i64));
    let mut lhs = ctx.zero();
    for j in 0..q {
        let arg = x.add(&ctx.from_bigint(&BigInt::from(j)));
        let w = chi.eval(&arg)?;
        if w.is_zero() {
            continue;
        }
        let y = arg.mul(&inv_q);
        let mut g = ctx.zero();
        for (m, cm) in c.iter().enumerate() {
            if !cm.is_zero() {
                g = g.add(&ctx.from_rational(cm).mul(&table.euler_poly_padic(m, &y)?));
            }
        }
        lhs = lhs.add(&signed(j, w.mul(&g)));
    }
    let count = truncation_count(ctx.p(), n, cap)?;
    let rhs = alternating_sum_range(ctx, 0, count, |a| {
        let arg = x.add(&ctx.from_bigint(&BigInt::from(a)));
        let w = chi.eval(&arg)?;
        if w.is_zero() {
            return Ok(ctx.zero());
        }
        Ok(w.mul(&f.eval_padic(&arg.mul(&inv_q))?))
    })?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::build_table;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::new(p, 12, 4).unwrap()
    }

    #[test]
    fn closed_forms() {
        let t = build_table(10);
        let c = ctx(5);
        assert_eq!(integrate_monomial_shift(&t, 0, &rational(3, 7), &c).unwrap(), c.one());
        assert_eq!(
            integrate_monomial_shift(&t, 1, &rational(0, 1), &c).unwrap(),
            c.from_rational(&rational(-1, 2))
        );
        assert!(integrate_monomial_shift(&t, 2, &rational(1, 1), &c).unwrap().is_exact_zero());
    }

    #[test]
    fn constant_integrand_sums_to_one() {
        for p in [3u64, 5, 7] {
            let c = ctx(p);
            let one = Integrand::polynomial(vec![rational(1, 1)], &c);
            for n in 1..=4 {
                let s = integrate_truncated(&one, n, &c, DEFAULT_EVALUATION_CAP).unwrap();
                assert_eq!(s.agreement_depth(&c.one()), Some(s.absprec().unwrap()));
            }
        }
    }

    #[test]
    fn identity_integrand_nine_terms() {
        let c = ctx(3);
        let f = Integrand::polynomial(vec![rational(0, 1), rational(1, 1)], &c);
        let s = integrate_truncated(&f, 2, &c, DEFAULT_EVALUATION_CAP).unwrap();
        let hand: i64 = (0..9).map(|a: i64| if a % 2 == 0 { a } else { -a }).sum();
        assert_eq!(hand, 4);
        assert!(s.eq_to_precision(&c.integer(4), 16));
        assert_eq!(alternating_power_sum(&build_table(2), 1, 9, &rational(0, 1)).unwrap(), rational(4, 1));
    }

    #[test]
    fn refuses_depth_beyond_cap() {
        let c = ctx(7);
        let f = Integrand::polynomial(vec![rational(1, 1)], &c);
        let err = integrate_truncated(&f, 8, &c, DEFAULT_EVALUATION_CAP).unwrap_err();
        assert_eq!(err, Error::TruncationCapExceeded { needed: 5_764_801, cap: 1_000_000 });
    }

    #[test]
    fn power_sum_closed_form_matches_literal_sum() {
        let t = build_table(9);
        for x in [rational(0, 1), rational(1, 2), rational(-2, 3), rational(5, 1)] {
            for m in 0..=8 {
                for rho in [1u64, 2, 3, 7, 10, 27, 81, 243, 729] {
                    let mut lit = BigRational::zero();
                    let mut y = x.clone();
                    for a in 0..rho {
                        let term = num_traits::pow(y.clone(), m);
                        lit = if a % 2 == 0 { lit + term } else { lit - term };
                        y += BigRational::one();
                    }
                    assert_eq!(alternating_power_sum(&t, m, rho, &x).unwrap(), lit, "m={m} rho={rho} x={x}");
                }
            }
        }
        assert_eq!(alternating_power_sum(&t, 4, 1, &rational(2, 3)).unwrap(), rational(16, 81));
        assert_eq!(alternating_power_sum(&t, 0, 5, &rational(2, 3)).unwrap(), rational(1, 1));
    }

    #[test]
    fn truncation_error_has_valuation_at_least_depth() {
        let t = build_table(8);
        let c = ctx(5);
        let x = rational(1, 2);
        let sums = truncated_moments(&c, &x, 8, &[1, 2, 3, 4], DEFAULT_EVALUATION_CAP).unwrap();
        for (i, n) in [1u32, 2, 3, 4].iter().enumerate() {
            for m in 0..=8 {
                let exact = c.from_rational(&t.euler_poly_eval(m, &x).unwrap());
                let d = sums[i][m].agreement_depth(&exact).unwrap();
                assert!(d >= *n as i64, "m={m} N={n} depth={d}");
            }
        }
        // the single-integrand path agrees with the moment path
        let f = Integrand::monomial_shift(3, &x, &c);
        let s = integrate_truncated(&f, 3, &c, DEFAULT_EVALUATION_CAP).unwrap();
        assert_eq!(s, sums[2][3]);
    }

    #[test]
    fn shift_identities() {
        let t = build_table(6);
        let c = ctx(3);
        let one = Integrand::polynomial(vec![rational(1, 1)], &c);
        let sq = Integrand::polynomial(monomial(2), &c);
        let id = Integrand::polynomial(monomial(1), &c);
        for (f, x) in [(&one, rational(0, 1)), (&sq, rational(0, 1)), (&id, rational(3, 1))] {
            for r in verify_shift_identities(&t, f, &x).unwrap() {
                assert!(r.passed(), "{}", r.render_line());
            }
        }
        // E_1(4) + E_1(3) = 6
        let e = t.euler_poly_eval(1, &rational(4, 1)).unwrap() + t.euler_poly_eval(1, &rational(3, 1)).unwrap();
        assert_eq!(e, rational(6, 1));
        let cubic = Integrand::polynomial(vec![rational(1, 3), rational(-2, 1), rational(0, 1), rational(5, 7)], &c);
        for r in verify_shift_identities(&t, &cubic, &rational(-4, 9)).unwrap() {
            assert!(r.passed(), "{}", r.render_line());
        }
    }

    #[test]
    fn shifted_coefficients() {
        // (a + 2)^2 = a^2 + 4a + 4
        let s = shift_coefficients(&monomial(2), &rational(2, 1));
        assert_eq!(s, vec![rational(4, 1), rational(4, 1), rational(1, 1)]);
    }

    #[test]
    fn change_of_variable_constant_integrand() {
        let t = build_table(4);
        let c = ctx(3);
        let chi = DirichletCharacter::trivial(3, 1).unwrap();
        let one = Integrand::polynomial(vec![rational(1, 1)], &c);
        let (lhs, rhs) = change_of_variable(&t, &chi, &one, &c.zero(), 4, DEFAULT_EVALUATION_CAP).unwrap();
        // units among {0,1,2}: -1 + 1
        assert!(lhs.is_zero());
        assert!(rhs.is_zero());
    }

    #[test]
    fn change_of_variable_agrees_with_truncation() {
        let t = build_table(4);
        for (p, k, f, x) in [(3u64, 0i64, monomial(1), 0i64), (5, 2, monomial(2), 2)] {
            let c = ctx(p);
            let chi = DirichletCharacter::new(p as u32, 1, k).unwrap();
            let f = Integrand::polynomial(f, &c);
            let n = 5;
            let (lhs, rhs) = change_of_variable(&t, &chi, &f, &c.integer(x), n, DEFAULT_EVALUATION_CAP).unwrap();
            let d = lhs.agreement_depth(&rhs).unwrap();
            assert!(d >= n as i64 - 2, "p={p} depth={d}");
        }
    }
}

//! Teichmüller decomposition and the analytic kernels log_p, exp_p and ⟨x⟩^s.

use num_bigint::BigUint;

use super::{PadicNumber, Repr};
use crate::error::{Error, Result};

/// Frobenius iteration `y -> y^p` from `y = a` until it is stable mod p^w.
/// Each step fixes one more digit, so `w + 2` rounds always suffice.
pub(crate) fn teichmuller_lift(a: u32, p: u32, w: u32, modulus: &BigUint) -> BigUint {
    let exponent = BigUint::from(p);
    let mut y = BigUint::from(a) % modulus;
    for _ in 0..w + 2 {
        let next = y.modpow(&exponent, modulus);
        if next == y {
            return y;
        }
        y = next;
    }
    unreachable!("Frobenius iteration failed to stabilise")
}

/// ω(x): the (p-1)-th root of unity congruent to the unit `x` mod p.
///
/// ω(x) depends only on `x mod p`, so the result carries the full internal
/// precision of the context regardless of how many digits `x` has.
pub fn teichmuller(x: &PadicNumber) -> Result<PadicNumber> {
    match &x.repr {
        Repr::Value { valuation: 0, .. } => {
            let ctx = x.ctx();
            let a = x.residue().expect("nonzero");
            Ok(ctx.from_parts(0, ctx.teich_table(a).clone(), ctx.precision()))
        }
        _ => Err(Error::NotAUnit),
    }
}

/// ⟨x⟩ = u / ω(u) with `u = x / p^{v_p(x)}`; always ≡ 1 mod p.
pub fn angle(x: &PadicNumber) -> Result<PadicNumber> {
    match &x.repr {
        Repr::Zero { .. } => Err(Error::ZeroArgument),
        Repr::Value { unit, relprec, .. } => {
            let ctx = x.ctx();
            let a = x.residue().expect("nonzero");
            let u = (unit * ctx.teich_inv_table(a)) % ctx.pow_p(*relprec).as_ref();
            Ok(ctx.from_parts(0, u, *relprec))
        }
    }
}

/// ω_v(x) = p^{v_p(x)} ω(x / p^{v_p(x)}), so that `x = ω_v(x) ⟨x⟩`.
pub fn omega_v(x: &PadicNumber) -> Result<PadicNumber> {
    match &x.repr {
        Repr::Zero { .. } => Err(Error::ZeroArgument),
        Repr::Value { valuation, .. } => {
            let ctx = x.ctx();
            let a = x.residue().expect("nonzero");
            Ok(ctx.from_parts(*valuation, ctx.teich_table(a).clone(), ctx.precision()))
        }
    }
}

fn floor_log(n: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut q = p;
    while q <= n {
        k += 1;
        q = q.saturating_mul(p);
    }
    k
}

/// Iwasawa logarithm on `1 + pZ_p`.
///
/// Summation stops once `n·v(u-1) - floor(log_p n)`, a lower bound for the
/// valuation of every remaining term, reaches the internal precision.
pub fn iwasawa_log(u: &PadicNumber) -> Result<PadicNumber> {
    if u.valuation() != Some(0) || u.residue() != Some(1) {
        return Err(Error::OutsideLogDomain);
    }
    let ctx = u.ctx();
    let target = ctx.precision() as i64;
    let z = u.sub(&ctx.one());
    let vz = match z.valuation() {
        Some(v) => v,
        None => return Ok(z),
    };
    let p = ctx.p() as u64;
    let mut acc = z.clone();
    let mut power = z.clone();
    let mut n: u64 = 2;
    loop {
        if n as i64 * vz - floor_log(n, p) >= target {
            break;
        }
        power = power.mul(&z);
        let term = power.div_int(n);
        acc = if n % 2 == 0 { acc.sub(&term) } else { acc.add(&term) };
        n += 1;
    }
    Ok(acc.cap_absprec(target))
}

/// exp_p on `pZ_p`.
pub fn padic_exp(z: &PadicNumber) -> Result<PadicNumber> {
    let ctx = z.ctx();
    let target = ctx.precision() as i64;
    let vz = match &z.repr {
        Repr::Zero { absprec: None } => return Ok(ctx.one()),
        Repr::Zero { absprec: Some(k) } => {
            if *k < 1 {
                return Err(Error::OutsideExpDomain);
            }
            return Ok(ctx.one().cap_absprec(*k));
        }
        Repr::Value { valuation, .. } => *valuation,
    };
    if vz < 1 {
        return Err(Error::OutsideExpDomain);
    }
    let p = ctx.p() as i64;
    let mut acc = ctx.one().add(z);
    let mut term = z.clone();
    let mut n: i64 = 2;
    loop {
        // v_p(n!) <= floor((n-1)/(p-1))
        if n * vz - (n - 1) / (p - 1) >= target {
            break;
        }
        term = term.mul(z).div_int(n as u64);
        acc = acc.add(&term);
        n += 1;
    }
    Ok(acc.cap_absprec(target))
}

/// ⟨x⟩^s = exp_p(s · log_p ⟨x⟩), always through the series.
pub fn power_st_series(x: &PadicNumber, s: &PadicNumber) -> Result<PadicNumber> {
    if !s.is_integral() {
        return Err(Error::ExponentOutsideDomain);
    }
    let a = angle(x)?;
    padic_exp(&s.mul(&iwasawa_log(&a)?))
}

/// Exponents whose balanced representative is at most this large go through
/// repeated squaring instead of the exp/log series.
const SMALL_EXPONENT: u64 = 1 << 16;

/// ⟨x⟩^s for `x != 0` and `s ∈ Z_p`.
///
/// When `s` agrees with a small integer `n` to all its known digits, the
/// value is `⟨x⟩^n` up to `p^{absprec(s)+1}` because `⟨x⟩^{s-n} ≡ 1` to that
/// depth; that route is taken for speed, otherwise exp∘log.
pub fn power_st(x: &PadicNumber, s: &PadicNumber) -> Result<PadicNumber> {
    if !s.is_integral() {
        return Err(Error::ExponentOutsideDomain);
    }
    let a = angle(x)?;
    match s.absprec() {
        None => return Ok(a.ctx().one()),
        Some(k) if s.is_zero() => return Ok(a.ctx().one().cap_absprec(k + 1)),
        _ => {}
    }
    if let Some(n) = s.to_small_integer(SMALL_EXPONENT) {
        let cap = s.absprec().expect("nonzero") + 1;
        return Ok(a.pow(n)?.cap_absprec(cap));
    }
    padic_exp(&s.mul(&iwasawa_log(&a)?))
}

/// binom(s, i) = s(s-1)…(s-i+1)/i!; the division by i! costs v_p(i!) digits
/// of absolute precision, which shows up in the result.
pub fn gen_binomial(s: &PadicNumber, i: u64) -> PadicNumber {
    let ctx = s.ctx();
    let mut acc = ctx.one();
    for j in 0..i {
        acc = acc.mul(&s.add_int(-(j as i64))).div_int(j + 1);
    }
    acc
}

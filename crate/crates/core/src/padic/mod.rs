//! Finite-precision arithmetic in Q_p.
//!
//! A nonzero [`PadicNumber`] is stored in capped-relative form
//! `p^v * (u + O(p^r))` with `u` a unit residue modulo `p^r`. Products and
//! quotients keep the smaller relative precision of their operands, sums keep
//! the smaller absolute precision `v + r`. Zero comes in two flavours: the
//! exact zero, which only arises from exact inputs, and `O(p^k)`, a value
//! known to vanish modulo `p^k` and nothing more.

mod analytic;
mod render;

pub use analytic::{
    angle, gen_binomial, iwasawa_log, omega_v, padic_exp, power_st, power_st_series, teichmuller,
};
pub use render::{from_digits, PadicJson};

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational inputs and Euler coefficients. `BigRational` keeps
/// numerator and denominator coprime with a positive denominator.
pub type ExactRational = BigRational;

/// Parses `"a/b"` or `"a"` in decimal.
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {text:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {text:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `a/b`, or `a` when the denominator is one.
pub fn format_rational(q: &ExactRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// v_p of a nonzero machine integer.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// v_p of a nonzero big integer.
pub fn valuation_bigint(n: &BigInt, p: u32) -> i64 {
    debug_assert!(!n.is_zero());
    let mut k = 0;
    let mut m = n.magnitude().clone();
    while rem_u32(&m, p) == 0 {
        m /= p;
        k += 1;
    }
    k
}

pub fn valuation_rational(q: &ExactRational, p: u32) -> Option<i64> {
    if q.is_zero() {
        None
    } else {
        Some(valuation_bigint(q.numer(), p) - valuation_bigint(q.denom(), p))
    }
}

/// Remainder of a big unsigned integer by a small modulus without allocating.
fn rem_u32(n: &BigUint, m: u32) -> u32 {
    let m = m as u64;
    n.iter_u32_digits()
        .rev()
        .fold(0u64, |acc, d| ((acc << 32) | d as u64) % m) as u32
}

struct ContextInner {
    p: u32,
    workprec: u32,
    guard: u32,
    p_big: BigUint,
    /// p^0 ..= p^powers_cap
    powers: Vec<BigUint>,
    /// Teichmüller lifts ω(a) mod p^W for a = 1..p-1 (index 0 unused).
    teich: Vec<BigUint>,
    teich_inv: Vec<BigUint>,
    /// Inverse modulo p^W of the p-free part of n, for n = 1..inv_cap.
    inv_small: Vec<BigUint>,
}

/// Prime, working precision and guard digits shared by a family of numbers.
///
/// Every value created from a context carries a handle to it; the handle is
/// an `Arc`, so contexts are cheap to clone and safe to share across
/// threads. All lookup tables are filled at construction and never mutated.
#[derive(Clone)]
pub struct PadicContext {
    inner: Arc<ContextInner>,
}

impl fmt::Debug for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PadicContext")
            .field("p", &self.inner.p)
            .field("workprec", &self.inner.workprec)
            .field("guard", &self.inner.guard)
            .finish()
    }
}

impl PartialEq for PadicContext {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p
            && self.inner.workprec == other.inner.workprec
            && self.inner.guard == other.inner.guard
    }
}

impl PadicContext {
    pub fn new(p: u64, workprec: u32, guard: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidPrime(p));
        }
        if workprec == 0 {
            return Err(Error::InvalidPrecision("workprec must be at least 1".into()));
        }
        if workprec.saturating_add(guard) > 4096 {
            return Err(Error::InvalidPrecision("workprec + guard above 4096".into()));
        }
        let p32 = p as u32;
        let w = workprec + guard;
        let powers_cap = 4 * w as usize + 256;
        let p_big = BigUint::from(p32);
        let mut powers = Vec::with_capacity(powers_cap + 1);
        powers.push(BigUint::one());
        for i in 1..=powers_cap {
            let next = &powers[i - 1] * &p_big;
            powers.push(next);
        }
        let modulus = &powers[w as usize];
        let mut teich = vec![BigUint::zero(); p32 as usize];
        let mut teich_inv = vec![BigUint::zero(); p32 as usize];
        for a in 1..p32 {
            teich[a as usize] = analytic::teichmuller_lift(a, p32, w, modulus);
        }
        for a in 1..p32 {
            // ω(a)^{-1} = ω(a^{-1} mod p)
            let inv = (1..p32).find(|b| (a as u64 * *b as u64) % p == 1).unwrap();
            teich_inv[a as usize] = teich[inv as usize].clone();
        }
        let inv_cap = 8 * w as usize + 256;
        let mut inv_small = Vec::with_capacity(inv_cap + 1);
        inv_small.push(BigUint::zero());
        for n in 1..=inv_cap as u64 {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            inv_small.push(BigUint::from(m).modinv(modulus).expect("p-free part is invertible"));
        }
        Ok(PadicContext {
            inner: Arc::new(ContextInner {
                p: p32,
                workprec,
                guard,
                p_big,
                powers,
                teich,
                teich_inv,
                inv_small,
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    /// Number of guaranteed digits callers ask for.
    pub fn workprec(&self) -> u32 {
        self.inner.workprec
    }

    pub fn guard(&self) -> u32 {
        self.inner.guard
    }

    /// Internal relative precision `workprec + guard` given to embedded exact values.
    pub fn precision(&self) -> u32 {
        self.inner.workprec + self.inner.guard
    }

    /// Same prime and guard, different working precision.
    pub fn with_workprec(&self, workprec: u32) -> Result<Self> {
        PadicContext::new(self.p() as u64, workprec, self.guard())
    }

    pub(crate) fn pow_p(&self, k: u32) -> Cow<'_, BigUint> {
        match self.inner.powers.get(k as usize) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(num_traits::pow(self.inner.p_big.clone(), k as usize)),
        }
    }

    pub(crate) fn teich_table(&self, residue: u32) -> &BigUint {
        &self.inner.teich[residue as usize]
    }

    pub(crate) fn teich_inv_table(&self, residue: u32) -> &BigUint {
        &self.inner.teich_inv[residue as usize]
    }

    /// Inverse of the unit `u` modulo p^r.
    fn inv_unit(&self, u: &BigUint, r: u32) -> BigUint {
        let m = self.pow_p(r);
        u.modinv(&m).expect("unit residue is invertible")
    }

    pub fn zero(&self) -> PadicNumber {
        PadicNumber { ctx: self.clone(), repr: Repr::Zero { absprec: None } }
    }

    /// `O(p^absprec)`.
    pub fn zero_to(&self, absprec: i64) -> PadicNumber {
        PadicNumber { ctx: self.clone(), repr: Repr::Zero { absprec: Some(absprec) } }
    }

    pub fn one(&self) -> PadicNumber {
        self.integer(1)
    }

    /// `p^k` at full internal precision.
    pub fn p_power(&self, k: i64) -> PadicNumber {
        PadicNumber {
            ctx: self.clone(),
            repr: Repr::Value { valuation: k, unit: BigUint::one(), relprec: self.precision() },
        }
    }

    pub fn integer(&self, n: i64) -> PadicNumber {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> PadicNumber {
        if n.is_zero() {
            return self.zero();
        }
        let w = self.precision();
        let p = self.p();
        let mut mag = n.magnitude().clone();
        let mut v = 0i64;
        while rem_u32(&mag, p) == 0 {
            mag /= p;
            v += 1;
        }
        let modulus = self.pow_p(w);
        let mut unit = mag % modulus.as_ref();
        if n.sign() == Sign::Minus {
            unit = modulus.as_ref() - unit;
        }
        PadicNumber { ctx: self.clone(), repr: Repr::Value { valuation: v, unit, relprec: w } }
    }

    /// Image of an exact rational in Q_p at relative precision `workprec + guard`.
    pub fn from_rational(&self, q: &ExactRational) -> PadicNumber {
        if q.is_zero() {
            return self.zero();
        }
        let num = self.from_bigint(q.numer());
        if q.denom().is_one() {
            return num;
        }
        let den = self.from_bigint(q.denom());
        num.div(&den).expect("denominator is nonzero")
    }

    /// Builds `p^valuation * unit + O(p^(valuation + relprec))`, stripping any
    /// factors of p from `unit` first.
    pub fn from_parts(&self, valuation: i64, unit: BigUint, relprec: u32) -> PadicNumber {
        self.normalize(valuation, unit, relprec as i64 + valuation)
    }

    /// Normalizes `p^v * w + O(p^absprec)` for an arbitrary residue `w`.
    fn normalize(&self, v: i64, w: BigUint, absprec: i64) -> PadicNumber {
        if absprec <= v {
            return self.zero_to(absprec);
        }
        let r = (absprec - v) as u32;
        let mut w = w % self.pow_p(r).as_ref();
        if w.is_zero() {
            return self.zero_to(absprec);
        }
        let p = self.p();
        let mut k = 0i64;
        while rem_u32(&w, p) == 0 {
            w /= p;
            k += 1;
        }
        let valuation = v + k;
        let relprec = (absprec - valuation) as u32;
        PadicNumber { ctx: self.clone(), repr: Repr::Value { valuation, unit: w, relprec } }
    }
}

/// Shortcut for [`PadicContext::from_rational`].
pub fn from_rational(q: &ExactRational, ctx: &PadicContext) -> PadicNumber {
    ctx.from_rational(q)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum Repr {
    /// `absprec == None` is the exact zero.
    Zero { absprec: Option<i64> },
    Value { valuation: i64, unit: BigUint, relprec: u32 },
}

/// Element of Q_p with tracked precision.
#[derive(Clone)]
pub struct PadicNumber {
    ctx: PadicContext,
    pub(crate) repr: Repr,
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p() && self.repr == other.repr
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Field operation selector for [`field_arithmetic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arithmetic(a: &PadicNumber, b: &PadicNumber, op: FieldOp) -> Result<PadicNumber> {
    if a.p() != b.p() {
        return Err(Error::PrimeMismatch(a.p(), b.p()));
    }
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Sub => Ok(a.sub(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Div => a.div(b),
    }
}

impl PadicNumber {
    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p()
    }

    /// `None` for zero (exact or not).
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Value { valuation, .. } => Some(*valuation),
        }
    }

    /// Guaranteed absolute precision; `None` only for the exact zero.
    pub fn absprec(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { absprec } => *absprec,
            Repr::Value { valuation, relprec, .. } => Some(valuation + *relprec as i64),
        }
    }

    pub fn relprec(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Value { relprec, .. } => *relprec,
        }
    }

    /// Unit residue in `[1, p^relprec)`; zero for zero values.
    pub fn unit(&self) -> BigUint {
        match &self.repr {
            Repr::Zero { .. } => BigUint::zero(),
            Repr::Value { unit, .. } => unit.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { absprec: None })
    }

    /// True for nonzero values of valuation >= 0 and for zeros.
    pub fn is_integral(&self) -> bool {
        self.valuation().map_or(true, |v| v >= 0)
    }

    /// Unit residue modulo p, for nonzero values.
    pub fn residue(&self) -> Option<u32> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Value { unit, .. } => Some(rem_u32(unit, self.p())),
        }
    }

    /// Little-endian base-p digits of the unit part, `relprec` of them.
    pub fn digits(&self) -> Vec<u32> {
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Value { unit, relprec, .. } => {
                let p = self.p();
                let mut out = Vec::with_capacity(*relprec as usize);
                let mut u = unit.clone();
                for _ in 0..*relprec {
                    out.push(rem_u32(&u, p));
                    u /= p;
                }
                out
            }
        }
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(
            self.p(),
            other.p(),
            "p-adic operands live over different primes"
        );
    }

    pub fn neg(&self) -> PadicNumber {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Value { valuation, unit, relprec } => {
                let m = self.ctx.pow_p(*relprec);
                PadicNumber {
                    ctx: self.ctx.clone(),
                    repr: Repr::Value {
                        valuation: *valuation,
                        unit: m.as_ref() - unit,
                        relprec: *relprec,
                    },
                }
            }
        }
    }

    pub fn add(&self, other: &PadicNumber) -> PadicNumber {
        self.check_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { absprec: None }, _) => other.clone(),
            (_, Repr::Zero { absprec: None }) => self.clone(),
            (Repr::Zero { absprec: Some(a) }, Repr::Zero { absprec: Some(b) }) => {
                self.ctx.zero_to(*a.min(b))
            }
            (Repr::Zero { absprec: Some(a) }, Repr::Value { .. }) => other.cap_absprec(*a),
            (Repr::Value { .. }, Repr::Zero { absprec: Some(b) }) => self.cap_absprec(*b),
            (
                Repr::Value { valuation: va, unit: ua, relprec: ra },
                Repr::Value { valuation: vb, unit: ub, relprec: rb },
            ) => {
                let v = *va.min(vb);
                let absprec = (va + *ra as i64).min(vb + *rb as i64);
                let w = if va == vb {
                    ua + ub
                } else if va < vb {
                    ua + ub * self.ctx.pow_p((vb - va) as u32).as_ref()
                } else {
                    ua * self.ctx.pow_p((va - vb) as u32).as_ref() + ub
                };
                self.ctx.normalize(v, w, absprec)
            }
        }
    }

    pub fn sub(&self, other: &PadicNumber) -> PadicNumber {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNumber) -> PadicNumber {
        self.check_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::Zero { absprec: None }, _) | (_, Repr::Zero { absprec: None }) => {
                self.ctx.zero()
            }
            (Repr::Zero { absprec: Some(a) }, Repr::Zero { absprec: Some(b) }) => {
                self.ctx.zero_to(a + b)
            }
            (Repr::Zero { absprec: Some(a) }, Repr::Value { valuation, .. })
            | (Repr::Value { valuation, .. }, Repr::Zero { absprec: Some(a) }) => {
                self.ctx.zero_to(a + valuation)
            }
            (
                Repr::Value { valuation: va, unit: ua, relprec: ra },
                Repr::Value { valuation: vb, unit: ub, relprec: rb },
            ) => {
                let r = *ra.min(rb);
                let unit = (ua * ub) % self.ctx.pow_p(r).as_ref();
                PadicNumber {
                    ctx: self.ctx.clone(),
                    repr: Repr::Value { valuation: va + vb, unit, relprec: r },
                }
            }
        }
    }

    pub fn inv(&self) -> Result<PadicNumber> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Value { valuation, unit, relprec } => Ok(PadicNumber {
                ctx: self.ctx.clone(),
                repr: Repr::Value {
                    valuation: -valuation,
                    unit: self.ctx.inv_unit(unit, *relprec),
                    relprec: *relprec,
                },
            }),
        }
    }

    pub fn div(&self, other: &PadicNumber) -> Result<PadicNumber> {
        self.check_prime(other);
        match (&self.repr, &other.repr) {
            (_, Repr::Zero { .. }) => Err(Error::DivisionByZero),
            (Repr::Zero { absprec: None }, _) => Ok(self.ctx.zero()),
            (Repr::Zero { absprec: Some(a) }, Repr::Value { valuation, .. }) => {
                Ok(self.ctx.zero_to(a - valuation))
            }
            (
                Repr::Value { valuation: va, unit: ua, relprec: ra },
                Repr::Value { valuation: vb, unit: ub, relprec: rb },
            ) => {
                let r = *ra.min(rb);
                let m = self.ctx.pow_p(r);
                let inv = ub.modinv(&m).expect("unit residue is invertible");
                Ok(PadicNumber {
                    ctx: self.ctx.clone(),
                    repr: Repr::Value { valuation: va - vb, unit: (ua * inv) % m.as_ref(), relprec: r },
                })
            }
        }
    }

    /// Division by a nonzero machine integer, treated as exact.
    pub fn div_int(&self, n: u64) -> PadicNumber {
        assert!(n != 0, "division by zero integer");
        let p = self.p() as u64;
        let k = valuation_u64(n, p) as i64;
        match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => self.ctx.zero_to(a - k),
            Repr::Value { valuation, unit, relprec } => {
                let inv = if (n as usize) < self.ctx.inner.inv_small.len()
                    && *relprec <= self.ctx.precision()
                {
                    Cow::Borrowed(&self.ctx.inner.inv_small[n as usize])
                } else {
                    let m = n / (p.pow(k as u32));
                    Cow::Owned(self.ctx.inv_unit(&BigUint::from(m), *relprec))
                };
                let unit = (unit * inv.as_ref()) % self.ctx.pow_p(*relprec).as_ref();
                PadicNumber {
                    ctx: self.ctx.clone(),
                    repr: Repr::Value { valuation: valuation - k, unit, relprec: *relprec },
                }
            }
        }
    }

    /// Multiplication by a machine integer, treated as exact.
    pub fn mul_int(&self, n: i64) -> PadicNumber {
        if n == 0 {
            return self.ctx.zero();
        }
        let p = self.p() as u64;
        let k = valuation_u64(n.unsigned_abs(), p) as i64;
        match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => self.ctx.zero_to(a + k),
            Repr::Value { valuation, unit, relprec } => {
                let m = self.ctx.pow_p(*relprec);
                let free = n.unsigned_abs() / p.pow(k as u32);
                let mut u = (unit * BigUint::from(free)) % m.as_ref();
                if n < 0 {
                    u = m.as_ref() - u;
                }
                PadicNumber {
                    ctx: self.ctx.clone(),
                    repr: Repr::Value { valuation: valuation + k, unit: u, relprec: *relprec },
                }
            }
        }
    }

    pub fn add_int(&self, n: i64) -> PadicNumber {
        self.add(&self.ctx.integer(n))
    }

    /// Multiplication by p^k, exact.
    pub fn shift(&self, k: i64) -> PadicNumber {
        match &self.repr {
            Repr::Zero { absprec: None } => self.clone(),
            Repr::Zero { absprec: Some(a) } => self.ctx.zero_to(a + k),
            Repr::Value { valuation, unit, relprec } => PadicNumber {
                ctx: self.ctx.clone(),
                repr: Repr::Value { valuation: valuation + k, unit: unit.clone(), relprec: *relprec },
            },
        }
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, n: i64) -> Result<PadicNumber> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.ctx.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// Lowers the absolute precision to at most `k`.
    pub fn cap_absprec(&self, k: i64) -> PadicNumber {
        match &self.repr {
            Repr::Zero { absprec } => match absprec {
                Some(a) if *a <= k => self.clone(),
                _ => self.ctx.zero_to(k),
            },
            Repr::Value { valuation, unit, relprec } => {
                if valuation + *relprec as i64 <= k {
                    self.clone()
                } else if k <= *valuation {
                    self.ctx.zero_to(k)
                } else {
                    let r = (k - valuation) as u32;
                    PadicNumber {
                        ctx: self.ctx.clone(),
                        repr: Repr::Value {
                            valuation: *valuation,
                            unit: unit % self.ctx.pow_p(r).as_ref(),
                            relprec: r,
                        },
                    }
                }
            }
        }
    }

    /// Largest k with `self ≡ other (mod p^k)`, never more than either side
    /// guarantees. `None` means both are the exact zero.
    pub fn agreement_depth(&self, other: &PadicNumber) -> Option<i64> {
        let diff = self.sub(other);
        match diff.repr {
            Repr::Zero { absprec } => absprec,
            Repr::Value { valuation, .. } => Some(valuation),
        }
    }

    /// Equality to absolute precision `k`; both sides must guarantee `k` digits.
    pub fn eq_to_precision(&self, other: &PadicNumber, k: i64) -> bool {
        let guaranteed = |x: &PadicNumber| x.absprec().map_or(true, |a| a >= k);
        guaranteed(self) && guaranteed(other) && self.agreement_depth(other).map_or(true, |d| d >= k)
    }

    /// Representative in `[0, p^k)` of a value in Z_p, reduced mod p^k.
    /// `None` for non-integral values or when fewer than `k` digits are known.
    pub fn residue_mod_pk(&self, k: u32) -> Option<BigUint> {
        if self.absprec().map_or(false, |a| a < k as i64) {
            return None;
        }
        match &self.repr {
            Repr::Zero { .. } => Some(BigUint::zero()),
            Repr::Value { valuation, unit, .. } => {
                if *valuation < 0 {
                    return None;
                }
                if *valuation >= k as i64 {
                    return Some(BigUint::zero());
                }
                let m = self.ctx.pow_p(k);
                Some((unit * self.ctx.pow_p(*valuation as u32).as_ref()) % m.as_ref())
            }
        }
    }

    /// Balanced integer representative of a value in Z_p, modulo p^absprec.
    pub(crate) fn balanced_integer(&self) -> Option<BigInt> {
        match &self.repr {
            Repr::Zero { .. } => Some(BigInt::zero()),
            Repr::Value { valuation, unit, relprec } => {
                if *valuation < 0 {
                    return None;
                }
                let a = (*valuation as u32).checked_add(*relprec)?;
                let m = BigInt::from(self.ctx.pow_p(a).into_owned());
                let n = BigInt::from(unit * self.ctx.pow_p(*valuation as u32).as_ref());
                if &n + &n > m {
                    Some(n - m)
                } else {
                    Some(n)
                }
            }
        }
    }

    /// Small-integer view of a value in Z_p, when its balanced representative fits.
    pub fn to_small_integer(&self, bound: u64) -> Option<i64> {
        let n = self.balanced_integer()?;
        if n.abs() <= BigInt::from(bound) {
            n.to_i64()
        } else {
            None
        }
    }

    /// Re-homes the value into another context over the same prime; the
    /// precision is left as it is.
    pub fn with_context(&self, ctx: &PadicContext) -> Result<PadicNumber> {
        if ctx.p() != self.p() {
            return Err(Error::PrimeMismatch(self.p(), ctx.p()));
        }
        Ok(PadicNumber { ctx: ctx.clone(), repr: self.repr.clone() })
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl std::ops::$trait<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: &PadicNumber) -> PadicNumber {
                PadicNumber::$inner(self, rhs)
            }
        }
        impl std::ops::$trait<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: PadicNumber) -> PadicNumber {
                PadicNumber::$inner(&self, &rhs)
            }
        }
        impl std::ops::$trait<&PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: &PadicNumber) -> PadicNumber {
                PadicNumber::$inner(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        PadicNumber::neg(self)
    }
}

impl std::ops::Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        PadicNumber::neg(&self)
    }
}

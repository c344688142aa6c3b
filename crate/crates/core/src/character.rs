//! Tame Dirichlet characters `χ = ω^k` of modulus `p^v`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{teichmuller, PadicContext, PadicNumber};

/// `χ(a) = ω(a)^k` for units `a`, `χ(a) = 0` when `p | a`. The exponent is
/// kept in `0..=p-2`; `k = 0` is the trivial character mod `p^v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirichletCharacter {
    p: u32,
    v: u32,
    k: u32,
}

impl DirichletCharacter {
    pub fn new(p: u32, v: u32, k: i64) -> Result<Self> {
        if v == 0 {
            return Err(Error::ArgumentViolation("character modulus exponent v must be >= 1".into()));
        }
        if p < 3 {
            return Err(Error::InvalidPrime(p as u64));
        }
        let order = p as i64 - 1;
        Ok(DirichletCharacter { p, v, k: k.rem_euclid(order) as u32 })
    }

    pub fn trivial(p: u32, v: u32) -> Result<Self> {
        Self::new(p, v, 0)
    }

    /// Parses the `"v:k"` form.
    pub fn parse(text: &str, p: u32) -> Result<Self> {
        let (v, k) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("character must look like v:k, got {text:?}")))?;
        let v: u32 = v.trim().parse().map_err(|_| Error::Parse(format!("bad v in {text:?}")))?;
        let k: i64 = k.trim().parse().map_err(|_| Error::Parse(format!("bad k in {text:?}")))?;
        Self::new(p, v, k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `p^v`.
    pub fn modulus(&self) -> u64 {
        (self.p as u64).pow(self.v)
    }

    /// `χ(-1) = (-1)^k`.
    pub fn is_even(&self) -> bool {
        self.k % 2 == 0
    }

    pub fn parity(&self) -> i64 {
        if self.is_even() {
            1
        } else {
            -1
        }
    }

    /// `χ ω^j` at the same modulus.
    pub fn twist(&self, j: i64) -> Self {
        Self::new(self.p, self.v, self.k as i64 + j).expect("same p and v")
    }

    fn check(&self, ctx: &PadicContext) -> Result<()> {
        if ctx.p() != self.p {
            return Err(Error::PrimeMismatch(self.p, ctx.p()));
        }
        Ok(())
    }

    /// χ extended to Z_p.
    pub fn eval(&self, a: &PadicNumber) -> Result<PadicNumber> {
        self.check(a.ctx())?;
        if !a.is_integral() {
            return Err(Error::ArgumentNotInZp);
        }
        if a.valuation().map_or(true, |v| v >= 1) {
            return Ok(a.ctx().zero());
        }
        teichmuller(a)?.pow(self.k as i64)
    }

    /// χ at an ordinary integer.
    pub fn eval_int(&self, ctx: &PadicContext, a: i64) -> Result<PadicNumber> {
        self.check(ctx)?;
        if a.rem_euclid(self.p as i64) == 0 {
            return Ok(ctx.zero());
        }
        teichmuller(&ctx.integer(a))?.pow(self.k as i64)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.v, self.k)
    }
}

/// `v:k` without a prime; completed by [`DirichletCharacter::parse`].
impl FromStr for CharacterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (v, k) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("character must look like v:k, got {s:?}")))?;
        Ok(CharacterSpec {
            v: v.trim().parse().map_err(|_| Error::Parse(format!("bad v in {s:?}")))?,
            k: k.trim().parse().map_err(|_| Error::Parse(format!("bad k in {s:?}")))?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterSpec {
    pub v: u32,
    pub k: i64,
}

impl CharacterSpec {
    pub fn at(&self, p: u32) -> Result<DirichletCharacter> {
        DirichletCharacter::new(p, self.v, self.k)
    }
}

/// Free-function form of [`DirichletCharacter::eval`].
pub fn char_eval(chi: &DirichletCharacter, a: &PadicNumber) -> Result<PadicNumber> {
    chi.eval(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_parity() {
        let c = PadicContext::new(5, 10, 0).unwrap();
        let chi = DirichletCharacter::new(5, 1, 2).unwrap();
        assert_eq!(chi.eval(&c.one()).unwrap(), c.one());
        assert!(chi.eval(&c.integer(10)).unwrap().is_exact_zero());
        let w2 = teichmuller(&c.integer(2)).unwrap();
        assert_eq!(chi.eval(&c.integer(2)).unwrap(), w2.mul(&w2));
        // χ(-1) = (-1)^k
        for k in 0..4 {
            let chi = DirichletCharacter::new(5, 1, k).unwrap();
            let m1 = chi.eval_int(&c, -1).unwrap();
            assert_eq!(m1, c.integer(chi.parity()));
        }
        assert!(chi.eval(&c.from_rational(&crate::padic::rational(1, 5))).is_err());
    }

    #[test]
    fn multiplicative_on_units() {
        let c = PadicContext::new(7, 12, 0).unwrap();
        for k in 0..6 {
            let chi = DirichletCharacter::new(7, 2, k).unwrap();
            for a in 1..20i64 {
                for b in 1..20i64 {
                    let lhs = chi.eval_int(&c, a * b).unwrap();
                    let rhs = chi.eval_int(&c, a).unwrap().mul(&chi.eval_int(&c, b).unwrap());
                    assert!(lhs.eq_to_precision(&rhs, 12), "k={k} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn parsing_and_twists() {
        let chi = DirichletCharacter::parse("2:5", 5).unwrap();
        assert_eq!((chi.v(), chi.k()), (2, 1));
        assert_eq!(chi.to_string(), "2:1");
        assert_eq!(chi.twist(-1).k(), 0);
        assert_eq!(chi.twist(-2).k(), 3);
        assert_eq!(chi.modulus(), 25);
        assert!(DirichletCharacter::parse("0:1", 5).is_err());
        assert!(DirichletCharacter::parse("x", 5).is_err());
        assert_eq!("1:-1".parse::<CharacterSpec>().unwrap().at(7).unwrap().k(), 5);
    }
}

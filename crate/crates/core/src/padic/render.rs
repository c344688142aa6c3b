//! Canonical text and JSON renderings.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{PadicContext, PadicNumber, Repr};
use crate::error::{Error, Result};

/// Interchange form: `{"p", "valuation", "digits", "relprec"}` with
/// little-endian digits. Zeros carry `valuation: null`, no digits, and an
/// `absprec` field unless they are exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u32,
    pub valuation: Option<i64>,
    pub digits: Vec<u32>,
    pub relprec: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absprec: Option<i64>,
}

fn power_term(p: u32, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => format!("*{p}"),
        _ => format!("*{p}^{k}"),
    }
}

impl PadicNumber {
    /// `p^v * (d0 + d1*p + d2*p^2 + ... + O(p^r))`; zeros print as `0` or `O(p^k)`.
    pub fn render_text(&self) -> String {
        let p = self.p();
        match &self.repr {
            Repr::Zero { absprec: None } => "0".to_string(),
            Repr::Zero { absprec: Some(k) } => format!("O({p}^{k})"),
            Repr::Value { valuation, relprec, .. } => {
                let mut parts: Vec<String> = self
                    .digits()
                    .iter()
                    .enumerate()
                    .map(|(i, d)| format!("{d}{}", power_term(p, i)))
                    .collect();
                parts.push(format!("O({p}^{relprec})"));
                format!("{p}^{valuation} * ({})", parts.join(" + "))
            }
        }
    }

    pub fn to_json(&self) -> PadicJson {
        PadicJson {
            p: self.p(),
            valuation: self.valuation(),
            digits: self.digits(),
            relprec: self.relprec(),
            absprec: if self.is_zero() { self.absprec() } else { None },
        }
    }

    pub fn from_json(json: &PadicJson, ctx: &PadicContext) -> Result<PadicNumber> {
        if json.p != ctx.p() {
            return Err(Error::PrimeMismatch(json.p, ctx.p()));
        }
        match json.valuation {
            None => {
                if !json.digits.is_empty() {
                    return Err(Error::Parse("zero with digits".into()));
                }
                Ok(match json.absprec {
                    None => ctx.zero(),
                    Some(k) => ctx.zero_to(k),
                })
            }
            Some(v) => {
                if json.digits.len() != json.relprec as usize || json.relprec == 0 {
                    return Err(Error::Parse("digit count must equal relprec >= 1".into()));
                }
                if json.digits[0] == 0 || json.digits.iter().any(|d| *d >= json.p) {
                    return Err(Error::Parse("digits must be base-p with a nonzero leading digit".into()));
                }
                Ok(ctx.from_parts(v, digits_to_unit(&json.digits, json.p), json.relprec))
            }
        }
    }

    /// Parses the JSON interchange form.
    pub fn parse_json(text: &str, ctx: &PadicContext) -> Result<PadicNumber> {
        let json: PadicJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        PadicNumber::from_json(&json, ctx)
    }
}

fn digits_to_unit(digits: &[u32], p: u32) -> BigUint {
    digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, d| acc * p + BigUint::from(*d))
}

/// `[d0, d1, ...]` little-endian digits of a p-adic integer, read as a value
/// in Z_p with `digits.len()` digits of absolute precision.
pub fn from_digits(digits: &[u32], ctx: &PadicContext) -> Result<PadicNumber> {
    let p = ctx.p();
    if digits.iter().any(|d| *d >= p) {
        return Err(Error::Parse(format!("digit out of range for p = {p}")));
    }
    let n = digits_to_unit(digits, p);
    let absprec = digits.len() as i64;
    if n.is_zero() {
        return Ok(ctx.zero_to(absprec));
    }
    Ok(ctx.normalize(0, n, absprec))
}

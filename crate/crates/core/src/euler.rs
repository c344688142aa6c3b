//! Exact Euler numbers `E_m`, Euler-polynomial values `E_m(x)`, and the
//! identity network tying them together.
//!
//! The values `E_m(0)` come from the shift relation `E_n(1) + E_n(0) = 2·0^n`,
//! i.e. `2 E_n(0) = -Σ_{k<n} C(n,k) E_k(0)`; the Euler numbers follow from
//! `E_m = Σ_k C(m,k) 2^k E_k(0)`.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{rational, ExactRational, PadicContext, PadicNumber};
use crate::report::{Check, VerificationReport};

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

fn int(n: &BigInt) -> ExactRational {
    BigRational::from_integer(n.clone())
}

/// Memoized `E_i(0)` and `E_i` for `0 <= i <= max_degree`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTable {
    max_degree: usize,
    zero_values: Vec<ExactRational>,
    numbers: Vec<ExactRational>,
}

pub fn build_table(max_degree: usize) -> EulerTable {
    EulerTable::build(max_degree)
}

impl EulerTable {
    pub fn build(max_degree: usize) -> Self {
        let mut zero_values: Vec<ExactRational> = Vec::with_capacity(max_degree + 1);
        zero_values.push(BigRational::one());
        for n in 1..=max_degree {
            let row = binomial_row(n);
            let s = (0..n).fold(BigRational::zero(), |acc, k| acc + int(&row[k]) * &zero_values[k]);
            zero_values.push(-s / rational(2, 1));
        }
        let numbers = (0..=max_degree)
            .map(|m| {
                let row = binomial_row(m);
                (0..=m).fold(BigRational::zero(), |acc, k| {
                    acc + int(&row[k]) * int(&(BigInt::one() << k)) * &zero_values[k]
                })
            })
            .collect();
        EulerTable { max_degree, zero_values, numbers }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `E_i(0)`.
    pub fn zero_value(&self, i: usize) -> Result<&ExactRational> {
        self.zero_values.get(i).ok_or(Error::DegreeOverflow {
            requested: i,
            available: self.max_degree,
        })
    }

    /// The Euler number `E_i`.
    pub fn number(&self, i: usize) -> Result<&ExactRational> {
        self.numbers.get(i).ok_or(Error::DegreeOverflow {
            requested: i,
            available: self.max_degree,
        })
    }

    pub fn zero_values(&self) -> &[ExactRational] {
        &self.zero_values
    }

    pub fn numbers(&self) -> &[ExactRational] {
        &self.numbers
    }

    fn check_degree(&self, m: usize) -> Result<()> {
        if m > self.max_degree {
            Err(Error::DegreeOverflow { requested: m, available: self.max_degree })
        } else {
            Ok(())
        }
    }

    /// `E_m(x) = Σ_i C(m,i) E_{m-i}(0) x^i`, exactly.
    pub fn euler_poly_eval(&self, m: usize, x: &ExactRational) -> Result<ExactRational> {
        self.check_degree(m)?;
        let row = binomial_row(m);
        // Horner in x, highest power first
        Ok((0..=m).rev().fold(BigRational::zero(), |acc, i| {
            acc * x + int(&row[i]) * &self.zero_values[m - i]
        }))
    }

    /// `E_m` evaluated at a p-adic point.
    pub fn euler_poly_padic(&self, m: usize, x: &PadicNumber) -> Result<PadicNumber> {
        self.check_degree(m)?;
        let ctx = x.ctx();
        let row = binomial_row(m);
        Ok((0..=m).rev().fold(ctx.zero(), |acc, i| {
            acc.mul(x).add(&ctx.from_rational(&(int(&row[i]) * &self.zero_values[m - i])))
        }))
    }

    /// p-adic embeddings of `E_0(0), …, E_max(0)`.
    pub fn embed_zero_values(&self, ctx: &PadicContext) -> Vec<PadicNumber> {
        self.zero_values.iter().map(|q| ctx.from_rational(q)).collect()
    }

    pub fn cache_file_name(max_degree: usize) -> String {
        format!("euler_table_M{max_degree}.json")
    }

    /// Versioned JSON cache form; identical tables give identical bytes.
    pub fn to_cache_json(&self) -> String {
        let pair = |q: &ExactRational| [q.numer().to_string(), q.denom().to_string()];
        let file = CacheFile {
            version: 1,
            max_degree: self.max_degree,
            e0: self.zero_values.iter().map(pair).collect(),
            e: self.numbers.iter().map(pair).collect(),
        };
        let mut out = serde_json::to_string(&file).expect("table serializes");
        out.push('\n');
        out
    }

    pub fn from_cache_json(text: &str) -> Result<Self> {
        let file: CacheFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.version != 1 {
            return Err(Error::Parse(format!("unsupported table version {}", file.version)));
        }
        let parse = |pairs: &[[String; 2]]| -> Result<Vec<ExactRational>> {
            pairs
                .iter()
                .map(|[n, d]| {
                    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad numerator {n}")))?;
                    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad denominator {d}")))?;
                    if !d.is_positive() {
                        return Err(Error::Parse("denominator must be positive".into()));
                    }
                    Ok(BigRational::new(n, d))
                })
                .collect()
        };
        let zero_values = parse(&file.e0)?;
        let numbers = parse(&file.e)?;
        if zero_values.len() != file.max_degree + 1 || numbers.len() != file.max_degree + 1 {
            return Err(Error::Parse("table length does not match max_degree".into()));
        }
        Ok(EulerTable { max_degree: file.max_degree, zero_values, numbers })
    }

    /// Writes `euler_table_M<degree>.json` into `dir` and returns its path.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::cache_file_name(self.max_degree));
        fs::write(&path, self.to_cache_json()).map_err(|e| Error::Io(e.to_string()))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_cache_json(&text)
    }

    /// Loads `euler_table_M<degree>.json` from `dir`, or builds and saves it.
    pub fn load_or_build(dir: &Path, max_degree: usize) -> Result<Self> {
        let path = dir.join(Self::cache_file_name(max_degree));
        if path.exists() {
            return Self::load(&path);
        }
        let table = Self::build(max_degree);
        table.save(dir)?;
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    max_degree: usize,
    #[serde(rename = "E0")]
    e0: Vec<[String; 2]>,
    #[serde(rename = "E")]
    e: Vec<[String; 2]>,
}

/// Free-function form of [`EulerTable::euler_poly_eval`].
pub fn euler_poly_eval(table: &EulerTable, m: usize, x: &ExactRational) -> Result<ExactRational> {
    table.euler_poly_eval(m, x)
}

fn shift_points() -> Vec<ExactRational> {
    [(0, 1), (1, 1), (-1, 1), (1, 2), (1, 3), (-2, 5), (3, 1), (7, 4), (-5, 3), (11, 7)]
        .iter()
        .map(|&(n, d)| rational(n, d))
        .collect()
}

fn quadratic_points() -> Vec<ExactRational> {
    [(0, 1), (1, 1), (1, 2), (-2, 3), (5, 7)].iter().map(|&(n, d)| rational(n, d)).collect()
}

/// Checks every exact identity of the Euler family for `m <= max_m`, over
/// the rationals with zero tolerance. Needs a table of degree `max_m + 1`.
pub fn verify_euler_identities(table: &EulerTable, max_m: usize) -> Result<Vec<VerificationReport>> {
    table.check_degree(max_m + 1)?;
    let mut out = Vec::new();
    let two = rational(2, 1);
    for m in 0..=max_m {
        let row = binomial_row(m);

        // E_m(0) = 2^{-m} Σ C(m,k) (-1)^{m-k} E_k
        let rhs = (0..=m).fold(BigRational::zero(), |acc, k| {
            let sign = if (m - k) % 2 == 0 { 1 } else { -1 };
            acc + int(&row[k]) * rational(sign, 1) * &table.numbers[k]
        }) / int(&(BigInt::one() << m));
        out.push(Check::new("euler-conversion").param("m", m).compare_exact(&table.zero_values[m], &rhs));

        // E_m = 2^m E_m(1/2)
        let half = table.euler_poly_eval(m, &rational(1, 2))?;
        out.push(
            Check::new("euler-half")
                .param("m", m)
                .compare_exact(&table.numbers[m], &(half * int(&(BigInt::one() << m)))),
        );

        if m % 2 == 1 {
            out.push(
                Check::new("euler-odd-vanish")
                    .param("m", m)
                    .compare_exact(&table.numbers[m], &BigRational::zero()),
            );
        }

        for x in shift_points() {
            let lhs = table.euler_poly_eval(m, &(&x + BigRational::one()))? + table.euler_poly_eval(m, &x)?;
            let rhs = &two * num_traits::pow(x.clone(), m);
            out.push(
                Check::new("euler-shift")
                    .param("m", m)
                    .rational_param("x", &x)
                    .compare_exact(&lhs, &rhs),
            );

            let lhs = table.euler_poly_eval(m, &(BigRational::one() - &x))?;
            let sign = if m % 2 == 0 { rational(1, 1) } else { rational(-1, 1) };
            let rhs = sign * table.euler_poly_eval(m, &x)?;
            out.push(
                Check::new("euler-reflection")
                    .param("m", m)
                    .rational_param("x", &x)
                    .compare_exact(&lhs, &rhs),
            );
        }

        for n in [1i64, 3, 5] {
            let mut sum = BigRational::zero();
            for j in 0..n {
                let term = table.euler_poly_eval(m, &rational(j, n))?;
                sum = if j % 2 == 0 { sum + term } else { sum - term };
            }
            let rhs = num_traits::pow(rational(n, 1), m) * sum;
            out.push(
                Check::new("euler-distribution")
                    .param("m", m)
                    .param("N", n)
                    .compare_exact(&table.zero_values[m], &rhs),
            );
        }

        for x in quadratic_points() {
            let vals: Vec<ExactRational> =
                (0..=m).map(|i| table.euler_poly_eval(i, &x)).collect::<Result<_>>()?;
            let lhs = (0..=m).fold(BigRational::zero(), |acc, i| acc + int(&row[i]) * &vals[i] * &vals[m - i]);
            let x2 = &x * &two;
            let rhs = &two
                * ((BigRational::one() - &x2) * table.euler_poly_eval(m, &x2)?
                    + table.euler_poly_eval(m + 1, &x2)?);
            out.push(
                Check::new("euler-quadratic")
                    .param("m", m)
                    .rational_param("x", &x)
                    .compare_exact(&lhs, &rhs),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: E_n(0) from the generating function
    /// 2/(e^t + 1) = Σ E_n(0) t^n / n!, by power-series division.
    fn zero_values_by_series(n: usize) -> Vec<ExactRational> {
        // (e^t + 1)/2 = 1 + Σ_{k>=1} t^k / (2 k!)
        let mut fact = vec![BigRational::one()];
        for k in 1..=n {
            fact.push(&fact[k - 1] * rational(k as i64, 1));
        }
        let den: Vec<ExactRational> = (0..=n)
            .map(|k| if k == 0 { BigRational::one() } else { BigRational::one() / (&fact[k] * rational(2, 1)) })
            .collect();
        // coefficients c_k of 1/den
        let mut c: Vec<ExactRational> = vec![BigRational::one()];
        for k in 1..=n {
            let s = (1..=k).fold(BigRational::zero(), |acc, j| acc + &den[j] * &c[k - j]);
            c.push(-s);
        }
        (0..=n).map(|k| &c[k] * &fact[k]).collect()
    }

    #[test]
    fn small_values_by_hand() {
        let t = build_table(6);
        assert_eq!(t.zero_value(0).unwrap(), &rational(1, 1));
        assert_eq!(t.number(0).unwrap(), &rational(1, 1));
        assert_eq!(t.zero_value(1).unwrap(), &rational(-1, 2));
        assert_eq!(t.zero_value(2).unwrap(), &rational(0, 1));
        assert_eq!(t.zero_value(3).unwrap(), &rational(1, 4));
        assert_eq!(t.number(2).unwrap(), &rational(-1, 1));
        assert_eq!(t.number(4).unwrap(), &rational(5, 1));
        assert_eq!(t.number(6).unwrap(), &rational(-61, 1));
        for odd in [1, 3, 5] {
            assert!(t.number(odd).unwrap().is_zero());
        }
    }

    #[test]
    fn recurrence_matches_generating_function() {
        let t = build_table(30);
        assert_eq!(t.zero_values(), &zero_values_by_series(30)[..]);
    }

    #[test]
    fn denominators_are_powers_of_two_and_numbers_integral() {
        let t = build_table(40);
        for (i, q) in t.zero_values().iter().enumerate() {
            let mut d = q.denom().clone();
            while (&d % 2u32).is_zero() {
                d /= 2u32;
            }
            assert!(d.is_one(), "E_{i}(0) = {q}");
        }
        assert!(t.numbers().iter().all(|q| q.is_integer()));
    }

    #[test]
    fn polynomial_values() {
        let t = build_table(10);
        assert_eq!(t.euler_poly_eval(1, &rational(3, 1)).unwrap(), rational(5, 2));
        assert_eq!(t.euler_poly_eval(1, &rational(1, 2)).unwrap(), rational(0, 1));
        assert_eq!(t.euler_poly_eval(0, &rational(-7, 3)).unwrap(), rational(1, 1));
        // E_2(x) = x^2 - x
        assert_eq!(t.euler_poly_eval(2, &rational(1, 5)).unwrap(), rational(-4, 25));
        for m in 0..=10 {
            let e = t.euler_poly_eval(m, &rational(1, 2)).unwrap() * int(&(BigInt::one() << m));
            assert_eq!(&e, t.number(m).unwrap());
        }
        assert_eq!(
            t.euler_poly_eval(11, &rational(1, 1)).unwrap_err(),
            Error::DegreeOverflow { requested: 11, available: 10 }
        );
    }

    #[test]
    fn padic_evaluation_matches_exact() {
        let t = build_table(8);
        let c = PadicContext::new(5, 12, 0).unwrap();
        let x = rational(7, 15);
        for m in 0..=8 {
            let exact = c.from_rational(&t.euler_poly_eval(m, &x).unwrap());
            let padic = t.euler_poly_padic(m, &c.from_rational(&x)).unwrap();
            let depth = exact.agreement_depth(&padic).unwrap();
            assert!(depth >= padic.absprec().unwrap(), "m={m}");
        }
    }

    #[test]
    fn quadratic_identity_at_origin() {
        let t = build_table(2);
        let lhs = t.zero_value(0).unwrap() * t.zero_value(0).unwrap();
        let rhs = rational(2, 1) * (t.zero_value(0).unwrap() + t.zero_value(1).unwrap());
        assert_eq!(lhs, rational(1, 1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_network_holds_exactly() {
        let t = build_table(21);
        let reports = verify_euler_identities(&t, 20).unwrap();
        assert!(reports.len() > 500);
        for r in &reports {
            assert!(r.passed(), "{}", r.render_line());
        }
        assert!(verify_euler_identities(&t, 21).is_err());
    }

    #[test]
    fn cache_round_trip_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let t = build_table(20);
        let path = t.save(dir.path()).unwrap();
        assert!(path.ends_with("euler_table_M20.json"));
        let again = EulerTable::load(&path).unwrap();
        assert_eq!(again, t);
        assert_eq!(build_table(20).to_cache_json(), std::fs::read_to_string(&path).unwrap());
        let text = t.to_cache_json();
        assert!(text.starts_with(r#"{"version":1,"max_degree":20,"E0":[["1","1"],["-1","2"]"#));
        assert_eq!(EulerTable::load_or_build(dir.path(), 20).unwrap(), t);
    }
}

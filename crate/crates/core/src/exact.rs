//! Exact rational arithmetic: big rationals, factored positive rationals,
//! and the exact affine maps `z -> lambda*z + kappa` used for certification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse a token as an exact rational: `p/q`, an integer, or a decimal.
pub fn parse_rational(tok: &str) -> Option<BigRational> {
    let tok = tok.trim();
    if let Some((num, den)) = tok.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = tok.split_once('.') {
        let neg = int_part.starts_with('-');
        let int_part = if int_part.is_empty() || int_part == "-" {
            "0"
        } else {
            int_part
        };
        let i = BigInt::from_str(int_part).ok()?;
        if frac_part.is_empty() {
            return Some(BigRational::from(i));
        }
        let f = BigInt::from_str(frac_part).ok()?;
        if f.is_negative() {
            return None;
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigRational::new(f, scale);
        let whole = BigRational::from(i.clone());
        Some(if neg || i.is_negative() {
            whole - frac
        } else {
            whole + frac
        })
    } else {
        let n = BigInt::from_str(tok).ok()?;
        Some(BigRational::from(n))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy conversions for huge operands.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// A positive rational stored as a prime factorization times a residual.
///
/// The invariant `value = residual * prod(p^e)` holds exactly; factoring uses
/// trial division and leaves anything beyond the trial bound in the residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredRational {
    /// prime -> signed exponent
    pub factors: BTreeMap<u64, i64>,
    /// Unfactored remainder; `1` when the factorization is complete.
    pub residual: BigRational,
}

const TRIAL_BOUND: u64 = 100_000;

fn factor_biguint(mut n: BigUint, out: &mut BTreeMap<u64, i64>, sign: i64) -> BigUint {
    let mut p = 2u64;
    while p <= TRIAL_BOUND {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        while (&n % &bp).is_zero() {
            n /= &bp;
            *out.entry(p).or_insert(0) += sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        if let Some(small) = n.to_u64() {
            if small <= TRIAL_BOUND * TRIAL_BOUND {
                // n is prime here: no factor up to sqrt(n) divides it.
                *out.entry(small).or_insert(0) += sign;
                return BigUint::one();
            }
        }
    }
    n
}

impl FactoredRational {
    /// Factor a positive rational. Returns `None` for non-positive input.
    pub fn new(value: &BigRational) -> Option<Self> {
        if !value.is_positive() {
            return None;
        }
        let mut factors = BTreeMap::new();
        let rn = factor_biguint(value.numer().magnitude().clone(), &mut factors, 1);
        let rd = factor_biguint(value.denom().magnitude().clone(), &mut factors, -1);
        factors.retain(|_, e| *e != 0);
        let residual = BigRational::new(BigInt::from(rn), BigInt::from(rd));
        Some(FactoredRational { factors, residual })
    }

    pub fn is_fully_factored(&self) -> bool {
        self.residual.is_one()
    }

    /// Reassemble the exact rational value.
    pub fn value(&self) -> BigRational {
        let mut v = self.residual.clone();
        for (&p, &e) in &self.factors {
            let pw = BigInt::from(p).pow(e.unsigned_abs() as u32);
            if e >= 0 {
                v *= BigRational::from(pw);
            } else {
                v /= BigRational::from(pw);
            }
        }
        v
    }
}

/// The exact affine map `z -> lambda*z + kappa` with `lambda > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAffine {
    pub lambda: FactoredRational,
    pub kappa: BigRational,
}

impl ExactAffine {
    pub fn new(lambda: BigRational, kappa: BigRational) -> Result<Self> {
        let lambda = FactoredRational::new(&lambda).ok_or_else(|| {
            Error::PreconditionFailed("affine map needs a positive rational dilation".into())
        })?;
        Ok(ExactAffine { lambda, kappa })
    }

    pub fn identity() -> Self {
        ExactAffine {
            lambda: FactoredRational::new(&BigRational::one()).unwrap(),
            kappa: BigRational::zero(),
        }
    }

    pub fn lambda_value(&self) -> BigRational {
        self.lambda.value()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ExactAffine) -> Self {
        let l = self.lambda_value() * other.lambda_value();
        let k = self.lambda_value() * &other.kappa + &self.kappa;
        ExactAffine::new(l, k).expect("product of positive dilations is positive")
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ExactAffine::identity();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.lambda_value().is_one() && self.kappa.is_zero()
    }

    /// Trace of the determinant-one matrix representative, as
    /// `sqrt(lambda) + 1/sqrt(lambda)` squared avoids irrationals:
    /// returns `tr^2 = lambda + 2 + 1/lambda` exactly.
    pub fn trace_squared(&self) -> BigRational {
        let l = self.lambda_value();
        let two = BigRational::from(BigInt::from(2));
        l.clone() + two + l.recip()
    }

    /// Distance of the det-1 representative from the identity matrix in the
    /// Frobenius norm, minimized over the sign choice.
    pub fn distance_to_identity(&self) -> f64 {
        let l = rational_to_f64(&self.lambda_value());
        let k = rational_to_f64(&self.kappa);
        let sl = l.sqrt();
        let (a, b, d) = (sl, k / sl, 1.0 / sl);
        let plus = ((a - 1.0).powi(2) + b * b + (d - 1.0).powi(2)).sqrt();
        let minus = ((a + 1.0).powi(2) + b * b + (d + 1.0).powi(2)).sqrt();
        plus.min(minus)
    }
}

impl fmt::Display for ExactAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z -> {}*z + {}", self.lambda_value(), self.kappa)
    }
}

/// A Mobius map with exact rational coefficients, kept unnormalized
/// (determinant any positive rational).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMoebius {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl ExactMoebius {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_positive() {
            return Err(Error::NotProjective {
                det: rational_to_f64(&det),
            });
        }
        Ok(ExactMoebius { a, b, c, d })
    }

    /// `z -> (az+b)/d` form, when `c = 0` exactly.
    pub fn as_affine(&self) -> Option<ExactAffine> {
        if !self.c.is_zero() {
            return None;
        }
        let lambda = &self.a / &self.d;
        let kappa = &self.b / &self.d;
        ExactAffine::new(lambda, kappa).ok()
    }
}

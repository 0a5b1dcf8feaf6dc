//! Probability weights: exact rationals or `f64`.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Float tolerance used where exact equality is unavailable.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Weight: Clone + PartialOrd + Debug + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn abs(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value when available.
    fn to_rational(&self) -> Option<Rational>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
    /// Equality up to `FLOAT_TOL` in float mode, exact otherwise.
    fn close_to(&self, o: &Self) -> bool {
        if Self::EXACT {
            self == o
        } else {
            (self.to_f64() - o.to_f64()).abs() <= FLOAT_TOL * (1.0 + o.to_f64().abs())
        }
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&ratio(num, den))
    }
}

impl Weight for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Weight for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Correctly scaled conversion; survives numerators and denominators beyond `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(-shift as i32)
}

/// Parse `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let r = Rational::new(n, d);
    Ok(if neg { -r } else { r })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Weights rescaled to integer numerators over one common denominator.
#[derive(Clone, Debug)]
pub struct IntWeights {
    pub numerators: Vec<u128>,
    pub denom: BigUint,
}

impl IntWeights {
    pub fn new(ws: &[Rational]) -> Result<Self> {
        let mut l = BigInt::one();
        for w in ws {
            l = l.lcm(w.denom());
        }
        let mut numerators = Vec::with_capacity(ws.len());
        for w in ws {
            let v = (w.numer() * &l) / w.denom();
            let v = v.to_u128().ok_or_else(|| {
                Error::resource("integer weight numerator", v.to_string(), u128::MAX)
            })?;
            numerators.push(v);
        }
        Ok(IntWeights { numerators, denom: l.to_biguint().expect("positive lcm") })
    }
}

/// `count / denom^power` as an exact rational.
pub fn over_power(count: u128, denom: &BigUint, power: u32) -> Rational {
    Rational::new(BigInt::from(count), BigInt::from(num_traits::pow(denom.clone(), power as usize)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/12").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn huge_rational_to_float() {
        let big = num_traits::pow(BigInt::from(3), 900);
        let r = Rational::new(big.clone(), big * BigInt::from(4));
        assert!((rational_to_f64(&r) - 0.25).abs() < 1e-15);
        let tiny = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 1100));
        assert_eq!(rational_to_f64(&tiny), 0.0);
    }

    #[test]
    fn common_denominator() {
        let iw = IntWeights::new(&[ratio(1, 2), ratio(1, 6), ratio(1, 3)]).unwrap();
        assert_eq!(iw.numerators, vec![3, 1, 2]);
        assert_eq!(iw.denom, BigUint::from(6u32));
    }
}

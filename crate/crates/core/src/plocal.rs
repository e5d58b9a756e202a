//! Exact arithmetic in the localization Z_(p): rationals whose denominator
//! is coprime to the ambient prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number stored in lowest terms with a positive denominator.
///
/// The denominator is kept coprime to the ambient prime by construction
/// (checked in [`PLocalRational::new`]) and stays that way under `+`, `-`
/// and `*`. Inversion requires p-adic valuation zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLocalRational {
    num: BigInt,
    den: BigInt,
}

impl PLocalRational {
    /// Builds `num/den` in lowest terms, rejecting denominators divisible by `p`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>, p: u32) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Parameter("zero denominator".into()));
        }
        let r = Self::reduced(num, den);
        if (&r.den % BigInt::from(p)).is_zero() {
            return Err(Error::Valuation(format!(
                "denominator {} is divisible by p = {}",
                r.den, p
            )));
        }
        Ok(r)
    }

    fn reduced(num: BigInt, den: BigInt) -> Self {
        if num.is_zero() {
            return Self {
                num,
                den: BigInt::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Self { num, den }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// p-adic valuation; `None` for zero (valuation +infinity).
    pub fn valuation(&self, p: u32) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        let mut v = 0i64;
        let mut n = self.num.clone();
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        let mut d = self.den.clone();
        while (&d % &p).is_zero() {
            d /= &p;
            v -= 1;
        }
        Some(v)
    }

    /// Exact rational division, checked to stay inside Z_(p); requires
    /// valuation(self) >= valuation(other).
    pub fn divide(&self, other: &Self, p: u32) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Valuation("division by zero".into()));
        }
        Self::new(&self.num * &other.den, &self.den * &other.num, p)
    }

    /// Exact inverse inside Z_(p); errors on zero or positive valuation.
    pub fn invert(&self, p: u32) -> Result<Self> {
        match self.valuation(p) {
            None => Err(Error::Valuation("cannot invert zero".into())),
            Some(v) if v > 0 => Err(Error::Valuation(format!(
                "cannot invert element of positive {}-adic valuation {}",
                p, v
            ))),
            Some(_) => Ok(Self::reduced(self.den.clone(), self.num.clone())),
        }
    }

    /// Reduction Z_(p) -> F_p, as a canonical representative in 0..p.
    pub fn mod_p(&self, p: u32) -> u32 {
        let pb = BigInt::from(p);
        let n = ((&self.num % &pb) + &pb) % &pb;
        let d = ((&self.den % &pb) + &pb) % &pb;
        let n: u32 = n.try_into().expect("residue fits in u32");
        let d: u32 = d.try_into().expect("residue fits in u32");
        debug_assert!(d != 0, "denominator must be a p-local unit");
        let d_inv = crate::fp::Fp(p).inv(d);
        crate::fp::Fp(p).mul(n, d_inv)
    }
}

impl Add for &PLocalRational {
    type Output = PLocalRational;
    fn add(self, rhs: &PLocalRational) -> PLocalRational {
        PLocalRational::reduced(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &PLocalRational {
    type Output = PLocalRational;
    fn sub(self, rhs: &PLocalRational) -> PLocalRational {
        PLocalRational::reduced(
            &self.num * &rhs.den - &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &PLocalRational {
    type Output = PLocalRational;
    fn mul(self, rhs: &PLocalRational) -> PLocalRational {
        PLocalRational::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &PLocalRational {
    type Output = PLocalRational;
    fn neg(self) -> PLocalRational {
        PLocalRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for PLocalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for PLocalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for PLocalRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Parses `a` or `a/b` with optional sign.
pub fn parse_plocal(s: &str, p: u32) -> Result<PLocalRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {:?}", num)))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {:?}", den)))?;
    PLocalRational::new(num, den, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64, p: u32) -> PLocalRational {
        PLocalRational::new(n, d, p).unwrap()
    }

    #[test]
    fn invert_unit_at_p3() {
        let x = PLocalRational::from_int(8);
        assert_eq!(x.invert(3).unwrap(), q(1, 8, 3));
    }

    #[test]
    fn invert_non_unit_at_p2_fails() {
        let x = PLocalRational::from_int(6);
        assert!(matches!(x.invert(2), Err(Error::Valuation(_))));
    }

    #[test]
    fn half_plus_half_is_one() {
        let h = q(1, 2, 3);
        assert_eq!(&h + &h, PLocalRational::one());
    }

    #[test]
    fn denominator_divisible_by_p_rejected() {
        assert!(PLocalRational::new(1, 6, 3).is_err());
        assert!(PLocalRational::new(1, 6, 5).is_ok());
        // reduction may clear the p-part of the denominator
        assert!(PLocalRational::new(2, 6, 2).is_ok());
    }

    #[test]
    fn valuations() {
        assert_eq!(q(12, 1, 2).valuation(2), Some(2));
        assert_eq!(q(1, 3, 2).valuation(3), Some(-1));
        assert_eq!(PLocalRational::zero().valuation(5), None);
    }

    #[test]
    fn mod_p_reduction() {
        assert_eq!(q(1, 2, 3).mod_p(3), 2); // 1/2 = 2 mod 3
        assert_eq!(q(-1, 1, 3).mod_p(3), 2);
        assert_eq!(q(1, 3, 2).mod_p(2), 1);
    }
}

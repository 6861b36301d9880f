//! Exact rational and modular integer arithmetic.
//!
//! Every correction term in this crate is a [`Rational`]; nothing is ever
//! approximated by floating point.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact fraction, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        reduce_fraction(numer, denom)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fract_mod_one(&self) -> Rational {
        let floor = self.0.floor();
        Rational(&self.0 - floor)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    /// `num/den` in lowest terms, or just `num` when the value is an integer.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => reduce_fraction(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

/// Serialize a `BigInt` as a decimal string, for `#[serde(serialize_with)]`.
pub fn serialize_bigint<S: Serializer>(
    n: &BigInt,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&n.to_string())
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// An integer modulo a positive modulus, stored as its representative in `[0, modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: BigInt,
    modulus: BigInt,
}

impl Residue {
    pub fn new(value: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self> {
        let modulus = modulus.into();
        if !modulus.is_positive() {
            return Err(Error::InvalidInput(format!(
                "modulus {modulus} must be positive"
            )));
        }
        let value = value.into().mod_floor(&modulus);
        Ok(Residue { value, modulus })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Floor of `a / b`, rounding toward negative infinity.
pub fn floor_div(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a.div_floor(b))
}

/// The inverse of `a` modulo `m`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<Residue> {
    if !m.is_positive() {
        return Err(Error::InvalidInput(format!("modulus {m} must be positive")));
    }
    let a_red = a.mod_floor(m);
    let egcd = a_red.extended_gcd(m);
    if !egcd.gcd.is_one() {
        return Err(Error::NotInvertible {
            value: a.to_string(),
            modulus: m.to_string(),
        });
    }
    Residue::new(egcd.x, m.clone())
}

/// `p / q` in lowest terms with positive denominator.
pub fn reduce_fraction(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Rational> {
    let (p, q) = (p.into(), q.into());
    if q.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational(BigRational::new(p, q)))
}

/// Greatest common divisor on machine integers.
pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn floor_div_examples() {
        assert_eq!(floor_div(&bi(-1), &bi(6)).unwrap(), bi(-1));
        assert_eq!(floor_div(&bi(-22), &bi(6)).unwrap(), bi(-4));
        assert_eq!(floor_div(&bi(6), &bi(6)).unwrap(), bi(1));
        assert_eq!(floor_div(&bi(1), &bi(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&bi(6), &bi(49)).unwrap().value(), &bi(41));
        for m in 2..20 {
            assert_eq!(mod_inverse(&bi(1), &bi(m)).unwrap().value(), &bi(1));
        }
        assert!(matches!(
            mod_inverse(&bi(2), &bi(4)),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn reduce_fraction_examples() {
        assert_eq!(reduce_fraction(49, 6).unwrap().to_string(), "49/6");
        assert_eq!(reduce_fraction(-2, -4).unwrap().to_string(), "1/2");
        let z = reduce_fraction(0, 5).unwrap();
        assert_eq!(format!("{z:?}"), "0/1");
        assert_eq!(reduce_fraction(3, 0), Err(Error::DivisionByZero));
    }

    #[test]
    fn display_and_parse() {
        let r: Rational = "-1/4".parse().unwrap();
        assert_eq!(r.to_string(), "-1/4");
        assert_eq!("6/-3".parse::<Rational>().unwrap().to_string(), "-2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert_eq!(
            Rational::new(7, 3).unwrap().fract_mod_one().to_string(),
            "1/3"
        );
        assert_eq!(
            Rational::new(-7, 3).unwrap().fract_mod_one().to_string(),
            "2/3"
        );
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(factorize(2401 * 121), vec![(7, 4), (11, 2)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(exact_sqrt(2401), Some(49));
        assert_eq!(exact_sqrt(50), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn floor_div_brackets(a in -1_000_000i64..1_000_000, b in -5000i64..5000) {
            prop_assume!(b != 0);
            let q = floor_div(&bi(a), &bi(b)).unwrap();
            let (a, b) = (bi(a), bi(b));
            if b.is_positive() {
                prop_assert!(&b * &q <= a && a < &b * &q + b.abs());
            } else {
                // q <= a/b < q + 1 with the inequalities flipped by the sign of b.
                prop_assert!(&b * &q >= a && a > &b * &q + &b);
            }
        }

        #[test]
        fn mod_inverse_is_inverse(a in -100_000i64..100_000, m in 2i64..100_000) {
            prop_assume!(a.gcd(&m) == 1);
            let r = mod_inverse(&bi(a), &bi(m)).unwrap();
            prop_assert!(r.value() >= &bi(0) && r.value() < &bi(m));
            prop_assert_eq!((r.value() * bi(a)).mod_floor(&bi(m)), bi(1));
        }

        #[test]
        fn rational_ops_match_cross_multiplication(
            a in -10_000i64..10_000, b in 1i64..10_000,
            c in -10_000i64..10_000, d in 1i64..10_000,
        ) {
            let x = Rational::new(a, b).unwrap();
            let y = Rational::new(c, d).unwrap();
            let (a, b, c, d) = (bi(a), bi(b), bi(c), bi(d));
            // x + y = (ad + cb) / bd, compared by cross multiplication.
            let s = &x + &y;
            prop_assert_eq!(s.numer() * (&b * &d), (&a * &d + &c * &b) * s.denom());
            let p = &x * &y;
            prop_assert_eq!(p.numer() * (&b * &d), (&a * &c) * p.denom());
            let n = -x.clone();
            prop_assert_eq!(n.numer() * &b, -&a * n.denom());
            prop_assert_eq!(x.cmp(&y), (&a * &d).cmp(&(&c * &b)));
            prop_assert_eq!(x == y, &a * &d == &c * &b);
            prop_assert!(x.denom().is_positive());
            prop_assert!(x.numer().gcd(x.denom()).is_one());
        }
    }
}

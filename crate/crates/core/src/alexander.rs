//! Laurent polynomials, Alexander polynomials of torus knots and torsion coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Laurent polynomial in `t` with integer coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    fn add_term(&mut self, exp: i64, coeff: BigInt) {
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(e, c)| self.coeffs.get(&-e) == Some(c))
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + by, c.clone()))
                .collect(),
        }
    }

    /// Exact division by `divisor`; fails if the remainder is nonzero or a
    /// leading coefficient does not divide.
    pub fn div_exact(&self, divisor: &LaurentPolynomial) -> Result<LaurentPolynomial> {
        let (d_top, d_lead) = match divisor.coeffs.iter().next_back() {
            Some((e, c)) => (*e, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let d_low = divisor.min_exp().unwrap_or(d_top);
        let mut rem = self.clone();
        let mut quot = LaurentPolynomial::zero();
        while let Some(top) = rem.max_exp() {
            let low = rem.min_exp().unwrap_or(top);
            if top - d_top < low - d_low {
                break;
            }
            let c = rem.coeff(top);
            let (q, r) = c.div_rem(&d_lead);
            if !r.is_zero() {
                return Err(Error::InvalidAlexander(format!(
                    "leading coefficient {d_lead} does not divide {c}"
                )));
            }
            let term = LaurentPolynomial::monomial(top - d_top, q);
            rem = &rem - &(&term * divisor);
            quot = &quot + &term;
        }
        if !rem.is_zero() {
            return Err(Error::InvalidAlexander(format!("nonzero remainder {rem}")));
        }
        Ok(quot)
    }

    /// Exponent:coefficient pairs in increasing exponent order, comma separated.
    pub fn machine_form(&self) -> String {
        if self.is_zero() {
            return "0:0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(e, c)| format!("{e}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_machine_form(s: &str) -> Result<Self> {
        let mut p = LaurentPolynomial::zero();
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (e, c) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected exp:coeff, got {part:?}")))?;
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {e:?}")))?;
            let c: BigInt = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Render a symmetric polynomial as `a0 + a1(t + t^-1) + ...`.
    pub fn symmetric_form(&self) -> String {
        let mut out = String::new();
        let top = self.max_exp().unwrap_or(0).max(0);
        for i in 0..=top {
            let a = self.coeff(i);
            if a.is_zero() && !(i == 0 && self.is_zero()) {
                continue;
            }
            let body = if i == 0 {
                None
            } else if i == 1 {
                Some("(t + t^-1)".to_string())
            } else {
                Some(format!("(t^{i} + t^-{i})"))
            };
            let mag = a.abs();
            let neg = a.is_negative();
            let piece = match &body {
                None => mag.to_string(),
                Some(b) if mag.is_one() => b.clone(),
                Some(b) => format!("{mag}{b}"),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
                out.push_str(&piece);
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&piece);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.machine_form())
    }
}

impl<'a> Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: &'a LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, -c);
        }
        out
    }
}

impl std::ops::Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

/// An L-space knot, modelled only by its symmetrized Alexander polynomial and genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSpaceKnotModel {
    name: String,
    alexander: LaurentPolynomial,
    genus: u64,
}

impl LSpaceKnotModel {
    /// Build a model from a symmetrized Alexander polynomial.
    ///
    /// The polynomial must be symmetric with `Δ(1) = 1`, and its nonzero
    /// coefficients must be `±1` alternating in sign with top coefficient `+1`
    /// (the shape every L-space knot's Alexander polynomial has).
    pub fn new(name: impl Into<String>, alexander: LaurentPolynomial) -> Result<Self> {
        if !alexander.is_symmetric() {
            return Err(Error::InvalidAlexander(format!(
                "{alexander} is not symmetric"
            )));
        }
        if !alexander.eval_at_one().is_one() {
            return Err(Error::InvalidAlexander(format!(
                "{alexander} does not satisfy Δ(1) = 1"
            )));
        }
        let mut expected = BigInt::one();
        for (_, c) in alexander.coeffs.iter().rev() {
            if *c != expected {
                return Err(Error::InvalidAlexander(format!(
                    "{alexander} does not have alternating ±1 coefficients"
                )));
            }
            expected = -expected;
        }
        let genus = alexander.max_exp().unwrap_or(0).max(0) as u64;
        Ok(LSpaceKnotModel {
            name: name.into(),
            alexander,
            genus,
        })
    }

    pub fn unknot() -> Self {
        LSpaceKnotModel {
            name: "unknot".into(),
            alexander: LaurentPolynomial::one(),
            genus: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alexander(&self) -> &LaurentPolynomial {
        &self.alexander
    }

    pub fn genus(&self) -> u64 {
        self.genus
    }
}

fn t_power_minus_one(n: i64) -> LaurentPolynomial {
    LaurentPolynomial::from_terms([(n, 1), (0, -1)])
}

/// The positive torus knot `T(a,b)`.
///
/// `Δ = (t^{ab} - 1)(t - 1) / ((t^a - 1)(t^b - 1))`, divided exactly and
/// shifted to be symmetric.
pub fn torus_knot(a: i64, b: i64) -> Result<LSpaceKnotModel> {
    if a < 2 || b < 2 {
        return Err(Error::InvalidTorusKnot {
            a,
            b,
            reason: "need a, b >= 2".into(),
        });
    }
    if a.gcd(&b) != 1 {
        return Err(Error::InvalidTorusKnot {
            a,
            b,
            reason: "a and b are not coprime".into(),
        });
    }
    let numer = &t_power_minus_one(a * b) * &t_power_minus_one(1);
    let denom = &t_power_minus_one(a) * &t_power_minus_one(b);
    let quot = numer.div_exact(&denom)?;
    let degree = (a - 1) * (b - 1);
    debug_assert_eq!(quot.max_exp(), Some(degree));
    let alexander = quot.shift(-degree / 2);
    let model = LSpaceKnotModel::new(format!("T({a},{b})"), alexander)?;
    debug_assert_eq!(model.genus as i64, degree / 2);
    Ok(model)
}

/// `t_i(K) = Σ_{j>0} j·a_{|i|+j}`.
pub fn torsion_coefficient(knot: &LSpaceKnotModel, i: i64) -> BigInt {
    let base = i.abs();
    knot.alexander
        .terms()
        .filter(|(e, _)| *e > base)
        .map(|(e, c)| BigInt::from(e - base) * c)
        .sum()
}

/// `(i, t_i)` for `0 <= i <= genus`.
pub fn torsion_table(knot: &LSpaceKnotModel) -> Vec<(i64, BigInt)> {
    let g = knot.genus as i64;
    let table: Vec<_> = (0..=g).map(|i| (i, torsion_coefficient(knot, i))).collect();
    assert!(
        table.last().is_some_and(|(_, t)| t.is_zero()),
        "t_g must vanish"
    );
    table
}

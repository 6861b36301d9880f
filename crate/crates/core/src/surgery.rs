//! Correction terms of positive rational surgery on L-space knots.
//!
//! For `p/q >= 2g(K) - 1` and `|i| <= p/2`,
//! `d(S^3_{p/q}(K), i) = d(S^3_{p/q}(U), i) - 2 t_{|⌊i/q⌋|}(K)`.
//!
//! The `i` here is an integer label, not a spin^c structure; labels are
//! threaded through the whole crate as [`SpincLabel`] values in `[0, p)` and
//! converted to the symmetric representative only inside [`d_surgery`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::alexander::{torsion_coefficient, LSpaceKnotModel};
use crate::error::{Error, Result};
use crate::exactnum::{floor_div, Rational};
use crate::lens::{symmetric_representative, LensSpace, LensTable, SpincLabel};

/// `p/q` surgery on an L-space knot, with `p, q > 0` coprime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryDescription {
    knot: LSpaceKnotModel,
    p: u64,
    q: u64,
}

impl SurgeryDescription {
    pub fn new(knot: LSpaceKnotModel, slope: &Rational) -> Result<Self> {
        if !slope.numer().is_positive() {
            return Err(Error::InvalidSlope(slope.to_string()));
        }
        let p = slope
            .numer()
            .to_u64()
            .ok_or_else(|| Error::InvalidSlope(slope.to_string()))?;
        let q = slope
            .denom()
            .to_u64()
            .ok_or_else(|| Error::InvalidSlope(slope.to_string()))?;
        let bound = 2 * knot.genus() as i64 - 1;
        // p/q >= 2g - 1  <=>  p >= (2g - 1) q
        if (p as i128) < bound as i128 * q as i128 {
            return Err(Error::FormulaOutOfRange {
                slope: slope.to_string(),
                bound,
            });
        }
        Ok(SurgeryDescription { knot, p, q })
    }

    pub fn from_pq(knot: LSpaceKnotModel, p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= 0 {
            return Err(Error::InvalidSlope(format!("{p}/{q}")));
        }
        Self::new(knot, &Rational::new(p, q)?)
    }

    pub fn knot(&self) -> &LSpaceKnotModel {
        &self.knot
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.p, self.q).expect("q > 0")
    }

    /// The underlying lens space `S^3_{p/q}(U)`.
    pub fn lens(&self) -> LensSpace {
        LensSpace::new(self.p, self.q as i64).expect("slope is in lowest terms")
    }

    pub fn labels(&self) -> impl Iterator<Item = SpincLabel> {
        let p = self.p;
        (0..p).map(move |i| SpincLabel::new(i, p).expect("in range"))
    }
}

impl fmt::Display for SurgeryDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S^3_{{{}/{}}}({})", self.p, self.q, self.knot.name())
    }
}

/// The torsion index `|⌊i'/q⌋|` for the symmetric representative `i'` of a label.
pub fn torsion_index(s: &SurgeryDescription, i: SpincLabel) -> BigInt {
    let sym = BigInt::from(symmetric_representative(i));
    floor_div(&sym, &BigInt::from(s.q)).expect("q > 0").abs()
}

pub(crate) fn d_surgery_with(
    table: &LensTable,
    s: &SurgeryDescription,
    i: SpincLabel,
) -> Result<Rational> {
    if i.modulus() != s.p {
        return Err(Error::LabelOutOfRange {
            label: i.value(),
            modulus: s.p,
        });
    }
    let lens_d = table.d(s.lens(), i)?;
    let idx = torsion_index(s, i);
    let t = match idx.to_i64() {
        Some(j) => torsion_coefficient(&s.knot, j),
        // Far beyond any genus: t_j vanishes.
        None => BigInt::default(),
    };
    Ok(lens_d - Rational::from_integer(t * 2))
}

/// `d(S^3_{p/q}(K), i)` for a label `i` in `[0, p)`.
pub fn d_surgery(s: &SurgeryDescription, i: SpincLabel) -> Result<Rational> {
    d_surgery_with(LensTable::global(), s, i)
}

/// Linking form value `lk(μ, μ) = -q/p mod 1` on `H_1(S^3_{p/q}(K)) = Z/p`.
pub fn linking_self_pairing(s: &SurgeryDescription) -> Rational {
    let q = BigInt::from(s.q);
    let p = BigInt::from(s.p);
    Rational::new((-q).mod_floor(&p), p).expect("p > 0")
}

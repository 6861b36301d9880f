//! The double branched cover `Σ_p` of `K_p`, modelled as
//! `S^3_{(2p+1)^2/2p}(T(2,5))`.
//!
//! `Σ_p` is really `(2p+1)^2/2p` surgery on `D # D`, where `D` is the
//! positive untwisted Whitehead double of the trefoil. Positive rational
//! surgeries on `D # D` and on `T(2,5)` have the same correction terms, so
//! every computation here runs on the `T(2,5)` surrogate. Reports carry
//! [`SURROGATE_NOTE`] so that substitution is never silent.

use num_bigint::BigInt;
use serde::Serialize;

use crate::alexander::{torsion_coefficient, torus_knot};
use crate::error::{Error, Result};
use crate::exactnum::{floor_div, is_prime, serialize_bigint, Rational, Residue};
use crate::lens::{central_label, label_from_group_element, SpincLabel};
use crate::surgery::{d_surgery, SurgeryDescription};

pub const SURROGATE_NOTE: &str =
    "Sigma_p = S^3_{(2p+1)^2/2p}(D#D) is evaluated on the surrogate T(2,5): \
     CFK^inf(D#D) agrees with CFK^inf(T(2,5)) up to acyclic summands";

/// The knot `K_p` through its branched cover; requires `p >= 3` and `2p+1` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KpModel {
    p: u64,
}

/// One of the `2p+1` labels of spin^c structures `s_0 + PD(k(2p+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetabolizerLabel {
    pub k: u64,
    /// `(2p^2+2p+1)(2p-1) + (2p+1)k` before shifting.
    #[serde(serialize_with = "serialize_bigint")]
    pub raw: BigInt,
    /// `i_k = raw - p(2p+1)^2`.
    #[serde(serialize_with = "serialize_bigint")]
    pub shifted: BigInt,
    pub label: SpincLabel,
}

/// A row of the branched cover table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaRow {
    pub k: u64,
    #[serde(serialize_with = "serialize_bigint")]
    pub raw: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub shifted: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub floor_index: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub torsion: BigInt,
    pub d: Rational,
}

impl KpModel {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(2 * p + 1) {
            return Err(Error::InvalidKp(p));
        }
        Ok(KpModel { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `2p + 1`.
    pub fn prime(&self) -> u64 {
        2 * self.p + 1
    }

    /// `|H_1(Σ_p)| = (2p+1)^2`.
    pub fn order(&self) -> u64 {
        self.prime() * self.prime()
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.order(), 2 * self.p).expect("p > 0")
    }

    pub fn surgery(&self) -> SurgeryDescription {
        let knot = torus_knot(2, 5).expect("T(2,5) is a torus knot");
        SurgeryDescription::from_pq(knot, self.order() as i64, 2 * self.p as i64)
            .expect("(2p+1)^2/2p >= 3")
    }

    /// `i_k` for `k = 0..=2p`, together with the raw labels before the shift.
    pub fn metabolizer_labels(&self) -> Vec<MetabolizerLabel> {
        let p = BigInt::from(self.p);
        let t = BigInt::from(self.prime());
        let raw0 = (&p * &p * 2 + &p * 2 + 1) * (&p * 2 - 1);
        let shift = &p * &t * &t;
        (0..=2 * self.p)
            .map(|k| {
                let raw = &raw0 + &t * k;
                let shifted = &raw - &shift;
                let label = SpincLabel::reduce_big(&shifted, self.order());
                MetabolizerLabel {
                    k,
                    raw,
                    shifted,
                    label,
                }
            })
            .collect()
    }

    fn check_k(&self, k: u64) -> Result<()> {
        if k > 2 * self.p {
            return Err(Error::InvalidInput(format!(
                "k = {k} outside 0..={}",
                2 * self.p
            )));
        }
        Ok(())
    }

    /// `i_k = -2p^2 - p - 1 + k(2p+1)`.
    pub fn shifted_label(&self, k: u64) -> Result<BigInt> {
        self.check_k(k)?;
        let p = BigInt::from(self.p);
        let sq: BigInt = &p * &p * 2;
        let base = -sq - &p - 1;
        Ok(base + BigInt::from(self.prime()) * k)
    }

    /// `⌊i_k / 2p⌋`, checked against its closed form.
    pub fn floor_index(&self, k: u64) -> Result<BigInt> {
        let ik = self.shifted_label(k)?;
        let f = floor_div(&ik, &BigInt::from(2 * self.p))?;
        let (k_i, p_i) = (k as i64, self.p as i64);
        let closed = if k <= self.p {
            k_i - p_i - 1
        } else {
            k_i - p_i
        };
        assert_eq!(
            f,
            BigInt::from(closed),
            "floor index closed form at p={}, k={k}",
            self.p
        );
        Ok(f)
    }

    /// The group element `k(2p+1)` of `H_1(Σ_p) = Z/(2p+1)^2`.
    pub fn group_element(&self, k: u64) -> Result<Residue> {
        self.check_k(k)?;
        Residue::new(BigInt::from(self.prime()) * k, self.order())
    }

    /// The spin^c label of `s_0 + PD(k(2p+1))`.
    pub fn label_of_element(&self, k: u64) -> Result<SpincLabel> {
        label_from_group_element(self.order(), 2 * self.p as i64, &self.group_element(k)?)
    }

    /// The label of the spin structure.
    pub fn spin_label(&self) -> SpincLabel {
        central_label(self.order(), 2 * self.p as i64).expect("order is odd")
    }

    /// `d(Σ_p, i_k)`.
    pub fn d_sigma(&self, k: u64) -> Result<Rational> {
        let ik = self.shifted_label(k)?;
        let label = SpincLabel::reduce_big(&ik, self.order());
        d_surgery(&self.surgery(), label)
    }

    pub fn table(&self) -> Result<Vec<SigmaRow>> {
        let knot = torus_knot(2, 5)?;
        self.metabolizer_labels()
            .into_iter()
            .map(|m| {
                let floor_index = self.floor_index(m.k)?;
                let j = i64::try_from(&floor_index).expect("small").abs();
                Ok(SigmaRow {
                    k: m.k,
                    torsion: torsion_coefficient(&knot, j),
                    d: self.d_sigma(m.k)?,
                    raw: m.raw,
                    shifted: m.shifted,
                    floor_index,
                })
            })
            .collect()
    }
}

/// All `p` in `lo..=hi` with `p >= 3` and `2p+1` prime.
pub fn valid_parameters(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|p| is_prime(2 * p + 1)).collect()
}

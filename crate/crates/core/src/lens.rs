//! Correction terms of lens spaces and the arithmetic of their spin^c labels.
//!
//! Conventions: `S^3_{p/q}(U) = -L(p,q)`, and spin^c structures are labelled
//! by `0..p` through the standard genus one Heegaard diagram. The d-invariant
//! is computed by the recursion
//!
//! ```text
//! d(-L(p,q), i) = ((2i + 1 - p - q)^2 - pq) / 4pq - d(-L(q, p mod q), i mod q)
//! ```
//!
//! with `d(S^3) = 0`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use parking_lot::RwLock;

use crate::error::{Error, Result};
use crate::exactnum::{gcd_u64, Rational, Residue};

/// The lens space `-L(p,q) = S^3_{p/q}(U)` with `q` reduced into `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LensSpace {
    p: u64,
    q: u64,
}

impl LensSpace {
    pub fn new(p: u64, q: i64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidLens {
                p,
                q,
                reason: "p must be positive".into(),
            });
        }
        let q_red = q.rem_euclid(p as i64) as u64;
        if gcd_u64(p, q_red) != 1 {
            return Err(Error::InvalidLens {
                p,
                q,
                reason: "p and q are not coprime".into(),
            });
        }
        Ok(LensSpace { p, q: q_red })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn label(&self, i: u64) -> Result<SpincLabel> {
        SpincLabel::new(i, self.p)
    }

    pub fn labels(&self) -> impl Iterator<Item = SpincLabel> + '_ {
        (0..self.p).map(move |i| SpincLabel {
            value: i,
            modulus: self.p,
        })
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-L({},{})", self.p, self.q)
    }
}

/// A spin^c label, i.e. an element of `Z/p` in its canonical representative `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpincLabel {
    value: u64,
    modulus: u64,
}

impl SpincLabel {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if value >= modulus {
            return Err(Error::LabelOutOfRange {
                label: value,
                modulus,
            });
        }
        Ok(SpincLabel { value, modulus })
    }

    /// Reduce an arbitrary integer into `[0, modulus)`.
    pub fn reduce(value: i64, modulus: u64) -> Self {
        SpincLabel {
            value: value.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    pub(crate) fn reduce_big(value: &BigInt, modulus: u64) -> Self {
        let r = Residue::new(value.clone(), modulus).expect("positive modulus");
        SpincLabel {
            value: u64::try_from(r.value()).expect("fits"),
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn to_residue(&self) -> Residue {
        Residue::new(self.value, self.modulus).expect("positive modulus")
    }
}

impl serde::Serialize for SpincLabel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.value)
    }
}

impl fmt::Display for SpincLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Memo table for the lens space recursion, keyed by `(p, q, i)` with `q < p`, `i < p`.
#[derive(Default)]
pub struct LensTable {
    memo: RwLock<HashMap<(u64, u64, u64), Rational>>,
}

impl LensTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide shared table.
    pub fn global() -> &'static LensTable {
        static TABLE: OnceLock<LensTable> = OnceLock::new();
        TABLE.get_or_init(LensTable::new)
    }

    pub fn len(&self) -> usize {
        self.memo.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d(&self, lens: LensSpace, label: SpincLabel) -> Result<Rational> {
        if label.modulus != lens.p {
            return Err(Error::LabelOutOfRange {
                label: label.value,
                modulus: lens.p,
            });
        }
        Ok(self.d_raw(lens.p, lens.q, label.value))
    }

    fn d_raw(&self, p: u64, q: u64, i: u64) -> Rational {
        if p == 1 {
            return Rational::zero();
        }
        if let Some(v) = self.memo.read().get(&(p, q, i)) {
            return v.clone();
        }
        let (pb, qb) = (BigInt::from(p), BigInt::from(q));
        let c1 = BigInt::from(2 * i + 1) - &pb - &qb;
        let pq = &pb * &qb;
        let head = Rational::new(&c1 * &c1 - &pq, BigInt::from(4) * &pq).expect("pq > 0");
        let value = head - self.d_raw(q, p % q, i % q);
        self.memo.write().insert((p, q, i), value.clone());
        value
    }
}

/// `d(-L(p,q), i) = d(S^3_{p/q}(U), i)`.
pub fn d_lens(p: u64, q: i64, i: SpincLabel) -> Result<Rational> {
    let lens = LensSpace::new(p, q)?;
    LensTable::global().d(lens, i)
}

/// The label `((p+1)(q-1)/2) mod p`. It has the central property
/// `2i + 1 - p - q ≡ 0 (mod p)` for every `p`; for odd `p` it is the unique spin label.
pub(crate) fn spin_basepoint(lens: LensSpace) -> SpincLabel {
    // q is odd whenever p is even, so (p+1)(q-1) is always even.
    let numer = BigInt::from(lens.p + 1) * (BigInt::from(lens.q) - 1);
    SpincLabel::reduce_big(&(numer / 2), lens.p)
}

/// Label of the central spin^c structure of `-L(p,q)` for odd `p`.
pub fn central_label(p: u64, q: i64) -> Result<SpincLabel> {
    let lens = LensSpace::new(p, q)?;
    if p.is_multiple_of(2) {
        return Err(Error::NoUniqueSpin(p));
    }
    Ok(spin_basepoint(lens))
}

/// Label of the conjugate spin^c structure, `(p + q - 1 - i) mod p`.
pub fn conjugate_label(p: u64, q: i64, i: SpincLabel) -> Result<SpincLabel> {
    let lens = LensSpace::new(p, q)?;
    if i.modulus != p {
        return Err(Error::LabelOutOfRange {
            label: i.value,
            modulus: p,
        });
    }
    let v = (p as i128 + lens.q as i128 - 1 - i.value as i128).rem_euclid(p as i128);
    Ok(SpincLabel {
        value: v as u64,
        modulus: p,
    })
}

/// Labels whose `c_1` vanishes, i.e. `2i + 1 - p - q ≡ 0 (mod p)`; these are the spin structures.
pub fn spin_labels(p: u64, q: i64) -> Result<Vec<SpincLabel>> {
    let lens = LensSpace::new(p, q)?;
    Ok(lens
        .labels()
        .filter(|l| {
            (2 * l.value as i128 + 1 - p as i128 - lens.q as i128).rem_euclid(p as i128) == 0
        })
        .collect())
}

/// Label of `base + z·PD(μ)` where `base` is any label.
///
/// The orientation of `μ` is fixed so that the element `z` of `H_1` moves the
/// label by `-q·z`. Under this choice the element `k(2p+1)` of
/// `Z/(2p+1)^2` corresponds to the label `i_0 + k(2p+1)` on
/// `S^3_{(2p+1)^2/2p}`, as in the branched cover bookkeeping.
pub fn label_offset(lens: LensSpace, base: SpincLabel, z: &Residue) -> SpincLabel {
    let shift = BigInt::from(lens.q) * z.value();
    SpincLabel::reduce_big(&(BigInt::from(base.value) - shift), lens.p)
}

/// Label of `s' + z·PD(μ)`, with `s'` the label `((p+1)(q-1)/2) mod p`.
pub fn label_from_group_element(p: u64, q: i64, z: &Residue) -> Result<SpincLabel> {
    let lens = LensSpace::new(p, q)?;
    if z.modulus() != &BigInt::from(p) {
        return Err(Error::InvalidInput(format!(
            "group element {z} does not live in Z/{p}"
        )));
    }
    Ok(label_offset(lens, spin_basepoint(lens), z))
}

/// The representative of `i` in `(-p/2, p/2]`.
pub fn symmetric_representative(i: SpincLabel) -> i64 {
    let (v, p) = (i.value as i64, i.modulus as i64);
    if 2 * v > p {
        v - p
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::gcd_u64;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn lab(i: u64, p: u64) -> SpincLabel {
        SpincLabel::new(i, p).unwrap()
    }

    #[test]
    fn d_lens_examples() {
        assert_eq!(d_lens(1, 0, lab(0, 1)).unwrap(), r("0"));
        assert_eq!(d_lens(1, 7, lab(0, 1)).unwrap(), r("0"));
        assert_eq!(d_lens(2, 1, lab(0, 2)).unwrap(), r("1/4"));
        assert_eq!(d_lens(2, 1, lab(1, 2)).unwrap(), r("-1/4"));
        assert_eq!(d_lens(49, 6, lab(27, 49)).unwrap(), r("0"));
        assert_eq!(d_lens(49, 6, lab(48, 49)).unwrap(), r("0"));
        assert_eq!(d_lens(49, 6, lab(0, 49)).unwrap(), r("48/49"));
        // q is reduced mod p first.
        assert_eq!(d_lens(49, 55, lab(0, 49)).unwrap(), r("48/49"));
    }

    #[test]
    fn d_lens_errors() {
        assert!(matches!(
            d_lens(4, 2, lab(0, 4)),
            Err(Error::InvalidLens { .. })
        ));
        assert!(matches!(
            d_lens(5, 2, lab(0, 7)),
            Err(Error::LabelOutOfRange { .. })
        ));
        assert!(SpincLabel::new(5, 5).is_err());
    }

    #[test]
    fn central_label_examples() {
        assert_eq!(central_label(49, 6).unwrap().value(), 27);
        assert_eq!(central_label(3, 1).unwrap().value(), 0);
        assert_eq!(central_label(5, 3).unwrap().value(), 1);
        assert_eq!(central_label(4, 1), Err(Error::NoUniqueSpin(4)));
    }

    #[test]
    fn conjugate_label_examples() {
        assert_eq!(conjugate_label(49, 6, lab(48, 49)).unwrap().value(), 6);
        assert_eq!(conjugate_label(49, 6, lab(27, 49)).unwrap().value(), 27);
        assert_eq!(conjugate_label(2, 1, lab(0, 2)).unwrap().value(), 0);
    }

    #[test]
    fn group_element_labels() {
        let z = |v: u64| Residue::new(v, 49u64).unwrap();
        assert_eq!(label_from_group_element(49, 6, &z(0)).unwrap().value(), 27);
        let mut got: Vec<u64> = (0..7)
            .map(|m| label_from_group_element(49, 6, &z(7 * m)).unwrap().value())
            .collect();
        got.sort();
        assert_eq!(got, vec![6, 13, 20, 27, 34, 41, 48]);
        // Element k·7 lands on i_0 + 7k.
        for k in 0..7 {
            let l = label_from_group_element(49, 6, &z(7 * k)).unwrap();
            assert_eq!(l, SpincLabel::reduce(-22 + 7 * k as i64, 49));
        }
        let base = label_from_group_element(2, 1, &Residue::new(0, 2).unwrap()).unwrap();
        let other = label_from_group_element(2, 1, &Residue::new(1, 2).unwrap()).unwrap();
        assert_ne!(base, other);
    }

    #[test]
    fn symmetric_representatives() {
        assert_eq!(symmetric_representative(lab(27, 49)), -22);
        assert_eq!(symmetric_representative(lab(48, 49)), -1);
        assert_eq!(symmetric_representative(lab(20, 49)), 20);
        assert_eq!(symmetric_representative(lab(2, 4)), 2);
        assert_eq!(symmetric_representative(lab(3, 4)), -1);
    }

    #[test]
    fn spin_labels_even_and_odd() {
        assert_eq!(spin_labels(49, 6).unwrap(), vec![lab(27, 49)]);
        assert_eq!(spin_labels(4, 1).unwrap().len(), 2);
    }

    #[test]
    fn memo_is_observationally_pure() {
        let table = LensTable::new();
        let lens = LensSpace::new(97, 13).unwrap();
        let first: Vec<_> = lens.labels().map(|l| table.d(lens, l).unwrap()).collect();
        assert!(!table.is_empty());
        let again: Vec<_> = lens.labels().map(|l| table.d(lens, l).unwrap()).collect();
        let fresh = LensTable::new();
        let cold: Vec<_> = lens.labels().map(|l| fresh.d(lens, l).unwrap()).collect();
        assert_eq!(first, again);
        assert_eq!(first, cold);
    }

    #[test]
    fn concurrent_use() {
        let table = LensTable::new();
        let lens = LensSpace::new(121, 10).unwrap();
        let serial: Vec<_> = lens
            .labels()
            .map(|l| LensTable::new().d(lens, l).unwrap())
            .collect();
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    let got: Vec<_> = lens.labels().map(|l| table.d(lens, l).unwrap()).collect();
                    assert_eq!(got, serial);
                });
            }
        });
    }

    #[test]
    fn affine_over_group() {
        for (p, q) in [(49u64, 6i64), (25, 7), (12, 5), (9, 2)] {
            let lens = LensSpace::new(p, q).unwrap();
            let labels: Vec<_> = (0..p)
                .map(|z| label_from_group_element(p, q, &Residue::new(z, p).unwrap()).unwrap())
                .collect();
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len() as u64, p, "bijective on Z/{p}");
            // Difference of labels depends only on the difference of elements.
            let idx = |z: u64| labels[(z % p) as usize].value() as i64;
            for a in 0..p {
                for b in 0..p {
                    let diff = (idx(a + b) - idx(b)).rem_euclid(p as i64);
                    let expected = (idx(a) - idx(0)).rem_euclid(p as i64);
                    assert_eq!(diff, expected);
                }
            }
            assert_eq!(lens.p(), p);
        }
    }

    #[test]
    fn central_label_is_spin_and_self_conjugate() {
        for p in (1..200u64).step_by(2) {
            for q in 1..p.max(2) {
                if gcd_u64(p, q) != 1 {
                    continue;
                }
                let c = central_label(p, q as i64).unwrap();
                assert_eq!(
                    (2 * c.value() as i64 + 1 - p as i64 - q as i64).rem_euclid(p as i64),
                    0
                );
                assert_eq!(conjugate_label(p, q as i64, c).unwrap(), c);
            }
        }
    }
}

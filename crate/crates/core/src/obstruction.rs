//! Certificates that linear combinations of the knots `K_p` are not 1-negative.
//!
//! If `K ∈ N_1` and `Y` is its double branched cover, there is a metabolizer
//! `G < H_1(Y)` and a spin^c structure `s_0` (any spin structure will do)
//! with `d(Y, s_0 + ẑ) >= 0` for every `z ∈ G`. [`check_predicate`] tests this
//! condition exhaustively on small groups. [`witness`] is the constructive
//! route: it reduces `#_p n_p K_p` to `J = K_q #_{p≠q} n_p K_p`, forces the
//! `(2q+1)`-primary part of every metabolizer to be `<2q+1>`, and evaluates
//! `d` at the element `(q(2q+1), 0, ...)`, which comes out to `-2`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::brcover::{KpModel, SURROGATE_NOTE};
use crate::error::{Error, Result};
use crate::exactnum::{Rational, Residue};
use crate::lens::{label_offset, spin_labels, SpincLabel};
use crate::metabolizer::{
    enumerate_metabolizers, split_by_primes, LinkingGroup, Subgroup, DEFAULT_ENUMERATION_BOUND,
};
use crate::surgery::{d_surgery, linking_self_pairing, SurgeryDescription};

pub const SCOPE_NOTE: &str =
    "certifies exclusion from N_1 (hence from T_1); membership of K_p in T_0 is taken as given";

/// `#_p n_p K_p`, optionally with an Alexander polynomial one summand `T`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearCombination {
    terms: BTreeMap<u64, i64>,
    alexander_one: bool,
}

impl LinearCombination {
    pub fn new(terms: impl IntoIterator<Item = (u64, i64)>, alexander_one: bool) -> Result<Self> {
        let mut merged: BTreeMap<u64, i64> = BTreeMap::new();
        for (p, n) in terms {
            KpModel::new(p)?;
            *merged.entry(p).or_default() += n;
        }
        merged.retain(|_, n| *n != 0);
        Ok(LinearCombination {
            terms: merged,
            alexander_one,
        })
    }

    /// Parse `"1*K3 + 2*K5 - 1*K8"`. Coefficients default to 1 and the `*` is optional.
    pub fn parse(s: &str, alexander_one: bool) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Self::new([], alexander_one);
        }
        let mut terms = Vec::new();
        let mut rest = compact.as_str();
        let bad = |why: &str| Error::Parse(format!("bad combination {s:?}: {why}"));
        while !rest.is_empty() {
            let (sign, after) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ if terms.is_empty() => (1, rest),
                _ => return Err(bad("expected + or -")),
            };
            let k = after.find(['K', 'k']).ok_or_else(|| bad("missing K"))?;
            let coeff_str = after[..k].trim_end_matches('*');
            let coeff: i64 = if coeff_str.is_empty() {
                1
            } else {
                coeff_str.parse().map_err(|_| bad("bad coefficient"))?
            };
            let tail = &after[k + 1..];
            let end = tail
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(tail.len());
            let p: u64 = tail[..end].parse().map_err(|_| bad("bad knot index"))?;
            terms.push((p, sign * coeff));
            rest = &tail[end..];
        }
        Self::new(terms, alexander_one)
    }

    pub fn terms(&self) -> &BTreeMap<u64, i64> {
        &self.terms
    }

    pub fn alexander_one(&self) -> bool {
        self.alexander_one
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `-K`: every coefficient negated.
    pub fn mirror(&self) -> Self {
        LinearCombination {
            terms: self.terms.iter().map(|(p, n)| (*p, -n)).collect(),
            alexander_one: self.alexander_one,
        }
    }
}

impl fmt::Display for LinearCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() && !self.alexander_one {
            return f.write_str("0");
        }
        let mut first = true;
        if self.alexander_one {
            f.write_str("T")?;
            first = false;
        }
        for (p, n) in &self.terms {
            match (first, *n < 0) {
                (true, false) => write!(f, "{n}*K{p}")?,
                (true, true) => write!(f, "-{}*K{p}", -n)?,
                (false, false) => write!(f, " + {n}*K{p}")?,
                (false, true) => write!(f, " - {}*K{p}", -n)?,
            }
            first = false;
        }
        Ok(())
    }
}

/// The reduced form `J = K_q #_{p≠q} n_p K_p` of a combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub q: u64,
    /// Whether the whole combination was mirrored first (all coefficients were negative).
    pub mirrored: bool,
    /// Copies of `-K_q` added to reach coefficient one.
    pub removed_copies: i64,
    pub combination: LinearCombination,
}

/// Choose `q` with `n_q > 0` (the smallest such) and reduce its coefficient to one.
pub fn normalize(c: &LinearCombination) -> Option<Normalized> {
    if c.is_empty() {
        return None;
    }
    let mirrored = c.terms.values().all(|n| *n < 0);
    let base = if mirrored { c.mirror() } else { c.clone() };
    let (&q, &n_q) = base.terms.iter().find(|(_, n)| **n > 0)?;
    let mut combination = base;
    combination.terms.insert(q, 1);
    Some(Normalized {
        q,
        mirrored,
        removed_copies: n_q - 1,
        combination,
    })
}

/// One connected summand of a double branched cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverSummand {
    /// `S^3_{p/q}(K)`, or its orientation reversal when `mirrored`.
    Surgery {
        surgery: SurgeryDescription,
        mirrored: bool,
    },
    /// The cover of an Alexander polynomial one knot: a homology sphere with
    /// `d = 0` at its unique spin^c structure.
    HomologySphere,
}

impl CoverSummand {
    pub fn sigma(kp: KpModel, mirrored: bool) -> Self {
        CoverSummand::Surgery {
            surgery: kp.surgery(),
            mirrored,
        }
    }

    pub fn group(&self) -> LinkingGroup {
        match self {
            CoverSummand::Surgery { surgery, mirrored } => {
                let lk = linking_self_pairing(surgery);
                let lk = if *mirrored { -lk } else { lk };
                LinkingGroup::cyclic(surgery.p(), lk).expect("valid linking form")
            }
            CoverSummand::HomologySphere => LinkingGroup::trivial(),
        }
    }

    /// `d` at every label, negated for reversed orientation.
    fn d_table(&self) -> Result<Vec<Rational>> {
        match self {
            CoverSummand::Surgery { surgery, mirrored } => surgery
                .labels()
                .map(|l| d_surgery(surgery, l).map(|d| if *mirrored { -d } else { d }))
                .collect(),
            CoverSummand::HomologySphere => Ok(vec![Rational::zero()]),
        }
    }

    fn spin_labels(&self) -> Result<Vec<SpincLabel>> {
        match self {
            CoverSummand::Surgery { surgery, .. } => spin_labels(surgery.p(), surgery.q() as i64),
            CoverSummand::HomologySphere => Ok(vec![SpincLabel::new(0, 1)?]),
        }
    }

    fn name(&self) -> String {
        match self {
            CoverSummand::Surgery {
                surgery,
                mirrored: false,
            } => surgery.to_string(),
            CoverSummand::Surgery {
                surgery,
                mirrored: true,
            } => format!("-{surgery}"),
            CoverSummand::HomologySphere => "Sigma_T".into(),
        }
    }
}

/// Summands of the double branched cover of a combination, in order: the
/// Alexander one summand (if any), then `|n_p|` copies of `±Σ_p` per `p`.
pub fn cover_summands(c: &LinearCombination) -> Result<Vec<CoverSummand>> {
    let mut out = Vec::new();
    if c.alexander_one {
        out.push(CoverSummand::HomologySphere);
    }
    for (&p, &n) in &c.terms {
        let kp = KpModel::new(p)?;
        for _ in 0..n.unsigned_abs() {
            out.push(CoverSummand::sigma(kp, n < 0));
        }
    }
    Ok(out)
}

fn total_group(summands: &[CoverSummand]) -> LinkingGroup {
    summands
        .iter()
        .fold(LinkingGroup::trivial(), |acc, s| acc.direct_sum(&s.group()))
}

/// Result of an exhaustive predicate check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateOutcome {
    /// True iff some metabolizer and spin structure give `d >= 0` on the whole metabolizer.
    pub holds: bool,
    pub metabolizers: usize,
    pub spin_choices: usize,
    /// A metabolizer and spin labels witnessing `holds`.
    pub witness: Option<(Subgroup, Vec<SpincLabel>)>,
}

/// Exhaustively evaluate the `N_1` condition on a connected sum.
pub fn check_predicate(summands: &[CoverSummand], bound: u64) -> Result<PredicateOutcome> {
    let group = total_group(summands);
    let order = group.order().ok_or(Error::TooLarge {
        order: u64::MAX,
        bound,
    })?;
    if order > bound {
        return Err(Error::TooLarge { order, bound });
    }
    let metabolizers = enumerate_metabolizers(&group, bound)?;
    let tables: Vec<Vec<Rational>> = summands
        .iter()
        .map(CoverSummand::d_table)
        .collect::<Result<_>>()?;
    // Summand j occupies coordinate j, except homology spheres which have none.
    let coords: Vec<Option<usize>> = {
        let mut next = 0;
        summands
            .iter()
            .map(|s| match s {
                CoverSummand::HomologySphere => None,
                _ => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let spin_sets: Vec<Vec<SpincLabel>> = summands
        .iter()
        .map(CoverSummand::spin_labels)
        .collect::<Result<_>>()?;
    let mut spin_choices: Vec<Vec<SpincLabel>> = vec![vec![]];
    for set in &spin_sets {
        spin_choices = spin_choices
            .into_iter()
            .flat_map(|prefix| {
                set.iter().map(move |l| {
                    let mut v = prefix.clone();
                    v.push(*l);
                    v
                })
            })
            .collect();
    }

    for m in &metabolizers {
        let elements = m.elements(&group);
        for spins in &spin_choices {
            let all_nonneg = elements.iter().all(|z| {
                let total: Rational = summands
                    .iter()
                    .enumerate()
                    .map(|(j, s)| match (s, coords[j]) {
                        (CoverSummand::Surgery { surgery, .. }, Some(c)) => {
                            let zr = Residue::new(z[c], surgery.p()).expect("p > 0");
                            let label = label_offset(surgery.lens(), spins[j], &zr);
                            tables[j][label.value() as usize].clone()
                        }
                        _ => tables[j][0].clone(),
                    })
                    .sum();
                !total.is_negative()
            });
            if all_nonneg {
                return Ok(PredicateOutcome {
                    holds: true,
                    metabolizers: metabolizers.len(),
                    spin_choices: spin_choices.len(),
                    witness: Some((m.clone(), spins.clone())),
                });
            }
        }
    }
    Ok(PredicateOutcome {
        holds: false,
        metabolizers: metabolizers.len(),
        spin_choices: spin_choices.len(),
        witness: None,
    })
}

/// The spin^c label used on one summand of the witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessLabel {
    pub summand: String,
    pub sign: i64,
    pub label: String,
    pub modulus: String,
    pub kind: String,
    pub d: Rational,
}

/// `sign(n_p) · d(Σ_p, i_k)` for `k = 0..=2p`, for each summand of the original combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummandTable {
    pub summand: String,
    pub coefficient: i64,
    pub d: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub combination: String,
    pub obstructed: bool,
    pub q: Option<u64>,
    pub mirrored: bool,
    pub reduced: Option<String>,
    pub witness_element: Option<String>,
    pub witness_labels: Vec<WitnessLabel>,
    pub d_witness: Option<Rational>,
    pub d_tables: Vec<SummandTable>,
    pub narrative: Vec<String>,
    pub scope: String,
    pub surrogate: String,
}

fn d_tables(c: &LinearCombination) -> Result<Vec<SummandTable>> {
    let mut out = Vec::new();
    if c.alexander_one {
        out.push(SummandTable {
            summand: "Sigma_T".into(),
            coefficient: 1,
            d: vec![Rational::zero()],
        });
    }
    for (&p, &n) in &c.terms {
        let kp = KpModel::new(p)?;
        let d = (0..=2 * p)
            .map(|k| kp.d_sigma(k).map(|v| if n < 0 { -v } else { v }))
            .collect::<Result<_>>()?;
        out.push(SummandTable {
            summand: format!("Sigma_{p}"),
            coefficient: n,
            d,
        });
    }
    Ok(out)
}

/// Build the obstruction certificate for a combination.
pub fn witness(c: &LinearCombination) -> Result<ObstructionReport> {
    let mut report = ObstructionReport {
        combination: c.to_string(),
        obstructed: false,
        q: None,
        mirrored: false,
        reduced: None,
        witness_element: None,
        witness_labels: vec![],
        d_witness: None,
        d_tables: d_tables(c)?,
        narrative: vec![],
        scope: SCOPE_NOTE.into(),
        surrogate: SURROGATE_NOTE.into(),
    };
    let Some(norm) = normalize(c) else {
        report
            .narrative
            .push("no K_p summands: nothing to obstruct".into());
        return Ok(report);
    };
    let j = &norm.combination;
    let q = norm.q;
    let kq = KpModel::new(q)?;
    let t = kq.prime();
    report.q = Some(q);
    report.mirrored = norm.mirrored;
    report.reduced = Some(j.to_string());
    let narr = &mut report.narrative;
    if norm.mirrored {
        narr.push("all coefficients negative: replaced K by its mirror -K".into());
    }
    narr.push(match norm.removed_copies {
        0 => format!("chose q = {q} with n_q = 1; J = K = {j}"),
        r => format!("chose q = {q} with n_q > 0; J = K # -{r}K_{q} = {j}"),
    });

    let summands = cover_summands(j)?;
    let group = total_group(&summands);
    narr.push(format!("H_1(Sigma_J) = {}", group.factor_string()));

    let components = split_by_primes(&group);
    let comp = components
        .iter()
        .find(|comp| comp.prime == t)
        .ok_or_else(|| Error::InvalidInput(format!("no {t}-primary component")))?;
    if comp.group.orders() != [t * t] {
        return Err(Error::InvalidInput(format!(
            "{t}-primary part {} is not a single Z/{}",
            comp.group.factor_string(),
            t * t
        )));
    }
    let forced = enumerate_metabolizers(&comp.group, DEFAULT_ENUMERATION_BOUND)?;
    let element = vec![q * t];
    if forced.len() != 1 || !forced[0].contains(&comp.group, &element) {
        return Err(Error::InvalidInput(format!(
            "metabolizer of Z/{} is not forced",
            t * t
        )));
    }
    narr.push(format!(
        "the {t}-primary part Z/{} has the unique metabolizer {}, so every metabolizer M of H_1(Sigma_J) contains ({}, 0, ...)",
        t * t,
        forced[0].describe(),
        q * t
    ));
    report.witness_element = Some(format!(
        "{} in Z/{} (k_q = {q}), zero elsewhere",
        q * t,
        t * t
    ));

    let mut total = Rational::zero();
    for s in &summands {
        let entry = match s {
            CoverSummand::Surgery { surgery, mirrored } => {
                let p = surgery.q() / 2;
                let kp = KpModel::new(p)?;
                let sign = if *mirrored { -1 } else { 1 };
                let (label, kind, d) = if p == q && !*mirrored {
                    let z = kq.group_element(q)?;
                    let label = label_offset(surgery.lens(), kq.spin_label(), &z);
                    let expected = kq.metabolizer_labels()[q as usize].label;
                    assert_eq!(label, expected, "witness label is i_q");
                    (
                        label,
                        format!("s_0 + PD({}) = i_{q}", q * t),
                        kq.d_sigma(q)?,
                    )
                } else {
                    (kp.spin_label(), "s_0 = i_0".to_string(), kp.d_sigma(0)?)
                };
                let d = if *mirrored { -d } else { d };
                WitnessLabel {
                    summand: s.name(),
                    sign,
                    label: label.to_string(),
                    modulus: surgery.p().to_string(),
                    kind,
                    d,
                }
            }
            CoverSummand::HomologySphere => WitnessLabel {
                summand: s.name(),
                sign: 1,
                label: "0".into(),
                modulus: "1".into(),
                kind: "s_0 (homology sphere)".into(),
                d: Rational::zero(),
            },
        };
        total += &entry.d;
        report.witness_labels.push(entry);
    }
    narr.push(format!(
        "d(Sigma_J, s) = d(Sigma_{q}, i_{q}) + sum of n_p d(Sigma_p, i_0) = {total}"
    ));
    report.obstructed = total.is_negative();
    narr.push(if report.obstructed {
        "d < 0 on an element of every metabolizer: J is not in N_1, so K is not in T_1".into()
    } else {
        "witness value is not negative: inconclusive".into()
    });
    report.d_witness = Some(total);
    Ok(report)
}

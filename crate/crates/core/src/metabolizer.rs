//! Finite abelian groups with `Q/Z`-valued linking forms, and their metabolizers.
//!
//! A metabolizer is a subgroup of square-root order on which the linking
//! form vanishes. Groups are direct sums of cyclic factors `Z/n_a` with the
//! form given on the standard generators. For `S^3_{p/q}(K)` the convention
//! is `lk(μ, μ) = -q/p`; every conclusion drawn from metabolizers of
//! `Z/t^2` holds for any unit multiple of that value.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exactnum::{exact_sqrt, factorize, is_prime, Rational};

/// Default cap on the number of group elements scanned by brute-force enumeration.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

/// A direct sum of cyclic groups with a symmetric bilinear linking form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingGroup {
    orders: Vec<u64>,
    /// Form on generator pairs, each entry reduced into `[0, 1)`.
    form: Vec<Vec<Rational>>,
}

impl LinkingGroup {
    pub fn new(orders: Vec<u64>, form: Vec<Vec<Rational>>) -> Result<Self> {
        let n = orders.len();
        if orders.contains(&0) {
            return Err(Error::InvalidGroup("cyclic factor of order 0".into()));
        }
        if form.len() != n || form.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup(format!(
                "form must be a {n}x{n} matrix"
            )));
        }
        let form: Vec<Vec<Rational>> = form
            .iter()
            .map(|row| row.iter().map(Rational::fract_mod_one).collect())
            .collect();
        #[allow(clippy::needless_range_loop)]
        for a in 0..n {
            for b in 0..n {
                if form[a][b] != form[b][a] {
                    return Err(Error::InvalidGroup(format!(
                        "form is not symmetric at ({a},{b})"
                    )));
                }
                // Well defined on Z/n_a: n_a · lk(e_a, e_b) ∈ Z.
                let scaled = Rational::from_integer(orders[a]) * form[a][b].clone();
                if !scaled.is_integer() {
                    return Err(Error::InvalidGroup(format!(
                        "lk(e{a}, e{b}) = {} is not killed by the order {}",
                        form[a][b], orders[a]
                    )));
                }
            }
        }
        Ok(LinkingGroup { orders, form })
    }

    pub fn cyclic(order: u64, self_pairing: Rational) -> Result<Self> {
        Self::new(vec![order], vec![vec![self_pairing]])
    }

    pub fn trivial() -> Self {
        LinkingGroup {
            orders: vec![],
            form: vec![],
        }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn form(&self) -> &[Vec<Rational>] {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// `|G|`, or `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    pub fn direct_sum(&self, other: &LinkingGroup) -> LinkingGroup {
        let (n, m) = (self.rank(), other.rank());
        let mut form = vec![vec![Rational::zero(); n + m]; n + m];
        for (a, row) in self.form.iter().enumerate() {
            form[a][..n].clone_from_slice(row);
        }
        for (a, row) in other.form.iter().enumerate() {
            form[n + a][n..].clone_from_slice(row);
        }
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        LinkingGroup { orders, form }
    }

    /// `lk(x, y) mod 1` for coordinate vectors.
    pub fn pairing(&self, x: &[u64], y: &[u64]) -> Rational {
        let mut acc = Rational::zero();
        for (a, xa) in x.iter().enumerate() {
            if *xa == 0 {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if *yb == 0 || self.form[a][b].is_zero() {
                    continue;
                }
                acc += &(Rational::from_integer(xa * yb) * self.form[a][b].clone());
            }
        }
        acc.fract_mod_one()
    }

    fn check_element(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, group has rank {}",
                x.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// `"49+49+121"`; the trivial group renders as `"1"`.
    pub fn factor_string(&self) -> String {
        if self.orders.is_empty() {
            return "1".into();
        }
        self.orders
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Rows separated by `;`, entries by `,`.
    pub fn form_string(&self) -> String {
        self.form
            .iter()
            .map(|row| {
                row.iter()
                    .map(Rational::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(factors: &str, form: &str) -> Result<Self> {
        let orders: Vec<u64> = factors
            .split('+')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad factor {t:?}")))
            })
            .collect::<Result<_>>()?;
        let form: Vec<Vec<Rational>> = form
            .split(';')
            .filter(|r| !r.trim().is_empty())
            .map(|row| {
                row.split(',')
                    .map(Rational::from_str)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let (orders, form) = if orders == [1] && form.is_empty() {
            (vec![], vec![])
        } else {
            (orders, form)
        };
        LinkingGroup::new(orders, form)
    }
}

impl fmt::Display for LinkingGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.factor_string(), self.form_string())
    }
}

/// A subgroup, stored by its generators and its full (sorted, encoded) element set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    generators: Vec<Vec<u64>>,
    elements: Vec<u64>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// The subgroup generated by `generators`; needs `|G|` within the enumeration bound.
    pub fn generated(group: &LinkingGroup, generators: Vec<Vec<u64>>) -> Result<Self> {
        let codec = Codec::new(group, DEFAULT_ENUMERATION_BOUND)?;
        let mut generators = generators;
        for g in &mut generators {
            group.check_element(g)?;
            for (x, n) in g.iter_mut().zip(&group.orders) {
                *x %= n;
            }
        }
        let mut elements = vec![0u64];
        for g in &generators {
            elements = codec.extend(&elements, codec.encode(g));
        }
        Ok(Subgroup {
            generators,
            elements,
        })
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// All elements as coordinate vectors, in encoded order.
    pub fn elements(&self, group: &LinkingGroup) -> Vec<Vec<u64>> {
        let codec = Codec::new(group, u64::MAX).expect("order fits");
        self.elements.iter().map(|&e| codec.decode(e)).collect()
    }

    pub fn contains(&self, group: &LinkingGroup, x: &[u64]) -> bool {
        let codec = Codec::new(group, u64::MAX).expect("order fits");
        let reduced: Vec<u64> = x.iter().zip(&group.orders).map(|(v, n)| v % n).collect();
        self.elements.binary_search(&codec.encode(&reduced)).is_ok()
    }

    pub fn describe(&self) -> String {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| {
                format!(
                    "({})",
                    g.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
                )
            })
            .collect();
        format!("<{}>", gens.join(", "))
    }
}

/// Mixed-radix encoding of group elements as integers in `[0, |G|)`, plus an
/// integer-valued copy of the form: `lk(x,y) = numer(x,y) / denom mod 1`.
struct Codec {
    orders: Vec<u64>,
    denom: u64,
    numers: Vec<Vec<u64>>,
}

impl Codec {
    fn new(group: &LinkingGroup, bound: u64) -> Result<Self> {
        let order = group.order().ok_or(Error::TooLarge {
            order: u64::MAX,
            bound,
        })?;
        if order > bound {
            return Err(Error::TooLarge { order, bound });
        }
        let mut denom = BigInt::from(1);
        for row in &group.form {
            for v in row {
                denom = denom.lcm(v.denom());
            }
        }
        let denom_u = denom
            .to_u64()
            .ok_or_else(|| Error::InvalidGroup("form denominator overflow".into()))?;
        let numers = group
            .form
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        (v.numer() * (&denom / v.denom()))
                            .to_u64()
                            .expect("fits below denom")
                    })
                    .collect()
            })
            .collect();
        Ok(Codec {
            orders: group.orders.clone(),
            denom: denom_u,
            numers,
        })
    }

    fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    fn encode(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(0, |acc, (v, n)| acc * n + v)
    }

    fn decode(&self, mut e: u64) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        for (slot, n) in out.iter_mut().zip(&self.orders).rev() {
            *slot = e % n;
            e /= n;
        }
        out
    }

    fn add(&self, mut a: u64, mut b: u64) -> u64 {
        let (mut out, mut place) = (0, 1);
        for n in self.orders.iter().rev() {
            out += (a % n + b % n) % n * place;
            place *= n;
            a /= n;
            b /= n;
        }
        out
    }

    fn pairing_is_zero(&self, a: u64, b: u64) -> bool {
        let (x, y) = (self.decode(a), self.decode(b));
        let m = self.denom as u128;
        let mut acc: u128 = 0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                let term =
                    (*xi as u128 % m) * (*yj as u128 % m) % m * self.numers[i][j] as u128 % m;
                acc = (acc + term) % m;
            }
        }
        acc == 0
    }

    /// Order of `g` modulo the subgroup `members`.
    fn quotient_order(&self, members: &HashSet<u64>, g: u64) -> u64 {
        let (mut k, mut multiple) = (1, g);
        while !members.contains(&multiple) {
            multiple = self.add(multiple, g);
            k += 1;
        }
        k
    }

    /// Sorted elements of `<S, g>` given the sorted elements of `S`.
    fn extend(&self, subgroup: &[u64], g: u64) -> Vec<u64> {
        let members: HashSet<u64> = subgroup.iter().copied().collect();
        let k = self.quotient_order(&members, g);
        self.extend_by(subgroup, g, k)
    }

    /// As [`Codec::extend`], with the quotient order `k` of `g` already known.
    fn extend_by(&self, subgroup: &[u64], g: u64, k: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(subgroup.len() * k as usize);
        out.extend_from_slice(subgroup);
        let mut multiple = g;
        for _ in 1..k {
            out.extend(subgroup.iter().map(|&s| self.add(s, multiple)));
            multiple = self.add(multiple, g);
        }
        out.sort_unstable();
        out
    }
}

fn require_square(group: &LinkingGroup) -> Result<u64> {
    let order = group.order().ok_or(Error::TooLarge {
        order: u64::MAX,
        bound: DEFAULT_ENUMERATION_BOUND,
    })?;
    exact_sqrt(order).ok_or(Error::NonSquareOrder(order))
}

/// Whether `subgroup` is a metabolizer of `group`.
pub fn is_metabolizer(group: &LinkingGroup, subgroup: &Subgroup) -> Result<bool> {
    let root = require_square(group)?;
    if subgroup.order() != root {
        return Ok(false);
    }
    let gens = &subgroup.generators;
    for (i, x) in gens.iter().enumerate() {
        for y in &gens[i..] {
            if !group.pairing(x, y).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every metabolizer of `group`, by exhaustive search over isotropic subgroups.
pub fn enumerate_metabolizers(group: &LinkingGroup, bound: u64) -> Result<Vec<Subgroup>> {
    let root = require_square(group)?;
    let codec = Codec::new(group, bound)?;
    let isotropic: Vec<u64> = (1..codec.size())
        .filter(|&e| codec.pairing_is_zero(e, e))
        .collect();

    let trivial = Subgroup {
        generators: vec![],
        elements: vec![0],
    };
    let mut found = Vec::new();
    if root == 1 {
        found.push(trivial);
        return Ok(found);
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut frontier = vec![trivial];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            let gen_codes: Vec<u64> = s.generators.iter().map(|g| codec.encode(g)).collect();
            let members: HashSet<u64> = s.elements.iter().copied().collect();
            // Every isotropic subgroup is reached through a chain of prime-index
            // steps, and a prime-index child is generated by any of its new elements.
            let mut covered: HashSet<u64> = HashSet::new();
            for &g in &isotropic {
                if members.contains(&g)
                    || covered.contains(&g)
                    || !gen_codes.iter().all(|&h| codec.pairing_is_zero(g, h))
                {
                    continue;
                }
                let k = codec.quotient_order(&members, g);
                if !is_prime(k) {
                    continue;
                }
                let elements = codec.extend_by(&s.elements, g, k);
                covered.extend(elements.iter().copied());
                let size = elements.len() as u64;
                if root % size != 0 || !seen.insert(elements.clone()) {
                    continue;
                }
                let mut generators = s.generators.clone();
                generators.push(codec.decode(g));
                let t = Subgroup {
                    generators,
                    elements,
                };
                if size == root {
                    found.push(t);
                } else {
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    found.sort_by(|a, b| a.elements.cmp(&b.elements));
    Ok(found)
}

/// The `r`-primary part of a linking group and how it sits inside the whole group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimaryComponent {
    pub prime: u64,
    pub group: LinkingGroup,
    /// For each factor of `group`: the factor of the ambient group it lives in
    /// and the multiplier sending its generator there.
    pub embedding: Vec<(usize, u64)>,
}

impl PrimaryComponent {
    /// Image of a component element in the ambient group's coordinates.
    pub fn embed(&self, ambient: &LinkingGroup, x: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; ambient.rank()];
        for ((factor, mult), v) in self.embedding.iter().zip(x) {
            let n = ambient.orders[*factor];
            out[*factor] = ((out[*factor] as u128 + *v as u128 * *mult as u128) % n as u128) as u64;
        }
        out
    }
}

/// Split a linking group into its primary components.
///
/// Components for distinct primes are orthogonal, so every metabolizer of
/// the group is the direct sum of metabolizers of the components.
pub fn split_by_primes(group: &LinkingGroup) -> Vec<PrimaryComponent> {
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    for &n in &group.orders {
        primes.extend(factorize(n).into_iter().map(|(r, _)| r));
    }
    primes
        .into_iter()
        .map(|r| {
            let mut embedding = Vec::new();
            let mut orders = Vec::new();
            for (a, &n) in group.orders.iter().enumerate() {
                let mut power = 1u64;
                while n % (power * r) == 0 {
                    power *= r;
                }
                if power > 1 {
                    embedding.push((a, n / power));
                    orders.push(power);
                }
            }
            let form = embedding
                .iter()
                .map(|&(a, ma)| {
                    embedding
                        .iter()
                        .map(|&(b, mb)| {
                            (Rational::from_integer(ma)
                                * Rational::from_integer(mb)
                                * group.form[a][b].clone())
                            .fract_mod_one()
                        })
                        .collect()
                })
                .collect();
            let component = LinkingGroup::new(orders, form).expect("restriction of a valid form");
            PrimaryComponent {
                prime: r,
                group: component,
                embedding,
            }
        })
        .collect()
}

/// Enumerate metabolizers component by component and recombine them.
pub fn enumerate_via_split(group: &LinkingGroup, bound: u64) -> Result<Vec<Subgroup>> {
    require_square(group)?;
    Codec::new(group, bound)?;
    let mut combos: Vec<Vec<Vec<u64>>> = vec![vec![]];
    for comp in split_by_primes(group) {
        let local = enumerate_metabolizers(&comp.group, bound)?;
        let mut next = Vec::new();
        for gens in &combos {
            for m in &local {
                let mut g = gens.clone();
                g.extend(m.generators.iter().map(|x| comp.embed(group, x)));
                next.push(g);
            }
        }
        combos = next;
    }
    let mut out: Vec<Subgroup> = combos
        .into_iter()
        .map(|g| Subgroup::generated(group, g))
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.elements.cmp(&b.elements));
    Ok(out)
}

//! `Z ⊕ Z`-filtered chain complexes over `F_2[U, U^-1]`.
//!
//! A complex is a list of generators, each with filtration levels `(i, j)`
//! and a grading, plus an `F_2` incidence matrix. The U-power of an arrow
//! `x -> y` is not stored: it is forced by `gr(U^n y) = gr(x) - 1`, that is
//! `n = (gr(y) - gr(x) + 1) / 2`, and `U^n y` sits at `(i_y - n, j_y - n)`.
//!
//! Plain-text format, one record per line, `#` starts a comment:
//!
//! ```text
//! gen NAME I J GRADING
//! arrow SOURCE TARGET UPOWER
//! ```
//!
//! The U-power in an `arrow` line is checked against the gradings on parse.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest complex [`isomorphic_filtered`] will search.
pub const ISOMORPHISM_SEARCH_BOUND: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub i: i64,
    pub j: i64,
    pub gr: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, i: i64, j: i64, gr: i64) -> Self {
        Generator {
            name: name.into(),
            i,
            j,
            gr,
        }
    }

    /// Invariant under `x -> U^k x`, so generators can only be matched within a key.
    fn key(&self) -> (i64, i64) {
        (self.i - self.j, self.gr - 2 * self.i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn get(&self, k: usize) -> bool {
        self.0[k / 64] >> (k % 64) & 1 == 1
    }

    fn toggle(&mut self, k: usize) {
        self.0[k / 64] ^= 1 << (k % 64);
    }

    fn xor(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn xor_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| w * 64 + b)
        })
    }
}

/// A free, finitely generated bifiltered complex over `F_2[U, U^-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BifilteredComplex {
    generators: Vec<Generator>,
    /// `diff[s]` holds the targets of arrows out of generator `s`.
    diff: Vec<Bits>,
}

/// `y <- y + U^c x`, with `c` fixed by the gradings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub x: usize,
    pub y: usize,
}

impl BifilteredComplex {
    /// Build and validate a complex from generators and `(source, target)` arrows.
    pub fn new(generators: Vec<Generator>, arrows: &[(usize, usize)]) -> Result<Self> {
        let n = generators.len();
        let mut diff = vec![Bits::new(n); n];
        for &(s, t) in arrows {
            if s >= n || t >= n {
                return Err(Error::InvalidComplex(format!(
                    "arrow {s} -> {t} out of range"
                )));
            }
            if diff[s].get(t) {
                return Err(Error::InvalidComplex(format!("duplicate arrow {s} -> {t}")));
            }
            diff[s].toggle(t);
        }
        let c = BifilteredComplex { generators, diff };
        c.validate()?;
        Ok(c)
    }

    /// One generator at `(0, 0)` in grading 0.
    pub fn unknot() -> Self {
        BifilteredComplex::new(vec![Generator::new("u", 0, 0, 0)], &[]).expect("valid")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn has_arrow(&self, s: usize, t: usize) -> bool {
        self.diff[s].get(t)
    }

    /// Arrows as `(source, target, U-power)`, sorted.
    pub fn arrows(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for (s, row) in self.diff.iter().enumerate() {
            for t in row.iter() {
                out.push((s, t, self.u_power(s, t).expect("validated")));
            }
        }
        out
    }

    pub fn arrow_count(&self) -> usize {
        self.diff.iter().map(Bits::count).sum()
    }

    fn u_power(&self, s: usize, t: usize) -> Option<i64> {
        let d = self.generators[t].gr - self.generators[s].gr + 1;
        (d % 2 == 0).then_some(d / 2)
    }

    /// Check that `∂² = 0`, that arrows drop grading by one and respect both filtrations.
    pub fn validate(&self) -> Result<()> {
        for (s, row) in self.diff.iter().enumerate() {
            let src = &self.generators[s];
            for t in row.iter() {
                let tgt = &self.generators[t];
                let n = self.u_power(s, t).ok_or_else(|| {
                    Error::InvalidComplex(format!("{} -> {}: grading parity", src.name, tgt.name))
                })?;
                if tgt.i - n > src.i || tgt.j - n > src.j {
                    return Err(Error::InvalidComplex(format!(
                        "{} -> {}: arrow raises filtration",
                        src.name, tgt.name
                    )));
                }
            }
            let mut sq = Bits::new(self.len());
            for t in row.iter() {
                sq.xor(&self.diff[t]);
            }
            if !sq.is_empty() {
                return Err(Error::InvalidComplex(format!("d^2 != 0 on {}", src.name)));
            }
        }
        Ok(())
    }

    /// Rank over `F_2[U, U^-1]` of the homology.
    pub fn homology_rank(&self) -> usize {
        self.len() - 2 * f2_rank(&self.diff, self.len())
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_rank() == 0
    }

    pub fn direct_sum(&self, other: &BifilteredComplex) -> BifilteredComplex {
        let n = self.len() + other.len();
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        let mut diff = Vec::with_capacity(n);
        for row in &self.diff {
            let mut b = Bits::new(n);
            row.iter().for_each(|t| b.toggle(t));
            diff.push(b);
        }
        for row in &other.diff {
            let mut b = Bits::new(n);
            row.iter().for_each(|t| b.toggle(t + self.len()));
            diff.push(b);
        }
        BifilteredComplex { generators, diff }
    }

    /// The subcomplex spanned by `indices`, which must be closed under `∂` in both directions.
    fn restrict(&self, indices: &[usize]) -> BifilteredComplex {
        let pos: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let generators = indices
            .iter()
            .map(|&g| self.generators[g].clone())
            .collect();
        let diff = indices
            .iter()
            .map(|&g| {
                let mut b = Bits::new(indices.len());
                self.diff[g].iter().for_each(|t| b.toggle(pos[&t]));
                b
            })
            .collect();
        BifilteredComplex { generators, diff }
    }

    /// Whether `y <- y + U^c x` is a filtered, homogeneous change of basis.
    pub fn move_is_valid(&self, m: Move) -> bool {
        if m.x == m.y || m.x >= self.len() || m.y >= self.len() {
            return false;
        }
        let (x, y) = (&self.generators[m.x], &self.generators[m.y]);
        let d = x.gr - y.gr;
        if d % 2 != 0 {
            return false;
        }
        let c = d / 2;
        x.i - c <= y.i && x.j - c <= y.j
    }

    /// Arrow count after applying `m`, without applying it.
    fn arrows_after(&self, m: Move) -> usize {
        let mut total = self.arrow_count();
        total = total - self.diff[m.y].count() + self.diff[m.y].xor_count(&self.diff[m.x]);
        for (s, row) in self.diff.iter().enumerate() {
            if s == m.y || !row.get(m.y) {
                continue;
            }
            if row.get(m.x) {
                total -= 1;
            } else {
                total += 1;
            }
        }
        // The new column of y is col_y + col_x; it can contain y only through x -> y, which gradings forbid.
        total
    }

    /// Apply `y <- y + U^c x`. Applying the same move twice restores the complex.
    pub fn apply_move(&mut self, m: Move) -> Result<()> {
        if !self.move_is_valid(m) {
            return Err(Error::InvalidComplex(format!("invalid basis change {m:?}")));
        }
        let col_x = self.diff[m.x].clone();
        self.diff[m.y].xor(&col_x);
        for row in &mut self.diff {
            if row.get(m.y) {
                row.toggle(m.x);
            }
        }
        Ok(())
    }

    /// Connected components of the arrow graph, each sorted, ordered by smallest member.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for (s, row) in self.diff.iter().enumerate() {
            for t in row.iter() {
                let (a, b) = (find(&mut parent, s), find(&mut parent, t));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for g in 0..n {
            let r = find(&mut parent, g);
            groups.entry(r).or_default().push(g);
        }
        groups.into_values().collect()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut generators = Vec::new();
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        let mut arrows = Vec::new();
        let mut powers = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| Error::Parse(format!("line {}: {why}: {raw:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad("expected an integer"));
            match fields.as_slice() {
                ["gen", name, i, j, gr] => {
                    if names.insert(name.to_string(), generators.len()).is_some() {
                        return Err(bad("duplicate generator"));
                    }
                    generators.push(Generator::new(*name, int(i)?, int(j)?, int(gr)?));
                }
                ["arrow", s, t, n] => {
                    let s = *names.get(*s).ok_or_else(|| bad("unknown source"))?;
                    let t = *names.get(*t).ok_or_else(|| bad("unknown target"))?;
                    arrows.push((s, t));
                    powers.push((int(n)?, lineno + 1));
                }
                _ => return Err(bad("expected `gen NAME I J GR` or `arrow SRC TGT UPOWER`")),
            }
        }
        let c = BifilteredComplex::new(generators, &arrows)?;
        for (&(s, t), &(n, lineno)) in arrows.iter().zip(&powers) {
            if c.u_power(s, t) != Some(n) {
                return Err(Error::Parse(format!(
                    "line {lineno}: U-power {n} does not match gradings"
                )));
            }
        }
        Ok(c)
    }
}

impl fmt::Display for BifilteredComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.generators {
            writeln!(f, "gen {} {} {} {}", g.name, g.i, g.j, g.gr)?;
        }
        for (s, t, n) in self.arrows() {
            writeln!(
                f,
                "arrow {} {} {n}",
                self.generators[s].name, self.generators[t].name
            )?;
        }
        Ok(())
    }
}

fn f2_rank(rows: &[Bits], n: usize) -> usize {
    let mut rows: Vec<Bits> = rows.iter().filter(|r| !r.is_empty()).cloned().collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor(&p);
            }
        }
        rank += 1;
    }
    rank
}

/// The staircase complex of `T(2, 2n+1)`.
///
/// Generators `x_0, ..., x_{2n}` sit at `(0,n), (1,n), (1,n-1), ..., (n,0)`;
/// each odd `x_{2m+1}` is a corner with arrows to `x_{2m}` and `x_{2m+2}`.
/// Even generators have grading 0 and odd ones grading 1.
pub fn staircase(n: u32) -> Result<BifilteredComplex> {
    if n == 0 {
        return Err(Error::InvalidInput("staircase needs n >= 1".into()));
    }
    let n = n as i64;
    let mut gens = Vec::new();
    for k in 0..=2 * n {
        let m = k / 2;
        let g = if k % 2 == 0 {
            Generator::new(format!("x{k}"), m, n - m, 0)
        } else {
            Generator::new(format!("x{k}"), m + 1, n - m, 1)
        };
        gens.push(g);
    }
    let arrows: Vec<(usize, usize)> = (0..n as usize)
        .flat_map(|m| [(2 * m + 1, 2 * m), (2 * m + 1, 2 * m + 2)])
        .collect();
    BifilteredComplex::new(gens, &arrows)
}

/// The acyclic square `a -> b, a -> c, b -> d, c -> d` with `a` at `(i, j)` in grading `gr`.
pub fn acyclic_box(i: i64, j: i64, gr: i64) -> BifilteredComplex {
    let gens = vec![
        Generator::new("a", i, j, gr),
        Generator::new("b", i - 1, j, gr - 1),
        Generator::new("c", i, j - 1, gr - 1),
        Generator::new("d", i - 1, j - 1, gr - 2),
    ];
    BifilteredComplex::new(gens, &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("valid box")
}

/// Tensor product with the Leibniz differential. Generator `(a, b)` is named `a*b`.
pub fn tensor(a: &BifilteredComplex, b: &BifilteredComplex) -> BifilteredComplex {
    let (na, nb) = (a.len(), b.len());
    let idx = |x: usize, y: usize| x * nb + y;
    let mut gens = Vec::with_capacity(na * nb);
    for ga in &a.generators {
        for gb in &b.generators {
            gens.push(Generator::new(
                format!("{}*{}", ga.name, gb.name),
                ga.i + gb.i,
                ga.j + gb.j,
                ga.gr + gb.gr,
            ));
        }
    }
    let mut diff = vec![Bits::new(na * nb); na * nb];
    for x in 0..na {
        for y in 0..nb {
            let row = &mut diff[idx(x, y)];
            a.diff[x].iter().for_each(|t| row.toggle(idx(t, y)));
            b.diff[y].iter().for_each(|t| row.toggle(idx(x, t)));
        }
    }
    let c = BifilteredComplex {
        generators: gens,
        diff,
    };
    debug_assert!(c.validate().is_ok());
    c
}

/// The moves applied during a split, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasisChange {
    pub moves: Vec<Move>,
}

impl BasisChange {
    /// Undo every move, newest first. Each move is its own inverse.
    pub fn conjugate_back(&self, c: &BifilteredComplex) -> Result<BifilteredComplex> {
        let mut out = c.clone();
        for m in self.moves.iter().rev() {
            out.apply_move(*m)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct Split {
    pub components: Vec<BifilteredComplex>,
    /// Indices of each component's generators in the original complex.
    pub indices: Vec<Vec<usize>>,
    pub basis_change: BasisChange,
    /// The original complex written in the new basis.
    pub reduced: BifilteredComplex,
}

impl Split {
    /// Reassemble the components in their original positions.
    pub fn direct_sum(&self) -> BifilteredComplex {
        let n = self.reduced.len();
        let mut generators = self.reduced.generators.clone();
        let mut diff = vec![Bits::new(n); n];
        for (comp, idx) in self.components.iter().zip(&self.indices) {
            for (k, &g) in idx.iter().enumerate() {
                generators[g] = comp.generators[k].clone();
                comp.diff[k].iter().for_each(|t| diff[g].toggle(idx[t]));
            }
        }
        BifilteredComplex { generators, diff }
    }

    /// The direct sum of the components, conjugated back to the original basis.
    pub fn recombine(&self) -> Result<BifilteredComplex> {
        self.basis_change.conjugate_back(&self.direct_sum())
    }
}

/// Split with no observer.
pub fn split_summands(c: &BifilteredComplex) -> Split {
    split_summands_observed(c, &mut |_, _| {})
}

/// Greedy filtered reduction: repeatedly apply the valid move that removes
/// the most arrows, then split the arrow graph into connected components.
/// The invariants are re-checked after every move, and `observer` sees each
/// move together with the complex after it. Generators keep their names,
/// so in the result `y` names the basis element `y + U^c x`.
pub fn split_summands_observed(
    c: &BifilteredComplex,
    observer: &mut dyn FnMut(&BifilteredComplex, Move),
) -> Split {
    let mut cur = c.clone();
    let mut change = BasisChange::default();
    loop {
        let current = cur.arrow_count();
        let mut best: Option<(usize, Move)> = None;
        for y in 0..cur.len() {
            for x in 0..cur.len() {
                let m = Move { x, y };
                if !cur.move_is_valid(m) {
                    continue;
                }
                let after = cur.arrows_after(m);
                if after < current && best.is_none_or(|(b, _)| after < b) {
                    best = Some((after, m));
                }
            }
        }
        let Some((_, m)) = best else { break };
        cur.apply_move(m).expect("move checked valid");
        cur.validate()
            .expect("filtered basis change preserves the complex invariants");
        change.moves.push(m);
        observer(&cur, m);
    }
    let indices = cur.components();
    let components = indices.iter().map(|idx| cur.restrict(idx)).collect();
    Split {
        components,
        indices,
        basis_change: change,
        reduced: cur,
    }
}

/// Whether some U-equivariant, bifiltered, grading-preserving isomorphism
/// maps the generators of `a` to U-translates of the generators of `b`.
pub fn isomorphic_filtered(a: &BifilteredComplex, b: &BifilteredComplex) -> Result<bool> {
    for c in [a, b] {
        if c.len() > ISOMORPHISM_SEARCH_BOUND {
            return Err(Error::Inconclusive(format!(
                "{} generators exceeds the search bound {ISOMORPHISM_SEARCH_BOUND}",
                c.len()
            )));
        }
    }
    if a.len() != b.len() || a.arrow_count() != b.arrow_count() {
        return Ok(false);
    }
    let signature = |c: &BifilteredComplex, g: usize| {
        let out = c.diff[g].count();
        let inn = c.diff.iter().filter(|r| r.get(g)).count();
        (c.generators[g].key(), out, inn)
    };
    let mut sa: Vec<_> = (0..a.len()).map(|g| signature(a, g)).collect();
    let mut sb: Vec<_> = (0..b.len()).map(|g| signature(b, g)).collect();
    let (ka, kb) = (sa.clone(), sb.clone());
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(false);
    }

    fn extend(
        a: &BifilteredComplex,
        b: &BifilteredComplex,
        ka: &[((i64, i64), usize, usize)],
        kb: &[((i64, i64), usize, usize)],
        map: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let x = map.len();
        if x == a.len() {
            return true;
        }
        for y in 0..b.len() {
            if used[y] || ka[x] != kb[y] {
                continue;
            }
            let consistent = (0..x).all(|p| {
                a.has_arrow(x, p) == b.has_arrow(y, map[p])
                    && a.has_arrow(p, x) == b.has_arrow(map[p], y)
            });
            if !consistent {
                continue;
            }
            used[y] = true;
            map.push(y);
            if extend(a, b, ka, kb, map, used) {
                return true;
            }
            map.pop();
            used[y] = false;
        }
        false
    }

    let mut used = vec![false; b.len()];
    Ok(extend(a, b, &ka, &kb, &mut Vec::new(), &mut used))
}

/// Split both sides, drop acyclic summands, and match what remains summand by summand.
pub fn equal_up_to_acyclic(a: &BifilteredComplex, b: &BifilteredComplex) -> Result<bool> {
    let essential = |c: &BifilteredComplex| -> Vec<BifilteredComplex> {
        split_summands(c)
            .components
            .into_iter()
            .filter(|s| !s.is_acyclic())
            .collect()
    };
    let (ea, eb) = (essential(a), essential(b));
    if ea.len() != eb.len() {
        return Ok(false);
    }
    let mut used = vec![false; eb.len()];
    for s in &ea {
        let mut found = false;
        for (k, t) in eb.iter().enumerate() {
            if !used[k] && isomorphic_filtered(s, t)? {
                used[k] = true;
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Kneser hypergraphs `K^r(F)`: hyperedge enumeration, exact chromatic
//! number, the block colouring that attains the upper bound, generators of
//! colourings with too few colours, and the small colouring transformations
//! between related Kneser problems.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{Family, SizeCap, Subset};

/// A colouring with colours `1..=m`, defined on every subset of `[n]`.
/// Only its values on family members carry meaning.
#[derive(Debug, Clone)]
pub struct Coloring {
    n: usize,
    m: usize,
    rule: Rule,
}

#[derive(Debug, Clone)]
enum Rule {
    Table {
        colors: HashMap<u64, usize>,
        fallback: usize,
    },
    /// Colour of the first block the set meets, else one past the blocks;
    /// then mapped through `relabel` (indexed by that raw colour minus one).
    Blocks {
        blocks: Vec<u64>,
        relabel: Vec<usize>,
    },
    /// Sets holding `element` get the top colour; the rest defer to `base`.
    Pinned { base: Box<Coloring>, element: usize },
}

impl Coloring {
    /// Every set gets colour 1.
    pub fn constant(n: usize) -> Self {
        Coloring {
            n,
            m: 1,
            rule: Rule::Table {
                colors: HashMap::new(),
                fallback: 1,
            },
        }
    }

    /// A table colouring; sets missing from the table get colour 1.
    pub fn from_table<I>(n: usize, m: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, usize)>,
    {
        if m < 1 {
            return Err(Error::contract("a colouring needs at least one colour"));
        }
        let mut colors = HashMap::new();
        for (b, c) in entries {
            if b.n() != n {
                return Err(Error::GroundSetMismatch {
                    expected: n,
                    found: b.n(),
                });
            }
            if c < 1 || c > m {
                return Err(Error::contract(format!("colour {c} outside [1, {m}]")));
            }
            colors.insert(b.bits(), c);
        }
        Ok(Coloring {
            n,
            m,
            rule: Rule::Table {
                colors,
                fallback: 1,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the colour palette.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn color(&self, b: &Subset) -> usize {
        match &self.rule {
            Rule::Table { colors, fallback } => *colors.get(&b.bits()).unwrap_or(fallback),
            Rule::Blocks { blocks, relabel } => {
                let raw = blocks
                    .iter()
                    .position(|x| x & b.bits() != 0)
                    .unwrap_or(blocks.len());
                relabel[raw]
            }
            Rule::Pinned { base, element } => {
                if b.contains(*element) {
                    self.m
                } else {
                    base.color(b)
                }
            }
        }
    }

    /// Colours that actually occur on members of `family`.
    pub fn colors_in_use(&self, family: &Family, cap: &SizeCap) -> Result<BTreeSet<usize>> {
        Ok(family.members(cap)?.iter().map(|b| self.color(b)).collect())
    }

    /// Materialises the colouring on the members of `family`.
    pub fn to_table(&self, family: &Family, cap: &SizeCap) -> Result<Vec<(Subset, usize)>> {
        Ok(family
            .members(cap)?
            .into_iter()
            .map(|b| (b, self.color(&b)))
            .collect())
    }

    /// A proper colouring has no monochromatic hyperedge.
    pub fn is_proper(&self, family: &Family, r: usize, cap: &SizeCap) -> Result<bool> {
        Ok(monochromatic_hyperedges(family, r, self, cap)?.is_empty())
    }
}

/// `r` pairwise disjoint family members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Hyperedge {
    pub sets: Vec<Subset>,
}

impl Hyperedge {
    pub fn new(sets: Vec<Subset>) -> Self {
        Hyperedge { sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| Subset::from_elements(n, l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Hyperedge { sets })
    }
}

fn check_uniformity(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::contract(format!(
            "uniformity r must be at least 2, got {r}"
        )));
    }
    Ok(())
}

/// Hyperedges of `K^r(family)` as index tuples into `members`, lexicographic.
fn hyperedge_indices(members: &[Subset], r: usize) -> Vec<Vec<usize>> {
    fn rec(
        members: &[Subset],
        r: usize,
        start: usize,
        used: u64,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..members.len() {
            let b = members[i].bits();
            if b & used == 0 {
                cur.push(i);
                rec(members, r, i + 1, used | b, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(members, r, 0, 0, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Every hyperedge of `K^r(family)` once, in canonical order (members
/// listed in family order, tuples lexicographic).
pub fn enumerate_hyperedges(family: &Family, r: usize, cap: &SizeCap) -> Result<Vec<Hyperedge>> {
    check_uniformity(r)?;
    let members = family.members(cap)?;
    Ok(hyperedge_indices(&members, r)
        .into_iter()
        .map(|idx| Hyperedge::new(idx.iter().map(|&i| members[i]).collect()))
        .collect())
}

/// All hyperedges on which `coloring` is constant.
pub fn monochromatic_hyperedges(
    family: &Family,
    r: usize,
    coloring: &Coloring,
    cap: &SizeCap,
) -> Result<Vec<Hyperedge>> {
    Ok(enumerate_hyperedges(family, r, cap)?
        .into_iter()
        .filter(|e| {
            let c = coloring.color(&e.sets[0]);
            e.sets.iter().all(|b| coloring.color(b) == c)
        })
        .collect())
}

/// The closed form `ceil((n - r(k-1)) / (r-1))`, clamped at zero.
pub fn chromatic_formula(n: usize, k: usize, r: usize) -> usize {
    let top = n.saturating_sub(r * (k - 1));
    top.div_ceil(r - 1)
}

/// Result of an exact chromatic-number search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChromaticSearch {
    pub chromatic_number: usize,
    pub nodes: u64,
}

/// Smallest `t >= 1` admitting a proper `t`-colouring of `K^r(family)`.
pub fn chromatic_number_exact(family: &Family, r: usize, cap: &SizeCap) -> Result<usize> {
    Ok(chromatic_search(family, r, cap)?.chromatic_number)
}

pub fn chromatic_search(family: &Family, r: usize, cap: &SizeCap) -> Result<ChromaticSearch> {
    check_uniformity(r)?;
    let members = family.members(cap)?;
    let edges = hyperedge_indices(&members, r);
    let mut search = ColouringSearch::new(members.len(), edges);
    let mut t = 1;
    loop {
        if search.colorable(t) {
            return Ok(ChromaticSearch {
                chromatic_number: t,
                nodes: search.nodes,
            });
        }
        t += 1;
    }
}

/// Backtracking colourer for uniform hypergraphs. The next vertex is the
/// uncoloured one with the most blocked colours (then highest degree);
/// unused colours are interchangeable, so only the first of them is tried.
struct ColouringSearch {
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
    colour: Vec<Option<usize>>,
    nodes: u64,
}

impl ColouringSearch {
    fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Self {
        let mut incidence = vec![Vec::new(); vertices];
        for (ei, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v].push(ei);
            }
        }
        ColouringSearch {
            edges,
            incidence,
            colour: vec![None; vertices],
            nodes: 0,
        }
    }

    fn colorable(&mut self, t: usize) -> bool {
        self.colour.iter_mut().for_each(|c| *c = None);
        self.rec(t, 0, 0)
    }

    /// Bitmask of colours `v` cannot take without closing a monochromatic edge.
    fn blocked(&self, v: usize) -> u64 {
        let mut mask = 0u64;
        for &ei in &self.incidence[v] {
            let mut shared: Option<usize> = None;
            let mut ok = true;
            for &u in &self.edges[ei] {
                if u == v {
                    continue;
                }
                match (self.colour[u], shared) {
                    (None, _) => {
                        ok = false;
                        break;
                    }
                    (Some(c), None) => shared = Some(c),
                    (Some(c), Some(s)) if c != s => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
            if ok {
                if let Some(c) = shared {
                    mask |= 1 << c;
                }
            }
        }
        mask
    }

    fn rec(&mut self, t: usize, coloured: usize, used: usize) -> bool {
        self.nodes += 1;
        if coloured == self.colour.len() {
            return true;
        }
        let mut best: Option<(usize, u32, usize, u64)> = None;
        for v in 0..self.colour.len() {
            if self.colour[v].is_some() {
                continue;
            }
            let blocked = self.blocked(v);
            let sat = (blocked & ((1u64 << t.min(63)) - 1)).count_ones();
            let deg = self.incidence[v].len();
            if best.is_none_or(|(_, bs, bd, _)| (sat, deg) > (bs, bd)) {
                best = Some((v, sat, deg, blocked));
            }
        }
        let (v, _, _, blocked) = best.expect("an uncoloured vertex remains");
        let limit = (used + 1).min(t);
        for c in 0..limit {
            if blocked & (1 << c) != 0 {
                continue;
            }
            self.colour[v] = Some(c);
            if self.rec(t, coloured + 1, used.max(c + 1)) {
                return true;
            }
            self.colour[v] = None;
        }
        false
    }
}

/// The block colouring with `ceil((n - r(k-1)) / (r-1))` colours: blocks
/// `X_i = {(i-1)(r-1)+1, ..., i(r-1)}` for `i < t`, a set takes the first
/// block it meets, and colour `t` otherwise.
pub fn upper_bound_coloring(n: usize, k: usize, r: usize) -> Result<Coloring> {
    check_uniformity(r)?;
    if k < 1 || n < r * k {
        return Err(Error::contract(format!(
            "need n >= r*k, got n={n} k={k} r={r}"
        )));
    }
    let t = chromatic_formula(n, k, r);
    let blocks = (1..t)
        .map(|i| {
            let lo = (i - 1) * (r - 1) + 1;
            Subset::from_elements(n, lo..=i * (r - 1)).map(|s| s.bits())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coloring {
        n,
        m: t,
        rule: Rule::Blocks {
            blocks,
            relabel: (1..=t).collect(),
        },
    })
}

/// Fuses groups of colours of a block colouring and renumbers the classes
/// by their smallest original colour.
pub fn merge_colors(coloring: &Coloring, groups: &[Vec<usize>]) -> Result<Coloring> {
    let Rule::Blocks { blocks, relabel } = &coloring.rule else {
        return Err(Error::contract("only block colourings can be merged"));
    };
    let m = coloring.m;
    let mut rep: Vec<usize> = (0..=m).collect();
    for g in groups {
        let Some(&low) = g.iter().min() else { continue };
        for &c in g {
            if c < 1 || c > m {
                return Err(Error::contract(format!(
                    "merge colour {c} outside [1, {m}]"
                )));
            }
        }
        let root = rep[low];
        for &c in g {
            let old = rep[c];
            for x in rep.iter_mut() {
                if *x == old {
                    *x = root;
                }
            }
        }
    }
    let mut roots: Vec<usize> = rep[1..].to_vec();
    roots.sort_unstable();
    roots.dedup();
    let new_of = |c: usize| roots.binary_search(&rep[c]).expect("root present") + 1;
    Ok(Coloring {
        n: coloring.n,
        m: roots.len(),
        rule: Rule::Blocks {
            blocks: blocks.clone(),
            relabel: relabel.iter().map(|&c| new_of(c)).collect(),
        },
    })
}

/// A colouring of `family` using exactly `m` colours, typically fewer than
/// the chromatic number. Seed 0 on a parametric family merges the top
/// colours of the block colouring; other seeds draw colours at random
/// (every colour forced to appear at least once).
pub fn hard_coloring(
    family: &Family,
    r: usize,
    m: usize,
    seed: u64,
    cap: &SizeCap,
) -> Result<Coloring> {
    if m < 1 {
        return Err(Error::contract("a colouring needs at least one colour"));
    }
    if seed == 0 {
        if let Some(k) = family.k() {
            let n = family.n();
            if r >= 2 && n >= r * k {
                let base = upper_bound_coloring(n, k, r)?;
                let t = base.m();
                if m <= t {
                    let merged = merge_colors(&base, &[(m..=t).collect()])?;
                    if merged.colors_in_use(family, cap)?.len() == m {
                        return Ok(merged);
                    }
                }
            }
        }
    }
    seeded_coloring(family, m, seed, cap)
}

/// Uniform random colours on the members, each colour used at least once.
pub fn seeded_coloring(family: &Family, m: usize, seed: u64, cap: &SizeCap) -> Result<Coloring> {
    let members = family.members(cap)?;
    if members.len() < m {
        return Err(Error::contract(format!(
            "cannot use {m} colours on a family of {} members",
            members.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colors: Vec<usize> = (0..members.len()).map(|_| rng.gen_range(1..=m)).collect();
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.shuffle(&mut rng);
    for (c, &i) in order.iter().take(m).enumerate() {
        colors[i] = c + 1;
    }
    Coloring::from_table(family.n(), m, members.into_iter().zip(colors))
}

/// Turns a colouring of the stable `k`-sets with `m = floor((n-rk)/(r-1))`
/// colours into one of the almost stable `k`-sets with `m + 1` colours:
/// sets holding `n` get the new colour, the others keep theirs.
pub fn astab_coloring_from_stab(
    n: usize,
    k: usize,
    r: usize,
    c_stab: &Coloring,
) -> Result<Coloring> {
    check_uniformity(r)?;
    if n < r * k {
        return Err(Error::contract(format!(
            "need n >= r*k, got n={n} k={k} r={r}"
        )));
    }
    let m = (n - r * k) / (r - 1);
    if c_stab.n() != n {
        return Err(Error::GroundSetMismatch {
            expected: n,
            found: c_stab.n(),
        });
    }
    if c_stab.m() != m {
        return Err(Error::contract(format!(
            "stable colouring must use {m} colours, has {}",
            c_stab.m()
        )));
    }
    Ok(Coloring {
        n,
        m: m + 1,
        rule: Rule::Pinned {
            base: Box::new(c_stab.clone()),
            element: n,
        },
    })
}

/// Maps a monochromatic hyperedge of the almost-stable colouring built by
/// [`astab_coloring_from_stab`] back to one of the stable colouring.
pub fn pull_back_stable_edge(
    n: usize,
    k: usize,
    r: usize,
    c_stab: &Coloring,
    edge: &Hyperedge,
) -> Result<Hyperedge> {
    let c_astab = astab_coloring_from_stab(n, k, r, c_stab)?;
    let astab = Family::almost_stable(n, k)?;
    if !verify_hyperedge(&astab, r, &c_astab, edge) {
        return Err(Error::contract(
            "not a monochromatic hyperedge of the almost-stable colouring",
        ));
    }
    // the pinned class pairwise intersects, so a monochromatic edge avoids it
    let stable = Family::stable(n, k)?;
    for b in &edge.sets {
        if b.contains(n) || !stable.is_member(b) {
            return Err(Error::contract(format!(
                "{b} does not pull back to a stable set"
            )));
        }
    }
    Ok(edge.clone())
}

/// Any `r1` of the sets of a monochromatic `r2`-hyperedge, `r1 <= r2`.
pub fn lift_solution_r1_r2(edge: &Hyperedge, r1: usize) -> Result<Hyperedge> {
    if r1 > edge.len() {
        return Err(Error::contract(format!(
            "cannot take {r1} sets from a hyperedge of {}",
            edge.len()
        )));
    }
    Ok(Hyperedge::new(edge.sets[..r1].to_vec()))
}

/// True iff `edge` consists of `r` pairwise disjoint members of `family`
/// that share a colour.
pub fn verify_hyperedge(family: &Family, r: usize, coloring: &Coloring, edge: &Hyperedge) -> bool {
    if edge.len() != r || r == 0 {
        return false;
    }
    let mut seen = 0u64;
    for b in &edge.sets {
        if b.n() != family.n() || !family.is_member(b) || b.bits() & seen != 0 {
            return false;
        }
        seen |= b.bits();
    }
    let c = coloring.color(&edge.sets[0]);
    edge.sets.iter().all(|b| coloring.color(b) == c)
}

/// Serialisable description of a colouring, built against a family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ColoringSpec {
    Table { m: usize, entries: Vec<TableEntry> },
    MergedUpperBound { r: usize, merge: Vec<Vec<usize>> },
    Seeded { m: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub set: Vec<usize>,
    pub color: usize,
}

impl ColoringSpec {
    pub fn build(&self, family: &Family, cap: &SizeCap) -> Result<Coloring> {
        let n = family.n();
        match self {
            ColoringSpec::Table { m, entries } => {
                let rows = entries
                    .iter()
                    .map(|e| Subset::from_elements(n, e.set.iter().copied()).map(|b| (b, e.color)))
                    .collect::<Result<Vec<_>>>()?;
                Coloring::from_table(n, *m, rows)
            }
            ColoringSpec::MergedUpperBound { r, merge } => {
                let k = family.k().ok_or_else(|| {
                    Error::contract("merged upper-bound colouring needs a parametric family")
                })?;
                merge_colors(&upper_bound_coloring(n, k, *r)?, merge)
            }
            ColoringSpec::Seeded { m, seed } => seeded_coloring(family, *m, *seed, cap),
        }
    }

    /// A table spec listing the colour of every member.
    pub fn table_of(coloring: &Coloring, family: &Family, cap: &SizeCap) -> Result<Self> {
        Ok(ColoringSpec::Table {
            m: coloring.m(),
            entries: coloring
                .to_table(family, cap)?
                .into_iter()
                .map(|(b, color)| TableEntry {
                    set: b.to_vec(),
                    color,
                })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, e: &[usize]) -> Subset {
        Subset::from_elements(n, e.iter().copied()).unwrap()
    }

    fn cap() -> SizeCap {
        SizeCap::default()
    }

    #[test]
    fn hyperedges_of_k4_2() {
        let f = Family::all_k(4, 2).unwrap();
        let edges = enumerate_hyperedges(&f, 2, &cap()).unwrap();
        let got: BTreeSet<Vec<Vec<usize>>> = edges
            .iter()
            .map(|e| {
                let mut v: Vec<Vec<usize>> = e.sets.iter().map(Subset::to_vec).collect();
                v.sort();
                v
            })
            .collect();
        let want: BTreeSet<Vec<Vec<usize>>> = [
            vec![vec![1, 2], vec![3, 4]],
            vec![vec![1, 3], vec![2, 4]],
            vec![vec![1, 4], vec![2, 3]],
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        assert_eq!(edges.len(), 3);
    }

    #[test]
    fn hyperedge_counts() {
        let f = Family::all_k(6, 2).unwrap();
        assert_eq!(enumerate_hyperedges(&f, 3, &cap()).unwrap().len(), 15);
        let f = Family::all_k(3, 2).unwrap();
        assert!(enumerate_hyperedges(&f, 2, &cap()).unwrap().is_empty());
        assert!(enumerate_hyperedges(&f, 1, &cap()).is_err());
    }

    #[test]
    fn chromatic_examples() {
        let c = cap();
        assert_eq!(
            chromatic_number_exact(&Family::all_k(5, 2).unwrap(), 2, &c).unwrap(),
            3
        );
        assert_eq!(
            chromatic_number_exact(&Family::all_k(6, 2).unwrap(), 3, &c).unwrap(),
            2
        );
        assert_eq!(
            chromatic_number_exact(&Family::stable(6, 2).unwrap(), 2, &c).unwrap(),
            4
        );
        assert_eq!(
            chromatic_number_exact(&Family::all_k(3, 2).unwrap(), 2, &c).unwrap(),
            1
        );
    }

    #[test]
    fn upper_bound_5_2_2() {
        let col = upper_bound_coloring(5, 2, 2).unwrap();
        assert_eq!(col.m(), 3);
        assert_eq!(col.color(&s(5, &[1, 4])), 1);
        assert_eq!(col.color(&s(5, &[2, 3])), 2);
        assert_eq!(col.color(&s(5, &[3, 5])), 3);
        assert_eq!(col.color(&s(5, &[3, 4])), 3);
        assert!(col
            .is_proper(&Family::all_k(5, 2).unwrap(), 2, &cap())
            .unwrap());
    }

    #[test]
    fn upper_bound_other_examples() {
        let col = upper_bound_coloring(6, 2, 3).unwrap();
        assert_eq!(col.m(), 2);
        for b in crate::sets::combinations(6, 2) {
            let want = if b.contains(1) || b.contains(2) { 1 } else { 2 };
            assert_eq!(col.color(&b), want);
        }
        assert!(col
            .is_proper(&Family::all_k(6, 2).unwrap(), 3, &cap())
            .unwrap());

        let col = upper_bound_coloring(4, 2, 2).unwrap();
        assert_eq!(col.m(), 2);
        assert!(col
            .is_proper(&Family::all_k(4, 2).unwrap(), 2, &cap())
            .unwrap());
        assert!(upper_bound_coloring(3, 2, 2).is_err());
    }

    #[test]
    fn hard_coloring_merge_mode() {
        let f = Family::all_k(5, 2).unwrap();
        let hard = hard_coloring(&f, 2, 2, 0, &cap()).unwrap();
        let base = upper_bound_coloring(5, 2, 2).unwrap();
        for b in f.members(&cap()).unwrap() {
            let want = base.color(&b).min(2);
            assert_eq!(hard.color(&b), want);
        }
        assert_eq!(hard.colors_in_use(&f, &cap()).unwrap().len(), 2);
    }

    #[test]
    fn hard_coloring_random_mode_is_improper() {
        let f = Family::all_k(5, 2).unwrap();
        let hard = hard_coloring(&f, 2, 2, 7, &cap()).unwrap();
        assert_eq!(
            hard.colors_in_use(&f, &cap()).unwrap(),
            [1, 2].into_iter().collect()
        );
        assert!(!monochromatic_hyperedges(&f, 2, &hard, &cap())
            .unwrap()
            .is_empty());
        // same seed, same colouring
        let again = hard_coloring(&f, 2, 2, 7, &cap()).unwrap();
        assert_eq!(
            hard.to_table(&f, &cap()).unwrap(),
            again.to_table(&f, &cap()).unwrap()
        );
    }

    #[test]
    fn hard_coloring_constant() {
        let f = Family::all_k(6, 2).unwrap();
        let hard = hard_coloring(&f, 3, 1, 0, &cap()).unwrap();
        assert_eq!(
            hard.colors_in_use(&f, &cap()).unwrap(),
            [1].into_iter().collect()
        );
        assert!(hard_coloring(&f, 3, 0, 0, &cap()).is_err());
    }

    #[test]
    fn astab_from_stab_branches() {
        // n=6, k=2, r=2: m = 2
        let stab = Family::stable(6, 2).unwrap();
        let c = seeded_coloring(&stab, 2, 3, &cap()).unwrap();
        let c2 = astab_coloring_from_stab(6, 2, 2, &c).unwrap();
        assert_eq!(c2.m(), 3);
        assert_eq!(c2.color(&s(6, &[2, 5])), c.color(&s(6, &[2, 5])));
        assert_eq!(c2.color(&s(6, &[2, 6])), 3);
        let astab = Family::almost_stable(6, 2).unwrap();
        for e in monochromatic_hyperedges(&astab, 2, &c2, &cap()).unwrap() {
            assert_ne!(c2.color(&e.sets[0]), 3);
            let back = pull_back_stable_edge(6, 2, 2, &c, &e).unwrap();
            assert!(verify_hyperedge(&stab, 2, &c, &back));
        }
        let wrong = Coloring::constant(6);
        assert!(astab_coloring_from_stab(6, 2, 2, &wrong).is_err());
    }

    #[test]
    fn lift_examples() {
        let e = Hyperedge::from_lists(6, &[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        assert_eq!(
            lift_solution_r1_r2(&e, 2).unwrap().sets,
            e.sets[..2].to_vec()
        );
        assert_eq!(lift_solution_r1_r2(&e, 3).unwrap(), e);
        assert!(lift_solution_r1_r2(&e, 4).is_err());
    }

    #[test]
    fn verify_examples() {
        let f = Family::all_k(5, 2).unwrap();
        let ub = upper_bound_coloring(5, 2, 2).unwrap();
        let e = Hyperedge::from_lists(5, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert!(!verify_hyperedge(&f, 2, &ub, &e));

        let f4 = Family::all_k(4, 2).unwrap();
        let e = Hyperedge::from_lists(4, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert!(verify_hyperedge(&f4, 2, &Coloring::constant(4), &e));
        let overlap = Hyperedge::from_lists(4, &[vec![1, 2], vec![2, 3]]).unwrap();
        assert!(!verify_hyperedge(&f4, 2, &Coloring::constant(4), &overlap));
        assert!(!verify_hyperedge(&f4, 3, &Coloring::constant(4), &e));
    }

    #[test]
    fn merge_renumbers() {
        let base = upper_bound_coloring(7, 2, 2).unwrap(); // t = 5
        let merged = merge_colors(&base, &[vec![2, 4]]).unwrap();
        assert_eq!(merged.m(), 4);
        assert_eq!(merged.color(&s(7, &[2, 7])), 2);
        assert_eq!(merged.color(&s(7, &[4, 7])), 2);
        assert_eq!(merged.color(&s(7, &[3, 7])), 3);
        assert_eq!(merged.color(&s(7, &[6, 7])), 4);
    }

    #[test]
    fn coloring_spec_json() {
        let f = Family::all_k(5, 2).unwrap();
        let spec: ColoringSpec =
            serde_json::from_str(r#"{"type":"merged_upper_bound","r":2,"merge":[[2,3]]}"#).unwrap();
        let col = spec.build(&f, &cap()).unwrap();
        assert_eq!(col.m(), 2);
        let table = ColoringSpec::table_of(&col, &f, &cap()).unwrap();
        let rebuilt = table.build(&f, &cap()).unwrap();
        assert_eq!(
            col.to_table(&f, &cap()).unwrap(),
            rebuilt.to_table(&f, &cap()).unwrap()
        );
        let seeded: ColoringSpec =
            serde_json::from_str(r#"{"type":"seeded","m":2,"seed":4}"#).unwrap();
        assert_eq!(seeded.build(&f, &cap()).unwrap().m(), 2);
        let bad: ColoringSpec =
            serde_json::from_str(r#"{"type":"table","m":1,"entries":[{"set":[1,2],"color":2}]}"#)
                .unwrap();
        assert!(bad.build(&f, &cap()).is_err());
    }
}

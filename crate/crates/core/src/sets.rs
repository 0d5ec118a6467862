//! Ground-set subsets, the set families the reductions range over, their
//! canonical linear order, and the colorability defect.
//!
//! Subsets of `[n]` are bit masks (element `j` is bit `j - 1`), so `n` is
//! limited to 63. Everything that enumerates a family or searches over
//! removal sets is guarded by a [`SizeCap`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 63;

/// A subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    n: u8,
    bits: u64,
}

fn ground_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_GROUND, "ground set too large: {n}");
        Subset {
            n: n as u8,
            bits: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_GROUND, "ground set too large: {n}");
        Subset {
            n: n as u8,
            bits: ground_mask(n),
        }
    }

    /// Builds a subset from 1-based elements. Duplicates are ignored.
    pub fn from_elements<I>(n: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if n > MAX_GROUND {
            return Err(Error::SizeCap {
                what: "ground set",
                limit: MAX_GROUND,
                actual: n,
            });
        }
        let mut bits = 0u64;
        for e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset { n: n as u8, bits })
    }

    /// Builds a subset from a raw mask; bits beyond `n` are dropped.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= MAX_GROUND, "ground set too large: {n}");
        Subset {
            n: n as u8,
            bits: bits & ground_mask(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, element: usize) -> bool {
        element >= 1 && element <= self.n() && self.bits & (1 << (element - 1)) != 0
    }

    pub fn with(mut self, element: usize) -> Self {
        debug_assert!(element >= 1 && element <= self.n());
        self.bits |= 1 << (element - 1);
        self
    }

    pub fn without(mut self, element: usize) -> Self {
        if element >= 1 && element <= self.n() {
            self.bits &= !(1 << (element - 1));
        }
        self
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.bits & other.bits == 0
    }

    pub fn complement(&self) -> Self {
        Subset {
            n: self.n,
            bits: !self.bits & ground_mask(self.n()),
        }
    }

    /// Smallest element, if any.
    pub fn min_element(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize + 1)
    }

    pub fn max_element(&self) -> Option<usize> {
        (self.bits != 0).then(|| 64 - self.bits.leading_zeros() as usize)
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(j + 1)
            }
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements().collect()
    }

    /// The same members viewed inside a larger ground set.
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n() && n <= MAX_GROUND);
        Subset {
            n: n as u8,
            bits: self.bits,
        }
    }

    /// Members that lie in `[n]`, as a subset of `[n]`.
    pub fn restrict(&self, n: usize) -> Self {
        Subset::from_bits(n, self.bits)
    }

    /// Sort key of the family order: `a <= b` iff `a.order_key() <= b.order_key()`.
    ///
    /// The order compares characteristic vectors lexicographically with 1
    /// ranked before 0, so the set holding the smallest element of the
    /// symmetric difference comes first.
    pub fn order_key(&self) -> u64 {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let comp = !self.bits & ground_mask(n);
        comp.reverse_bits() >> (64 - n)
    }

    fn check_same_ground(&self, other: &Subset) {
        debug_assert_eq!(self.n, other.n, "subsets over different ground sets");
    }
}

/// `B1 <= B2` iff `B1 == B2` or the smallest element of `B1 △ B2` lies in `B1`.
pub fn order_cmp(a: &Subset, b: &Subset) -> Ordering {
    a.order_key().cmp(&b.order_key())
}

impl BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        self.check_same_ground(&rhs);
        Subset {
            n: self.n.max(rhs.n),
            bits: self.bits | rhs.bits,
        }
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        self.check_same_ground(&rhs);
        Subset {
            n: self.n.max(rhs.n),
            bits: self.bits & rhs.bits,
        }
    }
}

impl BitXor for Subset {
    type Output = Subset;
    fn bitxor(self, rhs: Subset) -> Subset {
        self.check_same_ground(&rhs);
        Subset {
            n: self.n.max(rhs.n),
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        self.check_same_ground(&rhs);
        Subset {
            n: self.n,
            bits: self.bits & !rhs.bits,
        }
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.elements())
    }
}

/// All `k`-subsets of `[n]`, lexicographic in their sorted element lists.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Subset> {
    let mut idx: Vec<usize> = (1..=k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = Subset::from_elements(n, idx.iter().copied()).expect("in range");
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - (k - 1 - i) {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Limits for anything exponential in the ground-set size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCap {
    pub max_ground: usize,
    pub max_family: usize,
}

impl Default for SizeCap {
    fn default() -> Self {
        SizeCap {
            max_ground: 12,
            max_family: 1 << 12,
        }
    }
}

impl SizeCap {
    pub fn check_ground(&self, n: usize) -> Result<()> {
        if n > self.max_ground {
            return Err(Error::SizeCap {
                what: "ground set",
                limit: self.max_ground,
                actual: n,
            });
        }
        Ok(())
    }
}

/// A set family over `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub enum Family {
    /// All `k`-subsets of `[n]`.
    AllK { n: usize, k: usize },
    /// `k`-subsets with no two elements consecutive modulo `n`.
    Stable { n: usize, k: usize },
    /// `k`-subsets with no two consecutive elements (`1` and `n` may coexist).
    AlmostStable { n: usize, k: usize },
    /// An explicit list of non-empty members, kept sorted in the family order.
    Explicit { n: usize, members: Vec<Subset> },
}

/// How the colorability defect is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectMode {
    Formula,
    Bruteforce,
}

impl Family {
    pub fn all_k(n: usize, k: usize) -> Result<Self> {
        Self::check_parametric(n, k)?;
        Ok(Family::AllK { n, k })
    }

    pub fn stable(n: usize, k: usize) -> Result<Self> {
        Self::check_parametric(n, k)?;
        Ok(Family::Stable { n, k })
    }

    pub fn almost_stable(n: usize, k: usize) -> Result<Self> {
        Self::check_parametric(n, k)?;
        Ok(Family::AlmostStable { n, k })
    }

    pub fn explicit(n: usize, members: Vec<Subset>) -> Result<Self> {
        if n == 0 || n > MAX_GROUND {
            return Err(Error::InvalidFamily(format!("ground set size {n}")));
        }
        let mut members = members;
        for b in &members {
            if b.n() != n {
                return Err(Error::GroundSetMismatch {
                    expected: n,
                    found: b.n(),
                });
            }
            if b.is_empty() {
                return Err(Error::InvalidFamily(
                    "explicit members must be non-empty".into(),
                ));
            }
        }
        members.sort_by_key(Subset::order_key);
        members.dedup();
        Ok(Family::Explicit { n, members })
    }

    fn check_parametric(n: usize, k: usize) -> Result<()> {
        if k == 0 || k > n {
            return Err(Error::InvalidFamily(format!(
                "need n >= k >= 1, got n={n} k={k}"
            )));
        }
        if n > MAX_GROUND {
            return Err(Error::SizeCap {
                what: "ground set",
                limit: MAX_GROUND,
                actual: n,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match self {
            Family::AllK { n, .. }
            | Family::Stable { n, .. }
            | Family::AlmostStable { n, .. }
            | Family::Explicit { n, .. } => *n,
        }
    }

    /// Member size for the parametric kinds.
    pub fn k(&self) -> Option<usize> {
        match self {
            Family::AllK { k, .. } | Family::Stable { k, .. } | Family::AlmostStable { k, .. } => {
                Some(*k)
            }
            Family::Explicit { .. } => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Family::AllK { .. } => "allk",
            Family::Stable { .. } => "stable",
            Family::AlmostStable { .. } => "almost_stable",
            Family::Explicit { .. } => "explicit",
        }
    }

    /// The same family over a ground set padded with elements that belong
    /// to no member.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.n() {
            return Err(Error::contract("padding cannot shrink the ground set"));
        }
        if n == self.n() {
            return Ok(self.clone());
        }
        let members = self.members(&SizeCap {
            max_ground: MAX_GROUND,
            max_family: usize::MAX,
        })?;
        Family::explicit(n, members.into_iter().map(|b| b.widen(n)).collect())
    }

    fn check_ground(&self, b: &Subset) -> Result<()> {
        if b.n() != self.n() {
            return Err(Error::GroundSetMismatch {
                expected: self.n(),
                found: b.n(),
            });
        }
        Ok(())
    }

    /// Membership test; parametric kinds decide it without enumeration.
    pub fn contains(&self, b: &Subset) -> Result<bool> {
        self.check_ground(b)?;
        Ok(self.is_member(b))
    }

    pub(crate) fn is_member(&self, b: &Subset) -> bool {
        match self {
            Family::AllK { k, .. } => b.len() == *k,
            Family::Stable { n, k } => b.len() == *k && is_cyclically_stable(*n, b.bits()),
            Family::AlmostStable { k, .. } => b.len() == *k && b.bits() & (b.bits() << 1) == 0,
            Family::Explicit { members, .. } => members.iter().any(|m| m.bits() == b.bits()),
        }
    }

    /// Some member contained in `d`; always the order-minimal one.
    pub fn find_member_subset(&self, d: &Subset) -> Result<Option<Subset>> {
        self.min_member_subset(d)
    }

    /// The order-minimal member contained in `d`, if any.
    pub fn min_member_subset(&self, d: &Subset) -> Result<Option<Subset>> {
        self.check_ground(d)?;
        Ok(self.min_member_within(d.bits()))
    }

    pub(crate) fn min_member_within(&self, avail: u64) -> Option<Subset> {
        let n = self.n();
        let avail = avail & ground_mask(n);
        match self {
            Family::AllK { k, .. } => {
                if (avail.count_ones() as usize) < *k {
                    return None;
                }
                let mut bits = 0u64;
                let mut rest = avail;
                for _ in 0..*k {
                    let low = rest & rest.wrapping_neg();
                    bits |= low;
                    rest ^= low;
                }
                Some(Subset::from_bits(n, bits))
            }
            Family::AlmostStable { k, .. } => greedy_independent(n, *k, avail, false),
            Family::Stable { k, .. } => greedy_independent(n, *k, avail, true),
            Family::Explicit { members, .. } => {
                members.iter().find(|m| m.bits() & !avail == 0).copied()
            }
        }
    }

    /// The family order restricted to members; non-members are rejected.
    pub fn order_leq(&self, b1: &Subset, b2: &Subset) -> Result<bool> {
        for b in [b1, b2] {
            if !self.contains(b)? {
                return Err(Error::contract(format!(
                    "{b} is not a member of the family"
                )));
            }
        }
        Ok(order_cmp(b1, b2) != Ordering::Greater)
    }

    /// Upper bound on the number of members, without enumerating.
    pub fn size_hint(&self) -> u128 {
        match self {
            Family::AllK { n, k } | Family::Stable { n, k } | Family::AlmostStable { n, k } => {
                binomial(*n, *k)
            }
            Family::Explicit { members, .. } => members.len() as u128,
        }
    }

    /// All members in ascending family order.
    pub fn members(&self, cap: &SizeCap) -> Result<Vec<Subset>> {
        cap.check_ground(self.n())?;
        let hint = self.size_hint();
        if hint > cap.max_family as u128 {
            return Err(Error::SizeCap {
                what: "family",
                limit: cap.max_family,
                actual: hint.min(usize::MAX as u128) as usize,
            });
        }
        let mut out: Vec<Subset> = match self {
            Family::Explicit { members, .. } => members.clone(),
            _ => {
                let k = self.k().expect("parametric");
                combinations(self.n(), k)
                    .filter(|b| self.is_member(b))
                    .collect()
            }
        };
        out.sort_by_key(Subset::order_key);
        Ok(out)
    }

    /// The `r`-colorability defect: fewest ground elements whose removal
    /// leaves the hypergraph of surviving members `r`-colorable.
    pub fn colorability_defect(&self, r: usize, mode: DefectMode, cap: &SizeCap) -> Result<usize> {
        if r < 2 {
            return Err(Error::contract(format!(
                "colorability defect needs r >= 2, got {r}"
            )));
        }
        match mode {
            DefectMode::Formula => match self {
                Family::AllK { n, k } => Ok(n.saturating_sub(r * (k - 1))),
                _ => Err(Error::contract(format!(
                    "no closed formula for the colorability defect of {} families",
                    self.kind_name()
                ))),
            },
            DefectMode::Bruteforce => {
                cap.check_ground(self.n())?;
                let members = self.members(cap)?;
                Ok(defect_by_search(self.n(), &members, r))
            }
        }
    }

    /// Formula where one exists, brute force otherwise.
    pub fn defect(&self, r: usize, cap: &SizeCap) -> Result<usize> {
        match self {
            Family::AllK { .. } => self.colorability_defect(r, DefectMode::Formula, cap),
            _ => self.colorability_defect(r, DefectMode::Bruteforce, cap),
        }
    }
}

fn is_cyclically_stable(n: usize, bits: u64) -> bool {
    if n <= 1 {
        return true;
    }
    let mask = ground_mask(n);
    let rot = ((bits << 1) | (bits >> (n - 1))) & mask;
    bits & rot == 0
}

/// Size of a largest set of pairwise non-adjacent elements (on the path) of `avail`.
fn path_independence(avail: u64) -> usize {
    let mut count = 0;
    let mut last_taken: Option<u32> = None;
    let mut rest = avail;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        if last_taken.is_none_or(|l| j > l + 1) {
            count += 1;
            last_taken = Some(j);
        }
    }
    count
}

/// Order-minimal `k`-subset of `avail` without path-consecutive elements
/// (and, when `cyclic`, not holding both 1 and n). Takes each element as
/// early as a completion still exists.
fn greedy_independent(n: usize, k: usize, avail: u64, cyclic: bool) -> Option<Subset> {
    let mut chosen = 0u64;
    let mut count = 0;
    let mut rest = avail;
    while rest != 0 && count < k {
        let j = rest.trailing_zeros() as usize; // 0-based element
        rest &= rest - 1;
        if j > 0 && chosen & (1 << (j - 1)) != 0 {
            continue;
        }
        let holds_first = chosen & 1 != 0 || j == 0;
        if cyclic && n > 1 && j == n - 1 && chosen & 1 != 0 {
            continue;
        }
        let mut tail = if j + 2 >= 64 {
            0
        } else {
            avail & !((1u64 << (j + 2)) - 1)
        };
        if cyclic && n > 1 && holds_first {
            tail &= !(1u64 << (n - 1));
        }
        if count + 1 + path_independence(tail) >= k {
            chosen |= 1 << j;
            count += 1;
        }
    }
    (count == k).then(|| Subset::from_bits(n, chosen))
}

/// Smallest removal set, searched by size and then lexicographically.
fn defect_by_search(n: usize, members: &[Subset], r: usize) -> usize {
    for size in 0..=n {
        let removals: Vec<Subset> = combinations(n, size).collect();
        let hit = removals.par_iter().find_first(|y| {
            let edges: Vec<u64> = members
                .iter()
                .filter(|b| b.is_disjoint(y))
                .map(Subset::bits)
                .collect();
            hypergraph_colorable(n, y.bits(), &edges, r)
        });
        if hit.is_some() {
            return size;
        }
    }
    n
}

/// Whether the vertices `[n] \ removed` admit an `r`-colouring in which no
/// edge is monochromatic.
pub(crate) fn hypergraph_colorable(n: usize, removed: u64, edges: &[u64], r: usize) -> bool {
    let vertices: Vec<usize> = (0..n).filter(|v| removed & (1 << v) == 0).collect();
    // edges complete once their largest vertex is coloured
    let mut closing: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &e in edges {
        if e == 0 {
            return false;
        }
        let top = 63 - e.leading_zeros() as usize;
        closing[top].push(e);
    }
    let mut classes = vec![0u64; r];
    colour_rec(&vertices, 0, &closing, &mut classes, 0)
}

fn colour_rec(
    vertices: &[usize],
    pos: usize,
    closing: &[Vec<u64>],
    classes: &mut [u64],
    used: usize,
) -> bool {
    let Some(&v) = vertices.get(pos) else {
        return true;
    };
    let limit = (used + 1).min(classes.len());
    for c in 0..limit {
        let class = classes[c] | (1 << v);
        if closing[v].iter().any(|&e| e & !class == 0) {
            continue;
        }
        let prev = classes[c];
        classes[c] = class;
        let ok = colour_rec(vertices, pos + 1, closing, classes, used.max(c + 1));
        classes[c] = prev;
        if ok {
            return true;
        }
    }
    false
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    members: Option<Vec<Vec<usize>>>,
}

impl TryFrom<FamilyJson> for Family {
    type Error = Error;

    fn try_from(raw: FamilyJson) -> Result<Self> {
        let need_k = || {
            raw.k
                .ok_or_else(|| Error::InvalidFamily(format!("kind {} needs k", raw.kind)))
        };
        match raw.kind.as_str() {
            "allk" => Family::all_k(raw.n, need_k()?),
            "stable" => Family::stable(raw.n, need_k()?),
            "almost_stable" => Family::almost_stable(raw.n, need_k()?),
            "explicit" => {
                let lists = raw
                    .members
                    .as_ref()
                    .ok_or_else(|| Error::InvalidFamily("explicit family needs members".into()))?;
                let members = lists
                    .iter()
                    .map(|l| Subset::from_elements(raw.n, l.iter().copied()))
                    .collect::<Result<Vec<_>>>()?;
                Family::explicit(raw.n, members)
            }
            other => Err(Error::InvalidFamily(format!("unknown kind {other:?}"))),
        }
    }
}

impl From<Family> for FamilyJson {
    fn from(f: Family) -> Self {
        let kind = f.kind_name().to_string();
        match f {
            Family::AllK { n, k } | Family::Stable { n, k } | Family::AlmostStable { n, k } => {
                FamilyJson {
                    kind,
                    n,
                    k: Some(k),
                    members: None,
                }
            }
            Family::Explicit { n, members } => FamilyJson {
                kind,
                n,
                k: None,
                members: Some(members.iter().map(Subset::to_vec).collect()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, e: &[usize]) -> Subset {
        Subset::from_elements(n, e.iter().copied()).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(Family::all_k(5, 2)
            .unwrap()
            .contains(&s(5, &[1, 3]))
            .unwrap());
        assert!(!Family::stable(5, 2)
            .unwrap()
            .contains(&s(5, &[1, 5]))
            .unwrap());
        assert!(Family::almost_stable(5, 2)
            .unwrap()
            .contains(&s(5, &[1, 5]))
            .unwrap());
    }

    #[test]
    fn membership_rejects_mismatched_ground() {
        let f = Family::all_k(5, 2).unwrap();
        assert!(matches!(
            f.contains(&s(6, &[1, 2])),
            Err(Error::GroundSetMismatch {
                expected: 5,
                found: 6
            })
        ));
    }

    #[test]
    fn find_member_examples() {
        let f = Family::all_k(6, 2).unwrap();
        assert_eq!(
            f.find_member_subset(&s(6, &[2, 4, 6])).unwrap(),
            Some(s(6, &[2, 4]))
        );
        let f = Family::stable(6, 3).unwrap();
        assert_eq!(f.find_member_subset(&s(6, &[1, 2, 3, 4])).unwrap(), None);
        let f = Family::all_k(5, 3).unwrap();
        assert_eq!(f.find_member_subset(&s(5, &[1, 2])).unwrap(), None);
    }

    #[test]
    fn order_examples() {
        let f = Family::all_k(4, 2).unwrap();
        assert!(f.order_leq(&s(4, &[1, 4]), &s(4, &[2, 3])).unwrap());
        assert!(!f.order_leq(&s(4, &[2, 3]), &s(4, &[1, 4])).unwrap());
        assert!(f.order_leq(&s(4, &[2, 4]), &s(4, &[2, 4])).unwrap());
        assert!(f.order_leq(&s(4, &[1]), &s(4, &[2, 4])).is_err());
    }

    #[test]
    fn min_member_examples() {
        let f = Family::all_k(6, 2).unwrap();
        assert_eq!(
            f.min_member_subset(&s(6, &[2, 4, 6])).unwrap(),
            Some(s(6, &[2, 4]))
        );
        let f = Family::almost_stable(5, 2).unwrap();
        assert_eq!(
            f.min_member_subset(&s(5, &[3, 4, 5])).unwrap(),
            Some(s(5, &[3, 5]))
        );
        let f = Family::all_k(5, 2).unwrap();
        assert_eq!(f.min_member_subset(&s(5, &[4])).unwrap(), None);
    }

    #[test]
    fn stable_wraparound() {
        let f = Family::stable(6, 2).unwrap();
        // {1,3} is the minimum; with 1 forced, 6 is excluded
        assert_eq!(f.min_member_subset(&s(6, &[1, 6])).unwrap(), None);
        assert_eq!(
            f.min_member_subset(&s(6, &[1, 4, 6])).unwrap(),
            Some(s(6, &[1, 4]))
        );
        assert_eq!(
            f.min_member_subset(&s(6, &[2, 6])).unwrap(),
            Some(s(6, &[2, 6]))
        );
        assert!(Family::stable(1, 1).unwrap().contains(&s(1, &[1])).unwrap());
        assert!(!Family::stable(2, 2)
            .unwrap()
            .contains(&s(2, &[1, 2]))
            .unwrap());
    }

    #[test]
    fn defect_examples() {
        let cap = SizeCap::default();
        let f = Family::all_k(6, 2).unwrap();
        assert_eq!(
            f.colorability_defect(2, DefectMode::Formula, &cap).unwrap(),
            4
        );
        let f = Family::all_k(7, 2).unwrap();
        assert_eq!(
            f.colorability_defect(3, DefectMode::Formula, &cap).unwrap(),
            4
        );
        let f = Family::explicit(2, vec![s(2, &[1]), s(2, &[2])]).unwrap();
        assert_eq!(
            f.colorability_defect(2, DefectMode::Bruteforce, &cap)
                .unwrap(),
            2
        );
    }

    #[test]
    fn defect_errors() {
        let cap = SizeCap::default();
        let f = Family::stable(6, 2).unwrap();
        assert!(matches!(
            f.colorability_defect(2, DefectMode::Formula, &cap),
            Err(Error::Contract(_))
        ));
        let big = Family::all_k(13, 2).unwrap();
        assert!(matches!(
            big.colorability_defect(2, DefectMode::Bruteforce, &cap),
            Err(Error::SizeCap { .. })
        ));
        assert!(f
            .colorability_defect(1, DefectMode::Bruteforce, &cap)
            .is_err());
    }

    #[test]
    fn explicit_rejects_empty_member() {
        assert!(Family::explicit(3, vec![Subset::empty(3)]).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<Vec<usize>> = combinations(4, 2).map(|b| b.to_vec()).collect();
        assert_eq!(
            all,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(combinations(3, 0).count(), 1);
        assert_eq!(combinations(2, 3).count(), 0);
    }

    #[test]
    fn family_json_round_trip() {
        let f: Family =
            serde_json::from_str(r#"{"kind":"explicit","n":3,"members":[[2,3],[1]]}"#).unwrap();
        assert_eq!(f.n(), 3);
        let back = serde_json::to_string(&f).unwrap();
        assert_eq!(back, r#"{"kind":"explicit","n":3,"members":[[1],[2,3]]}"#);
        let g: Family = serde_json::from_str(r#"{"kind":"almost_stable","n":5,"k":2}"#).unwrap();
        assert_eq!(g, Family::almost_stable(5, 2).unwrap());
        assert!(serde_json::from_str::<Family>(r#"{"kind":"allk","n":3}"#).is_err());
    }
}

//! Z_p-Tucker: signed vectors over `{0} ∪ Z_p`, the refinement order,
//! equivariant labelings built from a colouring, an exhaustive chain
//! solver, and the extraction of monochromatic hyperedges from chains.
//!
//! A sign `t ∈ [p]` stands for `ω^t`; `0` is the zero entry. For `p = 2`,
//! `2` prints as `+` and `1` as `-`.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::condiv::is_prime;
use crate::error::{Error, Result};
use crate::kneser::{verify_hyperedge, Coloring, Hyperedge};
use crate::sets::{Family, SizeCap, Subset};

/// An element of `({0} ∪ Z_p)^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedVector {
    p: u8,
    entries: Vec<u8>,
}

impl SignedVector {
    pub fn new(p: usize, entries: Vec<u8>) -> Result<Self> {
        if !(2..=250).contains(&p) {
            return Err(Error::contract(format!("unsupported p = {p}")));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e as usize > p) {
            return Err(Error::contract(format!("entry {bad} outside [0, {p}]")));
        }
        if entries.len() > 63 {
            return Err(Error::SizeCap {
                what: "signed vector length",
                limit: 63,
                actual: entries.len(),
            });
        }
        Ok(SignedVector {
            p: p as u8,
            entries,
        })
    }

    /// Parses `+-0` strings for `p = 2`, or comma-separated entries.
    pub fn parse(p: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        let entries = if text.contains(',') || p != 2 {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|c| match c {
                    '+' => Ok(2),
                    '-' => Ok(1),
                    '0' => Ok(0),
                    _ => Err(Error::Parse(format!("bad sign {c:?}"))),
                })
                .collect::<Result<Vec<_>>>()?
        };
        Self::new(p, entries)
    }

    pub fn p(&self) -> usize {
        self.p as usize
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Number of nonzero entries.
    pub fn support(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    pub fn first_sign(&self) -> Option<u8> {
        self.entries.iter().copied().find(|&e| e != 0)
    }

    /// Positions holding sign `t`, as a subset of `[n]`.
    pub fn part(&self, t: u8) -> Subset {
        let bits = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == t)
            .fold(0u64, |acc, (j, _)| acc | (1 << j));
        Subset::from_bits(self.n(), bits)
    }

    /// Base-`(p+1)` code, first entry least significant.
    pub fn code(&self) -> u64 {
        encode(&self.entries, self.p)
    }

    fn from_code(p: u8, n: usize, mut code: u64) -> Self {
        let base = u64::from(p) + 1;
        let entries = (0..n)
            .map(|_| {
                let e = (code % base) as u8;
                code /= base;
                e
            })
            .collect();
        SignedVector { p, entries }
    }
}

fn encode(entries: &[u8], p: u8) -> u64 {
    let base = u64::from(p) + 1;
    entries
        .iter()
        .rev()
        .fold(0u64, |acc, &e| acc * base + u64::from(e))
}

impl fmt::Display for SignedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, &e) in self.entries.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            match (self.p, e) {
                (_, 0) => write!(f, "0")?,
                (2, 2) => write!(f, "+")?,
                (2, 1) => write!(f, "-")?,
                (_, t) => write!(f, "ω^{t}")?,
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for SignedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for SignedVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter())
    }
}

/// `X ⪯ Y`: every nonzero entry of `X` agrees with `Y`.
pub fn preceq(x: &SignedVector, y: &SignedVector) -> Result<bool> {
    if x.n() != y.n() {
        return Err(Error::GroundSetMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    Ok(x.entries
        .iter()
        .zip(&y.entries)
        .all(|(&a, &b)| a == 0 || a == b))
}

fn rotate(sign: u8, t: usize, p: u8) -> u8 {
    let p = p as usize;
    (((sign as usize) + t % p + p - 1) % p + 1) as u8
}

/// `ω^t X`: every nonzero sign moves by `t` modulo `p`.
pub fn omega_mul(t: usize, x: &SignedVector) -> SignedVector {
    SignedVector {
        p: x.p,
        entries: x
            .entries
            .iter()
            .map(|&e| if e == 0 { 0 } else { rotate(e, t, x.p) })
            .collect(),
    }
}

/// Length of a longest subsequence of nonzero entries in which
/// neighbours differ.
pub fn alt(x: &SignedVector) -> usize {
    alt_entries(&x.entries)
}

fn alt_entries(entries: &[u8]) -> usize {
    let mut last = 0u8;
    let mut count = 0;
    for &e in entries {
        if e != 0 && e != last {
            count += 1;
            last = e;
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TuckerLabel {
    pub sign: u8,
    pub index: usize,
}

/// A labeling evaluated on canonical vectors only: those whose first
/// nonzero sign is `p`.
pub trait CanonicalLabeling: Send + Sync + fmt::Debug {
    fn label_canonical(&self, x: &SignedVector) -> Result<TuckerLabel>;
    fn name(&self) -> &'static str;
}

/// A Z_p-Tucker instance. The labeling is made equivariant by evaluating
/// the canonical rotation of its argument and rotating the sign back.
#[derive(Clone, Debug)]
pub struct TuckerInstance {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    labeling: Arc<dyn CanonicalLabeling>,
}

impl TuckerInstance {
    pub fn new(n: usize, p: usize, s: usize, labeling: Arc<dyn CanonicalLabeling>) -> Result<Self> {
        if !is_prime(p) || p > 250 {
            return Err(Error::contract(format!("p = {p} is not a supported prime")));
        }
        if n == 0 || n > 63 {
            return Err(Error::contract(format!(
                "vector length {n} outside [1, 63]"
            )));
        }
        let limit = (n - 1) / (p - 1);
        if s < 1 || s > limit {
            return Err(Error::contract(format!("s = {s} must lie in [1, {limit}]")));
        }
        Ok(TuckerInstance { n, p, s, labeling })
    }

    pub fn construction(&self) -> &'static str {
        self.labeling.name()
    }

    pub fn lambda(&self, x: &SignedVector) -> Result<TuckerLabel> {
        if x.n() != self.n || x.p() != self.p {
            return Err(Error::contract(format!(
                "vector {x} does not belong to an instance with n = {}, p = {}",
                self.n, self.p
            )));
        }
        let first = x
            .first_sign()
            .ok_or_else(|| Error::contract("the labeling is undefined on the zero vector"))?;
        let t = (self.p - first as usize) % self.p;
        let canon = omega_mul(t, x);
        let label = self.labeling.label_canonical(&canon)?;
        if label.index < 1 || label.index > self.s || label.sign < 1 || label.sign as usize > self.p
        {
            return Err(Error::contract(format!(
                "label ({}, {}) outside Z_{} × [{}]",
                label.sign, label.index, self.p, self.s
            )));
        }
        Ok(TuckerLabel {
            sign: rotate(label.sign, self.p - t, x.p),
            index: label.index,
        })
    }
}

/// Checks `λ(ω^t X) = (ω^t λ_1(X), λ_2(X))`.
pub fn check_equivariance(inst: &TuckerInstance, x: &SignedVector, t: usize) -> Result<bool> {
    let base = inst.lambda(x)?;
    let moved = inst.lambda(&omega_mul(t, x))?;
    Ok(moved.index == base.index && moved.sign == rotate(base.sign, t, x.p))
}

fn smallest_member_in_parts(
    family: &Family,
    x: &SignedVector,
    within: usize,
) -> Option<(u8, Subset)> {
    let mut best: Option<(u8, Subset)> = None;
    for t in 1..=x.p {
        let part = x.part(t).bits() & ((1u64 << within) - 1);
        if let Some(b) = family.min_member_within(part) {
            if best.is_none_or(|(_, cur)| b.order_key() < cur.order_key()) {
                best = Some((t, b));
            }
        }
    }
    best
}

/// Labeling from a colouring of an arbitrary family: short vectors are
/// labelled by their length, long ones by the colour of the smallest
/// member inside one of their sign classes.
#[derive(Debug, Clone)]
pub struct GeneralLabeling {
    /// The family padded to the vector length.
    family: Family,
    n: usize,
    coloring: Coloring,
    p: usize,
    defect: usize,
}

impl GeneralLabeling {
    fn short_limit(&self) -> usize {
        self.family.n() - self.defect
    }

    fn band(&self) -> usize {
        self.short_limit().div_ceil(self.p - 1)
    }
}

impl CanonicalLabeling for GeneralLabeling {
    fn label_canonical(&self, x: &SignedVector) -> Result<TuckerLabel> {
        let size = x.support();
        let first = x.first_sign().expect("nonzero");
        if size <= self.short_limit() {
            return Ok(TuckerLabel {
                sign: first,
                index: size.div_ceil(self.p - 1),
            });
        }
        let (t, b) =
            smallest_member_in_parts(&self.family, x, self.family.n()).ok_or_else(|| {
                Error::contract(format!(
                    "no sign class of {x} holds a member; the defect {} is wrong",
                    self.defect
                ))
            })?;
        Ok(TuckerLabel {
            sign: t,
            index: self.coloring.color(&b.restrict(self.n)) + self.band(),
        })
    }

    fn name(&self) -> &'static str {
        "general"
    }
}

/// Labeling for almost stable sets: vectors are measured by their longest
/// alternating subsequence.
#[derive(Debug, Clone)]
pub struct AlmostStableLabeling {
    family: Family,
    n: usize,
    k: usize,
    p: usize,
    pad: usize,
    coloring: Coloring,
}

impl AlmostStableLabeling {
    fn threshold(&self) -> usize {
        self.p * (self.k - 1) + self.pad
    }

    fn band(&self) -> usize {
        self.threshold() / (self.p - 1)
    }
}

impl CanonicalLabeling for AlmostStableLabeling {
    fn label_canonical(&self, x: &SignedVector) -> Result<TuckerLabel> {
        let a = alt(x);
        if a <= self.threshold() {
            return Ok(TuckerLabel {
                sign: x.first_sign().expect("nonzero"),
                index: a.div_ceil(self.p - 1),
            });
        }
        let (t, b) = smallest_member_in_parts(&self.family, x, self.n)
            .expect("a long alternating subsequence forces an almost stable set in one sign class");
        Ok(TuckerLabel {
            sign: t,
            index: self.coloring.color(&b) + self.band(),
        })
    }

    fn name(&self) -> &'static str {
        "almost_stable"
    }
}

/// A labeling given by a table on canonical vectors.
#[derive(Debug, Clone)]
pub struct TableLabeling {
    table: HashMap<Vec<u8>, TuckerLabel>,
}

impl CanonicalLabeling for TableLabeling {
    fn label_canonical(&self, x: &SignedVector) -> Result<TuckerLabel> {
        self.table
            .get(x.entries())
            .copied()
            .ok_or_else(|| Error::contract(format!("table has no label for {x}")))
    }

    fn name(&self) -> &'static str {
        "table"
    }
}

/// All canonical vectors of length `n` (first nonzero sign `p`).
fn canonical_vectors(n: usize, p: u8) -> impl Iterator<Item = SignedVector> {
    let total = (u64::from(p) + 1).pow(n as u32);
    (1..total)
        .map(move |code| SignedVector::from_code(p, n, code))
        .filter(move |x| x.first_sign() == Some(p))
}

/// An instance whose canonical labels are drawn uniformly from the seed.
pub fn random_equivariant_instance(
    n: usize,
    p: usize,
    s: usize,
    seed: u64,
) -> Result<TuckerInstance> {
    if !is_prime(p) || p > 250 {
        return Err(Error::contract(format!("p = {p} is not a supported prime")));
    }
    let cap = (p as u64 + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
    if cap > CHAIN_CODE_LIMIT {
        return Err(Error::SizeCap {
            what: "signed vector space",
            limit: CHAIN_CODE_LIMIT as usize,
            actual: cap.min(usize::MAX as u64) as usize,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = canonical_vectors(n, p as u8)
        .map(|x| {
            let label = TuckerLabel {
                sign: rng.gen_range(1..=p as u8),
                index: rng.gen_range(1..=s.max(1)),
            };
            (x.entries, label)
        })
        .collect();
    TuckerInstance::new(n, p, s, Arc::new(TableLabeling { table }))
}

#[derive(Serialize, Deserialize)]
struct TableInstanceJson {
    n: usize,
    p: usize,
    s: usize,
    table: HashMap<String, (u8, usize)>,
}

/// Reads `{"n","p","s","table":{"2,0,1":[sign,index],...}}`.
pub fn table_instance_from_json(text: &str) -> Result<TuckerInstance> {
    let raw: TableInstanceJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut table = HashMap::new();
    for (key, (sign, index)) in raw.table {
        let x = SignedVector::parse(raw.p, &key)?;
        if x.n() != raw.n || x.first_sign() != Some(raw.p as u8) {
            return Err(Error::Parse(format!(
                "{key:?} is not a canonical vector of length {}",
                raw.n
            )));
        }
        table.insert(x.entries, TuckerLabel { sign, index });
    }
    TuckerInstance::new(raw.n, raw.p, raw.s, Arc::new(TableLabeling { table }))
}

/// Writes a table instance by evaluating every canonical vector.
pub fn table_instance_to_json(inst: &TuckerInstance) -> Result<String> {
    let mut table = HashMap::new();
    for x in canonical_vectors(inst.n, inst.p as u8) {
        let l = inst.lambda(&x)?;
        let key = x
            .entries
            .iter()
            .map(u8::to_string)
            .collect::<Vec<_>>()
            .join(",");
        table.insert(key, (l.sign, l.index));
    }
    let raw = TableInstanceJson {
        n: inst.n,
        p: inst.p,
        s: inst.s,
        table,
    };
    serde_json::to_string(&raw).map_err(|e| Error::Parse(e.to_string()))
}

/// Which labeling a reduction built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Construction {
    General { family: Family },
    AlmostStable { n: usize, k: usize },
}

/// A Tucker instance built from a coloured family, with what is needed to
/// read hyperedges back off its chains.
#[derive(Debug, Clone)]
pub struct TuckerReduction {
    pub construction: Construction,
    pub coloring: Coloring,
    pub p: usize,
    pub instance: TuckerInstance,
    /// Labels up to this value come from the short-vector case.
    pub band: usize,
    family: Family,
    lookup: Family,
    n: usize,
}

/// Smallest `n' >= n` with `p - 1` dividing `n' - 1`.
pub fn padded_length(n: usize, p: usize) -> usize {
    let mut m = n.max(1);
    while !(m - 1).is_multiple_of(p - 1) {
        m += 1;
    }
    m
}

impl TuckerReduction {
    /// The construction for any family, using its `p`-colourability defect.
    pub fn general(family: &Family, coloring: &Coloring, p: usize, cap: &SizeCap) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::contract(format!("p = {p} is not prime")));
        }
        let n = family.n();
        if coloring.n() != n {
            return Err(Error::GroundSetMismatch {
                expected: n,
                found: coloring.n(),
            });
        }
        let defect = family.defect(p, cap)?;
        let m = defect.saturating_sub(1) / (p - 1);
        if m == 0 {
            return Err(Error::contract(format!(
                "degenerate budget: defect {defect} leaves no colours for p = {p}"
            )));
        }
        if coloring.m() != m {
            return Err(Error::contract(format!(
                "colouring uses {} colours, the budget for defect {defect} is {m}",
                coloring.m()
            )));
        }
        let padded_n = padded_length(n, p);
        let padded = family.padded(padded_n)?;
        let labeling = GeneralLabeling {
            family: padded.clone(),
            n,
            coloring: coloring.clone(),
            p,
            defect,
        };
        let band = labeling.band();
        let s = (padded_n - 1) / (p - 1);
        let instance = TuckerInstance::new(padded_n, p, s, Arc::new(labeling))?;
        Ok(TuckerReduction {
            construction: Construction::General {
                family: family.clone(),
            },
            coloring: coloring.clone(),
            p,
            instance,
            band,
            family: family.clone(),
            lookup: padded,
            n,
        })
    }

    /// The construction for almost stable `k`-subsets of `[n]`.
    pub fn almost_stable(n: usize, k: usize, p: usize, coloring: &Coloring) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::contract(format!("p = {p} is not prime")));
        }
        let family = Family::almost_stable(n, k)?;
        if n < p * k {
            return Err(Error::contract(format!(
                "need n >= p*k, got n={n} k={k} p={p}"
            )));
        }
        if coloring.n() != n {
            return Err(Error::GroundSetMismatch {
                expected: n,
                found: coloring.n(),
            });
        }
        let m = (n - p * (k - 1) - 1) / (p - 1);
        if m == 0 {
            return Err(Error::contract("degenerate budget: no colours available"));
        }
        if coloring.m() != m {
            return Err(Error::contract(format!(
                "colouring uses {} colours, the almost stable budget is {m}",
                coloring.m()
            )));
        }
        let pad = (0..p - 1)
            .find(|a| (p * (k - 1) + a).is_multiple_of(p - 1))
            .expect("some residue works");
        let labeling = AlmostStableLabeling {
            family: family.clone(),
            n,
            k,
            p,
            pad,
            coloring: coloring.clone(),
        };
        let band = labeling.band();
        let total = n + pad;
        let s = (total - 1) / (p - 1);
        let instance = TuckerInstance::new(total, p, s, Arc::new(labeling))?;
        Ok(TuckerReduction {
            construction: Construction::AlmostStable { n, k },
            coloring: coloring.clone(),
            p,
            instance,
            band,
            lookup: family.clone(),
            family,
            n,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn lambda(&self, x: &SignedVector) -> Result<TuckerLabel> {
        self.instance.lambda(x)
    }

    /// Reads a monochromatic hyperedge off a chain solution.
    pub fn extract(&self, chain: &Chain) -> Result<Hyperedge> {
        extract_from_chain(self, chain)
    }
}

/// The labeling for an arbitrary family, evaluated at `x` (of the padded length).
pub fn lambda_general(
    family: &Family,
    coloring: &Coloring,
    p: usize,
    x: &SignedVector,
    cap: &SizeCap,
) -> Result<TuckerLabel> {
    TuckerReduction::general(family, coloring, p, cap)?.lambda(x)
}

/// The almost stable labeling evaluated at `x` (of length `n + a`).
pub fn lambda_almost_stable(
    n: usize,
    k: usize,
    p: usize,
    coloring: &Coloring,
    x: &SignedVector,
) -> Result<TuckerLabel> {
    TuckerReduction::almost_stable(n, k, p, coloring)?.lambda(x)
}

/// `p` signed vectors with `X_1 ⪯ ... ⪯ X_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub vectors: Vec<SignedVector>,
}

/// True iff `chain` is a refinement chain of `p` vectors sharing a label
/// index with pairwise distinct label signs.
pub fn check_chain_solution(inst: &TuckerInstance, chain: &Chain) -> Result<bool> {
    if chain.vectors.len() != inst.p {
        return Ok(false);
    }
    for w in chain.vectors.windows(2) {
        if !preceq(&w[0], &w[1])? {
            return Ok(false);
        }
    }
    let mut labels = Vec::with_capacity(inst.p);
    for x in &chain.vectors {
        if x.is_zero() {
            return Ok(false);
        }
        labels.push(inst.lambda(x)?);
    }
    let index = labels[0].index;
    let mut signs: Vec<u8> = labels.iter().map(|l| l.sign).collect();
    signs.sort_unstable();
    signs.dedup();
    Ok(labels.iter().all(|l| l.index == index) && signs.len() == inst.p)
}

/// Largest `(p+1)^n` the chain solver will index.
pub const CHAIN_CODE_LIMIT: u64 = 4_782_969; // 3^14

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainSolution {
    pub chain: Chain,
    /// Vectors visited by the search.
    pub nodes: u64,
}

struct ChainSearch<'a> {
    inst: &'a TuckerInstance,
    p: u8,
    memo: Vec<AtomicU32>,
    nodes: AtomicU64,
}

impl ChainSearch<'_> {
    fn label(&self, x: &SignedVector) -> Result<TuckerLabel> {
        let slot = &self.memo[x.code() as usize];
        let raw = slot.load(Ordering::Relaxed);
        if raw != 0 {
            return Ok(TuckerLabel {
                sign: (raw >> 24) as u8,
                index: (raw & 0xff_ffff) as usize,
            });
        }
        let l = self.inst.lambda(x)?;
        slot.store(
            (u32::from(l.sign) << 24) | l.index as u32,
            Ordering::Relaxed,
        );
        Ok(l)
    }

    /// Extends `chain` by vectors strictly above its last one.
    fn extend(
        &self,
        chain: &mut Vec<SignedVector>,
        index: usize,
        used: &mut Vec<u8>,
    ) -> Result<bool> {
        if chain.len() == self.inst.p {
            return Ok(true);
        }
        let last = chain.last().expect("chain starts non-empty").clone();
        let zeros: Vec<usize> = (0..last.n()).filter(|&j| last.entries[j] == 0).collect();
        let needed = self.inst.p - chain.len();
        if zeros.len() < needed {
            return Ok(false);
        }
        let base = u64::from(self.p) + 1;
        let count = base.pow(zeros.len() as u32);
        for fill in 1..count {
            let mut y = last.clone();
            let mut rest = fill;
            for &j in &zeros {
                y.entries[j] = (rest % base) as u8;
                rest /= base;
            }
            self.nodes.fetch_add(1, Ordering::Relaxed);
            let l = self.label(&y)?;
            if l.index != index || used.contains(&l.sign) {
                continue;
            }
            chain.push(y);
            used.push(l.sign);
            if self.extend(chain, index, used)? {
                return Ok(true);
            }
            chain.pop();
            used.pop();
        }
        Ok(false)
    }

    fn search_from(&self, x: &SignedVector) -> Result<Option<Chain>> {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let l = self.label(x)?;
        let mut chain = vec![x.clone()];
        let mut used = vec![l.sign];
        Ok(self
            .extend(&mut chain, l.index, &mut used)?
            .then_some(Chain { vectors: chain }))
    }
}

/// Exhaustive search for a chain solution. Rotating a chain keeps it a
/// solution, so the first vector is taken canonical; starts are tried by
/// decreasing support, then by code.
pub fn chain_solve(inst: &TuckerInstance) -> Result<ChainSolution> {
    let p = inst.p as u8;
    let space = (inst.p as u64 + 1)
        .checked_pow(inst.n as u32)
        .unwrap_or(u64::MAX);
    if space > CHAIN_CODE_LIMIT {
        return Err(Error::SizeCap {
            what: "signed vector space",
            limit: CHAIN_CODE_LIMIT as usize,
            actual: space.min(usize::MAX as u64) as usize,
        });
    }
    let search = ChainSearch {
        inst,
        p,
        memo: (0..space).map(|_| AtomicU32::new(0)).collect(),
        nodes: AtomicU64::new(0),
    };
    let mut starts: Vec<SignedVector> = canonical_vectors(inst.n, p)
        .filter(|x| inst.n - x.support() >= inst.p - 1)
        .collect();
    starts.sort_by_key(|x| (std::cmp::Reverse(x.support()), x.code()));
    let found = starts
        .par_iter()
        .find_map_first(|x| search.search_from(x).transpose());
    match found {
        Some(Ok(chain)) => Ok(ChainSolution {
            chain,
            nodes: search.nodes.into_inner(),
        }),
        Some(Err(e)) => Err(e),
        None => Err(Error::Exhausted(format!(
            "no chain solution among {} starts; the labeling violates the Tucker contract",
            starts.len()
        ))),
    }
}

/// For each vector of the chain, the smallest member inside its sign class
/// `λ_1(X_t)`; the sets form a monochromatic hyperedge.
pub fn extract_from_chain(red: &TuckerReduction, chain: &Chain) -> Result<Hyperedge> {
    let inst = &red.instance;
    if !check_chain_solution(inst, chain)? {
        return Err(Error::contract("not a chain solution of the instance"));
    }
    let index = inst.lambda(&chain.vectors[0])?.index;
    if index <= red.band {
        return Err(Error::contract(format!(
            "chain label {index} lies in the short-vector band (<= {}); the labeling is broken",
            red.band
        )));
    }
    let mut sets = Vec::with_capacity(inst.p);
    for x in &chain.vectors {
        let sign = inst.lambda(x)?.sign;
        let part = x.part(sign).bits() & ((1u64 << red.n) - 1);
        let b = red
            .lookup
            .min_member_within(part)
            .ok_or_else(|| Error::contract(format!("sign class {sign} of {x} holds no member")))?;
        sets.push(b.restrict(red.n));
    }
    let edge = Hyperedge::new(sets);
    if !verify_hyperedge(&red.family, inst.p, &red.coloring, &edge) {
        return Err(Error::contract(
            "chain did not yield a monochromatic hyperedge",
        ));
    }
    Ok(edge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::{hard_coloring, upper_bound_coloring};

    fn v(p: usize, text: &str) -> SignedVector {
        SignedVector::parse(p, text).unwrap()
    }

    fn cap() -> SizeCap {
        SizeCap::default()
    }

    #[test]
    fn preceq_examples() {
        assert!(preceq(&v(2, "+00"), &v(2, "+-0")).unwrap());
        assert!(!preceq(&v(2, "+00"), &v(2, "--0")).unwrap());
        assert!(preceq(&v(2, "+-0"), &v(2, "+-0")).unwrap());
        assert!(preceq(&v(2, "+0"), &v(2, "+00")).is_err());
    }

    #[test]
    fn omega_examples() {
        let x = v(2, "+-0");
        assert_eq!(omega_mul(1, &x), v(2, "-+0"));
        assert_eq!(omega_mul(2, &x), x);
        assert_eq!(omega_mul(1, &v(3, "1,0,3")), v(3, "2,0,1"));
    }

    #[test]
    fn alt_examples() {
        assert_eq!(alt(&v(2, "+-+")), 3);
        assert_eq!(alt(&v(2, "++0+")), 1);
        assert_eq!(alt(&v(3, "1,2,2,1,0,3")), 4);
        assert_eq!(alt(&v(2, "000")), 0);
    }

    fn general_5_2() -> (Family, Coloring, TuckerReduction) {
        let f = Family::all_k(5, 2).unwrap();
        let c = hard_coloring(&f, 2, 2, 0, &cap()).unwrap();
        let red = TuckerReduction::general(&f, &c, 2, &cap()).unwrap();
        (f, c, red)
    }

    #[test]
    fn lambda_general_examples() {
        let (_, c, red) = general_5_2();
        assert_eq!(red.instance.s, 4);
        assert_eq!(red.band, 2);
        assert_eq!(
            red.lambda(&v(2, "+0000")).unwrap(),
            TuckerLabel { sign: 2, index: 1 }
        );
        assert_eq!(
            red.lambda(&v(2, "-+000")).unwrap(),
            TuckerLabel { sign: 1, index: 2 }
        );
        let b13 = Subset::from_elements(5, [1, 3]).unwrap();
        assert_eq!(
            red.lambda(&v(2, "+0+0+")).unwrap(),
            TuckerLabel {
                sign: 2,
                index: c.color(&b13) + 2
            }
        );
        assert!(red.lambda(&v(2, "00000")).is_err());
    }

    #[test]
    fn lambda_almost_stable_examples() {
        let f = Family::almost_stable(5, 2).unwrap();
        // m = floor((5 - 2 - 1) / 1) = 2
        let c = crate::kneser::seeded_coloring(&f, 2, 1, &cap()).unwrap();
        let red = TuckerReduction::almost_stable(5, 2, 2, &c).unwrap();
        assert_eq!(red.instance.n, 5);
        assert_eq!(
            red.lambda(&v(2, "+-000")).unwrap(),
            TuckerLabel { sign: 2, index: 2 }
        );
        assert_eq!(
            red.lambda(&v(2, "+0+0+")).unwrap(),
            TuckerLabel { sign: 2, index: 1 }
        );
        let b13 = Subset::from_elements(5, [1, 3]).unwrap();
        assert_eq!(
            red.lambda(&v(2, "+-+00")).unwrap(),
            TuckerLabel {
                sign: 2,
                index: c.color(&b13) + 2
            }
        );
    }

    #[test]
    fn padding_lengths() {
        assert_eq!(padded_length(5, 2), 5);
        assert_eq!(padded_length(9, 3), 9);
        assert_eq!(padded_length(8, 3), 9);
        assert_eq!(padded_length(6, 5), 9);
    }

    #[test]
    fn equivariance_exhaustive_small() {
        let (_, _, red) = general_5_2();
        for x in canonical_vectors(5, 2) {
            for t in 0..2 {
                assert!(check_equivariance(&red.instance, &x, t).unwrap());
                assert!(check_equivariance(&red.instance, &omega_mul(1, &x), t).unwrap());
            }
        }
    }

    #[test]
    fn chain_solve_general_and_extract() {
        let (f, c, red) = general_5_2();
        let sol = chain_solve(&red.instance).unwrap();
        assert!(check_chain_solution(&red.instance, &sol.chain).unwrap());
        let edge = red.extract(&sol.chain).unwrap();
        assert!(verify_hyperedge(&f, 2, &c, &edge));
    }

    #[test]
    fn chain_solve_almost_stable() {
        let f = Family::almost_stable(5, 2).unwrap();
        let c = crate::kneser::seeded_coloring(&f, 2, 4, &cap()).unwrap();
        let red = TuckerReduction::almost_stable(5, 2, 2, &c).unwrap();
        let sol = chain_solve(&red.instance).unwrap();
        let edge = red.extract(&sol.chain).unwrap();
        assert!(verify_hyperedge(&f, 2, &c, &edge));
    }

    #[test]
    fn instance_rejects_large_s() {
        let inst = random_equivariant_instance(4, 2, 3, 1).unwrap();
        assert!(TuckerInstance::new(4, 2, 4, inst.labeling.clone()).is_err());
        assert!(random_equivariant_instance(4, 2, 4, 1).is_err());
    }

    #[test]
    fn random_instances_solve() {
        for seed in 0..5 {
            let inst = random_equivariant_instance(4, 3, 1, seed).unwrap();
            let sol = chain_solve(&inst).unwrap();
            assert!(check_chain_solution(&inst, &sol.chain).unwrap());
        }
    }

    #[test]
    fn chain_with_repeated_vector_is_rejected() {
        let (_, _, red) = general_5_2();
        let x = v(2, "+-+0-");
        let chain = Chain {
            vectors: vec![x.clone(), x],
        };
        assert!(!check_chain_solution(&red.instance, &chain).unwrap());
    }

    #[test]
    fn table_json_round_trip() {
        let inst = random_equivariant_instance(3, 2, 2, 5).unwrap();
        let text = table_instance_to_json(&inst).unwrap();
        let back = table_instance_from_json(&text).unwrap();
        for x in canonical_vectors(3, 2) {
            assert_eq!(inst.lambda(&x).unwrap(), back.lambda(&x).unwrap());
        }
    }

    #[test]
    fn general_rejects_wrong_budget() {
        let f = Family::all_k(5, 2).unwrap();
        let c = upper_bound_coloring(5, 2, 2).unwrap();
        assert!(TuckerReduction::general(&f, &c, 2, &cap()).is_err());
    }
}

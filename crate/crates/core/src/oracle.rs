//! Subset-query oracles over a coloured family, fault injection, and the
//! routines that turn inconsistent answers into checkable violations.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kneser::Coloring;
use crate::sets::{Family, SizeCap, Subset};

/// Answers `S(D, i)`: does `D` contain a member of colour `i`?
#[derive(Debug, Clone)]
pub struct SubsetOracle {
    n: usize,
    m: usize,
    /// Per subset, a bitmask of the colours answered 1.
    table: Arc<Vec<u64>>,
    overrides: Arc<HashMap<(u64, usize), bool>>,
}

impl SubsetOracle {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn query(&self, d: &Subset, i: usize) -> bool {
        self.query_bits(d.bits(), i)
    }

    pub(crate) fn query_bits(&self, bits: u64, i: usize) -> bool {
        if i < 1 || i > self.m {
            return false;
        }
        if let Some(&v) = self.overrides.get(&(bits, i)) {
            return v;
        }
        self.table[bits as usize] & (1 << (i - 1)) != 0
    }

    /// Number of answers that differ from the underlying table.
    pub fn fault_count(&self) -> usize {
        self.overrides
            .iter()
            .filter(|(&(bits, i), &v)| (self.table[bits as usize] & (1 << (i - 1)) != 0) != v)
            .count()
    }
}

/// The oracle that answers truthfully for `coloring` on `family`.
pub fn honest_subset_oracle(
    family: &Family,
    coloring: &Coloring,
    cap: &SizeCap,
) -> Result<SubsetOracle> {
    let n = family.n();
    cap.check_ground(n)?;
    if coloring.n() != n {
        return Err(Error::GroundSetMismatch {
            expected: n,
            found: coloring.n(),
        });
    }
    let m = coloring.m();
    if m > 64 {
        return Err(Error::SizeCap {
            what: "colour count",
            limit: 64,
            actual: m,
        });
    }
    let mut table = vec![0u64; 1 << n];
    for b in family.members(cap)? {
        let c = coloring.color(&b);
        table[b.bits() as usize] |= 1 << (c - 1);
    }
    // close upwards: a set answers every colour found in any subset
    for bit in 0..n {
        let step = 1usize << bit;
        for d in 0..table.len() {
            if d & step != 0 {
                table[d] |= table[d ^ step];
            }
        }
    }
    Ok(SubsetOracle {
        n,
        m,
        table: Arc::new(table),
        overrides: Arc::new(HashMap::new()),
    })
}

/// Answers to flip in an oracle. Each listed flip toggles the answer at
/// `(set, color)`; `random_flips` more are drawn from the seed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec {
    #[serde(default)]
    pub flips: Vec<Flip>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub random_flips: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flip {
    pub set: Vec<usize>,
    pub color: usize,
}

impl FaultSpec {
    pub fn is_empty(&self) -> bool {
        self.flips.is_empty() && self.random_flips == 0
    }
}

/// Applies `fault` on top of `oracle`.
pub fn corrupt_oracle(oracle: &SubsetOracle, fault: &FaultSpec, seed: u64) -> Result<SubsetOracle> {
    let mut out = oracle.clone();
    let mut overrides = (*oracle.overrides).clone();
    let mut toggle = |bits: u64, i: usize| {
        let now = overrides
            .get(&(bits, i))
            .copied()
            .unwrap_or(oracle.table[bits as usize] & (1 << (i - 1)) != 0);
        overrides.insert((bits, i), !now);
    };
    for f in &fault.flips {
        let d = Subset::from_elements(oracle.n, f.set.iter().copied())?;
        if f.color < 1 || f.color > oracle.m {
            return Err(Error::contract(format!(
                "flip colour {} outside [1, {}]",
                f.color, oracle.m
            )));
        }
        toggle(d.bits(), f.color);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fault.random_flips {
        let bits = rng.gen_range(0..(1u64 << oracle.n));
        let i = rng.gen_range(1..=oracle.m);
        toggle(bits, i);
    }
    out.overrides = Arc::new(overrides);
    Ok(out)
}

/// A certificate that an oracle disagrees with the colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `B` is a member of colour `color` inside `D`, yet `S(D, color) = 0`.
    FalseNegative { b: Subset, d: Subset, color: usize },
    /// `S(D, color) = 1`, every child answers 0, and `D` is not itself a
    /// member of colour `color`.
    FalsePositive { d: Subset, color: usize },
}

/// A family, a colouring of it, and an oracle claiming to answer subset
/// queries for that colouring.
#[derive(Debug, Clone)]
pub struct KneserSQInstance {
    pub family: Family,
    pub coloring: Coloring,
    pub oracle: SubsetOracle,
    pub r: usize,
}

impl KneserSQInstance {
    pub fn new(family: Family, coloring: Coloring, oracle: SubsetOracle, r: usize) -> Result<Self> {
        let n = family.n();
        for found in [coloring.n(), oracle.n()] {
            if found != n {
                return Err(Error::GroundSetMismatch { expected: n, found });
            }
        }
        if coloring.m() != oracle.m() {
            return Err(Error::contract(
                "colouring and oracle disagree on the colour count",
            ));
        }
        Ok(KneserSQInstance {
            family,
            coloring,
            oracle,
            r,
        })
    }

    /// Builds the honest oracle for `coloring`.
    pub fn honest(family: Family, coloring: Coloring, r: usize, cap: &SizeCap) -> Result<Self> {
        let oracle = honest_subset_oracle(&family, &coloring, cap)?;
        Self::new(family, coloring, oracle, r)
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn m(&self) -> usize {
        self.coloring.m()
    }

    pub fn query(&self, d: &Subset, i: usize) -> bool {
        self.oracle.query(d, i)
    }

    fn is_coloured_member(&self, b: &Subset, i: usize) -> bool {
        self.family.is_member(b) && self.coloring.color(b) == i
    }

    fn check_subset(&self, d: &Subset) -> Result<()> {
        if d.n() != self.n() {
            return Err(Error::GroundSetMismatch {
                expected: self.n(),
                found: d.n(),
            });
        }
        Ok(())
    }
}

/// Outcome of descending from a positively answered set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descent {
    Member { set: Subset },
    Violation { violation: Violation },
}

/// From `S(D, i) = 1`, walks down by single-element removals to a member
/// of colour `i` or to a false positive.
pub fn descend_colored_subset(inst: &KneserSQInstance, d: &Subset, i: usize) -> Result<Descent> {
    inst.check_subset(d)?;
    if !inst.query(d, i) {
        return Err(Error::contract(format!("descent needs S({d}, {i}) = 1")));
    }
    let mut cur = *d;
    for _ in 0..=inst.n() {
        if inst.is_coloured_member(&cur, i) {
            return Ok(Descent::Member { set: cur });
        }
        match cur
            .elements()
            .map(|e| cur.without(e))
            .find(|c| inst.query(c, i))
        {
            Some(child) => cur = child,
            None => {
                return Ok(Descent::Violation {
                    violation: Violation::FalsePositive { d: cur, color: i },
                })
            }
        }
    }
    unreachable!("descent removes one element per step")
}

/// From `D1 ⊆ D2` with `S(D1, i) = 1` and `S(D2, i) = 0`, finds a violation.
pub fn violation_from_nested(
    inst: &KneserSQInstance,
    d1: &Subset,
    d2: &Subset,
    i: usize,
) -> Result<Violation> {
    inst.check_subset(d1)?;
    inst.check_subset(d2)?;
    if !d1.is_subset_of(d2) || !inst.query(d1, i) || inst.query(d2, i) {
        return Err(Error::contract(format!(
            "need {d1} ⊆ {d2} with S = 1 on the first and 0 on the second"
        )));
    }
    if inst.is_coloured_member(d1, i) {
        return Ok(Violation::FalseNegative {
            b: *d1,
            d: *d2,
            color: i,
        });
    }
    Ok(match descend_colored_subset(inst, d1, i)? {
        Descent::Member { set } => Violation::FalseNegative {
            b: set,
            d: *d2,
            color: i,
        },
        Descent::Violation { violation } => violation,
    })
}

/// Checks a claimed violation literally against the instance.
pub fn check_violation(inst: &KneserSQInstance, v: &Violation) -> bool {
    match v {
        Violation::FalseNegative { b, d, color } => {
            b.n() == inst.n()
                && d.n() == inst.n()
                && *color >= 1
                && *color <= inst.m()
                && b.is_subset_of(d)
                && inst.is_coloured_member(b, *color)
                && !inst.query(d, *color)
        }
        Violation::FalsePositive { d, color } => {
            d.n() == inst.n()
                && *color >= 1
                && *color <= inst.m()
                && inst.query(d, *color)
                && d.elements().all(|e| !inst.query(&d.without(e), *color))
                && !inst.is_coloured_member(d, *color)
        }
    }
}

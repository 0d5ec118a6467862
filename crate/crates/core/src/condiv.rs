//! Approximate consensus division of `[0,1]` into `p` pieces: divisions,
//! exact strict-ε checking, the reduction from subset-query Kneser
//! instances, a grid solver, and the map from solutions back to
//! monochromatic hyperedges or oracle violations.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kneser::{verify_hyperedge, Hyperedge};
use crate::measure::{
    self, evaluate_valuation, int, level_set, mass_vector, monotonicity_violation_to_s, rat,
    threshold_form, MeasurableSet, Rational,
};
use crate::oracle::{descend_colored_subset, Descent, KneserSQInstance, SubsetOracle, Violation};
use crate::sets::{SizeCap, Subset};

/// A valuation on finite interval unions of `[0,1]`.
pub trait Valuation: Send + Sync + fmt::Debug {
    fn value(&self, e: &MeasurableSet) -> Rational;

    /// Value times `q` for a union of grid cells of width `1/(n q)`, given
    /// the number of cells inside each subinterval. `None` when the
    /// valuation has no integer shortcut.
    fn grid_value(&self, _cells: &[u32], _q: u32) -> Option<u64> {
        None
    }
}

/// The valuation induced by colour `color` of a subset oracle.
#[derive(Debug, Clone)]
pub struct OracleValuation {
    pub oracle: SubsetOracle,
    pub color: usize,
}

impl Valuation for OracleValuation {
    fn value(&self, e: &MeasurableSet) -> Rational {
        evaluate_valuation(&self.oracle, self.color, e, self.oracle.n())
    }

    fn grid_value(&self, cells: &[u32], _q: u32) -> Option<u64> {
        let mut pi: Vec<usize> = (0..cells.len()).collect();
        pi.sort_by_key(|&j| (cells[j], j));
        let mut suffix: u64 = pi.iter().fold(0, |acc, &j| acc | (1 << j));
        let mut prev = 0u32;
        let mut total = 0u64;
        for &j in &pi {
            if self.oracle.query_bits(suffix, self.color) {
                total += u64::from(cells[j] - prev);
            }
            prev = cells[j];
            suffix &= !(1 << j);
        }
        Some(total)
    }
}

/// The valuation that is zero everywhere.
#[derive(Debug, Clone, Copy)]
pub struct ZeroValuation;

impl Valuation for ZeroValuation {
    fn value(&self, _e: &MeasurableSet) -> Rational {
        Rational::zero()
    }

    fn grid_value(&self, _cells: &[u32], _q: u32) -> Option<u64> {
        Some(0)
    }
}

#[derive(Clone)]
pub struct CondivInstance {
    pub p: usize,
    /// Number of equal subintervals the valuations are built on.
    pub n: usize,
    pub valuations: Vec<Arc<dyn Valuation>>,
    pub lipschitz: Rational,
    pub epsilon: Rational,
}

impl fmt::Debug for CondivInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CondivInstance")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("m", &self.m())
            .field("lipschitz", &measure::format_rational(&self.lipschitz))
            .field("epsilon", &measure::format_rational(&self.epsilon))
            .finish()
    }
}

impl CondivInstance {
    pub fn m(&self) -> usize {
        self.valuations.len()
    }

    pub fn cut_budget(&self) -> usize {
        (self.p - 1) * self.m()
    }
}

/// Cuts in `[0,1]` (sorted, repeats allowed) and one piece label per
/// segment between consecutive cuts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Division {
    pub p: usize,
    #[serde(with = "measure::rational_vec")]
    pub cuts: Vec<Rational>,
    pub labels: Vec<usize>,
}

impl Division {
    /// The division with no cuts, everything in piece `label`.
    pub fn whole(p: usize, label: usize) -> Self {
        Division {
            p,
            cuts: Vec::new(),
            labels: vec![label],
        }
    }
}

/// The `p` pieces of a division; piece `t` is at index `t - 1`.
pub fn pieces(d: &Division) -> Result<Vec<MeasurableSet>> {
    if d.p < 1 {
        return Err(Error::contract("a division needs at least one piece"));
    }
    if d.labels.len() != d.cuts.len() + 1 {
        return Err(Error::contract(format!(
            "{} cuts need {} labels, got {}",
            d.cuts.len(),
            d.cuts.len() + 1,
            d.labels.len()
        )));
    }
    if let Some(&bad) = d.labels.iter().find(|&&l| l < 1 || l > d.p) {
        return Err(Error::contract(format!("label {bad} outside [1, {}]", d.p)));
    }
    let mut bounds = Vec::with_capacity(d.cuts.len() + 2);
    bounds.push(Rational::zero());
    for c in &d.cuts {
        if c.is_negative() || c > &Rational::one() || c < bounds.last().expect("non-empty") {
            return Err(Error::contract("cuts must be sorted inside [0,1]"));
        }
        bounds.push(c.clone());
    }
    bounds.push(Rational::one());
    let mut raw: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); d.p];
    for (seg, &label) in d.labels.iter().enumerate() {
        raw[label - 1].push((bounds[seg].clone(), bounds[seg + 1].clone()));
    }
    raw.into_iter().map(MeasurableSet::new).collect()
}

fn piece_values(inst: &CondivInstance, parts: &[MeasurableSet]) -> Vec<Vec<Rational>> {
    inst.valuations
        .iter()
        .map(|v| parts.iter().map(|a| v.value(a)).collect())
        .collect()
}

/// Largest `|v_i(A_t) - v_i(A_t')|` over all valuations and piece pairs.
pub fn largest_gap(inst: &CondivInstance, d: &Division) -> Result<Rational> {
    let parts = pieces(d)?;
    let mut worst = Rational::zero();
    for row in piece_values(inst, &parts) {
        let hi = row.iter().max().cloned().unwrap_or_else(Rational::zero);
        let lo = row.iter().min().cloned().unwrap_or_else(Rational::zero);
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

/// True iff `d` respects the cut budget and every valuation differs by
/// strictly less than ε between every two pieces.
pub fn check_solution(inst: &CondivInstance, d: &Division) -> bool {
    if d.p != inst.p || d.cuts.len() > inst.cut_budget() {
        return false;
    }
    match largest_gap(inst, d) {
        Ok(gap) => gap < inst.epsilon,
        Err(_) => false,
    }
}

pub fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Colour budget `floor((cd - 1) / (p - 1))` for a defect `cd`; rejects a
/// budget below one.
pub fn condiv_budget(p: usize, cd: usize) -> Result<usize> {
    if p < 2 {
        return Err(Error::contract(format!("p must be at least 2, got {p}")));
    }
    let m = cd.saturating_sub(1) / (p - 1);
    if m == 0 {
        return Err(Error::contract(format!(
            "degenerate budget: defect {cd} leaves no colours for p = {p}"
        )));
    }
    Ok(m)
}

/// ε used when none is given: 1 for two pieces, 1/2 otherwise.
pub fn default_epsilon(p: usize) -> Rational {
    if p == 2 {
        int(1)
    } else {
        rat(1, 2)
    }
}

/// Largest ε for which solutions still map back to hyperedges.
pub fn max_extractable_epsilon(p: usize) -> Rational {
    default_epsilon(p)
}

/// One valuation per colour, `L = n`, and ε as given (or the default).
pub fn reduce_kneser_to_condiv(
    inst: &KneserSQInstance,
    p: usize,
    eps: Option<Rational>,
    cap: &SizeCap,
) -> Result<CondivInstance> {
    if !is_prime(p) {
        return Err(Error::contract(format!("p = {p} is not prime")));
    }
    if inst.r != p {
        return Err(Error::contract(format!(
            "instance asks for {}-hyperedges but p = {p}",
            inst.r
        )));
    }
    let cd = inst.family.defect(p, cap)?;
    let m = condiv_budget(p, cd)?;
    if inst.m() != m {
        return Err(Error::contract(format!(
            "colouring uses {} colours, the budget for defect {cd} is {m}",
            inst.m()
        )));
    }
    let epsilon = eps.unwrap_or_else(|| default_epsilon(p));
    if !epsilon.is_positive() || epsilon > Rational::one() {
        return Err(Error::contract("ε must lie in (0, 1]"));
    }
    let valuations = (1..=m)
        .map(|color| {
            Arc::new(OracleValuation {
                oracle: inst.oracle.clone(),
                color,
            }) as Arc<dyn Valuation>
        })
        .collect();
    Ok(CondivInstance {
        p,
        n: inst.n(),
        valuations,
        lipschitz: int(inst.n() as i64),
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub initial_denominator: usize,
    pub max_doublings: u32,
}

impl GridConfig {
    pub fn for_instance(inst: &CondivInstance) -> Self {
        GridConfig {
            initial_denominator: 4 * inst.n,
            max_doublings: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridSolution {
    pub division: Division,
    pub denominator: usize,
    pub nodes: u64,
}

/// Restricted-growth label sequences of the given length over `[p]` with
/// no two equal neighbours, lexicographic.
fn labelings(len: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, p: usize, cur: &mut Vec<usize>, top: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for l in 1..=(top + 1).min(p) {
            if cur.last() == Some(&l) {
                continue;
            }
            cur.push(l);
            rec(len, p, cur, top.max(l), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, p, &mut Vec::with_capacity(len), 0, &mut out);
    out
}

struct GridEval<'a> {
    inst: &'a CondivInstance,
    n: usize,
    q: u32,
    denominator: usize,
    /// ε as an exact integer ratio, if it fits.
    eps: Option<(i128, i128)>,
}

impl GridEval<'_> {
    fn accepts(&self, cuts: &[usize], labels: &[usize]) -> bool {
        let p = self.inst.p;
        let q = self.q as usize;
        let mut cells = vec![vec![0u32; self.n]; p];
        let mut start = 0;
        for (seg, &label) in labels.iter().enumerate() {
            let end = cuts.get(seg).copied().unwrap_or(self.denominator);
            let row = &mut cells[label - 1];
            for (j, c) in row.iter_mut().enumerate() {
                let lo = start.max(j * q);
                let hi = end.min((j + 1) * q);
                if lo < hi {
                    *c += (hi - lo) as u32;
                }
            }
            start = end;
        }
        if let Some((num, den)) = self.eps {
            let mut fast = true;
            'vals: for v in &self.inst.valuations {
                let mut lo = u64::MAX;
                let mut hi = 0u64;
                for row in &cells {
                    match v.grid_value(row, self.q) {
                        Some(x) => {
                            lo = lo.min(x);
                            hi = hi.max(x);
                        }
                        None => {
                            fast = false;
                            break 'vals;
                        }
                    }
                }
                // (hi - lo) / q < num / den
                if i128::from(hi - lo) * den >= num * i128::from(self.q) {
                    return false;
                }
            }
            if fast {
                return true;
            }
        }
        check_solution(self.inst, &self.division(cuts, labels))
    }

    fn division(&self, cuts: &[usize], labels: &[usize]) -> Division {
        let d = self.denominator as i64;
        Division {
            p: self.inst.p,
            cuts: cuts.iter().map(|&c| rat(c as i64, d)).collect(),
            labels: labels.to_vec(),
        }
    }

    /// First accepted division on this grid, searched by number of cuts,
    /// then cut positions, then labels.
    fn search(&self, nodes: &AtomicU64) -> Option<Division> {
        let budget = self
            .inst
            .cut_budget()
            .min(self.denominator.saturating_sub(1));
        for k in 0..=budget {
            let labels = labelings(k + 1, self.inst.p);
            if k == 0 {
                nodes.fetch_add(1, Ordering::Relaxed);
                if self.accepts(&[], &labels[0]) {
                    return Some(self.division(&[], &labels[0]));
                }
                continue;
            }
            let hit = (1..self.denominator)
                .into_par_iter()
                .find_map_first(|first| {
                    let mut cuts = vec![first];
                    self.extend(&mut cuts, k, &labels, nodes)
                });
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    fn extend(
        &self,
        cuts: &mut Vec<usize>,
        k: usize,
        labels: &[Vec<usize>],
        nodes: &AtomicU64,
    ) -> Option<Division> {
        if cuts.len() == k {
            for l in labels {
                nodes.fetch_add(1, Ordering::Relaxed);
                if self.accepts(cuts, l) {
                    return Some(self.division(cuts, l));
                }
            }
            return None;
        }
        let from = cuts.last().expect("first cut placed") + 1;
        let room = k - cuts.len();
        for c in from..self.denominator {
            if self.denominator - c < room {
                break;
            }
            cuts.push(c);
            let hit = self.extend(cuts, k, labels, nodes);
            cuts.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// Exhaustive search over divisions whose cuts lie on the grid
/// `{0, 1/D, ..., 1}`, `D` a multiple of `n`, doubling `D` after each
/// failed round.
pub fn grid_solve(inst: &CondivInstance, config: GridConfig) -> Result<GridSolution> {
    let n = inst.n;
    let mut denominator = config.initial_denominator;
    if n == 0 || denominator == 0 || !denominator.is_multiple_of(n) {
        return Err(Error::contract(format!(
            "grid denominator {denominator} must be a positive multiple of n = {n}"
        )));
    }
    let eps = match (
        inst.epsilon.numer().to_i128(),
        inst.epsilon.denom().to_i128(),
    ) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let nodes = AtomicU64::new(0);
    for _ in 0..=config.max_doublings {
        let q = u32::try_from(denominator / n)
            .map_err(|_| Error::Exhausted(format!("grid denominator {denominator} too large")))?;
        let eval = GridEval {
            inst,
            n,
            q,
            denominator,
            eps,
        };
        if let Some(division) = eval.search(&nodes) {
            if !check_solution(inst, &division) {
                return Err(Error::contract(
                    "grid evaluation disagrees with the exact check",
                ));
            }
            return Ok(GridSolution {
                division,
                denominator,
                nodes: nodes.into_inner(),
            });
        }
        denominator *= 2;
    }
    Err(Error::Exhausted(format!(
        "no division found on grids up to denominator {}",
        denominator / 2
    )))
}

/// What a consensus-division solution maps back to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Extraction {
    Hyperedge { edge: Hyperedge },
    Violation { violation: Violation },
}

/// A solution of the consensus-division problem: a division, or a witness
/// that some valuation is not monotone or not Lipschitz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CondivSolution {
    Division(Division),
    MonotonicityViolation {
        color: usize,
        smaller: MeasurableSet,
        larger: MeasurableSet,
    },
    LipschitzViolation {
        color: usize,
        first: MeasurableSet,
        second: MeasurableSet,
    },
}

/// Looks for `D' ⊂ D ⊆ [n]`, `|D \ D'| = 1`, with `v(E_D') > v(E_D)`
/// where `E_D` is the union of the subintervals indexed by `D`.
pub fn find_monotonicity_violation(
    inst: &CondivInstance,
    cap: &SizeCap,
) -> Result<Option<CondivSolution>> {
    let n = inst.n;
    cap.check_ground(n)?;
    let sets: Vec<MeasurableSet> = (0..1u64 << n)
        .map(|bits| MeasurableSet::from_subintervals(n, &Subset::from_bits(n, bits)))
        .collect();
    for (i, v) in inst.valuations.iter().enumerate() {
        let values: Vec<Rational> = sets.iter().map(|e| v.value(e)).collect();
        for bits in 1..1u64 << n {
            let mut rest = bits;
            while rest != 0 {
                let low = rest & rest.wrapping_neg();
                rest ^= low;
                let smaller = (bits ^ low) as usize;
                if values[smaller] > values[bits as usize] {
                    return Ok(Some(CondivSolution::MonotonicityViolation {
                        color: i + 1,
                        smaller: sets[smaller].clone(),
                        larger: sets[bits as usize].clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Maps any solution of the reduced instance back to the Kneser instance.
pub fn extract_any(
    inst: &KneserSQInstance,
    solution: &CondivSolution,
    p: usize,
    eps: Option<Rational>,
    cap: &SizeCap,
) -> Result<Extraction> {
    match solution {
        CondivSolution::Division(d) => extract_solution(inst, d, p, eps, cap),
        CondivSolution::MonotonicityViolation {
            color,
            smaller,
            larger,
        } => monotonicity_violation_to_s(inst, smaller, larger, *color)
            .map(|violation| Extraction::Violation { violation }),
        CondivSolution::LipschitzViolation {
            color,
            first,
            second,
        } => measure::lipschitz_violation_to_s(inst, first, second, *color)
            .map(|violation| Extraction::Violation { violation }),
    }
}

/// Indices `j` whose open subinterval `((j-1)/n, j/n)` holds a cut.
pub fn cut_intervals(d: &Division, n: usize) -> Subset {
    let scale = int(n as i64);
    let mut bits = 0u64;
    for c in &d.cuts {
        let pos = c * &scale;
        if !pos.is_integer() {
            let j = pos
                .floor()
                .to_integer()
                .to_usize()
                .expect("cut inside [0,1]");
            bits |= 1 << j;
        }
    }
    Subset::from_bits(n, bits)
}

/// Maps a division accepted by the reduced instance to a monochromatic
/// `p`-hyperedge or to a violation of the oracle.
pub fn extract_solution(
    inst: &KneserSQInstance,
    d: &Division,
    p: usize,
    eps: Option<Rational>,
    cap: &SizeCap,
) -> Result<Extraction> {
    let cinst = reduce_kneser_to_condiv(inst, p, eps, cap)?;
    if cinst.epsilon > max_extractable_epsilon(p) {
        return Err(Error::contract(format!(
            "extraction needs ε <= {}",
            measure::format_rational(&max_extractable_epsilon(p))
        )));
    }
    if !check_solution(&cinst, d) {
        return Err(Error::contract(
            "division is not a solution of the reduced instance",
        ));
    }
    let n = inst.n();
    let parts = pieces(d)?;
    let masses: Vec<Vec<Rational>> = parts.iter().map(|a| mass_vector(a, n)).collect();
    let cut = cut_intervals(d, n);
    let whole: Vec<Subset> = masses
        .iter()
        .map(|x| level_set(x, &Rational::one(), n) - cut)
        .collect();

    let Some((t1, b)) = whole
        .iter()
        .enumerate()
        .find_map(|(t, mt)| inst.family.min_member_within(mt.bits()).map(|b| (t, b)))
    else {
        return Err(Error::contract(
            "no piece covers a family member; the colour budget is not below the defect",
        ));
    };
    let ell = inst.coloring.color(&b);
    let vio = |violation| Ok(Extraction::Violation { violation });
    if !inst.query(&b, ell) {
        return vio(Violation::FalseNegative {
            b,
            d: b,
            color: ell,
        });
    }
    let e = MeasurableSet::from_subintervals(n, &b);
    if let Err(v) = threshold_form(inst, &e, ell)? {
        return vio(v);
    }
    let v_full = evaluate_valuation(&inst.oracle, ell, &parts[t1], n);
    if v_full < Rational::one() {
        return vio(monotonicity_violation_to_s(inst, &e, &parts[t1], ell)?);
    }

    let targets: Vec<usize> = if p == 2 {
        vec![1 - t1]
    } else {
        (0..p).collect()
    };
    let mut sets: Vec<Option<Subset>> = vec![None; p];
    if p == 2 {
        sets[t1] = Some(b);
    }
    let floor = if p == 2 { Rational::zero() } else { rat(1, 2) };
    for t in targets {
        let a = match threshold_form(inst, &parts[t], ell)? {
            Ok(a) => a,
            Err(v) => return vio(v),
        };
        if a <= floor {
            return Err(Error::contract(format!(
                "piece {} has value {} for colour {ell}, contradicting the ε bound",
                t + 1,
                measure::format_rational(&a)
            )));
        }
        let level = level_set(&masses[t], &a, n);
        match descend_colored_subset(inst, &level, ell)? {
            Descent::Member { set } => sets[t] = Some(set),
            Descent::Violation { violation } => return vio(violation),
        }
    }
    let edge = Hyperedge::new(
        sets.into_iter()
            .map(|s| s.expect("every piece settled"))
            .collect(),
    );
    if !verify_hyperedge(&inst.family, p, &inst.coloring, &edge) {
        return Err(Error::contract(
            "extracted sets do not form a monochromatic hyperedge",
        ));
    }
    Ok(Extraction::Hyperedge { edge })
}

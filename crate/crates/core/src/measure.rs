//! Finite unions of rational intervals in `[0,1]`, their mass vectors over
//! the `n` equal subintervals, and the valuations induced by a subset
//! oracle together with the violation conversions for them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::oracle::{violation_from_nested, KneserSQInstance, SubsetOracle, Violation};
use crate::sets::Subset;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Parses `"p/q"`, an integer, or a decimal such as `"0.375"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if negative { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_rational().map_err(de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawRational {
        Text(String),
        Int(i64),
    }

    impl RawRational {
        pub(crate) fn into_rational(self) -> Result<Rational> {
            match self {
                RawRational::Text(t) => parse_rational(&t),
                RawRational::Int(i) => Ok(int(i)),
            }
        }
    }
}

/// Serde adapter for a list of rationals.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<rational_str::RawRational>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_rational().map_err(de::Error::custom))
            .collect()
    }
}

/// A finite union of intervals `[a, b)` inside `[0,1]`, kept sorted,
/// disjoint and non-adjacent.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MeasurableSet {
    intervals: Vec<(Rational, Rational)>,
}

impl MeasurableSet {
    pub fn empty() -> Self {
        MeasurableSet::default()
    }

    pub fn full() -> Self {
        MeasurableSet {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// Normalises a list of intervals; each must satisfy `0 <= a <= b <= 1`.
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        for (a, b) in &intervals {
            if a.is_negative() || b > &Rational::one() || a > b {
                return Err(Error::contract(format!(
                    "interval [{}, {}] not inside [0,1]",
                    format_rational(a),
                    format_rational(b)
                )));
            }
        }
        Ok(Self::normalised(intervals))
    }

    fn normalised(mut raw: Vec<(Rational, Rational)>) -> Self {
        raw.retain(|(a, b)| a < b);
        raw.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        MeasurableSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Self::normalised(all)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = &self.intervals[i];
            let (a2, b2) = &other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalised(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut at = Rational::zero();
        for (a, b) in &self.intervals {
            if &at < a {
                out.push((at.clone(), a.clone()));
            }
            at = b.clone();
        }
        if at < Rational::one() {
            out.push((at, Rational::one()));
        }
        MeasurableSet { intervals: out }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn sym_diff(&self, other: &Self) -> Self {
        self.difference(other).union(&other.difference(self))
    }

    /// Inclusion up to measure zero.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).measure().is_zero()
    }

    /// The union of the subintervals `((j-1)/n, j/n)` for `j` in `indices`.
    pub fn from_subintervals(n: usize, indices: &Subset) -> Self {
        let n = n as i64;
        Self::normalised(
            indices
                .elements()
                .map(|j| (rat(j as i64 - 1, n), rat(j as i64, n)))
                .collect(),
        )
    }
}

impl fmt::Debug for MeasurableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MeasurableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (k, (a, b)) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{}, {})", format_rational(a), format_rational(b))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MeasurableSetJson {
    intervals: Vec<IntervalJson>,
}

#[derive(Serialize, Deserialize)]
struct IntervalJson(
    #[serde(with = "rational_str")] Rational,
    #[serde(with = "rational_str")] Rational,
);

impl Serialize for MeasurableSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasurableSetJson {
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| IntervalJson(a.clone(), b.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurableSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MeasurableSetJson::deserialize(d)?;
        MeasurableSet::new(
            raw.intervals
                .into_iter()
                .map(|IntervalJson(a, b)| (a, b))
                .collect(),
        )
        .map_err(de::Error::custom)
    }
}

pub fn measure(e: &MeasurableSet) -> Rational {
    e.measure()
}

pub fn sym_diff_measure(e1: &MeasurableSet, e2: &MeasurableSet) -> Rational {
    e1.sym_diff(e2).measure()
}

/// Normalised masses `x_j = n * μ(E ∩ I_j)` on the `n` equal subintervals.
pub fn mass_vector(e: &MeasurableSet, n: usize) -> Vec<Rational> {
    let nn = n as i64;
    let scale = int(nn);
    let mut x = vec![Rational::zero(); n];
    for (a, b) in &e.intervals {
        for (j, xj) in x.iter_mut().enumerate() {
            let lo = rat(j as i64, nn);
            let hi = rat(j as i64 + 1, nn);
            let l = a.max(&lo);
            let h = b.min(&hi);
            if l < h {
                *xj += (h - l) * &scale;
            }
        }
    }
    x
}

/// Indices sorted by ascending mass, ties by ascending index.
fn ascending_order(x: &[Rational]) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..x.len()).collect();
    pi.sort_by(|&a, &b| x[a].cmp(&x[b]).then(a.cmp(&b)));
    pi
}

/// The suffixes `{π(j), ..., π(n)}` for `j = 1..=n+1` (the last one empty).
fn suffixes(n: usize, pi: &[usize]) -> Vec<u64> {
    let mut out = vec![0u64; n + 1];
    for j in (0..n).rev() {
        out[j] = out[j + 1] | (1 << pi[j]);
    }
    out
}

/// The telescoping value on a mass vector:
/// `Σ_j (x_π(j) - x_π(j-1)) · S({π(j), ..., π(n)}, i)`.
pub fn valuation_at(s: &SubsetOracle, i: usize, x: &[Rational]) -> Rational {
    let pi = ascending_order(x);
    let suffix = suffixes(x.len(), &pi);
    let mut prev = Rational::zero();
    let mut v = Rational::zero();
    for (j, &idx) in pi.iter().enumerate() {
        if s.query_bits(suffix[j], i) {
            v += &x[idx] - &prev;
        }
        prev = x[idx].clone();
    }
    v
}

pub fn evaluate_valuation(s: &SubsetOracle, i: usize, e: &MeasurableSet, n: usize) -> Rational {
    valuation_at(s, i, &mass_vector(e, n))
}

/// Largest level `a ∈ [0,1]` whose super-level set `{j : x_j >= a}` is
/// answered 1, or 0 if none is.
pub fn threshold_at(s: &SubsetOracle, i: usize, x: &[Rational]) -> Rational {
    let n = x.len();
    let top = x.iter().max().cloned().unwrap_or_else(Rational::zero);
    if top < Rational::one() && s.query_bits(0, i) {
        return Rational::one();
    }
    let mut levels: Vec<&Rational> = x.iter().collect();
    levels.sort();
    levels.dedup();
    for level in levels.into_iter().rev() {
        if s.query_bits(level_set(x, level, n).bits(), i) {
            return level.clone();
        }
    }
    Rational::zero()
}

pub fn threshold_value(s: &SubsetOracle, i: usize, e: &MeasurableSet, n: usize) -> Rational {
    threshold_at(s, i, &mass_vector(e, n))
}

/// `{j : x_j >= a}`.
pub fn level_set(x: &[Rational], a: &Rational, n: usize) -> Subset {
    let mut bits = 0u64;
    for (j, xj) in x.iter().enumerate() {
        if xj >= a {
            bits |= 1 << j;
        }
    }
    Subset::from_bits(n, bits)
}

fn check_color(inst: &KneserSQInstance, i: usize) -> Result<()> {
    if i < 1 || i > inst.m() {
        return Err(Error::contract(format!(
            "colour {i} outside [1, {}]",
            inst.m()
        )));
    }
    Ok(())
}

/// From `v_i(E) != a^E_i`, finds a violation of the oracle.
pub fn valuation_violation_witness(
    inst: &KneserSQInstance,
    e: &MeasurableSet,
    i: usize,
) -> Result<Violation> {
    check_color(inst, i)?;
    let n = inst.n();
    let x = mass_vector(e, n);
    let s = &inst.oracle;
    if valuation_at(s, i, &x) == threshold_at(s, i, &x) {
        return Err(Error::contract("valuation agrees with the threshold value"));
    }
    let pi = ascending_order(&x);
    let suffix = suffixes(n, &pi);
    for j in 0..n {
        if !s.query_bits(suffix[j], i) && s.query_bits(suffix[j + 1], i) {
            return violation_from_nested(
                inst,
                &Subset::from_bits(n, suffix[j + 1]),
                &Subset::from_bits(n, suffix[j]),
                i,
            );
        }
    }
    // the answers along the suffix chain are monotone, so the mismatch
    // comes from the empty set answering 1
    debug_assert!(s.query_bits(0, i));
    match crate::oracle::descend_colored_subset(inst, &Subset::empty(n), i)? {
        crate::oracle::Descent::Violation { violation } => Ok(violation),
        crate::oracle::Descent::Member { .. } => Err(Error::contract("the empty set is a member")),
    }
}

/// Value and threshold agree, or the witness for their disagreement.
pub(crate) fn threshold_form(
    inst: &KneserSQInstance,
    e: &MeasurableSet,
    i: usize,
) -> Result<std::result::Result<Rational, Violation>> {
    let x = mass_vector(e, inst.n());
    let v = valuation_at(&inst.oracle, i, &x);
    if v == threshold_at(&inst.oracle, i, &x) {
        Ok(Ok(v))
    } else {
        Ok(Err(valuation_violation_witness(inst, e, i)?))
    }
}

/// From `E1 ⊆ E2` with `v_i(E2) < v_i(E1)`, finds a violation of the oracle.
pub fn monotonicity_violation_to_s(
    inst: &KneserSQInstance,
    e1: &MeasurableSet,
    e2: &MeasurableSet,
    i: usize,
) -> Result<Violation> {
    check_color(inst, i)?;
    let n = inst.n();
    if !e1.is_subset_of(e2) {
        return Err(Error::contract("monotonicity witness needs E1 ⊆ E2"));
    }
    let v1 = evaluate_valuation(&inst.oracle, i, e1, n);
    let v2 = evaluate_valuation(&inst.oracle, i, e2, n);
    if v2 >= v1 {
        return Err(Error::contract("no monotonicity break: v(E2) >= v(E1)"));
    }
    let a1 = match threshold_form(inst, e1, i)? {
        Ok(a) => a,
        Err(v) => return Ok(v),
    };
    if let Err(v) = threshold_form(inst, e2, i)? {
        return Ok(v);
    }
    let d1 = level_set(&mass_vector(e1, n), &a1, n);
    let d2 = level_set(&mass_vector(e2, n), &a1, n);
    violation_from_nested(inst, &d1, &d2, i)
}

/// From `|v_i(E1) - v_i(E2)| > n · μ(E1 △ E2)`, finds a violation of the
/// oracle. The valuations built here are always `n`-Lipschitz, so for them
/// the precondition never holds; the routine still follows the full case
/// analysis for arbitrary inputs.
pub fn lipschitz_violation_to_s(
    inst: &KneserSQInstance,
    e1: &MeasurableSet,
    e2: &MeasurableSet,
    i: usize,
) -> Result<Violation> {
    check_color(inst, i)?;
    let n = inst.n();
    let delta = sym_diff_measure(e1, e2);
    let gap = int(n as i64) * &delta;
    let mut v1 = evaluate_valuation(&inst.oracle, i, e1, n);
    let mut v2 = evaluate_valuation(&inst.oracle, i, e2, n);
    if (&v1 - &v2).abs() <= gap {
        return Err(Error::contract("no Lipschitz break between the two sets"));
    }
    let (mut e1, mut e2) = (e1, e2);
    if v1 < v2 {
        std::mem::swap(&mut e1, &mut e2);
        std::mem::swap(&mut v1, &mut v2);
    }
    let e3 = e1.union(e2);
    let v3 = evaluate_valuation(&inst.oracle, i, &e3, n);
    if v3 < v1 {
        return monotonicity_violation_to_s(inst, e1, &e3, i);
    }
    if let Err(v) = threshold_form(inst, e2, i)? {
        return Ok(v);
    }
    let a3 = match threshold_form(inst, &e3, i)? {
        Ok(a) => a,
        Err(v) => return Ok(v),
    };
    let d3 = level_set(&mass_vector(&e3, n), &a3, n);
    let d2 = level_set(&mass_vector(e2, n), &(a3 - gap), n);
    violation_from_nested(inst, &d3, &d2, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::Coloring;
    use crate::oracle::{check_violation, corrupt_oracle, FaultSpec, Flip};
    use crate::sets::{Family, SizeCap};

    fn iv(a: (i64, i64), b: (i64, i64)) -> MeasurableSet {
        MeasurableSet::interval(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    fn constant_instance(n: usize) -> KneserSQInstance {
        let f = Family::all_k(n, 2).unwrap();
        KneserSQInstance::honest(f, Coloring::constant(n), 2, &SizeCap::default()).unwrap()
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure(&MeasurableSet::full()), int(1));
        assert_eq!(
            sym_diff_measure(&iv((0, 1), (1, 2)), &iv((1, 4), (3, 4))),
            rat(1, 2)
        );
        assert_eq!(measure(&MeasurableSet::empty()), int(0));
    }

    #[test]
    fn normalisation_merges() {
        let e = MeasurableSet::new(vec![
            (rat(1, 2), rat(3, 4)),
            (rat(0, 1), rat(1, 4)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 3), rat(1, 3)),
        ])
        .unwrap();
        assert_eq!(e.intervals(), &[(rat(0, 1), rat(3, 4))]);
        assert!(MeasurableSet::interval(rat(1, 2), rat(3, 2)).is_err());
        assert_eq!(e.complement(), iv((3, 4), (1, 1)));
    }

    #[test]
    fn mass_vector_examples() {
        let ones = vec![int(1); 4];
        assert_eq!(mass_vector(&MeasurableSet::full(), 4), ones);
        assert_eq!(
            mass_vector(&iv((0, 1), (1, 8)), 4),
            vec![rat(1, 2), int(0), int(0), int(0)]
        );
        assert_eq!(
            mass_vector(&iv((1, 8), (3, 8)), 4),
            vec![rat(1, 2), rat(1, 2), int(0), int(0)]
        );
    }

    #[test]
    fn valuation_examples() {
        let inst = constant_instance(4);
        let s = &inst.oracle;
        assert_eq!(evaluate_valuation(s, 1, &MeasurableSet::empty(), 4), int(0));
        assert_eq!(evaluate_valuation(s, 1, &MeasurableSet::full(), 4), int(1));
        let e = iv((0, 1), (3, 8));
        assert_eq!(mass_vector(&e, 4), vec![int(1), rat(1, 2), int(0), int(0)]);
        assert_eq!(evaluate_valuation(s, 1, &e, 4), rat(1, 2));
        assert_eq!(threshold_value(s, 1, &e, 4), rat(1, 2));
        assert_eq!(threshold_value(s, 1, &MeasurableSet::full(), 4), int(1));
        // colour 2 does not exist, so it never answers 1
        assert_eq!(threshold_value(s, 2, &MeasurableSet::full(), 4), int(0));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/8").unwrap(), rat(3, 8));
        assert_eq!(parse_rational("0.375").unwrap(), rat(3, 8));
        assert_eq!(parse_rational("1").unwrap(), int(1));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        let e: MeasurableSet =
            serde_json::from_str(r#"{"intervals":[["0","1/4"],["0.5",1]]}"#).unwrap();
        assert_eq!(e.measure(), rat(3, 4));
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"intervals":[["0","1/4"],["1/2","1"]]}"#
        );
    }

    fn corrupted(n: usize, flips: &[(&[usize], usize)]) -> KneserSQInstance {
        let inst = constant_instance(n);
        let fault = FaultSpec {
            flips: flips
                .iter()
                .map(|(set, color)| Flip {
                    set: set.to_vec(),
                    color: *color,
                })
                .collect(),
            random_flips: 0,
        };
        let oracle = corrupt_oracle(&inst.oracle, &fault, 0).unwrap();
        KneserSQInstance::new(inst.family, inst.coloring, oracle, 2).unwrap()
    }

    #[test]
    fn witness_from_broken_suffix() {
        // x = (1, 1/2, 0, 0): the suffix {1} answers 1 while {1,2} answers 0
        let inst = corrupted(4, &[(&[1, 2], 1), (&[1], 1)]);
        let e = iv((0, 1), (3, 8));
        let v = evaluate_valuation(&inst.oracle, 1, &e, 4);
        let a = threshold_value(&inst.oracle, 1, &e, 4);
        assert_ne!(v, a);
        let w = valuation_violation_witness(&inst, &e, 1).unwrap();
        assert!(check_violation(&inst, &w));
        assert!(valuation_violation_witness(&constant_instance(4), &e, 1).is_err());
    }

    #[test]
    fn witness_from_empty_set_answer() {
        let inst = corrupted(4, &[(&[], 1)]);
        let e = iv((0, 1), (1, 8));
        assert_eq!(threshold_value(&inst.oracle, 1, &e, 4), int(1));
        let w = valuation_violation_witness(&inst, &e, 1).unwrap();
        assert_eq!(
            w,
            Violation::FalsePositive {
                d: Subset::empty(4),
                color: 1
            }
        );
        assert!(check_violation(&inst, &w));
    }

    #[test]
    fn monotonicity_witness() {
        // the full set loses its answer, so v([0,1]) drops below v([0,1/2])
        let inst = corrupted(4, &[(&[1, 2, 3, 4], 1)]);
        let e1 = iv((0, 1), (1, 2));
        let e2 = MeasurableSet::full();
        let v1 = evaluate_valuation(&inst.oracle, 1, &e1, 4);
        let v2 = evaluate_valuation(&inst.oracle, 1, &e2, 4);
        assert!(v2 < v1);
        let w = monotonicity_violation_to_s(&inst, &e1, &e2, 1).unwrap();
        assert!(check_violation(&inst, &w));
        assert!(monotonicity_violation_to_s(&inst, &e1, &e1, 1).is_err());
        assert!(monotonicity_violation_to_s(&constant_instance(4), &e1, &e2, 1).is_err());
    }

    #[test]
    fn lipschitz_precondition_never_holds() {
        let inst = corrupted(4, &[(&[1, 2, 3, 4], 1), (&[3], 1)]);
        let sets = [
            MeasurableSet::empty(),
            iv((0, 1), (1, 2)),
            iv((1, 8), (5, 8)),
            MeasurableSet::full(),
        ];
        for e1 in &sets {
            for e2 in &sets {
                assert!(lipschitz_violation_to_s(&inst, e1, e2, 1).is_err());
            }
        }
    }
}

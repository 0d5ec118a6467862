#![allow(dead_code)]

use kneser_core::kneser::Coloring;
use kneser_core::measure::{rat, MeasurableSet, Rational};
use kneser_core::sets::{Family, SizeCap, Subset};
use num_traits::Zero;
use rand::Rng;

pub fn cap() -> SizeCap {
    SizeCap::default()
}

/// Subset query answered by scanning all members.
pub fn brute_query(members: &[Subset], coloring: &Coloring, d: u64, i: usize) -> bool {
    members
        .iter()
        .any(|b| b.bits() & !d == 0 && coloring.color(b) == i)
}

pub fn members(family: &Family) -> Vec<Subset> {
    family.members(&cap()).unwrap()
}

/// `x_j = n * μ(E ∩ [(j-1)/n, j/n])`.
pub fn reference_mass(e: &MeasurableSet, n: usize) -> Vec<Rational> {
    let n_i = n as i64;
    (0..n_i)
        .map(|j| {
            let cell = MeasurableSet::interval(rat(j, n_i), rat(j + 1, n_i)).unwrap();
            e.intersection(&cell).measure() * Rational::from_integer(n_i.into())
        })
        .collect()
}

/// Telescoping sum over the masses sorted ascending, ties broken by
/// descending index.
pub fn reference_valuation(query: impl Fn(u64) -> bool, x: &[Rational]) -> Rational {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].cmp(&x[b]).then(b.cmp(&a)));
    let mut suffix: u64 = order.iter().fold(0, |acc, &j| acc | (1 << j));
    let mut prev = Rational::zero();
    let mut total = Rational::zero();
    for &j in &order {
        if query(suffix) {
            total += &x[j] - &prev;
        }
        prev = x[j].clone();
        suffix &= !(1 << j);
    }
    total
}

/// Largest positive level whose super-level set answers 1, else 0.
pub fn reference_threshold(query: impl Fn(u64) -> bool, x: &[Rational]) -> Rational {
    let mut best = Rational::zero();
    for a in x {
        if a.is_zero() {
            continue;
        }
        let level = x
            .iter()
            .enumerate()
            .filter(|(_, y)| *y >= a)
            .fold(0u64, |acc, (j, _)| acc | (1 << j));
        if query(level) && *a > best {
            best = a.clone();
        }
    }
    best
}

/// Up to three intervals with endpoints on the grid `1/den`.
pub fn random_set(rng: &mut impl Rng, den: i64) -> MeasurableSet {
    let count = rng.gen_range(0..=3);
    let intervals = (0..count)
        .map(|_| {
            let a = rng.gen_range(0..=den);
            let b = rng.gen_range(a..=den);
            (rat(a, den), rat(b, den))
        })
        .collect();
    MeasurableSet::new(intervals).unwrap()
}

/// All `x ∈ {0, 1/q, ..., 1}^n`.
pub fn grid_vectors(n: usize, q: i64) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=q).map(move |c| {
                    let mut w = v.clone();
                    w.push(rat(c, q));
                    w
                })
            })
            .collect();
    }
    out
}

/// The longest alternating subsequence by trying every subsequence.
pub fn brute_alt(entries: &[u8]) -> usize {
    let nz: Vec<u8> = entries.iter().copied().filter(|&e| e != 0).collect();
    let mut best = 0;
    for mask in 0u32..1 << nz.len() {
        let pick: Vec<u8> = (0..nz.len())
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| nz[j])
            .collect();
        if pick.windows(2).all(|w| w[0] != w[1]) {
            best = best.max(pick.len());
        }
    }
    best
}

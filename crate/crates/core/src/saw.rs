//! Exact enumeration of self-avoiding walks on the square and triangular
//! lattices.
//!
//! Triangular sites use axial coordinates `(q, r)` with the six neighbours
//! `±(1, 0), ±(0, 1), ±(1, −1)`; the Euclidean position is
//! `(q + r/2, r·√3/2)`, so four times a squared distance,
//! `(2Δq + Δr)² + 3Δr²`, is an integer.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

pub const SQUARE_CAP: usize = 16;
pub const TRIANGULAR_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lattice {
    Square,
    Triangular,
}

impl Lattice {
    pub fn steps(self) -> &'static [(i64, i64)] {
        match self {
            Lattice::Square => &[(1, 0), (0, 1), (-1, 0), (0, -1)],
            Lattice::Triangular => &[(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)],
        }
    }

    pub fn default_cap(self) -> usize {
        match self {
            Lattice::Square => SQUARE_CAP,
            Lattice::Triangular => TRIANGULAR_CAP,
        }
    }

    /// Squared Euclidean length of a displacement, times `scale()`.
    #[inline]
    pub fn scaled_norm2(self, dq: i64, dr: i64) -> u64 {
        match self {
            Lattice::Square => (dq * dq + dr * dr) as u64,
            Lattice::Triangular => ((2 * dq + dr).pow(2) + 3 * dr * dr) as u64,
        }
    }

    /// Factor between [`Lattice::scaled_norm2`] and the true squared length.
    pub fn scale(self) -> u64 {
        match self {
            Lattice::Square => 1,
            Lattice::Triangular => 4,
        }
    }

    /// Order of the point symmetry group fixing the origin.
    fn symmetry(self) -> u64 {
        match self {
            Lattice::Square => 8,
            Lattice::Triangular => 12,
        }
    }
}

impl std::str::FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Lattice::Square),
            "triangular" => Ok(Lattice::Triangular),
            _ => Err(Error::param("lattice", format!("unknown lattice `{s}`"))),
        }
    }
}

/// Exact walk counts `a_1, …, a_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SawCountTable {
    pub lattice: Lattice,
    /// `counts[n − 1] = a_n`.
    pub counts: Vec<BigUint>,
}

impl SawCountTable {
    pub fn max_n(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, n: usize) -> Result<&BigUint> {
        if n == 0 || n > self.counts.len() {
            return Err(Error::MissingEntry { n });
        }
        Ok(&self.counts[n - 1])
    }
}

/// Depth-first walker over self-avoiding walks with an occupancy raster.
struct Walker {
    lattice: Lattice,
    n: usize,
    side: i64,
    occupied: Vec<bool>,
    path: Vec<(i64, i64)>,
}

impl Walker {
    fn new(lattice: Lattice, n: usize) -> Self {
        let side = 2 * n as i64 + 3;
        let mut w = Self {
            lattice,
            n,
            side,
            occupied: vec![false; (side * side) as usize],
            path: Vec::with_capacity(n + 1),
        };
        w.push((0, 0));
        w
    }

    #[inline]
    fn index(&self, s: (i64, i64)) -> usize {
        let h = self.side / 2;
        ((s.1 + h) * self.side + s.0 + h) as usize
    }

    fn push(&mut self, s: (i64, i64)) {
        let i = self.index(s);
        self.occupied[i] = true;
        self.path.push(s);
    }

    fn pop(&mut self) {
        let s = self.path.pop().unwrap();
        let i = self.index(s);
        self.occupied[i] = false;
    }

    /// Calls `visit` on the current walk and on every extension of it with at
    /// most `n` steps.
    fn extend(&mut self, visit: &mut impl FnMut(&Walker)) {
        visit(self);
        if self.path.len() == self.n + 1 {
            return;
        }
        let last = *self.path.last().unwrap();
        for &(dq, dr) in self.lattice.steps() {
            let next = (last.0 + dq, last.1 + dr);
            if !self.occupied[self.index(next)] {
                self.push(next);
                self.extend(visit);
                self.pop();
            }
        }
    }
}

/// Per-depth counts for walks of length ≤ `n` starting with the given step
/// prefix (the prefix's own depths included).
fn count_from(lattice: Lattice, n: usize, prefix: &[(i64, i64)]) -> Vec<u64> {
    let mut w = Walker::new(lattice, n);
    let mut counts = vec![0u64; n + 1];
    let mut pos = (0, 0);
    for &(dq, dr) in prefix {
        pos = (pos.0 + dq, pos.1 + dr);
        w.push(pos);
    }
    if w.path.len() > n + 1 {
        return counts;
    }
    w.extend(&mut |w| counts[w.path.len() - 1] += 1);
    counts
}

/// Per-depth counts using the point symmetries of the lattice: walks are
/// classified by their initial straight run along `(1, 0)` and the side of
/// their first turn. Straight walks stand for `rotations` walks each; the
/// others are explored for one side only and stand for `2·rotations`.
fn pruned_counts(lattice: Lattice, n: usize) -> Vec<u64> {
    let rotations = lattice.symmetry() / 2;
    let upper: &[(i64, i64)] = match lattice {
        Lattice::Square => &[(0, 1)],
        Lattice::Triangular => &[(0, 1), (-1, 1)],
    };
    // Tasks: (run length k ≥ 1, upper turn index).
    let tasks: Vec<(usize, usize)> = (1..n).flat_map(|k| (0..upper.len()).map(move |u| (k, u))).collect();
    let per_task = par::map_trials(tasks.len(), |t| {
        let (k, u) = tasks[t];
        let mut prefix = vec![(1, 0); k];
        prefix.push(upper[u]);
        count_from(lattice, n, &prefix)
    });
    let mut total = vec![0u64; n + 1];
    // Straight walks: one per length, weight `rotations`.
    for t in total.iter_mut().skip(1) {
        *t += rotations;
    }
    for (t, counts) in tasks.iter().zip(&per_task) {
        let k = t.0;
        // Only depths beyond the prefix count; shorter depths are straight walks.
        for d in (k + 1)..=n {
            total[d] += 2 * rotations * counts[d];
        }
    }
    total
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if n > cap {
        return Err(Error::OverCap { n, cap });
    }
    Ok(())
}

/// Exact counts `a_1..a_n` by depth-first backtracking, parallel over
/// first-step branches. With `prune`, only walks in one symmetry class are
/// explored and weighted by the size of their orbit.
pub fn enumerate_saws_with(n: usize, lattice: Lattice, cap: usize, prune: bool) -> Result<SawCountTable> {
    check_cap(n, cap)?;
    let per_depth = if prune {
        pruned_counts(lattice, n)
    } else {
        let firsts = lattice.steps();
        let parts = par::map_trials(firsts.len(), |i| count_from(lattice, n, &firsts[i..=i]));
        let mut total = vec![0u64; n + 1];
        for p in parts {
            for (t, c) in total.iter_mut().zip(p) {
                *t += c;
            }
        }
        total
    };
    Ok(SawCountTable {
        lattice,
        counts: per_depth[1..].iter().map(|&c| BigUint::from(c)).collect(),
    })
}

/// [`enumerate_saws_with`] at the lattice's default cap, with symmetry pruning.
pub fn enumerate_saws(n: usize, lattice: Lattice) -> Result<SawCountTable> {
    enumerate_saws_with(n, lattice, lattice.default_cap(), true)
}

/// `(min_n a_n^{1/n}, a_N / a_{N−1})`: a rigorous upper bound on the
/// connectivity constant and the last count ratio, a heuristic estimate.
pub fn connectivity_bounds(table: &SawCountTable) -> Result<(f64, f64)> {
    let n = table.max_n();
    if n < 2 {
        return Err(Error::param("table", "need at least two counts"));
    }
    let f = |b: &BigUint| b.to_f64().expect("finite");
    let mu_upper = table
        .counts
        .iter()
        .enumerate()
        .map(|(i, a)| f(a).powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min);
    Ok((mu_upper, f(&table.counts[n - 1]) / f(&table.counts[n - 2])))
}

/// `a_{2n}/a_n²`, the probability that two independent uniform `n`-step
/// walks from the origin meet only there.
pub fn nonintersection_exact(n: usize, table: &SawCountTable) -> Result<BigRational> {
    let a2n = table.get(2 * n)?;
    let an = table.get(n)?;
    let num = num_bigint::BigInt::from(a2n.clone());
    let den = num_bigint::BigInt::from(an * an);
    Ok(BigRational::new(num, den))
}

/// Number of ordered pairs `(w, w')` of `n`-step walks from the origin whose
/// ranges meet only at the origin, by direct enumeration of all pairs.
pub fn count_disjoint_pairs(n: usize, lattice: Lattice) -> Result<BigUint> {
    check_cap(n, 8)?;
    let mut walks: Vec<Vec<(i64, i64)>> = Vec::new();
    let mut w = Walker::new(lattice, n);
    w.extend(&mut |w| {
        if w.path.len() == n + 1 {
            walks.push(w.path[1..].to_vec());
        }
    });
    let counts = par::map_trials(walks.len(), |i| {
        let set: rustc_hash::FxHashSet<(i64, i64)> = walks[i].iter().copied().collect();
        walks.iter().filter(|v| v.iter().all(|s| !set.contains(s))).count() as u64
    });
    Ok(counts.into_iter().map(BigUint::from).sum())
}

/// Exact law of the squared diameter of a uniform `n`-step walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterDistribution {
    pub lattice: Lattice,
    pub n: usize,
    /// Squared diameter (times [`Lattice::scale`]) → number of walks.
    pub histogram: BTreeMap<u64, u64>,
}

impl DiameterDistribution {
    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// Mean diameter in lattice units.
    pub fn mean_diameter(&self) -> f64 {
        let s = self.lattice.scale() as f64;
        let sum: f64 = self
            .histogram
            .iter()
            .map(|(&d2, &c)| (d2 as f64 / s).sqrt() * c as f64)
            .sum();
        sum / self.total() as f64
    }
}

/// Diameter histograms for every length `1..=n` in one pass. The diameter
/// (largest distance between two visited sites) is updated incrementally as
/// each site is added.
pub fn diameter_distributions(n: usize, lattice: Lattice) -> Result<Vec<DiameterDistribution>> {
    check_cap(n, lattice.default_cap())?;
    let firsts = lattice.steps();
    let parts = par::map_trials(firsts.len(), |i| {
        let mut hist: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); n + 1];
        let mut w = Walker::new(lattice, n);
        w.push(firsts[i]);
        let mut diam = vec![0u64; n + 2];
        extend_with_diameter(&mut w, &mut diam, &mut hist);
        hist
    });
    let mut out: Vec<DiameterDistribution> = (1..=n)
        .map(|k| DiameterDistribution {
            lattice,
            n: k,
            histogram: BTreeMap::new(),
        })
        .collect();
    for part in parts {
        for (k, h) in part.into_iter().enumerate().skip(1) {
            for (d, c) in h {
                *out[k - 1].histogram.entry(d).or_insert(0) += c;
            }
        }
    }
    Ok(out)
}

fn extend_with_diameter(w: &mut Walker, diam: &mut [u64], hist: &mut [BTreeMap<u64, u64>]) {
    let depth = w.path.len() - 1;
    let last = w.path[depth];
    let reach = w.path[..depth]
        .iter()
        .map(|s| w.lattice.scaled_norm2(last.0 - s.0, last.1 - s.1))
        .max()
        .unwrap_or(0);
    diam[depth] = diam[depth - 1].max(reach);
    *hist[depth].entry(diam[depth]).or_insert(0) += 1;
    if depth == w.n {
        return;
    }
    for &(dq, dr) in w.lattice.steps() {
        let next = (last.0 + dq, last.1 + dr);
        if !w.occupied[w.index(next)] {
            w.push(next);
            extend_with_diameter(w, diam, hist);
            w.pop();
        }
    }
}

/// Diameter law of `n`-step walks.
pub fn diameter_distribution(n: usize, lattice: Lattice) -> Result<DiameterDistribution> {
    Ok(diameter_distributions(n, lattice)?.pop().expect("n ≥ 1"))
}

impl SawCountTable {
    /// `a_n` as a float, for fits and plots.
    pub fn count_f64(&self, n: usize) -> Result<f64> {
        Ok(self.get(n)?.to_f64().unwrap_or(f64::INFINITY))
    }

    /// Submultiplicativity `a_{n+m} ≤ a_n·a_m` for every stored pair.
    pub fn is_submultiplicative(&self) -> bool {
        let n = self.max_n();
        (1..=n).all(|i| (1..=n - i).all(|j| self.counts[i + j - 1] <= &self.counts[i - 1] * &self.counts[j - 1]))
    }
}

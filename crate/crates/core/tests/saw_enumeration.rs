use std::collections::HashSet;

use conflab_core::saw::{
    connectivity_bounds, count_disjoint_pairs, diameter_distribution, enumerate_saws, enumerate_saws_with,
    nonintersection_exact, Lattice, SQUARE_CAP,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

/// Plain recursive enumeration over a hash set of visited sites: no symmetry
/// reduction, no preallocated grid, no shared code with the library.
fn oracle_counts(n: usize, steps: &[(i64, i64)]) -> Vec<u64> {
    fn go(pos: (i64, i64), depth: usize, n: usize, steps: &[(i64, i64)], seen: &mut HashSet<(i64, i64)>, out: &mut [u64]) {
        if depth == n {
            return;
        }
        for &(dx, dy) in steps {
            let next = (pos.0 + dx, pos.1 + dy);
            if seen.insert(next) {
                out[depth] += 1;
                go(next, depth + 1, n, steps, seen, out);
                seen.remove(&next);
            }
        }
    }
    let mut out = vec![0u64; n];
    let mut seen = HashSet::from([(0, 0)]);
    go((0, 0), 0, n, steps, &mut seen, &mut out);
    out
}

const SQUARE_STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const TRIANGULAR_STEPS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

fn as_u64(table: &conflab_core::saw::SawCountTable) -> Vec<u64> {
    table.counts.iter().map(|c| u64::try_from(c).unwrap()).collect()
}

#[test]
fn square_counts_match_unpruned_oracle() {
    let table = enumerate_saws(12, Lattice::Square).unwrap();
    assert_eq!(as_u64(&table), oracle_counts(12, &SQUARE_STEPS));
    assert_eq!(&as_u64(&table)[..4], &[4, 12, 36, 100]);
}

#[test]
fn triangular_counts_match_unpruned_oracle() {
    let table = enumerate_saws(7, Lattice::Triangular).unwrap();
    assert_eq!(as_u64(&table), oracle_counts(7, &TRIANGULAR_STEPS));
    assert_eq!(as_u64(&table)[0], 6);
}

#[test]
fn pruning_does_not_change_counts() {
    for lattice in [Lattice::Square, Lattice::Triangular] {
        let pruned = enumerate_saws_with(9, lattice, SQUARE_CAP, true).unwrap();
        let plain = enumerate_saws_with(9, lattice, SQUARE_CAP, false).unwrap();
        assert_eq!(pruned, plain);
    }
}

#[test]
fn submultiplicative_and_exponential_lower_bound() {
    let table = enumerate_saws(14, Lattice::Square).unwrap();
    assert!(table.is_submultiplicative());
    for n in 1..=14 {
        assert!(table.get(n).unwrap() >= &(BigUint::from(1u32) << n), "a_{n} < 2^{n}");
    }
    let tri = enumerate_saws(10, Lattice::Triangular).unwrap();
    assert!(tri.is_submultiplicative());
    for n in 1..=10 {
        assert!(tri.count_f64(n).unwrap().powf(1.0 / n as f64) >= 3.0);
    }
}

#[test]
fn connectivity_upper_bound_is_a_running_minimum() {
    let full = enumerate_saws(14, Lattice::Square).unwrap();
    let mut previous = f64::INFINITY;
    for n in 2..=14 {
        let mut t = full.clone();
        t.counts.truncate(n);
        let (mu, ratio) = connectivity_bounds(&t).unwrap();
        assert!(mu >= 2.0, "mu-upper {mu} at N = {n}");
        assert!(mu <= previous);
        assert!(ratio > 2.0 && ratio <= 3.0);
        previous = mu;
    }
    assert!((2.0..3.0).contains(&previous), "mu-upper {previous} at N = 14");
}

#[test]
fn nonintersection_exact_values() {
    let table = enumerate_saws(12, Lattice::Square).unwrap();
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    assert_eq!(nonintersection_exact(1, &table).unwrap(), q(3, 4));
    assert_eq!(nonintersection_exact(2, &table).unwrap(), q(100, 144));
    assert!(nonintersection_exact(7, &table).is_err());
}

#[test]
fn paired_enumeration_equals_double_length_count() {
    let table = enumerate_saws(12, Lattice::Square).unwrap();
    for n in 1..=6 {
        assert_eq!(&count_disjoint_pairs(n, Lattice::Square).unwrap(), table.get(2 * n).unwrap(), "n = {n}");
    }
}

#[test]
fn small_diameter_laws() {
    let d1 = diameter_distribution(1, Lattice::Square).unwrap();
    assert_eq!(d1.histogram.into_iter().collect::<Vec<_>>(), vec![(1, 4)]);
    let d2 = diameter_distribution(2, Lattice::Square).unwrap();
    assert_eq!(d2.histogram.into_iter().collect::<Vec<_>>(), vec![(2, 8), (4, 4)]);
    let table = enumerate_saws(10, Lattice::Square).unwrap();
    for n in [5, 10] {
        let d = diameter_distribution(n, Lattice::Square).unwrap();
        assert_eq!(BigUint::from(d.total()), *table.get(n).unwrap());
        assert!(d.mean_diameter() <= n as f64);
    }
}

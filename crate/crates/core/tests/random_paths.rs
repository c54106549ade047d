use std::collections::HashSet;
use std::f64::consts::PI;

use conflab_core::paths::{
    brownian_path, reflected_bm_halfplane, reflected_bm_until_ray, simple_random_walk, srw_nonintersection_mc,
    stop_at_circle, ReflectionField,
};
use conflab_core::rng::normal;
use conflab_core::stats::{chi_square_test, ks_two_sample, MeanEstimate};
use conflab_core::{ComplexPoint, RngStream};

/// Critical value of the two-sample KS statistic at level 1%.
fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

#[test]
fn walk_of_length_zero_is_the_origin() {
    let w = simple_random_walk(0, RngStream::new(1, 0));
    assert_eq!(w.points(), &[ComplexPoint::new(0.0, 0.0)]);
}

#[test]
fn walk_steps_have_unit_length() {
    let w = simple_random_walk(500, RngStream::new(2, 0));
    assert!(w.points().windows(2).all(|s| (s[1] - s[0]).norm() == 1.0));
}

#[test]
fn walk_second_moment_is_n() {
    let n = 64;
    let base = RngStream::new(3, 0);
    let r2: Vec<f64> = (0..100_000u64)
        .map(|k| simple_random_walk(n, base.derive(k)).points()[n].norm_sqr())
        .collect();
    let m = MeanEstimate::from_samples(&r2);
    assert!((m.mean - n as f64).abs() < 3.0 * m.stderr, "{} ± {}", m.mean, m.stderr);
}

#[test]
fn brownian_marginal_variance_is_t() {
    let t = 2.0;
    let base = RngStream::new(4, 0);
    let xs: Vec<f64> = (0..10_000u64)
        .map(|k| {
            let p = brownian_path(t, 0.05, base.derive(k)).unwrap();
            assert_eq!(p.points()[0], ComplexPoint::new(0.0, 0.0));
            p.points().last().unwrap().re
        })
        .collect();
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let m = MeanEstimate::from_samples(&sq);
    assert!((m.mean - t).abs() < 3.0 * m.stderr, "{} ± {}", m.mean, m.stderr);
}

#[test]
fn brownian_scaling() {
    let (t, n) = (1.0, 5_000usize);
    let a = RngStream::new(5, 0);
    let b = RngStream::new(5, 1);
    let small: Vec<f64> = (0..n as u64)
        .map(|k| brownian_path(t, 0.01, a.derive(k)).unwrap().points().last().unwrap().norm())
        .collect();
    let big: Vec<f64> = (0..n as u64)
        .map(|k| brownian_path(4.0 * t, 0.04, b.derive(k)).unwrap().points().last().unwrap().norm() / 2.0)
        .collect();
    let d = ks_two_sample(&small, &big);
    assert!(d < ks_critical_1pct(n, n), "KS {d}");
}

#[test]
fn reflected_path_stays_above_axis_with_monotone_local_time() {
    let p = reflected_bm_halfplane(5.0, 1e-3, ReflectionField::default(), RngStream::new(6, 0)).unwrap();
    assert!(p.points.iter().all(|z| z.im >= 0.0));
    assert!(p.local_time.windows(2).all(|w| w[1] >= w[0]));
    for k in 1..p.points.len() {
        if p.points[k].im > 0.0 {
            assert_eq!(p.local_time[k], p.local_time[k - 1], "local time grows only on the axis");
        }
    }
    assert!(p.local_time.last().unwrap() > &0.0);
}

#[test]
fn vertical_reflection_gives_folded_gaussian() {
    let (t, n) = (1.0, 10_000usize);
    let base = RngStream::new(7, 0);
    let reflected: Vec<f64> = (0..n as u64)
        .map(|k| {
            reflected_bm_halfplane(t, 1e-3, ReflectionField::vertical(), base.derive(k))
                .unwrap()
                .last()
                .im
        })
        .collect();
    let mut r = RngStream::new(7, 1).rng();
    let folded: Vec<f64> = (0..n).map(|_| (t.sqrt() * normal(&mut r)).abs()).collect();
    let d = ks_two_sample(&reflected, &folded);
    assert!(d < ks_critical_1pct(n, n), "KS {d}");
}

#[test]
fn circle_exit_angle_is_uniform() {
    let base = RngStream::new(8, 0);
    let mut bins = [0u64; 16];
    for k in 0..10_000u64 {
        let p = brownian_path(20.0, 1e-3, base.derive(k)).unwrap();
        let hit = stop_at_circle(&p, 1.0).unwrap().hit;
        assert!((hit.norm() - 1.0).abs() < 1e-12);
        let a = hit.arg().rem_euclid(2.0 * PI);
        bins[((a / (2.0 * PI) * 16.0) as usize).min(15)] += 1;
    }
    let (_, pvalue) = chi_square_test(&bins, &[10_000.0 / 16.0; 16]);
    assert!(pvalue > 0.01, "p-value {pvalue}, bins {bins:?}");
}

#[test]
fn reflected_motion_always_reaches_the_ray() {
    let base = RngStream::new(9, 0);
    for k in 0..1000u64 {
        let hit = reflected_bm_until_ray(
            ComplexPoint::new(0.0, 0.0),
            1.0,
            1e-3,
            ReflectionField::default(),
            1e9,
            &mut base.derive(k).rng(),
        );
        assert!(!hit.escaped, "trial {k}");
        assert!(hit.x >= 1.0);
    }
}

/// Fraction of the `4^{2n}` pairs of `n`-step walks with
/// `S{1..n} ∩ S'{0..n} = ∅`.
fn nonintersection_by_enumeration(n: usize) -> f64 {
    const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let sites = |mut code: usize| {
        let mut p = (0i64, 0i64);
        let mut v = vec![p];
        for _ in 0..n {
            let (dx, dy) = STEPS[code % 4];
            code /= 4;
            p = (p.0 + dx, p.1 + dy);
            v.push(p);
        }
        v
    };
    let total = 4usize.pow(n as u32);
    let mut good = 0u64;
    for i in 0..total {
        let a: HashSet<(i64, i64)> = sites(i)[1..].iter().copied().collect();
        for j in 0..total {
            if sites(j).iter().all(|s| !a.contains(s)) {
                good += 1;
            }
        }
    }
    good as f64 / (total * total) as f64
}

#[test]
fn nonintersection_small_n_matches_enumeration() {
    assert_eq!(nonintersection_by_enumeration(1), 0.75);
    for n in [1, 2, 3] {
        let exact = nonintersection_by_enumeration(n);
        let est = srw_nonintersection_mc(n, 100_000, RngStream::new(10, n as u64)).unwrap();
        assert!(
            (est.estimate() - exact).abs() < 3.0 * est.stderr_floor(),
            "n = {n}: {} vs {exact}",
            est.estimate()
        );
    }
}

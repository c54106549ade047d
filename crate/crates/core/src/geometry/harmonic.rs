use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ComplexPoint, GridMask};
use crate::error::{Error, Result};
use crate::par;
use crate::rng::{DirectionBits, RngStream};
use crate::stats::BinomialEstimate;

/// Walk-based harmonic measure estimate with its exact success count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub successes: u64,
    pub trials: u64,
}

impl From<BinomialEstimate> for HarmonicEstimate {
    fn from(b: BinomialEstimate) -> Self {
        Self {
            estimate: b.estimate(),
            stderr: b.stderr(),
            successes: b.successes,
            trials: b.trials,
        }
    }
}

/// Cells outside `domain` that share an edge with a cell of `domain`.
///
/// This is where a nearest-neighbour walk leaving the domain first lands, so
/// any partition of it into targets partitions the exit events.
pub fn outer_layer(domain: &GridMask) -> GridMask {
    let spec = *domain.spec();
    let mut out = GridMask::empty(spec);
    for (c, r) in domain.iter_cells() {
        let (ci, ri) = (c as i64, r as i64);
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nc, nr) = (ci + dc, ri + dr);
            if nc >= 0
                && nr >= 0
                && (nc as usize) < spec.cols
                && (nr as usize) < spec.rows
                && !domain.get(nc as usize, nr as usize)
            {
                out.set(nc as usize, nr as usize, true);
            }
        }
    }
    out
}

/// Fraction of nearest-neighbour lattice walks from `start` that reach a
/// `target` cell before an `obstacle` cell or any other cell outside `domain`.
///
/// Each visited cell is checked in the order target, obstacle, domain, so a
/// walk's outcome is a total function of its path: over any partition of the
/// exit cells into targets, success counts add up to `trials` exactly. Trial
/// `k` uses the stream `rng.derive(k)`. The lattice discretization error is
/// O(spacing) and is not compensated.
pub fn harmonic_measure_estimate(
    domain: &GridMask,
    obstacle: &GridMask,
    target: &GridMask,
    start: ComplexPoint,
    trials: u64,
    rng: RngStream,
) -> Result<HarmonicEstimate> {
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let spec = *domain.spec();
    if obstacle.spec() != &spec || target.spec() != &spec {
        return Err(Error::param("grid", "domain, obstacle and target must share one grid"));
    }
    let (c0, r0) = spec.cell_of(start).ok_or(Error::OutOfBounds {
        re: start.re,
        im: start.im,
    })?;
    if obstacle.get(c0, r0) {
        return Err(Error::StartInObstacle);
    }
    if !domain.get(c0, r0) && !target.get(c0, r0) {
        return Err(Error::param("start", "must lie in the domain"));
    }
    let start_index = spec.index(c0, r0);
    let successes = par::count_trials(trials as usize, |k| {
        walk_hits_target(domain, obstacle, target, start_index, rng.derive(k as u64))
    });
    Ok(BinomialEstimate::new(successes, trials).into())
}

pub(crate) fn walk_hits_target(
    domain: &GridMask,
    obstacle: &GridMask,
    target: &GridMask,
    start_index: usize,
    stream: RngStream,
) -> bool {
    let spec = domain.spec();
    let cols = spec.cols;
    let rows = spec.rows;
    let mut rng = stream.rng();
    let mut bits = DirectionBits::new();
    let (mut c, mut r) = (start_index % cols, start_index / cols);
    loop {
        let i = r * cols + c;
        if target.get_index(i) {
            return true;
        }
        if obstacle.get_index(i) || !domain.get_index(i) {
            return false;
        }
        match bits.next(&mut rng) {
            0 => {
                if c + 1 == cols {
                    return false;
                }
                c += 1;
            }
            1 => {
                if r + 1 == rows {
                    return false;
                }
                r += 1;
            }
            2 => {
                if c == 0 {
                    return false;
                }
                c -= 1;
            }
            _ => {
                if r == 0 {
                    return false;
                }
                r -= 1;
            }
        }
    }
}

/// Exact harmonic measure, seen from `z`, of the arc `{center + radius·e^{iθ} :
/// θ ∈ [theta1, theta2]}` (counterclockwise) of a circle containing `z`.
///
/// The disc automorphism `u ↦ (u − w)/(1 − w̄u)` sends `w` to the centre and
/// preserves harmonic measure, so the answer is the angle of the image arc
/// divided by 2π.
pub fn arc_harmonic_measure(
    z: ComplexPoint,
    center: ComplexPoint,
    radius: f64,
    theta1: f64,
    theta2: f64,
) -> Result<f64> {
    let w = (z - center) / radius;
    if !(w.norm() < 1.0) {
        return Err(Error::param("z", "must lie strictly inside the circle"));
    }
    let span = theta2 - theta1;
    if span >= 2.0 * PI {
        return Ok(1.0);
    }
    if span <= 0.0 {
        return Ok(0.0);
    }
    let phi = |t: f64| {
        let u = ComplexPoint::from_polar(1.0, t);
        (u - w) / (ComplexPoint::new(1.0, 0.0) - w.conj() * u)
    };
    let a = phi(theta2).arg() - phi(theta1).arg();
    Ok(a.rem_euclid(2.0 * PI) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;
    use crate::special::quadrature::integrate;

    fn disc(h: f64) -> GridMask {
        let m = (1.0 / h).ceil() as usize + 2;
        GridMask::disc(GridSpec::centered(m, h).unwrap(), ComplexPoint::new(0.0, 0.0), 1.0)
    }

    fn arc_layer(domain: &GridMask, lo: f64, hi: f64) -> GridMask {
        let layer = outer_layer(domain);
        let spec = *domain.spec();
        GridMask::from_fn(spec, |c, r| {
            let a = spec.center(c, r).arg().rem_euclid(2.0 * PI);
            layer.get(c, r) && a >= lo && a < hi
        })
    }

    #[test]
    fn full_circle_is_certain() {
        let d = disc(1.0 / 16.0);
        let none = GridMask::empty(*d.spec());
        let e = harmonic_measure_estimate(&d, &none, &outer_layer(&d), ComplexPoint::new(0.3, 0.1), 200, RngStream::new(1, 0))
            .unwrap();
        assert_eq!(e.successes, 200);
        assert_eq!(e.estimate, 1.0);
    }

    #[test]
    fn half_circle_from_center() {
        let d = disc(1.0 / 32.0);
        let none = GridMask::empty(*d.spec());
        let upper = arc_layer(&d, 0.0, PI);
        let e = harmonic_measure_estimate(&d, &none, &upper, ComplexPoint::new(1e-3, 1e-3), 4000, RngStream::new(2, 0))
            .unwrap();
        assert!((e.estimate - 0.5).abs() <= 3.0 * e.stderr + 0.03, "{e:?}");
    }

    #[test]
    fn partition_sums_to_trials() {
        let d = disc(1.0 / 16.0);
        let none = GridMask::empty(*d.spec());
        let cuts = [0.0, 1.0, 2.5, 4.0, 2.0 * PI + 1e-9];
        let total: u64 = cuts
            .windows(2)
            .map(|w| {
                let t = arc_layer(&d, w[0], w[1]);
                harmonic_measure_estimate(&d, &none, &t, ComplexPoint::new(-0.2, 0.5), 300, RngStream::new(3, 0))
                    .unwrap()
                    .successes
            })
            .sum();
        assert_eq!(total, 300);
    }

    #[test]
    fn start_in_obstacle_is_rejected() {
        let d = disc(1.0 / 8.0);
        let ob = d.clone();
        assert!(matches!(
            harmonic_measure_estimate(&d, &ob, &outer_layer(&d), ComplexPoint::new(0.0, 0.0), 1, RngStream::new(0, 0)),
            Err(Error::StartInObstacle)
        ));
    }

    #[test]
    fn arc_formula_matches_poisson_integral() {
        // Oracle: integrate the Poisson kernel (1 − |w|²)/|e^{iθ} − w|² / 2π.
        for (w, t1, t2) in [
            (ComplexPoint::new(0.4, 0.0), 0.0, PI / 2.0),
            (ComplexPoint::new(-0.3, 0.6), 1.0, 4.0),
            (ComplexPoint::new(0.0, -0.9), -0.5, 0.5),
        ] {
            let oracle = integrate(
                |t| (1.0 - w.norm_sqr()) / (ComplexPoint::from_polar(1.0, t) - w).norm_sqr() / (2.0 * PI),
                t1,
                t2,
                1e-13,
            );
            let got = arc_harmonic_measure(w, ComplexPoint::new(0.0, 0.0), 1.0, t1, t2).unwrap();
            assert!((got - oracle).abs() < 1e-10, "{w}: {got} vs {oracle}");
        }
        assert_eq!(arc_harmonic_measure(ComplexPoint::new(0.5, 0.0), ComplexPoint::new(0.0, 0.0), 1.0, 0.0, 7.0).unwrap(), 1.0);
    }

    #[test]
    fn off_center_arc_matches_closed_form() {
        let h = 1.0 / 48.0;
        let d = disc(h);
        let none = GridMask::empty(*d.spec());
        let z = ComplexPoint::new(0.4, 0.0);
        let t = arc_layer(&d, 0.0, PI / 2.0);
        let e = harmonic_measure_estimate(&d, &none, &t, z, 4000, RngStream::new(4, 0)).unwrap();
        let exact = arc_harmonic_measure(z, ComplexPoint::new(0.0, 0.0), 1.0, 0.0, PI / 2.0).unwrap();
        assert!((e.estimate - exact).abs() <= 3.0 * e.stderr + 2.0 * h, "{e:?} vs {exact}");
    }
}

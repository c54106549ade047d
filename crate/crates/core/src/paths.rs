//! Samplers for simple random walks, planar Brownian motion and obliquely
//! reflected Brownian motion in the upper half-plane, plus stopping rules.

use std::f64::consts::PI;
use std::io::Write;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, PathKind, PlanarPath};
use crate::par;
use crate::rng::{normal, DirectionBits, Rng, RngStream};
use crate::stats::BinomialEstimate;

pub(crate) const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Sites of an `n`-step simple random walk from the origin, drawn from `rng`.
pub(crate) fn walk_sites(n: usize, rng: &mut Rng) -> Vec<(i64, i64)> {
    let mut bits = DirectionBits::new();
    let mut sites = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (0i64, 0i64);
    sites.push((x, y));
    for _ in 0..n {
        let (dx, dy) = STEPS[bits.next(rng) as usize];
        x += dx;
        y += dy;
        sites.push((x, y));
    }
    sites
}

/// `n`-step simple random walk on ℤ² started at 0.
pub fn simple_random_walk(n: usize, rng: RngStream) -> PlanarPath {
    let sites = walk_sites(n, &mut rng.rng());
    let pts = sites
        .iter()
        .map(|&(x, y)| ComplexPoint::new(x as f64, y as f64))
        .collect();
    PlanarPath::from_parts_unchecked(pts, PathKind::LatticeWalk, 0.0)
}

fn check_time(t: f64, dt: f64) -> Result<usize> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("T", "must be positive and finite"));
    }
    if !(dt > 0.0 && dt <= t) {
        return Err(Error::param("dt", "must satisfy 0 < dt <= T"));
    }
    Ok((t / dt).round().max(1.0) as usize)
}

/// Planar Brownian motion sampled at times `k·dt`, `k = 0..=round(T/dt)`.
pub fn brownian_path(t: f64, dt: f64, rng: RngStream) -> Result<PlanarPath> {
    let n = check_time(t, dt)?;
    let mut r = rng.rng();
    let s = dt.sqrt();
    let mut z = ComplexPoint::new(0.0, 0.0);
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(z);
    for _ in 0..n {
        z += ComplexPoint::new(s * normal(&mut r), s * normal(&mut r));
        pts.push(z);
    }
    Ok(PlanarPath::from_parts_unchecked(pts, PathKind::DiffusionSample, dt))
}

/// Reflection directions on the two half-axes of ∂H.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionField {
    /// Direction used at boundary points with `x ≥ 0`.
    pub right: ComplexPoint,
    /// Direction used at boundary points with `x < 0`.
    pub left: ComplexPoint,
}

impl Default for ReflectionField {
    /// `u(x) = e^{iπ/3}` for `x ≥ 0` and `e^{2iπ/3}` for `x < 0`: both point
    /// away from the origin at angle π/3 to the axis.
    fn default() -> Self {
        Self {
            right: ComplexPoint::from_polar(1.0, PI / 3.0),
            left: ComplexPoint::from_polar(1.0, 2.0 * PI / 3.0),
        }
    }
}

impl ReflectionField {
    /// Normal reflection `u ≡ i`.
    pub fn vertical() -> Self {
        Self {
            right: ComplexPoint::new(0.0, 1.0),
            left: ComplexPoint::new(0.0, 1.0),
        }
    }

    pub fn new(right: ComplexPoint, left: ComplexPoint) -> Result<Self> {
        for (k, u) in [("right", right), ("left", left)] {
            if !(u.im > 0.0) || !u.re.is_finite() {
                return Err(Error::param(k, "reflection vector must point into the half-plane"));
            }
        }
        Ok(Self {
            right: right / right.norm(),
            left: left / left.norm(),
        })
    }

    #[inline]
    pub fn at(&self, x: f64) -> ComplexPoint {
        if x >= 0.0 {
            self.right
        } else {
            self.left
        }
    }

    /// Pushes a point below the axis back onto it along `u(Re z)`; returns the
    /// new point and the push length (the local-time increment).
    #[inline]
    pub fn push(&self, z: ComplexPoint) -> (ComplexPoint, f64) {
        if z.im >= 0.0 {
            return (z, 0.0);
        }
        let u = self.at(z.re);
        let s = -z.im / u.im;
        (ComplexPoint::new(z.re + s * u.re, 0.0), s)
    }
}

/// Sampled reflected Brownian motion with its accumulated local time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedPath {
    pub points: Vec<ComplexPoint>,
    pub local_time: Vec<f64>,
    pub time_step: f64,
}

impl ReflectedPath {
    pub fn last(&self) -> ComplexPoint {
        *self.points.last().expect("nonempty path")
    }

    /// CSV with columns `index,re,im,local_time`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "index,re,im,local_time")?;
        for (i, (z, l)) in self.points.iter().zip(&self.local_time).enumerate() {
            writeln!(out, "{i},{},{},{l}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// Euler scheme for `Z = B + ∫ u(Z) dℓ` in the closed upper half-plane started
/// at 0: after each Gaussian increment a point with `Im < 0` is pushed back
/// along `u(Re z)` onto the axis and the push length is added to the local time.
pub fn reflected_bm_halfplane(t: f64, dt: f64, field: ReflectionField, rng: RngStream) -> Result<ReflectedPath> {
    let n = check_time(t, dt)?;
    let mut r = rng.rng();
    let s = dt.sqrt();
    let mut z = ComplexPoint::new(0.0, 0.0);
    let mut ell = 0.0;
    let mut points = Vec::with_capacity(n + 1);
    let mut local_time = Vec::with_capacity(n + 1);
    points.push(z);
    local_time.push(ell);
    for _ in 0..n {
        let step = ComplexPoint::new(s * normal(&mut r), s * normal(&mut r));
        let (next, push) = field.push(z + step);
        z = next;
        ell += push;
        points.push(z);
        local_time.push(ell);
    }
    Ok(ReflectedPath {
        points,
        local_time,
        time_step: dt,
    })
}

/// Outcome of a stopping rule applied to a sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct Stopped<P> {
    /// Samples before the stopping step followed by the interpolated hit point.
    pub path: P,
    pub hit: ComplexPoint,
    /// Index of the first sample at or past the stopping set.
    pub index: usize,
}

/// Truncates `path` at its first sample with `|z| ≥ radius`; the hit point is
/// where the last segment meets the circle.
pub fn stop_at_circle(path: &PlanarPath, radius: f64) -> Result<Stopped<PlanarPath>> {
    let pts = path.points();
    if !(pts[0].norm() < radius) {
        return Err(Error::param("path", "must start strictly inside the circle"));
    }
    let Some(k) = pts.iter().position(|z| z.norm() >= radius) else {
        let max_attained = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        return Err(Error::NotStopped { max_attained });
    };
    let hit = circle_crossing(pts[k - 1], pts[k], radius);
    let mut kept = pts[..k].to_vec();
    kept.push(hit);
    Ok(Stopped {
        path: PlanarPath::from_parts_unchecked(kept, path.kind(), path.time_step()),
        hit,
        index: k,
    })
}

/// Point where the segment from `a` (inside) to `b` (outside) meets `|z| = r`.
pub(crate) fn circle_crossing(a: ComplexPoint, b: ComplexPoint, r: f64) -> ComplexPoint {
    let d = b - a;
    // |a + s d|² = r²: s² |d|² + 2 s Re(a d̄) + |a|² − r² = 0, root in (0, 1].
    let qa = d.norm_sqr();
    let qb = (a * d.conj()).re;
    let qc = a.norm_sqr() - r * r;
    let disc = (qb * qb - qa * qc).max(0.0);
    // Stable form of (−qb + √disc)/qa given qc < 0.
    let s = if qb <= 0.0 {
        (-qb + disc.sqrt()) / qa
    } else {
        -qc / (qb + disc.sqrt())
    };
    let hit = a + d * s.clamp(0.0, 1.0);
    // Remove the last rounding error radially.
    hit * (r / hit.norm())
}

/// Truncates a reflected path at its first crossing of the segment `[a, b]`,
/// detected by a sign change (or zero) of the signed distance to the segment's line.
pub fn stop_at_segment(path: &ReflectedPath, a: ComplexPoint, b: ComplexPoint) -> Result<Stopped<ReflectedPath>> {
    let d = b - a;
    if d.norm() == 0.0 {
        return Err(Error::param("segment", "endpoints must differ"));
    }
    let sd = |z: ComplexPoint| (d.conj() * (z - a)).im / d.norm();
    let along = |z: ComplexPoint| (d.conj() * (z - a)).re / d.norm_sqr();
    let pts = &path.points;
    for k in 1..pts.len() {
        let (s0, s1) = (sd(pts[k - 1]), sd(pts[k]));
        if s1 == 0.0 || s0 * s1 < 0.0 {
            let t = if s1 == 0.0 { 1.0 } else { s0 / (s0 - s1) };
            let hit = pts[k - 1] + (pts[k] - pts[k - 1]) * t;
            let u = along(hit);
            if (0.0..=1.0).contains(&u) {
                let mut points = pts[..k].to_vec();
                points.push(hit);
                let mut local_time = path.local_time[..k].to_vec();
                local_time.push(path.local_time[k]);
                return Ok(Stopped {
                    path: ReflectedPath {
                        points,
                        local_time,
                        time_step: path.time_step,
                    },
                    hit,
                    index: k,
                });
            }
        }
    }
    let max_attained = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Err(Error::NotStopped { max_attained })
}

/// Where a streamed reflected Brownian motion stopped on a ray of the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub x: f64,
    pub steps: u64,
    /// True when the run was cut off at `max_radius` instead of hitting the ray.
    pub escaped: bool,
}

/// Runs reflected Brownian motion from `start` until it first reaches the axis
/// at a point `x ≥ ray_start`, without storing the path.
///
/// The time step is `dt · max(|z − ray_start|², 10⁻⁸)`. The process is scale
/// invariant both far away and near the corner at `ray_start`, where the
/// hitting density is singular, so the relative step size stays bounded
/// at both ends. A
/// step that crosses the axis stops at the crossing point if that lies on the
/// ray; otherwise the point is pushed back along the field and stops if it
/// lands on the ray. Runs that reach `|z| ≥ max_radius` are reported as escaped.
pub fn reflected_bm_until_ray(
    start: ComplexPoint,
    ray_start: f64,
    dt: f64,
    field: ReflectionField,
    max_radius: f64,
    rng: &mut Rng,
) -> RayHit {
    let mut z = start;
    let mut steps = 0u64;
    loop {
        let d2 = (z - ComplexPoint::new(ray_start, 0.0)).norm_sqr();
        let h = (dt * d2.max(1e-8)).sqrt();
        let next = z + ComplexPoint::new(h * normal(rng), h * normal(rng));
        steps += 1;
        if next.im <= 0.0 {
            let t = if z.im > 0.0 { z.im / (z.im - next.im) } else { 0.0 };
            let xc = z.re + t * (next.re - z.re);
            if xc >= ray_start {
                return RayHit {
                    x: xc,
                    steps,
                    escaped: false,
                };
            }
            let (landed, _) = field.push(next);
            if landed.re >= ray_start {
                return RayHit {
                    x: landed.re,
                    steps,
                    escaped: false,
                };
            }
            z = landed;
        } else {
            z = next;
        }
        if z.norm() >= max_radius {
            return RayHit {
                x: z.norm(),
                steps,
                escaped: true,
            };
        }
    }
}

/// Runs reflected Brownian motion from `start` (in the strip `0 ≤ Im z < height`)
/// until it first reaches the line `Im z = height`, without storing the path.
/// Returns the interpolated crossing abscissa and the elapsed time, or
/// [`Error::HorizonExhausted`] after `max_steps` steps.
pub fn reflected_bm_until_height(
    start: ComplexPoint,
    height: f64,
    dt: f64,
    field: ReflectionField,
    max_steps: u64,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    if !(start.im >= 0.0 && start.im < height) {
        return Err(Error::param("start", "must lie in the strip below the line"));
    }
    let h = dt.sqrt();
    let mut z = start;
    let mut highest = z.im;
    for k in 1..=max_steps {
        let next = z + ComplexPoint::new(h * normal(rng), h * normal(rng));
        if next.im >= height {
            let t = (height - z.im) / (next.im - z.im);
            return Ok((z.re + t * (next.re - z.re), k as f64 * dt));
        }
        z = field.push(next).0;
        highest = highest.max(z.im);
    }
    Err(Error::HorizonExhausted { attained: highest })
}

/// Whether two independent walks satisfy `S{1..n} ∩ S'{0..n} = ∅`.
///
/// Both walks are generated step by step from one stream, alternating, and
/// the check stops at the first shared site.
pub(crate) fn srw_pair_disjoint(n: usize, rng: &mut Rng) -> bool {
    const A: u8 = 1;
    const B: u8 = 2;
    let mut seen: FxHashMap<(i64, i64), u8> = FxHashMap::default();
    seen.insert((0, 0), B);
    let mut bits_a = DirectionBits::new();
    let mut bits_b = DirectionBits::new();
    let (mut a, mut b) = ((0i64, 0i64), (0i64, 0i64));
    for _ in 0..n {
        let (dx, dy) = STEPS[bits_a.next(rng) as usize];
        a = (a.0 + dx, a.1 + dy);
        let e = seen.entry(a).or_insert(0);
        if *e & B != 0 {
            return false;
        }
        *e |= A;
        let (dx, dy) = STEPS[bits_b.next(rng) as usize];
        b = (b.0 + dx, b.1 + dy);
        let e = seen.entry(b).or_insert(0);
        if *e & A != 0 {
            return false;
        }
        *e |= B;
    }
    true
}

/// Monte Carlo estimate of `P[S{1..n} ∩ S'{0..n} = ∅]` for independent simple
/// random walks from 0; trial `k` uses `rng.derive(k)`.
pub fn srw_nonintersection_mc(n: usize, trials: u64, rng: RngStream) -> Result<BinomialEstimate> {
    srw_nonintersection_mc_with(par::Execution::default(), n, trials, rng)
}

pub fn srw_nonintersection_mc_with(
    exec: par::Execution,
    n: usize,
    trials: u64,
    rng: RngStream,
) -> Result<BinomialEstimate> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let hits = par::count_trials_with(exec, trials as usize, |k| {
        srw_pair_disjoint(n, &mut rng.derive(k as u64).rng())
    });
    Ok(BinomialEstimate::new(hits, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_shape() {
        let p = simple_random_walk(0, RngStream::new(1, 1));
        assert_eq!(p.points(), &[ComplexPoint::new(0.0, 0.0)]);
        let p = simple_random_walk(500, RngStream::new(1, 2));
        assert_eq!(p.len(), 501);
        assert!(PlanarPath::new(p.points().to_vec(), PathKind::LatticeWalk, 0.0).is_ok());
    }

    #[test]
    fn brownian_starts_at_zero() {
        let p = brownian_path(1.0, 0.01, RngStream::new(3, 0)).unwrap();
        assert_eq!(p.first(), ComplexPoint::new(0.0, 0.0));
        assert_eq!(p.len(), 101);
        assert!(brownian_path(1.0, 2.0, RngStream::new(3, 0)).is_err());
    }

    #[test]
    fn reflected_stays_in_half_plane() {
        let p = reflected_bm_halfplane(2.0, 1e-3, ReflectionField::default(), RngStream::new(5, 0)).unwrap();
        assert!(p.points.iter().all(|z| z.im >= 0.0));
        for k in 1..p.points.len() {
            let inc = p.local_time[k] - p.local_time[k - 1];
            assert!(inc >= 0.0);
            if p.points[k].im > 0.0 {
                assert_eq!(inc, 0.0);
            }
        }
        assert!(*p.local_time.last().unwrap() > 0.0);
    }

    #[test]
    fn push_direction_follows_sign_of_x() {
        let f = ReflectionField::default();
        let (z, s) = f.push(ComplexPoint::new(2.0, -3f64.sqrt() / 2.0));
        assert!((s - 1.0).abs() < 1e-15);
        assert!((z.re - 2.5).abs() < 1e-15 && z.im == 0.0);
        let (z, _) = f.push(ComplexPoint::new(-2.0, -3f64.sqrt() / 2.0));
        assert!((z.re + 2.5).abs() < 1e-15);
        assert!(ReflectionField::new(ComplexPoint::new(1.0, 0.0), ComplexPoint::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn ray_path_hits_circle_exactly() {
        let pts: Vec<_> = (0..10).map(|k| ComplexPoint::from_polar(0.3 * k as f64, 0.7)).collect();
        let p = PlanarPath::new(pts, PathKind::DiffusionSample, 0.1).unwrap();
        let s = stop_at_circle(&p, 1.0).unwrap();
        assert!((s.hit - ComplexPoint::from_polar(1.0, 0.7)).norm() < 1e-15);
        assert_eq!(s.index, 4);
        assert_eq!(s.path.last(), s.hit);
    }

    #[test]
    fn one_outward_step_from_near_circle() {
        let p = PlanarPath::new(
            vec![ComplexPoint::new(0.999, 0.0), ComplexPoint::new(1.1, 0.0)],
            PathKind::DiffusionSample,
            0.1,
        )
        .unwrap();
        let s = stop_at_circle(&p, 1.0).unwrap();
        assert_eq!(s.index, 1);
        assert!((s.hit.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn circle_not_reached() {
        let p = PlanarPath::new(
            vec![ComplexPoint::new(0.0, 0.0), ComplexPoint::new(0.5, 0.0)],
            PathKind::DiffusionSample,
            0.1,
        )
        .unwrap();
        assert!(matches!(stop_at_circle(&p, 1.0), Err(Error::NotStopped { max_attained }) if max_attained == 0.5));
    }

    #[test]
    fn segment_crossings() {
        let rp = ReflectedPath {
            points: vec![ComplexPoint::new(0.5, 0.0), ComplexPoint::new(0.5, 0.5), ComplexPoint::new(0.5, 1.5)],
            local_time: vec![0.0; 3],
            time_step: 0.1,
        };
        let s = stop_at_segment(&rp, ComplexPoint::new(0.0, 1.0), ComplexPoint::new(1.0, 1.0)).unwrap();
        assert!((s.hit - ComplexPoint::new(0.5, 1.0)).norm() < 1e-15);
        assert_eq!(s.index, 2);
        assert!(matches!(
            stop_at_segment(&rp, ComplexPoint::new(0.0, 2.0), ComplexPoint::new(1.0, 2.0)),
            Err(Error::NotStopped { .. })
        ));
        // Crossing the line outside the segment does not count.
        assert!(stop_at_segment(&rp, ComplexPoint::new(2.0, 1.0), ComplexPoint::new(3.0, 1.0)).is_err());
    }

    /// Exhaustive oracle for `P[S{1..n} ∩ S'{0..n} = ∅]` over all 4^{2n} pairs.
    fn exact_nonintersection(n: usize) -> (u64, u64) {
        let total = 4u64.pow(2 * n as u32);
        let mut good = 0;
        for code in 0..total {
            let mut c = code;
            let walk = |c: &mut u64| {
                let mut s = vec![(0i64, 0i64)];
                for _ in 0..n {
                    let (dx, dy) = STEPS[(*c % 4) as usize];
                    *c /= 4;
                    let l = *s.last().unwrap();
                    s.push((l.0 + dx, l.1 + dy));
                }
                s
            };
            let a = walk(&mut c);
            let b = walk(&mut c);
            if a[1..].iter().all(|p| !b.contains(p)) {
                good += 1;
            }
        }
        (good, total)
    }

    #[test]
    fn exact_small_n() {
        assert_eq!(exact_nonintersection(1), (12, 16));
        let (g, t) = exact_nonintersection(2);
        let est = srw_nonintersection_mc(2, 20_000, RngStream::new(9, 0)).unwrap();
        let p = g as f64 / t as f64;
        assert!((est.estimate() - p).abs() <= 3.0 * (p * (1.0 - p) / 20_000.0).sqrt());
        let est1 = srw_nonintersection_mc(1, 20_000, RngStream::new(9, 1)).unwrap();
        assert!((est1.estimate() - 0.75).abs() <= 3.0 * (0.75f64 * 0.25 / 20_000.0).sqrt());
    }

    #[test]
    fn deterministic_under_thread_count() {
        let r = RngStream::new(11, 0);
        let a = par::with_threads(1, || srw_nonintersection_mc(64, 2000, r).unwrap());
        let b = par::with_threads(8, || srw_nonintersection_mc(64, 2000, r).unwrap());
        let c = srw_nonintersection_mc_with(par::Execution::Sequential, 64, 2000, r).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

//! Equality-in-law checks and crossing-probability comparisons. Each law is
//! reduced to a scalar functional (an exit position, a contact coordinate or
//! a harmonic measure) compared by a KS statistic or a z-score.

use serde::{Deserialize, Serialize};

use super::{fit_points, require_trials, ExperimentResult, ResultPoint, Run};
use crate::error::{Error, Result};
use crate::geometry::{fill_hull, harmonic_measure_estimate, outer_layer, ComplexPoint, GridMask, GridSpec};
use crate::loewner::{cardy_race_mc, radial_cci_hull, sle_line_contact, RaceConfig, RadialConfig};
use crate::par;
use crate::paths::{reflected_bm_until_height, reflected_bm_until_ray, ReflectionField, STEPS};
use crate::percolation::{
    crossing_probability_mc, exploration_process, half_plane_config, triangle_endpoint_mc, ExplorationExit,
    ExplorationPath, RectangleShape, Turn,
};
use crate::rng::{DirectionBits, Rng, RngStream};
use crate::special::{cardy_f, rectangle_cross_ratio, triangle_map, triangle_side_position, TRIANGLE_B, TRIANGLE_C};
use crate::stats::{ks_one_sample, ks_pvalue, ks_two_sample, BinomialEstimate, MeanEstimate};

/// Estimate of a left-right crossing of an `L × l` rectangle at mesh `1/n`,
/// against Cardy's formula at the rectangle's cross-ratio.
pub fn cardy_crossing_experiment(
    width: f64,
    height: f64,
    n: usize,
    p: f64,
    trials: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("cardy-crossing", rng);
    run.param("width", width);
    run.param("height", height);
    run.param("n", n);
    run.param("p", p);
    run.param("trials", trials);
    let est = crossing_probability_mc(RectangleShape { width, height }, n, p, trials, rng.derive_named("cardy-crossing"))?;
    let x = rectangle_cross_ratio(width, height)?;
    let prediction = cardy_f(x)?;
    let sigma = est.stderr();
    run.note("successes", est.successes);
    run.note("cross-ratio", x);
    run.note("prediction", prediction);
    run.note("deviation", est.estimate() - prediction);
    run.note("z", (est.estimate() - prediction) / sigma.max(f64::MIN_POSITIVE));
    run.finish(vec![ResultPoint::new(n as f64, est.estimate(), sigma)], None)
}

/// `P(T_{−a} < T_b)` for chordal SLE_κ for each pair, against `F(b/(a + b))`.
pub fn sle_cardy_experiment(
    pairs: &[(f64, f64)],
    cfg: RaceConfig,
    trials: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    if pairs.is_empty() {
        return Err(Error::param("pairs", "need at least one (a, b) pair"));
    }
    let mut run = Run::new("sle-cardy", rng);
    run.param("pairs", pairs);
    run.param("kappa", cfg.kappa);
    run.param("dt-min", cfg.dt_min);
    run.param("eta", cfg.eta);
    run.param("trials", trials);
    let base = rng.derive_named("sle-cardy");
    let mut points = Vec::new();
    let mut predictions = Vec::new();
    let mut successes = Vec::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let est = cardy_race_mc(a, b, &cfg, trials, base.derive(i as u64))?;
        let x = b / (a + b);
        points.push(ResultPoint::new(x, est.estimate(), est.stderr()));
        predictions.push(cardy_f(x)?);
        successes.push(est.successes);
    }
    run.note("predictions", predictions);
    run.note("successes", successes);
    run.finish(points, None)
}

/// Deciles of an empirical CDF as points `(u, F̂(u), √(F̂(1 − F̂)/n))`.
fn ecdf_deciles(sorted: &[f64], grid: &[f64]) -> Vec<ResultPoint> {
    let n = sorted.len() as f64;
    grid.iter()
        .map(|&u| {
            let f = sorted.partition_point(|&x| x <= u) as f64 / n;
            ResultPoint::new(u, f, (f * (1.0 - f) / n).sqrt())
        })
        .collect()
}

const DECILES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Endpoint position along `[B, C]` of the crossing cluster in a lattice
/// triangle, compared with the uniform law.
pub fn triangle_endpoint_experiment(side: usize, p: f64, trials: u64, rng: RngStream) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("triangle-endpoint", rng);
    run.param("side", side);
    run.param("p", p);
    run.param("trials", trials);
    let xs = triangle_endpoint_mc(side, p, trials, rng.derive_named("triangle-endpoint"))?;
    let ks = ks_one_sample(&xs, |u| u.clamp(0.0, 1.0));
    run.note("ks", ks);
    run.note("ks-pvalue", ks_pvalue(ks, xs.len() as f64));
    run.finish(ecdf_deciles(&xs, &DECILES), None)
}

/// Reflected Brownian motion from 0 in the half-plane, stopped on `[1, ∞)`,
/// mapped into the equilateral triangle; the endpoint position along
/// `[B, C]` (0 at `B`) is compared with the uniform law.
///
/// `vertical = true` replaces the oblique field by normal reflection (a
/// control that should fail uniformity).
pub fn reflected_bm_cardy(
    dt: f64,
    max_radius: f64,
    vertical: bool,
    trials: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("rbm-cardy", rng);
    run.param("dt", dt);
    run.param("max-radius", max_radius);
    run.param("field", if vertical { "vertical" } else { "oblique" });
    run.param("trials", trials);
    let field = if vertical {
        ReflectionField::vertical()
    } else {
        ReflectionField::default()
    };
    let base = rng.derive_named("rbm-cardy");
    let hits = par::map_trials(trials as usize, |k| {
        reflected_bm_until_ray(ComplexPoint::new(0.0, 0.0), 1.0, dt, field, max_radius, &mut base.derive(k as u64).rng())
    });
    let mut positions = Vec::with_capacity(hits.len());
    let mut escaped = 0u64;
    let mut off_side: f64 = 0.0;
    for h in &hits {
        if h.escaped {
            // The run would hit the ray beyond `max_radius`; its position is
            // below F(1/max_radius), i.e. next to B.
            escaped += 1;
            positions.push(0.0);
            continue;
        }
        let w = triangle_map(ComplexPoint::new(h.x, 0.0))?;
        off_side = off_side.max(segment_distance(w, TRIANGLE_B, TRIANGLE_C));
        positions.push(triangle_side_position(h.x)?);
    }
    if positions.is_empty() {
        return Err(Error::param("max-radius", "every run escaped"));
    }
    positions.sort_by(f64::total_cmp);
    let ks = ks_one_sample(&positions, |u| u.clamp(0.0, 1.0));
    run.note("ks", ks);
    run.note("ks-pvalue", ks_pvalue(ks, positions.len() as f64));
    run.note("escaped", escaped);
    run.note("max-distance-from-side", off_side);
    run.finish(ecdf_deciles(&positions, &DECILES), None)
}

fn segment_distance(z: ComplexPoint, a: ComplexPoint, b: ComplexPoint) -> f64 {
    let d = b - a;
    let t = (((z - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// One side of a two-sample law comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawSide {
    /// Chordal SLE₆, first contact of the trace with the line.
    Sle,
    /// Reflected Brownian motion with the oblique field, first hit of the line.
    ReflectedBm,
}

/// First-contact abscissa with the segment `J = [−W, W] + i·height` of
/// chordal SLE₆ hulls and of obliquely reflected Brownian motion from 0,
/// compared by the two-sample KS statistic.
///
/// Both samplers stop when they first reach the line through `J`; contacts
/// with `|x| > W` are tallied separately (with the default `W` they are
/// extremely rare). Runs that do not reach the line within their budget
/// (`horizon` in capacity time for SLE, `max_steps` for the diffusion) count
/// as horizon-exhausted. Points are the per-side fractions of runs that
/// reached `J`.
#[allow(clippy::too_many_arguments)]
pub fn sle_vs_reflected_bm(
    height: f64,
    half_width: f64,
    sides: (LawSide, LawSide),
    sle_dt: f64,
    horizon: f64,
    rbm_dt: f64,
    max_steps: u64,
    trials: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    if !(height > 0.0 && half_width > 0.0) {
        return Err(Error::param("height", "height and half-width must be positive"));
    }
    let mut run = Run::new("sle-vs-rbm", rng);
    run.param("height", height);
    run.param("half-width", half_width);
    run.param("sides", [sides.0, sides.1]);
    run.param("sle-dt", sle_dt);
    run.param("horizon", horizon);
    run.param("rbm-dt", rbm_dt);
    run.param("max-steps", max_steps);
    run.param("trials", trials);
    let sample = |side: LawSide, stream: RngStream| -> Result<Vec<Option<f64>>> {
        par::map_trials(trials as usize, |k| {
            let mut r = stream.derive(k as u64).rng();
            let hit = match side {
                LawSide::Sle => sle_line_contact(6.0, sle_dt, height, horizon, &mut r).map(|c| c.x),
                LawSide::ReflectedBm => reflected_bm_until_height(
                    ComplexPoint::new(0.0, 0.0),
                    height,
                    rbm_dt,
                    ReflectionField::default(),
                    max_steps,
                    &mut r,
                )
                .map(|(x, _)| x),
            };
            match hit {
                Ok(x) => Ok(Some(x)),
                Err(Error::HorizonExhausted { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .into_iter()
        .collect()
    };
    let a = sample(sides.0, rng.derive_named("side-a"))?;
    let b = sample(sides.1, rng.derive_named("side-b"))?;
    let split = |v: &[Option<f64>]| {
        let reached: Vec<f64> = v.iter().flatten().copied().collect();
        let inside: Vec<f64> = reached.iter().copied().filter(|x| x.abs() <= half_width).collect();
        (inside, reached.len())
    };
    let (xa, ra) = split(&a);
    let (xb, rb) = split(&b);
    run.note("exhausted", [trials - ra as u64, trials - rb as u64]);
    run.note("outside-segment", [ra - xa.len(), rb - xb.len()]);
    let exhausted = xa.is_empty() || xb.is_empty();
    run.note("horizon-exhausted", exhausted);
    if !exhausted {
        let d = ks_two_sample(&xa, &xb);
        let (na, nb) = (xa.len() as f64, xb.len() as f64);
        run.note("ks", d);
        run.note("ks-pvalue", ks_pvalue(d, na * nb / (na + nb)));
    }
    let frac = |n: usize, s: f64| {
        let e = BinomialEstimate::new(n as u64, trials);
        ResultPoint::new(s, e.estimate(), e.stderr())
    };
    run.finish(vec![frac(xa.len(), 1.0), frac(xb.len(), 2.0)], None)
}

/// Exit position of the percolation exploration process in a slab of
/// lattice height `height` (rescaled by the height) against the contact
/// abscissa of chordal SLE₆ with the line `Im z = 1`.
///
/// Exploratory: the agreement is conjectural and no threshold is implied.
#[allow(clippy::too_many_arguments)]
pub fn exploration_vs_sle(
    height: usize,
    half_width: usize,
    trials: u64,
    sle_trials: u64,
    sle_dt: f64,
    horizon: f64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    require_trials(sle_trials)?;
    let mut run = Run::new("exploration-vs-sle", rng);
    run.param("height", height);
    run.param("half-width", half_width);
    run.param("trials", trials);
    run.param("sle-trials", sle_trials);
    run.param("sle-dt", sle_dt);
    run.param("horizon", horizon);
    let explore = rng.derive_named("exploration");
    let max_steps = 64 * (2 * half_width + 1) * (height + 1);
    let exits = par::map_trials(trials as usize, |k| -> Result<ExplorationExit> {
        let mut r = explore.derive(k as u64).rng();
        let c = half_plane_config(half_width, height, 0.5, &mut r)?;
        Ok(exploration_process(&c, half_width, max_steps)?.exit)
    });
    let mut top = Vec::new();
    let mut side = 0u64;
    for e in exits {
        match e? {
            ExplorationExit::Top(x) => top.push(x / height as f64),
            _ => side += 1,
        }
    }
    let sle = rng.derive_named("sle");
    let contacts = par::map_trials(sle_trials as usize, |k| {
        sle_line_contact(6.0, sle_dt, 1.0, horizon, &mut sle.derive(k as u64).rng()).ok().map(|c| c.x)
    });
    let sle_x: Vec<f64> = contacts.into_iter().flatten().collect();
    run.note("side-exits", side);
    run.note("sle-exhausted", sle_trials - sle_x.len() as u64);
    if !top.is_empty() && !sle_x.is_empty() {
        let d = ks_two_sample(&top, &sle_x);
        let (na, nb) = (top.len() as f64, sle_x.len() as f64);
        run.note("ks", d);
        run.note("ks-pvalue", ks_pvalue(d, na * nb / (na + nb)));
    }
    let a = BinomialEstimate::new(top.len() as u64, trials);
    let b = BinomialEstimate::new(sle_x.len() as u64, sle_trials);
    run.finish(
        vec![
            ResultPoint::new(1.0, a.estimate(), a.stderr()),
            ResultPoint::new(2.0, b.estimate(), b.stderr()),
        ],
        None,
    )
}

/// One exploration path in a `width × height` slab of critical bond
/// percolation with the mixed boundary condition, returned with a result
/// whose single point is `(height, exit abscissa / height, 0)`.
pub fn single_exploration(width: usize, height: usize, p: f64, rng: RngStream) -> Result<(ExperimentResult, ExplorationPath)> {
    let mut run = Run::new("exploration", rng);
    run.param("width", width);
    run.param("height", height);
    run.param("p", p);
    let half_width = width / 2;
    let c = half_plane_config(half_width, height, p, &mut rng.derive_named("exploration").rng())?;
    let max_steps = 64 * (2 * half_width + 1) * (height + 1);
    let path = exploration_process(&c, half_width, max_steps)?;
    let (kind, x) = match path.exit {
        ExplorationExit::Top(x) => ("top", x),
        ExplorationExit::Side(x) => ("side", x),
        ExplorationExit::MaxSteps => ("max-steps", f64::NAN),
    };
    run.note("exit", kind);
    run.note("steps", path.vertices.len() - 1);
    let left = path.turns.iter().filter(|t| matches!(t, Turn::Left)).count();
    let right = path.turns.iter().filter(|t| matches!(t, Turn::Right)).count();
    run.note("left-turns", left);
    run.note("right-turns", right);
    let est = if x.is_finite() { x / height as f64 } else { 0.0 };
    let result = run.finish(vec![ResultPoint::new(height as f64, est, 0.0)], None)?;
    Ok((result, path))
}

/// Parameters of the two-path non-intersection comparison in the unit disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HarmonicIdentityConfig {
    /// Disc radius in lattice units (the mesh is `1/radius`).
    pub radius: usize,
    pub epsilons: Vec<f64>,
    /// Path pairs for the direct estimate.
    pub direct_trials: u64,
    /// Hulls for the conditional estimate.
    pub hulls: u64,
    /// Walks from `ε` per hull.
    pub walks_per_hull: u64,
}

impl Default for HarmonicIdentityConfig {
    fn default() -> Self {
        Self {
            radius: 512,
            epsilons: vec![0.125, 0.0625, 0.03125, 0.015625],
            direct_trials: 20_000,
            hulls: 1_000,
            walks_per_hull: 40,
        }
    }
}

/// Lattice disc `{x² + y² < R²}` with helpers for walks stopped on leaving it.
struct LatticeDisc {
    radius: i64,
    side: usize,
}

impl LatticeDisc {
    fn new(radius: usize) -> Self {
        Self {
            radius: radius as i64,
            side: 2 * radius + 3,
        }
    }

    fn inside(&self, (x, y): (i64, i64)) -> bool {
        x * x + y * y < self.radius * self.radius
    }

    /// Cell index on a grid whose cell centres are the lattice points.
    fn index(&self, (x, y): (i64, i64)) -> usize {
        let o = self.radius + 1;
        (y + o) as usize * self.side + (x + o) as usize
    }

    fn grid(&self) -> Result<GridSpec> {
        let h = 1.0 / self.radius as f64;
        let o = -(self.radius as f64 + 1.5) * h;
        GridSpec::new(ComplexPoint::new(o, o), h, self.side, self.side)
    }

    fn start(&self, eps: f64) -> (i64, i64) {
        ((eps * self.radius as f64).round() as i64, 0)
    }

    /// Sites of a walk from the origin inside the disc, up to its exit.
    fn mark_walk(&self, rng: &mut Rng, cells: &mut [bool]) {
        let mut bits = DirectionBits::new();
        let mut s = (0i64, 0i64);
        while self.inside(s) {
            cells[self.index(s)] = true;
            let (dx, dy) = STEPS[bits.next(rng) as usize];
            s = (s.0 + dx, s.1 + dy);
        }
    }

    /// Whether a walk from `s` leaves the disc before visiting a marked site.
    fn escapes(&self, mut s: (i64, i64), cells: &[bool], rng: &mut Rng) -> bool {
        let mut bits = DirectionBits::new();
        while self.inside(s) {
            if cells[self.index(s)] {
                return false;
            }
            let (dx, dy) = STEPS[bits.next(rng) as usize];
            s = (s.0 + dx, s.1 + dy);
        }
        true
    }
}

/// `P[B ∩ B' = ∅]` for walks from 0 and from `ε` stopped on leaving the unit
/// disc, estimated (i) directly from independent pairs and (ii) as the mean,
/// over hulls `K(B)`, of the harmonic measure of the circle seen from `ε` in
/// the disc minus the hull.
///
/// Points are the hull-averaged estimates per `ε` with the fitted slope;
/// the summary holds the direct estimates and the z-scores of the difference.
pub fn harmonic_identity_check(cfg: &HarmonicIdentityConfig, rng: RngStream) -> Result<ExperimentResult> {
    require_trials(cfg.direct_trials)?;
    require_trials(cfg.hulls)?;
    require_trials(cfg.walks_per_hull)?;
    if cfg.radius < 8 {
        return Err(Error::param("radius", "must be at least 8"));
    }
    for &e in &cfg.epsilons {
        if !(e > 0.0 && e < 0.25) {
            return Err(Error::param("epsilons", format!("{e} is outside (0, 1/4)")));
        }
    }
    let mut run = Run::new("harmonic-identity", rng);
    run.param("radius", cfg.radius);
    run.param("epsilons", &cfg.epsilons);
    run.param("direct-trials", cfg.direct_trials);
    run.param("hulls", cfg.hulls);
    run.param("walks-per-hull", cfg.walks_per_hull);
    let disc = LatticeDisc::new(cfg.radius);
    let starts: Vec<(i64, i64)> = cfg.epsilons.iter().map(|&e| disc.start(e)).collect();

    // (i) Direct: one B per trial, one B' from each ε.
    let direct_stream = rng.derive_named("direct");
    let outcomes: Vec<Vec<bool>> = par::map_trials(cfg.direct_trials as usize, |k| {
        let mut r = direct_stream.derive(k as u64).rng();
        let mut cells = vec![false; disc.side * disc.side];
        disc.mark_walk(&mut r, &mut cells);
        starts.iter().map(|&s| disc.escapes(s, &cells, &mut r)).collect()
    });
    let direct: Vec<BinomialEstimate> = (0..starts.len())
        .map(|j| BinomialEstimate::new(outcomes.iter().filter(|o| o[j]).count() as u64, cfg.direct_trials))
        .collect();

    // (ii) Conditional: harmonic measure in the complement of the filled hull.
    let grid = disc.grid()?;
    let domain = GridMask::from_fn(grid, |c, r| {
        let o = disc.radius + 1;
        disc.inside((c as i64 - o, r as i64 - o))
    });
    let target = outer_layer(&domain);
    let hull_stream = rng.derive_named("hulls");
    let per_hull: Vec<Result<Vec<f64>>> = par::map_trials(cfg.hulls as usize, |k| {
        let stream = hull_stream.derive(k as u64);
        let mut r = stream.rng();
        let mut cells = vec![false; disc.side * disc.side];
        disc.mark_walk(&mut r, &mut cells);
        let path_mask = GridMask::from_fn(grid, |c, row| cells[row * disc.side + c]);
        let hull = fill_hull(&path_mask);
        starts
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| {
                let z = ComplexPoint::new(x as f64 * grid.spacing, y as f64 * grid.spacing);
                match harmonic_measure_estimate(&domain, &hull, &target, z, cfg.walks_per_hull, stream.derive(j as u64 + 1)) {
                    Ok(h) => Ok(h.estimate),
                    Err(Error::StartInObstacle) => Ok(0.0),
                    Err(e) => Err(e),
                }
            })
            .collect()
    });
    let per_hull: Vec<Vec<f64>> = per_hull.into_iter().collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(starts.len());
    let mut z_scores = Vec::with_capacity(starts.len());
    let mut direct_points = Vec::with_capacity(starts.len());
    for (j, &eps) in cfg.epsilons.iter().enumerate() {
        let values: Vec<f64> = per_hull.iter().map(|v| v[j]).collect();
        let m = MeanEstimate::from_samples(&values);
        let d = &direct[j];
        let sigma = (m.stderr.powi(2) + d.stderr_floor().powi(2)).sqrt();
        z_scores.push((d.estimate() - m.mean) / sigma);
        direct_points.push(ResultPoint::new(eps, d.estimate(), d.stderr_floor()));
        points.push(ResultPoint::new(eps, m.mean, m.stderr));
    }
    run.note("direct", &direct_points);
    run.note("direct-successes", direct.iter().map(|d| d.successes).collect::<Vec<_>>());
    run.note("z-scores", &z_scores);
    let usable: Vec<ResultPoint> = points.iter().copied().filter(|p| p.estimate > 0.0).collect();
    let fit = if usable.len() >= 3 { Some(fit_points(&usable)?.into()) } else { None };
    run.finish(points, fit)
}

/// Mean harmonic measure of the unit circle seen from `ε`, in the disc minus
/// (a) radial SLE₆ hulls stopped when they reach the circle, and (b) filled
/// hulls of lattice walks from 0 stopped on leaving the disc. Both hull laws
/// are the stopped-Brownian hull law in the continuum; the means are compared
/// by a z-score.
#[allow(clippy::too_many_arguments)]
pub fn cci_vs_bm(
    radius: usize,
    epsilon: f64,
    radial: RadialConfig,
    hulls: u64,
    walks_per_hull: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(hulls)?;
    require_trials(walks_per_hull)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", "must lie in (0, 1)"));
    }
    let mut run = Run::new("cci-vs-bm", rng);
    run.param("radius", radius);
    run.param("epsilon", epsilon);
    run.param("kappa", radial.kappa);
    run.param("dt", radial.dt);
    run.param("t-min", radial.t_min);
    run.param("collide-scale", radial.collide_scale);
    run.param("hulls", hulls);
    run.param("walks-per-hull", walks_per_hull);
    let disc = LatticeDisc::new(radius);
    let grid = disc.grid()?;
    let domain = GridMask::from_fn(grid, |c, r| {
        let o = disc.radius + 1;
        disc.inside((c as i64 - o, r as i64 - o))
    });
    let target = outer_layer(&domain);
    let (sx, sy) = disc.start(epsilon);
    let z = ComplexPoint::new(sx as f64 * grid.spacing, sy as f64 * grid.spacing);
    let measure = |hull: &GridMask, stream: RngStream| -> Result<f64> {
        match harmonic_measure_estimate(&domain, hull, &target, z, walks_per_hull, stream) {
            Ok(h) => Ok(h.estimate),
            Err(Error::StartInObstacle) => Ok(0.0),
            Err(e) => Err(e),
        }
    };
    let cci_stream = rng.derive_named("cci");
    let cci: Vec<Result<Option<f64>>> = par::map_trials(hulls as usize, |k| {
        let s = cci_stream.derive(k as u64);
        match radial_cci_hull(&radial, s.derive(0), Some(grid)) {
            Ok(h) => {
                let mask = h.hull.expect("grid requested");
                let mut hull = fill_hull(&mask);
                hull.union_with(&mask);
                measure(&hull, s.derive(1)).map(Some)
            }
            Err(Error::HorizonExhausted { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let cci: Vec<Option<f64>> = cci.into_iter().collect::<Result<_>>()?;
    let unfinished = cci.iter().filter(|v| v.is_none()).count();
    let cci: Vec<f64> = cci.into_iter().flatten().collect();
    if cci.is_empty() {
        return Err(Error::HorizonExhausted { attained: radial.t_max });
    }
    let bm_stream = rng.derive_named("bm");
    let bm: Vec<Result<f64>> = par::map_trials(hulls as usize, |k| {
        let s = bm_stream.derive(k as u64);
        let mut cells = vec![false; disc.side * disc.side];
        disc.mark_walk(&mut s.derive(0).rng(), &mut cells);
        let path_mask = GridMask::from_fn(grid, |c, row| cells[row * disc.side + c]);
        measure(&fill_hull(&path_mask), s.derive(1))
    });
    let bm: Vec<f64> = bm.into_iter().collect::<Result<_>>()?;
    let a = MeanEstimate::from_samples(&cci);
    let b = MeanEstimate::from_samples(&bm);
    let sigma = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    run.note("unfinished", unfinished);
    run.note("z", (a.mean - b.mean) / sigma);
    run.finish(
        vec![ResultPoint::new(1.0, a.mean, a.stderr), ResultPoint::new(2.0, b.mean, b.stderr)],
        None,
    )
}

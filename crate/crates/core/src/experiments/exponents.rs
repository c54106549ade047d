//! Exponent estimators: power-law fits of exact counts and Monte Carlo
//! frequencies against a scale parameter.

use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{fit_points, require_trials, ExperimentResult, FitSummary, ResultPoint, Run};
use crate::error::{Error, Result};
use crate::geometry::{
    box_counting_dimension, fill_hull, frontier, rasterize_path, ComplexPoint, GridSpec, PathKind,
    PlanarPath,
};
use crate::par;
use crate::paths::{brownian_path, srw_nonintersection_mc, walk_sites};
use crate::percolation::{largest_cluster_boundary, sample_bonds};
use crate::rng::{Rng, RngStream};
use crate::saw::{connectivity_bounds, diameter_distributions, enumerate_saws, Lattice};
use crate::stats::MeanEstimate;

/// Exact walk counts `a_1..a_n` as points `(n, a_n, 0)`.
pub fn saw_count_experiment(n: usize, lattice: Lattice) -> Result<ExperimentResult> {
    let mut run = Run::new("saw-count", RngStream::from_seed(0));
    run.param("n", n);
    run.param("lattice", lattice);
    let table = enumerate_saws(n, lattice)?;
    let points = table
        .counts
        .iter()
        .enumerate()
        .map(|(i, a)| ResultPoint::new((i + 1) as f64, a.to_f64().unwrap_or(f64::INFINITY), 0.0))
        .collect();
    let exact: Vec<String> = table.counts.iter().map(|a| a.to_string()).collect();
    let (mu_upper, ratio_last) = connectivity_bounds(&table)?;
    run.note("counts", exact);
    run.note("mu-upper", mu_upper);
    run.note("ratio-last", ratio_last);
    run.note("submultiplicative", table.is_submultiplicative());
    run.finish(points, None)
}

/// Exact mean diameter `E[d]` of uniform `n`-step walks for
/// `n = n_min..=n_max`, with the log-log slope (unweighted: data are exact).
pub fn saw_diameter_scaling(n_min: usize, n_max: usize, lattice: Lattice) -> Result<ExperimentResult> {
    if n_min == 0 || n_max < n_min + 2 {
        return Err(Error::param("n-min", "need 1 ≤ n-min and at least 3 lengths"));
    }
    let mut run = Run::new("saw-diameter", RngStream::from_seed(0));
    run.param("n-min", n_min);
    run.param("n-max", n_max);
    run.param("lattice", lattice);
    let dists = diameter_distributions(n_max, lattice)?;
    let points: Vec<ResultPoint> = dists[n_min - 1..]
        .iter()
        .map(|d| ResultPoint::new(d.n as f64, d.mean_diameter(), 0.0))
        .collect();
    let fit = fit_points(&points)?;
    run.note("intercept", fit.intercept);
    run.note("residual-norm", fit.residual_norm);
    run.finish(points, Some(fit.into()))
}

/// `P[S{1..n} ∩ S'{0..n} = ∅]` for each `n` in `scales`, with the fitted slope.
pub fn srw_nonintersection_scaling(scales: &[usize], trials: u64, rng: RngStream) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("srw-nonintersection", rng);
    run.param("scales", scales);
    run.param("trials", trials);
    let base = rng.derive_named("srw-nonintersection");
    let mut points = Vec::with_capacity(scales.len());
    let mut successes = Vec::with_capacity(scales.len());
    for &n in scales {
        let est = srw_nonintersection_mc(n, trials, base.derive(n as u64))?;
        successes.push(est.successes);
        points.push(ResultPoint::new(n as f64, est.estimate(), est.stderr_floor()));
    }
    run.note("successes", successes);
    let fit = fit_if_positive(&points)?;
    run.finish(points, fit)
}

/// Which set of a Brownian sample is box-counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontierSet {
    /// Boundary cells of the filled hull of the path.
    Frontier,
    /// The filled hull itself (an area set).
    Hull,
    /// A straight segment from 0 to the path's endpoint (a line set).
    Segment,
}

impl std::str::FromStr for FrontierSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frontier" => Ok(FrontierSet::Frontier),
            "hull" => Ok(FrontierSet::Hull),
            "segment" => Ok(FrontierSet::Segment),
            _ => Err(Error::param("set", format!("unknown set `{s}`"))),
        }
    }
}

/// Box-counting dimension of the outer frontier of Brownian motion on `[0, 1]`.
///
/// Each trial samples the path with step `dt`, rasterizes it at `spacing`,
/// fills its hull and box-counts the hull's boundary cells (or the
/// alternative `set`). Points are the mean occupied-box counts per box size;
/// the reported fit is the mean of the per-trial slopes with its standard
/// error.
pub fn bm_frontier_dimension(
    spacing: f64,
    dt: f64,
    box_sizes: &[usize],
    set: FrontierSet,
    trials: u64,
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    if !(spacing > 0.0 && spacing < 0.5) {
        return Err(Error::param("spacing", "must lie in (0, 1/2)"));
    }
    let mut run = Run::new("bm-frontier", rng);
    run.param("spacing", spacing);
    run.param("dt", dt);
    run.param("box-sizes", box_sizes);
    run.param("set", set);
    run.param("trials", trials);
    let base = rng.derive_named("bm-frontier");
    let per_trial = par::map_trials(trials as usize, |k| {
        frontier_trial(spacing, dt, box_sizes, set, base.derive(k as u64))
    });
    let per_trial: Vec<(f64, Vec<(usize, usize)>)> = per_trial.into_iter().collect::<Result<_>>()?;
    let sizes: Vec<usize> = per_trial
        .iter()
        .map(|(_, c)| c.iter().map(|&(s, _)| s).collect::<Vec<_>>())
        .reduce(|a, b| a.into_iter().filter(|s| b.contains(s)).collect())
        .unwrap_or_default();
    let points: Vec<ResultPoint> = sizes
        .iter()
        .map(|&s| {
            let counts: Vec<f64> = per_trial
                .iter()
                .map(|(_, c)| c.iter().find(|&&(b, _)| b == s).map_or(0.0, |&(_, n)| n as f64))
                .collect();
            let m = MeanEstimate::from_samples(&counts);
            ResultPoint::new(s as f64 * spacing, m.mean, m.stderr)
        })
        .collect();
    let slopes: Vec<f64> = per_trial.iter().map(|(s, _)| *s).collect();
    let m = MeanEstimate::from_samples(&slopes);
    run.note("trial-slopes", &slopes);
    let stderr = if m.stderr.is_finite() { m.stderr } else { 0.0 };
    run.finish(
        points,
        Some(FitSummary {
            slope: m.mean,
            slope_stderr: stderr,
        }),
    )
}

fn frontier_trial(
    spacing: f64,
    dt: f64,
    box_sizes: &[usize],
    set: FrontierSet,
    stream: RngStream,
) -> Result<(f64, Vec<(usize, usize)>)> {
    let path = brownian_path(1.0, dt, stream)?;
    let path = match set {
        FrontierSet::Segment => PlanarPath::new(vec![path.first(), path.last()], PathKind::DiffusionSample, 1.0)?,
        _ => path,
    };
    let (lo, hi) = path.bounding_box();
    let margin = ComplexPoint::new(4.0 * spacing, 4.0 * spacing);
    let spec = GridSpec::covering(lo - margin, hi + margin, spacing)?;
    let raster = rasterize_path(&path, spec)?;
    let mask = match set {
        FrontierSet::Frontier => frontier(&fill_hull(&raster)),
        FrontierSet::Hull => fill_hull(&raster),
        FrontierSet::Segment => raster,
    };
    let dim = box_counting_dimension(&mask, box_sizes)?;
    Ok((dim.slope, dim.counts))
}

/// Mean outer perimeter of the largest open cluster of critical bond
/// percolation on an `n × n` block, for each `n` in `scales`.
pub fn cluster_perimeter_scaling(scales: &[usize], trials: u64, rng: RngStream) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("cluster-perimeter", rng);
    run.param("scales", scales);
    run.param("trials", trials);
    run.param("p", 0.5);
    let base = rng.derive_named("cluster-perimeter");
    let mut points = Vec::with_capacity(scales.len());
    for &n in scales {
        let stream = base.derive(n as u64);
        let per: Vec<Result<f64>> = par::map_trials(trials as usize, |k| {
            let c = sample_bonds(n, n, 0.5, &mut stream.derive(k as u64).rng())?;
            Ok(largest_cluster_boundary(&c)?.perimeter as f64)
        });
        let per: Vec<f64> = per.into_iter().collect::<Result<_>>()?;
        let m = MeanEstimate::from_samples(&per);
        points.push(ResultPoint::new(n as f64, m.mean, m.stderr));
    }
    let fit = fit_if_positive(&points)?;
    run.finish(points, fit)
}

/// Whether two independent `t`-step simple random walks from 0 leave the
/// point `marked` (lattice units, coordinates multiples of ½) connected to
/// infinity in the complement of their union (sites and traversed edges).
///
/// The union is drawn on a doubled raster: site `(x, y)` is cell `(2x, 2y)`
/// and the edge between two sites is the cell between them. Faces are never
/// drawn, so 4-connectivity of undrawn cells is connectivity of the
/// continuum complement. A marked point lying on the union counts as
/// disconnected.
pub fn disconnection_trial(t: usize, marked: (f64, f64), rng: &mut Rng) -> bool {
    let a = walk_sites(t, rng);
    let b = walk_sites(t, rng);
    !disconnects(&[&a, &b], marked)
}

fn disconnects(walks: &[&[(i64, i64)]], marked: (f64, f64)) -> bool {
    let (mx, my) = ((2.0 * marked.0).round() as i64, (2.0 * marked.1).round() as i64);
    let all = walks.iter().flat_map(|w| w.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    // Doubled coordinates, shifted so the bounding box has a free frame.
    let (ox, oy) = (2 * x0 - 1, 2 * y0 - 1);
    let w = (2 * (x1 - x0) + 3) as usize;
    let h = (2 * (y1 - y0) + 3) as usize;
    let (px, py) = (mx - ox, my - oy);
    if px <= 0 || py <= 0 || px as usize >= w - 1 || py as usize >= h - 1 {
        return false;
    }
    const FREE: u8 = 0;
    const DRAWN: u8 = 1;
    const SEEN: u8 = 2;
    let mut cells = vec![FREE; w * h];
    let idx = |x: i64, y: i64| (y - oy) as usize * w + (x - ox) as usize;
    for walk in walks {
        let mut prev = walk[0];
        cells[idx(2 * prev.0, 2 * prev.1)] = DRAWN;
        for &s in &walk[1..] {
            cells[idx(2 * s.0, 2 * s.1)] = DRAWN;
            cells[idx(prev.0 + s.0, prev.1 + s.1)] = DRAWN;
            prev = s;
        }
    }
    let start = py as usize * w + px as usize;
    if cells[start] == DRAWN {
        return true;
    }
    let mut stack = vec![start];
    cells[start] = SEEN;
    while let Some(i) = stack.pop() {
        let (x, y) = (i % w, i / w);
        if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
            return false;
        }
        for j in [i - 1, i + 1, i - w, i + w] {
            if cells[j] == FREE {
                cells[j] = SEEN;
                stack.push(j);
            }
        }
    }
    true
}

/// `P[two t-step walks from 0 do not disconnect the marked point from ∞]`
/// for each `t` in `scales`, with the fitted slope.
pub fn bm_disconnection_mc(
    scales: &[usize],
    trials: u64,
    marked: (f64, f64),
    rng: RngStream,
) -> Result<ExperimentResult> {
    require_trials(trials)?;
    if (2.0 * marked.0).fract() != 0.0 || (2.0 * marked.1).fract() != 0.0 {
        return Err(Error::param("marked", "coordinates must be multiples of 1/2"));
    }
    let mut run = Run::new("bm-disconnection", rng);
    run.param("scales", scales);
    run.param("trials", trials);
    run.param("marked", [marked.0, marked.1]);
    let base = rng.derive_named("bm-disconnection");
    let mut points = Vec::with_capacity(scales.len());
    let mut successes = Vec::with_capacity(scales.len());
    for &t in scales {
        let stream = base.derive(t as u64);
        let hits = par::count_trials(trials as usize, |k| {
            disconnection_trial(t, marked, &mut stream.derive(k as u64).rng())
        });
        let est = crate::stats::BinomialEstimate::new(hits, trials);
        successes.push(hits);
        points.push(ResultPoint::new(t as f64, est.estimate(), est.stderr_floor()));
    }
    run.note("successes", successes);
    let fit = fit_if_positive(&points)?;
    run.finish(points, fit)
}

/// Number of cut times `k ∈ {1, …, n−1}` of a lattice walk: times with
/// `S[0..k] ∩ S[k+1..n] = ∅`.
///
/// A site first visited at `f` and last visited at `l` rules out exactly the
/// times `f ≤ k < l`; the count is the number of times not ruled out, found
/// with one difference array in O(n).
pub fn cut_point_count(walk: &PlanarPath) -> usize {
    cut_times(&walk.sites())
}

fn cut_times(sites: &[(i64, i64)]) -> usize {
    let n = sites.len().saturating_sub(1);
    if n < 2 {
        return 0;
    }
    let mut span: FxHashMap<(i64, i64), (usize, usize)> = FxHashMap::default();
    for (k, &s) in sites.iter().enumerate() {
        span.entry(s).and_modify(|e| e.1 = k).or_insert((k, k));
    }
    let mut diff = vec![0i64; n + 2];
    for &(f, l) in span.values() {
        if f < l {
            diff[f] += 1;
            diff[l] -= 1;
        }
    }
    let mut cover = 0i64;
    let mut count = 0;
    for (k, d) in diff.iter().enumerate().take(n) {
        cover += d;
        if k >= 1 && cover == 0 {
            count += 1;
        }
    }
    count
}

/// Mean number of cut times of an `n`-step walk for each `n` in `scales`.
pub fn cut_point_scaling(scales: &[usize], trials: u64, rng: RngStream) -> Result<ExperimentResult> {
    require_trials(trials)?;
    let mut run = Run::new("cut-points", rng);
    run.param("scales", scales);
    run.param("trials", trials);
    let base = rng.derive_named("cut-points");
    let mut points = Vec::with_capacity(scales.len());
    for &n in scales {
        let stream = base.derive(n as u64);
        let counts: Vec<f64> = par::map_trials(trials as usize, |k| {
            cut_times(&walk_sites(n, &mut stream.derive(k as u64).rng())) as f64
        });
        let m = MeanEstimate::from_samples(&counts);
        points.push(ResultPoint::new(n as f64, m.mean, m.stderr));
    }
    let fit = fit_if_positive(&points)?;
    run.finish(points, fit)
}

/// Fit when at least three points have positive estimates; zero estimates
/// (no successes) are dropped from the fit, not from the result.
fn fit_if_positive(points: &[ResultPoint]) -> Result<Option<FitSummary>> {
    let usable: Vec<ResultPoint> = points.iter().copied().filter(|p| p.estimate > 0.0).collect();
    if usable.len() < 3 {
        return Ok(None);
    }
    Ok(Some(fit_points(&usable)?.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_times_of_simple_walks() {
        // Ten sites, nine steps: every interior time 1..=8 is a cut time.
        let straight: Vec<(i64, i64)> = (0..10).map(|x| (x, 0)).collect();
        assert_eq!(cut_times(&straight), 8);
        assert_eq!(cut_times(&[(0, 0), (1, 0), (0, 0)]), 0);
        // Out, back, then away: the return to the origin rules out time 1 only.
        assert_eq!(cut_times(&[(0, 0), (1, 0), (0, 0), (-1, 0), (-2, 0)]), 2);
    }

    #[test]
    fn square_loop_disconnects_its_face() {
        let ring: Vec<(i64, i64)> = vec![(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)];
        assert!(disconnects(&[&ring, &[(0, 0)]], (0.5, 0.5)));
        assert!(!disconnects(&[&ring, &[(0, 0)]], (1.5, 0.5)));
        // An open U leaves the face connected.
        let u: Vec<(i64, i64)> = vec![(0, 1), (0, 0), (1, 0), (1, 1)];
        assert!(!disconnects(&[&u, &[(0, 0)]], (0.5, 0.5)));
        // A point on the walk counts as disconnected.
        assert!(disconnects(&[&u, &[(0, 0)]], (0.5, 0.0)));
    }
}

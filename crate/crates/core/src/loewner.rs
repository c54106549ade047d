//! Chordal and radial Loewner evolutions with piecewise-constant driving.
//!
//! Chordal maps are compositions of exact elementary slit maps
//! `e(w) = a + √((w − a)² + 4δt)`, the solution of `∂g = 2/(g − a)` for a
//! constant driving value over a time `δt`. Radial maps integrate
//! `∂f = −f (f + ζ)/(f − ζ)` in the exterior normalization `f_t(z) ≈ z e^{−t}`.

use std::f64::consts::PI;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexPoint, GridMask, GridSpec};
use crate::par;
use crate::rng::{normal, uniform, Rng, RngStream};
use crate::stats::BinomialEstimate;

/// Default collision scale: `δ_collide = 2·√dt`.
pub const DEFAULT_COLLIDE_SCALE: f64 = 2.0;
/// Default start time of radial evolutions.
pub const DEFAULT_T_MIN: f64 = -8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriverKind {
    /// Real driving point `a(t)` of a chordal evolution.
    ChordalReal,
    /// Angle `θ(t)` of the radial driving point `ζ(t) = e^{iθ(t)}`.
    RadialAngle,
}

/// Driving function sampled at increasing times, held constant on each
/// interval `[t_k, t_{k+1})` at the value `v_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingFunction {
    kind: DriverKind,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl DrivingFunction {
    pub fn new(kind: DriverKind, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::param("times", "need one value per time and at least one sample"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::param("values", "must be finite"));
        }
        Ok(Self { kind, times, values })
    }

    /// Driving identically equal to `value` on `[0, horizon]`, sampled every `dt`.
    pub fn constant(kind: DriverKind, value: f64, dt: f64, horizon: f64) -> Result<Self> {
        let n = step_count(dt, horizon)?;
        Self::new(
            kind,
            (0..=n).map(|k| k as f64 * dt).collect(),
            vec![value; n + 1],
        )
    }

    pub fn kind(&self) -> DriverKind {
        self.kind
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Value in force at time `t` (the last sample at or before `t`).
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.values[k.saturating_sub(1)]
    }

    /// Same samples with every time shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            kind: self.kind,
            times: self.times.iter().map(|t| t + offset).collect(),
            values: self.values.clone(),
        }
    }

    /// Piecewise-constant pieces `(t_start, t_end, value)` clipped to `[t0, t1]`.
    pub fn pieces(&self, t0: f64, t1: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let first = self.times.partition_point(|&s| s <= t0).saturating_sub(1);
        (first..self.times.len().saturating_sub(1)).filter_map(move |k| {
            let a = self.times[k].max(t0);
            let b = self.times[k + 1].min(t1);
            (b > a).then_some((a, b, self.values[k]))
        })
    }

    /// CSV with columns `t,value`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

fn step_count(dt: f64, horizon: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", "must be positive"));
    }
    Ok(((horizon / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
}

/// Brownian driving `√κ·W` sampled every `dt` up to (at least) `horizon`.
///
/// Chordal drivers start at 0; radial drivers start at a uniform angle in
/// `[0, 2π)`. Times run from 0; see [`DrivingFunction::shifted`].
pub fn sle_driving(kappa: f64, dt: f64, horizon: f64, kind: DriverKind, rng: RngStream) -> Result<DrivingFunction> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::param("kappa", "must be nonnegative"));
    }
    let n = step_count(dt, horizon)?;
    let mut r = rng.rng();
    let mut v = match kind {
        DriverKind::ChordalReal => 0.0,
        DriverKind::RadialAngle => 2.0 * PI * uniform(&mut r),
    };
    let s = (kappa * dt).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    values.push(v);
    for _ in 0..n {
        v += s * normal(&mut r);
        values.push(v);
    }
    DrivingFunction::new(kind, (0..=n).map(|k| k as f64 * dt).collect(), values)
}

/// Elementary slit map `a + √((w − a)² + 4δt)` with the branch in the closed
/// upper half-plane, returned as the displacement `e(w) − w = 4δt/(s + v)`
/// (`v = w − a`), which stays accurate when `|w|` is large.
#[inline]
pub fn elementary_displacement(w: ComplexPoint, a: f64, dt: f64) -> ComplexPoint {
    let v = w - a;
    let s = branch_sqrt(v * v + 4.0 * dt, v);
    (4.0 * dt) / (s + v)
}

/// Square root of `q` on the same side as `v`: `Im ≥ 0`, and for real
/// arguments the sign of `Re v`.
#[inline]
fn branch_sqrt(q: ComplexPoint, v: ComplexPoint) -> ComplexPoint {
    let s = q.sqrt();
    let flip = if v.im > 0.0 || s.im != 0.0 {
        s.im < 0.0
    } else {
        (s.re < 0.0) != (v.re < 0.0)
    };
    if flip {
        -s
    } else {
        s
    }
}

#[inline]
pub fn elementary(w: ComplexPoint, a: f64, dt: f64) -> ComplexPoint {
    w + elementary_displacement(w, a, dt)
}

/// Inverse slit map `a + √((w − a)² − 4δt)`, from H onto H minus the
/// vertical slit `[a, a + 2i√δt]`.
#[inline]
pub fn elementary_inverse(w: ComplexPoint, a: f64, dt: f64) -> ComplexPoint {
    let v = w - a;
    let q = v * v - 4.0 * dt;
    let mut s = q.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && (s.re < 0.0) != (v.re < 0.0)) {
        s = -s;
    }
    if v.im == 0.0 && q.re < 0.0 {
        // Real points inside [a − 2√δt, a + 2√δt] go to the two sides of the slit.
        s = ComplexPoint::new(0.0, q.re.abs().sqrt());
    }
    s + a
}

/// Composition of elementary slit maps `(δt_k, a_k)`, applied in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordalState {
    steps: Vec<(f64, f64)>,
    /// Distance to the driving point at which a point counts as swallowed.
    pub collide: f64,
}

impl ChordalState {
    pub fn new(collide: f64) -> Self {
        Self {
            steps: Vec::new(),
            collide,
        }
    }

    pub fn push(&mut self, dt: f64, a: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) || !a.is_finite() {
            return Err(Error::param("step", "need dt > 0 and finite a"));
        }
        self.steps.push((dt, a));
        Ok(())
    }

    /// Steps of `driving` on `[start, start + horizon]`.
    pub fn from_driving(driving: &DrivingFunction, horizon: f64, collide: f64) -> Self {
        let t0 = driving.start();
        Self {
            steps: driving
                .pieces(t0, t0 + horizon)
                .map(|(a, b, v)| (b - a, v))
                .collect(),
            collide,
        }
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn prefix(&self, k: usize) -> Self {
        Self {
            steps: self.steps[..k.min(self.steps.len())].to_vec(),
            collide: self.collide,
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &ChordalState) -> Self {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Self {
            steps,
            collide: self.collide,
        }
    }

    /// Half-plane capacity `2·Σδt` in floating point.
    pub fn capacity(&self) -> f64 {
        2.0 * self.steps.iter().map(|s| s.0).sum::<f64>()
    }

    /// Half-plane capacity `2·Σδt` summed exactly over the binary values of δt.
    pub fn capacity_exact(&self) -> BigRational {
        let mut total = BigRational::zero();
        for &(dt, _) in &self.steps {
            total += BigRational::from_float(dt).expect("finite step");
        }
        total * BigRational::from_integer(BigInt::from(2))
    }

    /// Index of the step before which `z` comes within `collide` of the
    /// driving point, or `None` if it survives all steps.
    ///
    /// Along the flow `d(Im g)²/dt = −4 (Im g)²/|g − a|² ≥ −4`, so a point
    /// with `(Im w)² > collide² + 4·(time left)` can no longer be swallowed
    /// and is released early.
    pub fn swallow_step(&self, z: ComplexPoint) -> Option<usize> {
        let mut w = z;
        let mut left: f64 = self.steps.iter().map(|s| s.0).sum();
        let c2 = self.collide * self.collide;
        for (k, &(dt, a)) in self.steps.iter().enumerate() {
            if (w - a).norm() <= self.collide {
                return Some(k);
            }
            if w.im * w.im > c2 + 4.0 * left * (1.0 + 1e-9) {
                return None;
            }
            w = elementary(w, a, dt);
            left -= dt;
        }
        None
    }
}

/// `g(z)` for the composed map, or `None` if `z` is swallowed.
pub fn chordal_apply(state: &ChordalState, z: ComplexPoint) -> Option<ComplexPoint> {
    chordal_displacement(state, z).map(|d| z + d)
}

/// `g(z) − z`, accumulated step by step so that it keeps full relative
/// precision when `|z|` is large; `None` if `z` is swallowed.
pub fn chordal_displacement(state: &ChordalState, z: ComplexPoint) -> Option<ComplexPoint> {
    let mut d = ComplexPoint::new(0.0, 0.0);
    for &(dt, a) in &state.steps {
        let w = z + d;
        if (w - a).norm() <= state.collide {
            return None;
        }
        d += elementary_displacement(w, a, dt);
    }
    Some(d)
}

/// Tip of the slit grown by the composed map: the preimage of the last driving
/// value, computed by unzipping all steps (cost linear in the number of steps).
pub fn chordal_tip(state: &ChordalState) -> ComplexPoint {
    let Some(&(_, a_last)) = state.steps.last() else {
        return ComplexPoint::new(0.0, 0.0);
    };
    let mut w = ComplexPoint::new(a_last, 0.0);
    for &(dt, a) in state.steps.iter().rev() {
        w = elementary_inverse(w, a, dt);
    }
    w
}

/// Swallow time of a real point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwallowReport {
    pub point: f64,
    /// `None` when not swallowed within the horizon.
    pub swallow_time: Option<f64>,
    /// `g_t(x) − a(t)` when swallowed, or at the horizon.
    pub terminal_value: f64,
}

/// Follows `y_t = g_t(x) − a(t)` under the driving function.
///
/// Over a piece of constant driving `y² ↦ y² + 4δt` exactly; at each driving
/// jump `y` shifts by the jump. The point is swallowed when `|y| ≤ collide`
/// or when a jump carries the driving point across it.
pub fn swallow_time_real(driving: &DrivingFunction, x: f64, horizon: f64, collide: f64) -> Result<SwallowReport> {
    if x == 0.0 {
        return Err(Error::SwallowedAtStart);
    }
    let t0 = driving.start();
    let mut y = x - driving.values()[0];
    let mut last_a = driving.values()[0];
    for (a_time, b_time, a) in driving.pieces(t0, t0 + horizon) {
        let shifted = y - (a - last_a);
        last_a = a;
        if shifted.abs() <= collide || shifted.signum() != y.signum() {
            return Ok(SwallowReport {
                point: x,
                swallow_time: Some(a_time - t0),
                terminal_value: shifted,
            });
        }
        y = shifted.signum() * (shifted * shifted + 4.0 * (b_time - a_time)).sqrt();
    }
    Ok(SwallowReport {
        point: x,
        swallow_time: None,
        terminal_value: y,
    })
}

/// Step control for [`swallow_race`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaceConfig {
    pub kappa: f64,
    /// Smallest time step; also sets the collision distance `2√dt_min`.
    pub dt_min: f64,
    /// Step is `eta · min|y|²`, but at least `dt_min`.
    pub eta: f64,
}

impl Default for RaceConfig {
    fn default() -> Self {
        Self {
            kappa: 6.0,
            dt_min: 1e-12,
            eta: 0.002,
        }
    }
}

/// Which of `−a` and `b` is swallowed first by chordal SLE_κ started at 0.
///
/// The driving Brownian motion is generated on the fly with a step
/// proportional to the squared distance of the nearer point. The process is
/// scale invariant, so this keeps the relative accuracy uniform: near-hits
/// are resolved down to `2√dt_min`, and the long excursions where both
/// points drift far away (swallow times have a power-law tail) stay cheap. Returns `true`
/// when `−a` goes first, with the swallow time.
pub fn swallow_race(a: f64, b: f64, cfg: &RaceConfig, rng: &mut Rng) -> (bool, f64) {
    let mut yl = -a;
    let mut yr = b;
    let delta = 2.0 * cfg.dt_min.sqrt();
    let mut t = 0.0;
    loop {
        let m = yl.abs().min(yr);
        let dt = (cfg.eta * m * m).max(cfg.dt_min);
        yl = -(yl * yl + 4.0 * dt).sqrt();
        yr = (yr * yr + 4.0 * dt).sqrt();
        let dw = (cfg.kappa * dt).sqrt() * normal(rng);
        yl -= dw;
        yr -= dw;
        t += dt;
        let left = yl >= -delta;
        let right = yr <= delta;
        if left || right {
            let left_first = if left && right { dw < 0.0 } else { left };
            return (left_first, t);
        }
    }
}

/// Estimate of `P(T_{−a} < T_b)` from `trials` independent races.
pub fn cardy_race_mc(a: f64, b: f64, cfg: &RaceConfig, trials: u64, rng: RngStream) -> Result<BinomialEstimate> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::param("a/b", "both points must be at positive distance from 0"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let hits = par::count_trials(trials as usize, |k| swallow_race(a, b, cfg, &mut rng.derive(k as u64).rng()).0);
    Ok(BinomialEstimate::new(hits, trials))
}

/// The same race with a fixed-step driver and [`swallow_time_real`]; kept to
/// measure the bias that the adaptive driver removes.
#[allow(clippy::too_many_arguments)]
pub fn cardy_fixed_step_mc(a: f64, b: f64, kappa: f64, dt: f64, collide: f64, horizon: f64, trials: u64, rng: RngStream) -> Result<(BinomialEstimate, u64)> {
    let outcomes = par::map_trials(trials as usize, |k| -> Result<Option<bool>> {
        let d = sle_driving(kappa, dt, horizon, DriverKind::ChordalReal, rng.derive(k as u64))?;
        let l = swallow_time_real(&d, -a, horizon, collide)?.swallow_time;
        let r = swallow_time_real(&d, b, horizon, collide)?.swallow_time;
        Ok(match (l, r) {
            (Some(tl), Some(tr)) => Some(tl < tr),
            (Some(_), None) => Some(true),
            (None, Some(_)) => Some(false),
            (None, None) => None,
        })
    });
    let mut hits = 0;
    let mut decided = 0;
    let mut undecided = 0;
    for o in outcomes {
        match o? {
            Some(l) => {
                decided += 1;
                hits += l as u64;
            }
            None => undecided += 1,
        }
    }
    Ok((BinomialEstimate::new(hits, decided), undecided))
}

/// Cells (by centre) of `grid` in the open upper half-plane swallowed by the
/// chordal evolution by time `horizon`, each tested independently.
pub fn chordal_hull_extract(driving: &DrivingFunction, grid: GridSpec, horizon: f64, collide: f64) -> GridMask {
    let state = ChordalState::from_driving(driving, horizon, collide);
    let rows: Vec<Vec<bool>> = par::map_trials(grid.rows, |r| {
        (0..grid.cols)
            .map(|c| {
                let z = grid.center(c, r);
                z.im > 0.0 && state.swallow_step(z).is_some()
            })
            .collect()
    });
    GridMask::from_fn(grid, |c, r| rows[r][c])
}

/// Height at which the chordal trace first reaches the line `Im z = height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineContact {
    pub x: f64,
    pub time: f64,
}

/// Runs chordal SLE_κ from 0 with step `dt` until the trace tip first reaches
/// `Im z ≥ height`, and returns the (linearly interpolated) contact point.
/// The hull first meets the line where the trace does. The tip is recomputed
/// by unzipping every step up to 2000 steps, and on a sparser schedule after.
pub fn sle_line_contact(kappa: f64, dt: f64, height: f64, horizon: f64, rng: &mut Rng) -> Result<LineContact> {
    let mut state = ChordalState::new(0.0);
    let mut a = 0.0;
    let mut prev = ComplexPoint::new(0.0, 0.0);
    let s = (kappa * dt).sqrt();
    let max_steps = step_count(dt, horizon)?;
    let mut max_height: f64 = 0.0;
    for k in 0..max_steps {
        state.push(dt, a)?;
        a += s * normal(rng);
        let stride = (k / 2000).max(1);
        if k % stride != 0 && k + 1 != max_steps {
            continue;
        }
        let tip = chordal_tip(&state);
        max_height = max_height.max(tip.im);
        if tip.im >= height {
            let u = if tip.im > prev.im { (height - prev.im) / (tip.im - prev.im) } else { 1.0 };
            return Ok(LineContact {
                x: prev.re + u * (tip.re - prev.re),
                time: (k + 1) as f64 * dt,
            });
        }
        prev = tip;
    }
    Err(Error::HorizonExhausted { attained: max_height })
}

/// Radial vector field `−f (f + ζ)/(f − ζ)`.
#[inline]
fn radial_field(f: ComplexPoint, zeta: ComplexPoint) -> ComplexPoint {
    -f * (f + zeta) / (f - zeta)
}

/// Exact radial flow over a time `dt` with constant driving point `ζ`:
/// `Q(w) = (w + 1)²/w` with `w = f/ζ` is multiplied by `e^{−dt}` and the new
/// `w` is the root of `w² + (2 − Q)w + 1 = 0` outside the unit disc.
#[inline]
pub fn radial_step_exact(f: ComplexPoint, zeta: ComplexPoint, dt: f64) -> ComplexPoint {
    let w = f / zeta;
    let q = (w + 1.0) * (w + 1.0) / w * (-dt).exp();
    let b = q - 2.0;
    let s = (b * b - 4.0).sqrt();
    let (r1, r2) = ((b + s) * 0.5, (b - s) * 0.5);
    let r = if r1.norm_sqr() >= r2.norm_sqr() { r1 } else { r2 };
    r * zeta
}

/// Integrates the radial Loewner equation from `f(t0) = z` to `t1` with
/// fourth-order Runge–Kutta, using steps no longer than `0.02·|f − ζ|²`
/// (and 0.01) so the singularity at `f = ζ` is resolved. Returns `None` once
/// `|f − ζ| ≤ collide`.
pub fn radial_flow(driving: &DrivingFunction, z: ComplexPoint, t0: f64, t1: f64, collide: f64) -> Option<ComplexPoint> {
    let mut f = z;
    if t1 <= t0 {
        return Some(f);
    }
    for (a, b, theta) in driving.pieces(t0, t1) {
        let zeta = ComplexPoint::from_polar(1.0, theta);
        let mut t = a;
        while t < b {
            let gap = (f - zeta).norm();
            if gap <= collide {
                return None;
            }
            let h = (0.02 * gap * gap).clamp(1e-12, 0.01).min(b - t);
            let k1 = radial_field(f, zeta);
            let k2 = radial_field(f + k1 * (h / 2.0), zeta);
            let k3 = radial_field(f + k2 * (h / 2.0), zeta);
            let k4 = radial_field(f + k3 * h, zeta);
            f += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            t += h;
        }
    }
    if (f - ComplexPoint::from_polar(1.0, driving.value_at(t1))).norm() <= collide {
        return None;
    }
    Some(f)
}

/// `f_t(z)` for a radial evolution started at `t_min` from the disc of radius
/// `e^{t_min}` (so `f_{t_min}(z) = z e^{−t_min}`); the driving times must
/// start at `t_min`.
pub fn radial_map(driving: &DrivingFunction, z: ComplexPoint, t: f64, collide: f64) -> Option<ComplexPoint> {
    let t_min = driving.start();
    if z.norm() <= t_min.exp() {
        return None;
    }
    radial_flow(driving, z * (-t_min).exp(), t_min, t, collide)
}

/// Parameters of a radial SLE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    pub kappa: f64,
    pub dt: f64,
    pub t_min: f64,
    pub collide_scale: f64,
    /// Number of equally spaced points of the unit circle watched for contact.
    pub circle_points: usize,
    /// Give up if the hull has not reached the unit circle by this time.
    pub t_max: f64,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self {
            kappa: 6.0,
            dt: 1e-3,
            t_min: DEFAULT_T_MIN,
            collide_scale: DEFAULT_COLLIDE_SCALE,
            circle_points: 512,
            t_max: 4.0,
        }
    }
}

/// Radial hull stopped when it first reaches the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CciHull {
    /// Swallowed cells, when a grid was requested.
    pub hull: Option<GridMask>,
    /// First point of the unit circle reached by the hull.
    pub endpoint: ComplexPoint,
    pub touch_time: f64,
    pub driving: DrivingFunction,
}

/// Radial SLE_κ from `t_min` (initial hull: the disc of radius `e^{t_min}`)
/// until the hull first meets the unit circle.
///
/// The touch time is the first swallow time among `circle_points` points of
/// the circle. Each piece of constant driving is applied with the exact
/// constant-ζ flow. With a grid, every cell centre in the disc is then
/// tested for swallowing by the touch time; cells meeting the initial disc
/// are always included.
pub fn radial_cci_hull(cfg: &RadialConfig, rng: RngStream, grid: Option<GridSpec>) -> Result<CciHull> {
    if cfg.circle_points < 8 {
        return Err(Error::param("circle_points", "need at least 8"));
    }
    let driving = sle_driving(cfg.kappa, cfg.dt, cfg.t_max - cfg.t_min, DriverKind::RadialAngle, rng)?.shifted(cfg.t_min);
    let collide = cfg.collide_scale * cfg.dt.sqrt();
    let scale = (-cfg.t_min).exp();
    let m = cfg.circle_points;
    let mut ws: Vec<ComplexPoint> = (0..m)
        .map(|j| ComplexPoint::from_polar(scale, 2.0 * PI * j as f64 / m as f64))
        .collect();
    let mut touch = None;
    'outer: for (a, b, theta) in driving.pieces(cfg.t_min, cfg.t_max) {
        let zeta = ComplexPoint::from_polar(1.0, theta);
        let mut best: Option<(usize, f64)> = None;
        for (j, w) in ws.iter().enumerate() {
            let gap = (w - zeta).norm();
            if gap <= collide && best.is_none_or(|(_, g)| gap < g) {
                best = Some((j, gap));
            }
        }
        if let Some((j, _)) = best {
            touch = Some((j, a));
            break 'outer;
        }
        for w in ws.iter_mut() {
            *w = radial_step_exact(*w, zeta, b - a);
        }
    }
    let Some((j, t_touch)) = touch else {
        let max_radius = (cfg.t_max).exp();
        return Err(Error::HorizonExhausted { attained: max_radius });
    };
    let endpoint = ComplexPoint::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
    let hull = grid.map(|g| radial_hull_mask(&driving, g, cfg.t_min, t_touch, collide));
    Ok(CciHull {
        hull,
        endpoint,
        touch_time: t_touch,
        driving,
    })
}

fn radial_hull_mask(driving: &DrivingFunction, grid: GridSpec, t_min: f64, t: f64, collide: f64) -> GridMask {
    let r0 = t_min.exp();
    let half = 0.5 * grid.spacing;
    let rows: Vec<Vec<bool>> = par::map_trials(grid.rows, |r| {
        (0..grid.cols)
            .map(|c| {
                let z = grid.center(c, r);
                if z.norm() >= 1.0 {
                    return false;
                }
                // Cell square meets the initial disc.
                let nearest = ComplexPoint::new((-z.re).clamp(-half, half), (-z.im).clamp(-half, half));
                if (z + nearest).norm() <= r0 || (z.re.abs() <= half && z.im.abs() <= half) {
                    return true;
                }
                let mut w = z / r0;
                for (a, b, theta) in driving.pieces(t_min, t) {
                    let zeta = ComplexPoint::from_polar(1.0, theta);
                    if (w - zeta).norm() <= collide {
                        return true;
                    }
                    w = radial_step_exact(w, zeta, b - a);
                }
                false
            })
            .collect()
    });
    GridMask::from_fn(grid, |c, r| rows[r][c])
}

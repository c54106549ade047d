//! Flat key-value experiment configurations and the dispatcher.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;

use super::exponents::*;
use super::laws::*;
use super::ExperimentResult;
use crate::error::{Error, Result};
use crate::loewner::{RaceConfig, RadialConfig};
use crate::rng::RngStream;
use crate::saw::Lattice;

/// Identifiers accepted by [`run_experiment`].
pub const EXPERIMENT_IDS: [&str; 15] = [
    "saw-count",
    "saw-diameter",
    "srw-nonintersection",
    "bm-frontier",
    "cluster-perimeter",
    "bm-disconnection",
    "cut-points",
    "harmonic-identity",
    "sle-vs-rbm",
    "rbm-cardy",
    "cardy-crossing",
    "sle-cardy",
    "triangle-endpoint",
    "exploration-vs-sle",
    "cci-vs-bm",
];

/// A parsed configuration: `experiment = "<id>"`, an optional `seed`, and
/// the experiment's parameters as top-level keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: Option<u64>,
    pub params: toml::Table,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed: None,
            params: toml::Table::new(),
        }
    }

    /// Adds or replaces a parameter.
    pub fn with(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Format(e.to_string()))?;
        let experiment = match table.remove("experiment") {
            Some(toml::Value::String(s)) => s,
            Some(_) => return Err(Error::param("experiment", "must be a string")),
            None => return Err(Error::param("experiment", "missing")),
        };
        let seed = match table.remove("seed") {
            Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
            Some(_) => return Err(Error::param("seed", "must be a nonnegative integer")),
            None => None,
        };
        for (k, v) in &table {
            if v.is_table() {
                return Err(Error::param(k, "nested tables are not allowed in a flat configuration"));
            }
        }
        Ok(Self {
            experiment,
            seed,
            params: table,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Typed access to the parameter table; remembers which keys were read so
/// that leftovers can be reported.
struct Params {
    table: toml::Table,
    used: BTreeSet<String>,
}

impl Params {
    fn get<T: DeserializeOwned>(&mut self, key: &str, default: T) -> Result<T> {
        self.used.insert(key.to_string());
        match self.table.get(key) {
            None => Ok(default),
            Some(v) => v.clone().try_into().map_err(|e: toml::de::Error| Error::param(key, e.message())),
        }
    }

    fn parsed<T: std::str::FromStr<Err = Error>>(&mut self, key: &str, default: &str) -> Result<T> {
        let s: String = self.get(key, default.to_string())?;
        s.parse()
    }

    fn finish(self) -> Result<()> {
        match self.table.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(Error::param(k, "unknown parameter for this experiment")),
            None => Ok(()),
        }
    }
}

fn pow2(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

/// Reads the configuration file and runs it; `seed` overrides the file's seed.
pub fn run_experiment(path: &Path, seed: Option<u64>) -> Result<ExperimentResult> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if seed.is_some() {
        cfg.seed = seed;
    }
    run_experiment_config(&cfg)
}

/// Runs a parsed configuration (master seed 0 when none is given).
pub fn run_experiment_config(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let rng = RngStream::from_seed(cfg.seed.unwrap_or(0));
    let mut p = Params {
        table: cfg.params.clone(),
        used: BTreeSet::new(),
    };
    let result = match cfg.experiment.as_str() {
        "saw-count" => {
            let n = p.get("n", 12usize)?;
            let lattice: Lattice = p.parsed("lattice", "square")?;
            p.finish()?;
            saw_count_experiment(n, lattice)
        }
        "saw-diameter" => {
            let n_min = p.get("n-min", 8usize)?;
            let n_max = p.get("n-max", 16usize)?;
            let lattice: Lattice = p.parsed("lattice", "square")?;
            p.finish()?;
            saw_diameter_scaling(n_min, n_max, lattice)
        }
        "srw-nonintersection" => {
            let scales = p.get("scales", pow2(7, 13))?;
            let trials = p.get("trials", 200_000u64)?;
            p.finish()?;
            srw_nonintersection_scaling(&scales, trials, rng)
        }
        "bm-frontier" => {
            let spacing = p.get("spacing", 1.0 / 2048.0)?;
            let dt = p.get("dt", 1e-6)?;
            let boxes = p.get("box-sizes", pow2(2, 7))?;
            let set: FrontierSet = p.parsed("set", "frontier")?;
            let trials = p.get("trials", 20u64)?;
            p.finish()?;
            bm_frontier_dimension(spacing, dt, &boxes, set, trials, rng)
        }
        "cluster-perimeter" => {
            let scales = p.get("scales", pow2(6, 9))?;
            let trials = p.get("trials", 200u64)?;
            p.finish()?;
            cluster_perimeter_scaling(&scales, trials, rng)
        }
        "bm-disconnection" => {
            let scales = p.get("scales", pow2(10, 16))?;
            let trials = p.get("trials", 10_000u64)?;
            let marked: [f64; 2] = p.get("marked", [0.5, 0.5])?;
            p.finish()?;
            bm_disconnection_mc(&scales, trials, (marked[0], marked[1]), rng)
        }
        "cut-points" => {
            let scales = p.get("scales", pow2(10, 14))?;
            let trials = p.get("trials", 2_000u64)?;
            p.finish()?;
            cut_point_scaling(&scales, trials, rng)
        }
        "harmonic-identity" => {
            let d = HarmonicIdentityConfig::default();
            let c = HarmonicIdentityConfig {
                radius: p.get("radius", d.radius)?,
                epsilons: p.get("epsilons", d.epsilons)?,
                direct_trials: p.get("direct-trials", d.direct_trials)?,
                hulls: p.get("hulls", d.hulls)?,
                walks_per_hull: p.get("walks-per-hull", d.walks_per_hull)?,
            };
            p.finish()?;
            harmonic_identity_check(&c, rng)
        }
        "sle-vs-rbm" => {
            let height = p.get("height", 1.0)?;
            let half_width = p.get("half-width", 10.0)?;
            let control = p.get("control", false)?;
            let sle_dt = p.get("sle-dt", 1e-3)?;
            let horizon = p.get("horizon", 20.0)?;
            let rbm_dt = p.get("rbm-dt", 1e-4)?;
            let max_steps = p.get("max-steps", 10_000_000u64)?;
            let trials = p.get("trials", 2_000u64)?;
            p.finish()?;
            let sides = if control {
                (LawSide::Sle, LawSide::Sle)
            } else {
                (LawSide::Sle, LawSide::ReflectedBm)
            };
            sle_vs_reflected_bm(height, half_width, sides, sle_dt, horizon, rbm_dt, max_steps, trials, rng)
        }
        "rbm-cardy" => {
            let dt = p.get("dt", 1e-4)?;
            let max_radius = p.get("max-radius", 1e6)?;
            let field: String = p.get("field", "oblique".to_string())?;
            let vertical = match field.as_str() {
                "oblique" => false,
                "vertical" => true,
                _ => return Err(Error::param("field", "expected `oblique` or `vertical`")),
            };
            let trials = p.get("trials", 10_000u64)?;
            p.finish()?;
            reflected_bm_cardy(dt, max_radius, vertical, trials, rng)
        }
        "cardy-crossing" => {
            let width = p.get("width", 2.0)?;
            let height = p.get("height", 1.0)?;
            let n = p.get("n", 128usize)?;
            let prob = p.get("p", 0.5)?;
            let trials = p.get("trials", 100_000u64)?;
            p.finish()?;
            cardy_crossing_experiment(width, height, n, prob, trials, rng)
        }
        "sle-cardy" => {
            let pairs: Vec<[f64; 2]> = p.get("pairs", vec![[1.0, 1.0], [2.0, 1.0]])?;
            let d = RaceConfig::default();
            let race = RaceConfig {
                kappa: p.get("kappa", d.kappa)?,
                dt_min: p.get("dt-min", d.dt_min)?,
                eta: p.get("eta", d.eta)?,
            };
            let trials = p.get("trials", 10_000u64)?;
            p.finish()?;
            let pairs: Vec<(f64, f64)> = pairs.iter().map(|q| (q[0], q[1])).collect();
            sle_cardy_experiment(&pairs, race, trials, rng)
        }
        "triangle-endpoint" => {
            let side = p.get("side", 256usize)?;
            let prob = p.get("p", 0.5)?;
            let trials = p.get("trials", 10_000u64)?;
            p.finish()?;
            triangle_endpoint_experiment(side, prob, trials, rng)
        }
        "exploration-vs-sle" => {
            let height = p.get("height", 64usize)?;
            let half_width = p.get("half-width", 256usize)?;
            let trials = p.get("trials", 1_000u64)?;
            let sle_trials = p.get("sle-trials", 1_000u64)?;
            let sle_dt = p.get("sle-dt", 1e-3)?;
            let horizon = p.get("horizon", 20.0)?;
            p.finish()?;
            exploration_vs_sle(height, half_width, trials, sle_trials, sle_dt, horizon, rng)
        }
        "cci-vs-bm" => {
            let radius = p.get("radius", 32usize)?;
            let epsilon = p.get("epsilon", 0.25)?;
            let d = RadialConfig::default();
            let radial = RadialConfig {
                kappa: p.get("kappa", d.kappa)?,
                dt: p.get("dt", 2e-3)?,
                t_min: p.get("t-min", d.t_min)?,
                collide_scale: p.get("collide-scale", d.collide_scale)?,
                circle_points: p.get("circle-points", d.circle_points)?,
                t_max: p.get("t-max", d.t_max)?,
            };
            let hulls = p.get("hulls", 100u64)?;
            let walks = p.get("walks-per-hull", 100u64)?;
            p.finish()?;
            cci_vs_bm(radius, epsilon, radial, hulls, walks, rng)
        }
        other => return Err(Error::UnknownExperiment(other.to_string())),
    }?;
    Ok(result)
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conflab_core::experiments::{
    cardy_crossing_experiment, cluster_perimeter_scaling, run_experiment, single_exploration, write_csv, write_json,
    write_svg, ExperimentResult,
};
use conflab_core::geometry::write_mask;
use conflab_core::loewner::{
    chordal_hull_extract, radial_cci_hull, sle_driving, DriverKind, RadialConfig, DEFAULT_COLLIDE_SCALE, DEFAULT_T_MIN,
};
use conflab_core::saw::{diameter_distribution, enumerate_saws, Lattice};
use conflab_core::special::{cardy_f, rectangle_crossing_prediction};
use conflab_core::{par, ComplexPoint, GridSpec, RngStream};

#[derive(Parser)]
#[command(name = "conflab", version, about = "Conformally invariant random processes at desk scale")]
struct Cli {
    /// Worker threads (0: one per core). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a flat configuration file.
    Run(RunArgs),
    /// Evaluate Cardy's crossing formula.
    Cardy(CardyArgs),
    /// Critical bond percolation.
    #[command(subcommand)]
    Perc(PercCommand),
    /// Exact self-avoiding walk enumeration.
    #[command(subcommand)]
    Saw(SawCommand),
    /// Loewner evolutions driven by Brownian motion.
    #[command(subcommand)]
    Sle(SleCommand),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed given in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Result JSON (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct CardyArgs {
    /// Cross-ratio argument in [0, 1].
    #[arg(long, conflicts_with_all = ["rect", "table"])]
    x: Option<f64>,
    /// Rectangle of width L and height l: probability of a horizontal crossing.
    #[arg(long, num_args = 2, value_names = ["L", "l"], conflicts_with = "table")]
    rect: Option<Vec<f64>>,
    /// Emit `x,F(x)` on this many equally spaced points of [0, 1].
    #[arg(long)]
    table: Option<usize>,
}

#[derive(Subcommand)]
enum PercCommand {
    /// Crossing probability of a rectangle.
    Cross {
        #[arg(long = "L", default_value_t = 2.0)]
        width: f64,
        #[arg(long = "l", default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean outer-boundary length of the largest cluster in an n × n box.
    Boundary {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One exploration path in a slab.
    Explore {
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Path vertices as `x,y` rows.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Square,
    Triangular,
}

impl From<LatticeArg> for Lattice {
    fn from(l: LatticeArg) -> Self {
        match l {
            LatticeArg::Square => Lattice::Square,
            LatticeArg::Triangular => Lattice::Triangular,
        }
    }
}

#[derive(Subcommand)]
enum SawCommand {
    /// Walk counts `n, a_n, a_n^(1/n)` for every length up to n.
    Count {
        #[arg(long, default_value_t = 14)]
        n: usize,
        #[arg(long, value_enum, default_value_t = LatticeArg::Square)]
        lattice: LatticeArg,
    },
    /// Histogram of the squared diameter of n-step walks.
    Diam {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, value_enum, default_value_t = LatticeArg::Square)]
        lattice: LatticeArg,
    },
}

#[derive(Args)]
struct SleArgs {
    #[arg(long, default_value_t = 6.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Start time of radial evolutions.
    #[arg(long, default_value_t = DEFAULT_T_MIN, allow_hyphen_values = true)]
    tmin: f64,
    /// Collision distance in units of √dt.
    #[arg(long, default_value_t = DEFAULT_COLLIDE_SCALE)]
    collide_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum SleCommand {
    /// Sampled driving function as `t,value` rows.
    Driving {
        #[command(flatten)]
        sle: SleArgs,
        #[arg(long)]
        radial: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chordal hull at the horizon, rasterized to a mask file.
    Hull {
        #[command(flatten)]
        sle: SleArgs,
        /// Cell size of the raster.
        #[arg(long, default_value_t = 1.0 / 128.0)]
        spacing: f64,
        /// Half-width of the window [−w, w] × [0, w].
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Radial hull stopped when it reaches the unit circle.
    Cci {
        #[command(flatten)]
        sle: SleArgs,
        #[arg(long, default_value_t = 1.0 / 128.0)]
        spacing: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = cli.threads;
    if threads == 0 {
        dispatch(cli.command)
    } else {
        par::with_threads(threads, move || dispatch(cli.command))
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(a) => run(a),
        Command::Cardy(a) => cardy(a),
        Command::Perc(c) => perc(c),
        Command::Saw(c) => saw(c),
        Command::Sle(c) => sle(c),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(result: &ExperimentResult, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    write_json(result, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let result = run_experiment(&a.config, a.seed).with_context(|| format!("running {}", a.config.display()))?;
    log::info!("{} finished in {:.2} s", result.experiment_id, result.runtime_seconds);
    emit(&result, a.out.as_deref())?;
    if let Some(p) = &a.csv {
        let mut w = output(Some(p))?;
        write_csv(&result, &mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.svg {
        let mut w = output(Some(p))?;
        write_svg(&result, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn cardy(a: CardyArgs) -> Result<()> {
    if let Some(x) = a.x {
        println!("{:.12}", cardy_f(x)?);
    } else if let Some(r) = a.rect {
        println!("{:.12}", rectangle_crossing_prediction(r[0], r[1])?);
    } else if let Some(n) = a.table {
        if n < 2 {
            bail!("--table needs at least 2 points");
        }
        let mut w = output(None)?;
        writeln!(w, "x,F(x)")?;
        for k in 0..n {
            let x = k as f64 / (n - 1) as f64;
            writeln!(w, "{x:.12},{:.12}", cardy_f(x)?)?;
        }
        w.flush()?;
    } else {
        bail!("give one of --x, --rect or --table");
    }
    Ok(())
}

fn perc(c: PercCommand) -> Result<()> {
    match c {
        PercCommand::Cross {
            width,
            height,
            n,
            p,
            trials,
            seed,
            out,
        } => {
            let r = cardy_crossing_experiment(width, height, n, p, trials, RngStream::from_seed(seed))?;
            emit(&r, out.as_deref())
        }
        PercCommand::Boundary { n, trials, seed, out } => {
            let r = cluster_perimeter_scaling(&[n], trials, RngStream::from_seed(seed))?;
            emit(&r, out.as_deref())
        }
        PercCommand::Explore {
            width,
            height,
            p,
            seed,
            csv,
            out,
        } => {
            let (r, path) = single_exploration(width, height, p, RngStream::from_seed(seed))?;
            if let Some(csv) = csv {
                let mut w = output(Some(&csv))?;
                writeln!(w, "x,y")?;
                for z in path.points() {
                    writeln!(w, "{},{}", z.re, z.im)?;
                }
                w.flush()?;
            }
            emit(&r, out.as_deref())
        }
    }
}

fn saw(c: SawCommand) -> Result<()> {
    let mut w = output(None)?;
    match c {
        SawCommand::Count { n, lattice } => {
            let table = enumerate_saws(n, lattice.into())?;
            writeln!(w, "n,a_n,a_n^(1/n)")?;
            for k in 1..=n {
                let a = table.get(k)?;
                writeln!(w, "{k},{a},{:.12}", table.count_f64(k)?.powf(1.0 / k as f64))?;
            }
        }
        SawCommand::Diam { n, lattice } => {
            let d = diameter_distribution(n, lattice.into())?;
            let scale = d.lattice.scale() as f64;
            writeln!(w, "diameter_squared,count")?;
            for (&d2, &count) in &d.histogram {
                writeln!(w, "{},{count}", d2 as f64 / scale)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn sle(c: SleCommand) -> Result<()> {
    match c {
        SleCommand::Driving { sle, radial, out } => {
            let kind = if radial { DriverKind::RadialAngle } else { DriverKind::ChordalReal };
            let mut driving = sle_driving(sle.kappa, sle.dt, sle.horizon, kind, RngStream::from_seed(sle.seed))?;
            if radial {
                driving = driving.shifted(sle.tmin);
            }
            let mut w = output(out.as_deref())?;
            driving.write_csv(&mut w)?;
            w.flush()?;
        }
        SleCommand::Hull {
            sle,
            spacing,
            window,
            out,
        } => {
            let driving = sle_driving(sle.kappa, sle.dt, sle.horizon, DriverKind::ChordalReal, RngStream::from_seed(sle.seed))?;
            let grid = GridSpec::covering(ComplexPoint::new(-window, 0.0), ComplexPoint::new(window, window), spacing)?;
            let mask = chordal_hull_extract(&driving, grid, sle.horizon, sle.collide_scale * sle.dt.sqrt());
            let mut w = output(Some(&out))?;
            write_mask(&mask, &mut w)?;
            w.flush()?;
            eprintln!("{} cells", mask.count());
        }
        SleCommand::Cci { sle, spacing, out } => {
            let cfg = RadialConfig {
                kappa: sle.kappa,
                dt: sle.dt,
                t_min: sle.tmin,
                collide_scale: sle.collide_scale,
                t_max: sle.horizon.max(RadialConfig::default().t_max),
                ..RadialConfig::default()
            };
            let half = (1.0 / spacing).ceil() as usize;
            let grid = GridSpec::centered(half, spacing)?;
            let hull = radial_cci_hull(&cfg, RngStream::from_seed(sle.seed), Some(grid))?;
            let mask = hull.hull.expect("grid was requested");
            let mut w = output(Some(&out))?;
            write_mask(&mask, &mut w)?;
            w.flush()?;
            println!(
                "endpoint {:.12} {:.12} touch-time {:.12}",
                hull.endpoint.re, hull.endpoint.im, hull.touch_time
            );
        }
    }
    Ok(())
}

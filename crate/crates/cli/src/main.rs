//! Command-line front end: loads configurations, dispatches computations,
//! writes CSV/JSON artifacts.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on
//! numeric-accuracy errors.

use clap::{Parser, Subcommand};
use hyperring_core::config::{config_hash, ConfigFile};
use hyperring_core::error::Error;
use hyperring_core::experiments::{
    equalize_powers, jsa_map, rate_report, respec_grid, sweep_duration, sweep_eta, sweep_power,
    sweep_rate, system_purities, SweepResult,
};
use hyperring_core::model::{default_system, GridSpec, SystemConfig};
use hyperring_core::oracle::run_verification;
use hyperring_core::state::bell_phase_report;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "hyperring",
    version,
    about = "Simulator for a four-ring integrated source of polarization/frequency-bin \
             hyperentangled photon pairs"
)]
struct Cli {
    /// TOML configuration file; the built-in reference system when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the number of grid points (odd).
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,

    /// Override the grid half width, ordinary frequency in GHz.
    #[arg(long = "grid-halfwidth-ghz", global = true)]
    grid_halfwidth_ghz: Option<f64>,

    /// Override the pump phase theta1 \[rad\].
    #[arg(long, global = true)]
    theta1: Option<f64>,

    /// Override the pump phase theta2 \[rad\].
    #[arg(long, global = true)]
    theta2: Option<f64>,

    /// Override the pump phase theta3 \[rad\].
    #[arg(long, global = true)]
    theta3: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reference configuration as TOML on stdout.
    Defaults,
    /// Export one ring's joint spectral amplitude as CSV plus metadata.
    Jsa {
        /// Ring id 1..4.
        #[arg(long, default_value_t = 1)]
        ring: u8,
        /// Override the frequency mismatch, ordinary frequency in GHz.
        #[arg(long = "mismatch-override-ghz")]
        mismatch_override_ghz: Option<f64>,
        /// Override the pump pulse duration in ns.
        #[arg(long = "duration-ns")]
        duration_ns: Option<f64>,
    },
    /// Compute the reduced density operator, purities, and fidelity.
    State,
    /// Purities against the coupling efficiency of selected rings.
    PuritySweepEta {
        /// Comma-separated ring ids to vary, e.g. "3,4".
        #[arg(long, default_value = "3,4")]
        vary: String,
        #[arg(long, default_value_t = 0.3)]
        eta_min: f64,
        #[arg(long, default_value_t = 0.7)]
        eta_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// Purities against the pump pulse duration.
    PuritySweepT {
        /// Shortest duration \[s\].
        #[arg(long, default_value_t = 1e-9)]
        tmin: f64,
        /// Longest duration \[s\].
        #[arg(long, default_value_t = 1e-8)]
        tmax: f64,
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Logarithmic spacing instead of linear.
        #[arg(long)]
        log: bool,
    },
    /// Pair probability of one ring against peak pump power.
    PowerSweep {
        #[arg(long, default_value_t = 1)]
        ring: u8,
        /// Lowest peak power \[W\].
        #[arg(long, default_value_t = 1e-4)]
        pmin: f64,
        /// Highest peak power \[W\].
        #[arg(long, default_value_t = 4e-3)]
        pmax: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Pair-generation rate of one ring against pulse duration.
    RateSweep {
        #[arg(long, default_value_t = 1)]
        ring: u8,
        #[arg(long, default_value_t = 1e-9)]
        tmin: f64,
        #[arg(long, default_value_t = 1e-7)]
        tmax: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long)]
        log: bool,
    },
    /// Adjust pump powers for equal per-ring pair probabilities.
    Equalize {
        /// Total pair probability per pulse to target.
        #[arg(long = "target-total-prob", default_value_t = 1.2e-3)]
        target_total_prob: f64,
        /// Largest admissible peak power \[W\].
        #[arg(long = "max-power", default_value_t = 0.1)]
        max_power: f64,
    },
    /// Run the brute-force validation suite and print its JSON report.
    Verify {
        #[arg(long = "coarse-n", default_value_t = 21)]
        coarse_n: usize,
        #[arg(long, default_value_t = 20260808)]
        seed: u64,
        /// Number of randomized configurations to cross-check.
        #[arg(long = "random-configs", default_value_t = 3)]
        random_configs: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    });
}

fn load_system(cli: &Cli) -> Result<SystemConfig, Error> {
    let mut system = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            ConfigFile::from_toml(&text)?.to_system()?
        }
        None => default_system(),
    };
    let half_width = match cli.grid_halfwidth_ghz {
        Some(ghz) => TAU * ghz * 1e9,
        None => system.grid.half_width,
    };
    let n_points = cli.grid_n.unwrap_or(system.grid.n_points);
    system.grid = GridSpec::new(half_width, n_points)?;
    if let Some(t) = cli.theta1 {
        system.theta1 = t;
    }
    if let Some(t) = cli.theta2 {
        system.theta2 = t;
    }
    if let Some(t) = cli.theta3 {
        system.theta3 = t;
    }
    system.validate()?;
    Ok(system)
}

fn write_sweep(
    out_dir: &Path,
    stem: &str,
    command: &str,
    sweep: &SweepResult,
    system: &SystemConfig,
) -> Result<(), Error> {
    fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    sweep.write_csv(&mut buf)?;
    fs::write(&csv_path, &buf)?;
    let meta = sweep.metadata(command, system)?;
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Internal(format!("metadata serialization: {e}")))?;
    fs::write(out_dir.join(format!("{stem}.meta.json")), json)?;
    println!("wrote {} ({} rows)", csv_path.display(), sweep.rows.len());
    Ok(())
}

fn linspace(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>, Error> {
    if points < 1 || hi < lo {
        return Err(Error::InvalidParam(
            "need points >= 1 and max >= min".into(),
        ));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..points)
        .map(|k| {
            let f = k as f64 / (points - 1) as f64;
            if log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect())
}

fn parse_ring_ids(s: &str) -> Result<Vec<u8>, Error> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u8>()
                .map_err(|_| Error::Config(format!("bad ring id {tok:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    let system = load_system(&cli)?;
    let hash = config_hash(&system)?;
    match &cli.command {
        Command::Defaults => {
            print!("{}", ConfigFile::from_system(&default_system()).to_toml()?);
        }
        Command::Jsa {
            ring,
            mismatch_override_ghz,
            duration_ns,
        } => {
            if !(1..=4).contains(ring) {
                return Err(Error::Config(format!("ring {ring} not in 1..4")));
            }
            let idx = (*ring - 1) as usize;
            let mut pump = system.pumps[idx];
            if let Some(ns) = duration_ns {
                pump.duration = ns * 1e-9;
            }
            let grid = respec_grid(&system, pump.duration)?;
            let over = mismatch_override_ghz.map(|g| TAU * g * 1e9);
            let jsa = jsa_map(&system.rings[idx], &pump, over, &grid)?;
            fs::create_dir_all(&cli.out)?;
            let csv_path = cli.out.join(format!("jsa_ring{ring}.csv"));
            let mut buf = Vec::new();
            jsa.write_csv(&mut buf)?;
            fs::write(&csv_path, &buf)?;
            let meta = serde_json::to_string_pretty(&jsa.metadata(&hash))
                .map_err(|e| Error::Internal(format!("metadata serialization: {e}")))?;
            fs::write(cli.out.join(format!("jsa_ring{ring}.meta.json")), meta)?;
            println!(
                "wrote {} (|beta|^2 = {:.6e}, grid {} x {})",
                csv_path.display(),
                jsa.beta_squared,
                grid.n_points,
                grid.n_points
            );
        }
        Command::State => {
            let b = system_purities(&system)?;
            let report = b.rho.report(system.theta1, system.theta2, &hash);
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("density.json");
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Internal(format!("report serialization: {e}")))?;
            fs::write(&path, json)?;
            let (pol, bin) = bell_phase_report(system.theta1, system.theta2);
            println!("wrote {}", path.display());
            println!(
                "gamma_pol = {:.6}, gamma_bin = {:.6}, hyper_fidelity = {:.6}",
                report.purity_pol, report.purity_bin, report.hyper_fidelity
            );
            println!("target Bell states: polarization {pol}, frequency-bin {bin}");
        }
        Command::PuritySweepEta {
            vary,
            eta_min,
            eta_max,
            points,
        } => {
            let ids = parse_ring_ids(vary)?;
            let etas = linspace(*eta_min, *eta_max, *points, false)?;
            let sweep = sweep_eta(&system, &ids, &etas)?;
            write_sweep(
                &cli.out,
                "purity_vs_eta",
                "purity-sweep-eta",
                &sweep,
                &system,
            )?;
        }
        Command::PuritySweepT {
            tmin,
            tmax,
            points,
            log,
        } => {
            let ts = linspace(*tmin, *tmax, *points, *log)?;
            let sweep = sweep_duration(&system, &ts)?;
            write_sweep(
                &cli.out,
                "purity_vs_duration",
                "purity-sweep-t",
                &sweep,
                &system,
            )?;
        }
        Command::PowerSweep {
            ring,
            pmin,
            pmax,
            points,
        } => {
            if !(1..=4).contains(ring) {
                return Err(Error::Config(format!("ring {ring} not in 1..4")));
            }
            let idx = (*ring - 1) as usize;
            let powers = linspace(*pmin, *pmax, *points, false)?;
            let sweep = sweep_power(&system.rings[idx], &system.pumps[idx], &powers, &system)?;
            write_sweep(
                &cli.out,
                &format!("power_sweep_ring{ring}"),
                "power-sweep",
                &sweep,
                &system,
            )?;
        }
        Command::RateSweep {
            ring,
            tmin,
            tmax,
            points,
            log,
        } => {
            if !(1..=4).contains(ring) {
                return Err(Error::Config(format!("ring {ring} not in 1..4")));
            }
            let idx = (*ring - 1) as usize;
            let ts = linspace(*tmin, *tmax, *points, *log)?;
            let sweep = sweep_rate(&system.rings[idx], &system.pumps[idx], &ts)?;
            write_sweep(
                &cli.out,
                &format!("rate_sweep_ring{ring}"),
                "rate-sweep",
                &sweep,
                &system,
            )?;
        }
        Command::Equalize {
            target_total_prob,
            max_power,
        } => {
            let eq = equalize_powers(&system, *target_total_prob, *max_power)?;
            let rates = rate_report(&eq)?;
            fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("equalized.toml");
            fs::write(&path, ConfigFile::from_system(&eq).to_toml()?)?;
            let meta = serde_json::json!({
                "input_config_hash": hash,
                "equalized_config_hash": config_hash(&eq)?,
                "target_total_prob": target_total_prob,
                "version": env!("CARGO_PKG_VERSION"),
            });
            fs::write(
                cli.out.join("equalized.meta.json"),
                serde_json::to_string_pretty(&meta)
                    .map_err(|e| Error::Internal(format!("metadata serialization: {e}")))?,
            )?;
            println!("wrote {}", path.display());
            for n in 0..4 {
                println!(
                    "ring {}: P = {:.6e} W, |beta|^2 = {:.6e}, rate = {:.6e} Hz",
                    n + 1,
                    eq.pumps[n].peak_power,
                    rates.per_ring_prob[n],
                    rates.per_ring_rate[n]
                );
            }
            println!("total rate = {:.6e} Hz", rates.total_rate);
            if rates.warn_multipair {
                eprintln!("warning: total pair probability leaves the single-pair regime");
            }
        }
        Command::Verify {
            coarse_n,
            seed,
            random_configs,
        } => {
            let report = run_verification(&system, *coarse_n, *seed, *random_configs)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Internal(format!("report serialization: {e}")))?;
            println!("{json}");
            if !report.passed {
                return Err(Error::Internal("verification suite failed".into()));
            }
        }
    }
    Ok(())
}

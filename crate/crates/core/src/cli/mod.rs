//! Command-line front end: scenario files, CSV and SVG output, and the
//! verification suite.
//!
//! Exit codes: 0 on success, 1 when a run or verification fails, 2 on
//! usage or configuration errors.

pub mod config;
pub mod csv;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::model::ShipState;
use crate::sim::{presets, simulate, Detail, Mode, ReferenceSpec, Scenario, ScenarioKind, TimeSeries, DEFAULT_STEP};
use crate::tracking::PeSettings;

pub use config::{parse_config, parse_config_for, to_config_string};
pub use csv::{csv_header, write_csv, write_csv_to};
pub use svg::{emit_svg, render_svg, Axes, Series};
pub use verify::{run_suite, CheckResult};

/// Shortest decimal that parses back to the same `f64`; exponent form
/// for very small or very large magnitudes.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Parser)]
#[command(name = "shipctl", version, about = "Simulate and verify ship stabilization and tracking controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Park the ship at the origin with the time-varying stabilizing law
    Stabilize(RunArgs),
    /// Follow a reference ship with the tracking law
    Track(RunArgs),
    /// Integrate the reference ship alone
    Reference(RunArgs),
    /// Run the property suite and report one line per check
    Verify,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (`key = value` lines); bundled defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the time series as CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a plot as SVG
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Override the horizon, seconds
    #[arg(long, value_parser = positive)]
    duration: Option<f64>,
    /// Override the integration step, seconds
    #[arg(long, value_parser = positive)]
    step: Option<f64>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn default_scenario(mode: Mode) -> Scenario {
    match mode {
        Mode::Stabilize => presets::stabilize_offset(),
        Mode::Track => presets::track_straight_line(),
        Mode::Reference => Scenario {
            kind: ScenarioKind::Reference {
                reference: ReferenceSpec {
                    init: ShipState::new(0.0, 0.0, std::f64::consts::FRAC_PI_8, 4.0, 0.0, 0.0),
                    tau1d: 0.0,
                    tau2d: 0.0,
                },
                pe: PeSettings::default(),
            },
            params: Default::default(),
            step: DEFAULT_STEP,
            duration: mode.default_duration(),
        },
    }
}

fn load_scenario(mode: Mode, args: &RunArgs) -> Result<Scenario, String> {
    let mut sc = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config_for(&text, Some(mode)).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => default_scenario(mode),
    };
    if let Some(d) = args.duration {
        sc.duration = d;
    }
    if let Some(h) = args.step {
        sc.step = h;
    }
    sc.validate().map_err(|e| e.to_string())?;
    Ok(sc)
}

fn plot(ts: &TimeSeries, path: &Path) -> Result<(), String> {
    let (series, axes) = match ts.mode() {
        Mode::Stabilize => {
            let names = ["x", "y", "psi", "u", "v", "r"];
            let series = names
                .iter()
                .enumerate()
                .map(|(k, name)| Series::new(*name, ts.samples.iter().map(|s| (s.t, s.state.to_array()[k])).collect()))
                .collect();
            let axes = Axes {
                title: "Stabilization".into(),
                x_label: "t [s]".into(),
                y_label: "state".into(),
                equal_scale: false,
            };
            (series, axes)
        }
        Mode::Track => {
            let actual = ts.samples.iter().map(|s| (s.state.y, s.state.x)).collect();
            let reference = ts.reference_states().iter().map(|s| (s.y, s.x)).collect();
            let axes = Axes {
                title: "Tracking".into(),
                x_label: "y [m]".into(),
                y_label: "x [m]".into(),
                equal_scale: true,
            };
            (vec![Series::new("reference", reference), Series::new("ship", actual)], axes)
        }
        Mode::Reference => {
            let path = ts.samples.iter().map(|s| (s.state.y, s.state.x)).collect();
            let axes = Axes {
                title: "Reference".into(),
                x_label: "y [m]".into(),
                y_label: "x [m]".into(),
                equal_scale: true,
            };
            (vec![Series::new("reference", path)], axes)
        }
    };
    emit_svg(&series, path, &axes).map_err(|e| format!("{}: {e}", path.display()))
}

fn summary(ts: &TimeSeries) -> String {
    let Some(last) = ts.last() else {
        return String::new();
    };
    let s = &last.state;
    let mut out = format!(
        "{} mode: {} samples, t = {} s, final state x={:.6} y={:.6} psi={:.6} u={:.6} v={:.6} r={:.6}",
        ts.mode().name(),
        ts.samples.len(),
        last.t,
        s.x,
        s.y,
        s.psi,
        s.u,
        s.v,
        s.r
    );
    if let Detail::Track(r) = &last.detail {
        out.push_str(&format!(", error norm {:.3e}", r.err_norm));
    }
    out
}

fn simulate_command(mode: Mode, args: &RunArgs) -> i32 {
    let sc = match load_scenario(mode, args) {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let ts = match simulate(&sc) {
        Ok(ts) => ts,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if mode != Mode::Stabilize {
        match &ts.pe {
            Some(pe) if pe.satisfied => {}
            Some(pe) => eprintln!(
                "warning: reference is not persistently exciting (tail infimum of |u_d| + |r_d| = {:.3e}, bounded = {})",
                pe.tail_infimum, pe.bounded
            ),
            None => eprintln!("warning: run is shorter than the excitation window; excitation not checked"),
        }
    }
    if let Some(path) = &args.out {
        if let Err(e) = write_csv(&ts, path) {
            eprintln!("error: {}: {e}", path.display());
            return 1;
        }
    }
    if let Some(path) = &args.svg {
        if let Err(e) = plot(&ts, path) {
            eprintln!("error: {e}");
            return 1;
        }
    }
    println!("{}", summary(&ts));
    0
}

fn verify_command() -> i32 {
    let results = run_suite();
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {} failed", results.len(), failed);
    i32::from(failed > 0)
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match &cli.command {
        Command::Stabilize(args) => simulate_command(Mode::Stabilize, args),
        Command::Track(args) => simulate_command(Mode::Track, args),
        Command::Reference(args) => simulate_command(Mode::Reference, args),
        Command::Verify => verify_command(),
    }
}

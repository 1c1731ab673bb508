use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use pauli_photons::overlaps::{OverlapMethod, ProfileSpec};
use pauli_photons::sweep::{
    dump_state, format_matrix, parse_config, run_oracle_check, run_sweep, DRange, GridSpec, OracleCheckSpec,
    SweepSpec, DEFAULT_ORACLE_TOLERANCE,
};
use pauli_photons::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "pauli-photons", version, about = "Photon entanglement from fermionic pair recombination")]
struct Cli {
    /// key=value file mirroring the subcommand's flags; flags win on conflict
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence and negativity over a grid of widths and momentum mismatches
    Sweep(SweepArgs),
    /// Compare the analytic matrix against the discretized Fock-space oracle
    OracleCheck(OracleArgs),
    /// Print the spin- and photon-basis density matrices as JSON
    DumpState(DumpArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// lorentzian | gaussian | table:path=<file> (optionally with delta=/sigma=)
    #[arg(long)]
    profile: Option<String>,
    /// Comma-separated electron widths, one curve each
    #[arg(long)]
    widths: Option<String>,
    /// Comma-separated hole widths, paired with --widths
    #[arg(long)]
    hole_widths: Option<String>,
    /// start:stop:steps
    #[arg(long)]
    d_range: Option<String>,
    /// CSV destination; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Evaluate overlaps by quadrature even where closed forms exist
    #[arg(long)]
    quadrature: bool,
    /// Also run the Fock-space cross-check per curve
    #[arg(long)]
    oracle_check: bool,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    grid_span: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    hole_width: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    grid_span: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Print both normalized matrices
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    hole_width: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
}

/// Flag values backed by the optional config file.
struct Settings {
    config: BTreeMap<String, String>,
}

impl Settings {
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.config
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::Spec(format!("config `{key}`: {e}"))))
            .transpose()
    }

    fn flag(&self, set: bool, key: &str) -> Result<bool, Error> {
        if set {
            return Ok(true);
        }
        match self.config.get(key).map(String::as_str) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => Err(Error::Spec(format!("config `{key}`: expected true/false, got `{other}`"))),
        }
    }

    fn profile(&self, flag: Option<String>) -> Result<ProfileSpec, Error> {
        let text = self.pick(flag, "profile")?.unwrap_or_else(|| "lorentzian".into());
        text.parse().map_err(|e: Error| Error::Spec(e.to_string()))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|e| Error::Spec(format!("`{p}`: {e}"))))
        .collect()
}

fn grid(settings: &Settings, points: Option<usize>, span: Option<f64>) -> Result<GridSpec, Error> {
    let default = GridSpec::default();
    Ok(GridSpec {
        points: settings.pick(points, "grid-points")?.unwrap_or(default.points),
        span: settings.pick(span, "grid-span")?.unwrap_or(default.span),
    })
}

fn sweep(settings: &Settings, args: SweepArgs) -> Result<u8, Error> {
    let profile = settings.profile(args.profile)?;
    let widths = match settings.pick(args.widths, "widths")? {
        Some(w) => parse_list(&w)?,
        None => profile.width.map_or_else(|| vec![2.0, 4.0, 6.0], |w| vec![w]),
    };
    let hole_widths = settings.pick(args.hole_widths, "hole-widths")?.map(|h| parse_list(&h)).transpose()?;
    let d_range = DRange::parse(&settings.pick(args.d_range, "d-range")?.unwrap_or_else(|| "0:10:101".into()))?;
    let oracle_check = settings
        .flag(args.oracle_check, "oracle-check")?
        .then(|| grid(settings, args.grid_points, args.grid_span))
        .transpose()?;
    let spec = SweepSpec {
        profile,
        widths,
        hole_widths,
        d_range,
        method: if settings.flag(args.quadrature, "quadrature")? {
            OverlapMethod::Quadrature
        } else {
            OverlapMethod::Auto
        },
        oracle_check,
        output: settings.pick(args.output, "output")?,
        jobs: settings.pick(args.jobs, "jobs")?.unwrap_or_else(|| rayon::current_num_threads().max(1)),
    };

    let outcome = run_sweep(&spec)?;
    let csv = outcome.to_csv();
    match &spec.output {
        Some(path) => fs::write(path, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    for r in outcome.rows.iter().filter(|r| r.failure.is_some()) {
        eprintln!(
            "numerical failure at width={} d={}: {}",
            r.width_e,
            r.d,
            r.failure.as_deref().unwrap_or_default()
        );
    }
    for report in &outcome.oracle_reports {
        eprintln!("{}", report.summary());
    }
    eprintln!("{} points, {} failed", outcome.rows.len(), outcome.failures());
    Ok(if outcome.failures() > 0 || outcome.oracle_failures() > 0 {
        EXIT_NUMERICAL
    } else {
        0
    })
}

fn oracle_check(settings: &Settings, args: OracleArgs) -> Result<u8, Error> {
    let spec = OracleCheckSpec {
        profile: settings.profile(args.profile)?,
        width: settings.pick(args.width, "width")?,
        hole_width: settings.pick(args.hole_width, "hole-width")?,
        d: settings.pick(args.d, "d")?.unwrap_or(0.0),
        grid: grid(settings, args.grid_points, args.grid_span)?,
        tolerance: settings.pick(args.tolerance, "tolerance")?.unwrap_or(DEFAULT_ORACLE_TOLERANCE),
    };
    let report = run_oracle_check(&spec)?;
    if settings.flag(args.verbose, "verbose")? {
        println!("analytic (normalized):\n{}", format_matrix(&report.analytic));
        println!("oracle (normalized):\n{}", format_matrix(&report.oracle));
    }
    println!("{}", report.summary());
    Ok(if report.pass { 0 } else { EXIT_NUMERICAL })
}

fn dump(settings: &Settings, args: DumpArgs) -> Result<u8, Error> {
    let profile = settings.profile(args.profile)?;
    let width = settings.pick(args.width, "width")?;
    let hole_width = settings.pick(args.hole_width, "hole-width")?;
    let d = settings.pick(args.d, "d")?.unwrap_or(0.0);
    let state = dump_state(&profile, width, hole_width, d)?;
    let json = serde_json::to_string_pretty(&state).map_err(|e| Error::Spec(e.to_string()))?;
    println!("{json}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let config = match &cli.config {
        Some(path) => parse_config(&fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let settings = Settings { config };
    match cli.command {
        Command::Sweep(args) => sweep(&settings, args),
        Command::OracleCheck(args) => oracle_check(&settings, args),
        Command::DumpState(args) => dump(&settings, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE })
        }
    }
}

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{Experiment, LoadedConfig, Regime};
use output::{read_reference, rms_against, sha256_hex, Table};
use qbeats::pipeline::{simulate, tr_mfe, InitialState};
use qbeats::postprocess::{argmax_after, local_maxima, local_minima};
use qbeats::validation::{run_suite, SEED, SUITES};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qbeats", version, about = "Radical-pair quantum beats and TR-MFE curves")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singlet probability S(t) for one field regime.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Override the configured field regime (zero or high).
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// High/zero-field fluorescence ratio R(t) with its components.
    Trmfe {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Run a built-in check suite, or all of them.
    Validate {
        /// Suite name or "all".
        suite: String,
    },
    /// Print a configuration in canonical form.
    ShowConfig {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration: octalin or dmb.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Two-column CSV (time_ns, value) to report an RMS deviation against.
    #[arg(long)]
    reference: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<qbeats::Error> for Failure {
    fn from(e: qbeats::Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Simulate { source, field, io } => cmd_simulate(&source, field.as_deref(), &io),
        Command::Trmfe { source, io } => cmd_trmfe(&source, &io),
        Command::Validate { suite } => cmd_validate(&suite),
        Command::ShowConfig { source } => load(&source).map(|c| print!("{}", c.to_toml())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load(source: &Source) -> Result<LoadedConfig, Failure> {
    Ok(match (&source.config, &source.preset) {
        (Some(path), _) => LoadedConfig::from_file(path)?,
        (None, Some(name)) => LoadedConfig::preset(name)?,
        (None, None) => unreachable!("clap requires one source"),
    })
}

fn common_metadata(table: &mut Table, command: &str, loaded: &LoadedConfig, exp: &Experiment) {
    let req = exp.selected();
    table
        .meta("generator", format!("qbeats {}", env!("CARGO_PKG_VERSION")))
        .meta("command", command)
        .meta("config", &exp.name)
        .meta("config_sha256", sha256_hex(&loaded.to_toml()))
        .meta("initial", initial_label(req.initial))
        .meta("noise", req.noise.name())
        .meta("units", "time_ns in ns; probabilities and ratios dimensionless");
}

fn initial_label(initial: InitialState) -> String {
    match initial {
        InitialState::Mixed => "mixed".into(),
        InitialState::Pure { spin, m } => format!("I={spin},m={m}"),
    }
}

fn reference_rms(io: &OutputArgs, times: &[f64], values: &[f64], table: &mut Table) -> Result<(), Failure> {
    let Some(path) = &io.reference else { return Ok(()) };
    let (rt, rv) = read_reference(path).map_err(Failure::Config)?;
    match rms_against(times, values, &rt, &rv) {
        Some((rms, n)) => {
            table.meta("reference", path.display().to_string()).meta("reference_rms", format!("{rms:e} over {n} points"));
            eprintln!("rms deviation from {}: {rms:.6} over {n} points", path.display());
        }
        None => eprintln!("warning: {} does not overlap the time grid", path.display()),
    }
    Ok(())
}

fn write(table: &Table, out: Option<&Path>) -> Result<(), Failure> {
    table.write_to(out).map_err(|e| Failure::Config(format!("writing output: {e}")))
}

fn extrema_summary(times: &[f64], values: &[f64]) -> String {
    const SHOWN: usize = 8;
    let at = |idx: Vec<usize>| {
        let mut s = idx.iter().take(SHOWN).map(|&i| format!("{:.1}", times[i])).collect::<Vec<_>>().join(" ");
        if idx.len() > SHOWN {
            s.push_str(&format!(" ... {} more", idx.len() - SHOWN));
        }
        s
    };
    format!("minima at [{}] ns, maxima at [{}] ns", at(local_minima(values)), at(local_maxima(values)))
}

fn cmd_simulate(source: &Source, field: Option<&str>, io: &OutputArgs) -> Result<(), Failure> {
    let loaded = load(source)?;
    let mut exp = loaded.experiment()?;
    if let Some(f) = field {
        exp.regime = Regime::parse(f).ok_or_else(|| Failure::Config(format!("--field {f:?} is not zero or high")))?;
    }
    let req = exp.selected();
    let result = simulate(req)?;
    let s = &result.total;

    let mut table = Table::new(s.times().to_vec());
    common_metadata(&mut table, "simulate", &loaded, &exp);
    table.meta("field", format!("{} ({} T)", exp.regime.name(), req.spec.field_t));
    table.column("singlet", s.values().to_vec());
    if exp.sectors {
        for sector in &result.sectors {
            table.column(sector.label(), sector.values().to_vec());
        }
    }
    reference_rms(io, s.times(), s.values(), &mut table)?;
    write(&table, io.out.as_deref())?;

    let v = s.values();
    eprintln!(
        "{} points, S(start) = {:.6}, S(end) = {:.6}; {}",
        v.len(),
        v[0],
        v[v.len() - 1],
        extrema_summary(s.times(), v)
    );
    Ok(())
}

fn cmd_trmfe(source: &Source, io: &OutputArgs) -> Result<(), Failure> {
    let loaded = load(source)?;
    let exp = loaded.experiment()?;
    let params = exp
        .fluorescence
        .ok_or_else(|| Failure::Config(format!("{}: trmfe needs a [fluorescence] section", loaded.origin)))?;
    let (observed, s_high, s_zero) = tr_mfe(&exp.high, &exp.zero, &params)?;

    let mut table = Table::new(s_high.times().to_vec());
    common_metadata(&mut table, "trmfe", &loaded, &exp);
    table
        .meta("fields", format!("high {} T over zero", exp.high.spec.field_t))
        .meta(
            "fluorescence",
            format!("theta={} tau_f={} t0={} t_g={}", params.theta, params.tau_f, params.t0, params.t_g),
        )
        .meta("edge_until_ns", format!("{}", observed.edge_until));
    table
        .sparse_column("ratio", observed.ratio.times(), observed.ratio.values())
        .column("intensity_high", observed.high_field.values().to_vec())
        .column("intensity_zero", observed.zero_field.values().to_vec())
        .column("singlet_high", s_high.values().to_vec())
        .column("singlet_zero", s_zero.values().to_vec());
    reference_rms(io, observed.ratio.times(), observed.ratio.values(), &mut table)?;
    write(&table, io.out.as_deref())?;

    let r = &observed.ratio;
    if let Some(k) = argmax_after(r, observed.edge_until) {
        eprintln!("global ratio maximum {:.6} at {:.2} ns", r.values()[k], r.times()[k]);
    }
    eprintln!("{}", extrema_summary(r.times(), r.values()));
    if observed.dropped > 0 {
        eprintln!("{} points without a ratio (zero-field intensity vanishes)", observed.dropped);
    }
    Ok(())
}

fn cmd_validate(suite: &str) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(Failure::Config(format!("unknown suite {bad:?}; available: all, {}", SUITES.join(", "))));
    }
    println!("# seed: {SEED}");
    let mut failed = Vec::new();
    for name in names {
        let report = run_suite(name)?;
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let note = if c.note.is_empty() { String::new() } else { format!("  ({})", c.note) };
            println!("{mark} {name}: {}  value {:.3e}, bound {:.1e}{note}", c.name, c.value, c.tolerance);
        }
        println!("{} {name} in {:.1} s", if report.passed() { "PASS" } else { "FAIL" }, report.seconds);
        if !report.passed() {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("failed suites: {}", failed.join(", "))))
    }
}

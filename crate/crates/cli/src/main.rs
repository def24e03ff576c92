mod grid;
mod presets;
mod report;
mod svg;
mod sweep;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tasrate::link_sim::SelectionRule;
use tasrate::quantization::Resolution;

use presets::{Figure, PRESET_TRIALS};
use sweep::{Axis, Output, SweepSpec, SweepTable};

#[derive(Parser)]
#[command(
    name = "tasrate",
    version,
    about = "Ergodic rates of transmit antenna selection with low-resolution ADCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic rate expressions over a grid.
    Bound(BoundArgs),
    /// Monte Carlo ergodic rate over a grid.
    Simulate(SimulateArgs),
    /// Any mix of simulated and analytic series over a grid.
    Sweep(SweepArgs),
    /// Generalized-Gamma fit of a Weibull sum with a KS check.
    Fit(FitArgs),
    /// Lloyd-Max quantizer design and distortion factors.
    Quantizer(QuantizerArgs),
    /// Preset sweeps for the published figures, written as CSV and SVG.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Debug)]
struct Counts(Vec<usize>);
#[derive(Clone, Debug)]
struct Reals(Vec<f64>);
#[derive(Clone, Debug)]
struct Resolutions(Vec<Resolution>);
#[derive(Clone, Debug)]
struct Outputs(Vec<Output>);

fn counts(s: &str) -> Result<Counts, String> {
    grid::parse_counts(s).map(Counts)
}

fn reals(s: &str) -> Result<Reals, String> {
    grid::parse_reals(s).map(Reals)
}

fn resolutions(s: &str) -> Result<Resolutions, String> {
    grid::parse_resolutions(s).map(Resolutions)
}

fn outputs(s: &str) -> Result<Outputs, String> {
    sweep::parse_outputs(s).map(Outputs)
}

#[derive(Args)]
struct GridArgs {
    /// Transmit antennas: `n`, `a,b,c` or `from:to:step`.
    #[arg(long = "nt", default_value = "1", value_parser = counts)]
    n_t: Counts,
    /// Receive antennas.
    #[arg(long = "nr", default_value = "1", value_parser = counts)]
    n_r: Counts,
    /// ADC bits, `inf` for unquantized.
    #[arg(long, default_value = "3", value_parser = resolutions)]
    bits: Resolutions,
    /// Transmit SNR in dB.
    #[arg(long = "snr-db", default_value = "10", value_parser = reals, allow_hyphen_values = true)]
    snr_db: Reals,
    /// Swept parameter; by default the first of snr_db, n_t, n_r, bits with several values.
    #[arg(long)]
    axis: Option<Axis>,
    /// Monte Carlo trials per grid point (`100000` or `1e5`).
    #[arg(long, default_value = "100000", value_parser = grid::parse_trials)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fit residual and quadrature relative tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart destination.
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl GridArgs {
    fn spec(&self, outputs: Vec<Output>) -> SweepSpec {
        let axis = self
            .axis
            .unwrap_or_else(|| SweepSpec::infer_axis(&self.snr_db.0, &self.n_t.0, &self.n_r.0, &self.bits.0));
        SweepSpec {
            axis,
            snr_db: self.snr_db.0.clone(),
            n_t: self.n_t.0.clone(),
            n_r: self.n_r.0.clone(),
            bits: self.bits.0.clone(),
            outputs,
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated subset of lb_thm1, cor1, cor2, ub_thm2, exact_siso.
    #[arg(long, default_value = "lb_thm1", value_parser = outputs)]
    series: Outputs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// exact, norm, quartic or fixed:<i> (1-based).
    #[arg(long, default_value = "exact", value_parser = sweep::parse_rule)]
    rule: SelectionRule,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated series: mc_exact, mc_norm, mc_quartic, mc_fixed<i>,
    /// lb_thm1, cor1, cor2, ub_thm2, exact_siso.
    #[arg(long, default_value = "mc_exact,lb_thm1", value_parser = outputs)]
    series: Outputs,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long = "nr", value_parser = clap::value_parser!(u32).range(1..=4096))]
    n_r: u32,
    /// Monte Carlo sums for the KS distance; 0 skips it.
    #[arg(long, default_value = "1000000", value_parser = parse_samples)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn parse_samples(s: &str) -> Result<u64, String> {
    if s.trim() == "0" {
        return Ok(0);
    }
    grid::parse_trials(s)
}

#[derive(Args)]
struct QuantizerArgs {
    #[arg(long, default_value = "1:5:1", value_parser = resolutions)]
    bits: Resolutions,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// Directory receiving `<figure>.csv` and `<figure>.svg`.
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
    /// Trials per grid point.
    #[arg(long, default_value_t = PRESET_TRIALS, value_parser = grid::parse_trials)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// A failure that should exit with the usage status.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_table(
    command: &str,
    spec: &SweepSpec,
    table: &SweepTable,
    out: Option<&Path>,
    svg_path: Option<&Path>,
    title: &str,
) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            sweep::write_csv(&mut w, command, spec, table)
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            sweep::write_csv(stdout.lock(), command, spec, table).context("cannot write to standard output")?;
        }
    }
    if let Some(path) = svg_path {
        let chart = presets::chart(title, spec, table);
        fs::write(path, svg::render(&chart)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// Reports failures grouped by series on stderr; true if there were none.
fn summarize(table: &SweepTable) -> bool {
    if table.failures.is_empty() {
        return true;
    }
    let mut by_series: BTreeMap<&str, Vec<&sweep::Failure>> = BTreeMap::new();
    for f in &table.failures {
        by_series.entry(&f.series).or_default().push(f);
    }
    eprintln!("error: {} series incomplete", by_series.len());
    for (series, failures) in by_series {
        let first = failures[0];
        eprintln!(
            "  {series}: {} point(s) failed, first at {}: {}",
            failures.len(),
            first.value,
            first.message
        );
    }
    false
}

fn run_grid(command: &str, spec: SweepSpec, grid: &GridArgs) -> Result<bool> {
    let table = sweep::run_sweep(&spec).map_err(Usage)?;
    write_table(
        command,
        &spec,
        &table,
        grid.out.as_deref(),
        grid.svg.as_deref(),
        command,
    )?;
    Ok(summarize(&table))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bound(args) => {
            if let Some(o) = args.series.0.iter().find(|o| !o.is_analytic()) {
                return Err(Usage(format!("{o} is not an analytic series; use `simulate` or `sweep`")).into());
            }
            run_grid("bound", args.grid.spec(args.series.0), &args.grid)
        }
        Command::Simulate(args) => run_grid(
            "simulate",
            args.grid.spec(vec![Output::MonteCarlo(args.rule)]),
            &args.grid,
        ),
        Command::Sweep(args) => run_grid("sweep", args.grid.spec(args.series.0), &args.grid),
        Command::Fit(args) => {
            let text = report::fit_report(args.n_r as usize, args.samples, args.seed, args.tol)?;
            print!("{text}");
            Ok(true)
        }
        Command::Quantizer(args) => {
            let bits = args
                .bits
                .0
                .iter()
                .map(|r| match r {
                    Resolution::Bits(b) => Ok(*b),
                    Resolution::Infinite => Err(Usage("the quantizer design needs a finite bit count".into())),
                })
                .collect::<Result<Vec<u32>, Usage>>()?;
            print!("{}", report::quantizer_report(&bits, args.tol)?);
            Ok(true)
        }
        Command::Reproduce(args) => {
            let spec = presets::preset(args.figure, args.trials, args.seed);
            let table = sweep::run_sweep(&spec).map_err(Usage)?;
            fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
            let csv = args.out_dir.join(format!("{}.csv", args.figure.name()));
            let svg_path = args.out_dir.join(format!("{}.svg", args.figure.name()));
            let mut w = create(&csv)?;
            sweep::write_csv(&mut w, &format!("reproduce {}", args.figure.name()), &spec, &table)
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", csv.display()))?;
            let chart = presets::figure_chart(args.figure, &spec, &table);
            fs::write(&svg_path, svg::render(&chart))
                .with_context(|| format!("cannot write {}", svg_path.display()))?;
            eprintln!("wrote {} and {}", csv.display(), svg_path.display());
            Ok(summarize(&table))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

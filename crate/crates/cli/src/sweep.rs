//! Parameter sweeps over one axis, producing one row per axis value and
//! series.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use clap::ValueEnum;
use tasrate::bounds::{siso_exact_rate, siso_upper_bound, tas_lower_bound_with, tas_rate_nr1, tas_rate_nr1_asymptotic};
use tasrate::db_to_linear;
use tasrate::link_sim::{estimate_ergodic_rates, SelectionRule, SystemConfig};
use tasrate::montecarlo::Parallelism;
use tasrate::quantization::{QuantizationModel, Resolution};
use tasrate::specfun::QuadratureSpec;
use tasrate::weibull_sum::{fit_with, FitOptions, WeibullSumFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "snr_db")]
    SnrDb,
    #[value(name = "n_t")]
    NT,
    #[value(name = "n_r")]
    NR,
    #[value(name = "bits")]
    Bits,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::NT => "n_t",
            Axis::NR => "n_r",
            Axis::Bits => "bits",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::SnrDb => "Transmit SNR ρ (dB)",
            Axis::NT => "Number of transmit antennas N_t",
            Axis::NR => "Number of receive antennas N_r",
            Axis::Bits => "ADC resolution b (bits)",
        }
    }
}

/// `exact|norm|quartic|fixed:<i>` with a 1-based antenna index.
pub fn parse_rule(s: &str) -> Result<SelectionRule, String> {
    match s.trim() {
        "exact" => Ok(SelectionRule::ExactRateMax),
        "norm" => Ok(SelectionRule::NormMax),
        "quartic" => Ok(SelectionRule::QuarticMax),
        other => {
            let index = other
                .strip_prefix("fixed:")
                .and_then(|i| i.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| {
                    format!("unknown rule `{other}` (expected exact, norm, quartic or fixed:<i>, i >= 1)")
                })?;
            Ok(SelectionRule::Fixed(index - 1))
        }
    }
}

/// One requested curve family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Output {
    MonteCarlo(SelectionRule),
    LowerBound,
    Corollary1,
    Corollary2,
    UpperBound,
    ExactSiso,
}

impl Output {
    pub fn is_analytic(&self) -> bool {
        !matches!(self, Output::MonteCarlo(_))
    }

    fn needs_single_receive(&self) -> bool {
        matches!(
            self,
            Output::Corollary1 | Output::Corollary2 | Output::UpperBound | Output::ExactSiso
        )
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::MonteCarlo(SelectionRule::ExactRateMax) => f.write_str("mc_exact"),
            Output::MonteCarlo(SelectionRule::NormMax) => f.write_str("mc_norm"),
            Output::MonteCarlo(SelectionRule::QuarticMax) => f.write_str("mc_quartic"),
            Output::MonteCarlo(SelectionRule::Fixed(i)) => write!(f, "mc_fixed{}", i + 1),
            Output::LowerBound => f.write_str("lb_thm1"),
            Output::Corollary1 => f.write_str("cor1"),
            Output::Corollary2 => f.write_str("cor2"),
            Output::UpperBound => f.write_str("ub_thm2"),
            Output::ExactSiso => f.write_str("exact_siso"),
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim() {
            "mc_exact" => Output::MonteCarlo(SelectionRule::ExactRateMax),
            "mc_norm" => Output::MonteCarlo(SelectionRule::NormMax),
            "mc_quartic" => Output::MonteCarlo(SelectionRule::QuarticMax),
            "lb_thm1" => Output::LowerBound,
            "cor1" => Output::Corollary1,
            "cor2" => Output::Corollary2,
            "ub_thm2" => Output::UpperBound,
            "exact_siso" => Output::ExactSiso,
            other => match other.strip_prefix("mc_fixed").and_then(|i| i.parse::<usize>().ok()) {
                Some(i) if i >= 1 => Output::MonteCarlo(SelectionRule::Fixed(i - 1)),
                _ => {
                    return Err(format!(
                        "unknown series `{other}` (expected mc_exact, mc_norm, mc_quartic, mc_fixed<i>, lb_thm1, cor1, cor2, ub_thm2, exact_siso)"
                    ))
                }
            },
        })
    }
}

/// Comma-separated series names; an empty string gives an empty set.
pub fn parse_outputs(s: &str) -> Result<Vec<Output>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect()
}

/// Fully resolved sweep. Every list other than the axis with more than
/// one entry becomes a series dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub snr_db: Vec<f64>,
    pub n_t: Vec<usize>,
    pub n_r: Vec<usize>,
    pub bits: Vec<Resolution>,
    pub outputs: Vec<Output>,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn has_duplicates<T: PartialEq>(values: &[T]) -> bool {
    values.iter().enumerate().any(|(i, v)| values[..i].contains(v))
}

impl SweepSpec {
    /// Picks the first of `snr_db`, `n_t`, `n_r`, `bits` with several values.
    pub fn infer_axis(snr_db: &[f64], n_t: &[usize], n_r: &[usize], bits: &[Resolution]) -> Axis {
        if snr_db.len() > 1 {
            Axis::SnrDb
        } else if n_t.len() > 1 {
            Axis::NT
        } else if n_r.len() > 1 {
            Axis::NR
        } else if bits.len() > 1 {
            Axis::Bits
        } else {
            Axis::SnrDb
        }
    }

    /// Checks the spec before any computation.
    pub fn validate(&self) -> Result<(), String> {
        if self.outputs.is_empty() {
            return Err("no output series requested".into());
        }
        if self.snr_db.is_empty() || self.n_t.is_empty() || self.n_r.is_empty() || self.bits.is_empty() {
            return Err("every swept parameter needs at least one value".into());
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err("SNR values must be finite".into());
        }
        if self.n_t.contains(&0) || self.n_r.contains(&0) {
            return Err("antenna counts must be at least 1".into());
        }
        let duplicated = match self.axis {
            Axis::SnrDb => has_duplicates(&self.snr_db),
            Axis::NT => has_duplicates(&self.n_t),
            Axis::NR => has_duplicates(&self.n_r),
            Axis::Bits => has_duplicates(&self.bits),
        };
        if duplicated {
            return Err(format!("duplicate values on the {} axis", self.axis.name()));
        }
        if has_duplicates(&self.outputs) {
            return Err("duplicate output series".into());
        }
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(format!("tolerance {} must lie in (0, 1e-2)", self.tol));
        }
        let max_n_r = *self.n_r.iter().max().unwrap();
        let min_n_t = *self.n_t.iter().min().unwrap();
        for output in &self.outputs {
            if output.needs_single_receive() && max_n_r != 1 {
                return Err(format!("{output} requires n_r = 1"));
            }
            match output {
                Output::Corollary2 if min_n_t < 2 => return Err("cor2 requires n_t >= 2".into()),
                Output::MonteCarlo(SelectionRule::Fixed(i)) if *i >= min_n_t => {
                    return Err(format!("{output} selects antenna {} but n_t can be {min_n_t}", i + 1))
                }
                Output::MonteCarlo(_) if self.trials == 0 => return Err("at least one trial is required".into()),
                _ => {}
            }
        }
        Ok(())
    }

    /// The resolved configuration as one line.
    pub fn describe(&self) -> String {
        format!(
            "axis={} snr_db={} n_t={} n_r={} bits={} outputs={} trials={} seed={} tol={:e}",
            self.axis.name(),
            join(&self.snr_db),
            join(&self.n_t),
            join(&self.n_r),
            join(&self.bits),
            join(&self.outputs),
            self.trials,
            self.seed,
            self.tol
        )
    }

    fn series_label(&self, output: &Output, point: &Point) -> String {
        let mut label = output.to_string();
        if self.axis != Axis::Bits && self.bits.len() > 1 {
            label += &format!("/b={}", point.bits);
        }
        if self.axis != Axis::NT && self.n_t.len() > 1 {
            label += &format!("/nt={}", point.n_t);
        }
        if self.axis != Axis::NR && self.n_r.len() > 1 {
            label += &format!("/nr={}", point.n_r);
        }
        if self.axis != Axis::SnrDb && self.snr_db.len() > 1 {
            label += &format!("/snr={}", point.snr_db);
        }
        label
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    snr_db: f64,
    n_t: usize,
    n_r: usize,
    bits: Resolution,
}

impl Point {
    fn axis_value(&self, axis: Axis) -> (f64, String) {
        match axis {
            Axis::SnrDb => (self.snr_db, self.snr_db.to_string()),
            Axis::NT => (self.n_t as f64, self.n_t.to_string()),
            Axis::NR => (self.n_r as f64, self.n_r.to_string()),
            Axis::Bits => match self.bits {
                Resolution::Bits(b) => (b as f64, b.to_string()),
                Resolution::Infinite => (f64::INFINITY, "inf".into()),
            },
        }
    }
}

/// `(std_err, trials, seed)` of a simulated point.
pub type McStats = (f64, u64, u64);

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis_key: f64,
    pub value: String,
    pub series: String,
    pub rate_bits: f64,
    pub monte_carlo: Option<McStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub series: String,
    pub value: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<Row>,
    pub failures: Vec<Failure>,
}

impl SweepTable {
    fn push(
        &mut self,
        spec: &SweepSpec,
        output: &Output,
        point: &Point,
        result: tasrate::Result<(f64, Option<McStats>)>,
    ) {
        let series = spec.series_label(output, point);
        let (axis_key, value) = point.axis_value(spec.axis);
        match result {
            Ok((rate_bits, monte_carlo)) => self.rows.push(Row {
                axis_key,
                value,
                series,
                rate_bits,
                monte_carlo,
            }),
            Err(e) => self.failures.push(Failure {
                series,
                value,
                message: e.to_string(),
            }),
        }
    }
}

/// Evaluates every requested series at every grid point. Rows come back
/// sorted by axis value, then series name.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, String> {
    spec.validate()?;
    let quadrature = QuadratureSpec {
        relative_tolerance: spec.tol,
        ..QuadratureSpec::default()
    };
    let fit_options = FitOptions {
        tolerance: spec.tol,
        search: None,
    };
    let mut fits: BTreeMap<usize, tasrate::Result<WeibullSumFit>> = BTreeMap::new();
    if spec.outputs.contains(&Output::LowerBound) {
        for &n_r in &spec.n_r {
            fits.entry(n_r).or_insert_with(|| fit_with(n_r, fit_options));
        }
    }
    let models: Vec<QuantizationModel> = spec
        .bits
        .iter()
        .map(|&b| QuantizationModel::new(b).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;

    let mut table = SweepTable::default();
    for &snr_db in &spec.snr_db {
        let snr = db_to_linear(snr_db);
        for &n_t in &spec.n_t {
            for &n_r in &spec.n_r {
                let points: Vec<Point> = spec.bits.iter().map(|&bits| Point { snr_db, n_t, n_r, bits }).collect();
                for output in &spec.outputs {
                    if let Output::MonteCarlo(rule) = *output {
                        // one run per grid point, shared across resolutions
                        match estimate_ergodic_rates(
                            n_t,
                            n_r,
                            snr,
                            &models,
                            rule,
                            spec.trials,
                            spec.seed,
                            Parallelism::Auto,
                        ) {
                            Ok(estimates) => {
                                for (point, e) in points.iter().zip(estimates) {
                                    table.push(
                                        spec,
                                        output,
                                        point,
                                        Ok((e.mean, Some((e.std_error, e.trials, e.seed)))),
                                    );
                                }
                            }
                            Err(err) => {
                                for point in &points {
                                    table.push(spec, output, point, Err(err.clone()));
                                }
                            }
                        }
                        continue;
                    }
                    for (point, model) in points.iter().zip(&models) {
                        let alpha = model.alpha();
                        let value = match output {
                            Output::LowerBound => match &fits[&n_r] {
                                Ok(fit) => SystemConfig::new(n_t, n_r, snr, *model)
                                    .and_then(|cfg| tas_lower_bound_with(&cfg, fit, quadrature)),
                                Err(e) => Err(e.clone()),
                            },
                            Output::Corollary1 => tas_rate_nr1(n_t as u64, snr, alpha),
                            Output::Corollary2 => tas_rate_nr1_asymptotic(n_t as u64, snr, alpha),
                            Output::UpperBound => siso_upper_bound(snr, alpha),
                            Output::ExactSiso => siso_exact_rate(snr, alpha),
                            Output::MonteCarlo(_) => unreachable!(),
                        };
                        table.push(spec, output, point, value.map(|b| (b.value, None)));
                    }
                }
            }
        }
    }
    table
        .rows
        .sort_by(|a, b| a.axis_key.total_cmp(&b.axis_key).then_with(|| a.series.cmp(&b.series)));
    Ok(table)
}

pub const CSV_HEADER: &str = "axis,value,series,rate_bits,std_err,trials,seed";

/// CSV with a leading `#` line holding the resolved configuration.
pub fn write_csv<W: Write>(mut out: W, command: &str, spec: &SweepSpec, table: &SweepTable) -> std::io::Result<()> {
    writeln!(
        out,
        "# tasrate {} {command} {}",
        env!("CARGO_PKG_VERSION"),
        spec.describe()
    )?;
    writeln!(out, "{CSV_HEADER}")?;
    for row in &table.rows {
        let (std_err, trials, seed) = match row.monte_carlo {
            Some((se, t, s)) => (se.to_string(), t.to_string(), s.to_string()),
            None => Default::default(),
        };
        writeln!(
            out,
            "{},{},{},{},{std_err},{trials},{seed}",
            spec.axis.name(),
            row.value,
            row.series,
            row.rate_bits
        )?;
    }
    Ok(())
}

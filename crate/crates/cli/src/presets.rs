//! Figure-reproduction presets.

use std::collections::BTreeMap;

use clap::ValueEnum;
use tasrate::link_sim::SelectionRule;
use tasrate::quantization::Resolution;

use crate::svg::{Chart, Series};
use crate::sweep::{Axis, Output, SweepSpec, SweepTable};

pub const PRESET_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Figure::Fig2a => "Ergodic rate vs SNR, N_t = 32, N_r = 8",
            Figure::Fig2b => "Ergodic rate vs N_r, N_t = 32, ρ = 10 dB",
            Figure::Fig3a => "Ergodic rate vs SNR, N_r = 1, b = 3",
            Figure::Fig3b => "Ergodic rate vs N_t, N_r = 1, ρ = 5 dB",
        }
    }
}

fn snr_grid() -> Vec<f64> {
    (0..=16).map(|i| -10.0 + 2.5 * i as f64).collect()
}

fn bits(list: &[u32]) -> Vec<Resolution> {
    list.iter().map(|&b| Resolution::Bits(b)).collect()
}

pub fn preset(figure: Figure, trials: u64, seed: u64) -> SweepSpec {
    let mc = Output::MonteCarlo(SelectionRule::ExactRateMax);
    let base = SweepSpec {
        axis: Axis::SnrDb,
        snr_db: snr_grid(),
        n_t: vec![32],
        n_r: vec![8],
        bits: bits(&[3]),
        outputs: vec![mc, Output::LowerBound],
        trials,
        seed,
        tol: 1e-10,
    };
    match figure {
        Figure::Fig2a => SweepSpec {
            bits: [bits(&[1, 2, 3, 4]), vec![Resolution::Infinite]].concat(),
            ..base
        },
        Figure::Fig2b => SweepSpec {
            axis: Axis::NR,
            snr_db: vec![10.0],
            n_r: (1..=16).collect(),
            bits: bits(&[2, 3, 4]),
            ..base
        },
        Figure::Fig3a => SweepSpec {
            n_t: vec![1, 4, 16, 64],
            n_r: vec![1],
            outputs: vec![mc, Output::Corollary1],
            ..base
        },
        Figure::Fig3b => SweepSpec {
            axis: Axis::NT,
            snr_db: vec![5.0],
            n_t: (1..=64).collect(),
            n_r: vec![1],
            bits: bits(&[2, 3, 4]),
            outputs: vec![mc, Output::Corollary1, Output::ExactSiso],
            ..base
        },
    }
}

/// One polyline per series; analytic series are dashed.
pub fn chart(title: &str, spec: &SweepSpec, table: &SweepTable) -> Chart {
    let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        series
            .entry(&row.series)
            .or_default()
            .push((row.axis_key, row.rate_bits));
    }
    Chart {
        title: title.to_string(),
        x_label: spec.axis.label().to_string(),
        y_label: "Ergodic rate (bits/s/Hz)".to_string(),
        series: series
            .into_iter()
            .map(|(name, points)| Series {
                dashed: !name.starts_with("mc_"),
                name: name.to_string(),
                points,
            })
            .collect(),
    }
}

pub fn figure_chart(figure: Figure, spec: &SweepSpec, table: &SweepTable) -> Chart {
    chart(figure.title(), spec, table)
}

use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Key order of the run summary.
pub const SUMMARY_KEYS: [&str; 13] = [
    "n",
    "m",
    "p",
    "tau",
    "tree_strategy",
    "mode",
    "seed",
    "iterations",
    "final_energy",
    "final_gap",
    "termination",
    "wall_time_ms",
    "residual_inf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub tau: f64,
    pub tree_strategy: String,
    pub mode: String,
    pub seed: u64,
    pub iterations: u64,
    pub final_energy: f64,
    pub final_gap: f64,
    pub termination: String,
    pub wall_time_ms: f64,
    /// `||L u - f||_inf`, recomputed from the returned potentials.
    pub residual_inf: f64,
}

impl RunSummary {
    /// `key=value` lines in [`SUMMARY_KEYS`] order.
    pub fn render(&self) -> String {
        let values = [
            self.n.to_string(),
            self.m.to_string(),
            self.p.to_string(),
            self.tau.to_string(),
            self.tree_strategy.clone(),
            self.mode.clone(),
            self.seed.to_string(),
            self.iterations.to_string(),
            self.final_energy.to_string(),
            self.final_gap.to_string(),
            self.termination.clone(),
            format!("{:.3}", self.wall_time_ms),
            self.residual_inf.to_string(),
        ];
        let mut out = String::new();
        for (key, value) in SUMMARY_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{key}={value}");
        }
        out
    }
}

/// Read back a rendered summary (or any `key=value` document).
pub fn parse_summary(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|line| line.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

//! End-to-end experiment runs over a dataset: graph construction, plans,
//! sweeps, and the files written for them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{write_atomic, Dataset};
use crate::error::{Error, Result};
use crate::experiments::{
    denoise_sweep, Bandlimiter, EnergyProfile, SweepConfig, SweepRow, TransformKind,
};
use crate::factor::FactorPlan;
use crate::graph::{directed_line_graph, knn_graph_with_metric, DirectedGraph, DistanceMetric};
use crate::signal::ProductSignal;
use crate::square::SquarePlan;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformSelection {
    Square,
    Otimes,
    #[default]
    Both,
}

impl TransformSelection {
    pub fn kinds(self) -> Vec<TransformKind> {
        match self {
            TransformSelection::Square => vec![TransformKind::Square],
            TransformSelection::Otimes => vec![TransformKind::Otimes],
            TransformSelection::Both => vec![TransformKind::Square, TransformKind::Otimes],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Neighbors per station in the spatial graph.
    pub k: usize,
    pub weight_lo: f64,
    pub weight_hi: f64,
    /// Seeds both the spatial edge weights and the noise.
    pub seed: u64,
    pub noise_levels: Vec<f64>,
    pub bandwidths: Vec<usize>,
    pub trials: usize,
    pub transform: TransformSelection,
    pub metric: DistanceMetric,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 5,
            weight_lo: 0.8,
            weight_hi: 1.2,
            seed: 0,
            noise_levels: vec![1.0, 2.0, 4.0, 8.0],
            bandwidths: vec![32],
            trials: 100,
            transform: TransformSelection::Both,
            metric: DistanceMetric::Euclidean,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        if self.noise_levels.is_empty() || self.bandwidths.is_empty() {
            return Err(Error::InvalidArgument(
                "noise level and bandwidth lists must be nonempty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.k == 0 || self.k >= dataset.n2() {
            return Err(Error::InvalidArgument(format!(
                "k = {} must satisfy 1 <= k < {} (number of stations)",
                self.k,
                dataset.n2()
            )));
        }
        Ok(())
    }
}

/// Either transform's plan.
#[derive(Debug, Clone)]
pub enum Plan {
    Square(SquarePlan),
    Otimes(FactorPlan),
}

impl Plan {
    pub fn build(
        kind: TransformKind,
        temporal: &DirectedGraph,
        spatial: &DirectedGraph,
    ) -> Result<Self> {
        Ok(match kind {
            TransformKind::Square => Plan::Square(SquarePlan::new(temporal, spatial)?),
            TransformKind::Otimes => Plan::Otimes(FactorPlan::new(temporal, spatial)?),
        })
    }

    pub fn as_bandlimiter(&self) -> &dyn Bandlimiter {
        match self {
            Plan::Square(p) => p,
            Plan::Otimes(p) => p,
        }
    }

    pub fn kind(&self) -> TransformKind {
        self.as_bandlimiter().kind()
    }

    /// Frequencies in ascending order: `σ_k` or `μ_k`.
    pub fn frequencies(&self) -> Vec<f64> {
        match self {
            Plan::Square(p) => p.frequencies().to_vec(),
            Plan::Otimes(p) => p.frequencies(),
        }
    }

    /// One row per frequency, in frequency order.
    pub fn spectrum(&self, x: &ProductSignal) -> Result<Vec<SpectrumRow>> {
        match self {
            Plan::Square(p) => {
                x.check_shape(p.n1(), p.n2())?;
                let z = p.forward(&x.to_vec())?;
                Ok((0..p.order())
                    .map(|k| SpectrumRow {
                        k,
                        frequency: p.frequencies()[k],
                        first: z.first[k],
                        second: z.second[k],
                        pair: None,
                    })
                    .collect())
            }
            Plan::Otimes(p) => {
                let z = p.forward(x)?;
                let (first, second) = p.in_pair_order(&z);
                Ok(p.pair_order()
                    .iter()
                    .enumerate()
                    .map(|(k, pair)| SpectrumRow {
                        k,
                        frequency: pair.mu,
                        first: first[k],
                        second: second[k],
                        pair: Some((pair.i, pair.j)),
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub k: usize,
    pub frequency: f64,
    pub first: f64,
    pub second: f64,
    /// `(i, j)` factor indices for the factor transform.
    pub pair: Option<(usize, usize)>,
}

/// The temporal path and the spatial nearest-neighbor graph for a dataset.
pub fn build_graphs(
    config: &ExperimentConfig,
    dataset: &Dataset,
) -> Result<(DirectedGraph, DirectedGraph)> {
    config.validate(dataset)?;
    let temporal = directed_line_graph(dataset.n1())?;
    let spatial = knn_graph_with_metric(
        &dataset.coordinates(),
        config.k,
        config.weight_lo,
        config.weight_hi,
        config.seed,
        config.metric,
    )?;
    Ok((temporal, spatial))
}

pub fn build_plans(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<Plan>> {
    let (temporal, spatial) = build_graphs(config, dataset)?;
    config
        .transform
        .kinds()
        .into_iter()
        .map(|kind| Plan::build(kind, &temporal, &spatial))
        .collect()
}

/// The JSON document written for a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub hours: usize,
    pub stations: usize,
    pub days: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub energy_profiles: Vec<EnergyProfile>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One line per sweep row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,m,transform,isnr_db,snr_db,trials,days,seed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.c,
                r.m,
                r.transform.name(),
                r.isnr_db,
                r.snr_db,
                r.trials,
                r.days,
                r.seed
            ));
        }
        out
    }
}

pub fn run(config: &ExperimentConfig, dataset: &Dataset) -> Result<Report> {
    let plans = build_plans(config, dataset)?;
    run_with_plans(config, dataset, &plans)
}

pub fn run_with_plans(
    config: &ExperimentConfig,
    dataset: &Dataset,
    plans: &[Plan],
) -> Result<Report> {
    let limiters: Vec<&dyn Bandlimiter> = plans.iter().map(Plan::as_bandlimiter).collect();
    let sweep = denoise_sweep(
        &limiters,
        &dataset.signals(),
        &SweepConfig {
            noise_levels: config.noise_levels.clone(),
            bandwidths: config.bandwidths.clone(),
            trials: config.trials,
            seed: config.seed,
        },
    )?;
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        hours: dataset.n1(),
        stations: dataset.n2(),
        days: dataset.days.iter().map(|d| d.label.clone()).collect(),
        rows: sweep.rows,
        energy_profiles: sweep.energy_profiles,
    })
}

/// Writes `report` as JSON to `path` and as CSV next to it.
pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    write_atomic(path, report.to_json()?.as_bytes())?;
    write_atomic(&path.with_extension("csv"), report.to_csv().as_bytes())
}

/// Writes `k,frequency,z1,z2` rows, plus `i,j` for the factor transform.
pub fn export_spectrum(plan: &Plan, x: &ProductSignal, path: &Path) -> Result<()> {
    let rows = plan.spectrum(x)?;
    let mut out = String::from(match plan {
        Plan::Square(_) => "k,frequency,z1,z2\n",
        Plan::Otimes(_) => "k,frequency,z1,z2,i,j\n",
    });
    for r in rows {
        out.push_str(&format!("{},{},{},{}", r.k, r.frequency, r.first, r.second));
        if let Some((i, j)) = r.pair {
            out.push_str(&format!(",{i},{j}"));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Writes `k,sigma,mu,mu_minus_sigma` for whichever plans are given.
pub fn export_frequencies(
    square: Option<&[f64]>,
    otimes: Option<&[f64]>,
    path: &Path,
) -> Result<()> {
    let n = square.or(otimes).map_or(0, <[f64]>::len);
    let cell = |v: Option<&[f64]>, k: usize| v.map_or(String::new(), |v| v[k].to_string());
    let mut out = String::from("k,sigma,mu,mu_minus_sigma\n");
    for k in 0..n {
        let diff = match (square, otimes) {
            (Some(s), Some(m)) => (m[k] - s[k]).to_string(),
            _ => String::new(),
        };
        out.push_str(&format!(
            "{k},{},{},{diff}\n",
            cell(square, k),
            cell(otimes, k)
        ));
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthetic_dataset, FixtureSpec};
    use crate::experiments::Decibels;

    fn small() -> Dataset {
        synthetic_dataset(FixtureSpec {
            hours: 4,
            stations: 5,
            days: 2,
            seed: 3,
        })
        .unwrap()
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            k: 2,
            noise_levels: vec![0.0],
            bandwidths: vec![20],
            trials: 1,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn full_bandwidth_without_noise_is_exact() {
        let report = run(&config(), &small()).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert_eq!(row.isnr_db, Decibels::PlusInfinity);
            assert!(row.snr_db.value() > 200.0, "{:?}", row.snr_db);
        }
    }

    #[test]
    fn report_json_round_trips() {
        let cfg = ExperimentConfig {
            noise_levels: vec![0.5],
            bandwidths: vec![3, 8],
            trials: 2,
            ..config()
        };
        let report = run(&cfg, &small()).unwrap();
        let json = report.to_json().unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert_eq!(serde_json::from_str::<Report>(&json).unwrap(), report);
        assert_eq!(report.to_csv().lines().count(), 1 + report.rows.len());
        assert_eq!(run(&cfg, &small()).unwrap().to_json().unwrap(), json);
    }

    #[test]
    fn config_validation() {
        let ds = small();
        assert!(run(&ExperimentConfig { k: 5, ..config() }, &ds).is_err());
        assert!(run(
            &ExperimentConfig {
                trials: 0,
                ..config()
            },
            &ds
        )
        .is_err());
        assert!(run(
            &ExperimentConfig {
                bandwidths: vec![],
                ..config()
            },
            &ds
        )
        .is_err());
    }

    #[test]
    fn spectrum_rows() {
        let ds = small();
        let dir = tempfile::tempdir().unwrap();
        for plan in build_plans(&config(), &ds).unwrap() {
            let rows = plan.spectrum(&ProductSignal::zeros(4, 5)).unwrap();
            assert_eq!(rows.len(), 20);
            assert!(rows.iter().all(|r| r.first == 0.0 && r.second == 0.0));
            let path = dir.path().join(format!("{}.csv", plan.kind().name()));
            export_spectrum(&plan, &ds.days[0].signal, &path).unwrap();
            let text = std::fs::read_to_string(&path).unwrap();
            assert_eq!(text.lines().count(), 21);
        }
    }
}

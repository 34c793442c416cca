use rayon::prelude::*;

use super::table::{format_number, Table};
use super::{ExperimentSpec, RedundancyChoice, SweepPoint};
use crate::allocator::{allocate_with_model, AllocationResult};
use crate::analytic::{AnalyticInputs, MlpModel};
use crate::error::{Error, Result};
use crate::monte_carlo::{run_checks, Check, CheckResult};
use crate::phy;
use crate::sim::{build_scenario, run, MetricsReport, ScenarioConfig};

const ANALYZE_SCHEMA: &str = "analyze/1";
const SIMULATE_SCHEMA: &str = "simulate/1";
const ALLOCATE_SCHEMA: &str = "allocate/1";
const VALIDATE_SCHEMA: &str = "validate/1";

fn num(x: f64) -> String {
    format_number(x)
}

fn analytic_inputs(spec: &ExperimentSpec) -> AnalyticInputs {
    let mut inputs = spec
        .base
        .analytic_inputs(spec.analysis.distance_laws, spec.analysis.capture_factor);
    inputs.quadrature_order = spec.analysis.quadrature_order;
    inputs
}

/// Lazily built analytic model shared by all points of a sweep.
struct Resolver<'a> {
    spec: &'a ExperimentSpec,
    model: Option<MlpModel>,
    r_max: u32,
}

impl<'a> Resolver<'a> {
    fn new(spec: &'a ExperimentSpec) -> Result<Self> {
        let r_max = phy::max_redundancy(&spec.base.sensor_radio, &spec.base.traffic)?;
        Ok(Self {
            spec,
            model: None,
            r_max,
        })
    }

    fn model(&mut self) -> Result<&MlpModel> {
        if self.model.is_none() {
            self.model = Some(MlpModel::new(&analytic_inputs(self.spec))?);
        }
        Ok(self.model.as_ref().expect("model just built"))
    }

    fn allocation(&mut self, point: &SweepPoint, p_target: f64) -> Result<AllocationResult> {
        let r_max = self.r_max;
        let model = self.model()?;
        Ok(allocate_with_model(
            model,
            point.n_sensors,
            point.n_relays,
            p_target,
            r_max,
        )?)
    }

    fn redundancy(&mut self, point: &SweepPoint) -> Result<u32> {
        match point.redundancy {
            RedundancyChoice::Fixed(r) => Ok(r),
            RedundancyChoice::Max => Ok(self.r_max),
            RedundancyChoice::Target(p) => Ok(self.allocation(point, p)?.r_tilde),
        }
    }
}

fn point_config(spec: &ExperimentSpec, point: &SweepPoint, redundancy: u32) -> ScenarioConfig {
    ScenarioConfig {
        n_sensors: point.n_sensors,
        n_relays: point.n_relays,
        redundancy,
        seed: spec.first_seed(),
        ..spec.base.clone()
    }
}

/// One row per sweep point with the full analytic breakdown. Relay columns
/// are empty without relays; all relays share the same statistics.
pub fn cmd_analyze(spec: &ExperimentSpec) -> Result<Table> {
    let mut table = Table::new(vec![
        "schema",
        "n_sensors",
        "n_relays",
        "redundancy",
        "redundancy_rule",
        "duty_cycle",
        "relay_capacity",
        "p_i",
        "p_f",
        "p_dir",
        "p_rw",
        "p_i_s_r",
        "p_f_s_r",
        "p_s_r",
        "p_drop",
        "p_r_g",
        "p_ri",
        "mlp",
        "quadrature_error",
        "seed",
        "config_digest",
    ]);
    let mut resolver = Resolver::new(spec)?;
    for point in spec.points() {
        let r = resolver.redundancy(&point)?;
        let b = resolver.model()?.breakdown_at(point.n_sensors, point.n_relays, r)?;
        let config = point_config(spec, &point, r);
        let relay =
            |f: fn(&crate::analytic::RelayBreakdown) -> f64| b.relays.first().map(f).map(num).unwrap_or_default();
        table.push(vec![
            ANALYZE_SCHEMA.into(),
            point.n_sensors.to_string(),
            point.n_relays.to_string(),
            r.to_string(),
            point.redundancy.to_string(),
            num(b.duty_cycle),
            b.relay_capacity.to_string(),
            num(b.p_i),
            num(b.p_f),
            num(b.p_dir),
            relay(|x| x.p_rw),
            relay(|x| x.p_i_s_r),
            relay(|x| x.p_f_s_r),
            relay(|x| x.p_s_r),
            relay(|x| x.p_drop),
            relay(|x| x.p_r_g),
            relay(|x| x.p_ri),
            num(b.mlp),
            num(b.quadrature_error),
            config.seed.to_string(),
            config.digest(),
        ]);
    }
    Ok(table)
}

/// Runs and their average for one scenario.
#[derive(Debug, Clone)]
pub struct PointSummary {
    pub config: ScenarioConfig,
    pub runs: Vec<MetricsReport>,
    pub mlr_mean: f64,
    pub mlr_se: f64,
    pub e_m_mean: f64,
    pub e_m_se: f64,
    pub lost: u64,
    pub generated: u64,
    /// Fewer than the requested number of losses were observed.
    pub low_confidence: bool,
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 || !mean.is_finite() {
        return (mean, if n < 2.0 { 0.0 } else { f64::NAN });
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulates `config` with seeds `config.seed`, `config.seed + 1`, ...
/// Starting from `runs` seeds, batches of further seeds are added until
/// `min_losses` losses have been seen or `max_runs` is reached. The batch
/// schedule does not depend on thread timing, so results are reproducible.
pub fn simulate_point(config: &ScenarioConfig, runs: u32, max_runs: u32, min_losses: u64) -> Result<PointSummary> {
    let batch = |first: u64, count: u32| -> Result<Vec<MetricsReport>> {
        (0..u64::from(count))
            .into_par_iter()
            .map(|k| {
                let scenario = build_scenario(&ScenarioConfig {
                    seed: first + k,
                    ..config.clone()
                })?;
                Ok(run(&scenario))
            })
            .collect()
    };
    let mut reports = batch(config.seed, runs.max(1))?;
    let lost = |reports: &[MetricsReport]| reports.iter().map(|r| r.lost).sum::<u64>();
    while lost(&reports) < min_losses && (reports.len() as u32) < max_runs {
        let done = reports.len() as u32;
        let extra = done.min(max_runs - done);
        reports.extend(batch(config.seed + u64::from(done), extra)?);
    }
    let (mlr_mean, mlr_se) = mean_and_se(reports.iter().map(|r| r.mlr));
    let (e_m_mean, e_m_se) = mean_and_se(reports.iter().map(|r| r.e_m_j));
    let lost_total = lost(&reports);
    Ok(PointSummary {
        config: config.clone(),
        mlr_mean,
        mlr_se,
        e_m_mean,
        e_m_se,
        lost: lost_total,
        generated: reports.iter().map(|r| r.generated).sum(),
        low_confidence: lost_total < min_losses,
        runs: reports,
    })
}

/// Per-run rows followed by one aggregate row for every sweep point.
pub fn cmd_simulate(spec: &ExperimentSpec) -> Result<Table> {
    let mut table = Table::new(vec![
        "schema",
        "kind",
        "n_sensors",
        "n_relays",
        "redundancy",
        "redundancy_rule",
        "seed",
        "runs",
        "generated",
        "delivered",
        "lost",
        "delivered_direct_only",
        "delivered_relay_only",
        "delivered_both",
        "dropped_at_relay",
        "mlr",
        "mlr_se",
        "e_m_j",
        "e_m_j_se",
        "low_confidence",
        "config_digest",
    ]);
    let mut resolver = Resolver::new(spec)?;
    for point in spec.points() {
        let r = resolver.redundancy(&point)?;
        let config = point_config(spec, &point, r);
        let summary = simulate_point(&config, spec.seeds.runs, spec.seeds.max_runs, spec.seeds.min_losses)?;
        let digest = config.digest();
        let prefix = |kind: &str| {
            vec![
                SIMULATE_SCHEMA.to_string(),
                kind.to_string(),
                point.n_sensors.to_string(),
                point.n_relays.to_string(),
                r.to_string(),
                point.redundancy.to_string(),
            ]
        };
        for report in &summary.runs {
            let mut row = prefix("run");
            row.extend([
                report.seed.to_string(),
                "1".into(),
                report.generated.to_string(),
                report.delivered.to_string(),
                report.lost.to_string(),
                report.delivered_direct_only.to_string(),
                report.delivered_relay_only.to_string(),
                report.delivered_both.to_string(),
                report.dropped_at_relay.to_string(),
                num(report.mlr),
                String::new(),
                num(report.e_m_j),
                String::new(),
                String::new(),
                digest.clone(),
            ]);
            table.push(row);
        }
        let sum = |f: fn(&MetricsReport) -> u64| summary.runs.iter().map(f).sum::<u64>().to_string();
        let mut row = prefix("mean");
        row.extend([
            config.seed.to_string(),
            summary.runs.len().to_string(),
            sum(|r| r.generated),
            sum(|r| r.delivered),
            sum(|r| r.lost),
            sum(|r| r.delivered_direct_only),
            sum(|r| r.delivered_relay_only),
            sum(|r| r.delivered_both),
            sum(|r| r.dropped_at_relay),
            num(summary.mlr_mean),
            num(summary.mlr_se),
            num(summary.e_m_mean),
            num(summary.e_m_se),
            summary.low_confidence.to_string(),
            digest,
        ]);
        table.push(row);
    }
    Ok(table)
}

/// Allocation for every `(n, omega)` and every target on the redundancy
/// axis. With `simulate`, the allocated redundancy is also simulated.
pub fn cmd_allocate(spec: &ExperimentSpec, simulate: bool) -> Result<Table> {
    let mut table = Table::new(vec![
        "schema",
        "n_sensors",
        "n_relays",
        "p_target",
        "r_max",
        "r_star",
        "r_tilde",
        "mlp_at_r_star",
        "mlp_at_r_tilde",
        "met_target",
        "sim_mlr",
        "sim_mlr_se",
        "sim_runs",
        "sim_low_confidence",
        "seed",
        "config_digest",
    ]);
    let targets: Vec<SweepPoint> = spec
        .points()
        .into_iter()
        .filter(|p| matches!(p.redundancy, RedundancyChoice::Target(_)))
        .collect();
    if targets.is_empty() {
        return Err(Error::Usage(
            "allocation needs targets on the redundancy axis, e.g. --sweep pt=0.01".into(),
        ));
    }
    let mut resolver = Resolver::new(spec)?;
    for point in targets {
        let RedundancyChoice::Target(p_target) = point.redundancy else {
            unreachable!("filtered above")
        };
        let out = resolver.allocation(&point, p_target)?;
        let config = point_config(spec, &point, out.r_tilde);
        let mut row = vec![
            ALLOCATE_SCHEMA.into(),
            point.n_sensors.to_string(),
            point.n_relays.to_string(),
            num(p_target),
            resolver.r_max.to_string(),
            out.r_star.to_string(),
            out.r_tilde.to_string(),
            num(out.mlp_at_r_star),
            num(out.mlp_at_r_tilde),
            out.met_target.to_string(),
        ];
        if simulate {
            let summary = simulate_point(&config, spec.seeds.runs, spec.seeds.max_runs, spec.seeds.min_losses)?;
            row.extend([
                num(summary.mlr_mean),
                num(summary.mlr_se),
                summary.runs.len().to_string(),
                summary.low_confidence.to_string(),
            ]);
        } else {
            row.extend(std::iter::repeat_n(String::new(), 4));
        }
        row.extend([config.seed.to_string(), config.digest()]);
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateOptions {
    pub checks: Vec<Check>,
    pub samples: u64,
    /// Overrides the experiment's first seed.
    pub seed: Option<u64>,
    /// Largest acceptable `|z|`.
    pub sigmas: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            checks: Check::ALL.to_vec(),
            samples: 1_000_000,
            seed: None,
            sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidationOutcome {
    pub results: Vec<CheckResult>,
    pub table: Table,
    pub passed: bool,
}

/// Sampling oracles against the analysis at the first sweep point.
pub fn cmd_validate(spec: &ExperimentSpec, options: &ValidateOptions) -> Result<ValidationOutcome> {
    let point = spec.points()[0];
    let mut resolver = Resolver::new(spec)?;
    let redundancy = resolver.redundancy(&point)?;
    let inputs = AnalyticInputs {
        n_sensors: point.n_sensors,
        n_relays: point.n_relays,
        redundancy,
        ..analytic_inputs(spec)
    };
    let seed = options.seed.unwrap_or_else(|| spec.first_seed());
    let capture_ratio = spec.base.propagation.capture_ratio();
    let results = run_checks(&inputs, &options.checks, capture_ratio, options.samples, seed)?;

    let mut table = Table::new(vec![
        "schema",
        "check",
        "n_sensors",
        "redundancy",
        "analytic",
        "monte_carlo",
        "std_error",
        "samples",
        "z",
        "passed",
        "seed",
    ]);
    for result in &results {
        table.push(vec![
            VALIDATE_SCHEMA.into(),
            result.check.to_string(),
            point.n_sensors.to_string(),
            redundancy.to_string(),
            num(result.analytic),
            num(result.monte_carlo),
            num(result.std_error),
            result.samples.to_string(),
            num(result.z),
            result.passed(options.sigmas).to_string(),
            seed.to_string(),
        ]);
    }
    let passed = results.iter().all(|r| r.passed(options.sigmas));
    Ok(ValidationOutcome { results, table, passed })
}

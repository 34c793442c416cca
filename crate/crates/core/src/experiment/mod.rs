//! Experiment descriptions and the batch commands built on them.
//!
//! An [`ExperimentSpec`] is a JSON document holding a base scenario, sweep
//! axes over sensor count, relay count and redundancy, seeding rules and
//! analysis settings. The commands expand the sweep in a fixed order and
//! produce CSV tables whose rows carry the seed and configuration digest
//! needed to reproduce them.

mod commands;
mod table;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use commands::{
    cmd_allocate, cmd_analyze, cmd_simulate, cmd_validate, simulate_point, PointSummary, ValidateOptions,
    ValidationOutcome,
};
pub use table::{format_number, Table};

use crate::analytic::{DistanceLaws, DEFAULT_QUADRATURE_ORDER};
use crate::error::{ConfigError, Error, Result};
use crate::sim::ScenarioConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// How a sweep point picks the sensors' redundancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RedundancyChoice {
    Fixed(u32),
    /// The largest redundancy allowed by storage, duty cycle and delay.
    Max,
    /// Allocation against a target loss probability.
    Target(f64),
}

impl fmt::Display for RedundancyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(r) => write!(f, "{r}"),
            Self::Max => f.write_str("max"),
            Self::Target(p) => write!(f, "pt={p}"),
        }
    }
}

impl FromStr for RedundancyChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "max" {
            return Ok(Self::Max);
        }
        if let Some(p) = s.strip_prefix("pt=") {
            let p: f64 = p.parse().map_err(|_| format!("invalid target `{p}`"))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(format!("target {p} must lie in (0, 1]"));
            }
            return Ok(Self::Target(p));
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected a redundancy, `max` or `pt=<target>`, got `{s}`"))
    }
}

impl Serialize for RedundancyChoice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Fixed(r) => serializer.serialize_u32(*r),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for RedundancyChoice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(r) => Ok(Self::Fixed(r)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Sweep axes; an absent axis takes the base scenario's value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sensors: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relays: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redundancy: Option<Vec<RedundancyChoice>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    /// First seed; defaults to the base scenario's seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<u64>,
    #[serde(default = "SeedSpec::default_runs")]
    pub runs: u32,
    /// Upper bound on runs when adding seeds to reach `min_losses`.
    #[serde(default = "SeedSpec::default_max_runs")]
    pub max_runs: u32,
    #[serde(default = "SeedSpec::default_min_losses")]
    pub min_losses: u64,
}

impl SeedSpec {
    fn default_runs() -> u32 {
        1
    }

    fn default_max_runs() -> u32 {
        64
    }

    fn default_min_losses() -> u64 {
        100
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        Self {
            base: None,
            runs: Self::default_runs(),
            max_runs: Self::default_max_runs(),
            min_losses: Self::default_min_losses(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "AnalysisSpec::default_capture_factor")]
    pub capture_factor: f64,
    #[serde(default)]
    pub distance_laws: DistanceLaws,
    #[serde(default = "AnalysisSpec::default_order")]
    pub quadrature_order: usize,
}

impl AnalysisSpec {
    fn default_capture_factor() -> f64 {
        0.25
    }

    fn default_order() -> usize {
        DEFAULT_QUADRATURE_ORDER
    }
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            capture_factor: Self::default_capture_factor(),
            distance_laws: DistanceLaws::default(),
            quadrature_order: Self::default_order(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    pub base: ScenarioConfig,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// One `(n, omega, redundancy rule)` combination of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n_sensors: u32,
    pub n_relays: u32,
    pub redundancy: RedundancyChoice,
}

impl ExperimentSpec {
    /// The reference deployment: 60 sensors, 0 to 8 relays, no redundancy
    /// and maximum redundancy, three-hour runs.
    pub fn paper_setup() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            profile: Some("paper_setup".into()),
            base: ScenarioConfig {
                n_sensors: 60,
                ..ScenarioConfig::default()
            },
            sweep: SweepSpec {
                n_sensors: Some(vec![60]),
                relays: Some((0..=8).collect()),
                redundancy: Some(vec![RedundancyChoice::Fixed(0), RedundancyChoice::Max]),
            },
            seeds: SeedSpec::default(),
            analysis: AnalysisSpec::default(),
            output: None,
        }
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment spec serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        self.base
            .validate()
            .map_err(|e| ConfigError::invalid(format!("base.{}", e.field), e.reason))?;
        let empty = |axis: &str| ConfigError::invalid(format!("sweep.{axis}"), "axis must not be empty");
        if self.sweep.n_sensors.as_ref().is_some_and(Vec::is_empty) {
            return Err(empty("n_sensors"));
        }
        if self.sweep.relays.as_ref().is_some_and(Vec::is_empty) {
            return Err(empty("relays"));
        }
        if self.sweep.redundancy.as_ref().is_some_and(Vec::is_empty) {
            return Err(empty("redundancy"));
        }
        if self.seeds.runs == 0 {
            return Err(ConfigError::invalid("seeds.runs", "at least one run required"));
        }
        if self.seeds.max_runs < self.seeds.runs {
            return Err(ConfigError::invalid("seeds.max_runs", "must be at least seeds.runs"));
        }
        let factor = self.analysis.capture_factor;
        if !(factor > 0.0 && factor < 1.0) {
            return Err(ConfigError::invalid("analysis.capture_factor", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn first_seed(&self) -> u64 {
        self.seeds.base.unwrap_or(self.base.seed)
    }

    /// Sweep points in output order: sensor count outermost, redundancy
    /// innermost.
    pub fn points(&self) -> Vec<SweepPoint> {
        let ns = self
            .sweep
            .n_sensors
            .clone()
            .unwrap_or_else(|| vec![self.base.n_sensors]);
        let relays = self.sweep.relays.clone().unwrap_or_else(|| vec![self.base.n_relays]);
        let rs = self
            .sweep
            .redundancy
            .clone()
            .unwrap_or_else(|| vec![RedundancyChoice::Fixed(self.base.redundancy)]);
        let mut points = Vec::with_capacity(ns.len() * relays.len() * rs.len());
        for &n_sensors in &ns {
            for &n_relays in &relays {
                for &redundancy in &rs {
                    points.push(SweepPoint {
                        n_sensors,
                        n_relays,
                        redundancy,
                    });
                }
            }
        }
        points
    }

    /// Applies a command-line override such as `n=20,40,60`, `relays=0..8`,
    /// `r=0,3,max` or `pt=0.01,0.001`.
    pub fn apply_sweep_arg(&mut self, arg: &str) -> Result<()> {
        let (key, values) = arg
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("sweep `{arg}` must look like key=v1,v2,...")))?;
        let usage = |msg: String| Error::Usage(format!("sweep `{arg}`: {msg}"));
        match key.trim() {
            "n" | "n_sensors" => self.sweep.n_sensors = Some(parse_int_list(values).map_err(usage)?),
            "relays" | "omega" | "w" => self.sweep.relays = Some(parse_int_list(values).map_err(usage)?),
            "r" | "redundancy" => {
                let choices = values
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<RedundancyChoice>, _>>()
                    .map_err(usage)?;
                self.sweep.redundancy = Some(choices);
            }
            "pt" | "p_target" => {
                let choices = values
                    .split(',')
                    .map(|p| format!("pt={}", p.trim()).parse())
                    .collect::<Result<Vec<RedundancyChoice>, _>>()
                    .map_err(usage)?;
                self.sweep.redundancy = Some(choices);
            }
            other => return Err(usage(format!("unknown axis `{other}`; expected n, relays, r or pt"))),
        }
        self.validate()?;
        Ok(())
    }
}

fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

/// Parses `1,2,5..8` into `[1, 2, 5, 6, 7, 8]`.
fn parse_int_list(values: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for item in values.split(',').map(str::trim) {
        if let Some((lo, hi)) = item.split_once("..") {
            let lo: u32 = lo.trim().parse().map_err(|_| format!("invalid range start `{lo}`"))?;
            let hi: u32 = hi.trim().parse().map_err(|_| format!("invalid range end `{hi}`"))?;
            if hi < lo {
                return Err(format!("empty range `{item}`"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().map_err(|_| format!("invalid integer `{item}`"))?);
        }
    }
    if out.is_empty() {
        return Err("no values".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn redundancy_choice_round_trips() {
        for text in ["3", "max", "pt=0.01"] {
            let choice: RedundancyChoice = text.parse().unwrap();
            assert_eq!(choice.to_string(), text);
            let json = serde_json::to_string(&choice).unwrap();
            assert_eq!(serde_json::from_str::<RedundancyChoice>(&json).unwrap(), choice);
        }
        assert!("pt=1.5".parse::<RedundancyChoice>().is_err());
        assert!("lots".parse::<RedundancyChoice>().is_err());
    }

    #[test]
    fn int_lists_and_ranges() {
        assert_eq!(parse_int_list("0..3,8").unwrap(), vec![0, 1, 2, 3, 8]);
        assert!(parse_int_list("3..1").is_err());
        assert!(parse_int_list("x").is_err());
    }

    #[test]
    fn sweep_order_is_nested() {
        let mut spec = ExperimentSpec::paper_setup();
        spec.apply_sweep_arg("n=20,40").unwrap();
        spec.apply_sweep_arg("relays=0,1").unwrap();
        spec.apply_sweep_arg("r=3").unwrap();
        let points = spec.points();
        assert_eq!(points.len(), 4);
        assert_eq!((points[1].n_sensors, points[1].n_relays), (20, 1));
        assert_eq!((points[2].n_sensors, points[2].n_relays), (40, 0));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ExperimentSpec::paper_setup();
        let back = ExperimentSpec::from_json(&spec.to_json(), Path::new("inline")).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"schema_version\": 1,\n  \"base\": {\"n_sensors\": \"many\"}\n}";
        match ExperimentSpec::from_json(text, Path::new("bad.json")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut value = serde_json::to_value(ExperimentSpec::paper_setup()).unwrap();
        value["base"]["n_sensor"] = 5.into();
        assert!(ExperimentSpec::from_json(&value.to_string(), Path::new("typo.json")).is_err());
    }

    #[test]
    fn partial_base_takes_defaults() {
        let text = r#"{"schema_version": 1, "base": {"n_sensors": 25, "n_relays": 2}}"#;
        let spec = ExperimentSpec::from_json(text, Path::new("partial.json")).unwrap();
        assert_eq!(spec.base.n_sensors, 25);
        assert_eq!(spec.base.relay_windows, ScenarioConfig::default().relay_windows);
    }

    #[test]
    fn empty_axis_is_rejected() {
        let mut spec = ExperimentSpec::paper_setup();
        spec.sweep.relays = Some(vec![]);
        assert_eq!(spec.validate().unwrap_err().field, "sweep.relays");
    }
}

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use macrobell_core::fock_oracle::Truncations;
use macrobell_core::quad_bell::NoiseModel;
use macrobell_core::states::{pair_coherent, two_mode_squeezed, two_mode_squeezed_min_n_max};
use macrobell_core::{AngleQuad, QuadratureGrid, SchmidtDiagonalState};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA: &str = include_str!("../schema/run_config.schema.json");

/// Cutoff used for pair-coherent states when none is configured.
pub const DEFAULT_N_MAX: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BellScan,
    NoiseThreshold,
    AngleOpt,
    OracleCompare,
    EprSweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::BellScan => "bell-scan",
            Self::NoiseThreshold => "noise-threshold",
            Self::AngleOpt => "angle-opt",
            Self::OracleCompare => "oracle-compare",
            Self::EprSweep => "epr-sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    PairCoherent { r0: f64 },
    TwoModeSqueezed { r: f64 },
    Vacuum,
}

impl Default for StateSpec {
    fn default() -> Self {
        Self::PairCoherent { r0: 1.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    /// Fock cutoff of the state; picked from the state when absent.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Quadrature grid; `[-8, 8]` at step 0.01, widened to cover the state.
    #[serde(default)]
    pub grid: Option<QuadratureGrid>,
    #[serde(default)]
    pub truncations: Truncations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Angles {
    pub theta: f64,
    pub phi: f64,
    pub theta_prime: f64,
    pub phi_prime: f64,
}

impl Default for Angles {
    fn default() -> Self {
        Self {
            theta: 0.0,
            phi: -FRAC_PI_4,
            theta_prime: FRAC_PI_2,
            phi_prime: -3.0 * FRAC_PI_4,
        }
    }
}

impl From<Angles> for AngleQuad {
    fn from(a: Angles) -> Self {
        AngleQuad::new(a.theta, a.phi, a.theta_prime, a.phi_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub sigma0: f64,
    /// Noise at B when it differs from A.
    #[serde(default)]
    pub sigma0_b: Option<f64>,
}

impl NoiseSpec {
    pub fn model(&self) -> NoiseModel {
        NoiseModel::asymmetric(self.sigma0, self.sigma0_b.unwrap_or(self.sigma0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    /// `start, start + step, ...` up to `stop` inclusive (with a little slack
    /// for rounding), each point computed from its index.
    pub fn points(&self) -> Vec<f64> {
        if self.stop < self.start {
            return Vec::new();
        }
        let count = ((self.stop - self.start) / self.step * (1.0 + 1e-9) + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default = "default_sigma0_range")]
    pub sigma0: Range,
    #[serde(default = "default_energies")]
    pub energies: Vec<f64>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_squeezing")]
    pub squeezing: Vec<f64>,
    #[serde(default = "default_macroscopic_threshold")]
    pub macroscopic_threshold: f64,
}

fn default_sigma0_range() -> Range {
    Range {
        start: 0.0,
        stop: 1.0,
        step: 0.02,
    }
}

fn default_energies() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

fn default_alphas() -> Vec<f64> {
    vec![5.0, 10.0, 20.0]
}

fn default_squeezing() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0]
}

fn default_macroscopic_threshold() -> f64 {
    macrobell_core::epr::DEFAULT_MACROSCOPIC_THRESHOLD
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            sigma0: default_sigma0_range(),
            energies: default_energies(),
            alphas: default_alphas(),
            squeezing: default_squeezing(),
            macroscopic_threshold: default_macroscopic_threshold(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub state: StateSpec,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub angles: Angles,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        let state = match experiment {
            Experiment::EprSweep => StateSpec::TwoModeSqueezed { r: 1.0 },
            _ => StateSpec::default(),
        };
        Self {
            experiment,
            state,
            numerics: Numerics::default(),
            angles: Angles::default(),
            noise: NoiseSpec::default(),
            scan: ScanSpec::default(),
            output: OutputSpec::default(),
        }
    }

    /// Parse and validate a JSON document. `origin` prefixes error messages.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| anchored(origin, &e))?;
        validate_against_schema(&value).map_err(|msg| CliError::Config(format!("{origin}: {msg}")))?;
        // Parse the text again rather than the value so any remaining
        // complaint still carries a line and column.
        let config: Self = serde_json::from_str(text).map_err(|e| anchored(origin, &e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Checks the schema cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if let Some(grid) = &self.numerics.grid {
            grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if !grid.is_symmetric() {
                return bad(format!("grid [{}, {}] must be symmetric about 0", grid.lo, grid.hi));
            }
        }
        let r = self.scan.sigma0;
        if !(r.step > 0.0 && r.start >= 0.0 && r.stop >= r.start) {
            return bad(format!(
                "sigma0 scan needs 0 <= start <= stop and step > 0, got {}:{}:{}",
                r.start, r.stop, r.step
            ));
        }
        if r.points().len() > 1_000_000 {
            return bad("sigma0 scan has more than 10^6 points".into());
        }
        self.noise
            .model()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        match self.state {
            StateSpec::PairCoherent { r0 } if !(r0.is_finite() && r0 > 0.0) => {
                bad(format!("pair-coherent r0 = {r0} must be positive"))
            }
            StateSpec::TwoModeSqueezed { r } if !(r.is_finite() && r >= 0.0) => {
                bad(format!("squeezing r = {r} must be nonnegative"))
            }
            _ => Ok(()),
        }
    }

    /// Compact JSON of the resolved configuration, as embedded in outputs.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn n_max(&self) -> usize {
        if let Some(n) = self.numerics.n_max {
            return n;
        }
        match self.state {
            StateSpec::PairCoherent { .. } => DEFAULT_N_MAX,
            StateSpec::TwoModeSqueezed { r } => two_mode_squeezed_min_n_max(r, 1e-12).max(DEFAULT_N_MAX),
            StateSpec::Vacuum => 0,
        }
    }

    pub fn build_state(&self) -> macrobell_core::Result<SchmidtDiagonalState> {
        let n_max = self.n_max();
        match self.state {
            StateSpec::PairCoherent { r0 } => pair_coherent(r0, n_max),
            StateSpec::TwoModeSqueezed { r } => two_mode_squeezed(r, n_max),
            StateSpec::Vacuum => Ok(SchmidtDiagonalState::vacuum().resized(n_max)),
        }
    }

    /// Configured grid, or the default one widened to cover `state`.
    pub fn grid_for(&self, state: &SchmidtDiagonalState) -> macrobell_core::Result<QuadratureGrid> {
        match self.numerics.grid {
            Some(grid) => Ok(grid),
            None => {
                let default = QuadratureGrid::default();
                QuadratureGrid::covering(state.effective_n_max(1e-18), default.step)
            }
        }
    }
}

fn anchored(origin: &str, err: &serde_json::Error) -> CliError {
    // serde_json appends " at line L column C"; lead with it instead.
    let text = err.to_string();
    let message = text
        .rsplit_once(" at line ")
        .map(|(head, _)| head.to_string())
        .unwrap_or(text);
    CliError::Config(format!("{origin}:{}:{}: {message}", err.line(), err.column()))
}

fn validate_against_schema(value: &Value) -> Result<(), String> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("bundled schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| {
            let at = e.instance_path().to_string();
            let at = if at.is_empty() { "/".to_string() } else { at };
            format!("{at}: {e}")
        })
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(format!("schema violation: {}", errors.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(experiment: &str) -> String {
        format!(r#"{{"experiment": "{experiment}"}}"#)
    }

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_json(&minimal("bell-scan"), "test").unwrap();
        assert_eq!(c, RunConfig::new(Experiment::BellScan));
        assert_eq!(c.n_max(), 60);
        assert_eq!(c.scan.sigma0.points().len(), 51);
    }

    #[test]
    fn full_config_roundtrips_through_schema() {
        for experiment in [
            Experiment::BellScan,
            Experiment::NoiseThreshold,
            Experiment::AngleOpt,
            Experiment::OracleCompare,
            Experiment::EprSweep,
        ] {
            let mut c = RunConfig::new(experiment);
            c.numerics.grid = Some(QuadratureGrid::default());
            c.numerics.n_max = Some(40);
            c.noise.sigma0_b = Some(0.1);
            c.output.path = Some("out.csv".into());
            let json = serde_json::to_string_pretty(&c).unwrap();
            let back = RunConfig::from_json(&json, "test").unwrap();
            assert_eq!(back, c);
        }
        for state in [
            StateSpec::Vacuum,
            StateSpec::TwoModeSqueezed { r: 0.5 },
        ] {
            let mut c = RunConfig::new(Experiment::BellScan);
            c.state = state;
            let back = RunConfig::from_json(&c.canonical_json(), "test").unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn schema_and_serde_agree_on_defaults() {
        // Every top-level property of the schema is a field of the config.
        let schema: Value = serde_json::from_str(SCHEMA).unwrap();
        let props = schema["properties"].as_object().unwrap();
        let config = serde_json::to_value(RunConfig::new(Experiment::BellScan)).unwrap();
        let fields = config.as_object().unwrap();
        let mut a: Vec<_> = props.keys().collect();
        let mut b: Vec<_> = fields.keys().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for section in ["numerics", "noise", "scan", "output", "angles"] {
            let mut a: Vec<_> = props[section]["properties"].as_object().unwrap().keys().collect();
            let mut b: Vec<_> = fields[section].as_object().unwrap().keys().collect();
            a.sort();
            b.sort();
            assert_eq!(a, b, "section {section}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(r#"{"experiment": "bell-scan", "colour": 1}"#, "cfg.json").unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        let err = RunConfig::from_json(
            r#"{"experiment": "bell-scan", "noise": {"sigma": 1}}"#,
            "cfg.json",
        )
        .unwrap_err();
        assert!(err.to_string().contains("/noise"), "{err}");
        let err = RunConfig::from_json(
            r#"{"experiment": "bell-scan", "state": {"kind": "vacuum", "r": 1}}"#,
            "cfg.json",
        )
        .unwrap_err();
        assert!(err.to_string().contains("/state"), "{err}");
    }

    #[test]
    fn malformed_json_is_line_anchored() {
        let text = "{\n  \"experiment\": \"bell-scan\",\n  \"noise\": {\"sigma0\": 0.1,}\n}";
        let err = RunConfig::from_json(text, "cfg.json").unwrap_err();
        assert!(err.to_string().starts_with("cfg.json:3:"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn semantic_checks() {
        let bad = [
            r#"{"experiment": "bell-scan", "numerics": {"grid": {"lo": -8, "hi": 7, "step": 0.01}}}"#,
            r#"{"experiment": "bell-scan", "scan": {"sigma0": {"start": 1, "stop": 0, "step": 0.1}}}"#,
            r#"{"experiment": "bell-scan", "noise": {"sigma0": -1}}"#,
            r#"{"experiment": "warp-drive"}"#,
            r#"{"state": {"kind": "vacuum"}}"#,
        ];
        for text in bad {
            assert!(RunConfig::from_json(text, "t").is_err(), "{text}");
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::new(Experiment::BellScan);
        let mut b = a.clone();
        assert_eq!(a.sha256(), b.sha256());
        b.noise.sigma0 = 0.1;
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }

    #[test]
    fn range_points_hit_the_endpoint() {
        let r = Range {
            start: 0.0,
            stop: 1.0,
            step: 0.1,
        };
        let p = r.points();
        assert_eq!(p.len(), 11);
        assert!((p[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezed_state_gets_room() {
        let mut c = RunConfig::new(Experiment::BellScan);
        c.state = StateSpec::TwoModeSqueezed { r: 1.5 };
        let state = c.build_state().unwrap();
        let grid = c.grid_for(&state).unwrap();
        assert!(grid.hi > 8.0);
        assert!(c.n_max() > 60);
    }
}

//! Run configuration: a JSON file whose sections override the built-in
//! defaults, merged with command-line flags (flags win).
//!
//! Complex numbers are written as `[re, im]` pairs.

use std::fs;
use std::path::{Path, PathBuf};

use lame_ghp::elastic_field::LameMedium;
use lame_ghp::ghp_constraints::{LineScenario, ScanParameter, ScenarioParameters};
use lame_ghp::traces::ImpedanceSeries;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Overrides of the reference medium `λ = 2, μ = 1, κ = 1`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumOverrides {
    /// First Lamé constant.
    pub lambda: Option<f64>,
    /// Shear modulus.
    pub mu: Option<f64>,
    /// Eigenvalue.
    pub kappa: Option<f64>,
}

/// Truncation orders of the expansions and constraint systems.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    /// Highest Fourier order `M`.
    pub m: Option<usize>,
    /// Number of trace powers `N`.
    pub n: Option<usize>,
}

/// Overrides of the generic catalog parameters (`φ₀ = π/3`, `η = 1 + 2i`).
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioOverrides {
    /// Opening angle.
    pub phi0: Option<f64>,
    /// Segment length.
    pub length: Option<f64>,
    /// Constant impedance on both lines.
    pub eta: Option<Complex64>,
    /// Constant impedance on the upper line, applied after `eta`.
    pub eta_upper: Option<Complex64>,
    /// Constant impedance on the lower line, applied after `eta`.
    pub eta_lower: Option<Complex64>,
    /// Start from the non-constant generic impedance series.
    pub series: bool,
}

/// Parameter scan settings.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    /// Catalog label of the scanned row.
    pub family: Option<String>,
    /// Scanned parameter.
    pub parameter: Option<ScanParameter>,
    /// Explicit grid replacing the default one.
    pub grid: Option<Vec<Complex64>>,
}

/// Complex geometrical optics sweep settings.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CgoSettings {
    /// Sector opening angle.
    pub phi0: f64,
    /// Sector radius.
    pub h: f64,
    /// Decay parameters of the identity sweep.
    pub s_grid: Vec<f64>,
    /// Geometric decay grid of the `b₀` fit.
    pub fit_grid: Vec<f64>,
    /// Gauss–Legendre nodes per panel.
    pub quadrature_order: usize,
    /// `b₀` planted into the random field of the fit.
    pub planted_b0: Complex64,
    /// Scale of the remaining random coefficients of the fit field.
    pub background_scale: f64,
}

impl Default for CgoSettings {
    fn default() -> Self {
        Self {
            phi0: std::f64::consts::FRAC_PI_3,
            h: 0.5,
            s_grid: lame_ghp::cgo::DEFAULT_S_GRID.to_vec(),
            fit_grid: vec![20.0, 40.0, 80.0, 160.0],
            quadrature_order: lame_ghp::cgo::DEFAULT_QUADRATURE_ORDER,
            planted_b0: Complex64::new(0.7, 0.0),
            background_scale: 0.3,
        }
    }
}

/// Grating mode table settings.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GratingSettings {
    /// Incidence angles in `(-π/2, π/2)`.
    pub thetas: Vec<f64>,
    /// Modes `-n..=n` are tabulated.
    pub max_index: i32,
    /// Grid points `(x₁, x₂)` of the sampled-field CSV.
    pub field_counts: [usize; 2],
    /// Sampled-field CSV written next to the mode table.
    pub field_output: Option<PathBuf>,
}

impl Default for GratingSettings {
    fn default() -> Self {
        Self {
            thetas: vec![0.0, 0.3, 0.7, -0.5],
            max_index: 8,
            field_counts: [16, 8],
            field_output: None,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario JSON used by `cascade` instead of the catalog row.
    pub scenario_file: Option<PathBuf>,
    /// Medium overrides.
    pub medium: MediumOverrides,
    /// Truncation `(M, N)`.
    pub truncation: Truncation,
    /// Bound of the command's primary check.
    pub tolerance: Option<f64>,
    /// Primary artifact path; standard output when absent.
    pub output: Option<PathBuf>,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
    /// Seed of the randomized sweeps.
    pub seed: Option<u64>,
    /// Random fields per sweep.
    pub samples: Option<usize>,
    /// Catalog parameter overrides.
    pub scenario: ScenarioOverrides,
    /// Scan settings.
    pub scan: ScanSettings,
    /// CGO settings.
    pub cgo: CgoSettings,
    /// Grating settings.
    pub grating: GratingSettings,
    /// Directory relative paths in the file are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Flags that override configuration values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagOverrides {
    /// `--out`.
    pub out: Option<PathBuf>,
    /// `--workers`.
    pub workers: Option<usize>,
    /// `--seed`.
    pub seed: Option<u64>,
    /// `--trunc-m`.
    pub trunc_m: Option<usize>,
    /// `--trunc-n`.
    pub trunc_n: Option<usize>,
    /// `--tol`.
    pub tol: Option<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ReadInput {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::ParseInput {
        path: path.to_path_buf(),
        source,
    })
}

impl RunConfig {
    /// Parses a configuration file; parse errors carry line and column.
    ///
    /// # Errors
    /// [`CliError::ReadInput`] or [`CliError::ParseInput`].
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut config: Self = read_json(path)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    /// Applies command-line flags on top of the file values.
    ///
    /// # Errors
    /// [`CliError::Config`] for zero workers, samples or truncation orders.
    pub fn apply(mut self, flags: &FlagOverrides) -> CliResult<Self> {
        if flags.out.is_some() {
            self.output.clone_from(&flags.out);
        }
        self.workers = flags.workers.or(self.workers);
        self.seed = flags.seed.or(self.seed);
        self.truncation.m = flags.trunc_m.or(self.truncation.m);
        self.truncation.n = flags.trunc_n.or(self.truncation.n);
        self.tolerance = flags.tol.or(self.tolerance);
        for (name, value) in [
            ("workers", self.workers),
            ("samples", self.samples),
            ("truncation.m", self.truncation.m),
            ("truncation.n", self.truncation.n),
        ] {
            if value == Some(0) {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if let Some(tol) = self.tolerance
            && !(tol > 0.0 && tol.is_finite())
        {
            return Err(CliError::Config(format!(
                "tolerance must be positive and finite, got {tol}"
            )));
        }
        Ok(self)
    }

    /// The reference medium with the configured overrides.
    ///
    /// # Errors
    /// [`CliError::Invalid`] when the overrides break strong convexity.
    pub fn medium(&self) -> CliResult<LameMedium> {
        let reference = LameMedium::reference();
        Ok(LameMedium::new(
            self.medium.lambda.unwrap_or(reference.lambda()),
            self.medium.mu.unwrap_or(reference.mu()),
            self.medium.kappa.unwrap_or(reference.kappa()),
        )?)
    }

    /// Configured `M`, or `default`.
    pub fn order(&self, default: usize) -> usize {
        self.truncation.m.unwrap_or(default)
    }

    /// Configured `N`, or `default`.
    pub fn powers(&self, default: usize) -> usize {
        self.truncation.n.unwrap_or(default)
    }

    /// Configured seed, `0` by default.
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Configured sample count, or `default`.
    pub fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    /// Primary check bound of a command: the configured tolerance or
    /// `default`. Commands without a tolerance pass `None` and reject one.
    ///
    /// # Errors
    /// [`CliError::Config`] when a tolerance is given to such a command.
    pub fn tolerance(&self, command: &str, default: Option<f64>) -> CliResult<f64> {
        match (self.tolerance, default) {
            (Some(tol), Some(_)) => Ok(tol),
            (None, Some(default)) => Ok(default),
            (Some(_), None) => Err(CliError::Config(format!(
                "{command} has no tolerance to override"
            ))),
            (None, None) => Ok(0.0),
        }
    }

    /// Resolves a configured path against the configuration directory.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Generic catalog parameters with the configured overrides.
    ///
    /// # Errors
    /// [`CliError::Invalid`] for a zero impedance or a non-positive length.
    pub fn scenario_parameters(&self) -> CliResult<ScenarioParameters> {
        let o = &self.scenario;
        let mut params = if o.series {
            ScenarioParameters::generic_series()
        } else {
            ScenarioParameters::generic()
        };
        if let Some(phi0) = o.phi0 {
            params.phi0 = phi0;
        }
        if let Some(length) = o.length {
            if !(length > 0.0 && length.is_finite()) {
                return Err(CliError::Config(format!(
                    "scenario.length must be positive, got {length}"
                )));
            }
            params.length = length;
        }
        if let Some(eta) = o.eta {
            params = params.with_common_eta(eta)?;
        }
        let radius = params.length.max(1.0);
        if let Some(eta) = o.eta_upper {
            params.eta_upper = ImpedanceSeries::constant(eta, radius)?;
        }
        if let Some(eta) = o.eta_lower {
            params.eta_lower = ImpedanceSeries::constant(eta, radius)?;
        }
        Ok(params)
    }

    /// Scenario loaded from [`RunConfig::scenario_file`], if configured.
    ///
    /// # Errors
    /// [`CliError::ReadInput`] or [`CliError::ParseInput`], the latter also
    /// for scenarios violating the structural invariants.
    pub fn scenario_from_file(&self) -> CliResult<Option<LineScenario>> {
        self.scenario_file
            .as_ref()
            .map(|p| read_json(&self.resolve(p)))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, serde_json::Error> {
        serde_json::from_str(text)
    }

    #[test]
    fn empty_config_uses_defaults() {
        let config = parse("{}").unwrap();
        assert_eq!(config, RunConfig::default());
        assert_eq!(config.medium().unwrap(), LameMedium::reference());
        assert_eq!(config.order(20), 20);
        assert_eq!(config.seed(), 0);
        assert_eq!(config.cgo.s_grid, vec![10.0, 20.0, 40.0, 80.0]);
    }

    #[test]
    fn unknown_fields_report_their_position() {
        let err = parse("{\n  \"medium\": {\"nu\": 0.3}\n}").unwrap_err();
        assert_eq!(err.line(), 2);
        assert!(err.to_string().contains("unknown field `nu`"));
    }

    #[test]
    fn flags_override_the_file() {
        let config = parse(r#"{"seed": 4, "truncation": {"m": 10, "n": 12}, "tolerance": 1e-3}"#)
            .unwrap()
            .apply(&FlagOverrides {
                seed: Some(9),
                trunc_n: Some(30),
                ..FlagOverrides::default()
            })
            .unwrap();
        assert_eq!(config.seed(), 9);
        assert_eq!((config.order(0), config.powers(0)), (10, 30));
        assert_eq!(config.tolerance("x", Some(1.0)).unwrap(), 1e-3);
        assert!(config.tolerance("catalog", None).is_err());
        let zero = FlagOverrides {
            workers: Some(0),
            ..FlagOverrides::default()
        };
        assert!(RunConfig::default().apply(&zero).is_err());
    }

    #[test]
    fn non_convex_medium_is_rejected() {
        let config = parse(r#"{"medium": {"mu": -1}}"#).unwrap();
        let err = config.medium().unwrap_err();
        assert!(err.to_string().contains("convexity"));
        assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG_ERROR);
    }

    #[test]
    fn scenario_overrides() {
        let config =
            parse(r#"{"scenario": {"phi0": 1.0, "eta": [0, -0.5], "eta_lower": [2, 0]}}"#).unwrap();
        let params = config.scenario_parameters().unwrap();
        assert_eq!(params.phi0, 1.0);
        assert_eq!(params.eta_upper.eta0(), Complex64::new(0.0, -0.5));
        assert_eq!(params.eta_lower.eta0(), Complex64::new(2.0, 0.0));
        let zero = parse(r#"{"scenario": {"eta": [0, 0]}}"#).unwrap();
        assert!(zero.scenario_parameters().is_err());
    }
}

//! The scenario catalog: every single singular line and every intersecting
//! pair with an identically-vanishing conclusion, stored as JSON data.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::determinants::{ExceptionalParameters, ExceptionalValue, is_close};
use super::scenario::{LineCondition, LineScenario, PointCondition};
use crate::elastic_field::LameMedium;
use crate::error::{Error, Result};
use crate::traces::{BoundaryConditionKind, ImpedanceSeries, LineSegment, Side};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One segment of a catalog row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogLine {
    /// Side of the sector.
    pub side: Side,
    /// Boundary-condition kind code (`R`, `T`, `I`, `G`, `F`, `H`).
    pub code: char,
}

/// Parameter exclusion attached to a catalog row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Exclusion {
    /// `η ≠ ±i` on `line`.
    PlusMinusI { line: Side },
    /// `η ≠ i` on `line`.
    PlusI { line: Side },
    /// `η ≠ η_root±` on `line`.
    QuadraticRoots { line: Side },
    /// `η ≠ -iμe^{2iφ₀}/(λ + μ(1 + e^{2iφ₀}))` on `line`.
    AngleDependent { line: Side },
    /// `η_upper e^{-iφ₀} + η_lower ≠ 0`.
    ImpedanceLocus,
    /// Both lines carry the same constant impedance part.
    EqualImpedances,
    /// `η ≠ -im/(m+2)` for every `m >= 1` on `line`.
    PairDeterminantRoots { line: Side },
}

impl Exclusion {
    /// Whether the scenario's parameters violate this exclusion.
    pub fn is_violated(&self, medium: &LameMedium, scenario: &LineScenario) -> bool {
        let ex = ExceptionalParameters::new(medium, scenario.phi0());
        let eta = |side: Side| scenario.eta0(side);
        let classified = |side: Side| eta(side).map(|e| ex.classify(e)).unwrap_or_default();
        match *self {
            Self::PlusMinusI { line } => classified(line)
                .iter()
                .any(|c| matches!(c, ExceptionalValue::PlusI | ExceptionalValue::MinusI)),
            Self::PlusI { line } => classified(line).contains(&ExceptionalValue::PlusI),
            Self::QuadraticRoots { line } => classified(line)
                .iter()
                .any(|c| matches!(c, ExceptionalValue::RootPlus | ExceptionalValue::RootMinus)),
            Self::AngleDependent { line } => {
                classified(line).contains(&ExceptionalValue::AngleDependent)
            }
            Self::ImpedanceLocus => match (eta(Side::Upper), eta(Side::Lower)) {
                (Some(up), Some(low)) => ex.on_impedance_locus(up, low),
                _ => false,
            },
            Self::EqualImpedances => match (eta(Side::Upper), eta(Side::Lower)) {
                (Some(up), Some(low)) => !is_close(up, low),
                _ => true,
            },
            Self::PairDeterminantRoots { line } => classified(line)
                .iter()
                .any(|c| matches!(c, ExceptionalValue::PairRoot { .. })),
        }
    }
}

/// One catalog row: scenario structure, hypotheses text and exclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Row label, e.g. `S(H)` or `R+G` (lower kind first).
    pub label: String,
    /// Descriptive title.
    pub title: String,
    /// Segments with their kind codes.
    pub lines: Vec<CatalogLine>,
    /// Point conditions of the row.
    pub point_conditions: Vec<PointCondition>,
    /// Extra hypotheses of the row, as listed.
    pub hypotheses: String,
    /// Machine-checkable parameter exclusions.
    pub exclusions: Vec<Exclusion>,
    /// Conclusion of the row.
    pub conclusion: String,
    /// Remarks on merged or inconsistent rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Parameters used to instantiate a catalog row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParameters {
    /// Intersection angle (or angle of the single upper segment).
    pub phi0: f64,
    /// Impedance on the upper segment, used when its kind needs one.
    pub eta_upper: ImpedanceSeries,
    /// Impedance on the lower segment, used when its kind needs one.
    pub eta_lower: ImpedanceSeries,
    /// Segment length.
    pub length: f64,
}

impl ScenarioParameters {
    /// Generic parameters: `φ₀ = π/3`, constant `η = 1 + 2i` on both lines.
    pub fn generic() -> Self {
        let eta = ImpedanceSeries::constant(Complex64::new(1.0, 2.0), 1.0)
            .expect("valid constant impedance");
        Self {
            phi0: PI / 3.0,
            eta_upper: eta.clone(),
            eta_lower: eta,
            length: 1.0,
        }
    }

    /// Generic parameters with the non-constant impedance
    /// `η(r) = (1 + 2i) + (0.3 - 0.2i)r + 0.1i r²` on both lines.
    pub fn generic_series() -> Self {
        let eta = ImpedanceSeries::new(
            Complex64::new(1.0, 2.0),
            vec![Complex64::new(0.3, -0.2), 0.1 * I],
            1.0,
        )
        .expect("valid impedance series");
        Self {
            eta_upper: eta.clone(),
            eta_lower: eta,
            ..Self::generic()
        }
    }

    /// Same parameters with constant impedance `eta` on both lines.
    ///
    /// # Errors
    /// [`Error::InvalidImpedance`] for `η = 0`.
    pub fn with_common_eta(&self, eta: Complex64) -> Result<Self> {
        let series = ImpedanceSeries::constant(eta, self.length.max(1.0))?;
        Ok(Self {
            eta_upper: series.clone(),
            eta_lower: series,
            ..self.clone()
        })
    }
}

/// Boundary condition for a kind code, taking the impedance where needed.
///
/// # Errors
/// [`Error::InvalidScenario`] for an unknown code.
pub fn kind_for_code(code: char, eta: &ImpedanceSeries) -> Result<BoundaryConditionKind> {
    Ok(match code {
        'R' => BoundaryConditionKind::Rigid,
        'T' => BoundaryConditionKind::TractionFree,
        'G' => BoundaryConditionKind::SoftClamped,
        'F' => BoundaryConditionKind::SimplySupported,
        'I' => BoundaryConditionKind::Impedance { eta: eta.clone() },
        'H' => BoundaryConditionKind::GeneralizedImpedance { eta: eta.clone() },
        other => {
            return Err(Error::InvalidScenario(format!(
                "unknown kind code `{other}`"
            )));
        }
    })
}

impl CatalogEntry {
    /// Scenario for this row instantiated with `params`.
    ///
    /// # Errors
    /// Scenario validation errors, e.g. [`Error::CollinearSegments`].
    pub fn scenario(&self, params: &ScenarioParameters) -> Result<LineScenario> {
        let lines = self
            .lines
            .iter()
            .map(|line| {
                let eta = match line.side {
                    Side::Upper => &params.eta_upper,
                    Side::Lower => &params.eta_lower,
                };
                Ok(LineCondition {
                    segment: LineSegment::on_side(line.side, params.phi0, params.length)?,
                    condition: kind_for_code(line.code, eta)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LineScenario::new(
            self.label.clone(),
            params.phi0,
            lines,
            self.point_conditions.clone(),
        )
    }

    /// Exclusions violated by `scenario` (empty for generic parameters).
    pub fn violated_exclusions(
        &self,
        medium: &LameMedium,
        scenario: &LineScenario,
    ) -> Vec<Exclusion> {
        self.exclusions
            .iter()
            .copied()
            .filter(|e| e.is_violated(medium, scenario))
            .collect()
    }

    /// Whether the row consists of a single singular line.
    pub fn is_singular_line(&self) -> bool {
        self.lines.len() == 1
    }
}

/// All catalog rows in their canonical order.
pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        serde_json::from_str(include_str!("catalog.json")).expect("catalog.json is valid")
    })
}

/// Catalog row with the given label.
///
/// # Errors
/// [`Error::UnknownScenario`] when no row carries `label`.
pub fn lookup(label: &str) -> Result<&'static CatalogEntry> {
    catalog()
        .iter()
        .find(|e| e.label == label)
        .ok_or_else(|| Error::UnknownScenario(label.to_string()))
}

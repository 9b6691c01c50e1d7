//! Line configurations: one or two homogeneous segments with their boundary
//! conditions, the intersection angle and point-value conditions at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traces::{BoundaryConditionKind, ImpedanceSeries, LineSegment, Side};

/// Tolerance used to recognise the collinear angle `φ₀ = π`.
const COLLINEAR_TOL: f64 = 1e-12;

/// Point-value condition imposed at the intersection point (the origin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointCondition {
    /// `u(0) = 0`.
    DisplacementAtOrigin,
    /// `νᵀ∇u(0)ν = 0` for the normal of the upper segment.
    NormalNormalGradient,
    /// `τᵀ∇u(0)ν = 0` for the frame of the upper segment.
    TangentNormalGradient,
    /// `b₀ = b₁ = b₂ = 0`.
    LowShearCoefficients,
}

impl PointCondition {
    /// Number of scalar constraint rows the condition contributes.
    pub fn row_count(self) -> usize {
        match self {
            Self::LowShearCoefficients => 3,
            _ => 1,
        }
    }
}

/// Point conditions that turn a single homogeneous line of the given kind
/// code (`R`, `T`, `I`, `G`, `F`, `H`) into a singular line.
pub fn singular_point_conditions(code: char) -> Option<Vec<PointCondition>> {
    use PointCondition::*;
    Some(match code {
        'R' | 'F' => vec![TangentNormalGradient],
        'T' | 'I' => vec![DisplacementAtOrigin, TangentNormalGradient],
        'G' => vec![NormalNormalGradient],
        'H' => vec![
            NormalNormalGradient,
            TangentNormalGradient,
            LowShearCoefficients,
        ],
        _ => return None,
    })
}

/// A segment together with the homogeneous condition imposed on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCondition {
    /// Geometry of the segment.
    pub segment: LineSegment,
    /// Boundary condition on the segment.
    pub condition: BoundaryConditionKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioRecord {
    label: String,
    phi0: f64,
    lines: Vec<LineCondition>,
    #[serde(default)]
    point_conditions: Vec<PointCondition>,
    #[serde(default)]
    reduced: bool,
}

/// One or two homogeneous lines meeting at the origin, plus point conditions.
///
/// Two-line scenarios pair the lower segment (angle `0`) with the upper
/// segment at `φ₀ ∈ (0, π)`. Single-line scenarios use the upper segment and
/// carry exactly the point conditions making the line singular, unless the
/// scenario is explicitly [`reduced`](LineScenario::reduced).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRecord", into = "ScenarioRecord")]
pub struct LineScenario {
    label: String,
    phi0: f64,
    lines: Vec<LineCondition>,
    point_conditions: Vec<PointCondition>,
    reduced: bool,
}

impl LineScenario {
    /// Validated scenario.
    ///
    /// # Errors
    /// [`Error::CollinearSegments`] for two segments at angle `π`;
    /// [`Error::InvalidScenario`] for any other structural violation.
    pub fn new(
        label: impl Into<String>,
        phi0: f64,
        lines: Vec<LineCondition>,
        point_conditions: Vec<PointCondition>,
    ) -> Result<Self> {
        Self::build(label.into(), phi0, lines, point_conditions, false)
    }

    fn build(
        label: String,
        phi0: f64,
        lines: Vec<LineCondition>,
        mut point_conditions: Vec<PointCondition>,
        reduced: bool,
    ) -> Result<Self> {
        point_conditions.sort();
        point_conditions.dedup();
        let upper = lines.iter().find(|l| l.segment.side() == Side::Upper);
        match lines.len() {
            1 => {
                let line = upper.ok_or_else(|| {
                    Error::InvalidScenario("a single-line scenario uses the upper segment".into())
                })?;
                if !reduced {
                    let required =
                        singular_point_conditions(line.condition.code()).unwrap_or_default();
                    if required != point_conditions {
                        return Err(Error::InvalidScenario(format!(
                            "a singular {} line carries the point conditions {required:?}, got {point_conditions:?}",
                            line.condition.name()
                        )));
                    }
                }
            }
            2 => {
                let lower = lines.iter().any(|l| l.segment.side() == Side::Lower);
                if upper.is_none() || !lower {
                    return Err(Error::InvalidScenario(
                        "a two-line scenario pairs one lower and one upper segment".into(),
                    ));
                }
                if (phi0 - PI).abs() <= COLLINEAR_TOL {
                    return Err(Error::CollinearSegments);
                }
                if !(phi0 > 0.0 && phi0 < PI) {
                    return Err(Error::InvalidScenario(format!(
                        "intersection angle must lie in (0, pi), got {phi0}"
                    )));
                }
            }
            n => {
                return Err(Error::InvalidScenario(format!(
                    "expected one or two lines, got {n}"
                )));
            }
        }
        let upper = upper.expect("checked above");
        if (upper.segment.angle() - phi0).abs() > 1e-14 {
            return Err(Error::InvalidScenario(format!(
                "upper segment angle {} differs from phi0 = {phi0}",
                upper.segment.angle()
            )));
        }
        let mut lines = lines;
        lines.sort_by_key(|l| l.segment.side());
        Ok(Self {
            label,
            phi0,
            lines,
            point_conditions,
            reduced,
        })
    }

    /// Copy of the scenario with the listed point conditions removed; the
    /// result is marked reduced and may no longer describe a singular line.
    pub fn reduced(&self, dropped: &[PointCondition]) -> Self {
        Self {
            label: format!("{} (reduced)", self.label),
            phi0: self.phi0,
            lines: self.lines.clone(),
            point_conditions: self
                .point_conditions
                .iter()
                .copied()
                .filter(|c| !dropped.contains(c))
                .collect(),
            reduced: true,
        }
    }

    /// Scenario label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Intersection angle, or the angle of the single upper segment.
    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Lines ordered lower first.
    pub fn lines(&self) -> &[LineCondition] {
        &self.lines
    }

    /// Line on `side`, if present.
    pub fn line(&self, side: Side) -> Option<&LineCondition> {
        self.lines.iter().find(|l| l.segment.side() == side)
    }

    /// Constant impedance part on `side`, if that line carries an impedance.
    pub fn eta0(&self, side: Side) -> Option<Complex64> {
        self.line(side)
            .and_then(|l| l.condition.impedance())
            .map(ImpedanceSeries::eta0)
    }

    /// Point conditions in canonical order.
    pub fn point_conditions(&self) -> &[PointCondition] {
        &self.point_conditions
    }

    /// Whether point conditions were removed from a singular-line scenario.
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }
}

impl TryFrom<ScenarioRecord> for LineScenario {
    type Error = Error;

    fn try_from(r: ScenarioRecord) -> Result<Self> {
        Self::build(r.label, r.phi0, r.lines, r.point_conditions, r.reduced)
    }
}

impl From<LineScenario> for ScenarioRecord {
    fn from(s: LineScenario) -> Self {
        Self {
            label: s.label,
            phi0: s.phi0,
            lines: s.lines,
            point_conditions: s.point_conditions,
            reduced: s.reduced,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(side: Side, phi0: f64, condition: BoundaryConditionKind) -> LineCondition {
        LineCondition {
            segment: LineSegment::on_side(side, phi0, 1.0).unwrap(),
            condition,
        }
    }

    #[test]
    fn collinear_pair_is_rejected() {
        let lines = vec![
            line(Side::Lower, PI, BoundaryConditionKind::Rigid),
            line(Side::Upper, PI, BoundaryConditionKind::Rigid),
        ];
        assert_eq!(
            LineScenario::new("R+R", PI, lines, vec![]),
            Err(Error::CollinearSegments)
        );
    }

    #[test]
    fn structural_checks() {
        let phi0 = 1.0;
        let two = vec![
            line(Side::Upper, phi0, BoundaryConditionKind::Rigid),
            line(Side::Lower, phi0, BoundaryConditionKind::TractionFree),
        ];
        let s = LineScenario::new("R+T", phi0, two.clone(), vec![]).unwrap();
        assert_eq!(s.lines()[0].segment.side(), Side::Lower);
        assert!(LineScenario::new("x", 0.5, two, vec![]).is_err());
        let both_upper = vec![
            line(Side::Upper, phi0, BoundaryConditionKind::Rigid),
            line(Side::Upper, phi0, BoundaryConditionKind::Rigid),
        ];
        assert!(LineScenario::new("x", phi0, both_upper, vec![]).is_err());
        let wide = vec![
            line(Side::Lower, 4.0, BoundaryConditionKind::Rigid),
            line(Side::Upper, 4.0, BoundaryConditionKind::Rigid),
        ];
        assert!(matches!(
            LineScenario::new("x", 4.0, wide, vec![]),
            Err(Error::InvalidScenario(_))
        ));
        assert!(LineScenario::new("x", phi0, vec![], vec![]).is_err());
    }

    #[test]
    fn singular_lines_need_their_point_conditions() {
        let g = vec![line(Side::Upper, 1.0, BoundaryConditionKind::SoftClamped)];
        assert!(LineScenario::new("S(G)", 1.0, g.clone(), vec![]).is_err());
        let s =
            LineScenario::new("S(G)", 1.0, g, vec![PointCondition::NormalNormalGradient]).unwrap();
        let r = s.reduced(&[PointCondition::NormalNormalGradient]);
        assert!(r.is_reduced() && r.point_conditions().is_empty());
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<LineScenario>(&text).unwrap(), r);
    }

    #[test]
    fn json_round_trip() {
        let eta = ImpedanceSeries::constant(Complex64::new(1.0, 2.0), 1.0).unwrap();
        let s = LineScenario::new(
            "I+I",
            1.0,
            vec![
                line(
                    Side::Lower,
                    1.0,
                    BoundaryConditionKind::Impedance { eta: eta.clone() },
                ),
                line(Side::Upper, 1.0, BoundaryConditionKind::Impedance { eta }),
            ],
            vec![PointCondition::DisplacementAtOrigin],
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains(r#""point_conditions":["displacement_at_origin"]"#));
        assert_eq!(serde_json::from_str::<LineScenario>(&text).unwrap(), s);
        assert_eq!(s.eta0(Side::Lower), Some(Complex64::new(1.0, 2.0)));
    }
}

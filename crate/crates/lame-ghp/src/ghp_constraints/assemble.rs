//! Truncated constraint systems on the stacked coefficients
//! `(a_0..a_M, b_0..b_M)` from power-series matching of traces and point values.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scenario::{LineScenario, PointCondition};
use crate::elastic_field::{FourierCoefficients, LameMedium, point_conditions};
use crate::error::{Error, Result};
use crate::traces::{Side, trace_power_series};

/// Provenance of one constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum RowTag {
    /// Coefficient of `r^power` in component `component` of a line trace.
    Trace {
        side: Side,
        code: char,
        component: usize,
        power: usize,
        /// Whether every coefficient order feeding the row lies within the truncation.
        complete: bool,
    },
    /// A point-value condition; `index` separates the rows of multi-row conditions.
    Point {
        condition: PointCondition,
        index: usize,
    },
}

impl RowTag {
    /// Whether the row is an exact functional of the untruncated expansion.
    pub fn is_complete(&self) -> bool {
        match self {
            Self::Trace { complete, .. } => *complete,
            Self::Point { .. } => true,
        }
    }
}

/// Tagged constraint matrix acting on stacked coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    order: usize,
    powers: usize,
    matrix: DMatrix<Complex64>,
    tags: Vec<RowTag>,
}

impl ConstraintSystem {
    /// Truncation order `M`.
    pub fn truncation_order(&self) -> usize {
        self.order
    }

    /// Number of powers `N` matched on each trace component.
    pub fn powers(&self) -> usize {
        self.powers
    }

    /// The full matrix, one row per tag.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Row provenance.
    pub fn tags(&self) -> &[RowTag] {
        &self.tags
    }

    /// Sub-matrix of the rows satisfying `keep`.
    pub fn select_rows(&self, keep: impl Fn(&RowTag) -> bool) -> DMatrix<Complex64> {
        let rows: Vec<usize> = (0..self.tags.len())
            .filter(|&i| keep(&self.tags[i]))
            .collect();
        self.matrix.select_rows(rows.iter())
    }

    /// Sub-matrix of the complete rows.
    pub fn complete_rows(&self) -> DMatrix<Complex64> {
        self.select_rows(RowTag::is_complete)
    }

    /// Residuals of every row for the given coefficients (zero-padded or
    /// truncated to order `M`).
    pub fn apply(&self, coeffs: &FourierCoefficients) -> Vec<Complex64> {
        let m = self.order;
        let pick = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
        let x: Vec<Complex64> = (0..=m)
            .map(|k| pick(coeffs.a(), k))
            .chain((0..=m).map(|k| pick(coeffs.b(), k)))
            .collect();
        (0..self.matrix.nrows())
            .map(|i| self.matrix.row(i).iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Column index of `a_m` (or `b_m` when `shear`) in the stacked layout.
pub fn column(order: usize, m: usize, shear: bool) -> usize {
    if shear { order + 1 + m } else { m }
}

/// Rows of a point condition, obtained by applying
/// [`point_conditions`] to unit coefficient vectors.
///
/// `u(0)` is a multiple of `(1, i)`, so its first component is the single row;
/// the gradient conditions use their scalar values directly.
///
/// # Errors
/// [`Error::Truncation`] for `order < 2`.
pub fn point_condition_rows(
    medium: &LameMedium,
    condition: PointCondition,
    phi0: f64,
    order: usize,
) -> Result<Vec<Vec<Complex64>>> {
    if order < 2 {
        return Err(Error::Truncation(format!(
            "point conditions need truncation order >= 2, got {order}"
        )));
    }
    let width = 2 * (order + 1);
    if condition == PointCondition::LowShearCoefficients {
        return Ok((0..3)
            .map(|m| {
                let mut row = vec![Complex64::default(); width];
                row[column(order, m, true)] = Complex64::new(1.0, 0.0);
                row
            })
            .collect());
    }
    // Only a₀..a₂ and b₀..b₂ enter the point values.
    let mut row = vec![Complex64::default(); width];
    for shear in [false, true] {
        for m in 0..3 {
            let mut unit = FourierCoefficients::zeros(2);
            let slot = if shear {
                &mut unit.b_mut()[m]
            } else {
                &mut unit.a_mut()[m]
            };
            *slot = Complex64::new(1.0, 0.0);
            let values = point_conditions(medium, &unit, phi0)?;
            row[column(order, m, shear)] = match condition {
                PointCondition::DisplacementAtOrigin => values.u_at_origin[0],
                PointCondition::NormalNormalGradient => values.nu_grad_nu,
                PointCondition::TangentNormalGradient => values.tau_grad_nu,
                PointCondition::LowShearCoefficients => unreachable!("handled above"),
            };
        }
    }
    Ok(vec![row])
}

/// Constraint system of `scenario` at truncation order `M = order` with
/// powers `r^0..r^{N-1}`, `N = powers`, on every trace component of every line,
/// followed by the point-condition rows.
///
/// # Errors
/// [`Error::Truncation`] unless `N <= 2M`, or when point conditions need `M >= 2`.
pub fn assemble(
    scenario: &LineScenario,
    medium: &LameMedium,
    order: usize,
    powers: usize,
) -> Result<ConstraintSystem> {
    if powers > 2 * order {
        return Err(Error::Truncation(format!(
            "N = {powers} exceeds 2M = {}",
            2 * order
        )));
    }
    let width = 2 * (order + 1);
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut tags = Vec::new();
    for line in scenario.lines() {
        let series = trace_power_series(medium, &line.segment, &line.condition, order, powers)?;
        for component in 0..2 {
            for power in 0..powers {
                rows.push(series.row(component, power).to_vec());
                tags.push(RowTag::Trace {
                    side: line.segment.side(),
                    code: line.condition.code(),
                    component,
                    power,
                    complete: series.is_complete(component, power),
                });
            }
        }
    }
    for &condition in scenario.point_conditions() {
        for (index, row) in point_condition_rows(medium, condition, scenario.phi0(), order)?
            .into_iter()
            .enumerate()
        {
            rows.push(row);
            tags.push(RowTag::Point { condition, index });
        }
    }
    let matrix = DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    Ok(ConstraintSystem {
        order,
        powers,
        matrix,
        tags,
    })
}

//! Numerical certificate of the vanishing conclusion: the forced-zero prefix
//! of the nullspace of the complete constraint rows.

use serde::{Deserialize, Serialize};

use super::assemble::{ConstraintSystem, assemble, column};
use super::scenario::LineScenario;
use crate::elastic_field::LameMedium;
use crate::error::Result;
use crate::linalg;

/// Coefficient orders at the top of the truncation excluded from the prefix claim.
pub const GUARD_BAND: usize = 3;

/// Default rank tolerance relative to the largest singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Singular values within this factor of the rank threshold make the rank
/// decision ambiguous and mark the report ill-conditioned.
const AMBIGUITY_FACTOR: f64 = 1e2;

/// Number of smallest relative singular values listed in a report.
const REPORTED_VALUES: usize = 6;

/// Result of [`cascade_verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    /// Scenario label.
    pub label: String,
    /// Truncation order `M`.
    pub truncation_order: usize,
    /// Powers `N` per trace component.
    pub powers: usize,
    /// Rank tolerance relative to `σ_max`.
    pub rank_tol: f64,
    /// Complete rows entering the SVD (after dropping zero rows).
    pub rows_used: usize,
    /// Numerical rank.
    pub rank: usize,
    /// Dimension of the numerical nullspace.
    pub nullspace_dim: usize,
    /// Largest `P` with `a_m = b_m = 0` on the nullspace for all `m < P`.
    pub forced_zero_prefix: usize,
    /// Orders covered by the claim, `M - 3`.
    pub guarded_orders: usize,
    /// Whether every guarded order is forced to vanish.
    pub all_guarded_forced: bool,
    /// Smallest singular values relative to `σ_max`, ascending.
    pub smallest_singular_values: Vec<f64>,
    /// Smallest retained singular value divided by the largest discarded one.
    pub rank_gap: f64,
    /// Whether some singular value lies within a factor 100 of the threshold.
    pub ill_conditioned: bool,
}

/// Forced-zero prefix of `scenario` at truncation `(M, N)`.
///
/// Only complete rows are used, so every row is an exact functional of the
/// untruncated expansion. Rows are scaled to unit norm and columns equilibrated
/// before the SVD; the equilibration is diagonal and preserves which
/// coefficients vanish on the nullspace.
///
/// # Errors
/// Assembly errors and [`crate::Error::Numeric`] when the SVD fails.
pub fn cascade_verify(
    scenario: &LineScenario,
    medium: &LameMedium,
    order: usize,
    powers: usize,
    rank_tol: f64,
) -> Result<CascadeReport> {
    let system = assemble(scenario, medium, order, powers)?;
    cascade_from_system(scenario.label(), &system, rank_tol)
}

/// [`cascade_verify`] on an already assembled system.
///
/// # Errors
/// [`crate::Error::Numeric`] when the SVD fails.
pub fn cascade_from_system(
    label: &str,
    system: &ConstraintSystem,
    rank_tol: f64,
) -> Result<CascadeReport> {
    let order = system.truncation_order();
    let (matrix, _) = linalg::equilibrate(&system.complete_rows());
    let spectrum = linalg::spectrum(&matrix)?;
    let smax = spectrum.max();
    let rank = spectrum.rank(rank_tol);
    let null = spectrum.nullspace(rank_tol);
    let guarded = order.saturating_sub(GUARD_BAND);
    let forced = |m: usize| {
        null.ncols() == 0
            || (null.row(column(order, m, false)).norm() < rank_tol
                && null.row(column(order, m, true)).norm() < rank_tol)
    };
    let forced_zero_prefix = (0..guarded).take_while(|&m| forced(m)).count();
    let relative: Vec<f64> = spectrum
        .values
        .iter()
        .map(|s| if smax > 0.0 { s / smax } else { 0.0 })
        .collect();
    let mut smallest: Vec<f64> = relative
        .iter()
        .rev()
        .take(REPORTED_VALUES)
        .copied()
        .collect();
    smallest.sort_by(f64::total_cmp);
    let kept_min = if rank > 0 { relative[rank - 1] } else { 0.0 };
    let dropped_max = relative.get(rank).copied().unwrap_or(0.0);
    let rank_gap = if dropped_max > 0.0 {
        kept_min / dropped_max
    } else {
        f64::INFINITY
    };
    let ill_conditioned = relative
        .iter()
        .any(|&s| s > rank_tol / AMBIGUITY_FACTOR && s < rank_tol * AMBIGUITY_FACTOR);
    Ok(CascadeReport {
        label: label.to_string(),
        truncation_order: order,
        powers: system.powers(),
        rank_tol,
        rows_used: matrix.nrows(),
        rank,
        nullspace_dim: null.ncols(),
        forced_zero_prefix,
        guarded_orders: guarded,
        all_guarded_forced: forced_zero_prefix == guarded,
        smallest_singular_values: smallest,
        rank_gap,
        ill_conditioned,
    })
}

#[cfg(test)]
mod tests {
    use super::super::catalog::{ScenarioParameters, catalog, lookup};
    use super::super::scenario::PointCondition;
    use super::*;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn generic(label: &str) -> LineScenario {
        lookup(label)
            .unwrap()
            .scenario(&ScenarioParameters::generic())
            .unwrap()
    }

    #[test]
    fn rigid_soft_clamped_full_prefix() {
        let params = ScenarioParameters {
            phi0: PI / 3.0,
            ..ScenarioParameters::generic()
        };
        let s = lookup("R+G").unwrap().scenario(&params).unwrap();
        let r = cascade_verify(&s, &LameMedium::reference(), 20, 24, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.forced_zero_prefix, 17);
        assert!(r.all_guarded_forced);
        assert!(!r.ill_conditioned, "{r:?}");
    }

    #[test]
    fn every_catalog_row_is_forced_at_desk_scale() {
        let medium = LameMedium::reference();
        for row in catalog() {
            let s = row.scenario(&ScenarioParameters::generic()).unwrap();
            let r = cascade_verify(&s, &medium, 12, 16, DEFAULT_RANK_TOL).unwrap();
            assert_eq!(r.forced_zero_prefix, 9, "{}: {r:?}", row.label);
        }
    }

    #[test]
    fn soft_clamped_line_without_its_point_condition_is_not_unique() {
        let s = generic("S(G)").reduced(&[PointCondition::NormalNormalGradient]);
        let system = assemble(&s, &LameMedium::reference(), 20, 24).unwrap();
        let r = cascade_from_system(s.label(), &system, DEFAULT_RANK_TOL).unwrap();
        assert!(r.nullspace_dim > 0);
        assert_eq!(r.forced_zero_prefix, 0);
        let full = cascade_verify(
            &generic("S(G)"),
            &LameMedium::reference(),
            20,
            24,
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(full.forced_zero_prefix, 17);
    }

    #[test]
    fn prefix_is_monotone_in_powers() {
        let medium = LameMedium::reference();
        for label in ["R+R", "S(H)", "I+I", "H+F"] {
            let s = generic(label);
            let mut previous = 0;
            for powers in 2..=28 {
                let p = cascade_verify(&s, &medium, 14, powers, DEFAULT_RANK_TOL)
                    .unwrap()
                    .forced_zero_prefix;
                assert!(
                    p >= previous,
                    "{label}: N = {powers} gives {p} < {previous}"
                );
                previous = p;
            }
            assert_eq!(previous, 11);
        }
    }

    #[test]
    fn report_is_invariant_under_row_rescaling() {
        let medium = LameMedium::reference();
        let s = generic("T+H");
        let system = assemble(&s, &medium, 16, 20).unwrap();
        let base = cascade_from_system("T+H", &system, DEFAULT_RANK_TOL).unwrap();
        let complete = system.complete_rows();
        let scaled = DMatrix::from_fn(complete.nrows(), complete.ncols(), |i, j| {
            complete[(i, j)] * Complex64::from_polar(10f64.powi((i % 9) as i32 - 4), i as f64)
        });
        let (a, _) = linalg::equilibrate(&complete);
        let (b, _) = linalg::equilibrate(&scaled);
        let sa = linalg::spectrum(&a).unwrap();
        let sb = linalg::spectrum(&b).unwrap();
        assert_eq!(sa.rank(DEFAULT_RANK_TOL), sb.rank(DEFAULT_RANK_TOL));
        assert_eq!(sa.rank(DEFAULT_RANK_TOL), base.rank);
        for (x, y) in sa.values.iter().zip(&sb.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_system_forces_nothing() {
        let s = generic("R+R");
        let r = cascade_verify(&s, &LameMedium::reference(), 0, 0, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rows_used, 0);
        assert_eq!(r.forced_zero_prefix, 0);
        assert_eq!(r.guarded_orders, 0);
    }
}

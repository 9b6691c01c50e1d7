//! Parameter scans of the constraint-system conditioning, with dip detection
//! and classification of dips against the catalogued exceptional values.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::assemble;
use super::cascade::DEFAULT_RANK_TOL;
use super::catalog::{ScenarioParameters, lookup};
use super::determinants::{ExceptionalParameters, ExceptionalValue, pair_root};
use crate::elastic_field::LameMedium;
use crate::error::{Error, Result};
use crate::linalg;
use crate::traces::ImpedanceSeries;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A scan value below this fraction of the median is a dip.
pub const DIP_FACTOR: f64 = 1e-6;

/// Samples on the unit circle in the default impedance grids.
const CIRCLE_SAMPLES: usize = 72;

/// Interior samples of `(0, π)` in the default angle grid.
const ANGLE_SAMPLES: usize = 63;

/// Pair-determinant roots `-im/(m+2)` added to the default common-impedance grid.
const PAIR_ROOT_SAMPLES: u32 = 6;

/// Pair-determinant roots considered when attributing a dip.
const PAIR_ROOT_CANDIDATES: u32 = 64;

/// Distance in parameter space within which a dip is attributed to an
/// exceptional value. The metric vanishes to high order at the exceptional
/// values, so grid points within about one default grid spacing (`2π/72`)
/// still dip.
pub const ATTRIBUTION_RADIUS: f64 = 0.1;

/// Which parameter a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    /// Constant impedance on the upper line.
    UpperEta,
    /// Constant impedance on the lower line.
    LowerEta,
    /// Common constant impedance on both lines.
    CommonEta,
    /// Opening angle `φ₀` (real part of the grid value).
    Angle,
}

/// A catalog row together with the scanned parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFamily {
    /// Catalog label.
    pub label: String,
    /// Scanned parameter.
    pub parameter: ScanParameter,
}

impl ScanFamily {
    /// Family scanning `parameter` of catalog row `label`.
    ///
    /// # Errors
    /// [`Error::UnknownScenario`] for labels outside the catalog.
    pub fn new(label: &str, parameter: ScanParameter) -> Result<Self> {
        lookup(label)?;
        Ok(Self {
            label: label.to_string(),
            parameter,
        })
    }

    /// Singular generalized-impedance line, scanning its impedance.
    pub fn singular_generalized_impedance() -> Self {
        Self::known("S(H)", ScanParameter::UpperEta)
    }

    /// Rigid and soft-clamped pair, scanning the opening angle.
    pub fn rigid_soft_clamped_angle() -> Self {
        Self::known("R+G", ScanParameter::Angle)
    }

    /// Impedance pair, scanning the lower impedance.
    pub fn impedance_pair() -> Self {
        Self::known("I+I", ScanParameter::LowerEta)
    }

    /// Rigid and generalized-impedance pair, scanning the upper impedance.
    pub fn rigid_generalized_impedance() -> Self {
        Self::known("R+H", ScanParameter::UpperEta)
    }

    /// Generalized-impedance pair, scanning the common impedance.
    pub fn generalized_impedance_pair() -> Self {
        Self::known("H+H", ScanParameter::CommonEta)
    }

    fn known(label: &str, parameter: ScanParameter) -> Self {
        Self {
            label: label.to_string(),
            parameter,
        }
    }

    /// Parameters with the scanned value substituted into `base`.
    ///
    /// # Errors
    /// [`Error::InvalidImpedance`] for a zero impedance.
    pub fn parameters_at(
        &self,
        base: &ScenarioParameters,
        value: Complex64,
    ) -> Result<ScenarioParameters> {
        let constant = |eta| ImpedanceSeries::constant(eta, base.length.max(1.0));
        let mut params = base.clone();
        match self.parameter {
            ScanParameter::UpperEta => params.eta_upper = constant(value)?,
            ScanParameter::LowerEta => params.eta_lower = constant(value)?,
            ScanParameter::CommonEta => return base.with_common_eta(value),
            ScanParameter::Angle => params.phi0 = value.re,
        }
        Ok(params)
    }

    /// Exceptional classes of the scanned parameter value at `params`.
    pub fn classify(
        &self,
        medium: &LameMedium,
        params: &ScenarioParameters,
    ) -> Vec<ExceptionalValue> {
        let ex = ExceptionalParameters::new(medium, params.phi0);
        let (upper, lower) = (params.eta_upper.eta0(), params.eta_lower.eta0());
        let mut classes = match self.parameter {
            ScanParameter::UpperEta | ScanParameter::CommonEta => ex.classify(upper),
            ScanParameter::LowerEta => ex.classify(lower),
            ScanParameter::Angle => Vec::new(),
        };
        if self.label == "I+I" && ex.on_impedance_locus(upper, lower) {
            classes.push(ExceptionalValue::ImpedanceLocus);
        }
        classes
    }

    /// Exceptional values in the scanned parameter's coordinates at `params`.
    pub fn exceptional_points(
        &self,
        medium: &LameMedium,
        params: &ScenarioParameters,
    ) -> Vec<(ExceptionalValue, Complex64)> {
        if self.parameter == ScanParameter::Angle {
            return Vec::new();
        }
        let ex = ExceptionalParameters::new(medium, params.phi0);
        let mut points = vec![
            (ExceptionalValue::PlusI, I),
            (ExceptionalValue::MinusI, -I),
            (ExceptionalValue::RootPlus, ex.root_plus),
            (ExceptionalValue::RootMinus, ex.root_minus),
            (ExceptionalValue::AngleDependent, ex.angle_dependent),
        ];
        points.extend(
            (1..=PAIR_ROOT_CANDIDATES).map(|m| (ExceptionalValue::PairRoot { m }, pair_root(m))),
        );
        if self.label == "I+I" && self.parameter == ScanParameter::LowerEta {
            let locus = -params.eta_upper.eta0() * Complex64::from_polar(1.0, -params.phi0);
            points.push((ExceptionalValue::ImpedanceLocus, locus));
        }
        points
    }

    /// Default grid: unit-circle samples plus every exceptional value of the
    /// scanned parameter, or interior angles `kπ/64` for angle scans.
    pub fn default_grid(&self, medium: &LameMedium, base: &ScenarioParameters) -> Vec<Complex64> {
        if self.parameter == ScanParameter::Angle {
            let step = PI / (ANGLE_SAMPLES + 1) as f64;
            return (1..=ANGLE_SAMPLES)
                .map(|k| Complex64::new(k as f64 * step, 0.0))
                .collect();
        }
        let ex = ExceptionalParameters::new(medium, base.phi0);
        let mut grid: Vec<Complex64> = (0..CIRCLE_SAMPLES)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64))
            .collect();
        grid.extend([I, -I, ex.root_plus, ex.root_minus, ex.angle_dependent]);
        grid.extend((1..=PAIR_ROOT_SAMPLES).map(pair_root));
        if self.parameter == ScanParameter::LowerEta {
            let upper = base.eta_upper.eta0();
            grid.push(-upper * Complex64::from_polar(1.0, -base.phi0));
        }
        grid
    }
}

/// One scanned value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// Parameter value (angles are real).
    pub param: Complex64,
    /// Conditioning metric, see [`exceptional_scan`].
    pub sigma_min: f64,
}

/// A grid point whose metric falls below [`DIP_FACTOR`] times the median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    /// Grid index.
    pub index: usize,
    /// Parameter value.
    pub param: Complex64,
    /// Metric divided by the median.
    pub ratio: f64,
    /// Exceptional classes the parameter value falls into exactly.
    pub classes: Vec<ExceptionalValue>,
    /// Closest exceptional value and its distance, if any exists.
    pub nearest: Option<NearestExceptional>,
}

impl Dip {
    /// Whether the dip sits at, or within [`ATTRIBUTION_RADIUS`] of, an
    /// exceptional value.
    pub fn is_explained(&self) -> bool {
        !self.classes.is_empty()
            || self
                .nearest
                .as_ref()
                .is_some_and(|n| n.distance <= ATTRIBUTION_RADIUS)
    }
}

/// Closest catalogued exceptional value to a dip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestExceptional {
    /// Its class.
    pub class: ExceptionalValue,
    /// Its location.
    pub value: Complex64,
    /// Distance from the dip parameter.
    pub distance: f64,
}

/// Scan result in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    /// Scanned family.
    pub family: ScanFamily,
    /// Truncation order `M`.
    pub truncation_order: usize,
    /// Powers `N`.
    pub powers: usize,
    /// Nullspace dimension at the base parameters, skipped by the metric.
    pub reference_nullity: usize,
    /// One entry per grid value.
    pub points: Vec<ScanPoint>,
    /// Median metric.
    pub median: f64,
    /// Detected dips.
    pub dips: Vec<Dip>,
}

impl ScanTable {
    /// Dips not attributable to any catalogued exceptional value.
    pub fn unexplained_dips(&self) -> Vec<&Dip> {
        self.dips.iter().filter(|d| !d.is_explained()).collect()
    }
}

/// Relative singular values, ascending, of the equilibrated complete rows.
fn complete_row_spectrum(
    family: &ScanFamily,
    medium: &LameMedium,
    params: &ScenarioParameters,
    order: usize,
    powers: usize,
) -> Result<Vec<f64>> {
    let scenario = lookup(&family.label)?.scenario(params)?;
    let system = assemble(&scenario, medium, order, powers)?;
    let (matrix, _) = linalg::equilibrate(&system.complete_rows());
    let mut values = linalg::singular_values(&matrix)?;
    let max = values.first().copied().unwrap_or(0.0);
    if max > 0.0 {
        for v in &mut values {
            *v /= max;
        }
    }
    values.reverse();
    Ok(values)
}

/// Conditioning of `family` over `grid`.
///
/// The truncated complete rows always leave the top orders free, so the
/// metric skips the `d` smallest singular values, `d` being the nullspace
/// dimension at the base parameters, and reports the next one relative to
/// `σ_max`. A parameter at which the infinite system loses uniqueness shows
/// up as a drop of this value. Grid points are evaluated in parallel and
/// returned in grid order.
///
/// # Errors
/// [`Error::InvalidGeometry`] or [`Error::InvalidImpedance`] for grid values
/// that do not form a valid scenario; [`Error::Precondition`] for an empty
/// grid or a base nullspace covering every column.
pub fn exceptional_scan(
    medium: &LameMedium,
    family: &ScanFamily,
    base: &ScenarioParameters,
    grid: &[Complex64],
    order: usize,
    powers: usize,
) -> Result<ScanTable> {
    if grid.is_empty() {
        return Err(Error::Precondition("scan grid is empty".into()));
    }
    let reference = complete_row_spectrum(family, medium, base, order, powers)?;
    let reference_nullity = reference
        .iter()
        .take_while(|&&s| s <= DEFAULT_RANK_TOL)
        .count();
    if reference_nullity >= reference.len() {
        return Err(Error::Precondition(format!(
            "{} has no constrained direction at the base parameters",
            family.label
        )));
    }
    let points = grid
        .par_iter()
        .map(|&param| {
            let params = family.parameters_at(base, param)?;
            let values = complete_row_spectrum(family, medium, &params, order, powers)?;
            Ok(ScanPoint {
                param,
                sigma_min: values[reference_nullity],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<f64> = points.iter().map(|p| p.sigma_min).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let dips = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.sigma_min < DIP_FACTOR * median)
        .map(|(index, p)| {
            let params = family.parameters_at(base, p.param)?;
            let nearest = family
                .exceptional_points(medium, &params)
                .into_iter()
                .map(|(class, value)| NearestExceptional {
                    class,
                    value,
                    distance: (value - p.param).norm(),
                })
                .min_by(|x, y| x.distance.total_cmp(&y.distance));
            Ok(Dip {
                index,
                param: p.param,
                ratio: p.sigma_min / median,
                classes: family.classify(medium, &params),
                nearest,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        family: family.clone(),
        truncation_order: order,
        powers,
        reference_nullity,
        points,
        median,
        dips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(family: ScanFamily) -> ScanTable {
        let medium = LameMedium::reference();
        let base = ScenarioParameters::generic();
        let grid = family.default_grid(&medium, &base);
        exceptional_scan(&medium, &family, &base, &grid, 20, 24).unwrap()
    }

    fn metric_at(family: &ScanFamily, eta: Complex64) -> f64 {
        let medium = LameMedium::reference();
        let t = exceptional_scan(
            &medium,
            family,
            &ScenarioParameters::generic(),
            &[eta],
            20,
            24,
        )
        .unwrap();
        t.points[0].sigma_min
    }

    #[test]
    fn singular_generalized_impedance_dips_only_at_quadratic_roots() {
        let t = run(ScanFamily::singular_generalized_impedance());
        assert_eq!(t.reference_nullity, 2);
        assert!(
            t.unexplained_dips().is_empty(),
            "{:?}",
            t.unexplained_dips()
        );
        let exact: Vec<_> = t.dips.iter().flat_map(|d| d.classes.clone()).collect();
        assert!(exact.contains(&ExceptionalValue::RootPlus));
        assert!(exact.contains(&ExceptionalValue::RootMinus));
        for d in &t.dips {
            let nearest = d.nearest.as_ref().unwrap();
            assert!(matches!(
                nearest.class,
                ExceptionalValue::RootPlus | ExceptionalValue::RootMinus
            ));
        }
        // The truncated system stays well conditioned at η = ±i.
        for eta in [I, -I] {
            let p = t.points.iter().find(|p| p.param == eta).unwrap();
            assert!(p.sigma_min > DIP_FACTOR * t.median);
        }
    }

    #[test]
    fn metric_decays_towards_the_quadratic_root() {
        let family = ScanFamily::singular_generalized_impedance();
        let root = ExceptionalParameters::new(&LameMedium::reference(), PI / 3.0).root_plus;
        let values: Vec<f64> = [0.16, 0.08, 0.04, 0.02]
            .iter()
            .map(|&d| metric_at(&family, root * Complex64::from_polar(1.0, d)))
            .collect();
        for pair in values.windows(2) {
            assert!(pair[1] < pair[0] / 8.0, "{values:?}");
        }
        assert!(metric_at(&family, root) < 1e-12 * values[0]);
    }

    #[test]
    fn rigid_soft_clamped_has_no_dips_in_the_open_angle_range() {
        let t = run(ScanFamily::rigid_soft_clamped_angle());
        assert_eq!(t.points.len(), 63);
        assert!(t.dips.is_empty(), "{:?}", t.dips);
    }

    #[test]
    fn pair_scans_have_no_unexplained_dips() {
        for family in [
            ScanFamily::impedance_pair(),
            ScanFamily::rigid_generalized_impedance(),
            ScanFamily::generalized_impedance_pair(),
        ] {
            let t = run(family);
            assert!(
                t.unexplained_dips().is_empty(),
                "{}: {:?}",
                t.family.label,
                t.dips
            );
        }
    }

    #[test]
    fn results_follow_grid_order() {
        let medium = LameMedium::reference();
        let family = ScanFamily::rigid_generalized_impedance();
        let base = ScenarioParameters::generic();
        let grid = family.default_grid(&medium, &base);
        let forward = exceptional_scan(&medium, &family, &base, &grid, 12, 16).unwrap();
        let reversed: Vec<_> = grid.iter().rev().copied().collect();
        let backward = exceptional_scan(&medium, &family, &base, &reversed, 12, 16).unwrap();
        let mut points = backward.points.clone();
        points.reverse();
        assert_eq!(points, forward.points);
    }

    #[test]
    fn invalid_grids_are_rejected() {
        let medium = LameMedium::reference();
        let base = ScenarioParameters::generic();
        let eta = ScanFamily::singular_generalized_impedance();
        assert!(matches!(
            exceptional_scan(&medium, &eta, &base, &[], 12, 16),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            exceptional_scan(&medium, &eta, &base, &[Complex64::default()], 12, 16),
            Err(Error::InvalidImpedance(_))
        ));
        let angle = ScanFamily::rigid_soft_clamped_angle();
        assert_eq!(
            exceptional_scan(&medium, &angle, &base, &[Complex64::new(PI, 0.0)], 12, 16),
            Err(Error::CollinearSegments)
        );
        assert!(matches!(
            ScanFamily::new("Q+Q", ScanParameter::Angle),
            Err(Error::UnknownScenario(_))
        ));
    }
}

//! Elastic scattering layer: incident plane waves and their Helmholtz split,
//! grating Rayleigh modes, polygonal obstacle and grating records, far-field
//! measurement data, and the critical opening angle `φ_root`.

pub mod grating;
pub mod incident;
pub mod measurements;
pub mod obstacle;

pub use grating::{
    EVANESCENT_CUTOFF, IndependenceReport, MAX_MODE_INDEX, RayleighCoefficient,
    RayleighCoefficients, RayleighEvaluation, RayleighMode, SampleGrid, Wavevectors,
    exponential_independence_check, grating_wavevectors, quasiperiodicity, rayleigh_field,
    rayleigh_mode,
};
pub use incident::{
    HelmholtzParts, IncidentWave, evaluate_incident, helmholtz_split, jacobi_anger_coefficients,
};
pub use measurements::{
    FarFieldDataset, FarFieldPattern, FarFieldSample, MeasurementCatalog, ObstacleMeasurementCount,
    UniquenessSetting, incident_directions_for, measurement_catalog,
};
pub use obstacle::{
    AdmissibilityViolation, ConditionFamily, ConditionPiece, CornerImpedancePair, ImpedanceValue,
    ObstacleEdge, ObstaclePolygon, PieceLocation, PolygonalGrating, PolygonalObstacle,
};

use std::f64::consts::PI;

/// Bisection stops once the bracket is narrower than this.
const ROOT_TOL: f64 = 1e-15;

/// `g(φ) = (4/3) φ / cos⁶(φ/2) - 1`, strictly increasing on `(0, π)`.
pub fn phi_root_function(phi: f64) -> f64 {
    4.0 / 3.0 * phi / (0.5 * phi).cos().powi(6) - 1.0
}

/// The unique root of [`phi_root_function`] in `(0, π)` by bisection.
pub fn phi_root() -> f64 {
    let (mut lo, mut hi) = (0.0, PI);
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if phi_root_function(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

//! Properties that tie several modules together: Fourier–Bessel fields feed
//! the Helmholtz split, boundary traces and the CGO identity, and cataloged
//! corner scenarios survive a serialisation round trip unchanged.

use std::f64::consts::{FRAC_PI_3, PI};

use lame_ghp::cgo::{SectorGeometry, cgo_identity_check};
use lame_ghp::elastic_field::{FourierCoefficients, LameMedium, evaluate_field_cartesian};
use lame_ghp::ghp_constraints::cascade::DEFAULT_RANK_TOL;
use lame_ghp::ghp_constraints::{LineScenario, ScenarioParameters, cascade_verify, catalog};
use lame_ghp::scattering::{
    IncidentWave, evaluate_incident, helmholtz_split, jacobi_anger_coefficients,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn coefficients(order: usize) -> impl Strategy<Value = FourierCoefficients> {
    let entry = (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im));
    (
        prop::collection::vec(entry.clone(), order + 1),
        prop::collection::vec(entry, order + 1),
    )
        .prop_map(|(a, b)| FourierCoefficients::new(a, b).unwrap())
}

fn medium() -> impl Strategy<Value = LameMedium> {
    (0.2..4.0f64, 0.2..2.0f64, 0.3..3.0f64)
        .prop_map(|(lambda, mu, kappa)| LameMedium::new(lambda, mu, kappa).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn helmholtz_parts_recombine_to_fourier_bessel_field(
        medium in medium(),
        coeffs in coefficients(8),
        r in 0.3..2.0f64,
        phi in -PI..PI,
    ) {
        let x = [r * phi.cos(), r * phi.sin()];
        let field = |y: [f64; 2]| evaluate_field_cartesian(&medium, &coeffs, y);
        let parts = helmholtz_split(&medium, field, x).unwrap();
        let direct = field(x).unwrap();
        let scale = 1.0 + direct.norm();
        prop_assert!((parts.pressure + parts.shear - direct).norm() / scale < 1e-5);
    }

    #[test]
    fn projected_plane_wave_is_a_lame_field(
        medium in medium(),
        angle in -PI..PI,
        r in 0.2..1.5f64,
        phi in -PI..PI,
    ) {
        let wave = IncidentWave::from_angle(
            medium,
            angle,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.5),
        )
        .unwrap();
        let projected = jacobi_anger_coefficients(&wave, 16).unwrap();
        let x = [r * phi.cos(), r * phi.sin()];
        let field = |y: [f64; 2]| evaluate_field_cartesian(&medium, &projected, y);
        let parts = helmholtz_split(&medium, field, x).unwrap();
        prop_assert!((parts.pressure + parts.shear - field(x).unwrap()).norm() < 1e-5);
        prop_assert!(evaluate_incident(&wave, x).norm().is_finite());
    }

    #[test]
    fn identity_residual_is_small_for_random_fields(coeffs in coefficients(6), s in 10.0..60.0f64) {
        let medium = LameMedium::reference();
        let geometry = SectorGeometry::new(FRAC_PI_3, 0.5).unwrap();
        let terms = cgo_identity_check(&medium, &coeffs, &geometry, &[s], 64).unwrap();
        prop_assert!(terms[0].converged);
        prop_assert!(terms[0].residual < 1e-8);
    }
}

#[test]
fn cataloged_scenarios_round_trip_and_keep_their_cascade() {
    let medium = LameMedium::reference();
    let params = ScenarioParameters::generic();
    for entry in catalog() {
        let scenario = entry.scenario(&params).unwrap();
        let text = serde_json::to_string(&scenario).unwrap();
        let restored: LineScenario = serde_json::from_str(&text).unwrap();
        assert_eq!(restored, scenario, "{}", entry.label);
        let before = cascade_verify(&scenario, &medium, 12, 16, DEFAULT_RANK_TOL).unwrap();
        let after = cascade_verify(&restored, &medium, 12, 16, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(before.forced_zero_prefix, after.forced_zero_prefix);
        assert_eq!(before.forced_zero_prefix, 9, "{}", entry.label);
    }
}

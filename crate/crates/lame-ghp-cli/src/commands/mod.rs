//! Subcommand implementations. Each returns an [`Outcome`](crate::output::Outcome)
//! whose artifacts depend only on the configuration and seed: random draws
//! happen sequentially before any parallel work, and parallel results are
//! collected in grid order.

pub mod cascade;
pub mod catalog;
pub mod cgo;
pub mod grating;
pub mod phi_root;
pub mod scan;
pub mod verify;

use lame_ghp::elastic_field::FourierCoefficients;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// Coefficients `a_m, b_m` with real and imaginary parts uniform in
/// `[-scale, scale)`.
pub fn random_coefficients(rng: &mut impl Rng, order: usize, scale: f64) -> FourierCoefficients {
    let mut draw = || {
        Complex64::new(
            rng.random_range(-scale..scale),
            rng.random_range(-scale..scale),
        )
    };
    let a: Vec<Complex64> = (0..=order).map(|_| draw()).collect();
    let b: Vec<Complex64> = (0..=order).map(|_| draw()).collect();
    FourierCoefficients::new(a, b).expect("matching coefficient lengths")
}

/// Worst deviation of one check across the random samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    /// Check name.
    pub name: String,
    /// Contract bound.
    pub tolerance: f64,
    /// Largest deviation over all samples.
    pub max_deviation: f64,
    /// Sample attaining it.
    pub worst_sample: usize,
    /// Largest deviation per sample.
    pub per_sample: Vec<f64>,
    /// Whether `max_deviation < tolerance`.
    pub passed: bool,
}

impl CheckResult {
    /// Summarises per-sample maxima against `tolerance`.
    pub fn new(name: impl Into<String>, tolerance: f64, per_sample: Vec<f64>) -> Self {
        let (worst_sample, max_deviation) =
            per_sample
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, 0.0),
                    |best, (k, v)| if v > best.1 { (k, v) } else { best },
                );
        let finite = per_sample.iter().all(|v| v.is_finite());
        Self {
            name: name.into(),
            tolerance,
            max_deviation,
            worst_sample,
            per_sample,
            passed: finite && max_deviation < tolerance,
        }
    }

    /// One summary line.
    pub fn line(&self) -> String {
        format!(
            "{}: {} max {:.3e} (tolerance {:.0e}, sample {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance,
            self.worst_sample
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_coefficients_are_reproducible() {
        let draw = |seed| random_coefficients(&mut ChaCha8Rng::seed_from_u64(seed), 5, 0.5);
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
        let c = draw(3);
        assert_eq!(c.truncation_order(), 5);
        assert!(
            c.a()
                .iter()
                .chain(c.b())
                .all(|z| z.re.abs() <= 0.5 && z.im.abs() <= 0.5)
        );
    }

    #[test]
    fn check_results_track_the_worst_sample() {
        let check = CheckResult::new("x", 1e-3, vec![1e-5, 2e-4, 1e-6]);
        assert!(check.passed);
        assert_eq!((check.worst_sample, check.max_deviation), (1, 2e-4));
        assert!(!CheckResult::new("x", 1e-3, vec![1e-5, f64::NAN]).passed);
        assert!(!CheckResult::new("x", 1e-3, vec![1e-3]).passed);
    }
}

//! Far-field measurement records and the catalog of how many distinct
//! incident directions determine each obstacle type.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Incident directions needed for one pure obstacle type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstacleMeasurementCount {
    /// Boundary condition code (`R`, `T`, `I`, `G`, `F`, `H`).
    pub code: String,
    /// Obstacle description.
    pub obstacle: String,
    /// Number of distinct incident directions.
    pub incident_directions: u32,
}

/// Incident directions used by a uniqueness statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessSetting {
    /// Setting description.
    pub setting: String,
    /// Number of distinct incident directions.
    pub incident_directions: u32,
}

/// Measurement-count catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCatalog {
    /// Counts per pure obstacle type.
    pub obstacle_types: Vec<ObstacleMeasurementCount>,
    /// Counts of the general uniqueness statements.
    pub uniqueness_settings: Vec<UniquenessSetting>,
}

/// The catalog, parsed once.
pub fn measurement_catalog() -> &'static MeasurementCatalog {
    static CATALOG: OnceLock<MeasurementCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        serde_json::from_str(include_str!("measurement_counts.json"))
            .expect("measurement_counts.json is valid")
    })
}

/// Count for the pure obstacle type with boundary condition `code`.
///
/// # Errors
/// [`Error::UnknownScenario`] for an unknown code.
pub fn incident_directions_for(code: char) -> Result<u32> {
    measurement_catalog()
        .obstacle_types
        .iter()
        .find(|e| e.code.starts_with(code))
        .map(|e| e.incident_directions)
        .ok_or_else(|| Error::UnknownScenario(code.to_string()))
}

/// Far-field amplitudes `u_p^∞(x̂)`, `u_s^∞(x̂)` at one observation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldSample {
    /// Observation angle of `x̂`.
    pub observation_angle: f64,
    /// Pressure amplitude.
    pub pressure: Complex64,
    /// Shear amplitude.
    pub shear: Complex64,
}

/// Measured far-field pattern for one incident direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldPattern {
    /// Polar angle of the incident direction.
    pub incident_angle: f64,
    /// Samples ordered by observation angle.
    pub samples: Vec<FarFieldSample>,
}

/// Collection of far-field patterns, the data of the inverse problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarFieldDataset {
    /// Patterns, one per incident direction.
    pub patterns: Vec<FarFieldPattern>,
}

/// Angle in units of 1e-12 rad reduced modulo `2π`, for set membership.
fn direction_key(angle: f64) -> i64 {
    let turn = (std::f64::consts::TAU * 1e12).round() as i64;
    ((angle.rem_euclid(std::f64::consts::TAU) * 1e12).round() as i64) % turn
}

impl FarFieldDataset {
    /// Number of distinct incident directions.
    ///
    /// # Errors
    /// [`Error::InvalidWave`] for non-finite angles or samples.
    pub fn distinct_incident_directions(&self) -> Result<usize> {
        let mut keys = BTreeSet::new();
        for p in &self.patterns {
            let finite = p.incident_angle.is_finite()
                && p.samples.iter().all(|s| {
                    s.observation_angle.is_finite()
                        && [s.pressure, s.shear]
                            .iter()
                            .all(|z| z.re.is_finite() && z.im.is_finite())
                });
            if !finite {
                return Err(Error::InvalidWave("far-field data must be finite".into()));
            }
            keys.insert(direction_key(p.incident_angle));
        }
        Ok(keys.len())
    }

    /// Whether the dataset has at least as many distinct incident directions
    /// as the catalog lists for the pure obstacle type `code`.
    ///
    /// # Errors
    /// As [`FarFieldDataset::distinct_incident_directions`] and
    /// [`incident_directions_for`].
    pub fn suffices_for(&self, code: char) -> Result<bool> {
        Ok(self.distinct_incident_directions()? >= incident_directions_for(code)? as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_counts() {
        let counts: Vec<(String, u32)> = measurement_catalog()
            .obstacle_types
            .iter()
            .map(|e| (e.code.clone(), e.incident_directions))
            .collect();
        let expected = [("R", 2), ("T", 4), ("I", 4), ("G", 2), ("F", 2), ("H", 6)];
        assert_eq!(counts.len(), expected.len());
        for ((code, n), (c, m)) in counts.iter().zip(expected) {
            assert_eq!((code.as_str(), *n), (c, m));
        }
        let settings: Vec<u32> = measurement_catalog()
            .uniqueness_settings
            .iter()
            .map(|s| s.incident_directions)
            .collect();
        assert_eq!(settings, vec![8, 5, 8]);
        assert!(incident_directions_for('X').is_err());
    }

    #[test]
    fn dataset_direction_counts() {
        let pattern = |angle: f64| FarFieldPattern {
            incident_angle: angle,
            samples: vec![FarFieldSample {
                observation_angle: 0.0,
                pressure: Complex64::new(1.0, 0.0),
                shear: Complex64::default(),
            }],
        };
        let data = FarFieldDataset {
            patterns: vec![pattern(0.0), pattern(std::f64::consts::TAU), pattern(1.0)],
        };
        assert_eq!(data.distinct_incident_directions().unwrap(), 2);
        assert!(data.suffices_for('R').unwrap());
        assert!(!data.suffices_for('H').unwrap());
        let bad = FarFieldDataset {
            patterns: vec![pattern(f64::NAN)],
        };
        assert!(bad.distinct_incident_directions().is_err());
    }
}

//! Detector-angle grid axes for map and CSI sweeps.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One detector-angle axis: a closed interval [min, max] ⊆ [0, π] sampled
/// at `steps` evenly spaced points, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for AxisSpec {
    fn default() -> Self {
        AxisSpec {
            min: 0.0,
            max: PI,
            steps: 201,
        }
    }
}

impl AxisSpec {
    pub fn validate(&self, field: &str) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Validation(format!(
                "{field}.steps: expected >= 2, got {}",
                self.steps
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Validation(format!("{field}: bounds must be finite")));
        }
        if self.min > self.max {
            return Err(Error::Validation(format!(
                "{field}: min {} exceeds max {}",
                self.min, self.max
            )));
        }
        if self.min < 0.0 || self.max > PI {
            return Err(Error::Validation(format!(
                "{field}: range [{}, {}] not contained in [0, {PI}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// The sampled angles; the last point is forced to `max` exactly.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    }
}

/// The two detector axes of a correlation map.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub alpha1: AxisSpec,
    #[serde(default)]
    pub alpha2: AxisSpec,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.alpha1.validate("grid.alpha1")?;
        self.alpha2.validate("grid.alpha2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_axis_covers_half_turn() {
        let axis = AxisSpec::default();
        axis.validate("grid.alpha1").unwrap();
        let pts = axis.points();
        assert_eq!(pts.len(), 201);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[200], PI);
        assert_eq!(pts[100], PI / 2.0);
        assert_relative_eq!(pts[1], PI / 200.0, epsilon = 1e-15);
    }

    #[test]
    fn endpoints_exact_on_subinterval() {
        let axis = AxisSpec {
            min: 0.3,
            max: 2.9,
            steps: 7,
        };
        let pts = axis.points();
        assert_eq!(pts[0], 0.3);
        assert_eq!(pts[6], 2.9);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation_messages_name_the_field() {
        let bad = AxisSpec {
            min: 0.0,
            max: PI,
            steps: 1,
        };
        let err = bad.validate("grid.alpha2").unwrap_err().to_string();
        assert!(err.contains("grid.alpha2.steps"), "{err}");

        let bad = AxisSpec {
            min: -0.1,
            max: PI,
            steps: 5,
        };
        assert!(bad.validate("grid.alpha1").is_err());
        let bad = AxisSpec {
            min: 0.0,
            max: 3.2,
            steps: 5,
        };
        assert!(bad.validate("grid.alpha1").is_err());
        let bad = AxisSpec {
            min: 2.0,
            max: 1.0,
            steps: 5,
        };
        assert!(bad.validate("grid.alpha1").is_err());
    }
}

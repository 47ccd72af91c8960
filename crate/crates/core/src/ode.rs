use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The cubic toy model ẋ = λx − αx³ on a uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    /// Linear growth coefficient λ (the reference model fixes this to 1).
    pub linear_coeff: f64,
    /// Cubic damping coefficient α, non-negative.
    pub cubic_coeff: f64,
    /// Step size Δt, positive.
    pub dt: f64,
    /// Number of forward steps T; the trajectory has T+1 points.
    pub steps: usize,
    /// Initial value x(0).
    pub x0: f64,
}

impl OdeSpec {
    pub fn new(cubic_coeff: f64, dt: f64, steps: usize, x0: f64) -> Result<Self> {
        let spec = OdeSpec {
            linear_coeff: 1.0,
            cubic_coeff,
            dt,
            steps,
            x0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if self.cubic_coeff < 0.0 {
            return Err(Error::Domain(format!(
                "cubic coefficient must be non-negative, got {}",
                self.cubic_coeff
            )));
        }
        Ok(())
    }

    /// Right-hand side f(x) = λx − αx³.
    pub fn rhs(&self, x: f64) -> f64 {
        self.linear_coeff * x - self.cubic_coeff * x * x * x
    }

    /// The attracting fixed point √(λ/α) for positive coefficients.
    pub fn fixed_point(&self) -> Option<f64> {
        if self.cubic_coeff > 0.0 && self.linear_coeff > 0.0 {
            Some((self.linear_coeff / self.cubic_coeff).sqrt())
        } else {
            None
        }
    }
}

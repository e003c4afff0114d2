use rand::Rng;

use crate::error::{Error, Result};

/// Laplace distribution centred at zero, scale `sensitivity / epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    scale: f64,
}

impl Laplace {
    pub fn new(sensitivity: f64, epsilon: f64) -> Result<Self> {
        check_sensitivity(sensitivity)?;
        check_epsilon(epsilon)?;
        Ok(Self {
            scale: sensitivity / epsilon,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }

    /// Inverse-CDF draw from one uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        loop {
            let u: f64 = rng.random::<f64>() - 0.5;
            let tail = 1.0 - 2.0 * u.abs();
            if tail > 0.0 {
                return -self.scale * u.signum() * tail.ln();
            }
        }
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

fn check_sensitivity(sensitivity: f64) -> Result<()> {
    if sensitivity.is_finite() && sensitivity >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMechanism(format!(
            "sensitivity must be finite and nonnegative, got {sensitivity}"
        )))
    }
}

/// Adds Laplace noise calibrated to `sensitivity / epsilon`.
///
/// Without an epsilon (non-private mode) or with zero sensitivity the value passes through.
pub fn laplace_noise<R: Rng + ?Sized>(value: f64, sensitivity: f64, epsilon: Option<f64>, rng: &mut R) -> Result<f64> {
    check_sensitivity(sensitivity)?;
    let Some(eps) = epsilon else {
        return Ok(value);
    };
    check_epsilon(eps)?;
    if sensitivity == 0.0 {
        return Ok(value);
    }
    Ok(value + Laplace::new(sensitivity, eps)?.sample(rng))
}

use crate::special::cin;
use crate::units::hz;
use crate::{Error, Result};

/// S(ω) = S0/|ω| for ω_l ≤ |ω| ≤ ω_h, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpectrum {
    pub s0: f64,
    pub omega_l: f64,
    pub omega_h: f64,
}

impl Default for NoiseSpectrum {
    fn default() -> Self {
        Self::new(hz(1.0), hz(1e12)).expect("default cutoffs are ordered")
    }
}

impl NoiseSpectrum {
    pub fn new(omega_l: f64, omega_h: f64) -> Result<Self> {
        if !(omega_l > 0.0 && omega_h > omega_l && omega_h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must satisfy 0 < omega_l < omega_h (got {omega_l:e}, {omega_h:e})"
            )));
        }
        Ok(Self { s0: 1.0 / (2.0 * (omega_h / omega_l).ln()), omega_l, omega_h })
    }

    pub fn log_ratio(&self) -> f64 {
        (self.omega_h / self.omega_l).ln()
    }

    pub fn density(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w < self.omega_l || w > self.omega_h {
            0.0
        } else {
            self.s0 / w
        }
    }

    /// S(t) = ∫ S(ω) e^{-iωt} dω = 2 S0 [Ci(ω_h t) − Ci(ω_l t)].
    pub fn correlation(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        2.0 * self.s0 * (self.log_ratio() - cin(self.omega_h * t) + cin(self.omega_l * t))
    }
}

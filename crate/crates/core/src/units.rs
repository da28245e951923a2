//! Physical constants and unit conversions.

use crate::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// 1 μeV / h in Hz.
pub const MUEV_HZ: f64 = 241.798_924_2e6;

/// 1 μeV expressed as an angular frequency (rad/s).
pub const MUEV: f64 = TWO_PI * MUEV_HZ;

/// Angular frequency of `f` Hz.
pub fn hz(f: f64) -> f64 {
    TWO_PI * f
}

pub fn mhz(f: f64) -> f64 {
    TWO_PI * f * 1e6
}

pub fn ghz(f: f64) -> f64 {
    TWO_PI * f * 1e9
}

pub fn muev(e: f64) -> f64 {
    e * MUEV
}

pub fn to_muev(w: f64) -> f64 {
    w / MUEV
}

pub fn to_mhz(w: f64) -> f64 {
    w / (TWO_PI * 1e6)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Contact hyperfine coupling A (rad/s).
    pub hyperfine_a: f64,
    /// Electron gyromagnetic ratio (rad/s per tesla).
    pub gamma_e: f64,
    /// Nuclear gyromagnetic ratio (rad/s per tesla).
    pub gamma_n: f64,
    /// Relative g-factor difference between dot and donor.
    pub delta_gamma: f64,
    /// Scale between (γ_e + γ_n)B and the bare flip-flop splitting ω_B.
    pub zeeman_factor: f64,
    /// Donor-dot distance d (m), converts field offsets to detuning.
    pub dot_distance: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hyperfine_a: mhz(117.0),
            gamma_e: ghz(27.97),
            gamma_n: mhz(17.23),
            delta_gamma: 0.002,
            zeeman_factor: 0.5,
            dot_distance: 18.716e-9,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.hyperfine_a,
            self.gamma_e,
            self.gamma_n,
            self.zeeman_factor,
            self.dot_distance,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("constants must be positive".into()));
        }
        if !(0.0..=0.007).contains(&self.delta_gamma) {
            return Err(Error::InvalidParameter(format!(
                "delta_gamma {} outside [0, 0.007]",
                self.delta_gamma
            )));
        }
        Ok(())
    }

    /// Bare flip-flop splitting ω_B at field `b` (T).
    pub fn omega_b(&self, b: f64) -> f64 {
        self.zeeman_factor * (self.gamma_e + self.gamma_n) * b
    }

    /// Electron Zeeman difference between dot and donor, Δω_B.
    pub fn delta_omega_b(&self, b: f64) -> f64 {
        self.zeeman_factor * self.delta_gamma * self.gamma_e * b
    }

    /// Field that gives splitting `omega_b`.
    pub fn field_for_omega_b(&self, omega_b: f64) -> f64 {
        omega_b / (self.zeeman_factor * (self.gamma_e + self.gamma_n))
    }

    /// Detuning ε (rad/s) for a field offset E_z − E_c in V/cm.
    /// A positive offset pulls the electron toward the dot, lowering ε.
    pub fn detuning_from_field(&self, e_vcm: f64) -> f64 {
        -e_vcm * 100.0 * self.dot_distance * 1e6 * MUEV
    }

    pub fn field_from_detuning(&self, eps: f64) -> f64 {
        -eps / (100.0 * self.dot_distance * 1e6 * MUEV)
    }
}

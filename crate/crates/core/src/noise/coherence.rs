//! Coherence times from the analytic envelope.
//!
//! For element ρ_ab the secular solution is a sum of modes
//! C_jk e^{−iω_jk t} e^{−E_jk(t)} with C_jk = R_aj ρ'_jk(0) R_bk and
//! E_jk = Σ_i J_i(t,0,0) Γ_ijk². The envelope is
//! F(t) = Σ_{j≠k} |C_jk| e^{−E_jk(t)} / Σ_{j≠k} |C_jk|,
//! which equals |ρ_ab(t)/ρ_ab(0)| when a single mode contributes.

use super::profile::j00;
use super::propagator::{validate_state, EvolutionSetup};
use super::spectrum::NoiseSpectrum;
use crate::linalg::CMat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceTime {
    Finite(f64),
    /// The envelope stays above the threshold on [1/ω_h, 1/ω_l].
    ExceedsWindow,
}

impl CoherenceTime {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            Self::Finite(t) => Some(*t),
            Self::ExceedsWindow => None,
        }
    }
}

const SCAN_POINTS: usize = 400;
const REL_TOL: f64 = 1e-6;

struct Mode {
    weight: f64,
    /// Γ² per channel.
    rates: Vec<f64>,
}

pub fn envelope(setup: &EvolutionSetup, rho0: &CMat, a: usize, b: usize) -> Result<impl Fn(f64) -> f64> {
    let n = setup.dim();
    validate_state(rho0, n)?;
    if a >= n || b >= n {
        return Err(Error::InvalidParameter("element index out of range".into()));
    }
    let p = setup.to_eigenbasis(rho0);
    let r = &setup.rotation;
    let mut modes = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let w = (p[(j, k)] * (r[(a, j)] * r[(b, k)])).norm();
            if w > 0.0 {
                let rates = (0..setup.channels.len())
                    .map(|i| {
                        let h = setup.projected(i);
                        (h[(j, j)] - h[(k, k)]).powi(2)
                    })
                    .collect();
                modes.push(Mode { weight: w, rates });
            }
        }
    }
    let total: f64 = modes.iter().map(|m| m.weight).sum();
    if total == 0.0 {
        return Err(Error::InvalidParameter(format!("element ({a},{b}) has no oscillating part")));
    }
    let spectra: Vec<NoiseSpectrum> = setup.channels.iter().map(|c| c.spectrum).collect();
    Ok(move |t: f64| {
        let js: Vec<f64> = spectra.iter().map(|s| j00(s, t)).collect();
        modes
            .iter()
            .map(|m| m.weight * (-m.rates.iter().zip(&js).map(|(g, j)| g * j).sum::<f64>()).exp())
            .sum::<f64>()
            / total
    })
}

/// Smallest T with F_ab(T) = threshold.
pub fn coherence_time(
    setup: &EvolutionSetup,
    rho0: &CMat,
    a: usize,
    b: usize,
    threshold: f64,
) -> Result<CoherenceTime> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter("threshold must lie in (0, 1)".into()));
    }
    let f = envelope(setup, rho0, a, b)?;
    let lo = setup.channels.iter().map(|c| 1.0 / c.spectrum.omega_h).fold(f64::INFINITY, f64::min);
    let hi = setup.channels.iter().map(|c| 1.0 / c.spectrum.omega_l).fold(0.0, f64::max);
    if setup.channels.is_empty() {
        return Ok(CoherenceTime::ExceedsWindow);
    }
    first_crossing(&f, lo, hi, threshold)
}

/// T solving J(T,0,0)Γ² = −ln(threshold) for a single Gaussian mode.
pub fn single_mode_time(spec: &NoiseSpectrum, gamma: f64, threshold: f64) -> CoherenceTime {
    let target = -threshold.ln();
    let g2 = gamma * gamma;
    let f = |t: f64| (-j00(spec, t) * g2).exp();
    if g2 == 0.0 || j00(spec, 1.0 / spec.omega_l) * g2 < target {
        return CoherenceTime::ExceedsWindow;
    }
    // J is increasing, so plain bisection in log t on [0, 1/ω_l]
    let (mut lo, mut hi) = (1e-30f64, 1.0 / spec.omega_l);
    while hi / lo > 1.0 + 1e-12 {
        let mid = (lo * hi).sqrt();
        if f(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    CoherenceTime::Finite((lo * hi).sqrt())
}

fn first_crossing(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, threshold: f64) -> Result<CoherenceTime> {
    let mut prev = lo;
    if f(lo) <= threshold {
        return Ok(CoherenceTime::Finite(bisect(f, 0.0, lo, threshold)));
    }
    let ratio = (hi / lo).ln();
    for i in 1..=SCAN_POINTS {
        let t = lo * (ratio * i as f64 / SCAN_POINTS as f64).exp();
        if f(t) <= threshold {
            return Ok(CoherenceTime::Finite(bisect(f, prev, t, threshold)));
        }
        prev = t;
    }
    Ok(CoherenceTime::ExceedsWindow)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, threshold: f64) -> f64 {
    while hi - lo > REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

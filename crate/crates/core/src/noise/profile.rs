//! Decay profile J(t, ω1, ω2) = ∫_0^t dt1 ∫_0^t1 dt2 S(t1 − t2) e^{iω1 t1} e^{iω2 t2}.
//!
//! The general case is evaluated in the frequency domain,
//! `J = ∫ S(ν) t² φ1[i(ω1+ω2)t, i(ω1−ν)t] dν`, where φ1(z) = (e^z − 1)/z and
//! φ1[a, b] is its divided difference. The integral runs in log ν with
//! linear sub-panels two periods wide around ν = 0 and the resonances at
//! ν = ω1 and ν = −ω2.

use super::spectrum::NoiseSpectrum;
use crate::linalg::C64;
use crate::quad::gl32;
use crate::special::{g_kernel, EULER_GAMMA};

/// Half-width (in units of 1/t) of the linearly resolved window around each
/// resonance.
const WINDOW: f64 = 2000.0;
/// Largest log-frequency panel.
const MAX_LOG_PANEL: f64 = 0.25;

/// Exact J(t, 0, 0) = S0 t² [ln(ω_h/ω_l) − 2G(ω_h t) + 2G(ω_l t)].
pub fn j00(spec: &NoiseSpectrum, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let t = t.abs();
    spec.s0 * t * t * (spec.log_ratio() - 2.0 * g_kernel(spec.omega_h * t) + 2.0 * g_kernel(spec.omega_l * t))
}

/// Long-time form t²(3/2 − γ_E − ln(ω_l t))/(2 ln(ω_h/ω_l)), valid for
/// 1/ω_h ≪ t ≪ 1/ω_l. Outside 10/ω_h < t < 0.1/ω_l the exact value is
/// returned.
pub fn j00_asymptotic(spec: &NoiseSpectrum, t: f64) -> f64 {
    if !(t > 10.0 / spec.omega_h && t < 0.1 / spec.omega_l) {
        return j00(spec, t);
    }
    t * t * (1.5 - EULER_GAMMA - (spec.omega_l * t).ln()) / (2.0 * spec.log_ratio())
}

/// J(t, ω1, ω2). Uses the closed form when both frequencies are zero.
pub fn decay_profile(spec: &NoiseSpectrum, t: f64, w1: f64, w2: f64) -> C64 {
    if w1 == 0.0 && w2 == 0.0 {
        return C64::new(j00(spec, t), 0.0);
    }
    decay_profile_quadrature(spec, t, w1, w2)
}

/// J(t, ω1, ω2) by quadrature over the spectrum, for any frequencies.
pub fn decay_profile_quadrature(spec: &NoiseSpectrum, t: f64, w1: f64, w2: f64) -> C64 {
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let z1 = C64::new(0.0, (w1 + w2) * t);
    let mut total = C64::new(0.0, 0.0);
    for sigma in [1.0, -1.0] {
        let edges = panel_edges(spec, t, &[0.0, sigma * w1, -sigma * w2]);
        let integrand = |u: f64| {
            let nu = u.exp();
            let z2 = C64::new(0.0, (w1 - sigma * nu) * t);
            phi1_divided(z1, z2)
        };
        total += gl32().integrate_panels(&edges, integrand);
    }
    total * (spec.s0 * t * t)
}

/// Panel edges in u = ln ν.
fn panel_edges(spec: &NoiseSpectrum, t: f64, centers: &[f64]) -> Vec<f64> {
    let (ul, uh) = (spec.omega_l.ln(), spec.omega_h.ln());
    let n_log = ((uh - ul) / MAX_LOG_PANEL).ceil() as usize;
    let mut nu_edges: Vec<f64> = Vec::new();
    let step = 4.0 * std::f64::consts::PI / t;
    for &c in centers {
        if c < 0.0 {
            continue;
        }
        let lo = (c - WINDOW / t).max(spec.omega_l);
        let hi = (c + WINDOW / t).min(spec.omega_h);
        if lo >= hi {
            continue;
        }
        // edges at c ± k·step so that the resonance sits on an edge
        let k_lo = ((c - lo) / step).floor() as i64;
        let k_hi = ((hi - c) / step).floor() as i64;
        nu_edges.push(lo);
        nu_edges.push(hi);
        for k in -k_lo..=k_hi {
            let v = c + k as f64 * step;
            if v > lo && v < hi {
                nu_edges.push(v);
            }
        }
    }
    let mut edges: Vec<f64> = nu_edges.iter().map(|v| v.ln()).collect();
    for i in 0..=n_log {
        let u = ul + (uh - ul) * i as f64 / n_log as f64;
        edges.push(u);
    }
    edges.push(ul);
    edges.push(uh);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    edges
}

pub fn phi1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..25 {
            term = term * z / (n as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

fn dphi1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ n z^{n-1}/(n+1)!
        let mut pow = C64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut sum = C64::new(0.5, 0.0);
        for n in 2..26 {
            pow *= z;
            fact *= n as f64 + 1.0;
            sum += pow * (n as f64 / fact);
        }
        sum
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// Divided difference (φ1(a) − φ1(b))/(a − b), stable for a ≈ b.
pub fn phi1_divided(a: C64, b: C64) -> C64 {
    let d = a - b;
    let scale = a.norm().max(b.norm());
    if scale <= 1.0 {
        // Σ_{n≥1} h_n/(n+1)!, h_n = (a^n − b^n)/(a − b)
        let mut h = C64::new(1.0, 0.0);
        let mut bpow = C64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut sum = h / fact;
        for n in 2..30 {
            bpow *= b;
            h = a * h + bpow;
            fact *= n as f64 + 1.0;
            sum += h / fact;
        }
        sum
    } else if d.norm() < 2e-6 * scale {
        dphi1((a + b) * 0.5)
    } else {
        (phi1(a) - phi1(b)) / d
    }
}

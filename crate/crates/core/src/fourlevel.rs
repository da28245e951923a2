//! Closed-form solution of the doubly degenerate four-level model
//! {|s_L⟩, |s_R⟩, |c_L⟩, |c_R⟩}:
//!
//! ```text
//! H0 = [[0, g_s, g_1, g_2], [g_s, 0, g_2, g_1], [g_1, g_2, δ, g_c], [g_2, g_1, g_c, δ]]
//! h_L = γ1 (|s_L⟩⟨c_L| + h.c.) − 2γ2 |c_L⟩⟨c_L|,  h_R likewise.
//! ```
//!
//! Here γ1 drives s ↔ c transitions and γ2 dephases; for the flip-flop pair
//! these are the main-text γ2 and γ1 respectively (see
//! [`FourLevelParams::from_flip_flop`]).

use crate::linalg::{CMat, RMat, C64};
use crate::noise::{j00, NoiseSpectrum};
use crate::two_qubit::CouplingRates;
use crate::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelParams {
    pub delta: f64,
    pub g_s: f64,
    pub g_c: f64,
    pub g_1: f64,
    pub g_2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl FourLevelParams {
    /// {|01⟩, |10⟩, |02⟩, |20⟩} block of the flip-flop pair:
    /// g_s = g_f, g_c = g_c, g_2 = g_l, g_1 = 0, δ = E_2 − E_1, with the two
    /// noise strengths swapped into this model's naming.
    pub fn from_flip_flop(r: &CouplingRates) -> Self {
        Self { delta: r.delta, g_s: r.g_f, g_c: r.g_c, g_1: 0.0, g_2: r.g_l, gamma1: r.gamma2, gamma2: r.gamma1 }
    }

    pub fn hamiltonian(&self) -> RMat {
        let (d, s, c, g1, g2) = (self.delta, self.g_s, self.g_c, self.g_1, self.g_2);
        #[rustfmt::skip]
        let h = RMat::from_row_slice(4, 4, &[
            0.0, s,   g1,  g2,
            s,   0.0, g2,  g1,
            g1,  g2,  d,   c,
            g2,  g1,  c,   d,
        ]);
        h
    }

    /// (h_L, h_R).
    pub fn noise_operators(&self) -> (RMat, RMat) {
        let mut l = RMat::zeros(4, 4);
        l[(0, 2)] = self.gamma1;
        l[(2, 0)] = self.gamma1;
        l[(2, 2)] = -2.0 * self.gamma2;
        let mut r = RMat::zeros(4, 4);
        r[(1, 3)] = self.gamma1;
        r[(3, 1)] = self.gamma1;
        r[(3, 3)] = -2.0 * self.gamma2;
        (l, r)
    }
}

/// tan φ± = −2(g_1 ± g_2)/(−δ ∓ (g_c − g_s)), resolved with atan2.
pub fn mixing_angles(p: &FourLevelParams) -> (f64, f64) {
    let plus = (-2.0 * (p.g_1 + p.g_2)).atan2(-p.delta - (p.g_c - p.g_s));
    let minus = (-2.0 * (p.g_1 - p.g_2)).atan2(-p.delta + (p.g_c - p.g_s));
    (plus, minus)
}

pub fn rotation(phi_plus: f64, phi_minus: f64) -> RMat {
    let (sp, cp) = (0.5 * phi_plus).sin_cos();
    let (sm, cm) = (0.5 * phi_minus).sin_cos();
    #[rustfmt::skip]
    let r = RMat::from_row_slice(4, 4, &[
         cp,  cm, sp,  sm,
         cp, -cm, sp, -sm,
        -sp, -sm, cp,  cm,
        -sp,  sm, cp, -cm,
    ]);
    r / 2f64.sqrt()
}

pub const MODE_LABELS: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

/// Column pair (j, k) of the rotation whose difference λ_j − λ_k is each
/// mode frequency.
pub const MODE_PAIRS: [(usize, usize); 6] = [(1, 0), (3, 0), (2, 1), (2, 3), (2, 0), (3, 1)];

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub frequencies: [f64; 6],
    pub rates: [f64; 6],
    pub angles: (f64, f64),
    pub rotation: RMat,
}

pub fn mode_set(p: &FourLevelParams) -> ModeSet {
    let (pp, pm) = mixing_angles(p);
    let (sp, cp) = pp.sin_cos();
    let (sm, cm) = pm.sin_cos();
    let (d, gs, gc, g1, g2) = (p.delta, p.g_s, p.g_c, p.g_1, p.g_2);
    let frequencies = [
        0.5 * d * (cp - cm) - 0.5 * gc * (2.0 - cp - cm) + g2 * (sp + sm) - 0.5 * gs * (2.0 + cp + cm) + g1 * (sp - sm),
        0.5 * d * (cp + cm) - 0.5 * gc * (2.0 - cp + cm) + g2 * (sp - sm) - 0.5 * gs * (2.0 + cp - cm) + g1 * (sp + sm),
        0.5 * d * (cp + cm) + 0.5 * gc * (2.0 + cp - cm) + g2 * (sp - sm) + 0.5 * gs * (2.0 - cp + cm) + g1 * (sp + sm),
        0.5 * d * (cp - cm) + 0.5 * gc * (2.0 + cp + cm) + g2 * (sp + sm) + 0.5 * gs * (2.0 - cp - cm) + g1 * (sp - sm),
        d * cp + gc * cp + 2.0 * g2 * sp - gs * cp + 2.0 * g1 * sp,
        d * cm - gc * cm - 2.0 * g2 * sm + gs * cm + 2.0 * g1 * sm,
    ];
    let (y1, y2) = (p.gamma1, p.gamma2);
    let ad = y2 * (cp - cm) / 2.0 - y1 * (sp - sm) / 2.0;
    let bc = y2 * (cp + cm) / 2.0 - y1 * (sp + sm) / 2.0;
    let rates = [ad, bc, bc, ad, y2 * cp - y1 * sp, y2 * cm - y1 * sm];
    ModeSet { frequencies, rates, angles: (pp, pm), rotation: rotation(pp, pm) }
}

/// Coefficients of one density-matrix element:
/// ρ_ab(t) = eq + Σ_m (plus_m e^{−iω_m t} + minus_m e^{iω_m t}) e^{−2JΓ_m²}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementAmplitudes {
    pub equilibrium: C64,
    pub plus: [C64; 6],
    pub minus: [C64; 6],
}

impl ElementAmplitudes {
    pub fn total(&self) -> C64 {
        self.equilibrium + self.plus.iter().sum::<C64>() + self.minus.iter().sum::<C64>()
    }
}

/// C_{ab,jk} = R_aj (Rᵀ ρ0 R)_jk R_bk, grouped by mode.
pub fn amplitudes(modes: &ModeSet, rho0: &CMat, a: usize, b: usize) -> ElementAmplitudes {
    let r = &modes.rotation;
    let rc = r.map(|x| C64::new(x, 0.0));
    let p = rc.transpose() * rho0 * &rc;
    let c = |j: usize, k: usize| p[(j, k)] * (r[(a, j)] * r[(b, k)]);
    let equilibrium = (0..4).map(|j| c(j, j)).sum();
    let mut plus = [C64::new(0.0, 0.0); 6];
    let mut minus = [C64::new(0.0, 0.0); 6];
    for (m, &(j, k)) in MODE_PAIRS.iter().enumerate() {
        plus[m] = c(j, k);
        minus[m] = c(k, j);
    }
    ElementAmplitudes { equilibrium, plus, minus }
}

/// α|s_L⟩ + β|s_R⟩.
pub fn initial_state(alpha: f64, beta: f64) -> CMat {
    let v = [alpha, beta, 0.0, 0.0];
    CMat::from_fn(4, 4, |i, j| C64::new(v[i] * v[j], 0.0))
}

#[derive(Debug, Clone)]
pub struct FourLevelTrajectory {
    pub modes: ModeSet,
    pub elements: Vec<ElementAmplitudes>,
    pub noise: Option<NoiseSpectrum>,
}

impl FourLevelTrajectory {
    pub fn element(&self, a: usize, b: usize, t: f64) -> C64 {
        let e = &self.elements[4 * a + b];
        let j = self.noise.map_or(0.0, |s| j00(&s, t));
        let mut v = e.equilibrium;
        for m in 0..6 {
            let w = self.modes.frequencies[m];
            let decay = (-2.0 * j * self.modes.rates[m].powi(2)).exp();
            let osc = e.plus[m] * C64::new(0.0, -w * t).exp() + e.minus[m] * C64::new(0.0, w * t).exp();
            v += osc * decay;
        }
        v
    }

    pub fn rho(&self, t: f64) -> CMat {
        CMat::from_fn(4, 4, |a, b| self.element(a, b, t))
    }

    pub fn equilibrium(&self) -> CMat {
        CMat::from_fn(4, 4, |a, b| self.elements[4 * a + b].equilibrium)
    }
}

/// Equilibrium plus decaying oscillations; `noise = None` is the noiseless
/// limit.
pub fn evolve_analytic(p: &FourLevelParams, rho0: &CMat, noise: Option<NoiseSpectrum>) -> FourLevelTrajectory {
    let modes = mode_set(p);
    let elements = (0..16).map(|i| amplitudes(&modes, rho0, i / 4, i % 4)).collect();
    FourLevelTrajectory { modes, elements, noise }
}

/// Long-time population of {|c_L⟩, |c_R⟩} from α|s_L⟩ + β|s_R⟩.
pub fn equilibrium_leakage_4lv(p: &FourLevelParams, alpha: f64, beta: f64) -> Result<f64> {
    if ((alpha * alpha + beta * beta) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState("alpha^2 + beta^2 must be 1".into()));
    }
    let (pp, pm) = mixing_angles(p);
    Ok((alpha * beta * ((2.0 * pm).cos() - (2.0 * pp).cos()) + pp.sin().powi(2) + pm.sin().powi(2)) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// δ ≥ 3(g_c − g_s).
    Weak,
    /// δ/(g_c − g_s) ∈ [1/3, 3].
    Resonance,
    /// δ < (g_c − g_s)/3.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseReport {
    pub regime: Regime,
    /// π/(2g_s).
    pub gate_time: f64,
    pub quality_factor: f64,
    /// Asymptotic leakage for |s_L⟩ initial state.
    pub leakage: f64,
}

pub fn case_report(p: &FourLevelParams) -> Result<CaseReport> {
    let split = p.g_c - p.g_s;
    if split <= p.g_2.abs() {
        return Err(Error::CaseViolation(format!("g_c - g_s > |g_2| fails ({split:e} <= {:e})", p.g_2.abs())));
    }
    if p.delta < 0.0 {
        return Err(Error::CaseViolation("delta >= 0 fails".into()));
    }
    if p.g_s <= 0.0 {
        return Err(Error::CaseViolation("g_s > 0 fails".into()));
    }
    let ratio = p.delta / split;
    let (gs, g2, d, y2) = (p.g_s, p.g_2, p.delta, p.gamma2);
    let (regime, quality_factor, leakage) = if ratio >= 3.0 {
        (Regime::Weak, d.powi(3) * gs / (2.0 * PI * y2 * split * g2 * g2), 2.0 * g2 * g2 / (d * d))
    } else if ratio >= 1.0 / 3.0 {
        (Regime::Resonance, 3.0 * gs / (PI * y2), 0.25)
    } else {
        let s = 4.0 * g2 * g2 + split * split;
        (Regime::Strong, s.powf(1.5) * gs / (2.0 * PI * y2 * d), 2.0 * g2 * g2 / s)
    };
    Ok(CaseReport { regime, gate_time: PI / (2.0 * gs), quality_factor: quality_factor.abs(), leakage })
}

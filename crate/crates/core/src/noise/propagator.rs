//! Second-order cumulant propagators.
//!
//! With H(t) = H0 + Σ_i f_i(t) h_i and R diagonalizing H0, the secular form
//! keeps only zero-frequency parts of K_i(t):
//! ρ'_jk(t) = ρ'_jk(0) exp(−iω_jk t − Σ_i J_i(t,0,0) Γ_ijk²).
//! The full form builds K_i(t) in Liouville space (interaction picture of
//! H0) and applies exp(−Σ K_i).

use super::profile::{decay_profile_quadrature, j00};
use super::spectrum::NoiseSpectrum;
use crate::linalg::{expm, hermitian_eigen, max_asymmetry, symmetric_eigen, CMat, RMat, C64};
use crate::par;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseChannel {
    /// h_i, with the noise strength folded in.
    pub operator: RMat,
    pub spectrum: NoiseSpectrum,
}

impl NoiseChannel {
    pub fn new(operator: RMat, spectrum: NoiseSpectrum) -> Result<Self> {
        let asym = max_asymmetry(&operator);
        if asym > 1e-12 * operator.amax().max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { operator, spectrum })
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionSetup {
    /// Columns are eigenvectors of H0.
    pub rotation: RMat,
    pub energies: Vec<f64>,
    pub channels: Vec<NoiseChannel>,
    /// Frequencies with |ω| at or below this are treated as zero.
    pub zero_tol: f64,
    /// Rᵀ h_i R per channel.
    projected: Vec<RMat>,
}

impl EvolutionSetup {
    pub fn new(h0: &RMat, channels: Vec<NoiseChannel>) -> Result<Self> {
        let eig = symmetric_eigen(h0)?;
        Self::from_parts(eig.vectors, eig.values, channels)
    }

    pub fn from_parts(rotation: RMat, energies: Vec<f64>, channels: Vec<NoiseChannel>) -> Result<Self> {
        let n = energies.len();
        if rotation.shape() != (n, n) {
            return Err(Error::InvalidParameter("rotation and energies disagree in size".into()));
        }
        let ortho = (rotation.transpose() * &rotation - RMat::identity(n, n)).amax();
        if ortho > 1e-12 {
            return Err(Error::InvalidParameter(format!("rotation is not orthogonal ({ortho:e})")));
        }
        for c in &channels {
            if c.operator.shape() != (n, n) {
                return Err(Error::InvalidParameter("channel operator has wrong size".into()));
            }
        }
        let width = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let projected = channels.iter().map(|c| rotation.transpose() * &c.operator * &rotation).collect();
        Ok(Self { rotation, energies, channels, zero_tol: 1e-9 * width, projected })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn omega(&self, j: usize, k: usize) -> f64 {
        self.energies[j] - self.energies[k]
    }

    /// Channel operator in the eigenbasis of H0.
    pub fn projected(&self, i: usize) -> &RMat {
        &self.projected[i]
    }

    /// Σ_i J_i(t,0,0) Γ_ijk².
    pub fn secular_exponent(&self, t: f64, j: usize, k: usize) -> f64 {
        self.projected
            .iter()
            .zip(&self.channels)
            .map(|(h, c)| {
                let g = h[(j, j)] - h[(k, k)];
                if g == 0.0 {
                    0.0
                } else {
                    j00(&c.spectrum, t) * g * g
                }
            })
            .sum()
    }

    /// ρ' = Rᵀ ρ R.
    pub fn to_eigenbasis(&self, rho: &CMat) -> CMat {
        let r = self.rotation.map(|x| C64::new(x, 0.0));
        r.transpose() * rho * r
    }

    pub fn from_eigenbasis(&self, rho: &CMat) -> CMat {
        let r = self.rotation.map(|x| C64::new(x, 0.0));
        &r * rho * r.transpose()
    }

    /// t → ∞ limit keeping only the j = k terms.
    pub fn equilibrium(&self, rho0: &CMat) -> CMat {
        let p = self.to_eigenbasis(rho0);
        let diag = CMat::from_diagonal(&p.diagonal());
        self.from_eigenbasis(&diag)
    }
}

/// Γ_ijk = (Rᵀ h_i R)_jj − (Rᵀ h_i R)_kk.
pub fn dephasing_rate(setup: &EvolutionSetup, channel: usize, j: usize, k: usize) -> f64 {
    let h = setup.projected(channel);
    h[(j, j)] - h[(k, k)]
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub rho: Vec<CMat>,
    pub equilibrium: CMat,
    /// Smallest eigenvalue of ρ over the trajectory. The second-order
    /// expansion does not guarantee positivity.
    pub min_eigenvalue: f64,
    pub warnings: Vec<String>,
}

impl EvolutionResult {
    fn assemble(times: &[f64], rho: Vec<CMat>, equilibrium: CMat) -> Self {
        let mut min_eigenvalue = f64::INFINITY;
        let mut warnings = Vec::new();
        for (t, r) in times.iter().zip(&rho) {
            let herm = (r + r.adjoint()) * C64::new(0.5, 0.0);
            if let Ok((vals, _)) = hermitian_eigen(&herm) {
                let m = vals[0];
                if m < -1e-3 && min_eigenvalue >= -1e-3 {
                    warnings.push(format!("density matrix eigenvalue {m:.3e} at t = {t:.3e} s"));
                }
                min_eigenvalue = min_eigenvalue.min(m);
            }
        }
        Self { times: times.to_vec(), rho, equilibrium, min_eigenvalue, warnings }
    }

    pub fn population(&self, k: usize) -> Vec<f64> {
        self.rho.iter().map(|r| r[(k, k)].re).collect()
    }

    pub fn element(&self, a: usize, b: usize) -> Vec<C64> {
        self.rho.iter().map(|r| r[(a, b)]).collect()
    }
}

pub(crate) fn validate_state(rho0: &CMat, n: usize) -> Result<()> {
    if rho0.shape() != (n, n) {
        return Err(Error::InvalidState(format!("expected {n}x{n}, got {:?}", rho0.shape())));
    }
    let herm = (rho0 - rho0.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if herm > 1e-10 {
        return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
    }
    let tr = rho0.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!("trace {tr} != 1")));
    }
    Ok(())
}

pub fn evolve_secular(setup: &EvolutionSetup, rho0: &CMat, times: &[f64]) -> Result<EvolutionResult> {
    let n = setup.dim();
    validate_state(rho0, n)?;
    let p0 = setup.to_eigenbasis(rho0);
    let rho = par::map(times, |&t| {
        let mut p = p0.clone();
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let decay = setup.secular_exponent(t, j, k);
                let phase = C64::new(-decay, -setup.omega(j, k) * t).exp();
                p[(j, k)] *= phase;
            }
        }
        setup.from_eigenbasis(&p)
    });
    Ok(EvolutionResult::assemble(times, rho, setup.equilibrium(rho0)))
}

/// Which J(t, ω1, ω2) terms of K_i(t) are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermFilter {
    /// ω1 = ω2 = 0 only; reproduces the secular propagator.
    ZeroFrequency,
    /// ω1 + ω2 = 0, which includes noise-induced transitions.
    Resonant,
}

pub fn evolve_full(setup: &EvolutionSetup, rho0: &CMat, times: &[f64]) -> Result<EvolutionResult> {
    evolve_full_filtered(setup, rho0, times, TermFilter::Resonant)
}

pub fn evolve_full_filtered(
    setup: &EvolutionSetup,
    rho0: &CMat,
    times: &[f64],
    filter: TermFilter,
) -> Result<EvolutionResult> {
    let n = setup.dim();
    validate_state(rho0, n)?;
    let p0 = setup.to_eigenbasis(rho0);
    let v0 = nalgebra::DVector::from_iterator(n * n, (0..n * n).map(|i| p0[(i / n, i % n)]));
    let rho = par::map(times, |&t| {
        let k = liouville_k(setup, t, filter);
        let v = expm(&(-k)) * &v0;
        let mut p = CMat::zeros(n, n);
        for a in 0..n {
            for c in 0..n {
                p[(a, c)] = v[a * n + c] * C64::new(0.0, -setup.omega(a, c) * t).exp();
            }
        }
        setup.from_eigenbasis(&p)
    });
    Ok(EvolutionResult::assemble(times, rho, setup.equilibrium(rho0)))
}

/// Σ_i K_i(t) acting on vec(ρ_I), index a·N + c for element (a, c).
pub fn liouville_k(setup: &EvolutionSetup, t: f64, filter: TermFilter) -> CMat {
    let n = setup.dim();
    let idx = |a: usize, c: usize| a * n + c;
    let mut k = CMat::zeros(n * n, n * n);
    let zero = |w: f64| w.abs() <= setup.zero_tol;
    for (ci, channel) in setup.channels.iter().enumerate() {
        let h = setup.projected(ci);
        let jt = ProfileTable::new(setup, &channel.spectrum, t, filter);
        let keep = |w1: f64, w2: f64| match filter {
            TermFilter::ZeroFrequency => zero(w1) && zero(w2),
            TermFilter::Resonant => zero(w1 + w2),
        };
        for a in 0..n {
            for c in 0..n {
                let row = idx(a, c);
                for b in 0..n {
                    for d in 0..n {
                        // h h ρ
                        let (w1, w2) = (setup.omega(a, b), setup.omega(b, d));
                        if keep(w1, w2) && h[(a, b)] != 0.0 && h[(b, d)] != 0.0 {
                            k[(row, idx(d, c))] += jt.get(a, b) * (h[(a, b)] * h[(b, d)]);
                        }
                        // ρ h h
                        let (w1, w2) = (setup.omega(d, c), setup.omega(b, d));
                        if keep(w1, w2) && h[(b, d)] != 0.0 && h[(d, c)] != 0.0 {
                            k[(row, idx(a, b))] += jt.get(d, c) * (h[(b, d)] * h[(d, c)]);
                        }
                        // h ρ h
                        let (w1, w2) = (setup.omega(a, b), setup.omega(d, c));
                        if keep(w1, w2) && h[(a, b)] != 0.0 && h[(d, c)] != 0.0 {
                            let j = jt.get(a, b) + jt.get(d, c);
                            k[(row, idx(b, d))] -= j * (h[(a, b)] * h[(d, c)]);
                        }
                    }
                }
            }
        }
    }
    k
}

/// J(t, ω_ab, −ω_ab) for every level pair; all kept terms have ω2 = −ω1.
struct ProfileTable {
    n: usize,
    values: Vec<C64>,
}

impl ProfileTable {
    fn new(setup: &EvolutionSetup, spec: &NoiseSpectrum, t: f64, filter: TermFilter) -> Self {
        let n = setup.dim();
        let j0 = C64::new(j00(spec, t), 0.0);
        let mut values = vec![j0; n * n];
        if filter == TermFilter::Resonant {
            for a in 0..n {
                for b in (a + 1)..n {
                    let w = setup.omega(a, b);
                    if w.abs() > setup.zero_tol {
                        let v = decay_profile_quadrature(spec, t, w, -w);
                        values[a * n + b] = v;
                        values[b * n + a] = v.conj();
                    }
                }
            }
        }
        Self { n, values }
    }

    fn get(&self, a: usize, b: usize) -> C64 {
        self.values[a * self.n + b]
    }
}

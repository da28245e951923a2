//! Monte-Carlo trajectories of classical 1/f noise.
//!
//! Each channel's f_i(t) is a sum of random-phase cosines on a log-spaced grid,
//! a_m cos(ω_m t + φ_m) with a_m = √(4 S(ω_m) Δω_m), so that ⟨f²⟩ = S(0) = 1.
//! Pure components of ρ0 are propagated with RK4 in the interaction picture
//! of H0 and averaged.

use super::propagator::{validate_state, EvolutionResult, NoiseChannel};
use crate::linalg::{hermitian_eigen, symmetric_eigen, CMat, RMat, C64};
use crate::par;
use crate::{Error, Result};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub trajectories: usize,
    pub seed: u64,
    /// Upper bound on the RK4 step (s).
    pub max_step: f64,
    pub modes: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self { trajectories: 500, seed: 0, max_step: 1e-12, modes: 256 }
    }
}

const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// One sampled realisation f(t) of a noise channel.
#[derive(Debug, Clone)]
pub struct NoiseSample {
    pub omegas: Vec<f64>,
    pub amplitude: f64,
    pub phases: Vec<f64>,
}

impl NoiseSample {
    pub fn draw(spec: &super::NoiseSpectrum, modes: usize, rng: &mut impl Rng) -> Self {
        let dx = spec.log_ratio() / modes as f64;
        let omegas = (0..modes).map(|m| spec.omega_l * ((m as f64 + 0.5) * dx).exp()).collect();
        let phases = (0..modes).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        // S(ω_m)Δω_m = S0 Δx for every mode on a log grid
        Self { omegas, amplitude: (4.0 * spec.s0 * dx).sqrt(), phases }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * self.omegas.iter().zip(&self.phases).map(|(w, p)| (w * t + p).cos()).sum::<f64>()
    }
}

/// Phasors e^{i(ω t + φ)} advanced by fixed half steps.
struct Phasors {
    current: Vec<C64>,
    half_step: Vec<C64>,
    omegas: Vec<f64>,
    phases: Vec<f64>,
}

impl Phasors {
    fn new(sample: &NoiseSample, t0: f64, half: f64) -> Self {
        let current = sample.omegas.iter().zip(&sample.phases).map(|(w, p)| C64::new(0.0, w * t0 + p).exp()).collect();
        let half_step = sample.omegas.iter().map(|w| C64::new(0.0, w * half).exp()).collect();
        Self { current, half_step, omegas: sample.omegas.clone(), phases: sample.phases.clone() }
    }

    fn reset(&mut self, t0: f64, half: f64) {
        for i in 0..self.current.len() {
            self.current[i] = C64::new(0.0, self.omegas[i] * t0 + self.phases[i]).exp();
            self.half_step[i] = C64::new(0.0, self.omegas[i] * half).exp();
        }
    }

    fn sum_re(&self) -> f64 {
        self.current.iter().map(|z| z.re).sum()
    }

    fn advance(&mut self) {
        for (z, s) in self.current.iter_mut().zip(&self.half_step) {
            *z *= s;
        }
    }
}

pub fn evolve_monte_carlo(
    h0: &RMat,
    channels: &[NoiseChannel],
    rho0: &CMat,
    times: &[f64],
    config: &MonteCarloConfig,
) -> Result<EvolutionResult> {
    let n = h0.nrows();
    validate_state(rho0, n)?;
    if config.trajectories == 0 {
        return Err(Error::InvalidParameter("at least one trajectory is required".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter("times must be nonnegative and ascending".into()));
    }
    let eig = symmetric_eigen(h0)?;
    let r = eig.vectors.map(|x| C64::new(x, 0.0));
    let energies = eig.values;
    let projected: Vec<CMat> = channels
        .iter()
        .map(|c| (eig.vectors.transpose() * &c.operator * &eig.vectors).map(|x| C64::new(x, 0.0)))
        .collect();

    // pure-state decomposition, in the eigenbasis of H0
    let (weights, vectors) = hermitian_eigen(rho0)?;
    let pure: Vec<(f64, DVector<C64>)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 1e-14)
        .map(|(k, &w)| (w, r.transpose() * vectors.column(k)))
        .collect();

    let ctx = Context { energies: &energies, projected: &projected, rotation: &r, times, config };
    let indices: Vec<usize> = (0..config.trajectories).collect();
    let per_traj: Vec<Result<Vec<CMat>>> = par::map(&indices, |&i| ctx.trajectory(i, channels, &pure));
    let mut sum = vec![CMat::zeros(n, n); times.len()];
    for traj in per_traj {
        for (acc, rho) in sum.iter_mut().zip(traj?) {
            *acc += rho;
        }
    }
    let scale = C64::new(1.0 / config.trajectories as f64, 0.0);
    let rho: Vec<CMat> = sum.into_iter().map(|m| m * scale).collect();
    let p = r.adjoint() * rho0 * &r;
    let eq = &r * CMat::from_diagonal(&p.diagonal()) * r.adjoint();
    let mut out = EvolutionResult {
        times: times.to_vec(),
        rho,
        equilibrium: eq,
        min_eigenvalue: f64::NAN,
        warnings: Vec::new(),
    };
    out.min_eigenvalue = out
        .rho
        .iter()
        .filter_map(|m| hermitian_eigen(&((m + m.adjoint()) * C64::new(0.5, 0.0))).ok())
        .map(|(v, _)| v[0])
        .fold(f64::INFINITY, f64::min);
    Ok(out)
}

struct Context<'a> {
    energies: &'a [f64],
    projected: &'a [CMat],
    rotation: &'a CMat,
    times: &'a [f64],
    config: &'a MonteCarloConfig,
}

impl Context<'_> {
    fn trajectory(&self, index: usize, channels: &[NoiseChannel], pure: &[(f64, DVector<C64>)]) -> Result<Vec<CMat>> {
        let n = self.energies.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index as u64);
        let samples: Vec<NoiseSample> =
            channels.iter().map(|c| NoiseSample::draw(&c.spectrum, self.config.modes, &mut rng)).collect();

        let mut out = vec![CMat::zeros(n, n); self.times.len()];
        for (w, psi0) in pure {
            let mut psi = psi0.clone();
            let mut t = 0.0;
            let mut phasors: Vec<Phasors> = samples.iter().map(|s| Phasors::new(s, 0.0, 0.0)).collect();
            for (k, &target) in self.times.iter().enumerate() {
                let span = target - t;
                if span > 0.0 {
                    let steps = (span / self.config.max_step).ceil().max(1.0) as usize;
                    let dt = span / steps as f64;
                    for p in phasors.iter_mut() {
                        p.reset(t, 0.5 * dt);
                    }
                    let mut frame = FrameSteps::new(self.energies, t, dt);
                    for _ in 0..steps {
                        psi = self.rk4(&psi, &mut phasors, &samples, &mut frame);
                    }
                    t = target;
                    let drift = (psi.norm_squared() - 1.0).abs();
                    if drift > NORM_DRIFT_LIMIT {
                        return Err(Error::Unstable(drift));
                    }
                    // the integrator is not exactly norm preserving
                    psi.unscale_mut(psi.norm());
                }
                // back to the lab frame: ψ = R e^{−iEt} c
                let lab = self.rotation * DVector::from_fn(n, |j, _| psi[j] * C64::new(0.0, -self.energies[j] * t).exp());
                out[k] += &lab * lab.adjoint() * C64::new(*w, 0.0);
            }
        }
        Ok(out)
    }

    /// One RK4 step of i ċ_j = Σ_i f_i(t) Σ_k h'_jk e^{iω_jk t} c_k.
    fn rk4(&self, c: &DVector<C64>, ph: &mut [Phasors], samples: &[NoiseSample], frame: &mut FrameSteps) -> DVector<C64> {
        let f0: Vec<f64> = ph.iter().zip(samples).map(|(p, s)| s.amplitude * p.sum_re()).collect();
        let e0 = frame.current.clone();
        ph.iter_mut().for_each(Phasors::advance);
        frame.advance();
        let f1: Vec<f64> = ph.iter().zip(samples).map(|(p, s)| s.amplitude * p.sum_re()).collect();
        let e1 = frame.current.clone();
        ph.iter_mut().for_each(Phasors::advance);
        frame.advance();
        let f2: Vec<f64> = ph.iter().zip(samples).map(|(p, s)| s.amplitude * p.sum_re()).collect();
        let e2 = frame.current.clone();
        let dt = frame.dt;

        let k1 = self.rhs(c, &f0, &e0);
        let k2 = self.rhs(&(c + &k1 * C64::new(0.5 * dt, 0.0)), &f1, &e1);
        let k3 = self.rhs(&(c + &k2 * C64::new(0.5 * dt, 0.0)), &f1, &e1);
        let k4 = self.rhs(&(c + &k3 * C64::new(dt, 0.0)), &f2, &e2);
        c + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0)
    }

    fn rhs(&self, c: &DVector<C64>, f: &[f64], phase: &[C64]) -> DVector<C64> {
        let n = c.len();
        // d_k = e^{-iE_k t} c_k, then ċ_j = −i e^{iE_j t} Σ_i f_i (h'_i d)_j
        let d = DVector::from_fn(n, |k, _| phase[k].conj() * c[k]);
        let mut acc = DVector::zeros(n);
        for (h, &fi) in self.projected.iter().zip(f) {
            acc += h * &d * C64::new(fi, 0.0);
        }
        DVector::from_fn(n, |j, _| C64::new(0.0, -1.0) * phase[j] * acc[j])
    }
}

/// e^{iE_j t} on the half-step lattice of one output interval.
struct FrameSteps {
    current: Vec<C64>,
    half: Vec<C64>,
    dt: f64,
}

impl FrameSteps {
    fn new(energies: &[f64], t0: f64, dt: f64) -> Self {
        Self {
            current: energies.iter().map(|e| C64::new(0.0, e * t0).exp()).collect(),
            half: energies.iter().map(|e| C64::new(0.0, e * 0.5 * dt).exp()).collect(),
            dt,
        }
    }

    fn advance(&mut self) {
        for (z, s) in self.current.iter_mut().zip(&self.half) {
            *z *= s;
        }
    }
}

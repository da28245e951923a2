//! Two dipole-coupled flip-flop qubits with identical biasing.
//!
//! Two-qubit basis index is 4·j + k for single-qubit dressed levels (j, k),
//! so |01⟩ = 1, |10⟩ = 4, |02⟩ = 2, |20⟩ = 8. Levels are ordered by energy,
//! not by charge/spin character.

use crate::linalg::{kron, symmetric_eigen, RMat};
use crate::noise::{NoiseChannel, NoiseSpectrum};
use crate::single_qubit::{dressed_position, spectrum, z_coefficients_numeric, FlipFlopSpectrum, QubitBias, ZCoefficients};
use crate::units::{muev, PhysicalConstants};
use crate::{Error, Result};

pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_818_8e-12;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;

pub const KET_01: usize = 1;
pub const KET_10: usize = 4;
pub const KET_02: usize = 2;
pub const KET_20: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipoleParams {
    /// V_dd in rad/s.
    Direct(f64),
    /// Dipole lengths d1, d2 and separation r in metres.
    Geometry { d1: f64, d2: f64, r: f64, eps_r: f64 },
}

/// V_dd = e² d1 d2 / (16π ε_r ε_0 r³), returned as an angular frequency.
pub fn dipole_strength(params: DipoleParams) -> Result<f64> {
    match params {
        DipoleParams::Direct(v) if v > 0.0 && v.is_finite() => Ok(v),
        DipoleParams::Direct(v) => Err(Error::InvalidParameter(format!("v_dd must be positive (got {v:e})"))),
        DipoleParams::Geometry { d1, d2, r, eps_r } => {
            if !(d1 > 0.0 && d2 > 0.0 && r > 0.0) || eps_r < 1.0 {
                return Err(Error::InvalidParameter("geometry needs positive lengths and eps_r >= 1".into()));
            }
            let joules = ELEMENTARY_CHARGE.powi(2) * d1 * d2
                / (16.0 * std::f64::consts::PI * eps_r * VACUUM_PERMITTIVITY * r.powi(3));
            Ok(joules / HBAR)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRates {
    /// Direct flip-flop swap V_dd z31².
    pub g_f: f64,
    /// Leakage-mediating V_dd |z31 z10|.
    pub g_l: f64,
    /// Charge swap V_dd z10².
    pub g_c: f64,
    /// Leakage-state dephasing strength ω_n (z30 − z03)/2.
    pub gamma1: f64,
    /// Spin–charge transition strength ω_n (z11 + z22)/2.
    pub gamma2: f64,
    /// δ = E_2 − E_1.
    pub delta: f64,
}

pub fn coupling_rates(z: &ZCoefficients, v_dd: f64, spec: &FlipFlopSpectrum, omega_n: f64) -> CouplingRates {
    CouplingRates {
        g_f: v_dd * z.z31() * z.z31(),
        g_l: v_dd * (z.z31() * z.z10()).abs(),
        g_c: v_dd * z.z10() * z.z10(),
        gamma1: omega_n * (z.z30() - z.z03()) / 2.0,
        gamma2: omega_n * (z.z11() + z.z22()) / 2.0,
        delta: spec.delta(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// H_dip = V_dd Z⊗Z with every z_jk.
    FullZ,
    /// Only the z31 and z10 terms.
    Truncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitSystem {
    pub hamiltonian: RMat,
    pub basis_labels: Vec<(usize, usize)>,
    pub mode: CouplingMode,
    /// Single-qubit Z in the dressed basis used for the coupling.
    pub z_dressed: RMat,
}

impl TwoQubitSystem {
    /// Independent noise on each donor, h_i = (ω_n/2) Z_i.
    pub fn channels(&self, omega_n: f64, spec: NoiseSpectrum) -> Result<Vec<NoiseChannel>> {
        let i4 = RMat::identity(4, 4);
        Ok(vec![
            NoiseChannel::new(kron(&self.z_dressed, &i4) * (0.5 * omega_n), spec)?,
            NoiseChannel::new(kron(&i4, &self.z_dressed) * (0.5 * omega_n), spec)?,
        ])
    }

    /// Rows/columns {|01⟩, |10⟩, |02⟩, |20⟩}.
    pub fn leakage_block(&self) -> RMat {
        let idx = [KET_01, KET_10, KET_02, KET_20];
        RMat::from_fn(4, 4, |i, j| self.hamiltonian[(idx[i], idx[j])])
    }
}

pub fn build_two_qubit(spec: &FlipFlopSpectrum, z: &ZCoefficients, v_dd: f64, mode: CouplingMode) -> TwoQubitSystem {
    let zd = match mode {
        CouplingMode::FullZ => z.dressed_matrix(),
        CouplingMode::Truncated => {
            let mut t = [[0.0; 4]; 4];
            t[3][1] = z.z31();
            t[1][0] = z.z10();
            ZCoefficients { table: t, source: z.source }.dressed_matrix()
        }
    };
    let e = spec.energies;
    let mut h = kron(&zd, &zd) * v_dd;
    for j in 0..4 {
        for k in 0..4 {
            h[(4 * j + k, 4 * j + k)] += e[j] + e[k];
        }
    }
    let basis_labels = (0..16).map(|i| (i / 4, i % 4)).collect();
    TwoQubitSystem { hamiltonian: h, basis_labels, mode, z_dressed: zd }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAnalytics {
    pub omega_slow: f64,
    pub omega_fast: f64,
    pub gamma_slow: f64,
    pub gamma_fast: f64,
    pub omega_c: f64,
    pub gamma_c: f64,
    pub q_a: f64,
    pub q_b: f64,
    pub q_c: f64,
}

pub fn gate_analytics(r: &CouplingRates) -> Result<GateAnalytics> {
    let (gf, gl, gc, g1, g2, d) = (r.g_f, r.g_l, r.g_c, r.gamma1, r.gamma2, r.delta);
    let den = gc * gc - d * d;
    if den.abs() <= 1e-12 * (gc * gc).max(d * d) {
        return Err(Error::Divergent("1/(g_c^2 - delta^2)"));
    }
    if d == 0.0 || gc == 0.0 {
        return Err(Error::Divergent("1/delta or 1/g_c"));
    }
    let omega_slow = 2.0 * gf * d * d / den;
    let gamma_slow = 2.0 * d * gf / (gc * gc) * (2.0 * g1 - if gf != 0.0 { gl / gf * g2 } else { 0.0 });
    let omega_c = 2.0 * gf * d * d / (d * d - gc * gc);
    let gamma_c = 2.0 * gl * g2 / d - 4.0 * g1 * gc * gl * gl / d.powi(3);
    let qc_den = gl * (d * d - gc * gc) * (d * d * g2 - 2.0 * gc * gl * g1);
    Ok(GateAnalytics {
        omega_slow,
        omega_fast: gc - d,
        gamma_slow,
        gamma_fast: g1,
        omega_c,
        gamma_c,
        q_a: 3.0 * gf / g1,
        q_b: 2.0 * gf * d * d / (g1 * den),
        q_c: if qc_den == 0.0 { f64::INFINITY } else { d.powi(5) * gf / qc_den },
    })
}

/// Equilibrium leakage from |01⟩: (sin²φ₊ + sin²φ₋)/4 with
/// tan φ± = ±2g_l / (−δ ∓ (g_c − g_f)).
pub fn equilibrium_leakage(r: &CouplingRates) -> f64 {
    let pp = (2.0 * r.g_l).atan2(-r.delta - (r.g_c - r.g_f));
    let pm = (-2.0 * r.g_l).atan2(-r.delta + (r.g_c - r.g_f));
    (pp.sin().powi(2) + pm.sin().powi(2)) / 4.0
}

/// Long-time relaxation rate from noise-induced charge and spin flips,
/// π S0 ω_n² (z10²/ω_0 + z31²/ω_B).
pub fn long_time_t1(z: &ZCoefficients, omega_n: f64, omega0: f64, omega_b: f64, noise: &NoiseSpectrum) -> f64 {
    std::f64::consts::PI * noise.s0 * omega_n * omega_n * (z.z10().powi(2) / omega0 + z.z31().powi(2) / omega_b)
}

/// One oscillation component of a population trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    /// Angular frequency.
    pub omega: f64,
    pub amplitude: f64,
}

/// Exact line decomposition of |⟨target|e^{−iHt}|ψ0⟩|² for real ψ0:
/// Σ_n c_n² + Σ_{n<m} 2 c_n c_m cos((λ_n − λ_m)t), c_n = U_tn (Uᵀψ0)_n.
/// Lines closer than `merge_tol` are combined. Sorted by |amplitude|.
pub fn population_lines(h: &RMat, psi0: &[f64], target: usize, merge_tol: f64) -> Result<Vec<Line>> {
    let eig = symmetric_eigen(h)?;
    let n = h.nrows();
    let proj: Vec<f64> = (0..n).map(|k| (0..n).map(|i| eig.vectors[(i, k)] * psi0[i]).sum()).collect();
    let c: Vec<f64> = (0..n).map(|k| eig.vectors[(target, k)] * proj[k]).collect();
    let mut lines: Vec<Line> = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let amp = 2.0 * c[a] * c[b];
            if amp.abs() < 1e-15 {
                continue;
            }
            let w = (eig.values[b] - eig.values[a]).abs();
            if let Some(l) = lines.iter_mut().find(|l| (l.omega - w).abs() <= merge_tol) {
                l.amplitude += amp;
            } else {
                lines.push(Line { omega: w, amplitude: amp });
            }
        }
    }
    lines.sort_by(|x, y| y.amplitude.abs().total_cmp(&x.amplitude.abs()));
    Ok(lines)
}

/// Bisection on V_dd ∈ [lo, hi] until `gate_time(V_dd)` matches `target`
/// to relative 1e-6. `gate_time` must be monotone on the bracket.
pub fn calibrate_vdd(target: f64, lo: f64, hi: f64, gate_time: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = gate_time(a)? - target;
    let fb = gate_time(b)? - target;
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed(format!(
            "gate time {target:e} s is not between {:e} and {:e}",
            fa + target,
            fb + target
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = gate_time(m)? - target;
        if fm.abs() <= 1e-6 * target {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Named operating points on the V_t = 47.15 μeV map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatingPoint {
    A,
    B,
    C,
}

impl OperatingPoint {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            other => Err(Error::InvalidParameter(format!("unknown operating point '{other}' (expected a, b or c)"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
        }
    }

    /// (B in tesla, E_z − E_c in V/cm).
    pub fn coordinates(&self) -> (f64, f64) {
        match self {
            Self::A => (0.796, 3.13),
            Self::B => (0.806, 0.95),
            Self::C => (0.771, 0.0),
        }
    }

    pub fn bias(&self, tunnel_coupling: f64, constants: PhysicalConstants) -> Result<QubitBias> {
        let (b, e) = self.coordinates();
        QubitBias::from_field_offset(e, tunnel_coupling, b, constants)
    }
}

pub const DEFAULT_TUNNEL_COUPLING_UEV: f64 = 47.15;

/// Everything derived at one symmetric operating point.
#[derive(Debug, Clone)]
pub struct PairModel {
    pub bias: QubitBias,
    pub spectrum: FlipFlopSpectrum,
    pub z: ZCoefficients,
    pub rates: CouplingRates,
    pub system: TwoQubitSystem,
}

impl PairModel {
    pub fn new(bias: QubitBias, v_dd: f64, omega_n: f64, mode: CouplingMode) -> Result<Self> {
        let spec = spectrum(&bias)?;
        let z = z_coefficients_numeric(&spec);
        let rates = coupling_rates(&z, v_dd, &spec, omega_n);
        let system = build_two_qubit(&spec, &z, v_dd, mode);
        Ok(Self { bias, spectrum: spec, z, rates, system })
    }

    pub fn at_point(point: OperatingPoint, v_dd: f64, omega_n: f64, constants: PhysicalConstants) -> Result<Self> {
        Self::new(point.bias(muev(DEFAULT_TUNNEL_COUPLING_UEV), constants)?, v_dd, omega_n, CouplingMode::FullZ)
    }

    /// Analytic point-a swap time π/(3g_f/2).
    pub fn slow_swap_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / (3.0 * self.rates.g_f)
    }

    /// π over the strongest line of the noiseless P_01 trace from |01⟩.
    pub fn dominant_swap_time(&self) -> Result<f64> {
        let mut psi = vec![0.0; 16];
        psi[KET_01] = 1.0;
        let lines = population_lines(&self.system.hamiltonian, &psi, KET_01, 1e-6 * self.rates.g_f.max(1.0))?;
        let top = lines.first().ok_or_else(|| Error::InvalidParameter("no oscillating line".into()))?;
        Ok(std::f64::consts::PI / top.omega)
    }

    pub fn dressed_position(&self) -> RMat {
        dressed_position(&self.spectrum)
    }
}

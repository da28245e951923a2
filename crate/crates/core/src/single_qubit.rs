//! Single flip-flop qubit: Hamiltonian, spectra, position-operator
//! coefficients and sweet spots.
//!
//! Product basis ordering is {g↓, g↑, e↓, e↑}, index = 2·charge + spin, where
//! the charge label refers to the charge-qubit eigenbasis and the spin label
//! to the bare flip-flop basis.

use crate::linalg::{kron, symmetric_eigen, RMat};
use crate::noise::{single_mode_time, CoherenceTime, NoiseSpectrum};
use crate::units::PhysicalConstants;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBias {
    /// Detuning ε (rad/s), signed.
    pub epsilon: f64,
    /// Tunnel coupling V_t (rad/s).
    pub tunnel_coupling: f64,
    /// Static field B (T).
    pub b_field: f64,
    pub constants: PhysicalConstants,
}

impl QubitBias {
    pub fn new(epsilon: f64, tunnel_coupling: f64, b_field: f64, constants: PhysicalConstants) -> Result<Self> {
        let bias = Self { epsilon, tunnel_coupling, b_field, constants };
        bias.validate()?;
        Ok(bias)
    }

    /// Bias from a field offset E_z − E_c in V/cm.
    pub fn from_field_offset(e_vcm: f64, tunnel_coupling: f64, b_field: f64, constants: PhysicalConstants) -> Result<Self> {
        Self::new(constants.detuning_from_field(e_vcm), tunnel_coupling, b_field, constants)
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if !(self.tunnel_coupling > 0.0 && self.tunnel_coupling.is_finite()) {
            return Err(Error::InvalidParameter("tunnel coupling must be positive".into()));
        }
        if !(self.b_field > 0.0 && self.b_field.is_finite()) {
            return Err(Error::InvalidParameter("field must be positive".into()));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite".into()));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    pub fn field_offset(&self) -> f64 {
        self.constants.field_from_detuning(self.epsilon)
    }

    pub fn omega_b(&self) -> f64 {
        self.constants.omega_b(self.b_field)
    }

    pub fn delta_omega_b(&self) -> f64 {
        self.constants.delta_omega_b(self.b_field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeQubit {
    pub omega0: f64,
    /// Mixing angle in (0, π); tan η = V_t/ε.
    pub eta: f64,
}

pub fn charge_qubit(bias: &QubitBias) -> ChargeQubit {
    ChargeQubit {
        omega0: bias.epsilon.hypot(bias.tunnel_coupling),
        eta: bias.tunnel_coupling.atan2(bias.epsilon),
    }
}

fn pauli() -> (RMat, RMat, RMat) {
    let i = RMat::identity(2, 2);
    let sz = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    (i, sx, sz)
}

/// Electron position operator Z in the product basis.
pub fn position_operator(eta: f64) -> RMat {
    let (i, sx, sz) = pauli();
    kron(&(sz * eta.cos() + sx * eta.sin()), &i)
}

pub fn build_hamiltonian(bias: &QubitBias) -> RMat {
    let q = charge_qubit(bias);
    let (c, s) = (q.eta.cos(), q.eta.sin());
    let wb = bias.omega_b();
    let dwb = bias.delta_omega_b();
    let a = bias.constants.hyperfine_a;
    let (i, sx, sz) = pauli();
    let zc = &sz * c + &sx * s;

    let h_charge = kron(&sz, &i) * (-0.5 * q.omega0);
    let h_b = kron(&i, &sz) * (-0.5 * wb);
    let h_db = kron(&(&i + &zc), &sz) * (-0.25 * dwb);
    let h_a = kron(&(&i - &zc), &(&i - &sx * 2.0)) * (-a / 8.0);
    let mut h = h_charge + h_b + h_db + h_a;
    // exact symmetry
    for r in 0..4 {
        for col in (r + 1)..4 {
            h[(col, r)] = h[(r, col)];
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Exact,
    Perturbative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipFlopSpectrum {
    /// Ascending.
    pub energies: [f64; 4],
    /// Columns are eigenvectors in the product basis.
    pub states: RMat,
    pub source: SpectrumSource,
    pub charge: ChargeQubit,
    pub omega_b: f64,
    pub delta_omega_b: f64,
}

impl FlipFlopSpectrum {
    pub fn omega_10(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// δ = E_2 − E_1.
    pub fn delta(&self) -> f64 {
        self.energies[2] - self.energies[1]
    }
}

/// Diagonalize a 4×4 Hamiltonian. The bias-dependent metadata is taken from
/// `bias`.
pub fn exact_spectrum(h: &RMat, bias: &QubitBias) -> Result<FlipFlopSpectrum> {
    if h.shape() != (4, 4) {
        return Err(Error::InvalidParameter("expected a 4x4 Hamiltonian".into()));
    }
    let eig = symmetric_eigen(h)?;
    Ok(FlipFlopSpectrum {
        energies: [eig.values[0], eig.values[1], eig.values[2], eig.values[3]],
        states: eig.vectors,
        source: SpectrumSource::Exact,
        charge: charge_qubit(bias),
        omega_b: bias.omega_b(),
        delta_omega_b: bias.delta_omega_b(),
    })
}

pub fn spectrum(bias: &QubitBias) -> Result<FlipFlopSpectrum> {
    exact_spectrum(&build_hamiltonian(bias), bias)
}

fn check_nondegenerate(bias: &QubitBias) -> Result<(ChargeQubit, f64, f64, f64)> {
    let q = charge_qubit(bias);
    let wb = bias.omega_b();
    let a = bias.constants.hyperfine_a;
    let gap = (q.omega0 - wb).abs();
    if gap <= a / 4.0 {
        return Err(Error::Degenerate { gap, limit: a / 4.0 });
    }
    Ok((q, wb, bias.delta_omega_b(), a))
}

/// Second-order energies and first-order states of the dressed qubit.
pub fn perturbative_spectrum(bias: &QubitBias) -> Result<FlipFlopSpectrum> {
    let (q, wb, d, a) = check_nondegenerate(bias)?;
    let w0 = q.omega0;
    let (c, s) = (q.eta.cos(), q.eta.sin());
    let s2 = s * s;
    let pre = a * a / (16.0 * wb);
    let r4 = wb / (4.0 * w0);
    let rp = wb / (w0 + wb);
    let rm = wb / (w0 - wb);
    let r1 = wb * d / (a * w0);
    let r2 = wb * d * d / (a * a * w0);
    let e = [
        0.5 * (-w0 - wb) - a / 8.0 * (1.0 - c) - d / 4.0 * (1.0 + c)
            - pre * ((1.0 - c).powi(2) + s2 * (r4 + rp - r1 + r2)),
        0.5 * (-w0 + wb) - a / 8.0 * (1.0 - c) + d / 4.0 * (1.0 + c)
            - pre * (-(1.0 - c).powi(2) + s2 * (r4 + rm + r1 + r2)),
        0.5 * (w0 - wb) - a / 8.0 * (1.0 + c) - d / 4.0 * (1.0 - c)
            - pre * ((1.0 + c).powi(2) + s2 * (-r4 - rm + r1 - r2)),
        0.5 * (w0 + wb) - a / 8.0 * (1.0 + c) + d / 4.0 * (1.0 - c)
            - pre * (-(1.0 + c).powi(2) + s2 * (-r4 - rp - r1 - r2)),
    ];

    let u = a / (4.0 * wb);
    let m_ = a * s / (8.0 * w0) * (1.0 - 2.0 * d / a);
    let p_ = a * s / (8.0 * w0) * (1.0 + 2.0 * d / a);
    let sp = a * s / (4.0 * (w0 + wb));
    let sm = a * s / (4.0 * (w0 - wb));
    // columns |0>..|3>, rows g↓, g↑, e↓, e↑
    #[rustfmt::skip]
    let raw = RMat::from_row_slice(4, 4, &[
        1.0,            u * (1.0 - c),  m_,             -sp,
        -u * (1.0 - c), 1.0,            -sm,            p_,
        -m_,            sm,             1.0,            u * (1.0 + c),
        sp,             -p_,            -u * (1.0 + c), 1.0,
    ]);
    let mut states = RMat::zeros(4, 4);
    for k in 0..4 {
        let mut v = raw.column(k).into_owned();
        for j in 0..k {
            let w = states.column(j).into_owned();
            v -= &w * w.dot(&v);
        }
        v /= v.norm();
        states.set_column(k, &v);
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| e[i].total_cmp(&e[j]));
    let mut sorted = RMat::zeros(4, 4);
    for (k, &i) in order.iter().enumerate() {
        sorted.set_column(k, &states.column(i));
    }
    Ok(FlipFlopSpectrum {
        energies: order.map(|i| e[i]),
        states: sorted,
        source: SpectrumSource::Perturbative,
        charge: q,
        omega_b: wb,
        delta_omega_b: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZSource {
    Formula,
    Numeric,
}

/// Coefficients z_jk of Z = Σ z_jk σ'_j τ'_k, indices j,k ∈ {0:I, 1:x, 2:y, 3:z}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZCoefficients {
    pub table: [[f64; 4]; 4],
    pub source: ZSource,
}

impl ZCoefficients {
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.table[j][k]
    }
    pub fn z03(&self) -> f64 {
        self.table[0][3]
    }
    pub fn z10(&self) -> f64 {
        self.table[1][0]
    }
    pub fn z30(&self) -> f64 {
        self.table[3][0]
    }
    pub fn z31(&self) -> f64 {
        self.table[3][1]
    }
    pub fn z33(&self) -> f64 {
        self.table[3][3]
    }
    pub fn z11(&self) -> f64 {
        self.table[1][1]
    }
    pub fn z22(&self) -> f64 {
        self.table[2][2]
    }
    pub fn z01(&self) -> f64 {
        self.table[0][1]
    }
    pub fn z13(&self) -> f64 {
        self.table[1][3]
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.table.iter().flatten().map(|z| z * z).sum()
    }

    /// Z in the dressed basis rebuilt from the table (σ_y⊗σ_y is real; all
    /// other products containing a single σ_y have zero coefficient).
    pub fn dressed_matrix(&self) -> RMat {
        let p = real_paulis();
        let mut z = RMat::zeros(4, 4);
        for j in 0..4 {
            for k in 0..4 {
                let c = self.table[j][k];
                if c != 0.0 {
                    if let Some(m) = product(&p, j, k) {
                        z += m * c;
                    }
                }
            }
        }
        z
    }
}

fn real_paulis() -> [RMat; 4] {
    let (i, sx, sz) = pauli();
    [i, sx, RMat::zeros(2, 2), sz]
}

/// P_j ⊗ P_k when it is real; the y⊗y product is handled explicitly.
fn product(p: &[RMat; 4], j: usize, k: usize) -> Option<RMat> {
    match (j == 2, k == 2) {
        (false, false) => Some(kron(&p[j], &p[k])),
        (true, true) => {
            // σy⊗σy = antidiag(-1, 1, 1, -1)
            let mut m = RMat::zeros(4, 4);
            m[(0, 3)] = -1.0;
            m[(1, 2)] = 1.0;
            m[(2, 1)] = 1.0;
            m[(3, 0)] = -1.0;
            Some(m)
        }
        _ => None,
    }
}

pub fn z_coefficients_formula(bias: &QubitBias) -> Result<ZCoefficients> {
    let (q, wb, d, a) = check_nondegenerate(bias)?;
    let w0 = q.omega0;
    let (c, s) = (q.eta.cos(), q.eta.sin());
    let den = w0 * w0 - wb * wb;
    let mut t = [[0.0; 4]; 4];
    t[0][3] = a * a * w0.powi(3) * c * s * s / (4.0 * wb * den * den);
    t[1][0] = s + a * c * s / (4.0 * w0);
    t[3][0] = c - a * s * s / (4.0 * w0);
    t[3][1] = a * w0 * s * s / (2.0 * den);
    t[3][3] = d * s * s / (2.0 * w0);
    t[1][1] = -a * w0 * c * s / (2.0 * den);
    t[2][2] = t[1][1] * w0 / wb;
    t[0][1] = -a * w0 * d * c * s * s / (4.0 * wb * den);
    t[1][3] = -d * c * s / (2.0 * w0);
    Ok(ZCoefficients { table: t, source: ZSource::Formula })
}

/// Z in the dressed basis: Statesᵀ·Z·States.
pub fn dressed_position(spec: &FlipFlopSpectrum) -> RMat {
    spec.states.transpose() * position_operator(spec.charge.eta) * &spec.states
}

/// Pure-dephasing rate of the flip-flop transition,
/// Γ_01 = (ω_n/2)(Z_00 − Z_11) for h = (ω_n/2)Z.
pub fn dephasing_gamma(spec: &FlipFlopSpectrum, omega_n: f64) -> f64 {
    let z = dressed_position(spec);
    0.5 * omega_n * (z[(0, 0)] - z[(1, 1)])
}

/// Flip-flop T_2 from the single-mode envelope exp(−J(t,0,0)Γ_01²).
pub fn dephasing_time(bias: &QubitBias, omega_n: f64, noise: &NoiseSpectrum, threshold: f64) -> Result<CoherenceTime> {
    let g = dephasing_gamma(&spectrum(bias)?, omega_n);
    Ok(single_mode_time(noise, g, threshold))
}

pub fn z_coefficients_numeric(spec: &FlipFlopSpectrum) -> ZCoefficients {
    let zd = dressed_position(spec);
    let p = real_paulis();
    let mut t = [[0.0; 4]; 4];
    for (j, row) in t.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            if let Some(m) = product(&p, j, k) {
                *v = (m * &zd).trace() / 4.0;
            }
        }
    }
    ZCoefficients { table: t, source: ZSource::Numeric }
}

pub fn omega_10(bias: &QubitBias) -> f64 {
    let e = symmetric_eigen(&build_hamiltonian(bias)).expect("Hamiltonian is symmetric");
    e.values[1] - e.values[0]
}

/// Centered finite difference ∂ω_10/∂ε with step 1e-4·V_t.
pub fn d_omega_10(bias: &QubitBias) -> f64 {
    let h = 1e-4 * bias.tunnel_coupling;
    let e = bias.epsilon;
    (omega_10(&bias.with_epsilon(e + h)) - omega_10(&bias.with_epsilon(e - h))) / (2.0 * h)
}

/// Centered finite difference ∂²ω_10/∂ε² with step 1e-3·V_t.
pub fn d2_omega_10(bias: &QubitBias) -> f64 {
    let h = 1e-3 * bias.tunnel_coupling;
    let e = bias.epsilon;
    (omega_10(&bias.with_epsilon(e + h)) - 2.0 * omega_10(bias) + omega_10(&bias.with_epsilon(e - h))) / (h * h)
}

const SCAN_POINTS: usize = 401;
const SCAN_HALF_WIDTH: f64 = 20.0;
/// Slopes below this are treated as round-off.
const SLOPE_FLOOR: f64 = 1e-9;

/// First-order sweet spots at fixed (V_t, B), ascending in ε. Empty when the
/// slope never changes sign on ±20·V_t.
pub fn sweet_spot_detuning(tunnel_coupling: f64, b_field: f64, constants: PhysicalConstants) -> Result<Vec<f64>> {
    let base = QubitBias::new(0.0, tunnel_coupling, b_field, constants)?;
    let lo = -SCAN_HALF_WIDTH * tunnel_coupling;
    let step = 2.0 * SCAN_HALF_WIDTH * tunnel_coupling / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let slope: Vec<f64> = grid.iter().map(|&e| d_omega_10(&base.with_epsilon(e))).collect();
    let f = |e: f64| d_omega_10(&base.with_epsilon(e));

    let mut roots = Vec::new();
    let mut last: Option<usize> = None;
    for i in 0..SCAN_POINTS {
        if slope[i].abs() < SLOPE_FLOOR {
            continue;
        }
        if let Some(j) = last {
            if i - j <= 2 && slope[i].signum() != slope[j].signum() {
                roots.push(bisect(f, grid[j], grid[i], tunnel_coupling));
            }
        }
        last = Some(i);
    }
    Ok(roots)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, scale: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= 1e-10 * scale {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Minimum of ∂ω_10/∂ε over ε ∈ [−20·V_t, 0] and where it is attained.
/// The grid is quadratic in |ε| so narrow dips near ε = 0 are resolved.
fn min_slope(base: &QubitBias) -> (f64, f64) {
    let vt = base.tunnel_coupling;
    let lo = -SCAN_HALF_WIDTH * vt;
    let n = SCAN_POINTS;
    let at = |i: usize| lo * (1.0 - i as f64 / n as f64).powi(2);
    let f = |e: f64| d_omega_10(&base.with_epsilon(e));
    let (mut best, mut bv) = (0, f64::INFINITY);
    for i in 0..=n {
        let v = f(at(i));
        if v < bv {
            best = i;
            bv = v;
        }
    }
    // golden section on the bracketing cell pair
    let mut a = at(best.saturating_sub(1));
    let mut b = at((best + 1).min(n));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > 1e-7 * vt {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    (f(x), x)
}

/// Second-order sweet spot (B_ss, ε_ss) for a given V_t: the field at which
/// a pair of first-order spots on the ε < 0 side is born. Scans B over
/// ω_B ∈ [0.5, 0.999]·V_t.
pub fn second_order_sweet_spot(tunnel_coupling: f64, constants: PhysicalConstants) -> Result<Option<(f64, f64)>> {
    let b_lo = constants.field_for_omega_b(0.5 * tunnel_coupling);
    let b_hi = constants.field_for_omega_b(0.999 * tunnel_coupling);
    let m = |b: f64| -> Result<(f64, f64)> {
        Ok(min_slope(&QubitBias::new(0.0, tunnel_coupling, b, constants)?))
    };
    let n = 41;
    let mut prev_b = b_lo;
    let mut prev = m(b_lo)?.0;
    for i in 1..n {
        let b = b_lo + (b_hi - b_lo) * i as f64 / (n - 1) as f64;
        let v = m(b)?.0;
        if prev > 0.0 && v <= 0.0 {
            let (mut lo, mut hi) = (prev_b, b);
            while hi - lo > 1e-10 * hi {
                let mid = 0.5 * (lo + hi);
                if m(mid)?.0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // at `hi` the dip is at or below zero, so it is the global minimum
            return Ok(Some((0.5 * (lo + hi), m(hi)?.1)));
        }
        prev = v;
        prev_b = b;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::muev;

    fn bias(eps: f64, vt: f64, b: f64) -> QubitBias {
        QubitBias::new(muev(eps), muev(vt), b, PhysicalConstants::default()).unwrap()
    }

    #[test]
    fn charge_qubit_examples() {
        let q = charge_qubit(&bias(0.0, 47.15, 0.8));
        assert!((q.omega0 - muev(47.15)).abs() < 1e-6);
        assert!((q.eta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let q = charge_qubit(&bias(10.0, 10.0, 0.8));
        assert!((q.eta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        // ε = −3 V_t
        let q = charge_qubit(&bias(-30.0, 10.0, 0.8));
        assert!((q.eta - (std::f64::consts::PI - (1.0f64 / 3.0).atan())).abs() < 1e-14);
        assert!((q.omega0 / muev(10.0) - 10f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let c = PhysicalConstants { hyperfine_a: 1e-30, delta_gamma: 0.0, ..Default::default() };
        let b = QubitBias::new(muev(5.0), muev(40.0), 0.7, c).unwrap();
        let h = build_hamiltonian(&b);
        let w0 = charge_qubit(&b).omega0;
        let wb = b.omega_b();
        let expect = [-(w0 + wb) / 2.0, -(w0 - wb) / 2.0, (w0 - wb) / 2.0, (w0 + wb) / 2.0];
        for i in 0..4 {
            assert!((h[(i, i)] - expect[i]).abs() < 1e-3);
            for j in 0..4 {
                if i != j {
                    assert!(h[(i, j)].abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn trace_is_minus_half_a() {
        let b = bias(-12.0, 47.15, 0.796);
        let tr = build_hamiltonian(&b).trace();
        let a = b.constants.hyperfine_a;
        assert!((tr + a / 2.0).abs() < 1e-12 * a * 100.0);
    }

    #[test]
    fn perturbative_refuses_degenerate() {
        let c = PhysicalConstants::default();
        let vt = muev(47.15);
        let b = c.field_for_omega_b(vt);
        let bias = QubitBias::new(0.0, vt, b, c).unwrap();
        assert!(matches!(perturbative_spectrum(&bias), Err(Error::Degenerate { .. })));
        assert!(matches!(z_coefficients_formula(&bias), Err(Error::Degenerate { .. })));
        assert!(spectrum(&bias).is_ok());
    }

    #[test]
    fn z22_ratio_is_exact() {
        let b = bias(-20.0, 47.15, 0.7);
        let z = z_coefficients_formula(&b).unwrap();
        let q = charge_qubit(&b);
        assert_eq!(z.z22(), z.z11() * q.omega0 / b.omega_b());
    }

    #[test]
    fn identity_states_give_product_basis_coefficients() {
        let b = bias(0.0, 47.15, 0.7);
        let mut s = spectrum(&b).unwrap();
        s.states = RMat::identity(4, 4);
        let z = z_coefficients_numeric(&s);
        // Z = sinη σx ⊗ I + cosη σz ⊗ I with η = π/2
        assert!((z.z10() - 1.0).abs() < 1e-15);
        assert!(z.z30().abs() < 1e-15);
    }

    #[test]
    fn equal_g_factors_put_the_spot_at_zero_detuning() {
        // Exactly zero only to lowest order; the donor-only hyperfine term
        // breaks ε → −ε symmetry at higher order.
        let c = PhysicalConstants { delta_gamma: 0.0, ..Default::default() };
        let roots = sweet_spot_detuning(muev(47.15), 0.8, c).unwrap();
        assert_eq!(roots.len(), 1, "{roots:?}");
        assert!(roots[0].abs() < 1e-2 * muev(47.15), "{roots:?}");
    }
}

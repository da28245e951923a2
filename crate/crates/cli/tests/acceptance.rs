//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 regardless of FAIL lines unless `FFQ_ACCEPTANCE_STRICT=1`.

use ffq_cli::commands::{run_evolve, Vdd};
use ffq_cli::config::Config;
use ffq_cli::dft::peaks;
use ffq_core::fourlevel::{amplitudes, case_report, equilibrium_leakage_4lv, evolve_analytic, initial_state, mode_set, FourLevelParams};
use ffq_core::linalg::{max_abs, symmetric_eigen, CMat, RMat, C64};
use ffq_core::noise::{
    decay_profile_quadrature, evolve_full, evolve_full_filtered, evolve_monte_carlo, evolve_secular, j00,
    EvolutionResult, EvolutionSetup, MonteCarloConfig, NoiseChannel, NoiseSpectrum, TermFilter,
};
use ffq_core::single_qubit::{
    charge_qubit, dephasing_time, dressed_position, perturbative_spectrum, second_order_sweet_spot, spectrum,
    z_coefficients_numeric, QubitBias,
};
use ffq_core::two_qubit::{calibrate_vdd, gate_analytics, long_time_t1, OperatingPoint, PairModel, KET_01, KET_02, KET_10, KET_20};
use ffq_core::units::{hz, mhz, muev, PhysicalConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

mod tol {
    pub const SS_FIELD_T: f64 = 0.796;
    pub const SS_FIELD_REL: f64 = 0.01;
    pub const SS_OFFSET_VCM: f64 = 3.13;
    pub const SS_OFFSET_REL: f64 = 0.05;

    pub const PERT_DRAWS: usize = 1000;
    pub const PERT_GAP_IN_A: f64 = 5.0;
    pub const PERT_BOUND_FACTOR: f64 = 10.0;
    pub const Z_SUM_RULE: f64 = 1e-10;

    /// "Tens of μs" read as 10–99 μs, widened by the ±50 % band.
    pub const T2_PEAK_078_S: (f64, f64) = (5e-6, 150e-6);
    pub const T2_THRESHOLD_S: f64 = 1e-3;
    pub const WIDTH_081_VCM: f64 = 0.04;
    pub const PLATEAU_VCM: f64 = 0.3;
    pub const WIDTH_REL: f64 = 0.5;

    pub const GATE_A_S: f64 = 150e-9;
    pub const GATE_A_REL: f64 = 0.01;
    pub const GATE_C_S: f64 = 250e-9;
    pub const GATE_C_REL: f64 = 0.2;

    pub const Q_A: f64 = 0.2;
    pub const Q_A_REL: f64 = 0.25;
    pub const Q_B: f64 = 1.0;
    pub const Q_B_FACTOR: f64 = 2.0;
    pub const Q_C_MIN: f64 = 1e2;

    pub const FL_DRAWS: usize = 1000;
    pub const FL_FREQ: f64 = 1e-12;
    pub const FL_RK4: f64 = 1e-9;
    pub const FL_COMPLETE: f64 = 1e-14;

    pub const SECULAR_VS_FILTERED: f64 = 1e-10;
    pub const MC_TRAJECTORIES: usize = 500;
    pub const MC_SEED: u64 = 2024;
    pub const MC_ENVELOPE_ABS: f64 = 0.1;
    pub const MC_SPAN_IN_T2: f64 = 1.5;

    pub const LEAK_AVG: f64 = 1e-6;
    pub const LEAK_CASE_REL: f64 = 0.05;

    pub const T1_FACTOR: f64 = 2.0;
    pub const T1_TENS_OF_US_S: (f64, f64) = (10e-6, 100e-6);

    pub const TRACE_HERM: f64 = 1e-10;
    pub const J00_REL: f64 = 0.01;
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(x: f64, y: f64) -> f64 {
    (x / y - 1.0).abs()
}

fn constants() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn vt() -> f64 {
    muev(47.15)
}

fn calibrated_vdd() -> f64 {
    let c = constants();
    calibrate_vdd(tol::GATE_A_S, mhz(1.0), mhz(1e5), |v| Ok(PairModel::at_point(OperatingPoint::A, v, muev(1.0), c)?.slow_swap_time()))
        .expect("point-a gate time is bracketed")
}

fn c1_sweet_spot() -> Outcome {
    let c = constants();
    match second_order_sweet_spot(vt(), c) {
        Ok(Some((b, eps))) => {
            let e = c.field_from_detuning(eps);
            let ok = rel(b, tol::SS_FIELD_T) <= tol::SS_FIELD_REL && rel(e, tol::SS_OFFSET_VCM) <= tol::SS_OFFSET_REL;
            outcome(ok, format!("B_ss = {b:.4} T, E_z-E_c = {e:.3} V/cm"))
        }
        Ok(None) => outcome(false, "no second-order spot found".into()),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c2_perturbation() -> Outcome {
    let c = constants();
    let a = c.hyperfine_a;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst, mut drawn, mut worst_sum) = (0.0f64, 0, 0.0f64);
    while drawn < tol::PERT_DRAWS {
        let eps = muev(rng.random_range(-120.0..120.0));
        let t = muev(rng.random_range(15.0..90.0));
        let b = rng.random_range(0.1..1.6);
        let bias = QubitBias::new(eps, t, b, c).unwrap();
        let gap = charge_qubit(&bias).omega0 - bias.omega_b();
        if gap.abs() <= tol::PERT_GAP_IN_A * a {
            continue;
        }
        drawn += 1;
        let exact = spectrum(&bias).unwrap();
        let pert = perturbative_spectrum(&bias).unwrap();
        let bound = tol::PERT_BOUND_FACTOR * a.powi(3) / (gap * gap);
        for k in 0..4 {
            worst = worst.max((pert.energies[k] - exact.energies[k]).abs() / bound);
        }
        worst_sum = worst_sum.max((z_coefficients_numeric(&exact).sum_of_squares() - 1.0).abs());
    }
    outcome(
        worst <= 1.0 && worst_sum <= tol::Z_SUM_RULE,
        format!("max error/bound = {worst:.3}, max |sum z^2 - 1| = {worst_sum:.1e}"),
    )
}

/// T_2 along a cut, with `None` meaning beyond the noise window.
fn t2_cut(b: f64) -> impl Fn(f64) -> f64 {
    let c = constants();
    let noise = NoiseSpectrum::default();
    move |e: f64| {
        let bias = QubitBias::from_field_offset(e, vt(), b, c).unwrap();
        dephasing_time(&bias, muev(1.0), &noise, (-1.0f64).exp()).unwrap().seconds().unwrap_or(f64::INFINITY)
    }
}

/// Intervals of the cut where T_2 exceeds `level`. Edges are refined by
/// bisection, and grid maxima below the level are refined by golden
/// section so that peaks narrower than the grid are not lost.
fn segments_above(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, level: f64) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let edge = |mut a: f64, mut b: f64| {
        let fa = f(a) > level;
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if (f(m) > level) == fa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for i in 0..n {
        let above = ys[i] > level;
        if above && start.is_none() {
            start = Some(if i == 0 { xs[0] } else { edge(xs[i - 1], xs[i]) });
        }
        if !above {
            if let Some(s) = start.take() {
                out.push((s, edge(xs[i - 1], xs[i])));
            } else if i > 0 && i + 1 < n && ys[i] >= ys[i - 1] && ys[i] >= ys[i + 1] {
                let peak = golden_max(f, xs[i - 1], xs[i + 1]);
                if f(peak) > level {
                    out.push((edge(xs[i - 1], peak), edge(peak, xs[i + 1])));
                }
            }
        }
    }
    if let Some(s) = start {
        out.push((s, xs[n - 1]));
    }
    out
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn local_maxima(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    (1..n - 1).filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]).map(|i| (xs[i], ys[i])).collect()
}

fn c3_t2_structure() -> Outcome {
    let (lo, hi, n) = (-3.0, 10.0, 2601);
    let f078 = t2_cut(0.78);
    let peaks078 = local_maxima(&f078, lo, hi, n);
    let peak_t2 = peaks078.iter().map(|p| p.1).fold(0.0, f64::max);
    let ok078 = peaks078.len() == 1 && peak_t2 >= tol::T2_PEAK_078_S.0 && peak_t2 <= tol::T2_PEAK_078_S.1;

    let f081 = t2_cut(0.81);
    let seg081 = segments_above(&f081, lo, hi, n, tol::T2_THRESHOLD_S);
    let w081: Vec<f64> = seg081.iter().map(|s| s.1 - s.0).collect();
    let ok081 = w081.len() == 2 && w081.iter().all(|w| rel(*w, tol::WIDTH_081_VCM) <= tol::WIDTH_REL);

    let (bss, _) = second_order_sweet_spot(vt(), constants()).unwrap().unwrap();
    let fss = t2_cut(bss);
    let segss = segments_above(&fss, lo, hi, n, tol::T2_THRESHOLD_S);
    let okss = segss.len() == 1 && rel(segss[0].1 - segss[0].0, tol::PLATEAU_VCM) <= tol::WIDTH_REL;

    let fmt = |s: &[(f64, f64)]| s.iter().map(|(a, b)| format!("{:.3}..{:.3}", a, b)).collect::<Vec<_>>().join(" ");
    outcome(
        ok078 && ok081 && okss,
        format!(
            "B=0.78: {} peak(s), max T2 {:.2e} s [{}]; B=0.81: >1ms at {} widths {:?} [{}]; B_ss: >1ms at {} [{}]",
            peaks078.len(),
            peak_t2,
            if ok078 { "ok" } else { "miss" },
            fmt(&seg081),
            w081.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>(),
            if ok081 { "ok" } else { "miss" },
            fmt(&segss),
            if okss { "ok" } else { "miss" },
        ),
    )
}

fn c4_quality() -> Outcome {
    let c = constants();
    let v = calibrated_vdd();
    let wn = muev(1.0);
    let ga = gate_analytics(&PairModel::at_point(OperatingPoint::A, v, wn, c).unwrap().rates).unwrap();
    let gb = gate_analytics(&PairModel::at_point(OperatingPoint::B, v, wn, c).unwrap().rates).unwrap();
    let qa = ga.q_a.abs();
    let qb = gb.q_b.abs();
    // charge sweet-spot line through point c
    let mut qc_best = 0.0f64;
    for i in 0..=40 {
        let b = 0.761 + 0.02 * i as f64 / 40.0;
        let bias = QubitBias::from_field_offset(0.0, vt(), b, c).unwrap();
        let m = PairModel::new(bias, v, wn, ffq_core::two_qubit::CouplingMode::FullZ).unwrap();
        if let Ok(g) = gate_analytics(&m.rates) {
            if g.q_c.is_finite() {
                qc_best = qc_best.max(g.q_c.abs());
            }
        }
    }
    let oka = rel(qa, tol::Q_A) <= tol::Q_A_REL;
    let okb = qb >= tol::Q_B / tol::Q_B_FACTOR && qb <= tol::Q_B * tol::Q_B_FACTOR;
    let okc = qc_best >= tol::Q_C_MIN;
    outcome(
        oka && okb && okc,
        format!(
            "V_dd/h = {:.1} MHz; Q_a = {qa:.3} [{}], Q_b = {qb:.2} [{}], max Q_c on E=0 line = {qc_best:.3e} [{}]",
            v / TAU / 1e6,
            if oka { "ok" } else { "miss" },
            if okb { "ok" } else { "miss" },
            if okc { "ok" } else { "miss" }
        ),
    )
}

fn c5_gate_times() -> Outcome {
    let c = constants();
    let v = calibrated_vdd();
    let ta = PairModel::at_point(OperatingPoint::A, v, muev(1.0), c).unwrap().slow_swap_time();
    let tc = PairModel::at_point(OperatingPoint::C, v, muev(1.0), c).unwrap().dominant_swap_time().unwrap();
    let ok = rel(ta, tol::GATE_A_S) <= tol::GATE_A_REL && rel(tc, tol::GATE_C_S) <= tol::GATE_C_REL;
    outcome(ok, format!("point a {:.1} ns, point c {:.1} ns", ta * 1e9, tc * 1e9))
}

fn c6_spectral_lines() -> Outcome {
    let cfg = Config::default();
    let v = calibrated_vdd();
    let r = run_evolve(&cfg, &Vdd { value: v, source: "acceptance".into() }).unwrap();
    let p01: Vec<f64> = r.trace.column("noiseless_p01").unwrap().iter().map(|c| c.num().unwrap()).collect();
    let dt = cfg.evolve.t_max_ns * 1e-9 / (cfg.evolve.points - 1) as f64;
    let s = ffq_cli::dft::hann_spectrum(&p01, dt);
    let top: Vec<f64> = peaks(&s).iter().take(2).map(|p| p.0).collect();
    let rates = PairModel::at_point(OperatingPoint::A, v, muev(1.0), constants()).unwrap().rates;
    let mut want = [(2.0 * rates.g_l - 3.0 * rates.g_f).abs() / 2.0 / TAU, (2.0 * rates.g_l + 3.0 * rates.g_f) / 2.0 / TAU];
    want.sort_by(f64::total_cmp);
    let mut got = top.clone();
    got.sort_by(f64::total_cmp);
    let ok = got.len() == 2 && got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= s.resolution);
    outcome(
        ok,
        format!(
            "top lines {:?} MHz vs predicted {:.2}/{:.2} MHz, bin {:.2} MHz",
            got.iter().map(|x| (x / 1e4).round() / 100.0).collect::<Vec<_>>(),
            want[0] / 1e6,
            want[1] / 1e6,
            s.resolution / 1e6
        ),
    )
}

type Psi = [C64; 4];

fn hpsi(h: &[[f64; 4]; 4], v: &Psi) -> Psi {
    let mut out = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..4 {
            acc += v[j] * h[i][j];
        }
        // −i H ψ
        out[i] = C64::new(acc.im, -acc.re);
    }
    out
}

fn axpy(a: &Psi, k: &Psi, s: f64) -> Psi {
    let mut o = *a;
    for i in 0..4 {
        o[i] += k[i] * s;
    }
    o
}

fn rk4(h: &[[f64; 4]; 4], psi: Psi, t: f64, steps: usize) -> Psi {
    let dt = t / steps as f64;
    let mut p = psi;
    for _ in 0..steps {
        let k1 = hpsi(h, &p);
        let k2 = hpsi(h, &axpy(&p, &k1, dt / 2.0));
        let k3 = hpsi(h, &axpy(&p, &k2, dt / 2.0));
        let k4 = hpsi(h, &axpy(&p, &k3, dt));
        for i in 0..4 {
            p[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    p
}

fn c7_four_level() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut freq_err, mut rk_err, mut comp_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..tol::FL_DRAWS {
        let p = FourLevelParams {
            delta: rng.random_range(-2.0..2.0),
            g_s: rng.random_range(0.2..1.0),
            g_c: rng.random_range(-2.0..2.0),
            g_1: rng.random_range(-0.5..0.5),
            g_2: rng.random_range(-0.5..0.5),
            gamma1: 0.0,
            gamma2: 0.0,
        };
        let th: f64 = rng.random_range(0.0..TAU);
        let (al, be) = (th.cos(), th.sin());
        let h = p.hamiltonian();
        let eig = symmetric_eigen(&h).unwrap();
        let modes = mode_set(&p);
        for w in modes.frequencies {
            let best = (0..16)
                .map(|k| (eig.values[k / 4] - eig.values[k % 4] - w).abs())
                .fold(f64::INFINITY, f64::min);
            freq_err = freq_err.max(best);
        }
        let rho0 = initial_state(al, be);
        for a in 0..4 {
            for b in 0..4 {
                comp_err = comp_err.max((amplitudes(&modes, &rho0, a, b).total() - rho0[(a, b)]).norm());
            }
        }
        let traj = evolve_analytic(&p, &rho0, None);
        let t = 10.0 * PI / (2.0 * p.g_s);
        let wmax = eig.values[3] - eig.values[0];
        let steps = (wmax.max(1.0) * t / 0.008).ceil() as usize;
        let hh: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| h[(i, j)]));
        let psi = rk4(&hh, [C64::new(al, 0.0), C64::new(be, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)], t, steps);
        let r = traj.rho(t);
        for i in 0..4 {
            for j in 0..4 {
                rk_err = rk_err.max((psi[i] * psi[j].conj() - r[(i, j)]).norm());
            }
        }
    }
    outcome(
        freq_err <= tol::FL_FREQ && rk_err <= tol::FL_RK4 && comp_err <= tol::FL_COMPLETE,
        format!("max |ω - gap| = {freq_err:.1e}, max |ρ - ρ_RK4| = {rk_err:.1e}, completeness {comp_err:.1e}"),
    )
}

fn conservation(r: &EvolutionResult) -> f64 {
    r.rho
        .iter()
        .map(|p| (p.trace() - C64::new(1.0, 0.0)).norm().max(max_abs(&(p - p.adjoint()))))
        .fold(0.0, f64::max)
}

/// Single off-sweet-spot qubit in its dressed basis.
fn mc_qubit(noise: NoiseSpectrum, t2_target: f64) -> (RMat, NoiseChannel, f64) {
    let bias = QubitBias::from_field_offset(-6.0, vt(), 0.9, constants()).unwrap();
    let s = spectrum(&bias).unwrap();
    let z = dressed_position(&s);
    // ω_n chosen so that the secular T_2 equals the target
    let dz = z[(0, 0)] - z[(1, 1)];
    let gamma = (1.0 / j00(&noise, t2_target)).sqrt();
    let wn = 2.0 * gamma / dz.abs();
    let h0 = RMat::from_fn(4, 4, |i, j| if i == j { s.energies[i] } else { 0.0 });
    (h0, NoiseChannel::new(z * (0.5 * wn), noise).unwrap(), wn)
}

fn plus_state() -> CMat {
    CMat::from_fn(4, 4, |i, j| if i < 2 && j < 2 { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) })
}

fn c8_propagators(worst_conservation: &mut f64) -> Outcome {
    let noise = NoiseSpectrum::new(hz(1e6), hz(1e9)).unwrap();
    let (h0, ch, wn) = mc_qubit(noise, 60e-9);
    let setup = EvolutionSetup::new(&h0, vec![ch.clone()]).unwrap();
    let rho0 = plus_state();
    let t2 = 60e-9;
    let times: Vec<f64> = (0..=24).map(|i| tol::MC_SPAN_IN_T2 * t2 * i as f64 / 24.0).collect();

    let sec = evolve_secular(&setup, &rho0, &times).unwrap();
    let fil = evolve_full_filtered(&setup, &rho0, &times, TermFilter::ZeroFrequency).unwrap();
    let diff = sec.rho.iter().zip(&fil.rho).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max);

    let cfg = MonteCarloConfig { trajectories: tol::MC_TRAJECTORIES, seed: tol::MC_SEED, max_step: 5e-12, modes: 256 };
    let mc = evolve_monte_carlo(&h0, std::slice::from_ref(&ch), &rho0, &times, &cfg).unwrap();
    let gamma = ch.operator[(0, 0)] - ch.operator[(1, 1)];
    let env_err = times
        .iter()
        .zip(&mc.rho)
        .map(|(t, r)| (2.0 * r[(0, 1)].norm() - (-j00(&noise, *t) * gamma * gamma).exp()).abs())
        .fold(0.0, f64::max);
    for r in [&sec, &fil, &mc] {
        *worst_conservation = worst_conservation.max(conservation(r));
    }
    outcome(
        diff <= tol::SECULAR_VS_FILTERED && env_err <= tol::MC_ENVELOPE_ABS,
        format!(
            "secular vs filtered {diff:.1e}; MC ({} traj, ω_n = {:.2} μeV, T2 = {:.1} ns) max envelope error {env_err:.3}",
            tol::MC_TRAJECTORIES,
            wn / muev(1.0),
            t2 * 1e9
        ),
    )
}

/// Hann-weighted time average of the noiseless leakage population.
fn averaged_leakage(p: &FourLevelParams, al: f64, be: f64) -> f64 {
    let traj = evolve_analytic(p, &initial_state(al, be), None);
    let w: Vec<f64> = traj.modes.frequencies.iter().map(|w| w.abs()).collect();
    let slow = w.iter().copied().filter(|x| *x > 1e-9).fold(f64::INFINITY, f64::min);
    let fast = w.iter().copied().fold(0.0, f64::max);
    let t_end = 2000.0 * TAU / slow;
    let n = (t_end * fast / TAU * 24.0) as usize + 1000;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=n {
        let t = t_end * i as f64 / n as f64;
        let hw = 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos();
        num += hw * (traj.element(2, 2, t).re + traj.element(3, 3, t).re);
        den += hw;
    }
    num / den
}

fn c9_leakage() -> Outcome {
    let s = 0.5f64.sqrt();
    let mut avg_err = 0.0f64;
    for (p, al, be) in [
        (FourLevelParams { delta: 0.9, g_s: 0.11, g_c: 1.3, g_1: 0.0, g_2: 0.07, gamma1: 0.0, gamma2: 0.0 }, s, s),
        (FourLevelParams { delta: 2.9, g_s: 0.13, g_c: 0.8, g_1: 0.03, g_2: 0.2, gamma1: 0.0, gamma2: 0.0 }, 0.6, 0.8),
        (FourLevelParams { delta: 6.0, g_s: 0.1, g_c: 1.1, g_1: 0.0, g_2: 0.3, gamma1: 0.0, gamma2: 0.0 }, 1.0, 0.0),
    ] {
        avg_err = avg_err.max((averaged_leakage(&p, al, be) - equilibrium_leakage_4lv(&p, al, be).unwrap()).abs());
    }
    let weak = FourLevelParams { delta: 40.0, g_s: 0.1, g_c: 1.1, g_1: 0.0, g_2: 0.05, gamma1: 0.0, gamma2: 0.0 };
    let strong = FourLevelParams { delta: 0.0, g_2: 0.3, ..weak };
    let mut c1 = 0.0f64;
    for p in [weak, strong] {
        c1 = c1.max(rel(equilibrium_leakage_4lv(&p, 1.0, 0.0).unwrap(), case_report(&p).unwrap().leakage));
    }
    let res = FourLevelParams { delta: 1.0, g_2: 0.01, ..weak };
    let mut c2 = 0.0f64;
    for (al, be) in [(1.0, 0.0), (0.6, 0.8), (0.8, -0.6)] {
        c2 = c2.max(rel(equilibrium_leakage_4lv(&res, al, be).unwrap(), (1.0 - 2.0 * al * be) / 4.0));
    }
    outcome(
        avg_err <= tol::LEAK_AVG && c1 <= tol::LEAK_CASE_REL && c2 <= tol::LEAK_CASE_REL,
        format!("time average vs closed form {avg_err:.1e}; weak/strong limits rel {c1:.3}; resonance limit rel {c2:.3}"),
    )
}

/// Relaxation out of the single-excitation manifold {|01⟩, |10⟩, |02⟩, |20⟩}.
fn c10_long_time(worst_conservation: &mut f64) -> Outcome {
    let c = constants();
    let noise = NoiseSpectrum::default();
    let wn = muev(1.0);
    let v = calibrated_vdd();
    let m = PairModel::at_point(OperatingPoint::C, v, wn, c).unwrap();
    let rate = long_time_t1(&m.z, wn, m.spectrum.charge.omega0, m.spectrum.omega_b, &noise);
    let setup = EvolutionSetup::new(&m.system.hamiltonian, m.system.channels(wn, noise).unwrap()).unwrap();
    let mut rho0 = CMat::zeros(16, 16);
    rho0[(KET_01, KET_01)] = C64::new(1.0, 0.0);
    let times = [50e-9, 200e-9, 20e-6];
    let r = evolve_full(&setup, &rho0, &times).unwrap();
    *worst_conservation = worst_conservation.max(conservation(&r));
    let manifold: Vec<f64> = r.rho.iter().map(|p| [KET_01, KET_10, KET_02, KET_20].iter().map(|&k| p[(k, k)].re).sum()).collect();
    let excess = |i: usize| manifold[i] - manifold[2];
    let full_rate = (excess(0) / excess(1)).ln() / (times[1] - times[0]);
    let (t1_full, t1_formula) = (1.0 / full_rate, 1.0 / rate);
    let ratio = t1_full / t1_formula;
    let in_band = ratio <= tol::T1_FACTOR && ratio >= 1.0 / tol::T1_FACTOR;
    let tens = t1_full >= tol::T1_TENS_OF_US_S.0 && t1_full < tol::T1_TENS_OF_US_S.1;
    outcome(
        in_band && tens,
        format!(
            "T1 full-K {:.3} μs, formula {:.3} μs (ratio {ratio:.2}) [{}]; tens of μs [{}]",
            t1_full * 1e6,
            t1_formula * 1e6,
            if in_band { "ok" } else { "miss" },
            if tens { "ok" } else { "miss" }
        ),
    )
}

fn c11_conservation(worst_propagated: f64) -> Outcome {
    let noise = NoiseSpectrum::default();
    let (lo, hi) = (1e3 / noise.omega_h, 1e-3 / noise.omega_l);
    let mut j_err = 0.0f64;
    for i in 0..=30 {
        let t = lo * (hi / lo).powf(i as f64 / 30.0);
        let q = decay_profile_quadrature(&noise, t, 0.0, 0.0).re;
        j_err = j_err.max(rel(q, j00(&noise, t)));
    }
    // four-level closed form with noise, and the secular two-qubit run
    let p = FourLevelParams { delta: 0.7e8, g_s: 0.1e8, g_c: 1.1e8, g_1: 0.0, g_2: 0.05e8, gamma1: 0.2e8, gamma2: 0.1e8 };
    let traj = evolve_analytic(&p, &initial_state(0.6, 0.8), Some(noise));
    let mut worst = worst_propagated;
    for i in 0..50 {
        let r = traj.rho(i as f64 * 1e-8);
        worst = worst.max((r.trace() - C64::new(1.0, 0.0)).norm().max(max_abs(&(&r - r.adjoint()))));
    }
    let s0 = [NoiseSpectrum::default(), NoiseSpectrum::new(hz(1e3), hz(1e9)).unwrap()].iter().all(|s| s.correlation(0.0) == 1.0);
    outcome(
        worst <= tol::TRACE_HERM && j_err <= tol::J00_REL && s0,
        format!("max trace/Hermiticity error {worst:.1e}; J00 closed vs quadrature {j_err:.1e}; S(0) = 1 exact: {s0}"),
    )
}

fn main() {
    let mut conservation_worst = 0.0f64;
    let criteria: Vec<(&str, Duration, Box<dyn FnOnce(&mut f64) -> Outcome>)> = vec![
        ("sweet spot location", Duration::from_secs(10), Box::new(|_| c1_sweet_spot())),
        ("perturbation-theory oracle", Duration::from_secs(5), Box::new(|_| c2_perturbation())),
        ("single-qubit T2 structure", Duration::from_secs(120), Box::new(|_| c3_t2_structure())),
        ("quality factors", Duration::from_secs(60), Box::new(|_| c4_quality())),
        ("gate times", Duration::from_secs(30), Box::new(|_| c5_gate_times())),
        ("spectral signature", Duration::from_secs(10), Box::new(|_| c6_spectral_lines())),
        ("four-level oracle equivalence", Duration::from_secs(30), Box::new(|_| c7_four_level())),
        ("propagator cross-validation", Duration::from_secs(300), Box::new(c8_propagators)),
        ("leakage formulas", Duration::from_secs(30), Box::new(|_| c9_leakage())),
        ("long-time channel", Duration::from_secs(300), Box::new(c10_long_time)),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, budget: Duration, o: Outcome, took: Duration| {
        let in_time = took <= budget;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { String::new() } else { format!(" (over {:.0} s budget)", budget.as_secs_f64()) };
        println!(
            "{} [{:>2}] {name} ({:.1} s): {}{timing}",
            if pass { "PASS" } else { "FAIL" },
            i,
            took.as_secs_f64(),
            o.detail
        );
    };
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = f(&mut conservation_worst);
        report(i + 1, name, budget, o, start.elapsed());
    }
    let start = Instant::now();
    let o = c11_conservation(conservation_worst);
    report(11, "conservation suite", Duration::from_secs(60), o, start.elapsed());
    println!("{} of 11 criteria failed", failed);
    if failed > 0 && std::env::var("FFQ_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

//! One function per subcommand. Each returns tables plus manifest
//! entries; writing is left to the caller.

use crate::config::{Config, ConfigError, Propagator};
use crate::dft::{hann_spectrum, peaks};
use crate::output::{Cell, Manifest, Table, SENTINEL_EXCEEDS, SENTINEL_FAILED};
use ffq_core::fourlevel::{case_report, equilibrium_leakage_4lv, evolve_analytic, initial_state, mode_set, amplitudes, FourLevelParams, MODE_LABELS};
use ffq_core::linalg::{CMat, C64};
use ffq_core::noise::{coherence_time, evolve_full, evolve_monte_carlo, evolve_secular, CoherenceTime, EvolutionSetup, MonteCarloConfig, NoiseChannel};
use ffq_core::par;
use ffq_core::single_qubit::{dephasing_time, spectrum, z_coefficients_numeric, QubitBias};
use ffq_core::two_qubit::{calibrate_vdd, gate_analytics, CouplingMode, OperatingPoint, PairModel, KET_01, KET_02, KET_10, KET_20};
use ffq_core::units::{mhz, muev, to_mhz, to_muev, TWO_PI};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ffq_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("bad calibration file {path}: {msg}")]
    Calibration { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, CommandError>;

pub const CALIBRATION_FILE: &str = "calibration.json";

fn time_cell(t: CoherenceTime) -> Cell {
    match t {
        CoherenceTime::Finite(s) => Cell::Num(s),
        CoherenceTime::ExceedsWindow => Cell::Sentinel(SENTINEL_EXCEEDS),
    }
}

fn grid(e: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    b.iter().flat_map(|&bb| e.iter().map(move |&ee| (ee, bb))).collect()
}

pub fn run_spectrum(cfg: &Config) -> Result<(Table, Manifest)> {
    let c = cfg.constants.physical();
    let vt = muev(cfg.tunnel_coupling_uev);
    let b = cfg.spectrum.b_field_t;
    let mut cols: Vec<String> = ["e_field_vcm", "epsilon_uev", "e0_uev", "e1_uev", "e2_uev", "e3_uev", "omega10_ghz"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for j in 0..4 {
        for k in 0..4 {
            cols.push(format!("abs_z{j}{k}"));
        }
    }
    let es = cfg.spectrum.e_field_vcm.values();
    let rows = par::map(&es, |&e| -> Result<Vec<Cell>> {
        let bias = QubitBias::from_field_offset(e, vt, b, c)?;
        let s = spectrum(&bias)?;
        let z = z_coefficients_numeric(&s);
        let mut row = vec![Cell::Num(e), Cell::Num(to_muev(bias.epsilon))];
        row.extend(s.energies.iter().map(|&x| Cell::Num(to_muev(x))));
        row.push(Cell::Num(s.omega_10() / TWO_PI / 1e9));
        for j in 0..4 {
            for k in 0..4 {
                row.push(Cell::Num(z.get(j, k).abs()));
            }
        }
        Ok(row)
    });
    let mut t = Table::new(cols);
    for r in rows {
        t.push(r?);
    }
    let mut m = Manifest::new("spectrum");
    m.set("b_field_t", json!(b));
    if let Some((bss, ess)) = ffq_core::single_qubit::second_order_sweet_spot(vt, c)? {
        m.set("second_order_sweet_spot", json!({"b_field_t": bss, "e_field_vcm": c.field_from_detuning(ess)}));
    }
    Ok((t, m))
}

pub fn run_dephase_map(cfg: &Config) -> Result<(Table, Manifest)> {
    let c = cfg.constants.physical();
    let vt = muev(cfg.tunnel_coupling_uev);
    let noise = cfg.noise.spectrum()?;
    let wn = cfg.noise.omega_n();
    let thr = cfg.dephase_map.threshold;
    let cells = grid(&cfg.dephase_map.e_field_vcm.values(), &cfg.dephase_map.b_field_t.values());
    let values = par::map(&cells, |&(e, b)| {
        QubitBias::from_field_offset(e, vt, b, c)
            .and_then(|bias| dephasing_time(&bias, wn, &noise, thr))
            .map_or(Cell::Sentinel(SENTINEL_FAILED), time_cell)
    });
    let mut t = Table::new(["b_field_t", "e_field_vcm", "t2_s"]);
    for (&(e, b), v) in cells.iter().zip(values) {
        t.push(vec![Cell::Num(b), Cell::Num(e), v]);
    }
    let mut m = Manifest::new("dephase-map");
    m.set("layout", json!("row-major: b_field_t outer, e_field_vcm inner"));
    m.set("shape", json!([cfg.dephase_map.b_field_t.points, cfg.dephase_map.e_field_vcm.points]));
    m.set("method", json!("single-mode envelope exp(-J(t,0,0) Gamma_01^2)"));
    Ok((t, m))
}

/// Where V_dd came from, recorded in manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct Vdd {
    pub value: f64,
    pub source: String,
}

pub fn resolve_vdd(cfg: &Config, out: &Path) -> Result<Vdd> {
    if let Some(v) = cfg.v_dd_mhz {
        return Ok(Vdd { value: mhz(v), source: "config".into() });
    }
    let path = cfg.calibration_file.as_ref().map(PathBuf::from).unwrap_or_else(|| out.join(CALIBRATION_FILE));
    if path.exists() {
        let bad = |msg: String| CommandError::Calibration { path: path.display().to_string(), msg };
        let text = std::fs::read_to_string(&path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        let x = v["results"]["v_dd_mhz"].as_f64().ok_or_else(|| bad("missing results.v_dd_mhz".into()))?;
        return Ok(Vdd { value: mhz(x), source: path.display().to_string() });
    }
    let (v, _) = calibrate(cfg)?;
    Ok(Vdd { value: v, source: "calibrated".into() })
}

fn pair(cfg: &Config, point: OperatingPoint, v_dd: f64) -> Result<PairModel> {
    Ok(PairModel::at_point(point, v_dd, cfg.noise.omega_n(), cfg.constants.physical())?)
}

/// V_dd giving the target point-a swap time, and the point-c swap time it
/// implies.
pub fn calibrate(cfg: &Config) -> Result<(f64, f64)> {
    let target = cfg.calibrate.target_ns * 1e-9;
    let v = calibrate_vdd(target, mhz(cfg.calibrate.lo_mhz), mhz(cfg.calibrate.hi_mhz), |v| {
        Ok(PairModel::at_point(OperatingPoint::A, v, cfg.noise.omega_n(), cfg.constants.physical())?.slow_swap_time())
    })?;
    let tc = pair(cfg, OperatingPoint::C, v)?.dominant_swap_time()?;
    Ok((v, tc))
}

pub fn run_calibrate(cfg: &Config) -> Result<Manifest> {
    let (v, tc) = calibrate(cfg)?;
    let ta = pair(cfg, OperatingPoint::A, v)?.slow_swap_time();
    let mut m = Manifest::new("calibrate-vdd");
    m.set("v_dd_mhz", json!(to_mhz(v)));
    m.set("target_ns", json!(cfg.calibrate.target_ns));
    m.set("point_a_swap_ns", json!(ta * 1e9));
    m.set("point_c_swap_ns", json!(tc * 1e9));
    Ok(m)
}

fn four_level(model: &PairModel) -> FourLevelParams {
    FourLevelParams::from_flip_flop(&model.rates)
}

pub fn run_relax_map(cfg: &Config, vdd: &Vdd) -> Result<(Table, Manifest)> {
    let c = cfg.constants.physical();
    let vt = muev(cfg.relax_map.tunnel_coupling_uev);
    let noise = cfg.noise.spectrum()?;
    let wn = cfg.noise.omega_n();
    let thr = cfg.relax_map.threshold;
    let cells = grid(&cfg.relax_map.e_field_vcm.values(), &cfg.relax_map.b_field_t.values());
    let cell = |&(e, b): &(f64, f64)| -> ffq_core::Result<CoherenceTime> {
        let bias = QubitBias::from_field_offset(e, vt, b, c)?;
        let p = four_level(&PairModel::new(bias, vdd.value, wn, CouplingMode::FullZ)?);
        let (hl, hr) = p.noise_operators();
        let setup = EvolutionSetup::new(&p.hamiltonian(), vec![NoiseChannel::new(hl, noise)?, NoiseChannel::new(hr, noise)?])?;
        coherence_time(&setup, &initial_state(1.0, 0.0), 0, 0, thr)
    };
    let values = par::map(&cells, |x| cell(x).map_or(Cell::Sentinel(SENTINEL_FAILED), time_cell));
    let mut t = Table::new(["b_field_t", "e_field_vcm", "t1_s"]);
    for (&(e, b), v) in cells.iter().zip(values) {
        t.push(vec![Cell::Num(b), Cell::Num(e), v]);
    }
    let mut m = Manifest::new("relax-map");
    m.set("layout", json!("row-major: b_field_t outer, e_field_vcm inner"));
    m.set("shape", json!([cfg.relax_map.b_field_t.points, cfg.relax_map.e_field_vcm.points]));
    m.set("method", json!("four-level secular envelope of the |01> population from |01>"));
    m.set("v_dd_mhz", json!(to_mhz(vdd.value)));
    m.set("v_dd_source", json!(vdd.source));
    let points: Vec<Value> = [OperatingPoint::A, OperatingPoint::B, OperatingPoint::C]
        .iter()
        .map(|p| {
            let (b, e) = p.coordinates();
            json!({"label": p.label(), "b_field_t": b, "e_field_vcm": e})
        })
        .collect();
    m.set("operating_points", Value::Array(points));
    Ok((t, m))
}

struct Observables {
    p01: f64,
    p10: f64,
    leak: f64,
    coh: C64,
}

fn observe16(r: &CMat) -> Observables {
    Observables {
        p01: r[(KET_01, KET_01)].re,
        p10: r[(KET_10, KET_10)].re,
        leak: r[(KET_02, KET_02)].re + r[(KET_20, KET_20)].re,
        coh: r[(KET_01, KET_10)],
    }
}

fn observe4(r: &CMat) -> Observables {
    Observables { p01: r[(0, 0)].re, p10: r[(1, 1)].re, leak: r[(2, 2)].re + r[(3, 3)].re, coh: r[(0, 1)] }
}

fn point_model(cfg: &Config, v_dd: f64) -> Result<(PairModel, String)> {
    match &cfg.evolve.bias {
        Some(b) => {
            let bias = QubitBias::from_field_offset(
                b.e_field_vcm,
                muev(cfg.tunnel_coupling_uev),
                b.b_field_t,
                cfg.constants.physical(),
            )?;
            Ok((PairModel::new(bias, v_dd, cfg.noise.omega_n(), CouplingMode::FullZ)?, "custom".into()))
        }
        None => {
            let p = OperatingPoint::parse(&cfg.evolve.point)?;
            let model = PairModel::new(
                p.bias(muev(cfg.tunnel_coupling_uev), cfg.constants.physical())?,
                v_dd,
                cfg.noise.omega_n(),
                CouplingMode::FullZ,
            )?;
            Ok((model, p.label().to_string()))
        }
    }
}

pub struct EvolveOutput {
    pub label: String,
    pub trace: Table,
    pub dft: Table,
    pub manifest: Manifest,
}

pub fn run_evolve(cfg: &Config, vdd: &Vdd) -> Result<EvolveOutput> {
    let ev = &cfg.evolve;
    let (model, label) = point_model(cfg, vdd.value)?;
    let noise = cfg.noise.spectrum()?;
    let dt = ev.t_max_ns * 1e-9 / (ev.points - 1) as f64;
    let times: Vec<f64> = (0..ev.points).map(|i| i as f64 * dt).collect();
    let [a, b] = ev.initial;
    let mut psi = [0.0; 16];
    psi[KET_01] = a;
    psi[KET_10] = b;
    let rho0 = CMat::from_fn(16, 16, |i, j| C64::new(psi[i] * psi[j], 0.0));
    let h = &model.system.hamiltonian;

    let clean = evolve_secular(&EvolutionSetup::new(h, vec![])?, &rho0, &times)?;
    let clean: Vec<Observables> = clean.rho.iter().map(observe16).collect();
    let channels = model.system.channels(cfg.noise.omega_n(), noise)?;
    let mut warnings = Vec::new();
    let noisy: Vec<Observables> = match ev.propagator {
        Propagator::Secular => {
            let r = evolve_secular(&EvolutionSetup::new(h, channels)?, &rho0, &times)?;
            warnings.extend(r.warnings.clone());
            r.rho.iter().map(observe16).collect()
        }
        Propagator::Full => {
            let r = evolve_full(&EvolutionSetup::new(h, channels)?, &rho0, &times)?;
            warnings.extend(r.warnings.clone());
            r.rho.iter().map(observe16).collect()
        }
        Propagator::Fourlevel => {
            let traj = evolve_analytic(&four_level(&model), &initial_state(a, b), Some(noise));
            times.iter().map(|&t| observe4(&traj.rho(t))).collect()
        }
        Propagator::Montecarlo => {
            let mc = MonteCarloConfig {
                trajectories: ev.trajectories,
                seed: cfg.seed,
                max_step: ev.max_step_ps * 1e-12,
                ..Default::default()
            };
            let r = evolve_monte_carlo(h, &channels, &rho0, &times, &mc)?;
            warnings.extend(r.warnings.clone());
            r.rho.iter().map(observe16).collect()
        }
    };

    let mut trace = Table::new([
        "t_s",
        "noiseless_p01",
        "noiseless_p10",
        "noiseless_leak",
        "noiseless_re_c",
        "noiseless_im_c",
        "noisy_p01",
        "noisy_p10",
        "noisy_leak",
        "noisy_re_c",
        "noisy_im_c",
    ]);
    for ((t, x), y) in times.iter().zip(&clean).zip(&noisy) {
        trace.push(
            [*t, x.p01, x.p10, x.leak, x.coh.re, x.coh.im, y.p01, y.p10, y.leak, y.coh.re, y.coh.im]
                .into_iter()
                .map(Cell::Num)
                .collect(),
        );
    }

    let p01: Vec<f64> = clean.iter().map(|o| o.p01).collect();
    let spec = hann_spectrum(&p01, dt);
    let mut dft = Table::new(["freq_hz", "amplitude"]);
    for (f, amp) in spec.freq.iter().zip(&spec.amplitude) {
        dft.push(vec![Cell::Num(*f), Cell::Num(*amp)]);
    }

    let r = &model.rates;
    let mut m = Manifest::new("evolve");
    m.set("point", json!(label));
    m.set("bias", json!({"b_field_t": model.bias.b_field, "e_field_vcm": model.bias.field_offset()}));
    m.set("propagator", json!(ev.propagator));
    m.set("v_dd_mhz", json!(to_mhz(vdd.value)));
    m.set("v_dd_source", json!(vdd.source));
    m.set(
        "rates_mhz",
        json!({
            "g_f": to_mhz(r.g_f), "g_l": to_mhz(r.g_l), "g_c": to_mhz(r.g_c),
            "gamma1": to_mhz(r.gamma1), "gamma2": to_mhz(r.gamma2), "delta": to_mhz(r.delta),
        }),
    );
    m.set(
        "beat_lines_hz",
        json!([to_mhz((2.0 * r.g_l - 3.0 * r.g_f).abs() / 2.0) * 1e6, to_mhz((2.0 * r.g_l + 3.0 * r.g_f) / 2.0) * 1e6]),
    );
    if let Ok(g) = gate_analytics(r) {
        m.set("quality_factors", json!({"q_a": g.q_a.abs(), "q_b": g.q_b.abs(), "q_c": g.q_c.abs()}));
    }
    m.set(
        "dft",
        json!({
            "signal": "noiseless_p01",
            "window": "hann",
            "mean_subtracted": true,
            "zero_padded_length": spec.freq.len().saturating_sub(1) * 2,
            "resolution_hz": spec.resolution,
            "peaks_hz": peaks(&spec).iter().take(4).map(|p| p.0).collect::<Vec<_>>(),
        }),
    );
    m.set("warnings", json!(warnings));
    Ok(EvolveOutput { label, trace, dft, manifest: m })
}

pub fn fourlevel_params(cfg: &Config, vdd: Option<&Vdd>) -> Result<(FourLevelParams, Option<String>)> {
    let f = &cfg.fourlevel;
    match (&f.point, vdd) {
        (Some(p), Some(v)) => {
            let point = OperatingPoint::parse(p)?;
            Ok((four_level(&pair(cfg, point, v.value)?), Some(point.label().to_string())))
        }
        _ => {
            let split = mhz(f.split_mhz);
            let g_s = mhz(f.g_s_mhz);
            Ok((
                FourLevelParams {
                    delta: 0.0,
                    g_s,
                    g_c: g_s + split,
                    g_1: mhz(f.g_1_mhz),
                    g_2: f.g_2_ratio * split,
                    gamma1: mhz(f.gamma1_mhz),
                    gamma2: mhz(f.gamma2_mhz),
                },
                None,
            ))
        }
    }
}

pub fn run_fourlevel(cfg: &Config, vdd: Option<&Vdd>) -> Result<(Table, Manifest)> {
    let f = &cfg.fourlevel;
    let (base, point) = fourlevel_params(cfg, vdd)?;
    let split = base.g_c - base.g_s;
    let rho0 = initial_state(f.alpha, f.beta);
    let mut cols = vec!["delta_ratio".to_string(), "delta_mhz".into(), "regime".into(), "quality_factor".into(), "leakage".into()];
    for l in MODE_LABELS {
        cols.push(format!("freq_mhz_{l}"));
        cols.push(format!("rate_mhz_{l}"));
        cols.push(format!("amp_{l}"));
    }
    let ratios = f.delta_ratio.values();
    let rows = par::map(&ratios, |&x| -> Result<Vec<Cell>> {
        let p = FourLevelParams { delta: x * split, ..base };
        let modes = mode_set(&p);
        let amp = amplitudes(&modes, &rho0, 0, 0);
        let mut row = vec![Cell::Num(x), Cell::Num(to_mhz(p.delta))];
        match case_report(&p) {
            Ok(r) => {
                row.push(Cell::Text(format!("{:?}", r.regime).to_lowercase()));
                row.push(Cell::Num(r.quality_factor));
            }
            Err(_) => {
                row.push(Cell::Text("outside_cases".into()));
                row.push(Cell::Sentinel(SENTINEL_FAILED));
            }
        }
        row.push(Cell::Num(equilibrium_leakage_4lv(&p, f.alpha, f.beta)?));
        for k in 0..6 {
            row.push(Cell::Num(to_mhz(modes.frequencies[k])));
            row.push(Cell::Num(to_mhz(modes.rates[k])));
            row.push(Cell::Num(2.0 * amp.plus[k].norm()));
        }
        Ok(row)
    });
    let mut t = Table::new(cols);
    for r in rows {
        t.push(r?);
    }
    let mut m = Manifest::new("fourlevel");
    m.set("point", json!(point));
    m.set(
        "params_mhz",
        json!({
            "g_s": to_mhz(base.g_s), "g_c": to_mhz(base.g_c), "g_1": to_mhz(base.g_1), "g_2": to_mhz(base.g_2),
            "gamma1": to_mhz(base.gamma1), "gamma2": to_mhz(base.gamma2),
        }),
    );
    m.set("amplitudes", json!("cosine amplitudes of the |s_L> population for the configured alpha, beta"));
    Ok((t, m))
}

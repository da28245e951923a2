//! Run configuration. One JSON document, every field optional; missing
//! fields take the defaults below. Units are the ones in the field names.

use ffq_core::noise::NoiseSpectrum;
use ffq_core::units::{ghz, hz, mhz, muev, PhysicalConstants};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {msg}")]
    Parse { path: String, line: usize, column: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub tunnel_coupling_uev: f64,
    /// Dipolar coupling V_dd/h; `None` means use the calibration file or
    /// calibrate on the fly.
    pub v_dd_mhz: Option<f64>,
    pub calibration_file: Option<String>,
    pub constants: ConstantsConfig,
    pub noise: NoiseConfig,
    pub spectrum: SpectrumConfig,
    pub dephase_map: DephaseMapConfig,
    pub relax_map: RelaxMapConfig,
    pub evolve: EvolveConfig,
    pub fourlevel: FourLevelConfig,
    pub calibrate: CalibrateConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            tunnel_coupling_uev: 47.15,
            v_dd_mhz: None,
            calibration_file: None,
            constants: ConstantsConfig::default(),
            noise: NoiseConfig::default(),
            spectrum: SpectrumConfig::default(),
            dephase_map: DephaseMapConfig::default(),
            relax_map: RelaxMapConfig::default(),
            evolve: EvolveConfig::default(),
            fourlevel: FourLevelConfig::default(),
            calibrate: CalibrateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub hyperfine_mhz: f64,
    pub gamma_e_ghz_per_t: f64,
    pub gamma_n_mhz_per_t: f64,
    pub delta_gamma: f64,
    pub zeeman_factor: f64,
    pub dot_distance_nm: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let c = PhysicalConstants::default();
        let tau = std::f64::consts::TAU;
        Self {
            hyperfine_mhz: c.hyperfine_a / tau / 1e6,
            gamma_e_ghz_per_t: c.gamma_e / tau / 1e9,
            gamma_n_mhz_per_t: c.gamma_n / tau / 1e6,
            delta_gamma: c.delta_gamma,
            zeeman_factor: c.zeeman_factor,
            dot_distance_nm: c.dot_distance * 1e9,
        }
    }
}

impl ConstantsConfig {
    pub fn physical(&self) -> PhysicalConstants {
        PhysicalConstants {
            hyperfine_a: mhz(self.hyperfine_mhz),
            gamma_e: ghz(self.gamma_e_ghz_per_t),
            gamma_n: mhz(self.gamma_n_mhz_per_t),
            delta_gamma: self.delta_gamma,
            zeeman_factor: self.zeeman_factor,
            dot_distance: self.dot_distance_nm * 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub omega_l_hz: f64,
    pub omega_h_hz: f64,
    /// Noise amplitude ω_n in μeV.
    pub amplitude_uev: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { omega_l_hz: 1.0, omega_h_hz: 1e12, amplitude_uev: 1.0 }
    }
}

impl NoiseConfig {
    pub fn spectrum(&self) -> Result<NoiseSpectrum, ConfigError> {
        NoiseSpectrum::new(hz(self.omega_l_hz), hz(self.omega_h_hz)).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn omega_n(&self) -> f64 {
        muev(self.amplitude_uev)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        (0..self.points).map(|i| self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64).collect()
    }

    pub fn validate(&self, name: &str) -> Result<(), ConfigError> {
        let ok = self.points >= 1 && self.min.is_finite() && self.max.is_finite() && (self.points == 1 || self.max > self.min);
        if ok {
            Ok(())
        } else {
            Err(ConfigError::Invalid(format!("{name}: need points >= 1 and max > min")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub b_field_t: f64,
    pub e_field_vcm: Axis,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { b_field_t: 0.796, e_field_vcm: Axis::new(-10.0, 15.0, 501) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DephaseMapConfig {
    pub e_field_vcm: Axis,
    pub b_field_t: Axis,
    /// Envelope level defining T_2.
    pub threshold: f64,
}

impl Default for DephaseMapConfig {
    fn default() -> Self {
        Self {
            e_field_vcm: Axis::new(-2.0, 10.0, 101),
            b_field_t: Axis::new(0.76, 0.84, 101),
            threshold: (-1.0f64).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelaxMapConfig {
    pub tunnel_coupling_uev: f64,
    pub e_field_vcm: Axis,
    pub b_field_t: Axis,
    pub threshold: f64,
}

impl Default for RelaxMapConfig {
    fn default() -> Self {
        Self {
            tunnel_coupling_uev: 47.2,
            e_field_vcm: Axis::new(-2.0, 6.0, 101),
            b_field_t: Axis::new(0.76, 0.82, 101),
            threshold: (-1.0f64).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Propagator {
    Secular,
    Full,
    Fourlevel,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveConfig {
    /// a, b or c; ignored when `bias` is set.
    pub point: String,
    pub bias: Option<BiasConfig>,
    pub propagator: Propagator,
    pub t_max_ns: f64,
    pub points: usize,
    /// Amplitudes on |01⟩ and |10⟩.
    pub initial: [f64; 2],
    pub trajectories: usize,
    pub max_step_ps: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            point: "a".into(),
            bias: None,
            propagator: Propagator::Secular,
            t_max_ns: 600.0,
            points: 2001,
            initial: [3f64.sqrt() / 2.0, 0.5],
            trajectories: 100,
            max_step_ps: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasConfig {
    pub b_field_t: f64,
    pub e_field_vcm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourLevelConfig {
    /// When set, parameters come from the flip-flop pair at this point
    /// (a, b or c) and only δ is swept around its value.
    pub point: Option<String>,
    pub g_s_mhz: f64,
    pub split_mhz: f64,
    /// g_2/(g_c − g_s).
    pub g_2_ratio: f64,
    pub g_1_mhz: f64,
    pub gamma1_mhz: f64,
    pub gamma2_mhz: f64,
    /// δ/(g_c − g_s).
    pub delta_ratio: Axis,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FourLevelConfig {
    fn default() -> Self {
        Self {
            point: None,
            g_s_mhz: 10.0,
            split_mhz: 300.0,
            g_2_ratio: 0.1,
            g_1_mhz: 0.0,
            gamma1_mhz: 20.0,
            gamma2_mhz: 0.0,
            delta_ratio: Axis::new(0.0, 3.0, 301),
            alpha: 1.0,
            beta: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    pub target_ns: f64,
    pub lo_mhz: f64,
    pub hi_mhz: f64,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self { target_ns: 150.0, lo_mhz: 1.0, hi_mhz: 1e5 }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        Self::parse(&text, &p)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constants.physical().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.noise.spectrum()?;
        if !(self.tunnel_coupling_uev > 0.0) || !(self.relax_map.tunnel_coupling_uev > 0.0) {
            return Err(ConfigError::Invalid("tunnel coupling must be positive".into()));
        }
        self.spectrum.e_field_vcm.validate("spectrum.e_field_vcm")?;
        self.dephase_map.e_field_vcm.validate("dephase_map.e_field_vcm")?;
        self.dephase_map.b_field_t.validate("dephase_map.b_field_t")?;
        self.relax_map.e_field_vcm.validate("relax_map.e_field_vcm")?;
        self.relax_map.b_field_t.validate("relax_map.b_field_t")?;
        self.fourlevel.delta_ratio.validate("fourlevel.delta_ratio")?;
        for (name, t) in [("dephase_map.threshold", self.dephase_map.threshold), ("relax_map.threshold", self.relax_map.threshold)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(ConfigError::Invalid(format!("{name} must lie in (0, 1)")));
            }
        }
        if self.evolve.points < 2 || !(self.evolve.t_max_ns > 0.0) {
            return Err(ConfigError::Invalid("evolve needs points >= 2 and t_max_ns > 0".into()));
        }
        let [a, b] = self.evolve.initial;
        if ((a * a + b * b) - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Invalid("evolve.initial must be normalized".into()));
        }
        if let Some(v) = self.v_dd_mhz {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid("v_dd_mhz must be nonnegative".into()));
            }
        }
        Ok(())
    }
}

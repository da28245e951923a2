//! 1/f charge-noise model and second-order cumulant propagators.

pub mod coherence;
pub mod monte_carlo;
pub mod profile;
pub mod propagator;
pub mod spectrum;

pub use coherence::{coherence_time, single_mode_time, CoherenceTime};
pub use monte_carlo::{evolve_monte_carlo, MonteCarloConfig};
pub use profile::{decay_profile, decay_profile_quadrature, j00, j00_asymptotic};
pub use propagator::{
    dephasing_rate, evolve_full, evolve_full_filtered, evolve_secular, EvolutionResult, EvolutionSetup,
    NoiseChannel, TermFilter,
};
pub use spectrum::NoiseSpectrum;

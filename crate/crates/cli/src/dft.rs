//! Windowed amplitude spectrum of a uniformly sampled trace.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin frequencies (Hz), 0 ..= Nyquist.
    pub freq: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// Bin spacing (Hz).
    pub resolution: f64,
}

/// Mean-subtracted, Hann-windowed, zero-padded to the next power of two.
/// Amplitudes are normalized so a pure cosine of amplitude a well inside
/// the band peaks near a.
pub fn hann_spectrum(samples: &[f64], dt: f64) -> Spectrum {
    let n = samples.len();
    let len = n.next_power_of_two();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let w = |i: usize| {
        if n == 1 {
            1.0
        } else {
            0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos()
        }
    };
    let wsum: f64 = (0..n).map(w).sum();
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|i| if i < n { Complex::new((samples[i] - mean) * w(i), 0.0) } else { Complex::new(0.0, 0.0) })
        .collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let resolution = 1.0 / (len as f64 * dt);
    let half = len / 2;
    let freq = (0..=half).map(|k| k as f64 * resolution).collect();
    let amplitude = (0..=half).map(|k| 2.0 * buf[k].norm() / wsum).collect();
    Spectrum { freq, amplitude, resolution }
}

/// Local maxima, strongest first.
pub fn peaks(s: &Spectrum) -> Vec<(f64, f64)> {
    let a = &s.amplitude;
    let mut out: Vec<(f64, f64)> = (1..a.len().saturating_sub(1))
        .filter(|&k| a[k] > a[k - 1] && a[k] >= a[k + 1])
        .map(|k| (s.freq[k], a[k]))
        .collect();
    out.sort_by(|x, y| y.1.total_cmp(&x.1));
    out
}

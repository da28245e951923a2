//! Cosine integrals.
//!
//! `cin(x) = ∫_0^x (1 - cos t)/t dt` is entire and is the form used
//! internally; `ci(x) = γ + ln x - cin(x)`.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 4.0;

/// Entire cosine integral Cin(x). Even in x.
pub fn cin(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        cin_series(x)
    } else {
        EULER_GAMMA + x.ln() - ci_continued_fraction(x)
    }
}

/// Cosine integral Ci(x) for x > 0.
pub fn ci(x: f64) -> f64 {
    assert!(x > 0.0, "ci requires x > 0");
    if x <= SERIES_LIMIT {
        EULER_GAMMA + x.ln() - cin_series(x)
    } else {
        ci_continued_fraction(x)
    }
}

fn cin_series(x: f64) -> f64 {
    // sum_{k>=1} (-1)^{k+1} x^{2k} / (2k (2k)!)
    let x2 = x * x;
    let mut term = 1.0; // x^{2k}/(2k)! with sign
    let mut sum = 0.0;
    for k in 1..60 {
        let kk = 2.0 * k as f64;
        term *= -x2 / ((kk - 1.0) * kk);
        let add = -term / kk;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Ci(x) = -Re E1(ix) evaluated with a modified Lentz continued fraction.
fn ci_continued_fraction(x: f64) -> f64 {
    // E1(z) e^{z} = 1/(z+1-1/(z+3-4/(z+5-...)))
    let tiny = 1e-300;
    let (mut b_re, b_im) = (1.0, x);
    let (mut c_re, mut c_im) = (1.0 / tiny, 0.0);
    let (mut d_re, mut d_im) = inv(b_re, b_im);
    let (mut h_re, mut h_im) = (d_re, d_im);
    for i in 1..100_000 {
        let a = -((i * i) as f64);
        b_re += 2.0;
        // d = 1/(a d + b)
        let (t_re, t_im) = (a * d_re + b_re, a * d_im + b_im);
        let (nd_re, nd_im) = inv(t_re, t_im);
        d_re = nd_re;
        d_im = nd_im;
        // c = b + a/c
        let (ic_re, ic_im) = inv(c_re, c_im);
        c_re = b_re + a * ic_re;
        c_im = b_im + a * ic_im;
        let (del_re, del_im) = (c_re * d_re - c_im * d_im, c_re * d_im + c_im * d_re);
        let (nh_re, nh_im) = (h_re * del_re - h_im * del_im, h_re * del_im + h_im * del_re);
        h_re = nh_re;
        h_im = nh_im;
        if (del_re - 1.0).abs() + del_im.abs() < 1e-16 {
            break;
        }
    }
    // E1(ix) = h * e^{-ix}
    let (s, c) = x.sin_cos();
    let e1_re = h_re * c + h_im * s;
    -e1_re
}

fn inv(re: f64, im: f64) -> (f64, f64) {
    let n = re * re + im * im;
    (re / n, -im / n)
}

/// `G(x) = (1 - cos x)/(2x²) + sin x/(2x) + Cin(x)/2`, with G(0) = 3/4.
///
/// With it, `∫_0^t (t-τ)·Cin(aτ) dτ`-type integrals of the 1/f correlation
/// collapse to closed form.
pub fn g_kernel(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-4 {
        return 0.75 + x * x / 48.0;
    }
    let h = (0.5 * x).sin();
    2.0 * h * h / (2.0 * x * x) + x.sin() / (2.0 * x) + 0.5 * cin(x)
}

//! Gauss–Legendre quadrature.

use nalgebra::Complex;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex<f64> {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule on [-1, 1]; nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<T: Integrand>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Integrate over consecutive panels given by `edges`.
    pub fn integrate_panels<T: Integrand>(&self, edges: &[f64], mut f: impl FnMut(f64) -> T) -> T {
        let mut acc = T::zero();
        for w in edges.windows(2) {
            acc = acc + self.integrate(w[0], w[1], &mut f);
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

pub fn gl32() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(32))
}

pub fn gl64() -> &'static GaussLegendre {
    static R: OnceLock<GaussLegendre> = OnceLock::new();
    R.get_or_init(|| GaussLegendre::new(64))
}

/// Adaptive bisection with a 32-point rule until the two halves agree with
/// the whole to `tol` (absolute).
pub fn adaptive<T: Integrand>(a: f64, b: f64, tol: f64, f: &mut impl FnMut(f64) -> T) -> T {
    fn rec<T: Integrand>(a: f64, b: f64, whole: T, tol: f64, depth: u32, f: &mut impl FnMut(f64) -> T) -> T {
        let m = 0.5 * (a + b);
        let left = gl32().integrate(a, m, &mut *f);
        let right = gl32().integrate(m, b, &mut *f);
        let sum = left + right;
        if depth == 0 || (sum + whole * -1.0).magnitude() <= tol {
            return sum;
        }
        rec(a, m, left, 0.5 * tol, depth - 1, f) + rec(m, b, right, 0.5 * tol, depth - 1, f)
    }
    let whole = gl32().integrate(a, b, &mut *f);
    rec(a, b, whole, tol, 40, f)
}

//! Small dense linear algebra: cyclic Jacobi eigensolver, matrix exponential,
//! Kronecker products.

use crate::{Error, Result};
use nalgebra::{Complex, DMatrix};

pub type C64 = Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are eigenvectors; largest-magnitude component positive.
    pub vectors: RMat,
}

pub fn max_asymmetry(a: &RMat) -> f64 {
    let n = a.nrows();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    m
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Rejects input whose asymmetry exceeds 1e-12 relative to its largest entry.
pub fn symmetric_eigen(a: &RMat) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = max_asymmetry(a);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let mut m = a.clone();
    // symmetrize exactly; the upper triangle drives the rotations
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = RMat::identity(n, n);
    let norm = m.norm();
    let threshold = 1e-14 * norm;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = RMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.column(i).into_owned();
        let big = col.iamax();
        if col[big] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(k, &col);
    }
    Ok(SymmetricEigen { values, vectors })
}

fn rotate(m: &mut RMat, v: &mut RMat, p: usize, q: usize, c: f64, s: f64) {
    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Eigen-decomposition of a complex Hermitian matrix through its real 2N
/// embedding `[[Re, -Im], [Im, Re]]`. Each eigenvalue appears twice there;
/// complex eigenvectors are recovered by Gram–Schmidt over the doubled set.
pub fn hermitian_eigen(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = h.nrows();
    let mut big = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let eig = symmetric_eigen(&big)?;
    let mut values = Vec::with_capacity(n);
    let mut vecs: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(n);
    for k in 0..2 * n {
        if vecs.len() == n {
            break;
        }
        let col = eig.vectors.column(k);
        let mut u = nalgebra::DVector::from_fn(n, |i, _| C64::new(col[i], col[i + n]));
        for w in &vecs {
            let proj = w.dotc(&u);
            u -= w * proj;
        }
        let nu = u.norm();
        if nu > 0.5 {
            u /= C64::new(nu, 0.0);
            values.push(eig.values[k]);
            vecs.push(u);
        }
    }
    let mut out = CMat::zeros(n, n);
    for (k, u) in vecs.iter().enumerate() {
        out.set_column(k, u);
    }
    Ok((values, out))
}

/// Largest element modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn kron(a: &RMat, b: &RMat) -> RMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    RMat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(A) by scaling and squaring with a truncated Taylor series
/// (terms until their norm drops below 1e-12 relative).
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / C64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        result += &term;
        if one_norm(&term) < 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 4.0, 2.0]));
        let e = symmetric_eigen(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0, 4.0]);
        for k in 0..4 {
            assert_eq!(e.vectors.column(k).amax(), 1.0);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let mut a = RMat::identity(3, 3);
        a[(0, 1)] = 1e-6;
        assert!(matches!(symmetric_eigen(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn embedded_pauli_x() {
        let mut a = RMat::zeros(4, 4);
        a[(1, 2)] = 1.0;
        a[(2, 1)] = 1.0;
        let e = symmetric_eigen(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expm_rotation() {
        // exp(-i θ σ_x) = cos θ - i sin θ σ_x
        let th = 7.3;
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = C64::new(0.0, -th);
        a[(1, 0)] = C64::new(0.0, -th);
        let u = expm(&a);
        assert!((u[(0, 0)] - C64::new(th.cos(), 0.0)).norm() < 1e-13);
        assert!((u[(0, 1)] - C64::new(0.0, -th.sin())).norm() < 1e-13);
    }

    #[test]
    fn expm_nilpotent() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 1)] = C64::new(2.0, 0.0);
        a[(1, 2)] = C64::new(3.0, 0.0);
        let e = expm(&a);
        assert!((e[(0, 2)] - C64::new(3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn hermitian_degenerate() {
        let mut h = CMat::identity(3, 3);
        h[(0, 1)] = C64::new(0.0, 1.0);
        h[(1, 0)] = C64::new(0.0, -1.0);
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        let expect = [0.0, 1.0, 2.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let recon = &vecs * CMat::from_diagonal(&nalgebra::DVector::from_iterator(3, vals.iter().map(|&x| C64::new(x, 0.0)))) * vecs.adjoint();
        assert!((recon - h).norm() < 1e-12);
    }
}

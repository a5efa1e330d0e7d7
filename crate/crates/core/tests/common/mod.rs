//! Independent dense references. Nothing here calls the library's
//! numerics; rates are rebuilt from their closed forms.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn gain(g: f64, ns: f64, n: usize) -> f64 {
    let n = n as f64;
    n * g / (1.0 + n / ns)
}

pub fn loss(kappa: f64, n: usize) -> f64 {
    n as f64 * kappa
}

/// Dense generator with the reflecting boundary at `n_max`.
pub fn dense_generator(g: f64, kappa: f64, ns: f64, n_max: usize) -> DMatrix<f64> {
    let d = n_max + 1;
    let mut m = DMatrix::zeros(d, d);
    for n in 0..d {
        let up = if n < n_max { gain(g, ns, n + 1) } else { 0.0 };
        m[(n, n)] = -(up + loss(kappa, n));
        if n > 0 {
            m[(n, n - 1)] = gain(g, ns, n);
        }
        if n < n_max {
            m[(n, n + 1)] = loss(kappa, n + 1);
        }
    }
    m
}

/// Eigenvalues of a general real matrix, descending; they must be real.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = m
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-8 * (1.0 + z.re.abs()), "complex eigenvalue {z}");
            z.re
        })
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap());
    out
}

/// `exp(t m)` by Taylor series with scaling and squaring.
pub fn expm(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let a = m * t;
    let norm = a.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = a / 2f64.powi(squarings as i32);
    let d = m.nrows();
    let mut sum = DMatrix::identity(d, d);
    let mut term = DMatrix::identity(d, d);
    for k in 1..=30 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Normalized null vector of `m`: one balance row is replaced by the
/// normalization constraint.
pub fn null_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.nrows();
    let mut a = m.clone();
    let mut rhs = DVector::zeros(d);
    for j in 0..d {
        a[(d - 1, j)] = 1.0;
    }
    rhs[d - 1] = 1.0;
    a.lu().solve(&rhs).expect("singular system")
}

/// `H_k(x) = k! sum_m (-1)^m (2x)^(k-2m) / (m! (k-2m)!)`.
pub fn hermite_explicit(k: usize, x: f64) -> f64 {
    let fact = |n: usize| (1..=n).fold(1.0, |acc, i| acc * i as f64);
    (0..=k / 2)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * (2.0 * x).powi((k - 2 * m) as i32) / (fact(m) * fact(k - 2 * m))
        })
        .sum::<f64>()
        * fact(k)
}

/// Detailed-balance stationary state summed in log-space.
pub fn stationary(g: f64, kappa: f64, ns: f64, n_max: usize) -> Vec<f64> {
    let mut log_p = vec![0.0];
    for n in 1..=n_max {
        let prev = log_p[n - 1];
        log_p.push(prev + gain(g, ns, n).ln() - loss(kappa, n).ln());
    }
    let top = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = log_p.iter().map(|l| (l - top).exp()).sum();
    log_p.iter().map(|l| (l - top - z.ln()).exp()).collect()
}

/// Left eigenfunctions from a dense symmetric eigensolve: eigenvalues in
/// descending order and `phi_n = v_n / sqrt(P_n)`, signed so that
/// `phi` is positive at `n_max`.
pub fn dense_left_modes(g: f64, kappa: f64, ns: f64, n_max: usize, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let ps = stationary(g, kappa, ns, n_max);
    let d = n_max + 1;
    let mut s = DMatrix::zeros(d, d);
    for n in 0..d {
        let up = if n < n_max { gain(g, ns, n + 1) } else { 0.0 };
        s[(n, n)] = -(up + loss(kappa, n));
        if n < n_max {
            let c = (gain(g, ns, n + 1) * loss(kappa, n + 1)).sqrt();
            s[(n, n + 1)] = c;
            s[(n + 1, n)] = c;
        }
    }
    let eig = SymmetricEigen::new(s);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut values = Vec::new();
    let mut lefts = Vec::new();
    for &i in order.iter().take(count) {
        let v = eig.eigenvectors.column(i);
        let sign = if v[n_max] < 0.0 { -1.0 } else { 1.0 };
        values.push(eig.eigenvalues[i]);
        lefts.push((0..d).map(|n| sign * v[n] / ps[n].sqrt()).collect());
    }
    (values, lefts)
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

//! Symmetric tridiagonal eigenproblem: eigenvalues by implicit-shift QL,
//! eigenvectors by inverse iteration.

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;
const MAX_INVERSE_ITERATIONS: usize = 10;
/// Eigenvalues closer than `CLUSTER_TOL * ||T||_1` are treated as a cluster
/// and their vectors are explicitly reorthogonalized.
const CLUSTER_TOL: f64 = 1e-5;

/// Symmetric tridiagonal matrix with `off[i] = T[i][i+1]`.
#[derive(Debug, Clone, Copy)]
pub struct SymTridiagonal<'a> {
    pub diag: &'a [f64],
    pub off: &'a [f64],
}

impl SymTridiagonal<'_> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn norm1(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `out = T x`.
    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }
}

/// All eigenvalues, sorted in descending order.
pub fn eigenvalues(t: SymTridiagonal<'_>) -> Result<Vec<f64>> {
    let n = t.dim();
    let mut d = t.diag.to_vec();
    if n == 1 {
        return Ok(d);
    }
    let mut e = t.off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::ConvergenceFailure { index: l });
            }
            // Wilkinson-type shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
    Ok(d)
}

/// LU factorization with partial pivoting of `T - shift I`.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: SymTridiagonal<'_>, shift: f64, tiny_pivot: f64) -> Self {
        let n = t.dim();
        let mut dl = t.off.to_vec();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du = t.off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        // The shift is an eigenvalue, so some pivot is (nearly) zero.
        for p in d.iter_mut() {
            if p.abs() < tiny_pivot {
                *p = if *p < 0.0 { -tiny_pivot } else { tiny_pivot };
            }
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    norm
}

fn project_out(x: &mut [f64], basis: &[&[f64]]) {
    for q in basis {
        let c = dot(x, q);
        x.iter_mut().zip(q.iter()).for_each(|(v, qi)| *v -= c * qi);
    }
}

/// Orthonormal eigenvectors for `values[0..k]` (descending eigenvalues from
/// [`eigenvalues`]).
///
/// `known` optionally supplies the exact unit vector of the first eigenvalue.
/// Every computed vector is kept orthogonal to it and to the members of its
/// eigenvalue cluster.
pub fn eigenvectors(
    t: SymTridiagonal<'_>,
    values: &[f64],
    k: usize,
    known: Option<&[f64]>,
) -> Result<Vec<Vec<f64>>> {
    let n = t.dim();
    let norm = t.norm1().max(f64::MIN_POSITIVE);
    let tiny_pivot = f64::EPSILON * norm;
    let cluster_gap = CLUSTER_TOL * norm;
    let accept = 10.0 * (n as f64).sqrt() * f64::EPSILON * norm;

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut cluster_start = 0;
    let mut tx = vec![0.0; n];
    for (alpha, &lambda) in values.iter().enumerate().take(k) {
        if alpha == 0 {
            if let Some(v) = known {
                vectors.push(v.to_vec());
                continue;
            }
        }
        if alpha > 0 && values[alpha - 1] - lambda > cluster_gap {
            cluster_start = alpha;
        }
        let mut basis: Vec<&[f64]> = vectors[cluster_start..].iter().map(|v| v.as_slice()).collect();
        if cluster_start > 0 && known.is_some() {
            basis.push(&vectors[0]);
        }

        let lu = ShiftedLu::new(t, lambda, tiny_pivot);
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                let phase = ((i as f64 + 1.0) * 0.618_033_988_749_895 + alpha as f64 * 0.414_213_562_373_095).fract();
                1.0 + phase - 0.5
            })
            .collect();
        project_out(&mut x, &basis);
        normalize(&mut x);

        let mut residual = f64::INFINITY;
        for iter in 0..MAX_INVERSE_ITERATIONS {
            lu.solve(&mut x);
            project_out(&mut x, &basis);
            normalize(&mut x);
            t.mul(&x, &mut tx);
            residual = tx.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            if iter >= 2 && residual <= accept {
                break;
            }
        }
        if residual > 1e-8 * norm {
            return Err(Error::ConvergenceFailure { index: alpha });
        }
        vectors.push(x);
    }
    Ok(vectors)
}

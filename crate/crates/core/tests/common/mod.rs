//! Oracles written independently of the library's linear algebra.
#![allow(dead_code, clippy::needless_range_loop)]

use hankel_schmidt::linalg::{c, CMat, C64};
use hankel_schmidt::symbols::MatrixSymbol;

/// Block Hankel matrix `[U(j + k)]`, `j, k = 0..=n`, assembled entry by entry.
pub fn gamma_oracle(u: &MatrixSymbol, n: usize) -> Vec<Vec<C64>> {
    let m = u.m();
    let size = m * (n + 1);
    let mut g = vec![vec![c(0.0, 0.0); size]; size];
    for j in 0..=n {
        for k in 0..=n {
            if j + k > u.degree() {
                continue;
            }
            let b = u.block(j + k);
            for r in 0..m {
                for col in 0..m {
                    g[j * m + r][k * m + col] = b[(r, col)];
                }
            }
        }
    }
    g
}

/// `Gamma conj(Gamma)` by triple loop.
pub fn hsq_oracle(g: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = g.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = c(0.0, 0.0);
            for k in 0..n {
                acc += g[i][k] * g[k][j].conj();
            }
            out[i][j] = acc;
        }
    }
    out
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Eigenvalues of a Hermitian matrix through its real embedding
/// `[[A, -B], [B, A]]`, which doubles every eigenvalue.
pub fn hermitian_eigenvalues(h: &[Vec<C64>]) -> Vec<f64> {
    let n = h.len();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (h[i][j].re, h[i][j].im);
            r[i][j] = a;
            r[i][n + j] = -b;
            r[n + i][j] = b;
            r[n + i][n + j] = a;
        }
    }
    jacobi_eigenvalues(r).into_iter().step_by(2).collect()
}

/// Schmidt values (square roots of eigenvalues of `H_U^2`) above `floor`,
/// descending, with multiplicities counted by repetition.
pub fn schmidt_values_oracle(u: &MatrixSymbol, n: usize, floor: f64) -> Vec<f64> {
    let ev = hermitian_eigenvalues(&hsq_oracle(&gamma_oracle(u, n)));
    let mut s: Vec<f64> = ev.into_iter().filter(|&e| e > floor * floor).map(f64::sqrt).collect();
    s.reverse();
    s
}

pub fn to_cmat(a: &[Vec<C64>]) -> CMat {
    CMat::from_fn(a.len(), a.len(), |i, j| a[i][j])
}

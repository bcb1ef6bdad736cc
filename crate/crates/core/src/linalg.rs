//! Dense complex linear algebra shared by the operator and subspace layers.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Singular values (descending) with a full unitary basis of singular
/// vectors on one side; the trailing columns span the kernel of that side.
pub struct OneSidedSvd {
    pub singular_values: Vec<f64>,
    pub vectors: CMat,
}

/// Full right factor of the SVD. `singular_values` has one entry per column
/// of `a` (zeros padded past the rank bound).
pub fn right_svd(a: &CMat) -> OneSidedSvd {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return OneSidedSvd {
            singular_values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        };
    }
    // Padding with zero rows leaves A*A unchanged and makes the thin right
    // factor square.
    let work = if rows < cols {
        let mut padded = CMat::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let v = svd.v_t.expect("requested V^t").adjoint();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    OneSidedSvd {
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        vectors: CMat::from_fn(cols, cols, |r, k| v[(r, order[k])]),
    }
}

/// Full left factor: singular values (one per row) and a unitary matrix whose
/// leading columns span the range.
pub fn left_svd(a: &CMat) -> OneSidedSvd {
    right_svd(&a.adjoint())
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Orthonormal basis of the column space of `a`, keeping directions whose
/// singular value exceeds `tol`.
pub fn range_basis(a: &CMat, tol: f64) -> CMat {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return CMat::zeros(rows, 0);
    }
    let svd = left_svd(a);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    svd.vectors.columns(0, rank).into_owned()
}

/// Orthonormal basis of the kernel of `a` (right singular vectors with
/// singular value at most `tol`).
pub fn null_basis(a: &CMat, tol: f64) -> CMat {
    let cols = a.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return CMat::identity(cols, cols);
    }
    let svd = right_svd(a);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    svd.vectors.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the orthogonal complement (within `C^n`) of the
/// column space of `a`, with singular-value threshold `tol`.
pub fn complement_basis(a: &CMat, tol: f64) -> CMat {
    let rows = a.nrows();
    if a.ncols() == 0 {
        return CMat::identity(rows, rows);
    }
    let svd = left_svd(a);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    svd.vectors.columns(rank, rows - rank).into_owned()
}

/// Max entrywise |A - A*|.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius norm of `basis* basis - I`.
pub fn orthonormality_defect(basis: &CMat) -> f64 {
    let q = basis.ncols();
    if q == 0 {
        return 0.0;
    }
    (basis.adjoint() * basis - CMat::identity(q, q)).norm()
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

pub fn conj_mat(a: &CMat) -> CMat {
    a.map(|z| z.conj())
}

/// Stacks column vectors into a matrix with `rows` rows.
pub fn hstack(rows: usize, cols: &[CVec]) -> Result<CMat> {
    for v in cols {
        if v.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: v.len(),
            });
        }
    }
    Ok(CMat::from_fn(rows, cols.len(), |i, j| cols[j][i]))
}

/// Concatenates matrices with the same row count side by side.
pub fn hcat(rows: usize, blocks: &[&CMat]) -> CMat {
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, total);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Condition number in the 2-norm; infinite for singular matrices.
pub fn condition_number(a: &CMat) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0_f64, |m, &s| m.max(s));
    let min = sv.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

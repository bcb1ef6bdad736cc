//! Hermitian eigensolves, Schmidt subspaces and the subspace toolkit
//! (principal angles, intersections, complements, numerical rank).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::linalg::{
    complement_basis, hcat, hermitian_defect, null_basis, op_norm, range_basis, right_svd, CMat, CVec,
};

/// Eigenvalues (ascending) with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &CMat) -> Result<Eigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
        });
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let defect = hermitian_defect(m);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian {
            asymmetry: defect / scale,
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    Ok(Eigen {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]),
    })
}

/// Orthonormal columns in a coefficient window of `C^m`-valued functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    m: usize,
    basis: CMat,
}

impl SubspaceBasis {
    /// Wraps columns that are already orthonormal.
    pub fn new(m: usize, basis: CMat) -> Self {
        assert!(m > 0 && basis.nrows().is_multiple_of(m), "rows must be a multiple of m");
        Self { m, basis }
    }

    /// Orthonormal basis of the span of `vectors`, dropping directions with
    /// singular value at most `tol`.
    pub fn span(m: usize, vectors: &CMat, tol: f64) -> Self {
        Self::new(m, range_basis(vectors, tol))
    }

    pub fn span_of(m: usize, rows: usize, vectors: &[CVec], tol: f64) -> Self {
        let cols: Vec<&CVec> = vectors.iter().collect();
        let mat = CMat::from_fn(rows, cols.len(), |i, j| cols[j][i]);
        Self::span(m, &mat, tol)
    }

    pub fn empty(m: usize, rows: usize) -> Self {
        Self::new(m, CMat::zeros(rows, 0))
    }

    /// The whole window.
    pub fn full(m: usize, rows: usize) -> Self {
        Self::new(m, CMat::identity(rows, rows))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Truncation `N` of the ambient window.
    pub fn window(&self) -> usize {
        self.basis.nrows() / self.m - 1
    }

    pub fn rows(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn matrix(&self) -> &CMat {
        &self.basis
    }

    pub fn column(&self, i: usize) -> CVec {
        self.basis.column(i).into_owned()
    }

    pub fn function(&self, i: usize) -> FourierVec {
        FourierVec::from_window(self.m, &self.column(i))
    }

    pub fn functions(&self) -> Vec<FourierVec> {
        (0..self.dim()).map(|i| self.function(i)).collect()
    }

    /// Orthogonal projection of `v` onto the span.
    pub fn project(&self, v: &CVec) -> CVec {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// `(I - P) v`.
    pub fn reject(&self, v: &CVec) -> CVec {
        v - self.project(v)
    }

    /// Same functions in the larger window `[0, n]` (zero padding).
    pub fn embed(&self, n: usize) -> Self {
        let rows = (n + 1) * self.m;
        assert!(rows >= self.rows());
        let mut out = CMat::zeros(rows, self.dim());
        out.view_mut((0, 0), (self.rows(), self.dim())).copy_from(&self.basis);
        Self::new(self.m, out)
    }

    /// Direct sum with another subspace of the same window (re-orthonormalized).
    pub fn join(&self, other: &Self, tol: f64) -> Self {
        Self::span(self.m, &hcat(self.rows(), &[&self.basis, &other.basis]), tol)
    }

    /// The `m x q` matrix of values at zero of the basis functions.
    pub fn values_at_zero(&self) -> CMat {
        self.basis.rows(0, self.m).into_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorTag {
    H,
    K,
}

/// A Schmidt subspace `ker(T^2 - s^2 I)`, `s > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSubspace {
    pub s: f64,
    pub basis: SubspaceBasis,
    pub multiplicity: usize,
    /// `max |lambda - s^2|` over the merged eigenvalues.
    pub cluster_residual: f64,
    pub operator: OperatorTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Relative merge tolerance on `s`.
    pub cluster_tol: f64,
    /// Values `s <= s_floor` are treated as kernel.
    pub s_floor: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-8,
            s_floor: 1e-8,
        }
    }
}

/// All Schmidt subspaces of one operator, `s` descending, plus the kernel
/// dimension left out.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub subspaces: Vec<SchmidtSubspace>,
    pub kernel_dim: usize,
    pub eigen: Eigen,
}

/// Eigenvalues at or below this are rounding noise of the solver.
pub fn eigen_noise_floor(m: &CMat) -> f64 {
    32.0 * m.nrows() as f64 * f64::EPSILON * op_norm(m)
}

/// Clusters the spectrum of the Hermitian PSD matrix `m_sq` (a square
/// `T^2`) into Schmidt subspaces.
pub fn schmidt_subspaces(
    m_sq: &CMat,
    m: usize,
    operator: OperatorTag,
    config: &ClusterConfig,
) -> Result<SchmidtSpectrum> {
    let eigen = hermitian_eig(m_sq)?;
    let noise = eigen_noise_floor(m_sq);
    let n = eigen.values.len();
    // (s, column) for the nonzero part, descending.
    let mut kept: Vec<(f64, usize)> = (0..n)
        .filter(|&i| eigen.values[i] > noise)
        .map(|i| (eigen.values[i].sqrt(), i))
        .filter(|&(s, _)| s > config.s_floor)
        .collect();
    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
    let kernel_dim = n - kept.len();
    let Some(&(s_max, _)) = kept.first() else {
        return Ok(SchmidtSpectrum {
            subspaces: Vec::new(),
            kernel_dim,
            eigen,
        });
    };
    let merge = config.cluster_tol * s_max;
    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for &(s, i) in &kept {
        match groups.last_mut() {
            Some(g) if g.last().unwrap().0 - s <= merge => g.push((s, i)),
            Some(g) => {
                let upper = g.last().unwrap().0;
                let gap = upper - s;
                if gap < 3.0 * merge {
                    return Err(Error::AmbiguousClustering { upper, lower: s, gap });
                }
                groups.push(vec![(s, i)]);
            }
            None => groups.push(vec![(s, i)]),
        }
    }
    let subspaces = groups
        .into_iter()
        .map(|g| {
            let s = g.iter().map(|p| p.0).sum::<f64>() / g.len() as f64;
            let cluster_residual = g
                .iter()
                .map(|&(_, i)| (eigen.values[i] - s * s).abs())
                .fold(0.0, f64::max);
            let basis = CMat::from_fn(n, g.len(), |r, k| eigen.vectors[(r, g[k].1)]);
            SchmidtSubspace {
                s,
                basis: SubspaceBasis::new(m, basis),
                multiplicity: g.len(),
                cluster_residual,
                operator,
            }
        })
        .collect();
    Ok(SchmidtSpectrum {
        subspaces,
        kernel_dim,
        eigen,
    })
}

/// Eigenvectors of a decomposition whose `sqrt(lambda)` lies within `tol`
/// of `s`.
pub fn eigenspace_at(eigen: &Eigen, m: usize, s: f64, tol: f64) -> SubspaceBasis {
    let cols: Vec<usize> = (0..eigen.values.len())
        .filter(|&i| (eigen.values[i].max(0.0).sqrt() - s).abs() <= tol)
        .collect();
    let rows = eigen.vectors.nrows();
    SubspaceBasis::new(m, CMat::from_fn(rows, cols.len(), |r, k| eigen.vectors[(r, cols[k])]))
}

/// Principal angles between two subspaces, ascending, one per dimension of
/// the smaller one. Small angles come from sines, large ones from cosines, so
/// both ends are accurate.
pub fn principal_angles(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<Vec<f64>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let (big, small) = if a.dim() >= b.dim() { (a, b) } else { (b, a) };
    let q = small.dim();
    if q == 0 {
        return Ok(Vec::new());
    }
    let cross = big.matrix().adjoint() * small.matrix();
    let cosines = right_svd(&cross).singular_values;
    let rejected = small.matrix() - big.matrix() * &cross;
    let mut sines = right_svd(&rejected).singular_values;
    sines.reverse();
    let mut angles: Vec<f64> = (0..q)
        .map(|k| {
            let cos = cosines[k].clamp(0.0, 1.0);
            let sin = sines[k].clamp(0.0, 1.0);
            if cos * cos < 0.5 {
                cos.acos()
            } else {
                sin.asin()
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Largest principal angle; `pi/2` when the dimensions differ.
pub fn max_angle(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    let angles = principal_angles(a, b)?;
    if a.dim() != b.dim() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    Ok(angles.last().copied().unwrap_or(0.0))
}

/// Equal dimension and every principal angle at most `tol`.
pub fn subspaces_equal(a: &SubspaceBasis, b: &SubspaceBasis, tol: f64) -> Result<bool> {
    Ok(a.dim() == b.dim() && max_angle(a, b)? <= tol)
}

/// Orthonormal basis of `E cap zH^2 = {F in E : F(0) = 0}`.
pub fn intersect_with_shifted(e: &SubspaceBasis, tol: f64) -> SubspaceBasis {
    if e.is_empty() {
        return e.clone();
    }
    let kernel = null_basis(&e.values_at_zero(), tol);
    SubspaceBasis::new(e.m(), e.matrix() * kernel)
}

/// Orthonormal basis of `E minus (E cap zH^2)`, the wandering part.
pub fn wandering_part(e: &SubspaceBasis, tol: f64) -> SubspaceBasis {
    if e.is_empty() {
        return e.clone();
    }
    let coimage = range_basis(&e.values_at_zero().adjoint(), tol);
    SubspaceBasis::new(e.m(), e.matrix() * coimage)
}

/// `{f in E : <f, v> = 0 for every v}`. Each `v` is normalized first; zero
/// vectors impose nothing.
pub fn orth_complement_within(e: &SubspaceBasis, vectors: &[CVec], tol: f64) -> SubspaceBasis {
    let units: Vec<CVec> = vectors
        .iter()
        .filter(|v| v.norm() > f64::MIN_POSITIVE)
        .map(|v| v.normalize())
        .collect();
    if e.is_empty() || units.is_empty() {
        return e.clone();
    }
    let a = CMat::from_fn(units.len(), e.dim(), |i, j| {
        units[i].dotc(&e.matrix().column(j).into_owned())
    });
    SubspaceBasis::new(e.m(), e.matrix() * null_basis(&a, tol))
}

/// Orthogonal complement of `e` in its window.
pub fn window_complement(e: &SubspaceBasis, tol: f64) -> SubspaceBasis {
    SubspaceBasis::new(e.m(), complement_basis(e.matrix(), tol))
}

/// Singular values above `rank_tol * sigma_max * max(rows, cols)`.
pub fn numerical_rank(a: &CMat, rank_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = right_svd(a).singular_values;
    let top = sv.first().copied().unwrap_or(0.0);
    let cut = rank_tol * top * a.nrows().max(a.ncols()) as f64;
    sv.iter().filter(|&&s| s > cut && s > 0.0).count()
}

/// Singular values above an absolute threshold.
pub fn absolute_rank(a: &CMat, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    right_svd(a).singular_values.iter().filter(|&&s| s > tol).count()
}

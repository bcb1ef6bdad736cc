//! Finite block Hankel realizations of `H_U`, `K_U = H_{S*U}`, their squares
//! and the linear Hankel operator `G_U`.
//!
//! `H_U` is anti-linear, so it is carried as the pair (matrix, conjugation):
//! `H_U f = Gamma conj(f)`. Composing two such maps gives `Gamma conj(Gamma)`.

use crate::error::{Error, Result};
use crate::fourier::{multiply, FourierVec};
use crate::linalg::{conj_mat, conj_vec, op_norm, CMat, CVec, ZERO};
use crate::symbols::{shift_symbol, MatrixSymbol};

/// `Gamma` with block `(j, k) = U(j + k)` for `0 <= j, k <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHankelMatrix {
    symbol: MatrixSymbol,
    n: usize,
    gamma: CMat,
}

/// `Gamma` for `U` at truncation `N`.
pub fn build_gamma(u: &MatrixSymbol, n: usize) -> BlockHankelMatrix {
    let m = u.m();
    let size = (n + 1) * m;
    let mut gamma = CMat::zeros(size, size);
    for j in 0..=n {
        for k in 0..=n {
            if j + k > u.degree() {
                continue;
            }
            gamma
                .view_mut((j * m, k * m), (m, m))
                .copy_from(&u.blocks()[j + k]);
        }
    }
    BlockHankelMatrix {
        symbol: u.clone(),
        n,
        gamma,
    }
}

/// `Gamma' = [U(j + k + 1)]`, the matrix of `K_U`.
pub fn build_shifted_gamma(u: &MatrixSymbol, n: usize) -> BlockHankelMatrix {
    build_gamma(&shift_symbol(u), n)
}

impl BlockHankelMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.gamma
    }

    pub fn symbol(&self) -> &MatrixSymbol {
        &self.symbol
    }

    pub fn m(&self) -> usize {
        self.symbol.m()
    }

    /// Truncation `N`.
    pub fn window(&self) -> usize {
        self.n
    }

    /// Size `(N + 1) m` of the coefficient space.
    pub fn size(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn tail_bound(&self) -> f64 {
        self.symbol.tail_bound()
    }

    pub fn symbol_degree(&self) -> usize {
        self.symbol.degree()
    }

    /// Coefficient vector of `f` in this window.
    pub fn coords(&self, f: &FourierVec) -> Result<CVec> {
        if f.dim() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: f.dim(),
            });
        }
        f.to_window(self.n)
    }

    pub fn vector(&self, v: &CVec) -> FourierVec {
        FourierVec::from_window(self.m(), v)
    }

    /// `H_U f = Gamma conj(f)` for `f` inside the window.
    pub fn apply_h(&self, f: &FourierVec) -> Result<FourierVec> {
        let v = self.coords(f)?;
        Ok(self.vector(&self.apply_h_coords(&v)))
    }

    pub fn apply_h_coords(&self, v: &CVec) -> CVec {
        &self.gamma * conj_vec(v)
    }

    /// `H_U f` truncated to `[0, N]` for `f` of any degree, summed straight
    /// from the symbol blocks. Coefficients of `f` past the symbol degree do
    /// not contribute.
    pub fn apply_h_any(&self, f: &FourierVec) -> Result<FourierVec> {
        let m = self.m();
        if f.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: f.dim(),
            });
        }
        let d = self.symbol.degree();
        let mut out = FourierVec::analytic_zeros(m, self.n);
        for j in 0..=self.n.min(d) {
            let mut acc = vec![ZERO; m];
            for k in 0..=(d - j).min(f.pos()) {
                let block = &self.symbol.blocks()[j + k];
                let fk = f.block(k as i64);
                for (r, a) in acc.iter_mut().enumerate() {
                    for (col, x) in fk.iter().enumerate() {
                        *a += block[(r, col)] * x.conj();
                    }
                }
            }
            for (r, a) in acc.into_iter().enumerate() {
                out.set(j as i64, r, a);
            }
        }
        Ok(out)
    }

    /// Function path `P_m(U conj(f))` through grid multiplication, truncated
    /// to the window.
    pub fn apply_h_function(&self, f: &FourierVec) -> Result<FourierVec> {
        let prod = multiply(&self.symbol.as_series(), &f.conjugate_boundary())?;
        Ok(prod.analytic_project().restrict(0, self.n))
    }

    /// Linear Hankel `G_U f = Gamma f`.
    pub fn apply_g(&self, f: &FourierVec) -> Result<FourierVec> {
        let v = self.coords(f)?;
        Ok(self.vector(&(&self.gamma * v)))
    }

    /// `M = Gamma conj(Gamma)`, the matrix of `H_U^2`. Hermitian positive
    /// semidefinite for symmetric symbols.
    pub fn hsq_matrix(&self) -> Result<CMat> {
        self.symbol.require_symmetric()?;
        Ok(&self.gamma * conj_mat(&self.gamma))
    }

    pub fn apply_hsq(&self, f: &FourierVec) -> Result<FourierVec> {
        let m = self.hsq_matrix()?;
        let v = self.coords(f)?;
        Ok(self.vector(&(m * v)))
    }
}

/// The three realizations of `K_U f`.
#[derive(Debug, Clone, PartialEq)]
pub struct KRealizations {
    /// `H_U S f`.
    pub via_shift: FourierVec,
    /// `S* H_U f`.
    pub via_backshift: FourierVec,
    /// `H_{S*U} f`.
    pub via_shifted_symbol: FourierVec,
}

impl KRealizations {
    pub fn value(&self) -> &FourierVec {
        &self.via_shift
    }

    /// Largest coefficient difference between any two realizations.
    pub fn max_disagreement(&self) -> f64 {
        let a = self.via_shift.max_abs_diff(&self.via_backshift);
        let b = self.via_shift.max_abs_diff(&self.via_shifted_symbol);
        let c = self.via_backshift.max_abs_diff(&self.via_shifted_symbol);
        a.max(b).max(c)
    }
}

/// `K_U f` computed three ways. `gamma_shifted` must be built from the same
/// symbol and window as `gamma`.
pub fn apply_k(
    gamma: &BlockHankelMatrix,
    gamma_shifted: &BlockHankelMatrix,
    f: &FourierVec,
) -> Result<KRealizations> {
    gamma.coords(f)?;
    let via_shift = gamma.apply_h_any(&f.shift())?;
    let via_backshift = gamma.apply_h(f)?.backshift();
    let via_shifted_symbol = gamma_shifted.apply_h(f)?;
    Ok(KRealizations {
        via_shift,
        via_backshift,
        via_shifted_symbol,
    })
}

/// `||Gamma' conj(Gamma') - (Gamma conj(Gamma) - sum_i U_i U_i^*)||`.
pub fn rank_m_identity_residual(
    gamma: &BlockHankelMatrix,
    gamma_shifted: &BlockHankelMatrix,
    columns: &[FourierVec],
) -> Result<f64> {
    let h2 = gamma.hsq_matrix()?;
    let k2 = gamma_shifted.hsq_matrix()?;
    let mut rhs = h2;
    for col in columns {
        let u = col.restrict(0, gamma.window()).to_window(gamma.window())?;
        rhs -= &u * u.adjoint();
    }
    Ok(op_norm(&(k2 - rhs)))
}

/// A certified Schmidt pair `(xi, eta)` with `H_U xi = s eta`,
/// `H_U eta = s xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtPair {
    pub xi: FourierVec,
    pub eta: FourierVec,
    /// `||H_U eta - s xi||`.
    pub residual: f64,
}

/// Builds `eta = H_U xi / s` after checking `||H^2 xi - s^2 xi|| <= tol s^2`.
pub fn schmidt_pair(gamma: &BlockHankelMatrix, s: f64, xi: &FourierVec, tol: f64) -> Result<SchmidtPair> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!("Schmidt value must be positive, got {s}")));
    }
    let h2xi = gamma.apply_hsq(xi)?;
    let residual = (&h2xi - &xi.scale((s * s).into())).restrict(0, gamma.window()).norm();
    if residual > tol * s * s {
        return Err(Error::NotAnEigenvector { s, residual });
    }
    let eta = gamma.apply_h(xi)?.scale((1.0 / s).into());
    let back = gamma.apply_h(&eta)?;
    let residual = (&back - &xi.scale(s.into())).norm();
    Ok(SchmidtPair {
        xi: xi.restrict(0, gamma.window()),
        eta,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};
    use crate::symbols::{scalar_poly, sum_difference_symbol, symbol_columns};

    fn z_pow(n: usize) -> MatrixSymbol {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        scalar_poly(&coeffs).unwrap()
    }

    #[test]
    fn gamma_of_z() {
        let g = build_gamma(&z_pow(1), 1);
        assert_eq!(g.matrix(), &CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let g2 = build_gamma(&z_pow(2), 2);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i + j == 2 { ONE } else { ZERO };
                assert_eq!(g2.matrix()[(i, j)], want);
            }
        }
    }

    #[test]
    fn sum_difference_gamma_blocks() {
        let u = sum_difference_symbol(&[ZERO, ONE], 0.0, &[ZERO, ZERO, ONE], 0.0).unwrap();
        let g = build_gamma(&u, 2);
        let block = |j: usize, k: usize| g.matrix().view((2 * j, 2 * k), (2, 2)).into_owned();
        let ones = CMat::from_element(2, 2, ONE);
        let alt = CMat::from_row_slice(2, 2, &[ONE, -ONE, -ONE, ONE]);
        assert_eq!(block(0, 1), ones);
        assert_eq!(block(1, 0), ones);
        assert_eq!(block(0, 2), alt);
        assert_eq!(block(1, 1), alt);
        assert_eq!(block(2, 0), alt);
        assert_eq!(block(0, 0), CMat::zeros(2, 2));
        assert_eq!(block(2, 2), CMat::zeros(2, 2));
        assert_eq!(g.matrix().transpose(), *g.matrix());
    }

    #[test]
    fn h_of_z_swaps_one_and_z() {
        let g = build_gamma(&z_pow(1), 3);
        let one = FourierVec::constant(&[ONE]);
        let z = FourierVec::monomial(1, 1, 0, ONE);
        assert!(g.apply_h(&one).unwrap().max_abs_diff(&z) == 0.0);
        assert!(g.apply_h(&z).unwrap().max_abs_diff(&one) == 0.0);
        let iz = z.scale(c(0.0, 1.0));
        assert!(g.apply_h(&iz).unwrap().max_abs_diff(&one.scale(c(0.0, -1.0))) == 0.0);
    }

    #[test]
    fn h_of_basis_vectors_gives_columns() {
        let u = sum_difference_symbol(&[ZERO, ONE], 0.0, &[ZERO, ZERO, ONE], 0.0).unwrap();
        let g = build_gamma(&u, 6);
        for (i, col) in symbol_columns(&u).iter().enumerate() {
            let mut e = vec![ZERO; 2];
            e[i] = ONE;
            let out = g.apply_h(&FourierVec::constant(&e)).unwrap();
            assert!(out.max_abs_diff(col) < 1e-15);
        }
    }

    #[test]
    fn hsq_of_z_is_projection_on_first_two() {
        let g = build_gamma(&z_pow(1), 4);
        let m = g.hsq_matrix().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j && i < 2 { ONE } else { ZERO };
                assert_eq!(m[(i, j)], want);
            }
        }
    }

    #[test]
    fn k_of_z_on_one() {
        let u = z_pow(1);
        let (g, gs) = (build_gamma(&u, 5), build_shifted_gamma(&u, 5));
        let k = apply_k(&g, &gs, &FourierVec::constant(&[ONE])).unwrap();
        assert!(k.value().max_abs_diff(&FourierVec::constant(&[ONE])) == 0.0);
        assert_eq!(k.max_disagreement(), 0.0);

        let constant = scalar_poly(&[c(2.0, 1.0)]).unwrap();
        let (g, gs) = (build_gamma(&constant, 3), build_shifted_gamma(&constant, 3));
        let f = FourierVec::from_components(&[vec![ONE, c(0.0, 2.0), ONE]]);
        assert_eq!(apply_k(&g, &gs, &f).unwrap().value().norm(), 0.0);
    }

    #[test]
    fn rank_m_identity_for_z() {
        let u = z_pow(1);
        let r = rank_m_identity_residual(&build_gamma(&u, 1), &build_shifted_gamma(&u, 1), &symbol_columns(&u)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn schmidt_pair_for_z() {
        let g = build_gamma(&z_pow(1), 3);
        let pair = schmidt_pair(&g, 1.0, &FourierVec::constant(&[ONE]), 1e-12).unwrap();
        assert!(pair.eta.max_abs_diff(&FourierVec::monomial(1, 1, 0, ONE)) == 0.0);
        assert_eq!(pair.residual, 0.0);
        let bad = schmidt_pair(&g, 1.0, &FourierVec::monomial(1, 2, 0, ONE), 1e-12);
        assert!(matches!(bad, Err(Error::NotAnEigenvector { .. })));
    }
}

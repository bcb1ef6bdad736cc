//! Matrix symbols `U = [u_ij]` with analytic entries: matrix polynomials and
//! finite Blaschke products truncated with a certified tail bound.

use crate::error::{Error, Result};
use crate::fourier::{FourierVec, MatrixSeries, COEFF_TOL};
use crate::linalg::{CMat, C64, ONE, ZERO};

/// An `m x m` analytic matrix function stored as coefficient blocks
/// `U(0), ..., U(d)`. `tail_bound` bounds the operator norm of everything
/// discarded past degree `d`; it is zero for polynomial data.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSymbol {
    m: usize,
    blocks: Vec<CMat>,
    tail_bound: f64,
    asymmetry: f64,
}

impl MatrixSymbol {
    /// Builds a symbol from its coefficient blocks (index = position).
    pub fn from_blocks(m: usize, blocks: Vec<CMat>, tail_bound: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("symbol size m must be positive".into()));
        }
        if !(tail_bound >= 0.0 && tail_bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("tail bound {tail_bound} is not a finite nonnegative number")));
        }
        let mut blocks = blocks;
        if blocks.is_empty() {
            blocks.push(CMat::zeros(m, m));
        }
        for b in &blocks {
            if b.shape() != (m, m) {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: if b.nrows() != m { b.nrows() } else { b.ncols() },
                });
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidArgument("symbol coefficient is not finite".into()));
            }
        }
        // Trailing zero blocks carry no information.
        while blocks.len() > 1 && blocks.last().is_some_and(|b| b.iter().all(|z| *z == ZERO)) {
            blocks.pop();
        }
        let asymmetry = blocks
            .iter()
            .map(|b| (b - b.transpose()).iter().fold(0.0_f64, |acc, z| acc.max(z.norm())))
            .fold(0.0, f64::max);
        Ok(Self {
            m,
            blocks,
            tail_bound,
            asymmetry,
        })
    }

    /// Scalar function times a constant `m x m` pattern.
    pub fn scalar_times(coeffs: &[C64], pattern: &CMat, tail_bound: f64) -> Result<Self> {
        let m = pattern.nrows();
        let blocks = coeffs.iter().map(|&a| pattern.map(|p| p * a)).collect();
        Self::from_blocks(m, blocks, tail_bound)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Degree `d` of the stored coefficient data.
    pub fn degree(&self) -> usize {
        self.blocks.len() - 1
    }

    /// `U(n)`; zero past the stored degree.
    pub fn block(&self, n: usize) -> CMat {
        self.blocks
            .get(n)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.m, self.m))
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Largest entrywise `|u_ij(n) - u_ji(n)|`.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry <= COEFF_TOL
    }

    /// Gate for everything that needs `U = U^t`.
    pub fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::NotSymmetric {
                asymmetry: self.asymmetry,
            })
        }
    }

    /// Entry `u_ij` as a scalar H^2 element.
    pub fn entry(&self, i: usize, j: usize) -> FourierVec {
        FourierVec::from_components(&[self.blocks.iter().map(|b| b[(i, j)]).collect()])
    }

    pub fn as_series(&self) -> MatrixSeries {
        let blocks: Vec<(i64, CMat)> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(n, b)| (n as i64, b.clone()))
            .collect();
        MatrixSeries::from_blocks(self.m, self.m, &blocks)
    }
}

/// Polynomial symbol from `(n, U(n))` pairs; repeated indices add. The
/// symmetry flag is computed, not enforced.
pub fn poly_symbol(m: usize, blocks: &[(usize, CMat)]) -> Result<MatrixSymbol> {
    let d = blocks.iter().map(|b| b.0).max().unwrap_or(0);
    let mut dense = vec![CMat::zeros(m, m); d + 1];
    for (n, b) in blocks {
        if b.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: if b.nrows() != m { b.nrows() } else { b.ncols() },
            });
        }
        dense[*n] += b;
    }
    MatrixSymbol::from_blocks(m, dense, 0.0)
}

/// Scalar polynomial symbol (`m = 1`).
pub fn scalar_poly(coeffs: &[C64]) -> Result<MatrixSymbol> {
    MatrixSymbol::scalar_times(coeffs, &CMat::identity(1, 1), 0.0)
}

/// Taylor coefficients of `prod (a - z) / (1 - conj(a) z)` over `[0, n]`,
/// with a certified bound on `sum_{k > n} |c_k|`.
pub fn blaschke_scalar(zeros: &[C64], n: usize) -> Result<(Vec<C64>, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("Blaschke truncation must be at least 1".into()));
    }
    for a in zeros {
        if !(a.norm() < 1.0) {
            return Err(Error::ZeroOnCircle { re: a.re, im: a.im });
        }
    }
    let mut product = vec![ZERO; n + 1];
    product[0] = ONE;
    // tails[k] bounds sum_{j > k} |p_j| for the running product; the empty
    // product is exactly 1.
    let mut tails = vec![0.0_f64; n + 1];
    for &a in zeros {
        let r = a.norm();
        let mut factor = vec![ZERO; n + 1];
        factor[0] = a;
        let mut pow = ONE;
        for coeff in factor.iter_mut().skip(1) {
            *coeff = -(1.0 - r * r) * pow;
            pow *= a.conj();
        }
        let factor_tail = |k: usize| (1.0 + r) * r.powi(k as i32);
        let factor_l1 = 1.0 + 2.0 * r;

        let moduli: Vec<f64> = product.iter().map(|x| x.norm()).collect();
        let new_tails: Vec<f64> = (0..=n)
            .map(|k| {
                let inner: f64 = (0..=k).map(|i| moduli[i] * factor_tail(k - i)).sum();
                inner + tails[k] * factor_l1
            })
            .collect();
        let prev = product;
        product = (0..=n)
            .map(|k| (0..=k).map(|i| factor[i] * prev[k - i]).sum())
            .collect();
        tails = new_tails;
    }
    let coeffs = product;
    Ok((coeffs, tails[n]))
}

/// `u_ij -> S* u_ij`, i.e. blocks `U(n + 1)`.
pub fn shift_symbol(u: &MatrixSymbol) -> MatrixSymbol {
    let blocks = u.blocks.iter().skip(1).cloned().collect();
    MatrixSymbol::from_blocks(u.m, blocks, u.tail_bound).expect("shifted blocks keep their shape")
}

/// The columns `U_i` of the symbol as H^2 elements.
pub fn symbol_columns(u: &MatrixSymbol) -> Vec<FourierVec> {
    u.as_series().columns()
}

/// `[[1, 0], [0, 1]]` pattern of the diagonal example family.
pub fn diagonal_pattern() -> CMat {
    CMat::identity(2, 2)
}

/// `[[0, 1], [1, 0]]` pattern of the anti-diagonal example family.
pub fn antidiagonal_pattern() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

/// `[[t, g], [g, t]]` with `t = phi + psi`, `g = phi - psi`. The operator
/// norm of each tail block is at most `2 max(|phi_n|, |psi_n|)`.
pub fn sum_difference_symbol(phi: &[C64], phi_tail: f64, psi: &[C64], psi_tail: f64) -> Result<MatrixSymbol> {
    let d = phi.len().max(psi.len());
    let get = |v: &[C64], k: usize| v.get(k).copied().unwrap_or(ZERO);
    let blocks = (0..d)
        .map(|k| {
            let (p, q) = (get(phi, k), get(psi, k));
            CMat::from_row_slice(2, 2, &[p + q, p - q, p - q, p + q])
        })
        .collect();
    MatrixSymbol::from_blocks(2, blocks, 2.0 * (phi_tail + psi_tail))
}

/// Blaschke product coefficients with factors at the origin normalized to
/// `+z`, so that `[0; k]` gives exactly `z^k`.
pub fn inner_from_zeros(zeros: &[C64], n: usize) -> Result<(Vec<C64>, f64)> {
    let (mut coeffs, tail) = blaschke_scalar(zeros, n)?;
    let origin = zeros.iter().filter(|a| a.norm() == 0.0).count();
    if origin % 2 == 1 {
        for x in coeffs.iter_mut() {
            *x = -*x;
        }
    }
    Ok((coeffs, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn m22(a: [f64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &a.map(|x| c(x, 0.0)))
    }

    #[test]
    fn monomial_scalar_symbol() {
        let u = poly_symbol(1, &[(1, CMat::identity(1, 1))]).unwrap();
        assert_eq!(u.degree(), 1);
        assert!(u.is_symmetric());
        assert_eq!(u.tail_bound(), 0.0);
        assert_eq!(u.entry(0, 0).get(1, 0), ONE);
    }

    #[test]
    fn sum_difference_blocks_for_linear_and_quadratic() {
        let phi = [ZERO, ONE];
        let psi = [ZERO, ZERO, ONE];
        let u = sum_difference_symbol(&phi, 0.0, &psi, 0.0).unwrap();
        assert_eq!(u.degree(), 2);
        assert!(u.is_symmetric());
        assert_eq!(u.block(1), m22([1.0, 1.0, 1.0, 1.0]));
        assert_eq!(u.block(2), m22([1.0, -1.0, -1.0, 1.0]));
        let cols = symbol_columns(&u);
        assert_eq!(cols[0].get(1, 0), ONE);
        assert_eq!(cols[0].get(2, 0), ONE);
        assert_eq!(cols[0].get(1, 1), ONE);
        assert_eq!(cols[0].get(2, 1), -ONE);
    }

    #[test]
    fn diagonal_example_columns() {
        let u = MatrixSymbol::scalar_times(&[ZERO, ONE], &diagonal_pattern(), 0.0).unwrap();
        assert_eq!(u.block(1), CMat::identity(2, 2));
        let cols = symbol_columns(&u);
        assert_eq!(cols[0].block(1), vec![ONE, ZERO]);
        assert_eq!(cols[1].block(1), vec![ZERO, ONE]);
    }

    #[test]
    fn non_symmetric_is_flagged() {
        let u = poly_symbol(2, &[(0, m22([0.0, 1.0, 0.0, 0.0]))]).unwrap();
        assert!(!u.is_symmetric());
        assert!(matches!(u.require_symmetric(), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn blaschke_factor_at_origin_is_minus_z() {
        let (coeffs, tail) = blaschke_scalar(&[ZERO], 5).unwrap();
        assert_eq!(coeffs[1], -ONE);
        assert!(coeffs.iter().enumerate().all(|(k, z)| k == 1 || z.norm() == 0.0));
        assert_eq!(tail, 0.0);
        let (plus, _) = inner_from_zeros(&[ZERO], 5).unwrap();
        assert_eq!(plus[1], ONE);
    }

    #[test]
    fn blaschke_half_first_coefficients() {
        let (coeffs, tail) = blaschke_scalar(&[c(0.5, 0.0)], 3).unwrap();
        let expected = [0.5, -0.75, -0.375, -0.1875];
        for (got, want) in coeffs.iter().zip(expected) {
            assert!((got - c(want, 0.0)).norm() < 1e-15);
        }
        assert!((tail - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn zeros_outside_disk_are_rejected() {
        assert!(matches!(
            blaschke_scalar(&[c(1.0, 0.0)], 4),
            Err(Error::ZeroOnCircle { .. })
        ));
        assert!(matches!(
            blaschke_scalar(&[c(0.3, 2.0)], 4),
            Err(Error::ZeroOnCircle { .. })
        ));
    }

    #[test]
    fn shift_symbol_examples() {
        let u = scalar_poly(&[ZERO, ONE]).unwrap();
        assert_eq!(shift_symbol(&u).block(0), CMat::identity(1, 1));
        let v = scalar_poly(&[ZERO, ONE, ZERO, c(2.0, 0.0)]).unwrap();
        let sv = shift_symbol(&v);
        assert_eq!(sv.degree(), 2);
        assert_eq!(sv.block(2)[(0, 0)], c(2.0, 0.0));
        assert_eq!(sv.block(1)[(0, 0)], ZERO);

        let w = sum_difference_symbol(&[ZERO, ONE], 0.0, &[ZERO, ZERO, ONE], 0.0).unwrap();
        let sw = shift_symbol(&w);
        assert_eq!(sw.block(0), w.block(1));
        assert_eq!(sw.block(1), w.block(2));
        let mut x = w.clone();
        for _ in 0..=w.degree() {
            x = shift_symbol(&x);
        }
        assert!(x.blocks().iter().all(|b| b.iter().all(|z| *z == ZERO)));
    }
}

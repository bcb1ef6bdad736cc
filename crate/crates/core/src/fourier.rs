//! Truncated Fourier series of scalar-, vector- and matrix-valued functions on
//! the unit circle.
//!
//! A [`FourierVec`] stores the coefficients of a `C^m`-valued function over an
//! explicit index window `[-neg, pos]`; everything outside the window is zero.
//! Hardy-space elements have `neg == 0`, which makes the mass at negative
//! indices (the failure of analyticity) directly measurable.
//!
//! Coefficient layout is index-major, component-minor: the block for index
//! `j` holds the `m` components of the `j`-th coefficient. This matches the
//! row layout of the block Hankel matrices built in [`crate::hankel`].
//!
//! Pointwise products go through boundary samples at the `M`-th roots of
//! unity ([`GridSamples`]); `M` is always a power of two at least as large as
//! the span of the product window, so products of polynomial data are exact
//! up to rounding.

use std::cell::RefCell;
use std::ops::{Add, Mul, Neg, Sub};

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64, ZERO};

/// Absolute tolerance applied to individual coefficients.
pub const COEFF_TOL: f64 = 1e-12;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [C64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    fft.process(buf);
}

/// Smallest power of two holding `span` coefficients without wrap-around.
pub fn alias_free_grid(span: usize) -> usize {
    span.max(1).next_power_of_two()
}

/// Default grid for working truncation `n`: the smallest power of two at
/// least `4(n + 1)`.
pub fn default_grid(n: usize) -> usize {
    (4 * (n + 1)).next_power_of_two()
}

fn wrap(j: i64, size: usize) -> usize {
    j.rem_euclid(size as i64) as usize
}

/// Samples of a window of scalar coefficients at the `size`-th roots of unity.
fn scalar_to_grid(coeff: impl Fn(i64) -> C64, neg: usize, pos: usize, size: usize) -> Vec<C64> {
    let mut buf = vec![ZERO; size];
    for j in -(neg as i64)..=(pos as i64) {
        buf[wrap(j, size)] += coeff(j);
    }
    fft_in_place(&mut buf, true);
    buf
}

/// Fourier coefficients (full grid window) of samples at the roots of unity.
fn scalar_from_grid(mut values: Vec<C64>) -> Vec<C64> {
    let size = values.len() as f64;
    fft_in_place(&mut values, false);
    for v in values.iter_mut() {
        *v /= size;
    }
    values
}

/// A `C^m`-valued function on the circle as a truncated two-sided Fourier
/// series.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVec {
    dim: usize,
    neg: usize,
    pos: usize,
    coeffs: Vec<C64>,
}

impl FourierVec {
    pub fn zeros(dim: usize, neg: usize, pos: usize) -> Self {
        assert!(dim > 0, "FourierVec needs a positive dimension");
        Self {
            dim,
            neg,
            pos,
            coeffs: vec![ZERO; dim * (neg + pos + 1)],
        }
    }

    /// H^2 element of degree at most `pos`, all coefficients zero.
    pub fn analytic_zeros(dim: usize, pos: usize) -> Self {
        Self::zeros(dim, 0, pos)
    }

    /// Builds an H^2 element from per-component Taylor coefficients.
    pub fn from_components(components: &[Vec<C64>]) -> Self {
        let dim = components.len();
        let pos = components.iter().map(|c| c.len()).max().unwrap_or(1).max(1) - 1;
        let mut out = Self::analytic_zeros(dim, pos);
        for (comp, coeffs) in components.iter().enumerate() {
            for (j, &v) in coeffs.iter().enumerate() {
                out.set(j as i64, comp, v);
            }
        }
        out
    }

    /// Builds a series from `(index, component, value)` triples; the window is
    /// the smallest one containing every index and zero.
    pub fn from_terms(dim: usize, terms: &[(i64, usize, C64)]) -> Self {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(0).max(0);
        let mut out = Self::zeros(dim, (-lo) as usize, hi as usize);
        for &(j, comp, v) in terms {
            let cur = out.get(j, comp);
            out.set(j, comp, cur + v);
        }
        out
    }

    pub fn monomial(dim: usize, degree: i64, component: usize, value: C64) -> Self {
        Self::from_terms(dim, &[(degree, component, value)])
    }

    /// Constant vector function.
    pub fn constant(values: &[C64]) -> Self {
        let mut out = Self::analytic_zeros(values.len(), 0);
        out.coeffs.copy_from_slice(values);
        out
    }

    /// H^2 element from a coefficient vector in the window layout of length
    /// `(n + 1) * dim`.
    pub fn from_window(dim: usize, v: &CVec) -> Self {
        assert!(dim > 0 && v.len().is_multiple_of(dim) && !v.is_empty());
        Self {
            dim,
            neg: 0,
            pos: v.len() / dim - 1,
            coeffs: v.iter().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored negative indices.
    pub fn neg(&self) -> usize {
        self.neg
    }

    /// Highest stored index (the working degree).
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn offset(&self, j: i64) -> Option<usize> {
        if j < -(self.neg as i64) || j > self.pos as i64 {
            None
        } else {
            Some((j + self.neg as i64) as usize * self.dim)
        }
    }

    /// Coefficient of component `comp` at index `j` (zero outside the window).
    pub fn get(&self, j: i64, comp: usize) -> C64 {
        debug_assert!(comp < self.dim);
        self.offset(j).map_or(ZERO, |o| self.coeffs[o + comp])
    }

    /// Sets a coefficient; panics if `j` is outside the stored window.
    pub fn set(&mut self, j: i64, comp: usize, value: C64) {
        let o = self
            .offset(j)
            .unwrap_or_else(|| panic!("index {j} outside window [-{}, {}]", self.neg, self.pos));
        self.coeffs[o + comp] = value;
    }

    /// The coefficient vector in `C^m` at index `j`.
    pub fn block(&self, j: i64) -> Vec<C64> {
        match self.offset(j) {
            Some(o) => self.coeffs[o..o + self.dim].to_vec(),
            None => vec![ZERO; self.dim],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// l^2 norm of the coefficients at negative indices.
    pub fn negative_mass(&self) -> f64 {
        self.coeffs[..self.neg * self.dim]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// l^2 norm of the coefficients outside `[-neg, pos]`.
    pub fn mass_outside(&self, neg: usize, pos: usize) -> f64 {
        let mut acc = 0.0;
        for j in -(self.neg as i64)..=(self.pos as i64) {
            if j < -(neg as i64) || j > pos as i64 {
                acc += self.block(j).iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        acc.sqrt()
    }

    pub fn is_analytic(&self, tol: f64) -> bool {
        self.negative_mass() <= tol
    }

    /// Orthogonal projection onto H^2: negative-index coefficients dropped.
    pub fn analytic_project(&self) -> Self {
        self.restrict(0, self.pos)
    }

    /// Same function stored over the window `[-neg, pos]` (truncating or
    /// zero-extending).
    pub fn restrict(&self, neg: usize, pos: usize) -> Self {
        let mut out = Self::zeros(self.dim, neg, pos);
        let lo = -(neg.min(self.neg) as i64);
        let hi = pos.min(self.pos) as i64;
        for j in lo..=hi {
            for comp in 0..self.dim {
                out.set(j, comp, self.get(j, comp));
            }
        }
        out
    }

    /// Multiplication by z.
    pub fn shift(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.neg.saturating_sub(1), self.pos + 1);
        for j in -(self.neg as i64)..=(self.pos as i64) {
            for comp in 0..self.dim {
                out.set(j + 1, comp, self.get(j, comp));
            }
        }
        out
    }

    /// Backward shift on the analytic part, `(f - f(0)) / z`. The window keeps
    /// its length, so the top block becomes zero.
    pub fn backshift(&self) -> Self {
        let mut out = Self::analytic_zeros(self.dim, self.pos);
        for j in 1..=(self.pos as i64) {
            for comp in 0..self.dim {
                out.set(j - 1, comp, self.get(j, comp));
            }
        }
        out
    }

    /// Boundary conjugate: the coefficient at `j` becomes the conjugate of
    /// the coefficient at `-j`.
    pub fn conjugate_boundary(&self) -> Self {
        let mut out = Self::zeros(self.dim, self.pos, self.neg);
        for j in -(self.neg as i64)..=(self.pos as i64) {
            for comp in 0..self.dim {
                out.set(-j, comp, self.get(j, comp).conj());
            }
        }
        out
    }

    /// Coefficientwise conjugation `F(z) -> conj(F(conj z))`, the conjugation
    /// that turns the anti-linear Hankel operator into the linear one.
    pub fn conjugate_coefficients(&self) -> Self {
        Self {
            dim: self.dim,
            neg: self.neg,
            pos: self.pos,
            coeffs: self.coeffs.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `<f, g> = sum_j sum_c f_j,c conj(g_j,c)`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let lo = self.neg.min(other.neg) as i64;
        let hi = self.pos.min(other.pos) as i64;
        let mut acc = ZERO;
        for j in -lo..=hi {
            for comp in 0..self.dim {
                acc += self.get(j, comp) * other.get(j, comp).conj();
            }
        }
        Ok(acc)
    }

    /// `F(0)` for an H^2 element: the 0-th coefficient vector.
    pub fn value_at_zero(&self) -> Vec<C64> {
        self.block(0)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            dim: self.dim,
            neg: self.neg,
            pos: self.pos,
            coeffs: self.coeffs.iter().map(|z| z * k).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let neg = self.neg.max(other.neg);
        let pos = self.pos.max(other.pos);
        let mut out = Self::zeros(self.dim, neg, pos);
        for j in -(neg as i64)..=(pos as i64) {
            for comp in 0..self.dim {
                out.set(j, comp, op(self.get(j, comp), other.get(j, comp)));
            }
        }
        out
    }

    /// Coefficient vector over `[0, n]` in window layout. Fails if any stored
    /// coefficient outside that range exceeds [`COEFF_TOL`] in l^2 mass.
    pub fn to_window(&self, n: usize) -> Result<CVec> {
        let outside = self.mass_outside(0, n);
        if outside > COEFF_TOL {
            return Err(Error::WindowExceeded {
                window: n,
                mass: outside,
            });
        }
        let mut v = CVec::zeros((n + 1) * self.dim);
        for j in 0..=n {
            for comp in 0..self.dim {
                v[j * self.dim + comp] = self.get(j as i64, comp);
            }
        }
        Ok(v)
    }

    /// Drops outer blocks whose entries are all at most `tol` in modulus
    /// (never shrinking past index 0).
    pub fn trimmed(&self, tol: f64) -> Self {
        let small = |j: i64| self.block(j).iter().all(|z| z.norm() <= tol);
        let mut lo = -(self.neg as i64);
        while lo < 0 && small(lo) {
            lo += 1;
        }
        let mut hi = self.pos as i64;
        while hi > 0 && small(hi) {
            hi -= 1;
        }
        self.restrict((-lo) as usize, hi as usize)
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other)
            .coeffs
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    /// Boundary samples at the `size`-th roots of unity.
    pub fn to_grid(&self, size: usize) -> Result<GridSamples> {
        let span = self.neg + self.pos + 1;
        if size < span {
            return Err(Error::Aliasing { grid: size, span });
        }
        let mut values = vec![ZERO; size * self.dim];
        for comp in 0..self.dim {
            let col = scalar_to_grid(|j| self.get(j, comp), self.neg, self.pos, size);
            for (t, v) in col.into_iter().enumerate() {
                values[t * self.dim + comp] = v;
            }
        }
        Ok(GridSamples {
            dim: self.dim,
            size,
            values,
        })
    }
}

impl Add for &FourierVec {
    type Output = FourierVec;
    fn add(self, rhs: &FourierVec) -> FourierVec {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &FourierVec {
    type Output = FourierVec;
    fn sub(self, rhs: &FourierVec) -> FourierVec {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &FourierVec {
    type Output = FourierVec;
    fn neg(self) -> FourierVec {
        self.scale(-crate::linalg::ONE)
    }
}

impl Mul<C64> for &FourierVec {
    type Output = FourierVec;
    fn mul(self, k: C64) -> FourierVec {
        self.scale(k)
    }
}

/// Values of a `C^m`-valued function at the nodes `exp(2 pi i t / size)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    dim: usize,
    size: usize,
    values: Vec<C64>,
}

impl GridSamples {
    pub fn from_values(dim: usize, size: usize, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), dim * size);
        Self { dim, size, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The vector value at node `t`.
    pub fn at(&self, t: usize) -> &[C64] {
        &self.values[t * self.dim..(t + 1) * self.dim]
    }

    /// Coefficients over `[-neg, pos]`.
    pub fn to_fourier(&self, neg: usize, pos: usize) -> Result<FourierVec> {
        let span = neg + pos + 1;
        if span > self.size {
            return Err(Error::Aliasing {
                grid: self.size,
                span,
            });
        }
        let mut out = FourierVec::zeros(self.dim, neg, pos);
        for comp in 0..self.dim {
            let col: Vec<C64> = (0..self.size).map(|t| self.values[t * self.dim + comp]).collect();
            let coeffs = scalar_from_grid(col);
            for j in -(neg as i64)..=(pos as i64) {
                out.set(j, comp, coeffs[wrap(j, self.size)]);
            }
        }
        Ok(out)
    }

    /// Coefficients over the full symmetric grid window
    /// `[-size/2, size/2 - 1]`.
    pub fn to_fourier_full(&self) -> FourierVec {
        let half = self.size / 2;
        self.to_fourier(half, self.size - half - 1)
            .expect("full window always fits")
    }
}

/// Matrix-valued truncated Fourier series; one `rows x cols` coefficient per
/// index in `[-neg, pos]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSeries {
    rows: usize,
    cols: usize,
    neg: usize,
    pos: usize,
    coeffs: Vec<CMat>,
}

impl MatrixSeries {
    pub fn zeros(rows: usize, cols: usize, neg: usize, pos: usize) -> Self {
        Self {
            rows,
            cols,
            neg,
            pos,
            coeffs: vec![CMat::zeros(rows, cols); neg + pos + 1],
        }
    }

    /// Series with the given `(index, coefficient)` blocks; repeated indices add.
    pub fn from_blocks(rows: usize, cols: usize, blocks: &[(i64, CMat)]) -> Self {
        let lo = blocks.iter().map(|b| b.0).min().unwrap_or(0).min(0);
        let hi = blocks.iter().map(|b| b.0).max().unwrap_or(0).max(0);
        let mut out = Self::zeros(rows, cols, (-lo) as usize, hi as usize);
        for (j, block) in blocks {
            assert_eq!(block.shape(), (rows, cols), "block shape mismatch");
            *out.coefficient_mut(*j) += block;
        }
        out
    }

    pub fn identity(m: usize) -> Self {
        Self::from_blocks(m, m, &[(0, CMat::identity(m, m))])
    }

    /// Matrix function whose i-th column is `columns[i]`.
    pub fn from_columns(columns: &[FourierVec]) -> Self {
        assert!(!columns.is_empty());
        let rows = columns[0].dim();
        let neg = columns.iter().map(|c| c.neg()).max().unwrap_or(0);
        let pos = columns.iter().map(|c| c.pos()).max().unwrap_or(0);
        let mut out = Self::zeros(rows, columns.len(), neg, pos);
        for (i, col) in columns.iter().enumerate() {
            assert_eq!(col.dim(), rows);
            for j in -(neg as i64)..=(pos as i64) {
                let block = col.block(j);
                let coeff = out.coefficient_mut(j);
                for r in 0..rows {
                    coeff[(r, i)] = block[r];
                }
            }
        }
        out
    }

    /// 1 x 1 series carrying a scalar function.
    pub fn scalar(f: &FourierVec) -> Self {
        assert_eq!(f.dim(), 1);
        Self::from_columns(std::slice::from_ref(f))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn neg(&self) -> usize {
        self.neg
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    /// Coefficient at index `j` (zero outside the window).
    pub fn coefficient(&self, j: i64) -> CMat {
        if j < -(self.neg as i64) || j > self.pos as i64 {
            CMat::zeros(self.rows, self.cols)
        } else {
            self.coeffs[(j + self.neg as i64) as usize].clone()
        }
    }

    pub fn coefficient_mut(&mut self, j: i64) -> &mut CMat {
        assert!(j >= -(self.neg as i64) && j <= self.pos as i64, "index {j} outside window");
        &mut self.coeffs[(j + self.neg as i64) as usize]
    }

    pub fn column(&self, i: usize) -> FourierVec {
        let mut out = FourierVec::zeros(self.rows, self.neg, self.pos);
        for j in -(self.neg as i64)..=(self.pos as i64) {
            let coeff = &self.coeffs[(j + self.neg as i64) as usize];
            for r in 0..self.rows {
                out.set(j, r, coeff[(r, i)]);
            }
        }
        out
    }

    pub fn columns(&self) -> Vec<FourierVec> {
        (0..self.cols).map(|i| self.column(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            neg: self.neg,
            pos: self.pos,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    pub fn restrict(&self, neg: usize, pos: usize) -> Self {
        let mut out = Self::zeros(self.rows, self.cols, neg, pos);
        let lo = -(neg.min(self.neg) as i64);
        let hi = pos.min(self.pos) as i64;
        for j in lo..=hi {
            *out.coefficient_mut(j) = self.coefficient(j);
        }
        out
    }

    pub fn analytic_project(&self) -> Self {
        self.restrict(0, self.pos)
    }

    /// Multiplication by z.
    pub fn shift(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.cols, self.neg.saturating_sub(1), self.pos + 1);
        for j in -(self.neg as i64)..=(self.pos as i64) {
            *out.coefficient_mut(j + 1) = self.coefficient(j);
        }
        out
    }

    /// `(P_+ A - A(0)) / z`, column by column.
    pub fn backshift(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.cols, 0, self.pos.saturating_sub(1));
        for j in 1..=(self.pos as i64) {
            *out.coefficient_mut(j - 1) = self.coefficient(j);
        }
        out
    }

    /// Frobenius l^2 mass of the negative-index coefficients.
    pub fn negative_mass(&self) -> f64 {
        self.coeffs[..self.neg]
            .iter()
            .map(|c| c.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Drops outer coefficients with Frobenius norm at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let small = |j: i64| self.coefficient(j).norm() <= tol;
        let mut lo = -(self.neg as i64);
        while lo < 0 && small(lo) {
            lo += 1;
        }
        let mut hi = self.pos as i64;
        while hi > 0 && small(hi) {
            hi -= 1;
        }
        self.restrict((-lo) as usize, hi as usize)
    }

    /// Highest index carrying a coefficient above `tol`.
    pub fn degree(&self, tol: f64) -> usize {
        self.trimmed(tol).pos
    }

    /// Largest Frobenius norm of a coefficient of `self - other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let lo = self.neg.max(other.neg) as i64;
        let hi = self.pos.max(other.pos) as i64;
        (-lo..=hi)
            .map(|j| (self.coefficient(j) - other.coefficient(j)).norm())
            .fold(0.0, f64::max)
    }

    /// Matrix values at the `size`-th roots of unity.
    pub fn to_grid(&self, size: usize) -> Result<Vec<CMat>> {
        let span = self.neg + self.pos + 1;
        if size < span {
            return Err(Error::Aliasing { grid: size, span });
        }
        let mut out = vec![CMat::zeros(self.rows, self.cols); size];
        for r in 0..self.rows {
            for col in 0..self.cols {
                let vals = scalar_to_grid(
                    |j| self.coeffs[(j + self.neg as i64) as usize][(r, col)],
                    self.neg,
                    self.pos,
                    size,
                );
                for (t, v) in vals.into_iter().enumerate() {
                    out[t][(r, col)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Coefficients over `[-neg, pos]` from grid values.
    pub fn from_grid(values: &[CMat], neg: usize, pos: usize) -> Result<Self> {
        let size = values.len();
        let span = neg + pos + 1;
        if size == 0 || span > size {
            return Err(Error::Aliasing { grid: size, span });
        }
        let (rows, cols) = values[0].shape();
        let mut out = Self::zeros(rows, cols, neg, pos);
        for r in 0..rows {
            for col in 0..cols {
                let coeffs = scalar_from_grid(values.iter().map(|v| v[(r, col)]).collect());
                for j in -(neg as i64)..=(pos as i64) {
                    out.coefficient_mut(j)[(r, col)] = coeffs[wrap(j, size)];
                }
            }
        }
        Ok(out)
    }

    /// Coefficients over the full symmetric grid window.
    pub fn from_grid_full(values: &[CMat]) -> Result<Self> {
        let half = values.len() / 2;
        Self::from_grid(values, half, values.len().saturating_sub(half + 1))
    }
}

/// Pointwise product `a(z) f(z)`. A 1 x 1 `a` acts as a scalar on every
/// component. The output window is the full product window.
pub fn multiply(a: &MatrixSeries, f: &FourierVec) -> Result<FourierVec> {
    let scalar = a.rows == 1 && a.cols == 1;
    if !scalar && a.cols != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: f.dim(),
        });
    }
    let out_dim = if scalar { f.dim() } else { a.rows };
    let neg = a.neg + f.neg();
    let pos = a.pos + f.pos();
    let size = alias_free_grid(neg + pos + 1);
    let a_grid = a.to_grid(size)?;
    let f_grid = f.to_grid(size)?;
    let mut values = vec![ZERO; size * out_dim];
    for t in 0..size {
        let fv = f_grid.at(t);
        let at = &a_grid[t];
        for r in 0..out_dim {
            values[t * out_dim + r] = if scalar {
                at[(0, 0)] * fv[r]
            } else {
                (0..a.cols).map(|k| at[(r, k)] * fv[k]).sum()
            };
        }
    }
    GridSamples::from_values(out_dim, size, values).to_fourier(neg, pos)
}

/// Pointwise product restricted to the window `[-neg, pos]`. Fails with
/// [`Error::Aliasing`] when the product's degree range does not fit.
pub fn multiply_within(
    a: &MatrixSeries,
    f: &FourierVec,
    neg: usize,
    pos: usize,
) -> Result<FourierVec> {
    let a_t = a.trimmed(0.0);
    let f_t = f.trimmed(0.0);
    let need_neg = a_t.neg + f_t.neg();
    let need_pos = a_t.pos + f_t.pos();
    if need_neg > neg || need_pos > pos {
        return Err(Error::Aliasing {
            grid: neg + pos + 1,
            span: need_neg + need_pos + 1,
        });
    }
    Ok(multiply(&a_t, &f_t)?.restrict(neg, pos))
}

/// Pointwise matrix product `a(z) b(z)`.
pub fn matmul(a: &MatrixSeries, b: &MatrixSeries) -> Result<MatrixSeries> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            expected: a.cols,
            found: b.rows,
        });
    }
    let neg = a.neg + b.neg;
    let pos = a.pos + b.pos;
    let size = alias_free_grid(neg + pos + 1);
    let ag = a.to_grid(size)?;
    let bg = b.to_grid(size)?;
    let prod: Vec<CMat> = ag.iter().zip(&bg).map(|(x, y)| x * y).collect();
    MatrixSeries::from_grid(&prod, neg, pos)
}

//! The action of `H_U` on a Schmidt subspace with full wandering part
//! (`r = m`): extraction of the inner function `Theta~ = Theta A`, the model
//! representation `E = F_0 K_Theta~`, and the formula
//! `H_U(F_0 G) = s P_m F_0 [S*Theta~ conj(G)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{matmul, multiply, FourierVec, GridSamples, MatrixSeries};
use crate::hankel::BlockHankelMatrix;
use crate::linalg::{complement_basis, op_norm, right_svd, CMat, CVec, ZERO};
use crate::report::{matrix_pairs, sort_checks, Check};
use crate::spectral::{max_angle, orth_complement_within, intersect_with_shifted, SubspaceBasis};
use crate::structure::backshift_coords;
use crate::verify::Tolerances;

/// `||[U_1^s ... U_m^s] - [H_U W_1 ... H_U W_m] F_0(0)^t||` where
/// `U_i^s = P_E U_i`.
pub fn projection_identity_check(
    gamma: &BlockHankelMatrix,
    e: &SubspaceBasis,
    wandering: &SubspaceBasis,
    columns: &[CVec],
) -> Result<f64> {
    let m = e.m();
    if wandering.dim() < m {
        return Err(Error::NotApplicable(format!(
            "wandering dimension {} is below m = {m}",
            wandering.dim()
        )));
    }
    let rows = e.rows();
    let lhs = CMat::from_fn(rows, m, |r, i| e.project(&columns[i])[r]);
    let hw = CMat::from_fn(rows, m, |r, j| gamma.apply_h_coords(&wandering.column(j))[r]);
    let w0 = wandering.values_at_zero();
    Ok(op_norm(&(lhs - hw * w0.transpose())))
}

/// Extracted `Theta~` with its diagnostics.
#[derive(Debug, Clone)]
pub struct ThetaExtraction {
    /// `Theta~ = z P_+ M`, analytic with `Theta~(0) = 0`.
    pub theta: MatrixSeries,
    /// l^2 mass of the negative coefficients of `M`.
    pub analyticity_residual: f64,
    /// `max_zeta ||Theta~(zeta)^* Theta~(zeta) - I||` on a grid twice as fine.
    pub innerness_residual: f64,
    /// Smallest singular value of `F_0(zeta)` over the grid.
    pub min_f0_singular: f64,
}

/// `M(zeta) = F_0(zeta)^{-1} [H_U W](zeta) / s` on the grid, then
/// `Theta~ = z P_+ M`.
pub fn extract_theta_tilde(
    gamma: &BlockHankelMatrix,
    s: f64,
    f0: &MatrixSeries,
    grid: usize,
    floor: f64,
) -> Result<ThetaExtraction> {
    let m = f0.rows();
    if f0.cols() != m {
        return Err(Error::NotApplicable(format!("F_0 has {} columns, need m = {m}", f0.cols())));
    }
    let hw: Vec<FourierVec> = f0
        .columns()
        .iter()
        .map(|w| gamma.apply_h_any(w))
        .collect::<Result<_>>()?;
    let hw = MatrixSeries::from_columns(&hw);
    let f0_grid = f0.to_grid(grid)?;
    let hw_grid = hw.to_grid(grid)?;
    let mut min_f0_singular = f64::INFINITY;
    let mut values = Vec::with_capacity(grid);
    for (f, h) in f0_grid.iter().zip(&hw_grid) {
        let sv = right_svd(f).singular_values;
        let smallest = sv.last().copied().unwrap_or(0.0);
        min_f0_singular = min_f0_singular.min(smallest);
        if smallest < floor {
            return Err(Error::GridSingularity { min_singular: smallest });
        }
        let sol = f.clone().full_piv_lu().solve(h).ok_or(Error::GridSingularity { min_singular: smallest })?;
        values.push(sol.scale(1.0 / s));
    }
    let big_m = MatrixSeries::from_grid_full(&values)?;
    let analyticity_residual = big_m.negative_mass();
    let theta = big_m.analytic_project().shift().restrict(0, big_m.pos() + 1).trimmed(1e-15);
    let innerness_residual = innerness(&theta, 2 * grid)?;
    Ok(ThetaExtraction {
        theta,
        analyticity_residual,
        innerness_residual,
        min_f0_singular,
    })
}

/// `max_zeta ||T(zeta)^* T(zeta) - I||` over `grid` nodes.
pub fn innerness(theta: &MatrixSeries, grid: usize) -> Result<f64> {
    let k = theta.cols();
    let grid = grid.max(theta.neg() + theta.pos() + 1).next_power_of_two();
    Ok(theta
        .to_grid(grid)?
        .iter()
        .map(|v| op_norm(&(v.adjoint() * v - CMat::identity(k, k))))
        .fold(0.0, f64::max))
}

/// Window coordinates of `P_N(Theta z^j e_i)`.
fn theta_column(theta: &MatrixSeries, i: usize, j: usize, n: usize) -> CVec {
    let m = theta.rows();
    let mut v = CVec::zeros((n + 1) * m);
    for k in 0..=theta.pos() {
        let idx = k + j;
        if idx > n {
            break;
        }
        let coeff = theta.coefficient(k as i64);
        for r in 0..m {
            v[idx * m + r] = coeff[(r, i)];
        }
    }
    v
}

/// `K_Theta` inside the window `[0, n]`: the orthogonal complement of
/// `{P_N(Theta z^j e_i)}`. Directions with singular value at most `tol` are
/// counted as complement.
pub fn model_space_basis(theta: &MatrixSeries, n: usize, tol: f64) -> SubspaceBasis {
    let m = theta.rows();
    let mut cols = Vec::new();
    for j in 0..=n {
        for i in 0..theta.cols() {
            cols.push(theta_column(theta, i, j, n));
        }
    }
    let rows = (n + 1) * m;
    let mat = CMat::from_fn(rows, cols.len(), |r, k| cols[k][r]);
    SubspaceBasis::new(m, complement_basis(&mat, tol))
}

/// l^2 norm of the blocks `0..=last` of a window vector.
fn masked_norm(v: &FourierVec, last: usize) -> f64 {
    (0..=last)
        .map(|j| v.block(j as i64).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Blocks compared in residuals: everything but the top two of the window.
fn mask_limit(n: usize) -> usize {
    n.saturating_sub(2)
}

/// Residuals of the action formula on a basis of the model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionResiduals {
    /// With the projection `P_m`.
    pub projected: f64,
    /// Without the projection (meaningful when `Theta~` is symmetric).
    pub unprojected: f64,
    /// Largest negative-index mass of `S*Theta~ conj(G)`.
    pub backshift_negative_mass: f64,
    /// Largest `||P_+(Theta~^* S*Theta~ conj(G))||`: distance from `K_Theta~`.
    pub backshift_model_residual: f64,
}

pub fn verify_action(
    gamma: &BlockHankelMatrix,
    s: f64,
    f0: &MatrixSeries,
    theta: &MatrixSeries,
    model: &SubspaceBasis,
) -> Result<ActionResiduals> {
    let n = gamma.window();
    let last = mask_limit(n);
    let s_theta = theta.backshift();
    let f0_s_theta = matmul(f0, &s_theta)?;
    let theta_star = adjoint_series(theta);
    let mut out = ActionResiduals {
        projected: 0.0,
        unprojected: 0.0,
        backshift_negative_mass: 0.0,
        backshift_model_residual: 0.0,
    };
    for g in model.functions() {
        let f0g = multiply(f0, &g)?;
        let lhs = gamma.apply_h_any(&f0g)?;
        let gbar = g.conjugate_boundary();
        let full = multiply(&f0_s_theta, &gbar)?.scale(s.into());
        let rhs = full.analytic_project();
        let beyond = rhs.mass_outside(0, n);
        let diff = &lhs - &rhs.restrict(0, n);
        out.projected = out.projected.max(masked_norm(&diff, last).hypot(beyond));
        out.unprojected = out.unprojected.max(masked_norm(&diff, last).hypot(beyond).hypot(full.negative_mass()));

        let x = multiply(&s_theta, &gbar)?;
        out.backshift_negative_mass = out.backshift_negative_mass.max(x.negative_mass());
        let y = multiply(&theta_star, &x.analytic_project())?.analytic_project();
        out.backshift_model_residual = out.backshift_model_residual.max(y.norm());
    }
    Ok(out)
}

/// Pointwise adjoint `T(zeta)^*` as a two-sided series.
pub fn adjoint_series(theta: &MatrixSeries) -> MatrixSeries {
    let blocks: Vec<(i64, CMat)> = (-(theta.neg() as i64)..=theta.pos() as i64)
        .map(|j| (-j, theta.coefficient(j).adjoint()))
        .collect();
    MatrixSeries::from_blocks(theta.cols(), theta.rows(), &blocks)
}

/// Reverse direction: every `F` in `E` is `F_0 G` with `G` analytic, in
/// `K_Theta~` and of the same norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMembership {
    pub analyticity: f64,
    /// Largest `||P_+(Theta~^* G)||`.
    pub orthogonality: f64,
    /// Largest `| ||G|| - ||F|| |`.
    pub norm_defect: f64,
}

pub fn model_membership(e: &SubspaceBasis, f0: &MatrixSeries, theta: &MatrixSeries, grid: usize) -> Result<ModelMembership> {
    let m = e.m();
    let f0_grid = f0.to_grid(grid)?;
    let theta_star = adjoint_series(theta);
    let mut out = ModelMembership {
        analyticity: 0.0,
        orthogonality: 0.0,
        norm_defect: 0.0,
    };
    for f in e.functions() {
        let fg = f.to_grid(grid)?;
        let mut values = vec![ZERO; grid * m];
        for (t, a) in f0_grid.iter().enumerate() {
            let rhs = CVec::from_column_slice(fg.at(t));
            let sol = a
                .clone()
                .full_piv_lu()
                .solve(&rhs)
                .ok_or(Error::GridSingularity { min_singular: 0.0 })?;
            values[t * m..(t + 1) * m].copy_from_slice(sol.as_slice());
        }
        let g = GridSamples::from_values(m, grid, values).to_fourier_full();
        out.analyticity = out.analyticity.max(g.negative_mass());
        let g_plus = g.analytic_project();
        out.norm_defect = out.norm_defect.max((g_plus.norm() - f.norm()).abs());
        let y = multiply(&theta_star, &g_plus)?.analytic_project();
        out.orthogonality = out.orthogonality.max(y.norm());
    }
    Ok(out)
}

/// Symmetry of `Theta~` at zero and globally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryChecks {
    /// `||(S*Theta~)(0) - (S*Theta~)(0)^t||`.
    pub at_zero: f64,
    /// Largest coefficient of `Theta~ - Theta~^t`.
    pub full_asymmetry: f64,
    pub fully_symmetric: bool,
}

pub fn symmetry_checks(theta: &MatrixSeries, tol: f64) -> SymmetryChecks {
    let c1 = theta.coefficient(1);
    let at_zero = op_norm(&(&c1 - c1.transpose()));
    let full_asymmetry = theta.max_coeff_diff(&theta.transpose());
    SymmetryChecks {
        at_zero,
        full_asymmetry,
        fully_symmetric: full_asymmetry <= tol,
    }
}

/// `S*(K cap (C^m)^perp)` against `K cap {S*(Theta e_i)}^perp`; returns
/// the largest principal angle (`pi/2` on a dimension mismatch).
pub fn model_space_identity_check(theta: &MatrixSeries, model: &SubspaceBasis, innerness_residual: f64, tol: f64) -> Result<f64> {
    if !(innerness_residual <= tol) {
        return Err(Error::NotInner {
            residual: innerness_residual,
        });
    }
    let m = model.m();
    let n = model.window();
    let vanishing = intersect_with_shifted(model, tol);
    let lhs_vecs: Vec<CVec> = (0..vanishing.dim())
        .map(|i| backshift_coords(&vanishing.column(i), m))
        .collect();
    let lhs = SubspaceBasis::span_of(m, model.rows(), &lhs_vecs, tol);
    let s_theta = theta.backshift();
    let gens: Vec<CVec> = (0..theta.cols()).map(|i| theta_column(&s_theta, i, 0, n)).collect();
    let rhs = orth_complement_within(model, &gens, tol);
    max_angle(&lhs, &rhs)
}

/// `Theta~` coefficient `n` as a matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBlock {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn coefficient_dump(theta: &MatrixSeries) -> Vec<CoefficientBlock> {
    (0..=theta.pos())
        .map(|n| CoefficientBlock {
            n,
            matrix: matrix_pairs(&theta.coefficient(n as i64)),
        })
        .collect()
}

/// Per-cluster action report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub s: f64,
    pub m: usize,
    pub r: usize,
    pub theta_degree: usize,
    pub model_space_dim: usize,
    pub innerness_residual: f64,
    pub analyticity_residual: f64,
    pub action_residual: f64,
    pub model_membership_residual: f64,
    pub symmetry_at_zero_residual: f64,
    pub full_symmetry: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplified_action_residual: Option<f64>,
    pub projection_identity_residual: f64,
    pub min_f0_singular: f64,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<CoefficientBlock>>,
}

/// Which parts of the action suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionParts {
    pub formula: bool,
    pub model_space: bool,
}

/// Everything needed for one cluster with `r = m`.
pub struct ActionInput<'a> {
    pub gamma: &'a BlockHankelMatrix,
    pub s: f64,
    pub e: &'a SubspaceBasis,
    pub wandering: &'a SubspaceBasis,
    pub f0: &'a MatrixSeries,
    pub columns: &'a [CVec],
    pub grid: usize,
}

pub fn action_report(input: &ActionInput<'_>, tol: &Tolerances, parts: ActionParts, dump_theta: bool) -> Result<ActionReport> {
    let ActionInput {
        gamma,
        s,
        e,
        wandering,
        f0,
        columns,
        grid,
    } = *input;
    let m = e.m();
    let n = gamma.window();
    let projection = projection_identity_check(gamma, e, wandering, columns)?;
    let ex = extract_theta_tilde(gamma, s, f0, grid, tol.grid_floor)?;
    let model = model_space_basis(&ex.theta, n, tol.subspace_tol);
    let action = verify_action(gamma, s, f0, &ex.theta, &model)?;
    let membership = model_membership(e, f0, &ex.theta, grid)?;
    let sym = symmetry_checks(&ex.theta, tol.subspace_tol);
    let theta0 = op_norm(&ex.theta.coefficient(0));

    let mut checks = Vec::new();
    if parts.formula {
        checks.extend([
            Check::at_most("projection_identity", projection, tol.subspace_tol),
            Check::at_most("theta_analytic", ex.analyticity_residual, tol.subspace_tol),
            Check::at_most("theta_inner", ex.innerness_residual, tol.subspace_tol),
            Check::at_most("theta_vanishes_at_zero", theta0, 0.0),
            Check::at_most("action_formula", action.projected, tol.subspace_tol),
            Check::at_most("model_membership_analytic", membership.analyticity, tol.subspace_tol),
            Check::at_most("model_membership_orthogonal", membership.orthogonality, tol.subspace_tol),
            Check::at_most("isometric_multiplier", membership.norm_defect, tol.subspace_tol),
        ]);
    }
    if parts.model_space {
        checks.push(Check::at_most("backshift_theta_symmetric_at_zero", sym.at_zero, tol.symmetry_tol));
        checks.push(match model_space_identity_check(&ex.theta, &model, ex.innerness_residual, tol.subspace_tol) {
            Ok(angle) => Check::at_most("model_space_backshift_identity", angle, tol.subspace_tol),
            Err(err) => Check::inconclusive("model_space_backshift_identity", ex.innerness_residual, tol.subspace_tol, err.to_string()),
        });
        if sym.fully_symmetric {
            checks.push(Check::at_most("simplified_action_formula", action.unprojected, tol.subspace_tol));
            checks.push(Check::at_most(
                "backshift_theta_maps_into_model_space",
                action.backshift_negative_mass.hypot(action.backshift_model_residual),
                tol.subspace_tol,
            ));
        } else {
            checks.push(Check::not_applicable("simplified_action_formula", "Theta~ is not symmetric"));
        }
    }
    sort_checks(&mut checks);
    Ok(ActionReport {
        s,
        m,
        r: wandering.dim(),
        theta_degree: ex.theta.pos(),
        model_space_dim: model.dim(),
        innerness_residual: ex.innerness_residual,
        analyticity_residual: ex.analyticity_residual,
        action_residual: action.projected,
        model_membership_residual: membership.analyticity.max(membership.orthogonality),
        symmetry_at_zero_residual: sym.at_zero,
        full_symmetry: sym.fully_symmetric,
        simplified_action_residual: sym.fully_symmetric.then_some(action.unprojected),
        projection_identity_residual: projection,
        min_f0_singular: ex.min_f0_singular,
        checks,
        theta: dump_theta.then(|| coefficient_dump(&ex.theta)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::build_gamma;
    use crate::linalg::{c, ONE};
    use crate::symbols::scalar_poly;

    #[test]
    fn theta_for_u_equal_z() {
        let u = scalar_poly(&[ZERO, ONE]).unwrap();
        let gamma = build_gamma(&u, 5);
        let f0 = MatrixSeries::identity(1);
        let ex = extract_theta_tilde(&gamma, 1.0, &f0, 32, 1e-8).unwrap();
        assert!(ex.analyticity_residual < 1e-14);
        assert!(ex.innerness_residual < 1e-14);
        assert_eq!(ex.theta.pos(), 2);
        assert!((ex.theta.coefficient(2)[(0, 0)] - ONE).norm() < 1e-14);
        assert!(ex.theta.coefficient(0)[(0, 0)].norm() == 0.0);

        let model = model_space_basis(&ex.theta, 5, 1e-9);
        assert_eq!(model.dim(), 2);
        let action = verify_action(&gamma, 1.0, &f0, &ex.theta, &model).unwrap();
        assert!(action.projected < 1e-14);
        let angle = model_space_identity_check(&ex.theta, &model, ex.innerness_residual, 1e-9).unwrap();
        assert!(angle < 1e-12);
    }

    #[test]
    fn model_space_of_z_times_identity_is_constants() {
        let theta = MatrixSeries::from_blocks(2, 2, &[(1, CMat::identity(2, 2))]);
        let k = model_space_basis(&theta, 4, 1e-10);
        assert_eq!(k.dim(), 2);
        let vanishing = intersect_with_shifted(&k, 1e-10);
        assert_eq!(vanishing.dim(), 0);
        let angle = model_space_identity_check(&theta, &k, 0.0, 1e-10).unwrap();
        assert_eq!(angle, 0.0);
    }

    #[test]
    fn non_symmetric_candidate_is_flagged() {
        let nil = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let theta = MatrixSeries::from_blocks(2, 2, &[(1, nil)]);
        let sym = symmetry_checks(&theta, 1e-10);
        assert!(!sym.fully_symmetric);
        assert!((sym.at_zero - 1.0).abs() < 1e-15);
        let diag = MatrixSeries::from_blocks(2, 2, &[(1, CMat::from_diagonal(&CVec::from_vec(vec![ONE, c(0.0, 1.0)])))]);
        assert!(symmetry_checks(&diag, 1e-10).fully_symmetric);
    }

    #[test]
    fn not_inner_is_rejected() {
        let theta = MatrixSeries::from_blocks(1, 1, &[(1, CMat::from_element(1, 1, c(0.5, 0.0)))]);
        let k = model_space_basis(&theta, 3, 1e-10);
        assert!(matches!(model_space_identity_check(&theta, &k, 0.75, 1e-9), Err(Error::NotInner { .. })));
    }
}

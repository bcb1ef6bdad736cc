//! Structural checks on a Schmidt subspace `E = E_H(s)` and its companion
//! `E_K = E_K(s)`: agreement of the intersections with `{U_i}^perp`, near
//! invariance under `S*` with a defect of at most `m`, the full-wandering
//! case, the scalar `h K_theta` form and Beurling data extraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierVec, GridSamples, MatrixSeries};
use crate::linalg::{condition_number, range_basis, CMat, CVec, ZERO};
use crate::report::{sort_checks, Check};
use crate::spectral::{
    absolute_rank, intersect_with_shifted, max_angle, numerical_rank, orth_complement_within,
    wandering_part, window_complement, SubspaceBasis,
};
use crate::verify::Tolerances;

/// `S*` on a window coefficient vector with `m` components.
pub fn backshift_coords(v: &CVec, m: usize) -> CVec {
    let mut out = CVec::zeros(v.len());
    for i in m..v.len() {
        out[i - m] = v[i];
    }
    out
}

/// `S` on a window coefficient vector; the top block is dropped.
pub fn shift_coords(v: &CVec, m: usize) -> CVec {
    let mut out = CVec::zeros(v.len());
    for i in 0..v.len() - m {
        out[i + m] = v[i];
    }
    out
}

/// Largest `||(I - P_F) S* f||` over unit `f` in the basis of `F`.
pub fn backshift_invariance_residual(f: &SubspaceBasis) -> f64 {
    (0..f.dim())
        .map(|i| f.reject(&backshift_coords(&f.column(i), f.m())).norm())
        .fold(0.0, f64::max)
}

/// Smallest absolute cut for `<f, U_i> = 0`.
pub const ORTHOGONALITY_FLOOR: f64 = 1e-14;

/// Both intersections `E cap {U_i}^perp` and `E_K cap {U_i}^perp`.
#[derive(Debug, Clone)]
pub struct Intersections {
    pub from_h: SubspaceBasis,
    pub from_k: SubspaceBasis,
    pub max_angle: f64,
}

/// Orthogonality to the `U_i` is judged relative to `s`: for unit `f` in `E`,
/// `sum |<f, U_i>|^2 <= s^2`, so an absolute cut would swallow small clusters.
pub fn intersections(s: f64, e: &SubspaceBasis, ek: &SubspaceBasis, columns: &[CVec], tol: &Tolerances) -> Result<Intersections> {
    let cut = (tol.membership_tol() * s).max(ORTHOGONALITY_FLOOR);
    let from_h = orth_complement_within(e, columns, cut);
    let from_k = orth_complement_within(ek, columns, cut);
    let max_angle = max_angle(&from_h, &from_k)?;
    Ok(Intersections {
        from_h,
        from_k,
        max_angle,
    })
}

/// Agreement of the two intersections as a check.
pub fn intersections_check(s: f64, e: &SubspaceBasis, ek: &SubspaceBasis, columns: &[CVec], tol: &Tolerances) -> Result<Check> {
    let x = intersections(s, e, ek, columns, tol)?;
    Ok(Check::at_most("intersections_agree", x.max_angle, tol.subspace_tol)
        .with_note(format!("dims {} / {}", x.from_h.dim(), x.from_k.dim())))
}

/// Geometry of `S*` acting on `E cap zH^2`.
#[derive(Debug, Clone)]
pub struct NearInvariance {
    pub shifted: SubspaceBasis,
    pub wandering: SubspaceBasis,
    /// Span of the residuals `(I - P_E) S* v`, orthogonal to `E`.
    pub defect_space: SubspaceBasis,
    pub defect: usize,
    /// `max ||(I - P_{E_K}) S* v||`.
    pub into_ek: f64,
    /// `max ||(I - P_X) S* v||` with `X = (E cap {U_i}^perp) + span{P_{E_K} U_i}`.
    pub into_generators: f64,
    /// `dim span{P_{E_K} U_i}`.
    pub generator_dim: usize,
    pub intersections: Intersections,
}

pub fn near_invariance(s: f64, e: &SubspaceBasis, ek: &SubspaceBasis, columns: &[CVec], tol: &Tolerances) -> Result<NearInvariance> {
    let m = e.m();
    let shifted = intersect_with_shifted(e, tol.membership_tol());
    let wandering = wandering_part(e, tol.membership_tol());
    let images: Vec<CVec> = (0..shifted.dim())
        .map(|i| backshift_coords(&shifted.column(i), m))
        .collect();
    let rows = e.rows();
    let residuals = CMat::from_fn(rows, images.len(), |r, k| e.reject(&images[k])[r]);
    let defect = absolute_rank(&residuals, tol.subspace_tol);
    let defect_space = SubspaceBasis::new(m, range_basis(&residuals, tol.subspace_tol));

    let into_ek = images.iter().map(|w| ek.reject(w).norm()).fold(0.0, f64::max);

    let projected: Vec<CVec> = columns.iter().map(|u| ek.project(u)).collect();
    let gen_mat = CMat::from_fn(rows, projected.len(), |r, k| projected[k][r]);
    let generator_dim = numerical_rank(&gen_mat, tol.rank_tol);
    let generators = SubspaceBasis::span(m, &gen_mat, tol.membership_tol());
    let x = intersections(s, e, ek, columns, tol)?;
    let target = x.from_h.join(&generators, tol.membership_tol());
    let into_generators = images.iter().map(|w| target.reject(w).norm()).fold(0.0, f64::max);

    Ok(NearInvariance {
        shifted,
        wandering,
        defect_space,
        defect,
        into_ek,
        into_generators,
        generator_dim,
        intersections: x,
    })
}

/// Per-cluster structure report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub s: f64,
    #[serde(rename = "dim_E")]
    pub dim_e: usize,
    #[serde(rename = "dim_EK")]
    pub dim_ek: usize,
    pub m: usize,
    pub r: usize,
    pub p: usize,
    pub max_principal_angle: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0_condition: Option<f64>,
    pub checks: Vec<Check>,
}

/// Near invariance with defect, both inclusions and the dimension bounds.
pub fn near_invariance_report(
    s: f64,
    e: &SubspaceBasis,
    ek: &SubspaceBasis,
    columns: &[CVec],
    tol: &Tolerances,
) -> Result<StructureReport> {
    let ni = near_invariance(s, e, ek, columns, tol)?;
    let m = e.m();
    let mut checks = vec![
        Check::at_most("intersections_agree", ni.intersections.max_angle, tol.subspace_tol),
        Check::at_most("defect_at_most_m", ni.defect as f64, m as f64),
        Check::at_most("wandering_at_most_m", ni.wandering.dim() as f64, m as f64),
        Check::at_most("generators_at_most_m", ni.generator_dim as f64, m as f64),
        Check::at_most("backshift_into_ek", ni.into_ek, tol.subspace_tol),
        Check::at_most("backshift_into_intersection_plus_generators", ni.into_generators, tol.subspace_tol),
    ];
    sort_checks(&mut checks);
    Ok(StructureReport {
        s,
        dim_e: e.dim(),
        dim_ek: ek.dim(),
        m,
        r: ni.wandering.dim(),
        p: ni.defect,
        max_principal_angle: ni.intersections.max_angle,
        f0_condition: None,
        checks,
    })
}

/// Outcome of the full-wandering (`r = m`) check.
#[derive(Debug, Clone)]
pub struct FullWandering {
    pub checks: Vec<Check>,
    pub wandering: SubspaceBasis,
    /// `F_0 = [W_1 ... W_m]`.
    pub f0: MatrixSeries,
    pub f0_condition: f64,
    /// `max_i max_f |<f, U_i>|` over the `E_K` basis.
    pub ek_column_overlap: f64,
}

pub fn full_wandering_check(
    s: f64,
    e: &SubspaceBasis,
    ek: &SubspaceBasis,
    columns: &[CVec],
    tol: &Tolerances,
) -> Result<FullWandering> {
    let ni = near_invariance(s, e, ek, columns, tol)?;
    let m = e.m();
    if ni.wandering.dim() < m {
        return Err(Error::NotApplicable(format!(
            "wandering dimension {} is below m = {m}",
            ni.wandering.dim()
        )));
    }
    let overlap = (0..ek.dim())
        .flat_map(|i| {
            let f = ek.column(i);
            columns.iter().map(move |u| u.dotc(&f).norm())
        })
        .fold(0.0, f64::max);
    let w0 = ni.wandering.values_at_zero();
    let cond = condition_number(&w0);
    let mut checks = vec![
        Check::at_most("defect_zero", ni.defect as f64, 0.0),
        Check::at_most("ek_orthogonal_to_columns", overlap, tol.subspace_tol),
    ];
    checks.push(if cond <= tol.cond_max {
        Check::at_most("wandering_values_invertible", cond, tol.cond_max)
    } else {
        Check::inconclusive("wandering_values_invertible", cond, tol.cond_max, "F0(0) is too ill-conditioned")
    });
    sort_checks(&mut checks);
    let f0 = MatrixSeries::from_columns(&ni.wandering.functions());
    Ok(FullWandering {
        checks,
        wandering: ni.wandering,
        f0,
        f0_condition: cond,
        ek_column_overlap: overlap,
    })
}

/// Inner candidate `Phi` for a backward-shift-invariant subspace `E'`, with
/// `E'^perp = Phi H^2` inside the window.
#[derive(Debug, Clone)]
pub struct BeurlingData {
    pub phi: Vec<FourierVec>,
    /// `max_zeta ||Phi(zeta)^* Phi(zeta) - I||` on the grid.
    pub innerness_residual: f64,
    /// `max ||P_{E'} z^k Phi e_j||` over shifts that stay two blocks below
    /// the window edge.
    pub containment_residual: f64,
    /// `E' = {0}`: the complement is the whole window.
    pub degenerate: bool,
}

pub fn beurling_extract(eprime: &SubspaceBasis, tol: f64, grid: usize) -> Result<BeurlingData> {
    let residual = backshift_invariance_residual(eprime);
    if residual > tol {
        return Err(Error::NotInvariant { residual });
    }
    let m = eprime.m();
    let n = eprime.window();
    let rows = eprime.rows();
    let degenerate = eprime.is_empty();
    let c = window_complement(eprime, tol);
    if c.is_empty() {
        return Ok(BeurlingData {
            phi: Vec::new(),
            innerness_residual: 0.0,
            containment_residual: 0.0,
            degenerate,
        });
    }
    // C' = {c in C : top block vanishes}, so that zC' stays in the window.
    let top = c.matrix().rows(n * m, m).into_owned();
    let keep = crate::linalg::null_basis(&top, tol);
    let c_low = SubspaceBasis::new(m, c.matrix() * keep);
    let shifted: Vec<CVec> = (0..c_low.dim()).map(|i| shift_coords(&c_low.column(i), m)).collect();
    let phi_basis = orth_complement_within(&c, &shifted, tol);
    let phi: Vec<FourierVec> = phi_basis.functions();

    let series = MatrixSeries::from_columns(&phi);
    let values = series.to_grid(grid.max(2 * rows))?;
    let k = phi.len();
    let innerness_residual = values
        .iter()
        .map(|v| crate::linalg::op_norm(&(v.adjoint() * v - CMat::identity(k, k))))
        .fold(0.0, f64::max);

    let degree = phi.iter().map(|f| f.trimmed(1e-12).pos()).max().unwrap_or(0);
    let mut containment_residual = 0.0_f64;
    if !eprime.is_empty() {
        let mut shift = 0;
        while degree + shift + 2 <= n {
            for i in 0..k {
                let mut v = phi_basis.column(i);
                for _ in 0..shift {
                    v = shift_coords(&v, m);
                }
                containment_residual = containment_residual.max(eprime.project(&v).norm());
            }
            shift += 1;
        }
    }
    Ok(BeurlingData {
        phi,
        innerness_residual,
        containment_residual,
        degenerate,
    })
}

/// Scalar structure `E = h K_theta`.
#[derive(Debug, Clone)]
pub struct ScalarStructure {
    /// Number of `S*` steps taken before `E` reached outside `zH^2`.
    pub depth: usize,
    /// The isometric multiplier (unit-norm wandering vector).
    pub h: FourierVec,
    pub min_abs_h: f64,
    /// Largest negative-index mass of `g = F / h`.
    pub analyticity_residual: f64,
    /// Largest `| ||g|| - ||F|| |`.
    pub norm_residual: f64,
    /// `S*` invariance residual of `E' = span{g}`.
    pub invariance_residual: f64,
    pub eprime: SubspaceBasis,
}

/// Recovers `h` and `E'` for `m = 1`. Vanishing of `h` on the grid is
/// reported as [`Error::GridSingularity`].
pub fn scalar_structure(e: &SubspaceBasis, grid: usize, tol: &Tolerances) -> Result<ScalarStructure> {
    if e.m() != 1 {
        return Err(Error::NotApplicable(format!("scalar structure needs m = 1, got m = {}", e.m())));
    }
    if e.is_empty() {
        return Err(Error::InvalidArgument("subspace is trivial".into()));
    }
    let n = e.window();
    let grid = grid.max(2 * (n + 1)).next_power_of_two();
    let mut current = e.clone();
    let mut depth = 0;
    loop {
        let wandering = wandering_part(&current, tol.membership_tol());
        if wandering.dim() == 1 {
            break;
        }
        if depth >= n {
            return Err(Error::NotApplicable("backward shift recursion exhausted the window".into()));
        }
        let shifted: Vec<CVec> = (0..current.dim())
            .map(|i| backshift_coords(&current.column(i), 1))
            .collect();
        current = SubspaceBasis::span_of(1, current.rows(), &shifted, tol.membership_tol());
        depth += 1;
    }
    let h = wandering_part(&current, tol.membership_tol()).function(0);
    let h_grid = h.to_grid(grid)?;
    let min_abs_h = (0..grid).map(|t| h_grid.at(t)[0].norm()).fold(f64::INFINITY, f64::min);
    if min_abs_h < tol.grid_floor {
        return Err(Error::GridSingularity { min_singular: min_abs_h });
    }
    let mut analyticity_residual = 0.0_f64;
    let mut norm_residual = 0.0_f64;
    let mut gs = Vec::with_capacity(current.dim());
    for f in current.functions() {
        let f_grid = f.to_grid(grid)?;
        let values: Vec<_> = (0..grid).map(|t| f_grid.at(t)[0] / h_grid.at(t)[0]).collect();
        let g = GridSamples::from_values(1, grid, values).to_fourier_full();
        analyticity_residual = analyticity_residual.max(g.negative_mass());
        let g_plus = g.analytic_project();
        norm_residual = norm_residual.max((g_plus.norm() - f.norm()).abs());
        gs.push(g_plus.restrict(0, n).to_window(n).unwrap_or_else(|_| CVec::from_element(n + 1, ZERO)));
    }
    let eprime = SubspaceBasis::span_of(1, n + 1, &gs, tol.membership_tol());
    let invariance_residual = backshift_invariance_residual(&eprime);
    Ok(ScalarStructure {
        depth,
        h,
        min_abs_h,
        analyticity_residual,
        norm_residual,
        invariance_residual,
        eprime,
    })
}

/// Scalar-structure checks for one cluster.
pub fn scalar_checks(e: &SubspaceBasis, grid: usize, tol: &Tolerances) -> Vec<Check> {
    let mut checks = match scalar_structure(e, grid, tol) {
        Err(Error::NotApplicable(why)) => vec![Check::not_applicable("scalar_form", why)],
        Err(Error::GridSingularity { min_singular }) => vec![Check::inconclusive(
            "scalar_form",
            min_singular,
            tol.grid_floor,
            "h is numerically zero on the grid",
        )],
        Err(other) => vec![Check::inconclusive("scalar_form", f64::NAN, 0.0, other.to_string())],
        Ok(sc) => {
            let mut out = vec![
                Check::at_most("scalar_quotient_analytic", sc.analyticity_residual, tol.subspace_tol),
                Check::at_most("scalar_multiplier_isometric", sc.norm_residual, tol.subspace_tol),
                Check::at_most("scalar_quotient_backshift_invariant", sc.invariance_residual, tol.subspace_tol),
            ];
            match beurling_extract(&sc.eprime, tol.subspace_tol, 0) {
                Ok(b) => out.push(Check::at_most("scalar_theta_inner", b.innerness_residual, tol.subspace_tol)),
                Err(err) => out.push(Check::inconclusive("scalar_theta_inner", f64::NAN, tol.subspace_tol, err.to_string())),
            }
            out
        }
    };
    sort_checks(&mut checks);
    checks
}

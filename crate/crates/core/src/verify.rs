//! The full pipeline for one symbol: Schmidt decomposition of `H_U^2` and
//! `K_U^2`, the operator identities, and per-cluster structure and action
//! reports.

use std::collections::BTreeSet;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::action::{action_report, ActionInput, ActionParts, ActionReport};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fourier::{default_grid, FourierVec};
use crate::hankel::{apply_k, build_gamma, build_shifted_gamma, rank_m_identity_residual, BlockHankelMatrix};
use crate::linalg::{c, hermitian_defect, op_norm, CMat, CVec};
use crate::report::{sort_checks, Check, Tally, Verdict};
use crate::spectral::{
    eigen_noise_floor, eigenspace_at, hermitian_eig, schmidt_subspaces, ClusterConfig, Eigen, OperatorTag,
    SchmidtSubspace, SubspaceBasis,
};
use crate::structure::{full_wandering_check, near_invariance_report, scalar_checks, StructureReport};
use crate::symbols::{symbol_columns, MatrixSymbol};

/// Every tolerance used by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative merge tolerance for Schmidt values.
    pub cluster_tol: f64,
    /// Schmidt values at or below this are kernel.
    pub s_floor: f64,
    /// Relative tolerance of [`crate::spectral::numerical_rank`].
    pub rank_tol: f64,
    /// Subspace equality and membership residuals.
    pub subspace_tol: f64,
    /// Operator identities (anti-symmetry, intertwining, rank-m).
    pub identity_tol: f64,
    /// Symmetry of `(S*Theta~)(0)`.
    pub symmetry_tol: f64,
    /// Largest acceptable condition number of `F_0(0)`.
    pub cond_max: f64,
    /// Smallest acceptable pointwise singular value in grid divisions.
    pub grid_floor: f64,
}

impl Tolerances {
    /// Defaults for exact (polynomial) data.
    pub fn polynomial() -> Self {
        Self {
            cluster_tol: 1e-8,
            s_floor: 1e-8,
            rank_tol: 1e-10,
            subspace_tol: 1e-9,
            identity_tol: 1e-11,
            symmetry_tol: 1e-10,
            cond_max: 1e8,
            grid_floor: 1e-8,
        }
    }

    /// Defaults widened for a truncation tail bound.
    pub fn for_tail(tail: f64) -> Self {
        let base = Self::polynomial();
        if tail <= 0.0 {
            return base;
        }
        Self {
            cluster_tol: base.cluster_tol.max(10.0 * tail),
            s_floor: base.s_floor.max(2.0 * tail),
            subspace_tol: base.subspace_tol.max(10.0 * tail),
            identity_tol: base.identity_tol.max(4.0 * tail),
            symmetry_tol: base.symmetry_tol.max(10.0 * tail),
            ..base
        }
    }

    pub fn for_symbol(u: &MatrixSymbol) -> Self {
        Self::for_tail(u.tail_bound())
    }

    /// Threshold below which an inner product or singular value counts as
    /// zero when forming kernels and intersections.
    pub fn membership_tol(&self) -> f64 {
        self.subspace_tol.max(1e-8)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("cluster_tol", self.cluster_tol),
            ("s_floor", self.s_floor),
            ("rank_tol", self.rank_tol),
            ("subspace_tol", self.subspace_tol),
            ("identity_tol", self.identity_tol),
            ("symmetry_tol", self.symmetry_tol),
            ("cond_max", self.cond_max),
            ("grid_floor", self.grid_floor),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::polynomial()
    }
}

/// Groups of checks selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckGroup {
    /// Anti-symmetry, intertwining, the three `K_U` realizations, matrix vs
    /// function path, and `H_U^2` Hermitian PSD.
    Identities,
    /// `K_U^2 = H_U^2 - sum <., U_i> U_i`.
    RankM,
    /// `E cap {U_i}^perp = E_K cap {U_i}^perp`.
    Intersections,
    /// Near invariance with defect and both inclusions.
    Near,
    /// Full wandering part: defect zero and `E_K perp {U_i}`.
    Full,
    /// Scalar `h K_theta` form.
    Scalar,
    /// `Theta~` extraction and the action formula.
    Action,
    /// Model-space identities and symmetry at zero.
    ModelSpace,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::Identities,
        CheckGroup::RankM,
        CheckGroup::Intersections,
        CheckGroup::Near,
        CheckGroup::Full,
        CheckGroup::Scalar,
        CheckGroup::Action,
        CheckGroup::ModelSpace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Identities => "identities",
            CheckGroup::RankM => "rank-m",
            CheckGroup::Intersections => "intersections",
            CheckGroup::Near => "near",
            CheckGroup::Full => "full",
            CheckGroup::Scalar => "scalar",
            CheckGroup::Action => "action",
            CheckGroup::ModelSpace => "model-space",
        }
    }
}

impl FromStr for CheckGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "identities" | "prop22" => CheckGroup::Identities,
            "rank-m" | "rankm" => CheckGroup::RankM,
            "intersections" | "lemma24" => CheckGroup::Intersections,
            "near" => CheckGroup::Near,
            "full" => CheckGroup::Full,
            "scalar" => CheckGroup::Scalar,
            "action" => CheckGroup::Action,
            "model-space" | "lemmas4" => CheckGroup::ModelSpace,
            other => return Err(Error::InvalidArgument(format!("unknown check group {other:?}"))),
        })
    }
}

/// A set of check groups; `all` selects everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSet(BTreeSet<CheckGroup>);

impl CheckSet {
    pub fn all() -> Self {
        Self(CheckGroup::ALL.into_iter().collect())
    }

    pub fn only(groups: &[CheckGroup]) -> Self {
        Self(groups.iter().copied().collect())
    }

    /// Parses a comma-separated list such as `near,action` or `all`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut set = BTreeSet::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "all" {
                return Ok(Self::all());
            }
            set.insert(item.parse()?);
        }
        if set.is_empty() {
            return Err(Error::InvalidArgument("empty check list".into()));
        }
        Ok(Self(set))
    }

    pub fn contains(&self, g: CheckGroup) -> bool {
        self.0.contains(&g)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.0.iter().map(|g| g.name()).collect()
    }

    /// Whether any selected group looks at Schmidt clusters.
    pub fn needs_clusters(&self) -> bool {
        self.0
            .iter()
            .any(|g| !matches!(g, CheckGroup::Identities | CheckGroup::RankM))
    }
}

/// Knobs of one analysis run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Truncation `N`; defaults to `d + 4`.
    pub window: Option<usize>,
    /// Defaults to [`Tolerances::for_symbol`].
    pub tolerances: Option<Tolerances>,
    /// Grid size for pointwise operations; defaults to the smallest power of
    /// two at least `4(N + 1)`.
    pub grid: Option<usize>,
    pub execution: Execution,
    /// Include `Theta~` coefficients in action reports.
    pub dump_theta: bool,
}

/// Schmidt data of one symmetric symbol at one truncation.
#[derive(Debug, Clone)]
pub struct Analysis {
    symbol: MatrixSymbol,
    window: usize,
    grid: usize,
    tolerances: Tolerances,
    execution: Execution,
    dump_theta: bool,
    gamma: BlockHankelMatrix,
    gamma_k: BlockHankelMatrix,
    columns: Vec<FourierVec>,
    column_coords: Vec<CVec>,
    clusters: Vec<SchmidtSubspace>,
    kernel_dim: usize,
    k_eigen: Eigen,
    hsq: CMat,
}

impl Analysis {
    pub fn new(symbol: &MatrixSymbol, config: &AnalysisConfig) -> Result<Self> {
        symbol.require_symmetric()?;
        let d = symbol.degree();
        let window = config.window.unwrap_or(d + 4);
        if window < d {
            return Err(Error::InvalidArgument(format!(
                "truncation {window} is below the symbol degree {d}"
            )));
        }
        let tolerances = config.tolerances.unwrap_or_else(|| Tolerances::for_symbol(symbol));
        tolerances.validate()?;
        let grid = match config.grid {
            Some(g) if g < 2 * (window + 1) => {
                return Err(Error::Aliasing {
                    grid: g,
                    span: 2 * (window + 1),
                })
            }
            Some(g) => g.next_power_of_two(),
            None => default_grid(window),
        };
        let gamma = build_gamma(symbol, window);
        let gamma_k = build_shifted_gamma(symbol, window);
        let hsq = gamma.hsq_matrix()?;
        let ksq = gamma_k.hsq_matrix()?;
        let cluster_cfg = ClusterConfig {
            cluster_tol: tolerances.cluster_tol,
            s_floor: tolerances.s_floor,
        };
        let spectrum = schmidt_subspaces(&hsq, symbol.m(), OperatorTag::H, &cluster_cfg)?;
        let k_eigen = hermitian_eig(&ksq)?;
        let columns = symbol_columns(symbol);
        let column_coords = columns
            .iter()
            .map(|u| u.restrict(0, window).to_window(window))
            .collect::<Result<_>>()?;
        Ok(Self {
            symbol: symbol.clone(),
            window,
            grid,
            tolerances,
            execution: config.execution,
            dump_theta: config.dump_theta,
            gamma,
            gamma_k,
            columns,
            column_coords,
            clusters: spectrum.subspaces,
            kernel_dim: spectrum.kernel_dim,
            k_eigen,
            hsq,
        })
    }

    pub fn symbol(&self) -> &MatrixSymbol {
        &self.symbol
    }

    pub fn m(&self) -> usize {
        self.symbol.m()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn gamma(&self) -> &BlockHankelMatrix {
        &self.gamma
    }

    pub fn gamma_k(&self) -> &BlockHankelMatrix {
        &self.gamma_k
    }

    pub fn hsq(&self) -> &CMat {
        &self.hsq
    }

    pub fn columns(&self) -> &[FourierVec] {
        &self.columns
    }

    pub fn column_coords(&self) -> &[CVec] {
        &self.column_coords
    }

    /// Schmidt subspaces of `H_U`, `s` descending.
    pub fn clusters(&self) -> &[SchmidtSubspace] {
        &self.clusters
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    /// `E_K(s)`: eigenvectors of `K_U^2` whose Schmidt value matches `s`
    /// within the cluster tolerance.
    pub fn ek(&self, s: f64) -> SubspaceBasis {
        let s_max = self.clusters.first().map_or(s, |c| c.s).max(s);
        let noise = eigen_noise_floor(&self.hsq).sqrt();
        let tol = (self.tolerances.cluster_tol * s_max).max(noise);
        eigenspace_at(&self.k_eigen, self.m(), s, tol)
    }

    /// Operator identities on seeded random vectors.
    pub fn identity_checks(&self, groups: &CheckSet) -> Result<Vec<Check>> {
        let tol = self.tolerances.identity_tol;
        let mut checks = Vec::new();
        if groups.contains(CheckGroup::Identities) {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
            let m = self.m();
            let n = self.window;
            let random = |rng: &mut ChaCha8Rng, deg: usize| {
                let comps: Vec<Vec<_>> = (0..m)
                    .map(|_| {
                        (0..=deg)
                            .map(|_| {
                                let re: f64 = StandardNormal.sample(rng);
                                let im: f64 = StandardNormal.sample(rng);
                                c(re, im)
                            })
                            .collect()
                    })
                    .collect();
                let f = FourierVec::from_components(&comps);
                let norm = f.norm();
                f.scale(c(1.0 / norm, 0.0))
            };
            let mut anti = 0.0_f64;
            let mut inter = 0.0_f64;
            let mut kdis = 0.0_f64;
            let mut paths = 0.0_f64;
            for _ in 0..16 {
                let f = random(&mut rng, n);
                let g = random(&mut rng, n);
                let hf = self.gamma.apply_h(&f)?;
                let hg = self.gamma.apply_h(&g)?;
                anti = anti.max((hf.inner(&g)? - hg.inner(&f)?).norm());
                let shifted = self.gamma.apply_h_any(&f.shift())?;
                inter = inter.max(shifted.max_abs_diff(&hf.backshift()));
                kdis = kdis.max(apply_k(&self.gamma, &self.gamma_k, &f)?.max_disagreement());
                paths = paths.max(self.gamma.apply_h_function(&f)?.max_abs_diff(&hf));
            }
            let scale = op_norm(&self.hsq).max(1.0);
            let herm = hermitian_defect(&self.hsq);
            let min_eig = hermitian_eig(&self.hsq)?.values.first().copied().unwrap_or(0.0);
            checks.extend([
                Check::at_most("antisymmetry", anti, tol),
                Check::at_most("intertwining", inter, tol),
                Check::at_most("k_realizations_agree", kdis, tol),
                Check::at_most("matrix_function_paths_agree", paths, tol),
                Check::at_most("hsq_hermitian", herm, 1e-14 * scale),
                Check::at_most("hsq_positive", (-min_eig).max(0.0), 1e-10 * scale),
            ]);
        }
        if groups.contains(CheckGroup::RankM) {
            let r = rank_m_identity_residual(&self.gamma, &self.gamma_k, &self.columns)?;
            checks.push(Check::at_most("rank_m_identity", r, tol));
        }
        sort_checks(&mut checks);
        Ok(checks)
    }

    /// All selected checks for cluster `index`.
    pub fn cluster_report(&self, index: usize, groups: &CheckSet) -> Result<ClusterReport> {
        let cluster = &self.clusters[index];
        let s = cluster.s;
        let e = &cluster.basis;
        let ek = self.ek(s);
        let tol = &self.tolerances;
        let cols = &self.column_coords;
        let m = self.m();

        let mut structure = near_invariance_report(s, e, &ek, cols, tol)?;
        let mut checks: Vec<Check> = Vec::new();
        for c in &structure.checks {
            let keep = if c.name == "intersections_agree" {
                groups.contains(CheckGroup::Intersections)
            } else {
                groups.contains(CheckGroup::Near)
            };
            if keep {
                checks.push(c.clone());
            }
        }
        let cluster_res = self.eigen_residual(cluster);
        if groups.contains(CheckGroup::Near) {
            checks.push(Check::at_most("h_invariant", self.h_invariance(e), tol.subspace_tol * s.max(1.0)));
            checks.push(Check::at_most(
                "eigen_residual",
                cluster_res,
                cluster.cluster_residual + 1e-11 * op_norm(&self.hsq).max(1.0),
            ));
        }

        let needs_full = groups.contains(CheckGroup::Full)
            || groups.contains(CheckGroup::Action)
            || groups.contains(CheckGroup::ModelSpace);
        let full = if needs_full {
            match full_wandering_check(s, e, &ek, cols, tol) {
                Ok(fw) => Some(fw),
                Err(Error::NotApplicable(why)) => {
                    for (g, name) in [
                        (CheckGroup::Full, "full_wandering"),
                        (CheckGroup::Action, "action_formula"),
                        (CheckGroup::ModelSpace, "model_space_backshift_identity"),
                    ] {
                        if groups.contains(g) {
                            checks.push(Check::not_applicable(name, why.clone()));
                        }
                    }
                    None
                }
                Err(err) => return Err(err),
            }
        } else {
            None
        };

        let mut action = None;
        if let Some(fw) = &full {
            structure.f0_condition = Some(fw.f0_condition);
            if groups.contains(CheckGroup::Full) {
                checks.extend(fw.checks.iter().cloned());
            }
            let parts = ActionParts {
                formula: groups.contains(CheckGroup::Action),
                model_space: groups.contains(CheckGroup::ModelSpace),
            };
            let well_posed = fw.f0_condition <= tol.cond_max;
            if (parts.formula || parts.model_space) && !well_posed {
                checks.push(Check::inconclusive(
                    "action_formula",
                    fw.f0_condition,
                    tol.cond_max,
                    "F0(0) is too ill-conditioned",
                ));
            } else if parts.formula || parts.model_space {
                let input = ActionInput {
                    gamma: &self.gamma,
                    s,
                    e,
                    wandering: &fw.wandering,
                    f0: &fw.f0,
                    columns: cols,
                    grid: self.grid,
                };
                match action_report(&input, tol, parts, self.dump_theta) {
                    Ok(report) => {
                        checks.extend(report.checks.iter().cloned());
                        action = Some(report);
                    }
                    Err(Error::GridSingularity { min_singular }) => checks.push(Check::inconclusive(
                        "action_formula",
                        min_singular,
                        tol.grid_floor,
                        "F0 is numerically singular on the grid",
                    )),
                    Err(err) => return Err(err),
                }
            }
        }

        if groups.contains(CheckGroup::Scalar) {
            if m == 1 {
                checks.extend(scalar_checks(e, self.grid, tol));
            } else {
                checks.push(Check::not_applicable("scalar_form", format!("m = {m}")));
            }
        }

        sort_checks(&mut checks);
        structure.checks = checks;
        let tally = Tally::of(&structure.checks);
        Ok(ClusterReport {
            s,
            multiplicity: cluster.multiplicity,
            cluster_residual: cluster.cluster_residual,
            verdict: tally.overall(),
            structure,
            action,
        })
    }

    /// `||(I - P_E) H_U(basis)||`.
    fn h_invariance(&self, e: &SubspaceBasis) -> f64 {
        (0..e.dim())
            .map(|i| e.reject(&self.gamma.apply_h_coords(&e.column(i))).norm())
            .fold(0.0, f64::max)
    }

    /// `max_i ||M b_i - s^2 b_i||`.
    fn eigen_residual(&self, c: &SchmidtSubspace) -> f64 {
        let b = c.basis.matrix();
        let r = &self.hsq * b - b.scale(c.s * c.s);
        (0..r.ncols()).map(|i| r.column(i).norm()).fold(0.0, f64::max)
    }

    /// Identity checks plus every cluster report.
    pub fn verify(&self, groups: &CheckSet) -> Result<VerifyOutcome> {
        let identities = self.identity_checks(groups)?;
        let clusters = if groups.needs_clusters() {
            exec::map_range(self.execution, self.clusters.len(), |i| self.cluster_report(i, groups))
                .into_iter()
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let mut tally = Tally::of(&identities);
        for c in &clusters {
            tally.merge(Tally::of(&c.structure.checks));
        }
        Ok(VerifyOutcome {
            identities,
            clusters,
            tally,
        })
    }
}

/// Analyses and verifies every symbol. Symbols are independent and are
/// spread over the pool under [`Execution::Parallel`].
pub fn verify_batch(symbols: &[MatrixSymbol], config: &AnalysisConfig, groups: &CheckSet) -> Vec<Result<VerifyOutcome>> {
    exec::map(config.execution, symbols, |u| Analysis::new(u, config)?.verify(groups))
}

/// Checks for one Schmidt cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub s: f64,
    pub multiplicity: usize,
    pub cluster_residual: f64,
    pub verdict: Verdict,
    /// All checks for the cluster live in `structure.checks`.
    pub structure: StructureReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub identities: Vec<Check>,
    pub clusters: Vec<ClusterReport>,
    pub tally: Tally,
}

impl VerifyOutcome {
    pub fn verdict(&self) -> Verdict {
        self.tally.overall()
    }

    /// Exit status: 0 all applicable pass, 4 any failure, 5 nothing applicable.
    pub fn exit_code(&self) -> i32 {
        match self.verdict() {
            Verdict::Pass => 0,
            Verdict::Fail => 4,
            _ => 5,
        }
    }

    /// Every check, identities first, then clusters in `s` order.
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.identities
            .iter()
            .chain(self.clusters.iter().flat_map(|c| c.structure.checks.iter()))
    }
}

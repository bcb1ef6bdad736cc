//! Named worked examples with their expected structural facts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{CMat, ONE, ZERO};
use crate::report::Verdict;
use crate::spectral::{max_angle, SubspaceBasis};
use crate::structure::{near_invariance, scalar_structure};
use crate::symbol_file::{SymbolKind, SymbolSpec};
use crate::symbols::MatrixSymbol;
use crate::verify::{Analysis, AnalysisConfig, CheckSet, Tolerances, VerifyOutcome};

/// Angle tolerance for subspace facts.
pub const ANGLE_TOL: f64 = 1e-10;
/// Coefficient tolerance for closed-form functions.
pub const COEFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example {
    /// `diag(phi, phi)`.
    #[serde(rename = "3.6A")]
    DiagonalPair,
    /// `[[0, phi], [phi, 0]]`.
    #[serde(rename = "3.6B")]
    AntidiagonalPair,
    /// `[[phi + psi, phi - psi], [phi - psi, phi + psi]]`.
    #[serde(rename = "4.6")]
    SumDifference,
    /// `z^n`.
    #[serde(rename = "scalar-zn")]
    ScalarMonomial,
}

impl Example {
    pub fn id(self) -> &'static str {
        match self {
            Example::DiagonalPair => "3.6A",
            Example::AntidiagonalPair => "3.6B",
            Example::SumDifference => "4.6",
            Example::ScalarMonomial => "scalar-zn",
        }
    }

    /// Default spec: `phi = z^2`, `psi = z^3`, and `z^3` for the scalar case.
    pub fn default_spec(self) -> SymbolSpec {
        let origin = |k: usize| Some(vec![[0.0, 0.0]; k]);
        let pair = |kind| SymbolSpec {
            m: 2,
            kind,
            blocks: None,
            zeros: None,
            phi_zeros: origin(2),
            psi_zeros: None,
            truncation: None,
        };
        match self {
            Example::DiagonalPair => pair(SymbolKind::DiagonalPair),
            Example::AntidiagonalPair => pair(SymbolKind::AntidiagonalPair),
            Example::SumDifference => SymbolSpec {
                psi_zeros: origin(3),
                ..pair(SymbolKind::SumDifference)
            },
            Example::ScalarMonomial => SymbolSpec::from_poly(1, &[(3, CMat::identity(1, 1))]),
        }
    }

    fn accepts(self, kind: SymbolKind) -> bool {
        matches!(
            (self, kind),
            (Example::DiagonalPair, SymbolKind::DiagonalPair)
                | (Example::AntidiagonalPair, SymbolKind::AntidiagonalPair)
                | (Example::SumDifference, SymbolKind::SumDifference)
                | (Example::ScalarMonomial, SymbolKind::Poly)
        )
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Example {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "3.6A" | "3.6a" => Example::DiagonalPair,
            "3.6B" | "3.6b" => Example::AntidiagonalPair,
            "4.6" => Example::SumDifference,
            "scalar-zn" => Example::ScalarMonomial,
            other => return Err(Error::InvalidArgument(format!("unknown example {other:?}"))),
        })
    }
}

/// One expected fact against its observed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub matches: bool,
}

impl Fact {
    fn count(name: &str, expected: usize, observed: usize) -> Self {
        Self {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            matches: expected == observed,
        }
    }

    fn small(name: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            expected: format!("<= {tol:e}"),
            observed: format!("{residual:e}"),
            matches: residual <= tol,
        }
    }

    fn verdict(name: &str, observed: Verdict) -> Self {
        Self {
            name: name.into(),
            expected: "pass".into(),
            observed: format!("{observed:?}").to_lowercase(),
            matches: observed == Verdict::Pass,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    /// Replaces the example's default parameters; must be of the matching kind.
    pub spec: Option<SymbolSpec>,
    pub window: Option<usize>,
    pub tolerances: Option<Tolerances>,
    pub grid: Option<usize>,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub example: Example,
    pub spec: SymbolSpec,
    pub window: usize,
    pub tail_bound: f64,
    pub tolerances: Tolerances,
    pub facts: Vec<Fact>,
    pub all_match: bool,
    pub verify: VerifyOutcome,
}

impl ReproduceReport {
    /// Plain-text table of expected against observed facts.
    pub fn table(&self) -> String {
        let mut rows = vec![(
            "fact".to_string(),
            "expected".to_string(),
            "observed".to_string(),
            "ok".to_string(),
        )];
        for f in &self.facts {
            rows.push((
                f.name.clone(),
                f.expected.clone(),
                f.observed.clone(),
                if f.matches { "yes" } else { "NO" }.to_string(),
            ));
        }
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
        let w2 = rows.iter().map(|r| r.2.len()).max().unwrap_or(0);
        let mut out = format!("example {} (N = {})\n", self.example, self.window);
        for (a, b, c, d) in rows {
            out.push_str(&format!("{a:<w0$}  {b:<w1$}  {c:<w2$}  {d}\n"));
        }
        out
    }
}

/// Scalar entry `phi` of a pair example as an `m = 1` symbol.
fn scalar_entry(u: &MatrixSymbol, i: usize, j: usize) -> Result<MatrixSymbol> {
    let e = u.entry(i, j);
    let coeffs: Vec<_> = (0..=u.degree()).map(|k| e.get(k as i64, 0)).collect();
    MatrixSymbol::scalar_times(&coeffs, &CMat::identity(1, 1), u.tail_bound())
}

/// `E_s (+) E_s` in the index-major layout of `m = 2`.
fn doubled(scalar: &SubspaceBasis) -> SubspaceBasis {
    let rows = scalar.rows();
    let d = scalar.dim();
    let mut mat = CMat::from_element(2 * rows, 2 * d, ZERO);
    for col in 0..d {
        for k in 0..rows {
            let v = scalar.matrix()[(k, col)];
            mat[(2 * k, col)] = v;
            mat[(2 * k + 1, d + col)] = v;
        }
    }
    SubspaceBasis::new(2, mat)
}

/// `span{z^k e_i : k <= deg, i < m}` in a window of `rows / m` blocks.
fn leading_span(m: usize, rows: usize, deg: usize) -> SubspaceBasis {
    let d = (deg + 1) * m;
    let mut mat = CMat::from_element(rows, d, ZERO);
    for i in 0..d {
        mat[(i, i)] = ONE;
    }
    SubspaceBasis::new(m, mat)
}

/// `max |c_k - delta_{k, deg}|` after removing the phase of `c_deg`.
fn monomial_defect(coeffs: &[crate::linalg::C64], deg: usize) -> f64 {
    let lead = coeffs.get(deg).copied().unwrap_or(ZERO);
    let mut worst = (lead.norm() - 1.0).abs();
    for (k, x) in coeffs.iter().enumerate() {
        if k != deg {
            worst = worst.max(x.norm());
        }
    }
    worst
}

pub fn reproduce(example: Example, opts: &ReproduceOptions) -> Result<ReproduceReport> {
    let spec = opts.spec.clone().unwrap_or_else(|| example.default_spec());
    if !example.accepts(spec.kind) {
        return Err(Error::InvalidArgument(format!(
            "example {example} cannot use a spec of kind {:?}",
            spec.kind
        )));
    }
    let u = spec.build()?;
    let config = AnalysisConfig {
        window: opts.window,
        tolerances: opts.tolerances,
        grid: opts.grid,
        execution: opts.execution,
        dump_theta: true,
    };
    let analysis = Analysis::new(&u, &config)?;
    let tol = *analysis.tolerances();
    let verify = analysis.verify(&CheckSet::all())?;
    let mut facts = Vec::new();

    match example {
        Example::DiagonalPair | Example::AntidiagonalPair => {
            let (i, j) = if example == Example::DiagonalPair { (0, 0) } else { (0, 1) };
            let phi = scalar_entry(&u, i, j)?;
            let scalar = Analysis::new(
                &phi,
                &AnalysisConfig {
                    window: Some(analysis.window()),
                    ..config.clone()
                },
            )?;
            facts.push(Fact::count("clusters", scalar.clusters().len(), analysis.clusters().len()));
            for (c, sc) in analysis.clusters().iter().zip(scalar.clusters()) {
                let tag = format!("s={:.6}", c.s);
                facts.push(Fact::small(&format!("{tag} value"), (c.s - sc.s).abs(), tol.cluster_tol * sc.s.max(1.0)));
                facts.push(Fact::count(&format!("{tag} dim E"), 2 * sc.multiplicity, c.multiplicity));
                let angle = max_angle(&c.basis, &doubled(&sc.basis))?;
                facts.push(Fact::small(&format!("{tag} E = Es (+) Es angle"), angle, ANGLE_TOL));
                let ni = near_invariance(c.s, &c.basis, &analysis.ek(c.s), analysis.column_coords(), &tol)?;
                facts.push(Fact::count(&format!("{tag} dim W"), 2, ni.wandering.dim()));
            }
        }
        Example::SumDifference => {
            for c in analysis.clusters() {
                let tag = format!("s={:.6}", c.s);
                let ni = near_invariance(c.s, &c.basis, &analysis.ek(c.s), analysis.column_coords(), &tol)?;
                facts.push(Fact::count(&format!("{tag} dim W"), 2, ni.wandering.dim()));
                facts.push(Fact::count(&format!("{tag} defect"), 0, ni.defect));
                let constants = leading_span(2, c.basis.rows(), 0);
                let angle = max_angle(&ni.wandering, &constants)?;
                facts.push(Fact::small(&format!("{tag} W = span(e1, e2) angle"), angle, ANGLE_TOL));
            }
            let action = verify
                .clusters
                .iter()
                .flat_map(|c| c.structure.checks.iter())
                .filter(|c| c.name.contains("action") || c.name.contains("theta"));
            let tally = crate::report::Tally::of(action);
            facts.push(Fact::verdict("action suite", tally.overall()));
        }
        Example::ScalarMonomial => {
            let n = u.degree();
            let top = analysis.clusters().first();
            facts.push(Fact::count("clusters", 1, analysis.clusters().len()));
            facts.push(Fact::count("multiplicity", n + 1, top.map_or(0, |c| c.multiplicity)));
            if let Some(c) = top {
                facts.push(Fact::small("s - 1", (c.s - 1.0).abs(), COEFF_TOL));
                let angle = max_angle(&c.basis, &leading_span(1, c.basis.rows(), n))?;
                facts.push(Fact::small("E = span(1..z^n) angle", angle, ANGLE_TOL));
                let h = scalar_structure(&c.basis, analysis.grid(), &tol)?.h;
                let hc: Vec<_> = (0..=h.pos()).map(|k| h.get(k as i64, 0)).collect();
                facts.push(Fact::small("h unimodular constant", monomial_defect(&hc, 0), COEFF_TOL));
            }
            let theta = verify
                .clusters
                .first()
                .and_then(|c| c.action.as_ref())
                .and_then(|a| a.theta.as_ref());
            let defect = theta.map_or(f64::INFINITY, |blocks| {
                let coeffs: Vec<_> = blocks
                    .iter()
                    .map(|b| crate::linalg::c(b.matrix[0][0][0], b.matrix[0][0][1]))
                    .collect();
                monomial_defect(&coeffs, n + 1)
            });
            facts.push(Fact::small("theta = z^(n+1) up to phase", defect, COEFF_TOL));
        }
    }
    facts.push(Fact::verdict("verification suite", verify.verdict()));
    let all_match = facts.iter().all(|f| f.matches);
    Ok(ReproduceReport {
        example,
        spec,
        window: analysis.window(),
        tail_bound: u.tail_bound(),
        tolerances: tol,
        facts,
        all_match,
        verify,
    })
}

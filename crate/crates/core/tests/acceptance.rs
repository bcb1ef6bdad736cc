//! Acceptance criteria. Prints one line per criterion and exits non-zero if
//! any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::ExitCode;
use std::time::Instant;

use hankel_schmidt::corpus::{random_corpus, structured_corpus};
use hankel_schmidt::linalg::{c, CMat, C64, ONE, ZERO};
use hankel_schmidt::report::{Check, Verdict};
use hankel_schmidt::reproduce::{reproduce, Example, ReproduceOptions};
use hankel_schmidt::spectral::{max_angle, SubspaceBasis};
use hankel_schmidt::symbol_file::{SymbolKind, SymbolSpec};
use hankel_schmidt::symbols::{blaschke_scalar, scalar_poly, MatrixSymbol};
use hankel_schmidt::verify::{Analysis, AnalysisConfig, CheckSet, ClusterReport, Tolerances};

const CORPUS_SIZE: usize = 50;
const CORPUS_SEED: u64 = 20240611;
const STRUCTURED_SEED: u64 = 77;

// Criterion tolerances.
const ORACLE_S_TOL: f64 = 1e-10;
const SPAN_TOL: f64 = 1e-10;
const THETA_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-11;
const INTERSECTION_TOL: f64 = 1e-9;
const INCLUSION_TOL: f64 = 1e-9;
const ACTION_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-10;
const COND_MAX: f64 = 1e8;
const STABILITY_TOL: f64 = 1e-10;
const TIME_BUDGET_S: f64 = 60.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: summary,
        }
    } else {
        let shown: Vec<_> = failures.iter().take(4).cloned().collect();
        Outcome {
            pass: false,
            detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")),
        }
    }
}

fn check<'a>(report: &'a ClusterReport, name: &str) -> Option<&'a Check> {
    report.structure.checks.iter().find(|c| c.name == name)
}

fn residual(report: &ClusterReport, name: &str) -> Option<f64> {
    check(report, name).filter(|c| c.verdict != Verdict::NotApplicable).map(|c| c.residual)
}

/// `span{z^k e_i : k <= deg}` in a window with `rows` coordinates.
fn leading_span(m: usize, rows: usize, deg: usize) -> SubspaceBasis {
    let mut mat = CMat::from_element(rows, (deg + 1) * m, ZERO);
    for i in 0..(deg + 1) * m {
        mat[(i, i)] = ONE;
    }
    SubspaceBasis::new(m, mat)
}

fn monomial(n: usize) -> MatrixSymbol {
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    scalar_poly(&coeffs).unwrap()
}

fn analysis(u: &MatrixSymbol, window: Option<usize>) -> Analysis {
    let cfg = AnalysisConfig {
        window,
        dump_theta: true,
        ..AnalysisConfig::default()
    };
    Analysis::new(u, &cfg).unwrap()
}

fn reports(a: &Analysis) -> Vec<ClusterReport> {
    a.verify(&CheckSet::all()).unwrap().clusters
}

/// Exact scalar oracle for `z^n`.
fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=6 {
        let u = monomial(n);
        let a = analysis(&u, None);
        let oracle = common::schmidt_values_oracle(&u, a.window(), 1e-6);
        if oracle.len() != n + 1 || oracle.iter().any(|s| (s - 1.0).abs() > ORACLE_S_TOL) {
            failures.push(format!("n={n}: oracle disagrees with closed form"));
        }
        let cl = a.clusters();
        if cl.len() != 1 {
            failures.push(format!("n={n}: {} clusters", cl.len()));
            continue;
        }
        if (cl[0].s - oracle[0]).abs() > ORACLE_S_TOL || cl[0].multiplicity != oracle.len() {
            failures.push(format!("n={n}: s={} mult={}", cl[0].s, cl[0].multiplicity));
        }
        let angle = max_angle(&cl[0].basis, &leading_span(1, cl[0].basis.rows(), n)).unwrap();
        if angle > SPAN_TOL {
            failures.push(format!("n={n}: span angle {angle:e}"));
        }
        let rep = &reports(&a)[0];
        if rep.structure.p != 0 {
            failures.push(format!("n={n}: p={}", rep.structure.p));
        }
        let theta: Vec<C64> = rep
            .action
            .as_ref()
            .and_then(|x| x.theta.as_ref())
            .map(|b| b.iter().map(|blk| c(blk.matrix[0][0][0], blk.matrix[0][0][1])).collect())
            .unwrap_or_default();
        let lead = theta.get(n + 1).map_or(0.0, |z| z.norm());
        let mut err = (lead - 1.0).abs();
        for (k, z) in theta.iter().enumerate() {
            if k != n + 1 {
                err = err.max(z.norm());
            }
        }
        if err > THETA_TOL {
            failures.push(format!("n={n}: theta coefficient error {err:e}"));
        }
    }
    outcome(failures, "n = 1..6: one cluster s = 1, mult n+1, span, p = 0, theta = z^(n+1)".into())
}

/// Operator identities on the random corpus, with the rank-m identity also
/// recomputed from the oracle matrices.
fn criterion_2(corpus: &[MatrixSymbol]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let names = ["antisymmetry", "intertwining", "k_realizations_agree", "rank_m_identity"];
    for (i, u) in corpus.iter().enumerate() {
        let a = analysis(u, None);
        let checks = a.identity_checks(&CheckSet::parse("identities,rank-m").unwrap()).unwrap();
        for name in names {
            match checks.iter().find(|c| c.name == name) {
                Some(c) => {
                    worst = worst.max(c.residual);
                    if !(c.residual <= IDENTITY_TOL) {
                        failures.push(format!("#{i} {name} {:e}", c.residual));
                    }
                }
                None => failures.push(format!("#{i} {name} missing")),
            }
        }
        // K^2 = H^2 - sum U_i U_i^* from hand-built matrices.
        let n = a.window();
        let m = u.m();
        let h2 = common::to_cmat(&common::hsq_oracle(&common::gamma_oracle(u, n)));
        let shifted = MatrixSymbol::from_blocks(m, u.blocks().iter().skip(1).cloned().collect(), 0.0).unwrap();
        let k2 = common::to_cmat(&common::hsq_oracle(&common::gamma_oracle(&shifted, n)));
        let mut rhs = h2;
        for col in 0..m {
            let v = hankel_schmidt::linalg::CVec::from_fn(m * (n + 1), |r, _| {
                let (k, row) = (r / m, r % m);
                if k <= u.degree() { u.block(k)[(row, col)] } else { ZERO }
            });
            rhs -= &v * v.adjoint();
        }
        let diff = (k2 - rhs).norm();
        worst = worst.max(diff);
        if diff > IDENTITY_TOL {
            failures.push(format!("#{i} oracle rank-m {diff:e}"));
        }
    }
    outcome(failures, format!("{} symbols, worst residual {worst:.2e}", corpus.len()))
}

fn criterion_3(all: &[(MatrixSymbol, Vec<ClusterReport>)]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (i, (_, reps)) in all.iter().enumerate() {
        for r in reps {
            count += 1;
            let angle = residual(r, "intersections_agree").unwrap_or(f64::INFINITY);
            worst = worst.max(angle);
            if !(angle <= INTERSECTION_TOL) {
                failures.push(format!("#{i} s={:.4} angle {angle:e}", r.s));
            }
        }
    }
    outcome(failures, format!("{count} clusters, worst angle {worst:.2e}"))
}

fn criterion_4(all: &[(MatrixSymbol, Vec<ClusterReport>)]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (i, (u, reps)) in all.iter().enumerate() {
        for r in reps {
            count += 1;
            if r.structure.p > u.m() {
                failures.push(format!("#{i} s={:.4} p={} > m={}", r.s, r.structure.p, u.m()));
            }
            let inc = residual(r, "backshift_into_ek").unwrap_or(f64::INFINITY);
            worst = worst.max(inc);
            if !(inc <= INCLUSION_TOL) {
                failures.push(format!("#{i} s={:.4} inclusion {inc:e}", r.s));
            }
        }
    }
    outcome(failures, format!("{count} clusters, p <= m, worst inclusion {worst:.2e}"))
}

/// Full-wandering and action checks for one cluster with `r = m`.
fn action_failures(label: &str, u: &MatrixSymbol, r: &ClusterReport) -> Vec<String> {
    let mut out = Vec::new();
    let tolerances = [
        ("defect_zero", 0.0),
        ("ek_orthogonal_to_columns", ACTION_TOL),
        ("theta_analytic", ACTION_TOL),
        ("theta_inner", ACTION_TOL),
        ("action_formula", ACTION_TOL),
        ("backshift_theta_symmetric_at_zero", SYMMETRY_TOL),
    ];
    if r.structure.p != 0 {
        out.push(format!("{label} s={:.4} p={}", r.s, r.structure.p));
    }
    for (name, tol) in tolerances {
        match check(r, name) {
            Some(c) if c.verdict != Verdict::NotApplicable && c.verdict != Verdict::Inconclusive => {
                if !(c.residual <= tol) {
                    out.push(format!("{label} m={} s={:.4} {name} {:e}", u.m(), r.s, c.residual));
                }
            }
            other => out.push(format!(
                "{label} s={:.4} {name} {}",
                r.s,
                other.map_or("missing".to_string(), |c| format!("{:?}", c.verdict))
            )),
        }
    }
    out
}

fn criterion_5(all: &[(MatrixSymbol, Vec<ClusterReport>)]) -> Outcome {
    let mut failures = Vec::new();
    let mut applicable = 0;
    for (i, (u, reps)) in all.iter().enumerate() {
        for r in reps {
            let cond = r.structure.f0_condition.unwrap_or(f64::INFINITY);
            if r.structure.r == u.m() && cond <= COND_MAX {
                applicable += 1;
                failures.extend(action_failures(&format!("#{i}"), u, r));
            }
        }
    }
    let named = [
        ("3.6A", SymbolKind::DiagonalPair, None),
        ("3.6B", SymbolKind::AntidiagonalPair, None),
        ("4.6", SymbolKind::SumDifference, Some(2)),
    ];
    for (label, kind, psi) in named {
        let spec = SymbolSpec {
            m: 2,
            kind,
            blocks: None,
            zeros: None,
            phi_zeros: Some(vec![[0.0, 0.0]; if psi.is_some() { 1 } else { 2 }]),
            psi_zeros: psi.map(|k| vec![[0.0, 0.0]; k]),
            truncation: None,
        };
        let u = spec.build().unwrap();
        let reps = reports(&analysis(&u, None));
        if reps.is_empty() {
            failures.push(format!("{label}: no clusters"));
        }
        for r in &reps {
            applicable += 1;
            if r.structure.r != 2 {
                failures.push(format!("{label}: r = {}", r.structure.r));
            }
            failures.extend(action_failures(label, &u, r));
        }
    }
    outcome(failures, format!("{applicable} applicable clusters incl. 3.6A, 3.6B, 4.6"))
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    for ex in [Example::DiagonalPair, Example::SumDifference] {
        match reproduce(ex, &ReproduceOptions::default()) {
            Ok(rep) => {
                for f in rep.facts.iter().filter(|f| !f.matches) {
                    failures.push(format!("{ex}: {} expected {} observed {}", f.name, f.expected, f.observed));
                }
                let has = |needle: &str| rep.facts.iter().any(|f| f.name.contains(needle));
                if !has("dim W") || (ex == Example::DiagonalPair && !has("Es (+) Es")) {
                    failures.push(format!("{ex}: expected facts missing"));
                }
                if ex == Example::SumDifference && !has("action suite") {
                    failures.push(format!("{ex}: action suite missing"));
                }
            }
            Err(e) => failures.push(format!("{ex}: {e}")),
        }
    }
    outcome(failures, "3.6A: E = Es (+) Es, dim W = 2; 4.6: dim W = 2, action suite passes".into())
}

fn criterion_7() -> Outcome {
    let n = 24;
    let (coeffs, tail) = blaschke_scalar(&[c(0.5, 0.0)], n).unwrap();
    let u = MatrixSymbol::scalar_times(&coeffs, &CMat::identity(1, 1), tail).unwrap();
    let tol = Tolerances::for_tail(tail);
    let cfg = AnalysisConfig {
        window: Some(n),
        tolerances: Some(tol),
        ..AnalysisConfig::default()
    };
    let a = Analysis::new(&u, &cfg).unwrap();
    let mut failures = Vec::new();
    let top = &a.clusters()[0];
    if (top.s - 1.0).abs() > tail {
        failures.push(format!("largest s = {} misses 1 by more than tail {tail:e}", top.s));
    }
    if top.multiplicity != 2 {
        failures.push(format!("multiplicity {}", top.multiplicity));
    }
    let out = a.verify(&CheckSet::all()).unwrap();
    for c in out.all_checks().filter(|c| c.verdict == Verdict::Fail) {
        failures.push(format!("{} {:e} > {:e}", c.name, c.residual, c.tolerance));
    }
    outcome(
        failures,
        format!("s = {:.12}, mult {}, tail {tail:.2e}, {} checks pass", top.s, top.multiplicity, out.tally.pass),
    )
}

fn criterion_8(corpus: &[MatrixSymbol]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0_f64;
    for (i, u) in corpus.iter().enumerate() {
        let d = u.degree();
        let near = analysis(u, Some(d + 4));
        let far = analysis(u, Some(d + 8));
        if near.clusters().len() != far.clusters().len() {
            failures.push(format!("#{i}: {} vs {} clusters", near.clusters().len(), far.clusters().len()));
            continue;
        }
        for (a, b) in near.clusters().iter().zip(far.clusters()) {
            let ds = (a.s - b.s).abs();
            let angle = max_angle(&a.basis.embed(d + 8), &b.basis).unwrap();
            worst = worst.max(ds).max(angle);
            if ds > STABILITY_TOL || angle > STABILITY_TOL || a.multiplicity != b.multiplicity {
                failures.push(format!("#{i} s={:.4}: ds {ds:e} angle {angle:e}", a.s));
            }
        }
    }
    outcome(failures, format!("{} symbols, worst change {worst:.2e}", corpus.len()))
}

fn main() -> ExitCode {
    let corpus = random_corpus(CORPUS_SIZE, CORPUS_SEED);
    let structured: Vec<MatrixSymbol> = structured_corpus(20, STRUCTURED_SEED).into_iter().map(|s| s.symbol).collect();
    let mut all_symbols = corpus.clone();
    all_symbols.extend(structured.iter().cloned());

    let mut lines: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        lines.push((id, name, o, t.elapsed().as_secs_f64()));
    };

    run(1, "exact scalar oracle z^n", &criterion_1);
    run(2, "operator identities", &|| criterion_2(&corpus));
    let t = Instant::now();
    let analysed: Vec<(MatrixSymbol, Vec<ClusterReport>)> =
        all_symbols.iter().map(|u| (u.clone(), reports(&analysis(u, None)))).collect();
    let shared = t.elapsed().as_secs_f64();
    run(3, "intersections agree", &|| criterion_3(&analysed));
    run(4, "defect bound and inclusion", &|| criterion_4(&analysed));
    run(5, "full wandering and action", &|| criterion_5(&analysed));
    run(6, "example reproduction", &criterion_6);
    run(7, "Blaschke robustness", &criterion_7);
    run(8, "truncation stability", &|| criterion_8(&corpus));

    let mut ok = true;
    for (id, name, o, secs) in &lines {
        let secs = if (3..=5).contains(id) { secs + shared } else { *secs };
        let timely = secs < TIME_BUDGET_S;
        let pass = o.pass && timely;
        ok &= pass;
        println!(
            "criterion {id} [{}] {name}: {} ({secs:.2}s)",
            if pass { "PASS" } else { "FAIL" },
            if timely { o.detail.clone() } else { format!("{} / over time budget", o.detail) }
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use proptest::prelude::*;

use hankel_schmidt::exec::Execution;
use hankel_schmidt::fourier::{multiply, FourierVec, MatrixSeries};
use hankel_schmidt::linalg::{c, CMat, C64, ZERO};
use hankel_schmidt::spectral::{max_angle, SubspaceBasis};
use hankel_schmidt::symbol_file::SymbolSpec;
use hankel_schmidt::symbols::MatrixSymbol;
use hankel_schmidt::verify::{Analysis, AnalysisConfig, CheckSet};

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| c(re, im))
}

/// Symmetric blocks for `m` in `1..=3`, degree in `1..=3`.
fn symbol() -> impl Strategy<Value = MatrixSymbol> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, d)| {
        prop::collection::vec(prop::collection::vec(complex(), m * m), d + 1).prop_map(move |raw| {
            let blocks = raw
                .into_iter()
                .map(|v| {
                    let a = CMat::from_vec(m, m, v);
                    (&a + a.transpose()).scale(0.5)
                })
                .collect();
            MatrixSymbol::from_blocks(m, blocks, 0.0).unwrap()
        })
    })
}

fn series(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), 1..=len)
}

fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn schmidt_values(a: &Analysis) -> Vec<(f64, usize)> {
    a.clusters().iter().map(|c| (c.s, c.multiplicity)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_matches_direct_convolution(a in series(9), b in series(9)) {
        let fa = FourierVec::from_components(std::slice::from_ref(&a));
        let fb = FourierVec::from_components(std::slice::from_ref(&b));
        let got = multiply(&MatrixSeries::scalar(&fa), &fb).unwrap();
        for (k, want) in convolve(&a, &b).into_iter().enumerate() {
            prop_assert!((got.get(k as i64, 0) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_round_trip(a in series(12)) {
        let f = FourierVec::from_components(&[a]);
        let back = f.to_grid(32).unwrap().to_fourier(0, f.pos()).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn identities_hold(u in symbol()) {
        let a = Analysis::new(&u, &AnalysisConfig::default()).unwrap();
        let checks = a.identity_checks(&CheckSet::parse("identities,rank-m").unwrap()).unwrap();
        for ch in checks {
            prop_assert!(ch.pass, "{} {:e}", ch.name, ch.residual);
        }
    }

    #[test]
    fn dimensions_add_up(u in symbol()) {
        let a = Analysis::new(&u, &AnalysisConfig::default()).unwrap();
        let total: usize = a.clusters().iter().map(|c| c.multiplicity).sum::<usize>() + a.kernel_dim();
        prop_assert_eq!(total, u.m() * (a.window() + 1));
        for w in a.clusters().windows(2) {
            prop_assert!(w[0].s > w[1].s);
        }
    }

    #[test]
    fn scaling_scales_schmidt_values(u in symbol(), k in 0.25..4.0f64, phase in 0.0..std::f64::consts::TAU) {
        let z = c(k * phase.cos(), k * phase.sin());
        let v = MatrixSymbol::from_blocks(u.m(), u.blocks().iter().map(|b| b * z).collect(), 0.0).unwrap();
        let a = Analysis::new(&u, &AnalysisConfig::default());
        let b = Analysis::new(&v, &AnalysisConfig::default());
        if let (Ok(a), Ok(b)) = (a, b) {
            let (sa, sb) = (schmidt_values(&a), schmidt_values(&b));
            prop_assume!(sa.len() == sb.len());
            for ((x, ma), (y, mb)) in sa.iter().zip(&sb) {
                prop_assert_eq!(ma, mb);
                prop_assert!((x * k - y).abs() <= 1e-9 * y.max(1.0));
            }
        }
    }

    #[test]
    fn structure_checks_pass_on_random_symbols(u in symbol()) {
        let a = Analysis::new(&u, &AnalysisConfig::default()).unwrap();
        let out = a.verify(&CheckSet::parse("intersections,near").unwrap()).unwrap();
        for cl in &out.clusters {
            prop_assert!(cl.structure.p <= u.m());
            for ch in &cl.structure.checks {
                prop_assert!(ch.pass, "s={} {} {:e}", cl.s, ch.name, ch.residual);
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree(u in symbol()) {
        let run = |execution| {
            let cfg = AnalysisConfig { execution, ..AnalysisConfig::default() };
            let a = Analysis::new(&u, &cfg).unwrap();
            serde_json::to_string(&a.verify(&CheckSet::all()).unwrap()).unwrap()
        };
        prop_assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn principal_angles_ignore_basis_choice(raw in prop::collection::vec(complex(), 12), mix in prop::collection::vec(complex(), 4)) {
        let a = CMat::from_vec(6, 2, raw);
        prop_assume!(a.clone().svd(false, false).singular_values.min() > 1e-3);
        let g = CMat::from_vec(2, 2, mix);
        prop_assume!(g.determinant().norm() > 1e-3);
        let x = SubspaceBasis::span(1, &a, 1e-12);
        let y = SubspaceBasis::span(1, &(&a * g), 1e-12);
        prop_assert!(max_angle(&x, &y).unwrap() < 1e-7);
        prop_assert!((max_angle(&x, &y).unwrap() - max_angle(&y, &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn spec_round_trip_is_exact(m in 1usize..=3, raw in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..=18)) {
        let blocks: Vec<(usize, CMat)> = raw
            .chunks(2 * m * m)
            .enumerate()
            .filter(|(_, ch)| ch.len() == 2 * m * m)
            .map(|(n, ch)| (n, CMat::from_fn(m, m, |i, j| c(ch[2 * (i * m + j)], ch[2 * (i * m + j) + 1]))))
            .collect();
        let spec = SymbolSpec::from_poly(m, &blocks);
        let text = spec.emit();
        let back = SymbolSpec::parse(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.emit(), text);
    }
}

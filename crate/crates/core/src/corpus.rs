//! Seeded corpora of symmetric polynomial symbols.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, CMat, ZERO};
use crate::symbols::MatrixSymbol;

fn gaussian(rng: &mut ChaCha8Rng) -> crate::linalg::C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// `(A + A^T) / 2` for a complex Gaussian `A`.
fn symmetric_gaussian(rng: &mut ChaCha8Rng, m: usize) -> CMat {
    let a = CMat::from_fn(m, m, |_, _| gaussian(rng));
    (&a + a.transpose()).scale(0.5)
}

/// `count` symbols with `m` in `1..=3` and degree in `1..=4`, each block a
/// symmetrized complex Gaussian. The top block is never zero.
pub fn random_corpus(count: usize, seed: u64) -> Vec<MatrixSymbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(1..=3);
            let d = rng.random_range(1..=4);
            let blocks = (0..=d).map(|_| symmetric_gaussian(&mut rng, m)).collect();
            MatrixSymbol::from_blocks(m, blocks, 0.0).expect("random blocks are well formed")
        })
        .collect()
}

/// Random real orthogonal `m x m` (QR of a Gaussian matrix, signs fixed).
fn random_orthogonal(rng: &mut ChaCha8Rng, m: usize) -> CMat {
    let a = nalgebra::DMatrix::<f64>::from_fn(m, m, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q.map(|x| c(x, 0.0))
}

/// Symbols `Q diag(c_i z^{n_i}) Q^T` with `Q` real orthogonal, `|c_i| = 1`
/// and `n_i` in `1..=4`. Their Schmidt values are all 1, with
/// `E = Q (K_{z^{n_i + 1}} e_i)` known in closed form.
pub fn structured_corpus(count: usize, seed: u64) -> Vec<StructuredSymbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(1..=3);
            let q = random_orthogonal(&mut rng, m);
            let degrees: Vec<usize> = (0..m).map(|_| rng.random_range(1..=4)).collect();
            let phases: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            let d = *degrees.iter().max().unwrap();
            let blocks = (0..=d)
                .map(|k| {
                    let mut diag = CMat::from_element(m, m, ZERO);
                    for i in 0..m {
                        if degrees[i] == k {
                            diag[(i, i)] = c(phases[i].cos(), phases[i].sin());
                        }
                    }
                    &q * diag * q.transpose()
                })
                .collect();
            StructuredSymbol {
                symbol: MatrixSymbol::from_blocks(m, blocks, 0.0).expect("structured blocks are well formed"),
                q,
                degrees,
            }
        })
        .collect()
}

/// A structured corpus entry with its diagonalizing data.
#[derive(Debug, Clone)]
pub struct StructuredSymbol {
    pub symbol: MatrixSymbol,
    pub q: CMat,
    pub degrees: Vec<usize>,
}

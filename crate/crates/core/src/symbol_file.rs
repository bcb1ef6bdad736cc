//! JSON symbol specification files.
//!
//! ```json
//! {"m": 2, "kind": "poly",
//!  "blocks": [{"n": 1, "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}]}
//! ```
//!
//! Complex numbers are `[re, im]` pairs. `parse -> emit -> parse` is the
//! identity, bit for bit, because floats are written in shortest round-trip
//! form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use crate::symbols::{
    antidiagonal_pattern, blaschke_scalar, diagonal_pattern, inner_from_zeros, poly_symbol,
    sum_difference_symbol, MatrixSymbol,
};

/// Coefficient degree used for Blaschke data when the file gives none.
pub const DEFAULT_EXPANSION: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolKind {
    #[serde(rename = "poly")]
    Poly,
    /// A scalar Blaschke product times the identity.
    #[serde(rename = "blaschke_matrix")]
    BlaschkeMatrix,
    /// `diag(phi, phi)`.
    #[serde(rename = "example-3.6A")]
    DiagonalPair,
    /// `[[0, phi], [phi, 0]]`.
    #[serde(rename = "example-3.6B")]
    AntidiagonalPair,
    /// `[[phi + psi, phi - psi], [phi - psi, phi + psi]]`.
    #[serde(rename = "example-4.6")]
    SumDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub m: usize,
    pub kind: SymbolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<BlockSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_zeros: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_zeros: Option<Vec<[f64; 2]>>,
    /// Coefficient degree kept from series (Blaschke) data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

/// Byte offset of a 1-based `(line, column)` position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn complex(p: &[f64; 2]) -> C64 {
    c(p[0], p[1])
}

fn zeros_of(field: &Option<Vec<[f64; 2]>>, default: usize) -> Vec<C64> {
    match field {
        Some(z) if !z.is_empty() => z.iter().map(complex).collect(),
        _ => vec![c(0.0, 0.0); default],
    }
}

impl SymbolSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let offset = byte_offset(text, e.line(), e.column());
            Error::Spec(format!(
                "JSON error at byte offset {offset} (line {}, column {}): {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Polynomial spec from dense blocks.
    pub fn from_poly(m: usize, blocks: &[(usize, CMat)]) -> Self {
        let blocks = blocks
            .iter()
            .map(|(n, b)| BlockSpec {
                n: *n,
                matrix: (0..b.nrows())
                    .map(|i| (0..b.ncols()).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect())
                    .collect(),
            })
            .collect();
        Self {
            m,
            kind: SymbolKind::Poly,
            blocks: Some(blocks),
            zeros: None,
            phi_zeros: None,
            psi_zeros: None,
            truncation: None,
        }
    }

    fn expansion(&self) -> Result<usize> {
        match self.truncation {
            Some(0) => Err(Error::Spec("truncation must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(DEFAULT_EXPANSION),
        }
    }

    fn require_m(&self, m: usize) -> Result<()> {
        if self.m != m {
            return Err(Error::Spec(format!(
                "kind {:?} has m = {m}, file says m = {}",
                self.kind, self.m
            )));
        }
        Ok(())
    }

    /// Builds the symbol. Unspecified example parameters default to
    /// `phi = z^2` and `psi = z^3`.
    pub fn build(&self) -> Result<MatrixSymbol> {
        if self.m == 0 {
            return Err(Error::Spec("m must be positive".into()));
        }
        let wrap = |e: Error| match e {
            Error::ZeroOnCircle { .. } | Error::Spec(_) => e,
            other => Error::Spec(other.to_string()),
        };
        match self.kind {
            SymbolKind::Poly => {
                let specs = self
                    .blocks
                    .as_ref()
                    .ok_or_else(|| Error::Spec("kind poly needs \"blocks\"".into()))?;
                let mut blocks = Vec::with_capacity(specs.len());
                for b in specs {
                    if b.matrix.len() != self.m || b.matrix.iter().any(|r| r.len() != self.m) {
                        return Err(Error::Spec(format!(
                            "block n = {} is not {m} x {m}",
                            b.n,
                            m = self.m
                        )));
                    }
                    let mat = CMat::from_fn(self.m, self.m, |i, j| complex(&b.matrix[i][j]));
                    blocks.push((b.n, mat));
                }
                if let Some(t) = self.truncation {
                    let d = specs.iter().map(|b| b.n).max().unwrap_or(0);
                    if t < d {
                        return Err(Error::Spec(format!("truncation {t} is below the block degree {d}")));
                    }
                }
                poly_symbol(self.m, &blocks).map_err(wrap)
            }
            SymbolKind::BlaschkeMatrix => {
                let zeros = zeros_of(&self.zeros, 0);
                if zeros.is_empty() {
                    return Err(Error::Spec("kind blaschke_matrix needs \"zeros\"".into()));
                }
                let (coeffs, tail) = blaschke_scalar(&zeros, self.expansion()?).map_err(wrap)?;
                MatrixSymbol::scalar_times(&coeffs, &CMat::identity(self.m, self.m), tail).map_err(wrap)
            }
            SymbolKind::DiagonalPair | SymbolKind::AntidiagonalPair => {
                self.require_m(2)?;
                let field = if self.phi_zeros.is_some() {
                    &self.phi_zeros
                } else {
                    &self.zeros
                };
                let zeros = zeros_of(field, 2);
                let (phi, tail) = inner_from_zeros(&zeros, self.expansion()?).map_err(wrap)?;
                let pattern = if self.kind == SymbolKind::DiagonalPair {
                    diagonal_pattern()
                } else {
                    antidiagonal_pattern()
                };
                MatrixSymbol::scalar_times(&phi, &pattern, tail).map_err(wrap)
            }
            SymbolKind::SumDifference => {
                self.require_m(2)?;
                let n = self.expansion()?;
                let (phi, phi_tail) = inner_from_zeros(&zeros_of(&self.phi_zeros, 2), n).map_err(wrap)?;
                let (psi, psi_tail) = inner_from_zeros(&zeros_of(&self.psi_zeros, 3), n).map_err(wrap)?;
                sum_difference_symbol(&phi, phi_tail, &psi, psi_tail).map_err(wrap)
            }
        }
    }
}

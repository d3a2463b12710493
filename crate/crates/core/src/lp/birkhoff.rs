//! Doubly stochastic maps on populations and their decomposition into
//! permutations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::PermutationMap;

/// Largest matrix accepted by [`birkhoff_decompose`].
pub const MAX_BIRKHOFF_DIM: usize = 64;

const SUM_TOL: f64 = 1e-10;
const DUST: f64 = 1e-14;

/// Row-major `n x n`; entry `(y, x)` is the weight moved from `x` to `y`, so
/// a permutation has ones at `(image[x], x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BistochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl BistochasticMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n || n == 0 {
            return Err(Error::NotBistochastic(format!("{} entries for n = {n}", entries.len())));
        }
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotBistochastic("negative or non-finite entry".into()));
        }
        for i in 0..n {
            let row: f64 = entries[i * n..(i + 1) * n].iter().sum();
            let col: f64 = (0..n).map(|r| entries[r * n + i]).sum();
            if (row - 1.0).abs() > SUM_TOL || (col - 1.0).abs() > SUM_TOL {
                return Err(Error::NotBistochastic(format!(
                    "line {i} sums to ({row}, {col})"
                )));
            }
        }
        Ok(BistochasticMatrix { n, entries })
    }

    /// Convex combination `Σ w_i Π_i`; weights are normalized.
    pub fn from_mixture(terms: &[(f64, PermutationMap)]) -> Result<Self> {
        let n = terms.first().map(|t| t.1.len()).unwrap_or(0);
        let total: f64 = terms.iter().map(|t| t.0).sum();
        if n == 0 || !(total > 0.0) || terms.iter().any(|t| t.0 < 0.0 || t.1.len() != n) {
            return Err(Error::NotBistochastic("bad mixture".into()));
        }
        let mut entries = vec![0.0; n * n];
        for (w, p) in terms {
            for (x, &y) in p.image().iter().enumerate() {
                entries[y * n + x] += w / total;
            }
        }
        BistochasticMatrix::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        BistochasticMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `B p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|y| (0..self.n).map(|x| self.get(y, x) * p[x]).sum())
            .collect()
    }

    /// Largest entrywise gap to `Σ w_i Π_i`.
    pub fn reconstruction_error(&self, terms: &[(f64, PermutationMap)]) -> f64 {
        let mut acc = self.entries.clone();
        for (w, p) in terms {
            for (x, &y) in p.image().iter().enumerate() {
                acc[y * self.n + x] -= w;
            }
        }
        acc.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Perfect matching rows↔columns on entries above `DUST`, by augmenting
/// paths. Returns `row_of[col]`.
fn perfect_matching(n: usize, support: &[bool]) -> Option<Vec<usize>> {
    fn augment(
        col: usize,
        n: usize,
        support: &[bool],
        seen: &mut [bool],
        col_of: &mut [Option<usize>],
    ) -> bool {
        for row in 0..n {
            if !support[row * n + col] || seen[row] {
                continue;
            }
            seen[row] = true;
            if col_of[row].is_none_or(|c| augment(c, n, support, seen, col_of)) {
                col_of[row] = Some(col);
                return true;
            }
        }
        false
    }
    let mut col_of = vec![None; n];
    for col in 0..n {
        let mut seen = vec![false; n];
        if !augment(col, n, support, &mut seen, &mut col_of) {
            return None;
        }
    }
    let mut row_of = vec![0; n];
    for (row, c) in col_of.iter().enumerate() {
        row_of[c.expect("matching is perfect")] = row;
    }
    Some(row_of)
}

pub fn birkhoff_decompose(b: &BistochasticMatrix) -> Result<Vec<(f64, PermutationMap)>> {
    let n = b.dim();
    if n > MAX_BIRKHOFF_DIM {
        return Err(Error::NotBistochastic(format!("n = {n} exceeds {MAX_BIRKHOFF_DIM}")));
    }
    let mut rest = b.entries().to_vec();
    let mut remaining = 1.0;
    let mut terms = Vec::new();
    let limit = (n - 1) * (n - 1) + 1;
    while remaining > 1e-12 && terms.len() < limit {
        let support: Vec<bool> = rest.iter().map(|v| *v > DUST).collect();
        let Some(row_of) = perfect_matching(n, &support) else {
            break;
        };
        let w = (0..n).map(|x| rest[row_of[x] * n + x]).fold(f64::INFINITY, f64::min);
        for x in 0..n {
            let v = &mut rest[row_of[x] * n + x];
            *v -= w;
            if *v < DUST {
                *v = 0.0;
            }
        }
        remaining -= w;
        terms.push((w, PermutationMap::new(row_of)?));
    }
    if remaining > 1e-10 {
        return Err(Error::NoPerfectMatching);
    }
    Ok(terms)
}

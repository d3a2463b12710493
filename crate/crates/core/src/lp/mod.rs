//! Upper bound on catalytic work: the stroke is relaxed from unitaries to
//! bistochastic maps, written as mixtures of permutations whose catalyst
//! marginal matches the initial one.

mod birkhoff;
pub mod simplex;

pub use birkhoff::{birkhoff_decompose, BistochasticMatrix, MAX_BIRKHOFF_DIM};

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalysis::{build_simple_perm, SimplePermSpec};
use crate::error::{Error, Result};
use crate::perm::{enumerate_permutations, PermutationMap};
use crate::thermo::{PopulationVector, Spectrum};
use simplex::SimplexOutcome;

/// Largest total dimension solved over all permutations.
pub const MAX_EXACT_DIM: usize = 8;

pub const RESTRICTED_NOTE: &str = "restricted-column (not a valid upper bound)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    GuardExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Alpha {
    pub image: PermutationMap,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dual {
    pub y: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|y + Σ a_k x_k - value|`.
    pub duality_gap: f64,
    /// `max_m (w_m - Σ a_m,k x_k - y)`, clipped at 0.
    pub dual_violation: f64,
    /// Worst deviation of the mixture from the catalyst marginal and unit mass.
    pub primal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub value: f64,
    pub status: LpStatus,
    pub alphas: Vec<Alpha>,
    pub dual: Dual,
    pub residuals: Residuals,
    /// Set when the optimum is a single permutation, hence a unitary stroke.
    pub achievable_by_unitary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub basis: Vec<usize>,
}

/// One column per class of permutations sharing `(w, a)`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub shape: (usize, usize, usize),
    pub initial: Vec<f64>,
    pub columns: Vec<PermutationMap>,
    pub work: Vec<f64>,
    /// Catalyst block masses after each column, blocks `0..d_s-1`.
    pub marginals: Vec<Vec<f64>>,
    /// Initial block masses, blocks `0..d_s-1`.
    pub target: Vec<f64>,
    pub restricted: bool,
}

fn signature_key(w: f64, a: &[f64]) -> Vec<i64> {
    std::iter::once(w)
        .chain(a.iter().copied())
        .map(|v| (v * 1e12).round() as i64)
        .collect()
}

impl LpProblem {
    pub fn build(h: &Spectrum, initial: &PopulationVector, catalyst_dim: usize) -> Result<Self> {
        let shape = initial.shape();
        if shape.0 != catalyst_dim {
            return Err(Error::ShapeMismatch(format!(
                "catalyst_dim {catalyst_dim} vs state shape {shape:?}"
            )));
        }
        let n = initial.len();
        if h.dim() != n {
            return Err(Error::ShapeMismatch(format!("{}-level H on {n} populations", h.dim())));
        }
        let restricted = n > MAX_EXACT_DIM;
        let candidates: Vec<PermutationMap> = if restricted {
            let mut c = vec![PermutationMap::identity(n)];
            if (shape.1, shape.2) == (2, 2) {
                for k in 1..=shape.0 {
                    c.push(build_simple_perm(SimplePermSpec::new(shape.0 - k, k)?)?);
                }
            }
            c
        } else {
            enumerate_permutations(n)?.collect()
        };
        let inner = shape.1 * shape.2;
        let rho = initial.probs();
        let e = h.levels();
        let d_s = shape.0;
        let mut classes: BTreeMap<Vec<i64>, (PermutationMap, f64, Vec<f64>)> = candidates
            .into_par_iter()
            .map(|perm| {
                let mut w = 0.0;
                let mut a = vec![0.0; d_s];
                for (x, &y) in perm.image().iter().enumerate() {
                    w += rho[x] * (e[x] - e[y]);
                    a[y / inner] += rho[x];
                }
                a.truncate(d_s - 1);
                (signature_key(w, &a), (perm, w, a))
            })
            .fold(BTreeMap::new, |mut acc, (k, v)| {
                keep_smallest(&mut acc, k, v);
                acc
            })
            .reduce(BTreeMap::new, |mut acc, other| {
                for (k, v) in other {
                    keep_smallest(&mut acc, k, v);
                }
                acc
            });
        let mut target = initial.catalyst_marginal();
        target.truncate(d_s - 1);
        let mut columns = Vec::with_capacity(classes.len());
        let mut work = Vec::with_capacity(classes.len());
        let mut marginals = Vec::with_capacity(classes.len());
        for (_, (p, w, a)) in std::mem::take(&mut classes) {
            columns.push(p);
            work.push(w);
            marginals.push(a);
        }
        Ok(LpProblem {
            shape,
            initial: rho.to_vec(),
            columns,
            work,
            marginals,
            target,
            restricted,
        })
    }

    fn constraint_column(&self, j: usize) -> Vec<f64> {
        std::iter::once(1.0).chain(self.marginals[j].iter().copied()).collect()
    }

    fn rhs(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.target.iter().copied()).collect()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let cols: Vec<Vec<f64>> = (0..self.columns.len()).map(|j| self.constraint_column(j)).collect();
        let outcome = simplex::solve(&cols, &self.rhs(), &self.work)?;
        let d = self.target.len();
        let sol = match outcome {
            SimplexOutcome::Optimal(s) => s,
            SimplexOutcome::Infeasible => {
                return Ok(LpSolution {
                    value: f64::NAN,
                    status: LpStatus::Infeasible,
                    alphas: Vec::new(),
                    dual: Dual { y: 0.0, x: vec![0.0; d] },
                    residuals: Residuals {
                        duality_gap: f64::NAN,
                        dual_violation: f64::NAN,
                        primal: f64::NAN,
                    },
                    achievable_by_unitary: false,
                    note: None,
                    basis: Vec::new(),
                })
            }
            SimplexOutcome::Unbounded => return Err(Error::Lp("unbounded".into())),
        };
        let alphas: Vec<Alpha> = sol
            .x
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 1e-15)
            .map(|(j, w)| Alpha {
                image: self.columns[j].clone(),
                weight: *w,
            })
            .collect();
        let dual = Dual {
            y: sol.duals[0],
            x: sol.duals[1..].to_vec(),
        };
        let mut out = LpSolution {
            value: sol.value,
            status: if self.restricted {
                LpStatus::GuardExceeded
            } else {
                LpStatus::Optimal
            },
            achievable_by_unitary: alphas.len() == 1,
            alphas,
            dual,
            residuals: Residuals {
                duality_gap: 0.0,
                dual_violation: 0.0,
                primal: 0.0,
            },
            note: self.restricted.then(|| RESTRICTED_NOTE.to_string()),
            basis: sol.basis.iter().flatten().copied().collect(),
        };
        out.residuals = self.residuals(&out, &sol.x);
        Ok(out)
    }

    fn residuals(&self, sol: &LpSolution, x: &[f64]) -> Residuals {
        let dual_obj = sol.dual.y
            + self.target.iter().zip(&sol.dual.x).map(|(a, b)| a * b).sum::<f64>();
        let mut primal = (x.iter().sum::<f64>() - 1.0).abs();
        for k in 0..self.target.len() {
            let got: f64 = x.iter().zip(&self.marginals).map(|(w, a)| w * a[k]).sum();
            primal = primal.max((got - self.target[k]).abs());
        }
        Residuals {
            duality_gap: (dual_obj - sol.value).abs(),
            dual_violation: self.max_dual_violation(sol.dual.y, &sol.dual.x).max(0.0),
            primal,
        }
    }

    fn max_dual_violation(&self, y: f64, x: &[f64]) -> f64 {
        self.work
            .iter()
            .zip(&self.marginals)
            .map(|(w, a)| w - a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - y)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest dual objective with the given `x`: `y` is pushed up to the
    /// tightest feasible value.
    pub fn dual_objective_at(&self, x: &[f64]) -> f64 {
        let y = self
            .work
            .iter()
            .zip(&self.marginals)
            .map(|(w, a)| w - a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        y + self.target.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Weights of the vertex spanned by `basis`: solves
    /// `[1; a_m] α = [1; a]` over the chosen columns.
    pub fn vertex_weights(&self, basis: &[usize]) -> Result<Vec<f64>> {
        let k = self.target.len() + 1;
        if basis.len() != k {
            return Err(Error::Lp(format!("vertex needs {k} columns, got {}", basis.len())));
        }
        let mut a = DMatrix::<f64>::zeros(k, k);
        for (c, &j) in basis.iter().enumerate() {
            for (r, v) in self.constraint_column(j).into_iter().enumerate() {
                a[(r, c)] = v;
            }
        }
        let rhs = DVector::from_vec(self.rhs());
        let alpha = a.lu().solve(&rhs).ok_or(Error::Singular)?;
        Ok(alpha.iter().copied().collect())
    }

    /// Final populations `Σ α_m Π_m ρ` of a solution.
    pub fn mixed_final(&self, sol: &LpSolution) -> Result<PopulationVector> {
        let mut out = vec![0.0; self.initial.len()];
        for a in &sol.alphas {
            for (v, t) in out.iter_mut().zip(a.image.apply_slice(&self.initial)) {
                *v += a.weight * t;
            }
        }
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= s);
        PopulationVector::new(out, self.shape)
    }
}

fn keep_smallest(
    acc: &mut BTreeMap<Vec<i64>, (PermutationMap, f64, Vec<f64>)>,
    key: Vec<i64>,
    value: (PermutationMap, f64, Vec<f64>),
) {
    match acc.get(&key) {
        Some(old) if old.0 <= value.0 => {}
        _ => {
            acc.insert(key, value);
        }
    }
}

pub fn lp_work_upper_bound(
    h: &Spectrum,
    initial: &PopulationVector,
    catalyst_dim: usize,
) -> Result<LpSolution> {
    LpProblem::build(h, initial, catalyst_dim)?.solve()
}

/// Worst of the duality gap and the dual constraint violation.
pub fn lp_dual_check(sol: &LpSolution, problem: &LpProblem) -> f64 {
    let r = problem.residuals(
        sol,
        &problem
            .columns
            .iter()
            .map(|c| {
                sol.alphas
                    .iter()
                    .find(|a| &a.image == c)
                    .map_or(0.0, |a| a.weight)
            })
            .collect::<Vec<_>>(),
    );
    r.duality_gap.max(r.dual_violation)
}

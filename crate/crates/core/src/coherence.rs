//! Coherent catalyst states: dephasing, and the check that rotating the
//! catalyst into its eigenbasis leaves every heat and the work unchanged.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::catalysis::stationary_catalyst;
use crate::error::{Error, Result};
use crate::perm::PermutationMap;
use crate::thermo::{gibbs_populations, InverseTemperaturePair, Spectrum};

const UNITARY_TOL: f64 = 1e-10;
const EQUALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix(DMatrix<Complex64>);

impl ComplexSquareMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!("{}x{} matrix", m.nrows(), m.ncols())));
        }
        Ok(ComplexSquareMatrix(m))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        ComplexSquareMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn permutation(p: &PermutationMap) -> Self {
        let n = p.len();
        let mut m = DMatrix::zeros(n, n);
        for (x, &y) in p.image().iter().enumerate() {
            m[(y, x)] = Complex64::new(1.0, 0.0);
        }
        ComplexSquareMatrix(m)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        ComplexSquareMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        ComplexSquareMatrix(&self.0 * &other.0)
    }

    pub fn kron(&self, other: &Self) -> Self {
        ComplexSquareMatrix(self.0.kronecker(&other.0))
    }

    pub fn identity(n: usize) -> Self {
        ComplexSquareMatrix(DMatrix::identity(n, n))
    }

    /// `max |(M M† - 1)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        (&self.0 * self.0.adjoint() - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn check_unitary(&self) -> Result<()> {
        let dev = self.unitarity_defect();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn check_density(&self) -> Result<()> {
        let herm = (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::NotDensity(format!("not Hermitian ({herm:e})")));
        }
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let low = hermitian_eigen(&self.0)
            .0
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if low < -1e-10 {
            return Err(Error::NotDensity(format!("eigenvalue {low:e}")));
        }
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    /// Trace over the last factor of dimension `inner`.
    pub fn partial_trace_tail(&self, inner: usize) -> Self {
        let outer = self.dim() / inner;
        ComplexSquareMatrix(DMatrix::from_fn(outer, outer, |i, j| {
            (0..inner)
                .map(|r| self.0[(i * inner + r, j * inner + r)])
                .sum()
        }))
    }
}

/// Eigenvalues in descending order with matching eigenvector columns.
fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn dephase(rho: &ComplexSquareMatrix, h: &Spectrum) -> Result<ComplexSquareMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::ShapeMismatch(format!("{}-level H on {}x{} state", h.dim(), rho.dim(), rho.dim())));
    }
    let e = h.levels();
    let m = DMatrix::from_fn(rho.dim(), rho.dim(), |i, j| {
        if (e[i] - e[j]).abs() <= 1e-12 {
            rho.0[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(ComplexSquareMatrix(m))
}

/// Heats of the stroke `U (rho_s ⊗ tau_h ⊗ tau_c) U†`, with the catalyst
/// marginal drift `max |Tr_hc(final) - rho_s|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentStroke {
    pub heat_hot: f64,
    pub heat_cold: f64,
    pub work: f64,
    pub catalyst_drift: f64,
}

impl CoherentStroke {
    pub fn efficiency(&self) -> Option<f64> {
        (self.heat_hot.abs() > 1e-12).then(|| 1.0 + self.heat_cold / self.heat_hot)
    }
}

fn thermal_factor(h_hot: &Spectrum, h_cold: &Spectrum, beta: InverseTemperaturePair) -> Result<ComplexSquareMatrix> {
    let hot = gibbs_populations(h_hot, beta.beta_h())?;
    let cold = gibbs_populations(h_cold, beta.beta_c())?;
    let mut d = Vec::with_capacity(hot.len() * cold.len());
    for h in &hot {
        for c in &cold {
            d.push(h * c);
        }
    }
    Ok(ComplexSquareMatrix::from_real_diagonal(&d))
}

pub fn coherent_stroke(
    rho_s: &ComplexSquareMatrix,
    u: &ComplexSquareMatrix,
    h_hot: &Spectrum,
    h_cold: &Spectrum,
    beta: InverseTemperaturePair,
) -> Result<CoherentStroke> {
    let inner = h_hot.dim() * h_cold.dim();
    if u.dim() != rho_s.dim() * inner {
        return Err(Error::ShapeMismatch(format!(
            "{}-dim stroke on {}x{} body",
            u.dim(),
            rho_s.dim(),
            inner
        )));
    }
    let initial = rho_s.kron(&thermal_factor(h_hot, h_cold, beta)?);
    let fin = u.mul(&initial).mul(&u.adjoint());
    let (pi, pf) = (initial.diagonal(), fin.diagonal());
    let (mut qh, mut qc) = (0.0, 0.0);
    for x in 0..pi.len() {
        let r = x % inner;
        let (j, k) = (r / h_cold.dim(), r % h_cold.dim());
        qh += (pi[x] - pf[x]) * h_hot.levels()[j];
        qc += (pi[x] - pf[x]) * h_cold.levels()[k];
    }
    let drift = (fin.partial_trace_tail(inner).0 - &rho_s.0)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(CoherentStroke {
        heat_hot: qh,
        heat_cold: qc,
        work: qh + qc,
        catalyst_drift: drift,
    })
}

/// Original and eigenbasis-rotated engines side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceComparison {
    pub original: CoherentStroke,
    pub constructed: CoherentStroke,
    /// Populations of the dephased catalyst, descending.
    pub catalyst_populations: Vec<f64>,
}

impl CoherenceComparison {
    pub fn heat_gap(&self) -> f64 {
        (self.original.heat_hot - self.constructed.heat_hot)
            .abs()
            .max((self.original.heat_cold - self.constructed.heat_cold).abs())
    }

    pub fn work_gap(&self) -> f64 {
        (self.original.work - self.constructed.work).abs()
    }
}

/// Replaces `rho_s` by its eigenvalues and `U` by `(K†⊗1) U (K⊗1)`, where
/// `K` diagonalizes `rho_s`, and checks that heats and cyclicity carry over.
pub fn decohere_catalyst_construction(
    rho_s: &ComplexSquareMatrix,
    u: &ComplexSquareMatrix,
    h_hot: &Spectrum,
    h_cold: &Spectrum,
    beta: InverseTemperaturePair,
) -> Result<CoherenceComparison> {
    rho_s.check_density()?;
    u.check_unitary()?;
    let inner = h_hot.dim() * h_cold.dim();
    let (values, k) = hermitian_eigen(&rho_s.0);
    let k = ComplexSquareMatrix(k);
    let lift = k.kron(&ComplexSquareMatrix::identity(inner));
    let u_tilde = lift.adjoint().mul(u).mul(&lift);
    let rho_tilde = ComplexSquareMatrix::from_real_diagonal(&values);

    let original = coherent_stroke(rho_s, u, h_hot, h_cold, beta)?;
    let constructed = coherent_stroke(&rho_tilde, &u_tilde, h_hot, h_cold, beta)?;
    let out = CoherenceComparison {
        original,
        constructed,
        catalyst_populations: values,
    };
    if out.heat_gap() > EQUALITY_TOL {
        return Err(Error::Inconsistent(out.heat_gap()));
    }
    if original.catalyst_drift <= EQUALITY_TOL && constructed.catalyst_drift > EQUALITY_TOL {
        return Err(Error::CyclicityViolated(constructed.catalyst_drift));
    }
    Ok(out)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix with the phases of `R` divided out.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexSquareMatrix {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ComplexSquareMatrix(q * phases)
}

/// `Σ_i |i><i| ⊗ W_i` with independent Haar blocks.
pub fn block_unitary<R: Rng>(blocks: usize, inner: usize, rng: &mut R) -> ComplexSquareMatrix {
    let n = blocks * inner;
    let mut m = DMatrix::zeros(n, n);
    for b in 0..blocks {
        let w = haar_unitary(inner, rng);
        m.view_mut((b * inner, b * inner), (inner, inner)).copy_from(&w.0);
    }
    ComplexSquareMatrix(m)
}

/// One random catalyst-preserving engine with a coherent catalyst: a random
/// permutation fixes a stationary diagonal catalyst, hot/cold unitaries are
/// applied per catalyst level, and everything is conjugated by a random
/// catalyst rotation.
pub struct CoherentInstance {
    pub rho_s: ComplexSquareMatrix,
    pub u: ComplexSquareMatrix,
    pub h_hot: Spectrum,
    pub h_cold: Spectrum,
    pub beta: InverseTemperaturePair,
}

pub fn random_instance<R: Rng>(d_s: usize, d_h: usize, d_c: usize, rng: &mut R) -> Result<CoherentInstance> {
    let spectrum = |d: usize, rng: &mut R| {
        let mut levels = vec![0.0];
        let mut e = 0.0;
        for _ in 1..d {
            e += rng.random_range(0.2..2.0);
            levels.push(e);
        }
        Spectrum::new(levels)
    };
    let h_hot = spectrum(d_h, rng)?;
    let h_cold = spectrum(d_c, rng)?;
    let beta_h = rng.random_range(0.1..1.5);
    let beta = InverseTemperaturePair::new(beta_h, beta_h + rng.random_range(0.2..3.0))?;
    let inner = d_h * d_c;
    let n = d_s * inner;
    let mut image: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        image.swap(i, rng.random_range(0..=i));
    }
    let perm = PermutationMap::new(image)?;
    let hot = gibbs_populations(&h_hot, beta.beta_h())?;
    let cold = gibbs_populations(&h_cold, beta.beta_c())?;
    let p = stationary_catalyst(&perm, d_s, &hot, &cold)?;
    let k = haar_unitary(d_s, rng);
    let lift = k.kron(&ComplexSquareMatrix::identity(inner));
    let rho_s = k.mul(&ComplexSquareMatrix::from_real_diagonal(&p)).mul(&k.adjoint());
    // re-symmetrize to wash out rounding in the product
    let rho_s = ComplexSquareMatrix((&rho_s.0 + rho_s.0.adjoint()) * Complex64::new(0.5, 0.0));
    let u = lift
        .mul(&block_unitary(d_s, inner, rng))
        .mul(&ComplexSquareMatrix::permutation(&perm))
        .mul(&lift.adjoint());
    Ok(CoherentInstance {
        rho_s,
        u,
        h_hot,
        h_cold,
        beta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceSuiteReport {
    pub seed: u64,
    pub instances: usize,
    pub failures: usize,
    pub max_heat_gap: f64,
    pub max_work_gap: f64,
    pub max_efficiency_gap: f64,
    pub max_catalyst_drift: f64,
}

/// Catalyst and hot/cold dimensions cycled through by the suite.
pub const SUITE_SHAPES: [(usize, usize, usize); 4] = [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)];

pub fn coherence_suite(seed: u64, instances: usize) -> Result<CoherenceSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CoherenceSuiteReport {
        seed,
        instances,
        failures: 0,
        max_heat_gap: 0.0,
        max_work_gap: 0.0,
        max_efficiency_gap: 0.0,
        max_catalyst_drift: 0.0,
    };
    for i in 0..instances {
        let (d_s, d_h, d_c) = SUITE_SHAPES[i % SUITE_SHAPES.len()];
        let inst = random_instance(d_s, d_h, d_c, &mut rng)?;
        match decohere_catalyst_construction(&inst.rho_s, &inst.u, &inst.h_hot, &inst.h_cold, inst.beta) {
            Ok(cmp) => {
                report.max_heat_gap = report.max_heat_gap.max(cmp.heat_gap());
                report.max_work_gap = report.max_work_gap.max(cmp.work_gap());
                report.max_catalyst_drift = report
                    .max_catalyst_drift
                    .max(cmp.original.catalyst_drift)
                    .max(cmp.constructed.catalyst_drift);
                if let (Some(a), Some(b)) = (cmp.original.efficiency(), cmp.constructed.efficiency()) {
                    report.max_efficiency_gap = report.max_efficiency_gap.max((a - b).abs());
                }
            }
            Err(_) => report.failures += 1,
        }
    }
    Ok(report)
}

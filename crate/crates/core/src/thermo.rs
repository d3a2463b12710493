//! Spectra, diagonal states of the working body and the energy bookkeeping
//! of a single work stroke.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conservation tolerance used for mode classification and efficiency.
pub const TOL: f64 = 1e-12;
/// Allowed drift of the catalyst marginal across a stroke.
pub const CYCLIC_TOL: f64 = 1e-9;

/// Diagonal Hamiltonian with its ground level pinned at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    levels: Vec<f64>,
}

impl Spectrum {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpectrum("no levels".into()));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite level".into()));
        }
        if levels[0] != 0.0 {
            return Err(Error::InvalidSpectrum(format!(
                "ground level must be 0, got {}",
                levels[0]
            )));
        }
        if levels.iter().any(|&e| e < 0.0) {
            return Err(Error::InvalidSpectrum("level below the ground level".into()));
        }
        Ok(Spectrum { levels })
    }

    /// Two-level system `omega |1><1|`.
    pub fn qubit(omega: f64) -> Result<Self> {
        Spectrum::new(vec![0.0, omega])
    }

    /// Degenerate spectrum of dimension `d` (the catalyst Hamiltonian).
    pub fn trivial(d: usize) -> Self {
        Spectrum {
            levels: vec![0.0; d.max(1)],
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Spectrum of `H_1 + H_2 + ...` on the tensor product, first factor slowest.
    pub fn tensor_sum(parts: &[&Spectrum]) -> Spectrum {
        let mut levels = vec![0.0];
        for part in parts {
            let mut next = Vec::with_capacity(levels.len() * part.dim());
            for &a in &levels {
                for &b in part.levels() {
                    next.push(a + b);
                }
            }
            levels = next;
        }
        Spectrum { levels }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseTemperaturePair {
    beta_h: f64,
    beta_c: f64,
}

impl InverseTemperaturePair {
    pub fn new(beta_h: f64, beta_c: f64) -> Result<Self> {
        if !(beta_h.is_finite() && beta_c.is_finite()) || beta_h <= 0.0 || beta_c <= 0.0 {
            return Err(Error::InvalidTemperatures(
                "inverse temperatures must be positive and finite".into(),
            ));
        }
        if beta_c <= beta_h {
            return Err(Error::InvalidTemperatures(format!(
                "need beta_c > beta_h, got beta_h = {beta_h}, beta_c = {beta_c}"
            )));
        }
        Ok(InverseTemperaturePair { beta_h, beta_c })
    }

    pub fn beta_h(&self) -> f64 {
        self.beta_h
    }

    pub fn beta_c(&self) -> f64 {
        self.beta_c
    }

    pub fn carnot(&self) -> f64 {
        1.0 - self.beta_h / self.beta_c
    }
}

/// Diagonal state over `|i,j,k>` (catalyst, hot, cold), flattened as
/// `i*d_h*d_c + j*d_c + k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationVector {
    probs: Vec<f64>,
    shape: (usize, usize, usize),
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {x} is not a probability")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > TOL {
        return Err(Error::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

impl PopulationVector {
    pub fn new(probs: Vec<f64>, shape: (usize, usize, usize)) -> Result<Self> {
        if probs.len() != shape.0 * shape.1 * shape.2 {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for shape {:?}",
                probs.len(),
                shape
            )));
        }
        check_distribution(&probs)?;
        Ok(PopulationVector { probs, shape })
    }

    /// Same shape, new entries; used by transformations that preserve
    /// normalization by construction.
    pub(crate) fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        PopulationVector::new(probs, self.shape)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let (_, dh, dc) = self.shape;
        i * dh * dc + j * dc + k
    }

    /// `(i, j, k)` of a flat index.
    pub fn split(&self, x: usize) -> (usize, usize, usize) {
        let (_, dh, dc) = self.shape;
        (x / (dh * dc), (x / dc) % dh, x % dc)
    }

    pub fn catalyst_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.0];
        for (x, &p) in self.probs.iter().enumerate() {
            out[self.split(x).0] += p;
        }
        out
    }

    pub fn hot_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.1];
        for (x, &p) in self.probs.iter().enumerate() {
            out[self.split(x).1] += p;
        }
        out
    }

    pub fn cold_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.2];
        for (x, &p) in self.probs.iter().enumerate() {
            out[self.split(x).2] += p;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Engine,
    Cooler,
    Accelerator,
    Degenerate,
}

/// Heats, work and efficiency of one work stroke.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub work: f64,
    pub heat_hot: f64,
    pub heat_cold: f64,
    pub efficiency: Option<f64>,
    pub modes: Vec<Mode>,
}

impl CycleReport {
    pub fn from_heats(heat_hot: f64, heat_cold: f64) -> Self {
        let work = heat_hot + heat_cold;
        let efficiency = (heat_hot.abs() > TOL).then(|| 1.0 + heat_cold / heat_hot);
        CycleReport {
            work,
            heat_hot,
            heat_cold,
            efficiency,
            modes: classify_modes(work, heat_hot, heat_cold),
        }
    }

    pub fn has_mode(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }
}

pub fn gibbs_populations(spectrum: &Spectrum, beta: f64) -> Result<Vec<f64>> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidTemperatures(format!("beta = {beta}")));
    }
    let exps: Vec<f64> = spectrum.levels().iter().map(|e| -beta * e).collect();
    if exps.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow);
    }
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exps.iter().map(|x| (x - top).exp()).collect();
    let z: f64 = weights.iter().sum();
    let out: Vec<f64> = weights.iter().map(|w| w / z).collect();
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(out)
}

pub fn product_state(cat: &[f64], hot: &[f64], cold: &[f64]) -> Result<PopulationVector> {
    check_distribution(cat)?;
    check_distribution(hot)?;
    check_distribution(cold)?;
    let mut probs = Vec::with_capacity(cat.len() * hot.len() * cold.len());
    for &s in cat {
        for &h in hot {
            for &c in cold {
                probs.push(s * h * c);
            }
        }
    }
    // The product of normalized factors can drift from 1 by a few ulps.
    PopulationVector::new(probs, (cat.len(), hot.len(), cold.len()))
}

/// `rho_s ⊗ tau_h ⊗ tau_c` for the given catalyst populations.
pub fn gibbs_product(
    cat: &[f64],
    h_hot: &Spectrum,
    h_cold: &Spectrum,
    beta: InverseTemperaturePair,
) -> Result<PopulationVector> {
    let hot = gibbs_populations(h_hot, beta.beta_h())?;
    let cold = gibbs_populations(h_cold, beta.beta_c())?;
    product_state(cat, &hot, &cold)
}

pub fn stroke_report(
    initial: &PopulationVector,
    fin: &PopulationVector,
    h_hot: &Spectrum,
    h_cold: &Spectrum,
) -> Result<CycleReport> {
    if initial.shape() != fin.shape() {
        return Err(Error::ShapeMismatch(format!(
            "initial {:?} vs final {:?}",
            initial.shape(),
            fin.shape()
        )));
    }
    let (_, dh, dc) = initial.shape();
    if h_hot.dim() != dh || h_cold.dim() != dc {
        return Err(Error::ShapeMismatch(format!(
            "spectra ({}, {}) vs shape {:?}",
            h_hot.dim(),
            h_cold.dim(),
            initial.shape()
        )));
    }
    let drift = initial
        .catalyst_marginal()
        .iter()
        .zip(fin.catalyst_marginal())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if drift > CYCLIC_TOL {
        return Err(Error::CyclicityViolated(drift));
    }
    let (mut qh, mut qc) = (0.0, 0.0);
    for (x, (a, b)) in initial.probs().iter().zip(fin.probs()).enumerate() {
        let (_, j, k) = initial.split(x);
        let delta = a - b;
        qh += delta * h_hot.levels()[j];
        qc += delta * h_cold.levels()[k];
    }
    Ok(CycleReport::from_heats(qh, qc))
}

pub fn classify_modes(work: f64, heat_hot: f64, heat_cold: f64) -> Vec<Mode> {
    classify_modes_with_tol(work, heat_hot, heat_cold, TOL)
}

pub fn classify_modes_with_tol(work: f64, heat_hot: f64, heat_cold: f64, tol: f64) -> Vec<Mode> {
    let mut modes = Vec::new();
    if work > tol {
        modes.push(Mode::Engine);
    }
    if work < -tol && heat_cold > tol {
        modes.push(Mode::Cooler);
    }
    if work <= tol && heat_hot >= -tol {
        modes.push(Mode::Accelerator);
    }
    if work.abs() <= tol && heat_hot.abs() <= tol && heat_cold.abs() <= tol {
        modes.push(Mode::Degenerate);
    }
    modes
}

pub fn clausius_lhs(heat_hot: f64, heat_cold: f64, beta: InverseTemperaturePair) -> f64 {
    beta.beta_h() * heat_hot + beta.beta_c() * heat_cold
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gibbs_examples() {
        let p = gibbs_populations(&Spectrum::qubit(3.0).unwrap(), 0.0).unwrap();
        assert_eq!(p, vec![0.5, 0.5]);
        let p = gibbs_populations(&Spectrum::qubit(1.0).unwrap(), 1.0).unwrap();
        let e = (-1.0f64).exp();
        assert_relative_eq!(p[0], 1.0 / (1.0 + e), epsilon = 1e-15);
        assert_relative_eq!(p[1], e / (1.0 + e), epsilon = 1e-15);
        assert_relative_eq!(p[0], 0.731059, epsilon = 1e-6);
        assert_eq!(gibbs_populations(&Spectrum::trivial(1), 7.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn gibbs_survives_huge_exponents() {
        let s = Spectrum::new(vec![0.0, 500.0, 1000.0]).unwrap();
        let p = gibbs_populations(&s, 3.0).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(p[1] >= 0.0 && p[2] >= 0.0);
        assert_eq!(gibbs_populations(&s, f64::INFINITY), Err(Error::InvalidTemperatures("beta = inf".into())));
    }

    #[test]
    fn spectrum_rejects_offsets() {
        assert!(Spectrum::new(vec![1.0, 2.0]).is_err());
        assert!(Spectrum::new(vec![]).is_err());
        assert!(Spectrum::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn product_examples() {
        let v = product_state(&[1.0], &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(v.probs(), &[0.0, 1.0, 0.0, 0.0]);
        let v = product_state(&[0.5, 0.5], &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(v.probs(), &[0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0]);
        assert!(product_state(&[0.5], &[1.0], &[1.0]).is_err());

        let beta = InverseTemperaturePair::new(1.0, 1.5).unwrap();
        let v = gibbs_product(
            &[1.0],
            &Spectrum::qubit(1.0).unwrap(),
            &Spectrum::qubit(1.0).unwrap(),
            beta,
        )
        .unwrap();
        let (ah, ac) = ((-1.0f64).exp(), (-1.5f64).exp());
        let n = 1.0 / ((1.0 + ah) * (1.0 + ac));
        for (got, want) in v.probs().iter().zip([n, n * ac, n * ah, n * ah * ac]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        assert_relative_eq!(v.hot_marginal()[1], ah / (1.0 + ah), epsilon = 1e-15);
        assert_relative_eq!(v.cold_marginal()[1], ac / (1.0 + ac), epsilon = 1e-15);
    }

    #[test]
    fn identity_stroke_is_degenerate() {
        let beta = InverseTemperaturePair::new(1.0, 3.0).unwrap();
        let (hh, hc) = (Spectrum::qubit(1.0).unwrap(), Spectrum::qubit(0.5).unwrap());
        let v = gibbs_product(&[1.0], &hh, &hc, beta).unwrap();
        let r = stroke_report(&v, &v, &hh, &hc).unwrap();
        assert_eq!((r.work, r.heat_hot, r.heat_cold), (0.0, 0.0, 0.0));
        assert_eq!(r.efficiency, None);
        assert!(r.has_mode(Mode::Degenerate));
    }

    #[test]
    fn otto_swap_heats() {
        let beta = InverseTemperaturePair::new(1.0, 3.0).unwrap();
        let (hh, hc) = (Spectrum::qubit(1.0).unwrap(), Spectrum::qubit(0.5).unwrap());
        let v = gibbs_product(&[1.0], &hh, &hc, beta).unwrap();
        let mut f = v.probs().to_vec();
        f.swap(1, 2);
        let f = v.with_probs(f).unwrap();
        let r = stroke_report(&v, &f, &hh, &hc).unwrap();
        let (ah, ac) = ((-1.0f64).exp(), (-1.5f64).exp());
        let n = 1.0 / ((1.0 + ah) * (1.0 + ac));
        assert_relative_eq!(r.work, n * (ah - ac) * 0.5, epsilon = 1e-15);
        assert_relative_eq!(r.heat_hot, n * (ah - ac), epsilon = 1e-15);
        assert_relative_eq!(r.efficiency.unwrap(), 0.5, epsilon = 1e-14);
        assert_eq!(r.modes, vec![Mode::Engine]);
        let cl = clausius_lhs(r.heat_hot, r.heat_cold, beta);
        assert_relative_eq!(cl, n * (ah - ac) * (1.0 - 1.5), epsilon = 1e-15);
        assert!(cl < 0.0);
    }

    #[test]
    fn stroke_rejects_catalyst_drift() {
        let a = PopulationVector::new(vec![0.5, 0.5], (2, 1, 1)).unwrap();
        let b = PopulationVector::new(vec![0.4, 0.6], (2, 1, 1)).unwrap();
        let s = Spectrum::trivial(1);
        assert!(matches!(stroke_report(&a, &b, &s, &s), Err(Error::CyclicityViolated(_))));
        let c = PopulationVector::new(vec![0.5, 0.5], (1, 2, 1)).unwrap();
        assert!(matches!(stroke_report(&a, &c, &s, &s), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn mode_examples() {
        assert_eq!(classify_modes(1.0, 2.0, -1.0), vec![Mode::Engine]);
        assert_eq!(classify_modes(-1.0, -3.0, 2.0), vec![Mode::Cooler]);
        assert_eq!(
            classify_modes(0.0, 0.0, 0.0),
            vec![Mode::Accelerator, Mode::Degenerate]
        );
    }

    #[test]
    fn temperatures_ordered() {
        assert!(InverseTemperaturePair::new(2.0, 1.0).is_err());
        assert!(InverseTemperaturePair::new(0.0, 1.0).is_err());
        assert_eq!(InverseTemperaturePair::new(1.0, 4.0).unwrap().carnot(), 0.75);
    }

    #[test]
    fn tensor_sum_order() {
        let s = Spectrum::tensor_sum(&[&Spectrum::qubit(2.0).unwrap(), &Spectrum::qubit(3.0).unwrap()]);
        assert_eq!(s.levels(), &[0.0, 3.0, 2.0, 5.0]);
    }
}

//! Permutations of the energy basis, exhaustive optimization of the
//! non-catalytic engine, passivity and ergotropy.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::thermo::{
    gibbs_product, stroke_report, CycleReport, InverseTemperaturePair, PopulationVector, Spectrum,
    TOL,
};

/// Largest `n` accepted by [`enumerate_permutations`].
pub const MAX_ENUMERATION: usize = 9;

/// Bijection on basis indices; `image[x]` is where the population of `x` lands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermutationMap {
    image: Vec<usize>,
}

impl Serialize for PermutationMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.image.serialize(s)
    }
}

impl PermutationMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &y in &image {
            if y >= n || seen[y] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection")));
            }
            seen[y] = true;
        }
        Ok(PermutationMap { image })
    }

    pub fn identity(n: usize) -> Self {
        PermutationMap {
            image: (0..n).collect(),
        }
    }

    /// Product of the given transpositions; pairs must be disjoint.
    pub fn from_swaps(n: usize, swaps: &[(usize, usize)]) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for &(a, b) in swaps {
            if a >= n || b >= n || a == b || touched[a] || touched[b] {
                return Err(Error::InvalidPermutation(format!("bad swap ({a}, {b})")));
            }
            touched[a] = true;
            touched[b] = true;
            image.swap(a, b);
        }
        Ok(PermutationMap { image })
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        PermutationMap { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &PermutationMap) -> Self {
        PermutationMap {
            image: other.image.iter().map(|&y| self.image[y]).collect(),
        }
    }

    pub fn apply_slice(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        for (x, &y) in self.image.iter().enumerate() {
            out[y] = p[x];
        }
        out
    }

    /// Space-separated image, as used in CSV output.
    pub fn to_label(&self) -> String {
        self.image
            .iter()
            .map(|y| y.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn apply_permutation(p: &PopulationVector, perm: &PermutationMap) -> Result<PopulationVector> {
    if p.len() != perm.len() {
        return Err(Error::ShapeMismatch(format!(
            "permutation of {} on {} populations",
            perm.len(),
            p.len()
        )));
    }
    p.with_probs(perm.apply_slice(p.probs()))
}

/// Lexicographic walk over all permutations of `0..n`.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = PermutationMap;

    fn next(&mut self) -> Option<PermutationMap> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(PermutationMap { image: cur })
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn enumerate_permutations(n: usize) -> Result<Permutations> {
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge(n));
    }
    Ok(Permutations {
        next: Some((0..n).collect()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Efficiency,
    Work,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub objective: Objective,
    pub best_value: f64,
    pub witnesses: Vec<PermutationMap>,
    pub report: Option<CycleReport>,
    /// False when no permutation produces work above [`TOL`].
    pub engine_regime: bool,
}

pub fn optimal_noncatalytic(
    h_hot: &Spectrum,
    h_cold: &Spectrum,
    beta: InverseTemperaturePair,
    objective: Objective,
) -> Result<OptimizationResult> {
    let n = h_hot.dim() * h_cold.dim();
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge(n));
    }
    let initial = gibbs_product(&[1.0], h_hot, h_cold, beta)?;
    let mut scored = Vec::new();
    for perm in enumerate_permutations(n)? {
        let fin = apply_permutation(&initial, &perm)?;
        let report = stroke_report(&initial, &fin, h_hot, h_cold)?;
        if report.work <= TOL {
            continue;
        }
        let value = match objective {
            Objective::Work => report.work,
            Objective::Efficiency => match report.efficiency {
                Some(eta) => eta,
                None => continue,
            },
        };
        scored.push((value, perm, report));
    }
    let Some(best) = scored.iter().map(|s| s.0).reduce(f64::max) else {
        return Ok(OptimizationResult {
            objective,
            best_value: 0.0,
            witnesses: Vec::new(),
            report: None,
            engine_regime: false,
        });
    };
    let mut witnesses = Vec::new();
    let mut report = None;
    for (value, perm, r) in scored {
        if best - value <= TOL {
            report.get_or_insert(r);
            witnesses.push(perm);
        }
    }
    Ok(OptimizationResult {
        objective,
        best_value: best,
        witnesses,
        report,
        engine_regime: true,
    })
}

/// One row of the 24-permutation qubit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitRow {
    pub perm_index: usize,
    pub image: PermutationMap,
    pub work: f64,
    /// Work per hot heat; zero for the idle identity stroke, absent when
    /// the hot heat vanishes but work does not.
    pub efficiency: Option<f64>,
    pub report: CycleReport,
}

/// The swap `|01> <-> |10>` of two qubits.
pub fn otto_swap() -> PermutationMap {
    PermutationMap { image: vec![0, 2, 1, 3] }
}

/// Canonical table order: identity, the Otto swap, then the rest in
/// lexicographic order of the image.
pub fn qubit_table_order() -> Vec<PermutationMap> {
    let otto = otto_swap();
    let mut order = vec![PermutationMap::identity(4), otto.clone()];
    order.extend(
        enumerate_permutations(4)
            .expect("4 is within the guard")
            .filter(|p| !p.is_identity() && *p != otto),
    );
    order
}

pub fn qubit_table(beta_h: f64, omega_h: f64, beta_c: f64, omega_c: f64) -> Result<Vec<QubitRow>> {
    let beta = InverseTemperaturePair::new(beta_h, beta_c)?;
    let (hh, hc) = (Spectrum::qubit(omega_h)?, Spectrum::qubit(omega_c)?);
    let initial = gibbs_product(&[1.0], &hh, &hc, beta)?;
    qubit_table_order()
        .into_iter()
        .enumerate()
        .map(|(idx, perm)| {
            let fin = apply_permutation(&initial, &perm)?;
            let report = stroke_report(&initial, &fin, &hh, &hc)?;
            let efficiency = match report.efficiency {
                Some(eta) => Some(eta),
                None if report.work.abs() <= TOL => Some(0.0),
                None => None,
            };
            Ok(QubitRow {
                perm_index: idx + 1,
                image: perm,
                work: report.work,
                efficiency,
                report,
            })
        })
        .collect()
}

pub fn passive_populations(p: &[f64], spectrum: &Spectrum) -> Result<Vec<f64>> {
    if p.len() != spectrum.dim() {
        return Err(Error::ShapeMismatch(format!(
            "{} populations on {} levels",
            p.len(),
            spectrum.dim()
        )));
    }
    let e = spectrum.levels();
    let mut levels: Vec<usize> = (0..p.len()).collect();
    levels.sort_by(|&a, &b| e[a].total_cmp(&e[b]).then(a.cmp(&b)));
    let mut probs = p.to_vec();
    probs.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0; p.len()];
    for (lvl, q) in levels.into_iter().zip(probs) {
        out[lvl] = q;
    }
    Ok(out)
}

pub fn ergotropy(p: &[f64], spectrum: &Spectrum) -> Result<f64> {
    let passive = passive_populations(p, spectrum)?;
    let e = spectrum.levels();
    Ok(p
        .iter()
        .zip(&passive)
        .zip(e)
        .map(|((a, b), en)| (a - b) * en)
        .sum::<f64>()
        .max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::Mode;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_permutations(1).unwrap().count(), 1);
        assert_eq!(enumerate_permutations(0).unwrap().count(), 1);
        assert_eq!(enumerate_permutations(3).unwrap().count(), 6);
        let all: Vec<_> = enumerate_permutations(4).unwrap().collect();
        assert_eq!(all.len(), 24);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_permutations(6).unwrap().count(), factorial(6));
        assert!(matches!(
            enumerate_permutations(10),
            Err(Error::EnumerationTooLarge(10))
        ));
    }

    #[test]
    fn apply_examples() {
        let (ah, ac) = ((-1.0f64).exp(), (-1.5f64).exp());
        let n = 1.0 / ((1.0 + ah) * (1.0 + ac));
        let v = PopulationVector::new(vec![n, n * ac, n * ah, n * ah * ac], (1, 2, 2)).unwrap();
        let id = apply_permutation(&v, &PermutationMap::identity(4)).unwrap();
        assert_eq!(id, v);
        let out = apply_permutation(&v, &otto_swap()).unwrap();
        assert_eq!(out.probs(), &[n, n * ah, n * ac, n * ah * ac]);
        let p = PermutationMap::new(vec![2, 0, 3, 1]).unwrap();
        let back = apply_permutation(&apply_permutation(&v, &p).unwrap(), &p.inverse()).unwrap();
        assert_eq!(back, v);
        assert!(apply_permutation(&v, &PermutationMap::identity(3)).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(PermutationMap::new(vec![0, 0]).is_err());
        assert!(PermutationMap::new(vec![1, 2]).is_err());
        assert!(PermutationMap::from_swaps(4, &[(0, 1), (1, 2)]).is_err());
        let p = PermutationMap::from_swaps(4, &[(0, 3)]).unwrap();
        assert_eq!(p.image(), &[3, 1, 2, 0]);
    }

    #[test]
    fn otto_is_optimal_for_qubits() {
        let beta = InverseTemperaturePair::new(1.0, 3.0).unwrap();
        let (hh, hc) = (Spectrum::qubit(1.0).unwrap(), Spectrum::qubit(0.5).unwrap());
        let r = optimal_noncatalytic(&hh, &hc, beta, Objective::Efficiency).unwrap();
        assert!(r.engine_regime);
        assert_relative_eq!(r.best_value, 0.5, epsilon = 1e-12);
        assert_eq!(r.witnesses, vec![otto_swap()]);
    }

    #[test]
    fn passive_initial_has_no_engine() {
        let beta = InverseTemperaturePair::new(6.0, 7.0).unwrap();
        let (hh, hc) = (Spectrum::qubit(2.0).unwrap(), Spectrum::qubit(3.0).unwrap());
        for obj in [Objective::Efficiency, Objective::Work] {
            let r = optimal_noncatalytic(&hh, &hc, beta, obj).unwrap();
            assert!(!r.engine_regime);
            assert_eq!(r.best_value, 0.0);
            assert!(r.witnesses.is_empty());
        }
    }

    #[test]
    fn equal_products_give_zero_work() {
        // beta_h*omega_h == beta_c*omega_c
        let beta = InverseTemperaturePair::new(1.0, 2.0).unwrap();
        let (hh, hc) = (Spectrum::qubit(2.0).unwrap(), Spectrum::qubit(1.0).unwrap());
        let r = optimal_noncatalytic(&hh, &hc, beta, Objective::Work).unwrap();
        assert!(!r.engine_regime);
    }

    #[test]
    fn table_rows() {
        let rows = qubit_table(1.0, 1.0, 3.0, 0.5).unwrap();
        assert_eq!(rows.len(), 24);
        assert_eq!(rows[0].work, 0.0);
        assert_eq!(rows[0].efficiency, Some(0.0));
        let (ah, ac) = ((-1.0f64).exp(), (-1.5f64).exp());
        let n = 1.0 / ((1.0 + ah) * (1.0 + ac));
        assert_relative_eq!(rows[1].work, n * (ah - ac) * 0.5, epsilon = 1e-15);
        assert_relative_eq!(rows[1].efficiency.unwrap(), 0.5, epsilon = 1e-14);
        let mut distinct: Vec<_> = rows.iter().map(|r| r.image.clone()).collect();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), 24);
        // Only the Otto swap and the 3-cycle 1->3->2->1 run as engines here.
        let engines: Vec<_> = rows
            .iter()
            .filter(|r| r.report.has_mode(Mode::Engine))
            .map(|r| r.image.image().to_vec())
            .collect();
        assert_eq!(engines, vec![vec![0, 2, 1, 3], vec![0, 3, 1, 2]]);
    }

    #[test]
    fn passive_examples() {
        let s = Spectrum::qubit(1.0).unwrap();
        assert_eq!(passive_populations(&[0.9, 0.1], &s).unwrap(), vec![0.9, 0.1]);
        assert_eq!(passive_populations(&[0.1, 0.9], &s).unwrap(), vec![0.9, 0.1]);
        assert_eq!(ergotropy(&[0.0, 1.0], &s).unwrap(), 1.0);
        assert_eq!(ergotropy(&[0.7, 0.3], &s).unwrap(), 0.0);
        // unsorted spectrum
        let s = Spectrum::new(vec![0.0, 3.0, 1.0]).unwrap();
        assert_eq!(passive_populations(&[0.2, 0.5, 0.3], &s).unwrap(), vec![0.5, 0.2, 0.3]);
    }

    #[test]
    fn noncatalytic_work_equals_ergotropy() {
        let beta = InverseTemperaturePair::new(0.7, 2.9).unwrap();
        let hh = Spectrum::new(vec![0.0, 1.3, 2.1]).unwrap();
        let hc = Spectrum::new(vec![0.0, 0.4, 0.5]).unwrap();
        let r = optimal_noncatalytic(&hh, &hc, beta, Objective::Work).unwrap();
        let init = gibbs_product(&[1.0], &hh, &hc, beta).unwrap();
        let full = Spectrum::tensor_sum(&[&hh, &hc]);
        let erg = ergotropy(init.probs(), &full).unwrap();
        assert!(r.engine_regime);
        assert!((r.best_value - erg).abs() <= 1e-12, "{} vs {}", r.best_value, erg);
    }

    proptest! {
        #[test]
        fn passive_sort_matches_brute_force(raw in prop::collection::vec(0.01f64..1.0, 5), energies in prop::collection::vec(0.0f64..3.0, 4)) {
            let total: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut levels = vec![0.0];
            levels.extend(energies);
            let s = Spectrum::new(levels.clone()).unwrap();
            let passive = passive_populations(&p, &s).unwrap();
            let energy = |q: &[f64]| q.iter().zip(&levels).map(|(a, b)| a * b).sum::<f64>();
            let best = enumerate_permutations(5).unwrap()
                .map(|perm| energy(&perm.apply_slice(&p)))
                .fold(f64::INFINITY, f64::min);
            prop_assert!((energy(&passive) - best).abs() <= 1e-12);
            prop_assert!(ergotropy(&p, &s).unwrap() >= 0.0);
        }

        #[test]
        fn compose_with_inverse_is_identity(seed in 0usize..120) {
            let p = enumerate_permutations(5).unwrap().nth(seed).unwrap();
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }
    }
}

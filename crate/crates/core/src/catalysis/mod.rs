//! Simple permutations on catalyst ⊗ qubit ⊗ qubit, the stationary
//! catalyst they require, and the resulting heats and work.
//!
//! Block `i` of the catalyst occupies indices `4i..4i+3` with inner order
//! `|0,0>, |0,1>, |1,0>, |1,1>` (hot, cold).

mod regime;

pub use regime::{
    fig5_rows, regime_map, regime_point, Fig5Row, RegimeCell, RegimeGrid, RegionLabel,
};

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{apply_permutation, PermutationMap};
use crate::thermo::{
    classify_modes_with_tol, gibbs_product, stroke_report, CycleReport, InverseTemperaturePair,
    PopulationVector, Spectrum,
};

/// Largest catalyst dimension accepted by the constructions here.
pub const MAX_CATALYST_DIM: usize = 1 << 16;

const FLOW_TOL: f64 = 1e-10;

/// `m` hot-to-hot swaps followed by `n` hot-to-cold swaps around a ring of
/// `d = m + n` catalyst levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SimplePermSpec {
    m: usize,
    n: usize,
}

impl SimplePermSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSimplePerm("n must be at least 1".into()));
        }
        if m + n > MAX_CATALYST_DIM {
            return Err(Error::InvalidSimplePerm(format!(
                "catalyst dimension {} exceeds {MAX_CATALYST_DIM}",
                m + n
            )));
        }
        Ok(SimplePermSpec { m, n })
    }

    /// The ladder with a single cold swap.
    pub fn ladder(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSimplePerm("d must be at least 1".into()));
        }
        SimplePermSpec::new(d - 1, 1)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.m + self.n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalystState {
    pub p: Vec<f64>,
    pub delta_p: f64,
}

/// Net population leaving the excited hot and excited cold subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowAccount {
    pub hot_flow: f64,
    pub cold_flow: f64,
}

pub fn build_simple_perm(spec: SimplePermSpec) -> Result<PermutationMap> {
    let d = spec.d();
    let (m, n) = (spec.m, spec.n);
    let idx = |block: usize, h: usize, c: usize| 4 * (block % d) + 2 * h + c;
    let mut swaps = Vec::with_capacity(d);
    for i in 0..m {
        swaps.push((idx(i, 1, 0), idx(i + 1, 0, 0)));
    }
    for j in m..m + n - 1 {
        swaps.push((idx(j, 1, 0), idx(j + 1, 0, 1)));
    }
    swaps.push((idx(d - 1, 1, 0), idx(0, 0, 1)));
    PermutationMap::from_swaps(4 * d, &swaps)
}

pub fn subspace_flows(initial: &PopulationVector, fin: &PopulationVector) -> Result<FlowAccount> {
    if initial.shape() != fin.shape() {
        return Err(Error::ShapeMismatch(format!(
            "initial {:?} vs final {:?}",
            initial.shape(),
            fin.shape()
        )));
    }
    let (_, dh, dc) = initial.shape();
    if (dh, dc) != (2, 2) {
        return Err(Error::ShapeMismatch("flows need qubit hot and cold systems".into()));
    }
    let mut acc = FlowAccount {
        hot_flow: 0.0,
        cold_flow: 0.0,
    };
    for (x, (a, b)) in initial.probs().iter().zip(fin.probs()).enumerate() {
        let (_, j, k) = initial.split(x);
        if j == 1 {
            acc.hot_flow += a - b;
        }
        if k == 1 {
            acc.cold_flow += a - b;
        }
    }
    Ok(acc)
}

fn check_boltzmann_factor(name: &str, a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidTemperatures(format!("{name} = {a} is outside (0, 1)")));
    }
    Ok(())
}

/// Net flow from each block to the next implied by `p` and `delta_p`;
/// returns the worst deviation from `delta_p`.
fn flow_residual(spec: SimplePermSpec, p: &[f64], delta_p: f64, a_h: f64, a_c: f64) -> f64 {
    let nn = 1.0 / ((1.0 + a_h) * (1.0 + a_c));
    let d = spec.d();
    (0..d)
        .map(|s| {
            let next = (s + 1) % d;
            let flow = if s < spec.m {
                nn * (p[s] * a_h - p[next])
            } else {
                nn * (p[s] * a_h - p[next] * a_c)
            };
            (flow - delta_p).abs()
        })
        .fold(0.0, f64::max)
}

pub fn solve_catalyst_state(spec: SimplePermSpec, a_h: f64, a_c: f64) -> Result<CatalystState> {
    check_boltzmann_factor("a_h", a_h)?;
    check_boltzmann_factor("a_c", a_c)?;
    let d = spec.d();
    // Unknowns p_0..p_{d-1}, delta_p / N.
    let mut a = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut b = DVector::<f64>::zeros(d + 1);
    for s in 0..d {
        let next = (s + 1) % d;
        let partner = if s < spec.m { 1.0 } else { a_c };
        a[(s, s)] += a_h;
        a[(s, next)] -= partner;
        a[(s, d)] = -1.0;
    }
    for i in 0..d {
        a[(d, i)] = 1.0;
    }
    b[d] = 1.0;
    let z = a.lu().solve(&b).ok_or(Error::Singular)?;
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    let nn = 1.0 / ((1.0 + a_h) * (1.0 + a_c));
    let delta_p = z[d] * nn;
    let mut p: Vec<f64> = z.iter().take(d).copied().collect();
    for (index, v) in p.iter_mut().enumerate() {
        if *v < -1e-12 {
            return Err(Error::InfeasibleCatalyst { index, value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let residual = flow_residual(spec, &p, delta_p, a_h, a_c);
    if residual > FLOW_TOL {
        return Err(Error::Inconsistent(residual));
    }
    Ok(CatalystState { p, delta_p })
}

/// Closed-form uniform flow. Errors at the poles `a_h = a_c` and `a_h = 1`.
pub fn delta_p_closed_form(spec: SimplePermSpec, a_h: f64, a_c: f64) -> Result<f64> {
    check_boltzmann_factor("a_c", a_c)?;
    if !(a_h > 0.0) || (a_h - 1.0).abs() < 1e-12 || (a_h - a_c).abs() < 1e-12 {
        return Err(Error::DegeneratePoint);
    }
    let (m, n) = (spec.m as i32, spec.n as i32);
    let nn = 1.0 / ((1.0 + a_h) * (1.0 + a_c));
    let ah_mn = a_h.powi(m + n);
    let ac_n = a_c.powi(n);
    let ah_m = a_h.powi(m);
    let ah_n = a_h.powi(n);
    let num = a_h * (1.0 - a_c).powi(2) * (1.0 - ah_m) * (ah_n - ac_n)
        + (ah_mn - ac_n)
            * (a_h - a_c)
            * (1.0 - a_h)
            * (n as f64 * (1.0 - a_h) - m as f64 * (a_h - a_c));
    let den = (a_h - a_c).powi(2) * (1.0 - a_h).powi(2);
    let f = num / den;
    Ok(nn * (ah_mn - ac_n) / f)
}

/// Heats of the simple permutation together with its stationary catalyst.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleReport {
    pub report: CycleReport,
    pub catalyst: CatalystState,
    pub flows: FlowAccount,
}

fn boltzmann_factors(omega_h: f64, omega_c: f64, beta: InverseTemperaturePair) -> Result<(f64, f64)> {
    if !(omega_h > 0.0 && omega_c > 0.0 && omega_h.is_finite() && omega_c.is_finite()) {
        return Err(Error::InvalidSpectrum("frequencies must be positive".into()));
    }
    Ok(((-beta.beta_h() * omega_h).exp(), (-beta.beta_c() * omega_c).exp()))
}

/// The initial product state and its image under the simple permutation.
pub fn simple_perm_stroke(
    spec: SimplePermSpec,
    catalyst: &[f64],
    omega_h: f64,
    omega_c: f64,
    beta: InverseTemperaturePair,
) -> Result<(PopulationVector, PopulationVector)> {
    let (hh, hc) = (Spectrum::qubit(omega_h)?, Spectrum::qubit(omega_c)?);
    let initial = gibbs_product(catalyst, &hh, &hc, beta)?;
    let fin = apply_permutation(&initial, &build_simple_perm(spec)?)?;
    Ok((initial, fin))
}

pub fn simple_perm_report(
    spec: SimplePermSpec,
    omega_h: f64,
    omega_c: f64,
    beta: InverseTemperaturePair,
) -> Result<SimpleReport> {
    let (a_h, a_c) = boltzmann_factors(omega_h, omega_c, beta)?;
    let catalyst = solve_catalyst_state(spec, a_h, a_c)?;
    let dp = catalyst.delta_p;
    let (d, n) = (spec.d() as f64, spec.n as f64);
    let heat_hot = d * omega_h * dp;
    let heat_cold = -n * omega_c * dp;
    let work = (d * omega_h - n * omega_c) * dp;
    // Exact signs: the flow can sit far below any absolute tolerance.
    let report = CycleReport {
        work,
        heat_hot,
        heat_cold,
        efficiency: (dp != 0.0).then(|| (d * omega_h - n * omega_c) / (d * omega_h)),
        modes: classify_modes_with_tol(work, heat_hot, heat_cold, 0.0),
    };

    let (initial, fin) = simple_perm_stroke(spec, &catalyst.p, omega_h, omega_c, beta)?;
    let explicit = stroke_report(
        &initial,
        &fin,
        &Spectrum::qubit(omega_h)?,
        &Spectrum::qubit(omega_c)?,
    )?;
    let flows = subspace_flows(&initial, &fin)?;
    let scale = 1.0f64.max(omega_h).max(omega_c);
    let gap = [
        (explicit.work - work).abs(),
        (explicit.heat_hot - heat_hot).abs(),
        (explicit.heat_cold - heat_cold).abs(),
        (flows.hot_flow * omega_h - heat_hot).abs(),
        (flows.cold_flow * omega_c - heat_cold).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if gap > FLOW_TOL * scale {
        return Err(Error::Inconsistent(gap));
    }
    Ok(SimpleReport {
        report,
        catalyst,
        flows,
    })
}

/// `1 - n ω_c / (d ω_h)` in exact arithmetic.
pub fn efficiency_rational(spec: SimplePermSpec, omega_h: Ratio<i64>, omega_c: Ratio<i64>) -> Ratio<i64> {
    let d = Ratio::from_integer(spec.d() as i64);
    let n = Ratio::from_integer(spec.n as i64);
    Ratio::from_integer(1) - n * omega_c / (d * omega_h)
}

/// Reports for every `(m, n)` with `m + n = d`, indexed by `n - 1`.
pub fn simple_perm_sweep(
    d: usize,
    omega_h: f64,
    omega_c: f64,
    beta: InverseTemperaturePair,
) -> Result<Vec<Result<SimpleReport>>> {
    if d == 0 {
        return Err(Error::InvalidSimplePerm("d must be at least 1".into()));
    }
    Ok((1..=d)
        .map(|n| simple_perm_report(SimplePermSpec::new(d - n, n)?, omega_h, omega_c, beta))
        .collect())
}

/// Best efficiency among simple permutations on a `d`-level catalyst.
/// Requires `ω_c/ω_h <= d <= β_c ω_c / (β_h ω_h)`.
pub fn optimal_simple_perm_efficiency(
    d: usize,
    omega_h: f64,
    omega_c: f64,
    beta: InverseTemperaturePair,
) -> Result<f64> {
    let lo = omega_c / omega_h;
    let hi = beta.beta_c() * omega_c / (beta.beta_h() * omega_h);
    let outside = Error::OutsideWindow { d, lo, hi };
    if (d as f64) < lo || (d as f64) > hi {
        return Err(outside);
    }
    let best = simple_perm_sweep(d, omega_h, omega_c, beta)?
        .into_iter()
        .filter_map(|r| r.ok())
        .filter(|r| r.report.work > 0.0)
        .filter_map(|r| r.report.efficiency)
        .reduce(f64::max)
        .ok_or(outside)?;
    let closed = 1.0 - omega_c / (d as f64 * omega_h);
    if (best - closed).abs() > 1e-12 {
        return Err(Error::Inconsistent((best - closed).abs()));
    }
    Ok(best)
}

/// Stationary catalyst populations for an arbitrary permutation acting on
/// `catalyst ⊗ hot ⊗ cold` with thermal hot and cold factors: a fixed point
/// of the block-transfer matrix, unique when that matrix is irreducible.
pub fn stationary_catalyst(
    perm: &PermutationMap,
    d_s: usize,
    hot: &[f64],
    cold: &[f64],
) -> Result<Vec<f64>> {
    let inner = hot.len() * cold.len();
    if perm.len() != d_s * inner || d_s == 0 {
        return Err(Error::ShapeMismatch(format!(
            "permutation of {} on {d_s} blocks of {inner}",
            perm.len()
        )));
    }
    let mut local = Vec::with_capacity(inner);
    for &h in hot {
        for &c in cold {
            local.push(h * c);
        }
    }
    // t[(i, k)]: weight that block k sends to block i.
    let mut t = DMatrix::<f64>::zeros(d_s, d_s);
    for (x, &y) in perm.image().iter().enumerate() {
        t[(y / inner, x / inner)] += local[x % inner];
    }
    let mut a = t.clone() - DMatrix::<f64>::identity(d_s, d_s);
    for k in 0..d_s {
        a[(d_s - 1, k)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(d_s);
    b[d_s - 1] = 1.0;
    let solved = a.lu().solve(&b).filter(|p| {
        p.iter().all(|v| v.is_finite() && *v > -1e-12) && (&t * p - p).amax() <= 1e-13
    });
    let p = match solved {
        Some(p) => p,
        None => {
            // Reducible transfer: average a lazy walk from the uniform state.
            let mut p = DVector::<f64>::from_element(d_s, 1.0 / d_s as f64);
            for _ in 0..100_000 {
                let next = (&p + &t * &p) * 0.5;
                let done = (&next - &p).amax() < 1e-16;
                p = next;
                if done {
                    break;
                }
            }
            p
        }
    };
    let mut p: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    Ok(p)
}

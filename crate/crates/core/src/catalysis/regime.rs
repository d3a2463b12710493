//! Operating regions over (β_c/β_h, ω_c/ω_h) and work-versus-n curves.
//!
//! Both use units with β_h = ω_h = 1, so a grid point `(x, y)` means
//! β_c = x and ω_c = y.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::{simple_perm_report, SimplePermSpec};
use crate::error::{Error, Result};
use crate::perm::{optimal_noncatalytic, Objective};
use crate::rational::to_f64;
use crate::thermo::{InverseTemperaturePair, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLabel {
    Carnot,
    Otto,
    Catalytic,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Carnot => "carnot",
            RegionLabel::Otto => "otto",
            RegionLabel::Catalytic => "catalytic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeGrid {
    pub beta_ratio: (f64, f64),
    pub freq_ratio: (f64, f64),
    pub resolution: (usize, usize),
}

impl RegimeGrid {
    fn axis(range: (f64, f64), steps: usize) -> Vec<f64> {
        match steps {
            0 => Vec::new(),
            1 => vec![range.0],
            _ => (0..steps)
                .map(|i| range.0 + (range.1 - range.0) * i as f64 / (steps - 1) as f64)
                .collect(),
        }
    }

    pub fn beta_axis(&self) -> Vec<f64> {
        Self::axis(self.beta_ratio, self.resolution.0)
    }

    pub fn freq_axis(&self) -> Vec<f64> {
        Self::axis(self.freq_ratio, self.resolution.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCell {
    pub beta_ratio: f64,
    pub freq_ratio: f64,
    pub d_over_n: Option<Ratio<u64>>,
    pub feasible: bool,
    pub label: RegionLabel,
}

/// Whether `(x, y) = (β_c/β_h, ω_c/ω_h)` lies in the given region. For the
/// catalytic region `q = d/n` is realized by the simple permutation with
/// `d` levels and `n` cold swaps and must report positive work.
pub fn regime_point(x: f64, y: f64, label: RegionLabel, q: Option<Ratio<u64>>) -> bool {
    match label {
        RegionLabel::Carnot => x > 1.0,
        RegionLabel::Otto => y < 1.0 && 1.0 < x * y,
        RegionLabel::Catalytic => {
            let Some(q) = q else { return false };
            let qf = to_f64(q);
            if !(1.0 < qf && qf < x * y) {
                return false;
            }
            let (d, n) = (*q.numer() as usize, *q.denom() as usize);
            let Ok(spec) = SimplePermSpec::new(d - n, n) else {
                return false;
            };
            let Ok(beta) = InverseTemperaturePair::new(1.0, x) else {
                return false;
            };
            matches!(simple_perm_report(spec, 1.0, y, beta), Ok(r) if r.report.work > 0.0)
        }
    }
}

/// Cells in row-major order over (beta_ratio, freq_ratio); per point the
/// carnot and otto rows come first, then one catalytic row per ratio.
pub fn regime_map(d_over_n: &[Ratio<u64>], grid: RegimeGrid) -> Vec<RegimeCell> {
    let ys = grid.freq_axis();
    let points: Vec<(f64, f64)> = grid
        .beta_axis()
        .into_iter()
        .flat_map(|x| ys.iter().map(move |&y| (x, y)))
        .collect();
    points
        .par_iter()
        .flat_map_iter(|&(x, y)| {
            let mut row = Vec::with_capacity(2 + d_over_n.len());
            for label in [RegionLabel::Carnot, RegionLabel::Otto] {
                row.push(RegimeCell {
                    beta_ratio: x,
                    freq_ratio: y,
                    d_over_n: None,
                    feasible: regime_point(x, y, label, None),
                    label,
                });
            }
            for &q in d_over_n {
                row.push(RegimeCell {
                    beta_ratio: x,
                    freq_ratio: y,
                    d_over_n: Some(q),
                    feasible: regime_point(x, y, RegionLabel::Catalytic, Some(q)),
                    label: RegionLabel::Catalytic,
                });
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig5Row {
    pub n: usize,
    pub w_catalytic: f64,
    pub w_noncatalytic_baseline: f64,
    pub efficiency: Option<f64>,
}

/// Work of the simple permutation with `n` cold swaps on a `d`-level
/// catalyst, `n = 1..=d`, next to the best non-catalytic work. Units:
/// ω_h = 1, ω_c = `freq_ratio`.
pub fn fig5_rows(d: usize, bh_wh: f64, bc_wc: f64, freq_ratio: f64) -> Result<Vec<Fig5Row>> {
    if d == 0 {
        return Err(Error::InvalidSimplePerm("d must be at least 1".into()));
    }
    if !(freq_ratio > 0.0) {
        return Err(Error::InvalidSpectrum("frequency ratio must be positive".into()));
    }
    let beta = InverseTemperaturePair::new(bh_wh, bc_wc / freq_ratio)?;
    let baseline = optimal_noncatalytic(
        &Spectrum::qubit(1.0)?,
        &Spectrum::qubit(freq_ratio)?,
        beta,
        Objective::Work,
    )?
    .best_value;
    (1..=d)
        .into_par_iter()
        .map(|n| {
            let r = simple_perm_report(SimplePermSpec::new(d - n, n)?, 1.0, freq_ratio, beta)?;
            Ok(Fig5Row {
                n,
                w_catalytic: r.report.work,
                w_noncatalytic_baseline: baseline,
                efficiency: r.report.efficiency,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(res: usize) -> RegimeGrid {
        RegimeGrid {
            beta_ratio: (1.0, 5.0),
            freq_ratio: (0.05, 4.0),
            resolution: (res, res),
        }
    }

    #[test]
    fn worked_point() {
        let (x, y) = (7.0 / 6.0, 1.5);
        assert!(!regime_point(x, y, RegionLabel::Otto, None));
        assert!(regime_point(x, y, RegionLabel::Catalytic, Some(Ratio::new(5, 3))));
        assert!(regime_point(x, y, RegionLabel::Carnot, None));
        // 2 lies above beta_c*omega_c / (beta_h*omega_h) = 1.75
        assert!(!regime_point(x, y, RegionLabel::Catalytic, Some(Ratio::new(2, 1))));
    }

    #[test]
    fn clausius_forbids_everything_below_the_diagonal() {
        for q in [Ratio::new(11, 5), Ratio::new(16, 5), Ratio::new(4, 1), Ratio::new(3, 2)] {
            assert!(!regime_point(3.0, 0.3, RegionLabel::Catalytic, Some(q)));
        }
        assert!(!regime_point(3.0, 0.3, RegionLabel::Otto, None));
    }

    #[test]
    fn map_layout() {
        let qs = [Ratio::new(11, 5), Ratio::new(4, 1)];
        let cells = regime_map(&qs, grid(5));
        assert_eq!(cells.len(), 25 * 4);
        assert_eq!(cells[0].label, RegionLabel::Carnot);
        assert_eq!(cells[1].label, RegionLabel::Otto);
        assert_eq!(cells[3].d_over_n, Some(Ratio::new(4, 1)));
        assert_eq!(cells[4].freq_ratio, grid(5).freq_axis()[1]);
    }

    #[test]
    fn fig5_endpoint_and_efficiency() {
        let rows = fig5_rows(30, 0.5, 4.0, 0.9).unwrap();
        assert_eq!(rows.len(), 30);
        let last = simple_perm_report(
            SimplePermSpec::new(0, 30).unwrap(),
            1.0,
            0.9,
            InverseTemperaturePair::new(0.5, 4.0 / 0.9).unwrap(),
        )
        .unwrap();
        assert_eq!(rows[29].w_catalytic, last.report.work);
        for w in rows.windows(2) {
            assert!(w[0].efficiency.unwrap() > w[1].efficiency.unwrap());
        }
        assert!(rows.iter().all(|r| r.w_noncatalytic_baseline == rows[0].w_noncatalytic_baseline));
    }
}

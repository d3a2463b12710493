//! Small-numerator rational approximations used to realize a ratio `d/n`
//! with a catalyst of bounded dimension.

use num_rational::Ratio;

/// Default cap on the numerator `d` (the catalyst dimension).
pub const MAX_DIM: u64 = 64;

const SLACK: f64 = 1e-9;

/// Continued-fraction convergents of `x > 0` whose numerators stay `<= cap`.
pub fn convergents(x: f64, cap: u64) -> Vec<Ratio<u64>> {
    let mut out = Vec::new();
    if !(x.is_finite() && x > 0.0) {
        return out;
    }
    let (mut h0, mut h1) = (1u64, 0u64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut r = x;
    for _ in 0..64 {
        let a = (r + SLACK).floor();
        if a > cap as f64 {
            break;
        }
        let a = a as u64;
        let h = a * h0 + h1;
        let k = a * k0 + k1;
        if h > cap {
            break;
        }
        if k > 0 && h > 0 {
            out.push(Ratio::new(h, k));
        }
        (h1, h0) = (h0, h);
        (k1, k0) = (k0, k);
        let frac = r - a as f64;
        if frac < SLACK {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Best convergent of `x` with numerator at most `cap`, in lowest terms.
pub fn rationalize(x: f64, cap: u64) -> Option<Ratio<u64>> {
    convergents(x, cap).pop()
}

/// A ratio strictly inside `(lo, hi)`, taken from the convergents of the
/// midpoint.
pub fn ratio_in_interval(lo: f64, hi: f64, cap: u64) -> Option<Ratio<u64>> {
    if !(lo < hi) {
        return None;
    }
    let mid = 0.5 * (lo + hi);
    convergents(mid, cap).into_iter().find(|q| {
        let v = to_f64(*q);
        lo < v && v < hi
    })
}

pub fn to_f64(q: Ratio<u64>) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_snap_to_small_fractions() {
        assert_eq!(rationalize(2.2, MAX_DIM), Some(Ratio::new(11, 5)));
        assert_eq!(rationalize(3.2, MAX_DIM), Some(Ratio::new(16, 5)));
        assert_eq!(rationalize(4.0, MAX_DIM), Some(Ratio::new(4, 1)));
        assert_eq!(rationalize(5.0 / 3.0, MAX_DIM), Some(Ratio::new(5, 3)));
    }

    #[test]
    fn cap_limits_numerator() {
        let q = rationalize(std::f64::consts::PI, 64).unwrap();
        assert_eq!(q, Ratio::new(22, 7));
        assert!(rationalize(100.0, 64).is_none());
    }

    #[test]
    fn interval_choice() {
        let q = ratio_in_interval(1.5, 1.75, MAX_DIM).unwrap();
        let v = to_f64(q);
        assert!(1.5 < v && v < 1.75);
        assert_eq!(q, Ratio::new(5, 3));
        assert!(ratio_in_interval(2.0, 2.0, MAX_DIM).is_none());
    }
}

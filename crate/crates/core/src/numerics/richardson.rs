//! Richardson extrapolation on a halving sequence of step sizes.

use crate::error::{Error, Result};
use crate::numerics::scalar::Real;

/// Extrapolated limit and its consecutive-difference accuracy estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolated<R> {
    pub value: R,
    pub accuracy: R,
}

/// Full elimination table: `stages[s][i]` combines samples `i..=i+s`.
pub fn richardson_table<R: Real>(estimates: &[(R, R)], steps: usize) -> Result<Vec<Vec<R>>> {
    if estimates.len() < steps + 1 {
        return Err(Error::InsufficientData { needed: steps + 1, got: estimates.len() });
    }
    for w in estimates.windows(2) {
        let ratio = (w[1].0 / w[0].0).to_f64();
        if (ratio - 0.5).abs() > 1e-12 {
            return Err(Error::NonGeometric);
        }
    }
    let mut stages = vec![estimates.iter().map(|e| e.1).collect::<Vec<R>>()];
    for s in 1..=steps {
        let p = R::from_f64((1u64 << s) as f64);
        let prev = &stages[s - 1];
        let next = prev.windows(2).map(|w| (p * w[1] - w[0]) / (p - R::one())).collect();
        stages.push(next);
    }
    Ok(stages)
}

/// Eliminates `steps` integer-power error terms from `(h_k, v_k)` samples,
/// `h_k = h_0 2^{-k}`, and returns the finest extrapolant (the corner of the
/// table). The accuracy is its distance to the finest extrapolant of the
/// previous stage, i.e. the last two entries along the table's lower diagonal.
pub fn richardson_extrapolate<R: Real>(estimates: &[(R, R)], steps: usize) -> Result<Extrapolated<R>> {
    let stages = richardson_table(estimates, steps)?;
    let last = &stages[steps];
    let value = last[last.len() - 1];
    let accuracy = if steps > 0 {
        let prev = &stages[steps - 1];
        (value - prev[prev.len() - 1]).abs()
    } else {
        R::zero()
    };
    Ok(Extrapolated { value, accuracy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halving(h0: f64, k: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..k).map(|i| {
            let h = h0 / (1u64 << i) as f64;
            (h, f(h))
        })
        .collect()
    }

    #[test]
    fn constant_sequence() {
        let e = richardson_extrapolate(&halving(0.1, 5, |_| 7.0), 3).unwrap();
        assert_eq!(e.value, 7.0);
        assert_eq!(e.accuracy, 0.0);
    }

    #[test]
    fn linear_error_removed_by_first_stage() {
        let data = halving(0.5, 6, |h| 3.0 + h);
        let t = richardson_table(&data, 3).unwrap();
        for s in 1..=3 {
            assert!(t[s].iter().all(|v| (v - 3.0).abs() < 1e-14));
        }
        assert!((richardson_extrapolate(&data, 3).unwrap().value - 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_error_removed_by_second_stage() {
        let data = halving(0.25, 4, |h| -1.5 + 0.7 * h - 2.3 * h * h);
        let t = richardson_table(&data, 2).unwrap();
        assert!(t[2].iter().all(|v| (v + 1.5).abs() <= 100.0 * f64::EPSILON));
    }

    #[test]
    fn sine_difference_quotient() {
        let data = halving(0.1, 8, |h| h.sin() / h);
        let e = richardson_extrapolate(&data, 3).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(e.accuracy < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let data = halving(0.1, 3, |h| h);
        assert_eq!(
            richardson_extrapolate(&data, 3).unwrap_err(),
            Error::InsufficientData { needed: 4, got: 3 }
        );
        let bad = vec![(0.1, 1.0), (0.04, 1.0), (0.02, 1.0), (0.01, 1.0)];
        assert_eq!(richardson_extrapolate(&bad, 3).unwrap_err(), Error::NonGeometric);
    }
}

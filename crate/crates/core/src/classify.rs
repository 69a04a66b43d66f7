//! Attractor classification at a parameter point, the per-cell rule behind
//! the parameter-space diagram.

use std::fmt;
use std::str::FromStr;

use crate::curve::{cocycle_mean_log, curve_cocycle, solve_invariant_curve, CurveOptions, FourierCurve};
use crate::error::{Error, Result};
use crate::forced::{cocycle_derivative, run_orbit, CylinderState, ForcedFamily, ParamPoint};
use crate::numerics::fourier::FourierCoeffs;
use crate::numerics::linalg::Matrix;
use crate::numerics::scalar::{Precision, Real};

/// Diagram color classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttractorLabel {
    ZeroLyapunov,
    Chaotic,
    NonreducibleNonchaotic,
    ReducibleNonchaotic,
    Divergent,
}

impl AttractorLabel {
    pub const ALL: [AttractorLabel; 5] = [
        Self::ZeroLyapunov,
        Self::Chaotic,
        Self::NonreducibleNonchaotic,
        Self::ReducibleNonchaotic,
        Self::Divergent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ZeroLyapunov => "zero-lyapunov",
            Self::Chaotic => "chaotic",
            Self::NonreducibleNonchaotic => "nonreducible-nonchaotic",
            Self::ReducibleNonchaotic => "reducible-nonchaotic",
            Self::Divergent => "divergent",
        }
    }

    /// 8-bit RGB color of the class.
    pub fn rgb(self) -> [u8; 3] {
        match self {
            Self::ZeroLyapunov => [0, 0, 0],
            Self::Chaotic => [255, 0, 0],
            Self::NonreducibleNonchaotic => [0, 0, 255],
            Self::ReducibleNonchaotic => [128, 128, 128],
            Self::Divergent => [255, 255, 255],
        }
    }
}

impl fmt::Display for AttractorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttractorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown attractor label '{s}'")))
    }
}

/// Outcome of [`classify_attractor`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttractorClass<R> {
    pub label: AttractorLabel,
    /// Per-step exponent: of the solved curve when a period was found,
    /// otherwise the orbit estimate.
    pub lyapunov: R,
    /// Period `2^m` of the attracting curve, when detected.
    pub period_detected: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub transient: usize,
    pub iters: usize,
    /// Orbit-exponent threshold; `10/sqrt(iters)` when unset.
    pub tol_lambda: Option<f64>,
    /// Largest period exponent tried.
    pub m_max: u32,
    /// Sup misfit accepted when fitting a branch to orbit samples.
    pub fit_tol: f64,
    pub max_harmonics: usize,
    pub max_samples: usize,
    /// Fourier modes of the Newton-refined curve.
    pub curve_modes: usize,
    /// Threshold on the exponent of a solved curve.
    pub zero_lyap_tol: f64,
    pub precision: Precision,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            transient: 10_000,
            iters: 100_000,
            tol_lambda: None,
            m_max: 12,
            fit_tol: 1e-6,
            max_harmonics: 24,
            max_samples: 256,
            curve_modes: 64,
            zero_lyap_tol: 1e-3,
            precision: Precision::Standard,
        }
    }
}

impl ClassifyOptions {
    pub fn tol_lambda(&self) -> f64 {
        self.tol_lambda.unwrap_or(10.0 / (self.iters.max(1) as f64).sqrt())
    }

    fn curve_options(&self) -> CurveOptions {
        CurveOptions {
            n_modes: Some(self.curve_modes),
            n_max: self.curve_modes * 4,
            ..CurveOptions::for_precision(self.precision)
        }
    }
}

/// Classifies the attractor reached from `(θ, x) = (0, 1/2)`.
///
/// Divergent orbits and orbits with exponent above `tol_Λ` are labeled
/// directly. Otherwise the smallest period `2^m` whose stride-`2^m` orbit
/// samples lie on one smooth graph is sought; the curve is then refined by
/// Newton and labeled from its cocycle. Without a period the orbit exponent
/// decides between zero-Lyapunov and nonreducible.
pub fn classify_attractor<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    opts: &ClassifyOptions,
) -> AttractorClass<R> {
    let mut orbit = Vec::with_capacity(opts.iters);
    let seed = CylinderState::new(R::zero(), R::half());
    let est = run_orbit(family, p, opts.transient, opts.iters, seed, |s| orbit.push(s));
    if est.escaped {
        return AttractorClass { label: AttractorLabel::Divergent, lyapunov: R::zero(), period_detected: None };
    }
    let tol = opts.tol_lambda();
    let lambda = est.lambda;
    if lambda.to_f64() > tol {
        return AttractorClass { label: AttractorLabel::Chaotic, lyapunov: lambda, period_detected: None };
    }
    let unresolved = |lambda: R| AttractorClass {
        label: if lambda.abs().to_f64() <= tol {
            AttractorLabel::ZeroLyapunov
        } else {
            AttractorLabel::NonreducibleNonchaotic
        },
        lyapunov: lambda,
        period_detected: None,
    };
    let Some((m, fit)) = detect_period(&orbit, opts) else {
        return unresolved(lambda);
    };
    let period = 1usize << m;
    let (cocycle, curve_lambda) = match refine(family, p, m, &fit, opts) {
        Some(v) => v,
        None => orbit_cocycle(family, p, &orbit, period, opts),
    };
    let zero_tol = opts.curve_options().zero_tol;
    let min_abs = cocycle.iter().map(|v| v.abs().to_f64()).fold(f64::INFINITY, f64::min);
    let label = if min_abs <= zero_tol {
        AttractorLabel::NonreducibleNonchaotic
    } else if curve_lambda.abs().to_f64() <= opts.zero_lyap_tol {
        AttractorLabel::ZeroLyapunov
    } else if cocycle.iter().all(|v| *v > R::zero()) || cocycle.iter().all(|v| *v < R::zero()) {
        AttractorLabel::ReducibleNonchaotic
    } else {
        AttractorLabel::NonreducibleNonchaotic
    };
    let lyapunov = if min_abs <= zero_tol { lambda } else { curve_lambda };
    AttractorClass { label, lyapunov, period_detected: Some(period) }
}

/// Smallest `m ≤ m_max` for which the stride-`2^m` tail samples of the orbit
/// are fitted by a trigonometric polynomial in `θ` within `fit_tol`.
fn detect_period<R: Real>(orbit: &[CylinderState<R>], opts: &ClassifyOptions) -> Option<(u32, FourierCoeffs<R>)> {
    (0..=opts.m_max).find_map(|m| {
        let stride = 1usize << m;
        let count = (orbit.len() / stride).min(opts.max_samples);
        // at least four samples per unknown guards against overfitting
        let k = opts.max_harmonics.min((count / 4).saturating_sub(1) / 2);
        if count < 4 {
            return None;
        }
        let samples: Vec<CylinderState<R>> =
            (0..count).map(|j| orbit[orbit.len() - 1 - j * stride]).collect();
        fit_branch(&samples, k, opts.curve_modes, opts.fit_tol).map(|c| (m, c))
    })
}

/// Least-squares fit of `x` against `θ` with `k` harmonics, returned on a
/// grid of `n_grid` points when the sup misfit is at most `tol`.
fn fit_branch<R: Real>(samples: &[CylinderState<R>], k: usize, n_grid: usize, tol: f64) -> Option<FourierCoeffs<R>> {
    let dim = 2 * k + 1;
    let basis = |theta: R| -> Vec<R> {
        let mut row = Vec::with_capacity(dim);
        row.push(R::one());
        for h in 1..=k {
            let (s, c) = (R::from_usize(h) * theta).sin_cos_turns();
            row.push(c);
            row.push(s);
        }
        row
    };
    let rows: Vec<Vec<R>> = samples.iter().map(|s| basis(s.theta)).collect();
    let mut normal = Matrix::zeros(dim);
    let mut rhs = vec![R::zero(); dim];
    for (row, s) in rows.iter().zip(samples) {
        for i in 0..dim {
            rhs[i] += row[i] * s.x;
            for j in 0..dim {
                normal[(i, j)] += row[i] * row[j];
            }
        }
    }
    let c = normal.solve(&rhs).ok()?;
    let misfit = rows
        .iter()
        .zip(samples)
        .map(|(row, s)| (row.iter().zip(&c).map(|(a, b)| *a * *b).sum::<R>() - s.x).abs().to_f64())
        .fold(0.0, f64::max);
    if !(misfit <= tol) {
        return None;
    }
    let mut coeffs = FourierCoeffs::zeros(n_grid).ok()?;
    coeffs.cos[0] = c[0];
    for h in 1..=k.min(n_grid / 2 - 1) {
        coeffs.cos[h] = c[2 * h - 1];
        coeffs.sin[h - 1] = c[2 * h];
    }
    Some(coeffs)
}

/// Newton refinement of the fitted branch; the cocycle on the curve's grid
/// and the per-step exponent, or `None` if the solve fails or wanders off.
fn refine<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    m: u32,
    fit: &FourierCoeffs<R>,
    opts: &ClassifyOptions,
) -> Option<(Vec<R>, R)> {
    let guess = FourierCurve::from_coeffs(fit.clone());
    let curve = solve_invariant_curve(family, p, m, &guess, &opts.curve_options()).ok()?;
    let drift = (0..64)
        .map(|j| {
            let t = R::from_usize(j) / R::from_f64(64.0);
            (curve.branch0.eval(t) - guess.eval(t)).abs().to_f64()
        })
        .fold(0.0, f64::max);
    if drift > 1e3 * opts.fit_tol {
        return None;
    }
    let cocycle = curve_cocycle(&curve).ok()?;
    let values = cocycle.values.values().to_vec();
    let min_abs = values.iter().map(|v| v.abs().to_f64()).fold(f64::INFINITY, f64::min);
    let lambda = if min_abs > 0.0 {
        cocycle_mean_log(&cocycle) / R::from_usize(curve.period())
    } else {
        R::from_f64(f64::NEG_INFINITY)
    };
    Some((values, lambda))
}

/// Cocycle over one period evaluated along the orbit tail, for curves the
/// Newton step could not refine.
fn orbit_cocycle<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    orbit: &[CylinderState<R>],
    period: usize,
    opts: &ClassifyOptions,
) -> (Vec<R>, R) {
    let count = (orbit.len() / period).saturating_sub(1).clamp(1, opts.max_samples);
    let start = orbit.len().saturating_sub((count + 1) * period);
    let values: Vec<R> = (0..count)
        .map(|j| {
            let base = start + j * period;
            orbit[base..base + period].iter().fold(R::one(), |acc, s| acc * cocycle_derivative(family, p, *s))
        })
        .collect();
    let lambda = if values.iter().all(|v| *v != R::zero()) {
        values.iter().map(|v| v.abs().ln()).sum::<R>() / R::from_usize(values.len() * period)
    } else {
        R::from_f64(f64::NEG_INFINITY)
    };
    (values, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forced::ForcingSpec;
    use crate::unimodal::cascade;

    fn flm() -> ForcedFamily<f64> {
        ForcedFamily::new((5f64.sqrt() - 1.0) / 2.0, ForcingSpec::multiplicative()).unwrap()
    }

    fn quick() -> ClassifyOptions {
        ClassifyOptions { transient: 5_000, iters: 20_000, ..Default::default() }
    }

    #[test]
    fn unforced_reference_points() {
        let f = flm();
        let c = classify_attractor(&f, &ParamPoint::new(2.5, 0.0), &quick());
        assert_eq!(c.label, AttractorLabel::ReducibleNonchaotic);
        assert_eq!(c.period_detected, Some(1));
        assert!((c.lyapunov - 0.5f64.ln()).abs() < 1e-10);
        let c = classify_attractor(&f, &ParamPoint::new(3.2, 0.0), &quick());
        assert_eq!(c.period_detected, Some(2));
        let mult: f64 = 4.0 + 2.0 * 3.2 - 3.2 * 3.2;
        assert!((c.lyapunov - mult.abs().ln() / 2.0).abs() < 1e-10);
        assert_eq!(classify_attractor(&f, &ParamPoint::new(4.5, 0.0), &quick()).label, AttractorLabel::Divergent);
        assert_eq!(classify_attractor(&f, &ParamPoint::new(3.8, 0.0), &quick()).label, AttractorLabel::Chaotic);
    }

    #[test]
    fn forced_fixed_curve_is_reducible() {
        let c = classify_attractor(&flm(), &ParamPoint::new(2.5, 0.01), &quick());
        assert_eq!(c.label, AttractorLabel::ReducibleNonchaotic);
        assert_eq!(c.period_detected, Some(1));
    }

    #[test]
    fn superstable_unforced_cycle_is_nonreducible() {
        let s1 = 1.0 + 5f64.sqrt();
        let c = classify_attractor(&flm(), &ParamPoint::new(s1, 0.0), &quick());
        assert_eq!(c.label, AttractorLabel::NonreducibleNonchaotic);
    }

    #[test]
    fn period_doubling_points_are_zero_lyapunov() {
        let d = cascade::<f64>(1).unwrap();
        for e in &d.entries {
            let c = classify_attractor(&flm(), &ParamPoint::new(e.d + 1e-5, 0.0), &quick());
            assert!(c.lyapunov.abs() < 1e-3, "{c:?}");
        }
        let c = classify_attractor(&flm(), &ParamPoint::new(3.0 - 2e-4, 0.0), &ClassifyOptions::default());
        assert_eq!(c.label, AttractorLabel::ZeroLyapunov, "{c:?}");
    }

    #[test]
    fn labels_round_trip_through_text() {
        for l in AttractorLabel::ALL {
            assert_eq!(l.as_str().parse::<AttractorLabel>().unwrap(), l);
        }
        assert!("purple".parse::<AttractorLabel>().is_err());
    }
}

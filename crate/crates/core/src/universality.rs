//! Slopes `α'_n(ω)` of the reducibility-loss branches at `ε = 0`, their
//! ratio sequences, asymptotic equivalence, `δ_{1,n}` estimates and the
//! affine parameter-space rescaling.

use crate::continuation::{trace_reducibility_loss, trace_reducibility_pair, BifurcationBranch, Side};
use crate::curve::CurveOptions;
use crate::error::{Error, Result};
use crate::forced::{ForcedFamily, ForcingKind, OmegaSpec, ParamPoint};
use crate::numerics::richardson::richardson_extrapolate;
use crate::numerics::scalar::Real;
use crate::unimodal::FEIGENBAUM_DELTA;

/// Sampling schedule of one slope estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeJobConfig {
    /// Base `ε` scale at `n = 0`.
    pub h0: f64,
    /// Per-level shrink, `h_n = h0 κ^n`.
    pub kappa: f64,
    /// Number of halvings `k = 1..=M`.
    pub halvings: usize,
    pub extrapolation_steps: usize,
}

impl Default for SlopeJobConfig {
    fn default() -> Self {
        Self { h0: 1e-2, kappa: 0.2, halvings: 8, extrapolation_steps: 3 }
    }
}

impl SlopeJobConfig {
    pub fn validate(&self) -> Result<()> {
        if self.halvings < self.extrapolation_steps + 1 {
            return Err(Error::Config(format!(
                "halvings ({}) must exceed extrapolation_steps ({})",
                self.halvings, self.extrapolation_steps
            )));
        }
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::Config(format!("kappa must lie in (0, 1), got {}", self.kappa)));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::Config(format!("h0 must be positive, got {}", self.h0)));
        }
        Ok(())
    }

    /// `h_n` for a base-map cascade index.
    pub fn h(&self, n_eff: u32) -> f64 {
        self.h0 * self.kappa.powi(n_eff as i32)
    }

    /// Ascending schedule `ε_k = 2^{-k} h_n`, `k = M..=1`.
    pub fn schedule<R: Real>(&self, n_eff: u32) -> Vec<R> {
        let h = R::from_f64(self.h(n_eff));
        (1..=self.halvings)
            .rev()
            .map(|k| h / R::from_f64(2f64.powi(k as i32)))
            .collect()
    }
}

/// A measured slope.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeRecord<R> {
    pub n: u32,
    /// Rotation number as given by the caller (before reduction mod 1).
    pub omega: OmegaSpec,
    pub kind: ForcingKind,
    pub e: R,
    /// `α'_n`, slope of `S_n^−`.
    pub alpha_prime: R,
    /// `β'_n`, slope of `S_n^+`, when requested.
    pub beta_prime: Option<R>,
    /// `ε_a` of `α'_n`.
    pub accuracy: R,
    pub beta_accuracy: Option<R>,
    /// `α_n(0)` used in the quotients.
    pub s_n: R,
    /// `ε_k` values, ascending.
    pub schedule: Vec<R>,
}

fn extrapolate_branch<R: Real>(branch: &BifurcationBranch<R>, schedule: &[R], steps: usize) -> Result<(R, R)> {
    // estimates ordered k = 1..M, i.e. by decreasing ε
    let est: Vec<(R, R)> = schedule
        .iter()
        .rev()
        .filter_map(|&e| branch.alpha_at(e).map(|a| (e, (a - branch.anchor) / e)))
        .collect();
    if est.len() < steps + 1 {
        return Err(Error::InsufficientData { needed: steps + 1, got: est.len() });
    }
    let r = richardson_extrapolate(&est, steps)?;
    let floor = roundoff_floor(&est, branch.anchor, steps);
    Ok((r.value, r.accuracy.max(floor)))
}

/// Rounding error of the extrapolant: a unit roundoff in `α(ε_k)` becomes
/// `u|α|/ε_k` in the quotient, pushed through the stage weights in absolute value.
fn roundoff_floor<R: Real>(est: &[(R, R)], anchor: R, steps: usize) -> R {
    let u = R::epsilon() * anchor.abs().max(R::one());
    let mut stage: Vec<R> = est.iter().map(|&(e, _)| u / e).collect();
    for s in 1..=steps {
        let p = R::from_f64((1u64 << s) as f64);
        stage = stage.windows(2).map(|w| (p * w[1] + w[0]) / (p - R::one())).collect();
    }
    stage[stage.len() - 1]
}

/// Estimates `α'_n` (and optionally `β'_n`) by tracing the branch(es) on
/// `ε_k = 2^{-k} h_n` and extrapolating the quotients `(α_n(ε_k) − s_n)/ε_k`.
pub fn estimate_slope<R: Real>(
    family: &ForcedFamily<R>,
    omega: &OmegaSpec,
    n: u32,
    cfg: &SlopeJobConfig,
    with_beta: bool,
    opts: &CurveOptions,
) -> Result<SlopeRecord<R>> {
    cfg.validate()?;
    let schedule = cfg.schedule::<R>(family.effective_exponent(n));
    let (minus, plus) = if with_beta {
        let [m, p] = trace_reducibility_pair(family, n, &schedule, opts)?;
        (m, Some(p))
    } else {
        (trace_reducibility_loss(family, n, Side::Minus, &schedule, opts)?, None)
    };
    let (alpha_prime, accuracy) = extrapolate_branch(&minus, &schedule, cfg.extrapolation_steps)?;
    let beta = plus
        .map(|p| extrapolate_branch(&p, &schedule, cfg.extrapolation_steps))
        .transpose()?;
    Ok(SlopeRecord {
        n,
        omega: omega.clone(),
        kind: family.kind(),
        e: family.forcing.e,
        alpha_prime,
        beta_prime: beta.map(|b| b.0),
        accuracy,
        beta_accuracy: beta.map(|b| b.1),
        s_n: minus.anchor,
        schedule,
    })
}

/// `r_n = α'_n / α'_{n−1}` for consecutive records; entry `i` has `n = records[i+1].n`.
pub fn ratio_sequence<R: Real>(records: &[SlopeRecord<R>]) -> Result<Vec<(u32, R)>> {
    records
        .windows(2)
        .map(|w| {
            if w[1].n != w[0].n + 1 {
                return Err(Error::IndexMismatch(format!("records n = {} and {} are not consecutive", w[0].n, w[1].n)));
            }
            if w[0].alpha_prime == R::zero() {
                return Err(Error::ZeroDenominator(w[0].n as usize));
            }
            Ok((w[1].n, w[1].alpha_prime / w[0].alpha_prime))
        })
        .collect()
}

/// Outcome of the finite-sample asymptotic-equivalence test.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    /// Fitted geometric rate of `|r_{i+offset} − s_i|`.
    pub rho_hat: f64,
    pub k0_hat: f64,
    /// `(i, |r_{i+offset} − s_i|)`
    pub diffs: Vec<(u32, f64)>,
}

/// Compares `s_i` with `r_{i+offset}` over the common index range: a
/// least-squares fit of `log|diff_i|` against `i` must have negative slope
/// and the last gap must be under half the first.
pub fn asymptotic_equivalence(r: &[(u32, f64)], s: &[(u32, f64)], offset: u32) -> Result<EquivalenceVerdict> {
    let diffs: Vec<(u32, f64)> = s
        .iter()
        .filter_map(|&(i, si)| {
            r.iter().find(|(j, _)| *j == i + offset).map(|&(_, rj)| (i, (rj - si).abs()))
        })
        .collect();
    if diffs.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: diffs.len() });
    }
    if diffs.iter().all(|d| d.1 == 0.0) {
        return Ok(EquivalenceVerdict { equivalent: true, rho_hat: 0.0, k0_hat: 0.0, diffs });
    }
    let pts: Vec<(f64, f64)> = diffs.iter().map(|&(i, d)| (i as f64, d.max(1e-300).ln())).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let first = diffs[0].1;
    let last = diffs[diffs.len() - 1].1;
    Ok(EquivalenceVerdict {
        equivalent: slope < 0.0 && last < first / 2.0,
        rho_hat: slope.exp(),
        k0_hat: intercept.exp(),
        diffs,
    })
}

/// `δ_{1,n} = δ0 · α'_n(ω) / α'_{n−1}(2ω)` for every `n ≥ 1` of `records_omega`.
pub fn delta1_sequence<R: Real>(
    records_omega: &[SlopeRecord<R>],
    records_2omega: &[SlopeRecord<R>],
    delta0: R,
) -> Result<Vec<(u32, R)>> {
    if let (Some(a), Some(b)) = (records_omega.first(), records_2omega.first()) {
        let w = a.omega.value::<R>()?.fract_turns();
        let w2 = b.omega.value::<R>()?.fract_turns();
        let expect = (w + w).fract_turns();
        if (expect - w2).abs().to_f64() > 1e-9 {
            return Err(Error::IndexMismatch(format!(
                "second record set has omega {} but 2*{} was expected",
                b.omega, a.omega
            )));
        }
    }
    records_omega
        .iter()
        .filter(|r| r.n >= 1)
        .map(|r| {
            let prev = records_2omega
                .iter()
                .find(|q| q.n + 1 == r.n)
                .ok_or_else(|| Error::IndexMismatch(format!("no 2-omega record for n = {}", r.n - 1)))?;
            if prev.alpha_prime == R::zero() {
                return Err(Error::ZeroDenominator(prev.n as usize));
            }
            Ok((r.n, delta0 * r.alpha_prime / prev.alpha_prime))
        })
        .collect()
}

/// The rescaling `L(α, ε) = (δ0(α − s*) + s*, δ1 ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineSelfSimMap<R> {
    pub s_star: R,
    pub delta0: R,
    pub delta1: R,
}

impl<R: Real> AffineSelfSimMap<R> {
    pub fn apply(&self, p: &ParamPoint<R>) -> ParamPoint<R> {
        affine_remap(self, p)
    }

    /// Inverse map.
    pub fn invert(&self, p: &ParamPoint<R>) -> ParamPoint<R> {
        ParamPoint::new((p.alpha - self.s_star) / self.delta0 + self.s_star, p.epsilon / self.delta1)
    }
}

pub fn affine_remap<R: Real>(m: &AffineSelfSimMap<R>, p: &ParamPoint<R>) -> ParamPoint<R> {
    ParamPoint::new(m.delta0 * (p.alpha - m.s_star) + m.s_star, m.delta1 * p.epsilon)
}

/// Cascade accumulation point from the last two superstable values,
/// `s* ≈ s_n + (s_n − s_{n−1})/(δ − 1)`.
pub fn accumulation_point<R: Real>(s: &[R]) -> Result<R> {
    if s.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: s.len() });
    }
    let (a, b) = (s[s.len() - 2], s[s.len() - 1]);
    Ok(b + (b - a) / (R::from_f64(FEIGENBAUM_DELTA) - R::one()))
}

/// `|r_n(E) − r_n(0)|` for matching `n`.
pub fn non_universality_gap<R: Real>(records_e: &[SlopeRecord<R>], records_base: &[SlopeRecord<R>]) -> Result<Vec<(u32, R)>> {
    let re = ratio_sequence(records_e)?;
    let rb = ratio_sequence(records_base)?;
    if re.len() != rb.len() || re.iter().zip(&rb).any(|(a, b)| a.0 != b.0) {
        return Err(Error::IndexMismatch("ratio sequences cover different n".into()));
    }
    Ok(re.iter().zip(&rb).map(|(a, b)| (a.0, (a.1 - b.1).abs())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forced::ForcingSpec;

    fn record(n: u32, a: f64) -> SlopeRecord<f64> {
        SlopeRecord {
            n,
            omega: OmegaSpec::Golden,
            kind: ForcingKind::MultiplicativeCos,
            e: 0.0,
            alpha_prime: a,
            beta_prime: None,
            accuracy: 1e-12,
            beta_accuracy: None,
            s_n: 0.0,
            schedule: vec![],
        }
    }

    #[test]
    fn ratios_of_equal_slopes_are_one() {
        let recs: Vec<_> = (0..4).map(|n| record(n, -3.0)).collect();
        let r = ratio_sequence(&recs).unwrap();
        assert_eq!(r, vec![(1, 1.0), (2, 1.0), (3, 1.0)]);
        let gap = vec![record(0, 1.0), record(2, 1.0)];
        assert!(matches!(ratio_sequence(&gap), Err(Error::IndexMismatch(_))));
        let zero = vec![record(0, 0.0), record(1, 1.0)];
        assert_eq!(ratio_sequence(&zero).unwrap_err(), Error::ZeroDenominator(0));
    }

    #[test]
    fn equivalence_decisions() {
        let s: Vec<(u32, f64)> = (0..6).map(|i| (i, 1.0 / (1.0 + i as f64))).collect();
        let v = asymptotic_equivalence(&s, &s, 0).unwrap();
        assert!(v.equivalent && v.rho_hat == 0.0);
        let shifted: Vec<(u32, f64)> = s.iter().map(|&(i, x)| (i, x + 1.0)).collect();
        assert!(!asymptotic_equivalence(&shifted, &s, 0).unwrap().equivalent);
        let geo: Vec<(u32, f64)> = s.iter().map(|&(i, x)| (i + 1, x + 0.3 * 0.5f64.powi(i as i32))).collect();
        let v = asymptotic_equivalence(&geo, &s, 1).unwrap();
        assert!(v.equivalent);
        assert!((v.rho_hat - 0.5).abs() < 1e-12);
        assert!((v.k0_hat - 0.3).abs() < 1e-12);
        assert!(asymptotic_equivalence(&s[..3], &s[..3], 0).is_err());
    }

    #[test]
    fn delta1_of_scaled_records_is_constant() {
        let c = 1.7;
        let w: Vec<_> = (0..5).map(|n| record(n, -2.0 * 3f64.powi(n as i32))).collect();
        let mut w2: Vec<_> = (0..4).map(|n| record(n, -2.0 * 3f64.powi(n as i32 + 1) / c)).collect();
        for r in &mut w2 {
            r.omega = OmegaSpec::TwoGolden;
        }
        let d = delta1_sequence(&w, &w2, FEIGENBAUM_DELTA).unwrap();
        assert_eq!(d.len(), 4);
        for (_, v) in d {
            assert!((v - FEIGENBAUM_DELTA * c).abs() < 1e-12);
        }
        // paired rotation number must be 2ω
        assert!(matches!(delta1_sequence(&w, &w, 1.0), Err(Error::IndexMismatch(_))));
        let short = &w2[..2];
        assert!(matches!(delta1_sequence(&w, short, 1.0), Err(Error::IndexMismatch(_))));
    }

    #[test]
    fn affine_map_fixed_point_and_identity() {
        let m = AffineSelfSimMap { s_star: 3.5699456, delta0: 4.6692, delta1: 7.5 };
        let p = m.apply(&ParamPoint::new(3.5699456, 0.0));
        assert_eq!(p, ParamPoint::new(3.5699456, 0.0));
        let id = AffineSelfSimMap { s_star: 1.234, delta0: 1.0, delta1: 1.0 };
        let q = ParamPoint::new(3.1, 0.02);
        assert_eq!(id.apply(&q), q);
        let r = m.invert(&m.apply(&q));
        assert!((r.alpha - q.alpha).abs() < 1e-14 && (r.epsilon - q.epsilon).abs() < 1e-16);
    }

    #[test]
    fn zero_gap_for_identical_families() {
        let a: Vec<_> = (0..4).map(|n| record(n, -(n as f64) - 1.0)).collect();
        let g = non_universality_gap(&a, &a).unwrap();
        assert!(g.iter().all(|x| x.1 == 0.0));
        assert!(non_universality_gap(&a, &a[..3]).is_err());
    }

    #[test]
    fn slope_anchor_n0_multiplicative() {
        let f = ForcedFamily::<f64>::new(OmegaSpec::Golden.value().unwrap(), ForcingSpec::multiplicative()).unwrap();
        let rec = estimate_slope(&f, &OmegaSpec::Golden, 0, &SlopeJobConfig::default(), true, &CurveOptions::standard())
            .unwrap();
        assert!((rec.alpha_prime + 2.0).abs() < 1e-8, "{}", rec.alpha_prime);
        assert!((rec.beta_prime.unwrap() - 2.0).abs() < 1e-8);
        assert!(rec.accuracy > 0.0);
    }

    #[test]
    fn schedule_is_ascending_halving() {
        let cfg = SlopeJobConfig::default();
        let s = cfg.schedule::<f64>(2);
        assert_eq!(s.len(), 8);
        assert!((s[7] - cfg.h(2) / 2.0).abs() < 1e-18);
        assert!(s.windows(2).all(|w| (w[1] / w[0] - 2.0).abs() < 1e-14));
        assert!(SlopeJobConfig { halvings: 3, ..cfg }.validate().is_err());
    }
}

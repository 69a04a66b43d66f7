//! The unforced logistic map `l_α(x) = αx(1−x)`: superstable parameters
//! `s_n`, period-doubling parameters `d_n` and Feigenbaum ratios.

use crate::error::{Error, Result};
use crate::numerics::linalg::Matrix;
use crate::numerics::newton::{newton, NewtonOptions, NonlinearSystem};
use crate::numerics::scalar::Real;

/// Feigenbaum's constant δ.
pub const FEIGENBAUM_DELTA: f64 = 4.669_201_609_102_990;

/// Separation below which a shorter return of the critical point counts as
/// a period violation.
pub const MIN_PERIOD_SEPARATION: f64 = 1e-6;

/// Closed parameter interval used to localize a root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket<R> {
    pub lo: R,
    pub hi: R,
}

impl<R: Real> Bracket<R> {
    pub fn new(lo: R, hi: R) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self { lo: hi, hi: lo }
        }
    }

    pub fn mid(&self) -> R {
        (self.lo + self.hi) * R::half()
    }

    pub fn contains(&self, v: R) -> bool {
        v >= self.lo && v <= self.hi
    }
}

pub fn logistic_eval<R: Real>(alpha: R, x: R) -> R {
    alpha * x * (R::one() - x)
}

/// `k`-th iterate of `x0` and the product `∏_{j<k} α(1−2x_j)`.
pub fn iterate_with_multiplier<R: Real>(alpha: R, x0: R, k: usize) -> (R, R) {
    let two = R::from_f64(2.0);
    (0..k).fold((x0, R::one()), |(x, m), _| {
        (logistic_eval(alpha, x), m * alpha * (R::one() - two * x))
    })
}

/// `(f^k(x0), ∂f^k/∂α)` by forward recursion.
fn iterate_with_alpha_derivative<R: Real>(alpha: R, x0: R, k: usize) -> (R, R) {
    let two = R::from_f64(2.0);
    (0..k).fold((x0, R::zero()), |(x, a), _| {
        let fx = alpha * (R::one() - two * x);
        (logistic_eval(alpha, x), fx * a + x * (R::one() - x))
    })
}

/// Return distance `|f^{2^m}(1/2) − 1/2|`.
fn critical_return<R: Real>(alpha: R, m: u32) -> R {
    (iterate_with_multiplier(alpha, R::half(), 1usize << m).0 - R::half()).abs()
}

/// Checks that the critical point has no return of period `2^m`, `m < n`.
fn check_minimal_period<R: Real>(alpha: R, n: u32) -> Result<()> {
    for m in 0..n {
        if critical_return(alpha, m).to_f64() < MIN_PERIOD_SEPARATION {
            return Err(Error::MinimalPeriodViolation { requested: n, found: m });
        }
    }
    Ok(())
}

/// Default search interval for `s_n` given the previously computed values.
pub fn superstable_bracket<R: Real>(n: u32, previous: &[R]) -> Bracket<R> {
    let f = R::from_f64;
    match n {
        0 => Bracket::new(f(1.5), f(2.5)),
        1 => Bracket::new(f(3.05), f(3.4)),
        2 => Bracket::new(f(3.46), f(3.54)),
        _ => {
            let k = previous.len();
            let (a, b) = (previous[k - 2], previous[k - 1]);
            let step = (b - a) / f(FEIGENBAUM_DELTA);
            let c = b + step;
            Bracket::new(c - f(0.15) * step, c + f(0.15) * step)
        }
    }
}

/// Solves `f_α^{2^n}(1/2) = 1/2` for the superstable parameter `s_n` inside
/// `bracket`, using Newton safeguarded by bisection.
pub fn find_superstable<R: Real>(n: u32, bracket: Bracket<R>, tol: R) -> Result<R> {
    let period = 1usize << n;
    let g = |a: R| {
        let (x, da) = iterate_with_alpha_derivative(a, R::half(), period);
        (x - R::half(), da)
    };
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let (glo, _) = g(lo);
    let (ghi, _) = g(hi);
    let bracketed = glo.signum_nonzero() * ghi.signum_nonzero() < 0;
    let mut a = bracket.mid();
    let mut last = R::from_f64(f64::INFINITY);
    for _ in 0..200 {
        let (ga, da) = g(a);
        last = ga.abs();
        if last <= tol {
            check_minimal_period(a, n)?;
            return Ok(a);
        }
        if bracketed {
            if ga.signum_nonzero() == glo.signum_nonzero() {
                lo = a;
            } else {
                hi = a;
            }
        }
        let mut next = a - ga / da;
        let outside = !(next > lo && next < hi) || !next.is_finite();
        if outside {
            if !bracketed {
                return Err(Error::NoConvergence { residual: last.to_f64(), iterations: 0 });
            }
            next = (lo + hi) * R::half();
        }
        if (next - a).abs() <= R::epsilon() * a.abs() {
            a = next;
            let (ga, _) = g(a);
            if ga.abs() <= tol * R::from_f64(1e3) {
                check_minimal_period(a, n)?;
                return Ok(a);
            }
            break;
        }
        a = next;
    }
    Err(Error::NoConvergence { residual: last.to_f64(), iterations: 200 })
}

/// Joint system `(f^P(x) − x, (f^P)'(x) + 1)` in `(x, α)`.
struct DoublingSystem {
    period: usize,
}

impl DoublingSystem {
    /// Returns `[x_P, D, A, DD, DA]`: the iterate, `∂/∂x0`, `∂/∂α`,
    /// `∂²/∂x0²` and `∂²/∂x0∂α`.
    fn orbit<R: Real>(&self, x0: R, alpha: R) -> [R; 5] {
        let two = R::from_f64(2.0);
        let mut st = [x0, R::one(), R::zero(), R::zero(), R::zero()];
        for _ in 0..self.period {
            let [x, d, a, dd, da] = st;
            let fx = alpha * (R::one() - two * x);
            let fxx = -two * alpha;
            let fa = x * (R::one() - x);
            let fxa = R::one() - two * x;
            st = [
                logistic_eval(alpha, x),
                fx * d,
                fx * a + fa,
                fxx * d * d + fx * dd,
                fxx * a * d + fxa * d + fx * da,
            ];
        }
        st
    }
}

impl<R: Real> NonlinearSystem<R> for DoublingSystem {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, v: &[R]) -> Result<Vec<R>> {
        let [xp, d, ..] = self.orbit(v[0], v[1]);
        Ok(vec![xp - v[0], d + R::one()])
    }

    fn jacobian(&self, v: &[R]) -> Result<Matrix<R>> {
        let [_, d, a, dd, da] = self.orbit(v[0], v[1]);
        Matrix::from_row_major(2, vec![d - R::one(), a, dd, da])
    }
}

/// Solves for the period-doubling parameter `d_n` where the attracting
/// `2^n`-cycle has multiplier −1. `alpha_guess` must lie in the cycle's
/// existence window `(s_n, s_{n+1})`.
pub fn find_period_doubling<R: Real>(n: u32, alpha_guess: R, tol: R) -> Result<R> {
    let sys = DoublingSystem { period: 1usize << n };
    // settle onto the attracting cycle slightly inside the window
    let mut x = R::half();
    for _ in 0..(64usize << n).min(1 << 16) {
        x = logistic_eval(alpha_guess, x);
    }
    let sol = newton(&sys, vec![x, alpha_guess], &NewtonOptions::new(tol, 60))?;
    let (xs, a) = (sol.x[0], sol.x[1]);
    // the multiplier condition rules out shorter cycles, but a neighbouring
    // cascade member can still attract Newton; verify the period directly
    for m in 0..n {
        let xm = iterate_with_multiplier(a, xs, 1usize << m).0;
        if (xm - xs).abs().to_f64() < MIN_PERIOD_SEPARATION {
            return Err(Error::MinimalPeriodViolation { requested: n, found: m });
        }
    }
    Ok(a)
}

/// Ratios `(v_n − v_{n−1}) / (v_{n+1} − v_n)` for `n = 1..len−1`.
pub fn feigenbaum_ratios<R: Real>(values: &[R]) -> Result<Vec<R>> {
    if values.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: values.len() });
    }
    values
        .windows(3)
        .enumerate()
        .map(|(i, w)| {
            let den = w[2] - w[1];
            if den == R::zero() {
                Err(Error::ZeroDenominator(i + 1))
            } else {
                Ok((w[1] - w[0]) / den)
            }
        })
        .collect()
}

/// One row of the cascade table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CascadeEntry<R> {
    pub n: u32,
    pub s: R,
    pub d: R,
}

/// Superstable and doubling parameters for `n = 0..=n_max` with ratio
/// estimates of δ.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeTable<R> {
    pub entries: Vec<CascadeEntry<R>>,
    /// `ratio_s[i]` is the ratio centered at `n = i + 1`.
    pub ratio_s: Vec<R>,
    pub ratio_d: Vec<R>,
}

impl<R: Real> CascadeTable<R> {
    pub fn superstable(&self) -> Vec<R> {
        self.entries.iter().map(|e| e.s).collect()
    }

    pub fn doubling(&self) -> Vec<R> {
        self.entries.iter().map(|e| e.d).collect()
    }
}

/// Default root tolerance at the working precision.
pub fn default_tol<R: Real>() -> R {
    R::epsilon() * R::from_f64(64.0)
}

/// Superstable parameters `s_0..=s_{n_max}`.
pub fn superstable_sequence<R: Real>(n_max: u32) -> Result<Vec<R>> {
    let mut s: Vec<R> = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let br = superstable_bracket(n, &s);
        s.push(find_superstable(n, br, default_tol())?);
    }
    Ok(s)
}

/// Computes the cascade table for `n = 0..=n_max`.
pub fn cascade<R: Real>(n_max: u32) -> Result<CascadeTable<R>> {
    let s = superstable_sequence::<R>(n_max + 1)?;
    let mut entries = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let (sn, sn1) = (s[n as usize], s[n as usize + 1]);
        let guess = sn + R::from_f64(0.81) * (sn1 - sn);
        let tol = default_tol::<R>() * R::from_usize(16usize << n);
        let d = find_period_doubling(n, guess, tol)?;
        entries.push(CascadeEntry { n, s: sn, d });
    }
    let sv: Vec<R> = entries.iter().map(|e| e.s).collect();
    let dv: Vec<R> = entries.iter().map(|e| e.d).collect();
    let ratio_s = if sv.len() >= 3 { feigenbaum_ratios(&sv)? } else { Vec::new() };
    let ratio_d = if dv.len() >= 3 { feigenbaum_ratios(&dv)? } else { Vec::new() };
    Ok(CascadeTable { entries, ratio_s, ratio_d })
}

/// Points of the superstable `2^n`-cycle starting at the critical point.
pub fn superstable_cycle<R: Real>(alpha: R, n: u32) -> Vec<R> {
    let mut x = R::half();
    (0..1usize << n)
        .map(|_| {
            let cur = x;
            x = logistic_eval(alpha, x);
            cur
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::DoubleDouble;

    #[test]
    fn logistic_values() {
        assert_eq!(logistic_eval(2.0, 0.5), 0.5);
        assert_eq!(logistic_eval(4.0, 0.5), 1.0);
        assert!((logistic_eval(3.2, 0.3) - 0.672).abs() < 1e-15);
    }

    #[test]
    fn multiplier_products() {
        let (x, m) = iterate_with_multiplier(2.5, 0.6, 1);
        assert!((x - 0.6).abs() < 1e-15 && (m + 0.5).abs() < 1e-15);
        assert_eq!(iterate_with_multiplier(2.0, 0.5, 3), (0.5, 0.0));
        // attracting 2-cycle at α = 3.2
        let a: f64 = 3.2;
        let p = (a + 1.0 + ((a + 1.0) * (a - 3.0)).sqrt()) / (2.0 * a);
        let (x2, m) = iterate_with_multiplier(a, p, 2);
        assert!((x2 - p).abs() < 1e-14);
        assert!((m - (4.0 + 2.0 * a - a * a)).abs() < 1e-13);
        assert!((m - 0.16).abs() < 1e-12);
    }

    /// Real root of α³ − 4α² + 8 in (3, 4), found by bisection.
    fn cubic_root() -> f64 {
        let f = |a: f64| a * a * a - 4.0 * a * a + 8.0;
        let (mut lo, mut hi) = (3.0, 4.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(lo) * f(m) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn low_superstable_parameters() {
        let s = superstable_sequence::<f64>(2).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-14);
        assert!((s[1] - cubic_root()).abs() < 1e-13);
        assert!((s[1] - (1.0 + 5f64.sqrt())).abs() < 1e-13);
        // bisection oracle on f^4(1/2) − 1/2 over (d_1, 3.55)
        let g = |a: f64| iterate_with_multiplier(a, 0.5, 4).0 - 0.5;
        let (mut lo, mut hi) = (1.0 + 6f64.sqrt(), 3.55);
        assert!(g(lo) * g(hi) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if g(lo) * g(m) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        assert!((s[2] - 0.5 * (lo + hi)).abs() < 1e-13);
    }

    #[test]
    fn low_doubling_parameters() {
        let t = cascade::<f64>(2).unwrap();
        assert!((t.entries[0].d - 3.0).abs() < 1e-13);
        assert!((t.entries[1].d - (1.0 + 6f64.sqrt())).abs() < 1e-12);
        // bisection oracle: locate the top 4-cycle point by bisection in x,
        // then bisect α on its multiplier crossing −1
        let bisect = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| {
            assert!(f(lo) * f(hi) < 0.0);
            for _ in 0..200 {
                let m = 0.5 * (lo + hi);
                if f(lo) * f(m) <= 0.0 {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            0.5 * (lo + hi)
        };
        let mult = |a: f64| {
            let x = bisect(&|x| iterate_with_multiplier(a, x, 4).0 - x, 0.865, 0.9);
            iterate_with_multiplier(a, x, 4).1 + 1.0
        };
        let d2 = bisect(&mult, 3.5, 3.55);
        assert!((t.entries[2].d - d2).abs() < 1e-10);
        assert!((t.entries[2].d - 3.544090).abs() < 1e-6);
    }

    #[test]
    fn wrong_bracket_reports_period_violation() {
        // a bracket around s_1 while asking for n = 2: f^4(1/2) = 1/2 holds at s_1 too
        let err = find_superstable(2, Bracket::new(3.2, 3.27), 1e-13).unwrap_err();
        assert!(matches!(err, Error::MinimalPeriodViolation { requested: 2, found: 1 }));
    }

    #[test]
    fn ratios_of_geometric_sequence() {
        let v: Vec<f64> = (0..6).map(|n| 1.0 - 5f64.powi(-n)).collect();
        let r = feigenbaum_ratios(&v).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|x| (x - 5.0).abs() < 1e-12));
        assert_eq!(feigenbaum_ratios(&[1.0, 2.0, 2.0]).unwrap_err(), Error::ZeroDenominator(1));
        assert!(feigenbaum_ratios(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn cascade_interleaves_and_converges() {
        let t = cascade::<f64>(8).unwrap();
        let s = t.superstable();
        let d = t.doubling();
        for n in 0..8 {
            assert!(d[n] < s[n + 1] && s[n + 1] < d[n + 1], "n={n}");
        }
        for e in &t.entries {
            let m = iterate_with_multiplier(e.s, 0.5, 1 << e.n).1;
            assert!(m.abs() <= 1e-8);
        }
        let rs = *t.ratio_s.last().unwrap();
        let rd = *t.ratio_d.last().unwrap();
        assert!((rs - 4.669).abs() < 1e-3, "{rs}");
        assert!((rd - 4.669).abs() < 1e-3, "{rd}");
        assert!((rs - rd).abs() < 5e-3);
    }

    #[test]
    fn extended_superstable_matches_high_precision_reference() {
        let s = superstable_sequence::<DoubleDouble>(3).unwrap();
        // 1 + √5 to 31 digits
        let want = DoubleDouble::from_f64(5.0).sqrt() + DoubleDouble::ONE;
        assert!((s[1] - want).abs().to_f64() < 1e-29);
        let s3 = crate::numerics::scalar::parse_real::<DoubleDouble>("3.5546408627688248654").unwrap();
        assert!((s[3] - s3).abs().to_f64() < 1e-18);
    }
}

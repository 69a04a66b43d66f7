//! Quasi-periodically forced logistic families on the cylinder
//! `(θ, x) ↦ (θ + ω, f(θ, x))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::scalar::{parse_real, Real};

/// Escape bound: an orbit with `|x|` beyond it is declared divergent.
pub const ESCAPE_BOUND: f64 = 10.0;

/// Shape of the forcing term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ForcingKind {
    /// `αx(1−x)(1 + ε cos 2πθ)`
    MultiplicativeCos,
    /// `αx(1−x) + ε cos 2πθ`
    AdditiveCos,
    /// `αx(1−x) + ε(cos 2πθ + E cos 4πθ)`
    AdditiveTwoHarmonic,
}

impl ForcingKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ForcingKind::MultiplicativeCos => "multiplicative-cos",
            ForcingKind::AdditiveCos => "additive-cos",
            ForcingKind::AdditiveTwoHarmonic => "additive-two-harmonic",
        }
    }
}

impl fmt::Display for ForcingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ForcingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multiplicative-cos" | "flm" => Ok(ForcingKind::MultiplicativeCos),
            "additive-cos" => Ok(ForcingKind::AdditiveCos),
            "additive-two-harmonic" => Ok(ForcingKind::AdditiveTwoHarmonic),
            other => Err(Error::Config(format!("unknown family `{other}`"))),
        }
    }
}

/// Forcing kind plus the second-harmonic weight `E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingSpec<R> {
    pub kind: ForcingKind,
    /// Only read by [`ForcingKind::AdditiveTwoHarmonic`].
    pub e: R,
}

impl<R: Real> ForcingSpec<R> {
    pub fn multiplicative() -> Self {
        Self { kind: ForcingKind::MultiplicativeCos, e: R::zero() }
    }

    pub fn additive() -> Self {
        Self { kind: ForcingKind::AdditiveCos, e: R::zero() }
    }

    pub fn two_harmonic(e: R) -> Self {
        Self { kind: ForcingKind::AdditiveTwoHarmonic, e }
    }
}

/// Parameter pair `(α, ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint<R> {
    pub alpha: R,
    pub epsilon: R,
}

impl<R: Real> ParamPoint<R> {
    pub fn new(alpha: R, epsilon: R) -> Self {
        Self { alpha, epsilon }
    }
}

/// A point `(θ, x)` of the cylinder, `θ ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylinderState<R> {
    pub theta: R,
    pub x: R,
}

impl<R: Real> CylinderState<R> {
    pub fn new(theta: R, x: R) -> Self {
        Self { theta: theta.fract_turns(), x }
    }
}

/// The forcing evaluated at one angle, written so that
/// `f(θ, x) = α x(1−x) · mult + add`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingValue<R> {
    pub mult: R,
    pub add: R,
}

/// Value and first derivatives of the base map at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapJet<R> {
    pub f: R,
    /// `∂f/∂x`
    pub fx: R,
    /// `∂²f/∂x²`
    pub fxx: R,
    /// `∂f/∂α`
    pub falpha: R,
    /// `∂²f/∂x∂α`
    pub fxalpha: R,
}

impl<R: Real> ForcingValue<R> {
    #[inline]
    pub fn apply(&self, alpha: R, x: R) -> R {
        alpha * x * (R::one() - x) * self.mult + self.add
    }

    #[inline]
    pub fn derivative(&self, alpha: R, x: R) -> R {
        alpha * (R::one() - x - x) * self.mult
    }

    #[inline]
    pub fn jet(&self, alpha: R, x: R) -> MapJet<R> {
        let q = x * (R::one() - x);
        let l = R::one() - x - x;
        MapJet {
            f: alpha * q * self.mult + self.add,
            fx: alpha * l * self.mult,
            fxx: -(alpha + alpha) * self.mult,
            falpha: q * self.mult,
            fxalpha: l * self.mult,
        }
    }
}

/// A rotation number and forcing defining a skew product; with
/// `composition_depth = D` one step of the family is `D` steps of the base
/// map, so its effective rotation is `D·ω_base mod 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcedFamily<R> {
    base_omega: R,
    pub forcing: ForcingSpec<R>,
    composition_depth: u32,
}

/// Returns `(p, q)` if `omega` lies within `1e-12` of `p/q` with `q <= 100`.
pub fn near_rational(omega: f64) -> Option<(u64, u64)> {
    let w = omega - omega.floor();
    (1..=100u64).find_map(|q| {
        let p = (w * q as f64).round();
        ((w - p / q as f64).abs() < 1e-12).then_some((p as u64, q))
    })
}

impl<R: Real> ForcedFamily<R> {
    /// Base family (depth 1). `omega` is reduced mod 1 and must not be
    /// numerically rational.
    pub fn new(omega: R, forcing: ForcingSpec<R>) -> Result<Self> {
        let w = omega.fract_turns();
        if let Some((p, q)) = near_rational(w.to_f64()) {
            return Err(Error::RationalRotation { omega: w.to_f64(), p, q });
        }
        Ok(Self { base_omega: w, forcing, composition_depth: 1 })
    }

    /// Effective rotation number of one family step.
    pub fn omega(&self) -> R {
        (self.base_omega * R::from_usize(self.composition_depth as usize)).fract_turns()
    }

    pub fn base_omega(&self) -> R {
        self.base_omega
    }

    pub fn composition_depth(&self) -> u32 {
        self.composition_depth
    }

    pub fn kind(&self) -> ForcingKind {
        self.forcing.kind
    }

    /// Number of base-map steps in `2^n` family steps.
    pub fn base_steps(&self, n: u32) -> usize {
        (self.composition_depth as usize) << n
    }

    /// Cascade index of the base logistic map corresponding to period `2^n`
    /// of this family (`n + log2 D`).
    pub fn effective_exponent(&self, n: u32) -> u32 {
        n + self.composition_depth.trailing_zeros()
    }

    /// Forcing of the base map at angle `theta` (in turns).
    #[inline]
    pub fn forcing_at(&self, epsilon: R, theta: R) -> ForcingValue<R> {
        let (_, c) = theta.sin_cos_turns();
        self.forcing_from_cos(epsilon, c)
    }

    /// Forcing from a precomputed `cos 2πθ`.
    #[inline]
    pub fn forcing_from_cos(&self, epsilon: R, c: R) -> ForcingValue<R> {
        match self.forcing.kind {
            ForcingKind::MultiplicativeCos => ForcingValue { mult: R::one() + epsilon * c, add: R::zero() },
            ForcingKind::AdditiveCos => ForcingValue { mult: R::one(), add: epsilon * c },
            ForcingKind::AdditiveTwoHarmonic => {
                let c2 = c * c + c * c - R::one();
                ForcingValue { mult: R::one(), add: epsilon * (c + self.forcing.e * c2) }
            }
        }
    }

    /// One base-map step.
    #[inline]
    fn base_step(&self, p: &ParamPoint<R>, s: CylinderState<R>) -> CylinderState<R> {
        let g = self.forcing_at(p.epsilon, s.theta);
        CylinderState { theta: (s.theta + self.base_omega).fract_turns(), x: g.apply(p.alpha, s.x) }
    }
}

/// One step `(θ, x) ↦ (θ + ω, f(θ, x))` of the family.
pub fn map_step<R: Real>(family: &ForcedFamily<R>, p: &ParamPoint<R>, s: CylinderState<R>) -> CylinderState<R> {
    (0..family.composition_depth).fold(s, |st, _| family.base_step(p, st))
}

/// `∂_x f(θ, x)` of one family step (chain rule over the composition).
pub fn cocycle_derivative<R: Real>(family: &ForcedFamily<R>, p: &ParamPoint<R>, s: CylinderState<R>) -> R {
    let mut st = s;
    let mut m = R::one();
    for _ in 0..family.composition_depth {
        let g = family.forcing_at(p.epsilon, st.theta);
        m *= g.derivative(p.alpha, st.x);
        st = family.base_step(p, st);
    }
    m
}

/// The family `(2ω, f²)`.
pub fn double_map<R: Real>(family: &ForcedFamily<R>) -> ForcedFamily<R> {
    ForcedFamily { composition_depth: family.composition_depth * 2, ..*family }
}

/// Streams base-map forcing values along `θ_k = θ_0 + kω` using a rotation
/// recurrence, resynchronised periodically from the exact angle.
pub(crate) struct ForcingStream<R> {
    omega: R,
    theta: R,
    c: R,
    s: R,
    rot_c: R,
    rot_s: R,
    since_sync: u32,
}

const RESYNC: u32 = 256;

impl<R: Real> ForcingStream<R> {
    pub(crate) fn new(theta0: R, omega: R) -> Self {
        let (s, c) = theta0.sin_cos_turns();
        let (rot_s, rot_c) = omega.sin_cos_turns();
        Self { omega, theta: theta0.fract_turns(), c, s, rot_c, rot_s, since_sync: 0 }
    }

    /// `cos 2πθ` at the current angle, then advances.
    #[inline]
    pub(crate) fn next_cos(&mut self) -> R {
        let c = self.c;
        self.theta = (self.theta + self.omega).fract_turns();
        self.since_sync += 1;
        if self.since_sync == RESYNC {
            let (s, c) = self.theta.sin_cos_turns();
            self.s = s;
            self.c = c;
            self.since_sync = 0;
        } else {
            let nc = self.c * self.rot_c - self.s * self.rot_s;
            let ns = self.s * self.rot_c + self.c * self.rot_s;
            self.c = nc;
            self.s = ns;
        }
        c
    }

    pub(crate) fn theta(&self) -> R {
        self.theta
    }
}

/// Lyapunov exponent estimate of one orbit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LyapunovEstimate<R> {
    /// Average of `log|∂_x f|` per family step.
    pub lambda: R,
    pub escaped: bool,
    /// State at the end of the run.
    pub last: CylinderState<R>,
}

/// `Λ = (1/iters) Σ log|cocycle_derivative|` after `transient` steps.
pub fn lyapunov_exponent<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    transient: usize,
    iters: usize,
    seed: CylinderState<R>,
) -> LyapunovEstimate<R> {
    run_orbit(family, p, transient, iters, seed, |_| {})
}

/// Orbit loop behind [`lyapunov_exponent`]; `observe` sees every
/// post-transient state (one per family step) before it is mapped.
pub(crate) fn run_orbit<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    transient: usize,
    iters: usize,
    seed: CylinderState<R>,
    mut observe: impl FnMut(CylinderState<R>),
) -> LyapunovEstimate<R> {
    let depth = family.composition_depth as usize;
    let mut stream = ForcingStream::new(seed.theta, family.base_omega);
    let mut x = seed.x;
    let bound = R::from_f64(ESCAPE_BOUND);
    let tiny = R::from_f64(f64::MIN_POSITIVE);
    for _ in 0..transient * depth {
        let g = family.forcing_from_cos(p.epsilon, stream.next_cos());
        x = g.apply(p.alpha, x);
        if !(x.abs() <= bound) {
            return escaped(stream.theta(), x);
        }
    }
    // log of products over blocks keeps the cost of ln low
    let mut sum = R::zero();
    let mut block = R::one();
    let mut in_block = 0;
    for _ in 0..iters {
        observe(CylinderState { theta: stream.theta(), x });
        for _ in 0..depth {
            let g = family.forcing_from_cos(p.epsilon, stream.next_cos());
            block *= g.derivative(p.alpha, x).abs().max(tiny);
            in_block += 1;
            x = g.apply(p.alpha, x);
            if !(x.abs() <= bound) {
                return escaped(stream.theta(), x);
            }
            if in_block == 16 || block.to_f64() < 1e-200 || block.to_f64() > 1e200 {
                sum += block.ln();
                block = R::one();
                in_block = 0;
            }
        }
    }
    sum += block.ln();
    LyapunovEstimate {
        lambda: sum / R::from_usize(iters.max(1)),
        escaped: false,
        last: CylinderState { theta: stream.theta(), x },
    }
}

fn escaped<R: Real>(theta: R, x: R) -> LyapunovEstimate<R> {
    LyapunovEstimate { lambda: R::zero(), escaped: true, last: CylinderState { theta, x } }
}

/// Rotation numbers written as exact expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaSpec {
    /// `(√5 − 1)/2`
    Golden,
    /// `2·(√5 − 1)/2`
    TwoGolden,
    /// `4·(√5 − 1)/2`
    FourGolden,
    /// `√5/2`
    Sqrt5Over2,
    /// A decimal literal, kept verbatim.
    Decimal(String),
    /// `k·ω` for another expression, written `k*token`.
    Multiple(u64, Box<OmegaSpec>),
}

impl OmegaSpec {
    /// Value as given (before reduction mod 1).
    pub fn value<R: Real>(&self) -> Result<R> {
        let golden = || (R::from_f64(5.0).sqrt() - R::one()) * R::half();
        Ok(match self {
            OmegaSpec::Golden => golden(),
            OmegaSpec::TwoGolden => golden() * R::from_f64(2.0),
            OmegaSpec::FourGolden => golden() * R::from_f64(4.0),
            OmegaSpec::Sqrt5Over2 => R::from_f64(5.0).sqrt() * R::half(),
            OmegaSpec::Decimal(s) => parse_real(s).map_err(|e| Error::Config(e.to_string()))?,
            OmegaSpec::Multiple(k, inner) => inner.value::<R>()? * R::from_f64(*k as f64),
        })
    }

    /// The expression for `2ω`, when it has a token of its own.
    pub fn doubled(&self) -> OmegaSpec {
        match self {
            OmegaSpec::Golden => OmegaSpec::TwoGolden,
            OmegaSpec::TwoGolden => OmegaSpec::FourGolden,
            OmegaSpec::Multiple(k, inner) => OmegaSpec::Multiple(2 * k, inner.clone()),
            other => OmegaSpec::Multiple(2, Box::new(other.clone())),
        }
    }

    pub fn token(&self) -> String {
        match self {
            OmegaSpec::Golden => "golden".into(),
            OmegaSpec::TwoGolden => "2golden".into(),
            OmegaSpec::FourGolden => "4golden".into(),
            OmegaSpec::Sqrt5Over2 => "sqrt5over2".into(),
            OmegaSpec::Decimal(s) => s.clone(),
            OmegaSpec::Multiple(k, inner) => format!("{k}*{}", inner.token()),
        }
    }
}

impl FromStr for OmegaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Ok(match t {
            "golden" => OmegaSpec::Golden,
            "2golden" => OmegaSpec::TwoGolden,
            "4golden" => OmegaSpec::FourGolden,
            "sqrt5over2" => OmegaSpec::Sqrt5Over2,
            _ if t.contains('*') => {
                let (k, rest) = t.split_once('*').unwrap_or_default();
                let k: u64 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad multiplier in rotation number `{t}`")))?;
                OmegaSpec::Multiple(k, Box::new(rest.parse()?))
            }
            _ => {
                parse_real::<f64>(t).map_err(|e| Error::Config(e.to_string()))?;
                OmegaSpec::Decimal(t.to_string())
            }
        })
    }
}

impl fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unimodal::{iterate_with_multiplier, logistic_eval};
    use rand::{Rng, SeedableRng};

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    fn fam(kind: ForcingKind, e: f64) -> ForcedFamily<f64> {
        ForcedFamily::new(golden(), ForcingSpec { kind, e }).unwrap()
    }

    #[test]
    fn unforced_step_is_logistic() {
        let f = fam(ForcingKind::MultiplicativeCos, 0.0);
        let p = ParamPoint::new(3.3, 0.0);
        for &t in &[0.0, 0.3, 0.77] {
            let s = map_step(&f, &p, CylinderState::new(t, 0.41));
            assert_eq!(s.x, logistic_eval(3.3, 0.41));
            assert!((s.theta - (t + golden()).fract()).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_additive_forcing() {
        let f = fam(ForcingKind::AdditiveCos, 0.0);
        let s = map_step(&f, &ParamPoint::new(0.0, 1.0), CylinderState::new(0.0, 0.3));
        assert_eq!(s.x, 1.0);
    }

    #[test]
    fn two_harmonic_with_zero_weight_is_additive() {
        let a = fam(ForcingKind::AdditiveCos, 0.0);
        let b = fam(ForcingKind::AdditiveTwoHarmonic, 0.0);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let p = ParamPoint::new(rng.gen_range(0.0..4.0), rng.gen_range(-0.2..0.2));
            let s = CylinderState::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert_eq!(map_step(&a, &p, s), map_step(&b, &p, s));
        }
    }

    #[test]
    fn cocycle_examples() {
        let f = fam(ForcingKind::MultiplicativeCos, 0.0);
        for &t in &[0.0, 0.2, 0.9] {
            let d = cocycle_derivative(&f, &ParamPoint::new(3.1, 0.3), CylinderState::new(t, 0.5));
            assert_eq!(d, 0.0);
        }
        let a = fam(ForcingKind::AdditiveCos, 0.0);
        for &t in &[0.0, 0.6] {
            let d = cocycle_derivative(&a, &ParamPoint::new(2.5, 0.1), CylinderState::new(t, 0.6));
            assert!((d + 0.5).abs() < 1e-15);
        }
        let f2 = double_map(&f);
        let d = cocycle_derivative(&f2, &ParamPoint::new(2.5, 0.0), CylinderState::new(0.1, 0.6));
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lyapunov_unforced_values() {
        let f = fam(ForcingKind::MultiplicativeCos, 0.0);
        let seed = CylinderState::new(0.0, 0.3);
        let l = lyapunov_exponent(&f, &ParamPoint::new(2.5, 0.0), 1000, 10000, seed);
        assert!(!l.escaped && (l.lambda - 0.5f64.ln()).abs() < 1e-3);
        let l = lyapunov_exponent(&f, &ParamPoint::new(3.2, 0.0), 1000, 10000, seed);
        assert!((l.lambda - 0.16f64.ln() / 2.0).abs() < 1e-3);
        let l = lyapunov_exponent(&f, &ParamPoint::new(4.5, 0.0), 10, 100, CylinderState::new(0.0, 0.5));
        assert!(l.escaped);
    }

    #[test]
    fn doubling_rotation_and_composition() {
        let f = fam(ForcingKind::MultiplicativeCos, 0.0);
        let f2 = double_map(&f);
        assert!((f2.omega() - (5f64.sqrt() - 2.0)).abs() < 1e-15);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for kind in [ForcingKind::MultiplicativeCos, ForcingKind::AdditiveCos, ForcingKind::AdditiveTwoHarmonic] {
            let f = fam(kind, 0.3);
            let f2 = double_map(&f);
            for _ in 0..100 {
                let p = ParamPoint::new(rng.gen_range(2.0..4.0), rng.gen_range(0.0..0.3));
                let s = CylinderState::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let two = map_step(&f, &p, map_step(&f, &p, s));
                assert_eq!(map_step(&f2, &p, s), two);
            }
        }
    }

    #[test]
    fn unforced_lyapunov_matches_one_dimensional_average() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for kind in [ForcingKind::MultiplicativeCos, ForcingKind::AdditiveCos, ForcingKind::AdditiveTwoHarmonic] {
            let f = fam(kind, 0.2);
            for _ in 0..20 {
                let a = rng.gen_range(2.6..3.9);
                let x0 = rng.gen_range(0.05..0.95);
                let l = lyapunov_exponent(&f, &ParamPoint::new(a, 0.0), 10, 200, CylinderState::new(0.3, x0));
                let mut x = x0;
                for _ in 0..10 {
                    x = logistic_eval(a, x);
                }
                let mut sum = 0.0;
                for _ in 0..200 {
                    sum += iterate_with_multiplier(a, x, 1).1.abs().ln();
                    x = logistic_eval(a, x);
                }
                assert!((l.lambda - sum / 200.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rational_rotation_is_rejected() {
        let err = ForcedFamily::new(0.25, ForcingSpec::<f64>::multiplicative()).unwrap_err();
        assert!(matches!(err, Error::RationalRotation { p: 1, q: 4, .. }));
        assert!(ForcedFamily::new(2.0 * golden(), ForcingSpec::<f64>::additive()).is_ok());
    }

    #[test]
    fn omega_tokens() {
        let g: f64 = "golden".parse::<OmegaSpec>().unwrap().value().unwrap();
        assert!((g - golden()).abs() < 1e-16);
        let w: f64 = OmegaSpec::FourGolden.value().unwrap();
        assert!((w.fract() - (4.0 * golden()).fract()).abs() < 1e-15);
        assert_eq!("0.3".parse::<OmegaSpec>().unwrap(), OmegaSpec::Decimal("0.3".into()));
        assert!("x".parse::<OmegaSpec>().is_err());
        let d = OmegaSpec::Sqrt5Over2.doubled();
        assert_eq!(d.token(), "2*sqrt5over2");
        let back: OmegaSpec = d.token().parse().unwrap();
        assert_eq!(back, d);
        let v: f64 = back.value().unwrap();
        assert!((v - 5f64.sqrt()).abs() < 1e-15);
    }
}

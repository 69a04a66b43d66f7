//! Fourier–Newton computation of `2^n`-periodic invariant curves.
//!
//! Only the branch through the first collocation orbit (`branch0`) is an
//! unknown; it is invariant under `F^{2^n}` and the other branches are its
//! images. On the grid `θ_j = j/N` the collocation equations read
//!
//! ```text
//! x(θ_j + 2^n ω) − f^{(2^n)}(θ_j, x(θ_j)) = 0,
//! ```
//!
//! the left term evaluated from the series at the shifted node.

use crate::error::{Error, Result};
use crate::forced::{cocycle_derivative, map_step, CylinderState, ForcedFamily, ParamPoint};
use crate::numerics::fourier::{FourierCoeffs, GridSamples, Transform};
use crate::numerics::linalg::Matrix;
use crate::numerics::newton::{newton, NewtonOptions, NonlinearSystem};
use crate::numerics::scalar::{Precision, Real};
use crate::unimodal::logistic_eval;

/// Solver settings shared by curve solves and branch continuation.
#[derive(Clone, Copy, Debug)]
pub struct CurveOptions {
    /// Sup-norm residual target at low period; see [`CurveOptions::tol_for`].
    pub solve_tol: f64,
    pub max_iter: usize,
    pub tail_tol: f64,
    pub sep_tol: f64,
    pub n_max: usize,
    pub zero_tol: f64,
    /// Overrides the default initial mode count `32·2^{⌈n/2⌉}`.
    pub n_modes: Option<usize>,
}

impl CurveOptions {
    pub fn for_precision(p: Precision) -> Self {
        Self {
            solve_tol: match p {
                Precision::Standard => 1e-12,
                Precision::Extended => 1e-25,
            },
            max_iter: 30,
            tail_tol: 1e-3,
            sep_tol: 1e-6,
            n_max: 2048,
            zero_tol: match p {
                Precision::Standard => 1e-10,
                Precision::Extended => 1e-20,
            },
            n_modes: None,
        }
    }

    pub fn standard() -> Self {
        Self::for_precision(Precision::Standard)
    }

    pub fn extended() -> Self {
        Self::for_precision(Precision::Extended)
    }

    /// Initial collocation size for period `2^n` (base-map exponent).
    pub fn initial_modes(&self, n: u32) -> usize {
        let default = 32usize << n.div_ceil(2);
        self.n_modes.unwrap_or(default).min(self.n_max)
    }

    /// Residual tolerance for a period of `2^n` base steps. The composed map
    /// amplifies rounding roughly like `4^{n}`, so beyond `n = 6` the target
    /// is relaxed by that factor.
    pub fn tol_for<R: Real>(&self, n: u32) -> R {
        let scale = if n > 6 { 4f64.powi(n as i32 - 6) } else { 1.0 };
        R::from_f64(self.solve_tol * scale)
    }
}

/// A truncated Fourier series `x(θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCurve<R> {
    pub coeffs: FourierCoeffs<R>,
}

impl<R: Real> FourierCurve<R> {
    pub fn constant(n_modes: usize, value: R) -> Result<Self> {
        Ok(Self { coeffs: FourierCoeffs::constant(n_modes, value)? })
    }

    pub fn from_coeffs(coeffs: FourierCoeffs<R>) -> Self {
        Self { coeffs }
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.grid_len()
    }

    pub fn eval(&self, theta: R) -> R {
        self.coeffs.eval(theta)
    }

    /// `(x, x', x'')` at `theta`.
    pub fn eval_with_derivatives(&self, theta: R) -> (R, R, R) {
        self.coeffs.eval_with_derivatives(theta)
    }

    /// Largest harmonic magnitude above `N/4` relative to the largest overall.
    pub fn tail_ratio(&self) -> f64 {
        let kmax = self.coeffs.max_harmonic();
        let mags: Vec<f64> = (0..=kmax).map(|k| self.coeffs.harmonic_magnitude(k).to_f64()).collect();
        let top = mags.iter().cloned().fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        let tail = mags[self.n_modes() / 4 + 1..].iter().cloned().fold(0.0, f64::max);
        tail / top
    }

    /// Samples on an `m`-point uniform grid (`m` a power of two).
    pub fn sample(&self, m: usize) -> Result<GridSamples<R>> {
        GridSamples::from_fn(m, |t| self.eval(t))
    }

    pub fn resized(&self, n: usize) -> Result<Self> {
        Ok(Self { coeffs: self.coeffs.resized(n)? })
    }
}

/// Derivatives of the `P`-step orbit from one collocation node.
#[derive(Clone, Copy, Debug, Default)]
pub struct OrbitJet<R> {
    /// `x_P`
    pub x: R,
    /// `m = ∂x_P/∂x_0`, the cocycle
    pub m: R,
    /// `∂x_P/∂α`
    pub a: R,
    /// `∂m/∂x_0`
    pub dm: R,
    /// `∂m/∂α`
    pub ma: R,
}

/// Precomputed tables for collocation at one `(family, n, N)`.
#[derive(Clone, Debug)]
pub struct CurveGrid<R> {
    family: ForcedFamily<R>,
    n: u32,
    steps: usize,
    n_grid: usize,
    b0: Vec<R>,
    bs: Vec<R>,
    cosines: Vec<R>,
}

impl<R: Real> CurveGrid<R> {
    pub fn new(family: &ForcedFamily<R>, n: u32, n_grid: usize) -> Result<Self> {
        let transform = Transform::new(n_grid)?;
        let steps = family.base_steps(n);
        let w = family.base_omega();
        let tau = (R::from_usize(steps) * w).fract_turns();
        let b0 = transform.shifted_basis(R::zero());
        let bs = transform.shifted_basis(tau);
        let mut cosines = Vec::with_capacity(n_grid * steps);
        for j in 0..n_grid {
            let t = transform.node(j);
            for i in 0..steps {
                cosines.push((t + (R::from_usize(i) * w).fract_turns()).fract_turns().cos_turns());
            }
        }
        Ok(Self { family: *family, n, steps, n_grid, b0, bs, cosines })
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn period_exponent(&self) -> u32 {
        self.n
    }

    pub fn family(&self) -> &ForcedFamily<R> {
        &self.family
    }

    pub fn node(&self, j: usize) -> R {
        R::from_usize(j) / R::from_usize(self.n_grid)
    }

    fn matvec(&self, b: &[R], v: &[R]) -> Vec<R> {
        let n = self.n_grid;
        (0..n).map(|j| b[j * n..(j + 1) * n].iter().zip(v).map(|(a, c)| *a * *c).sum()).collect()
    }

    /// Curve values at the nodes.
    pub fn node_values(&self, v: &[R]) -> Vec<R> {
        self.matvec(&self.b0, v)
    }

    /// Curve values at the nodes shifted by `2^n ω`.
    pub fn shifted_values(&self, v: &[R]) -> Vec<R> {
        self.matvec(&self.bs, v)
    }

    /// Orbit of `(θ_j, x0)` over one period with its parameter derivatives.
    pub fn orbit(&self, j: usize, x0: R, p: &ParamPoint<R>) -> OrbitJet<R> {
        let mut s = OrbitJet { x: x0, m: R::one(), a: R::zero(), dm: R::zero(), ma: R::zero() };
        for &c in &self.cosines[j * self.steps..(j + 1) * self.steps] {
            let g = self.family.forcing_from_cos(p.epsilon, c);
            let jet = g.jet(p.alpha, s.x);
            s = OrbitJet {
                x: jet.f,
                m: s.m * jet.fx,
                a: jet.fx * s.a + jet.falpha,
                dm: s.dm * jet.fx + s.m * s.m * jet.fxx,
                ma: s.ma * jet.fx + s.m * (jet.fxx * s.a + jet.fxalpha),
            };
        }
        s
    }

    /// Orbit jets from every node.
    pub fn orbits(&self, v: &[R], p: &ParamPoint<R>) -> Vec<OrbitJet<R>> {
        self.node_values(v).into_iter().enumerate().map(|(j, x0)| self.orbit(j, x0, p)).collect()
    }

    /// Invariance residual at the nodes.
    pub fn residual(&self, v: &[R], p: &ParamPoint<R>) -> Vec<R> {
        let shifted = self.shifted_values(v);
        let x0 = self.node_values(v);
        x0.into_iter()
            .enumerate()
            .map(|(j, x)| shifted[j] - self.orbit(j, x, p).x)
            .collect()
    }

    /// Writes the invariance rows (and, if requested, the `∂/∂α` column)
    /// into the top `N` rows of `jac`; returns the residual and orbit jets.
    pub fn fill_invariance(
        &self,
        v: &[R],
        p: &ParamPoint<R>,
        jac: &mut Matrix<R>,
        alpha_col: Option<usize>,
    ) -> (Vec<R>, Vec<OrbitJet<R>>) {
        let n = self.n_grid;
        let shifted = self.shifted_values(v);
        let jets = self.orbits(v, p);
        let mut res = Vec::with_capacity(n);
        for (j, jet) in jets.iter().enumerate() {
            res.push(shifted[j] - jet.x);
            let row = jac.row_mut(j);
            let bs = &self.bs[j * n..(j + 1) * n];
            let b0 = &self.b0[j * n..(j + 1) * n];
            for k in 0..n {
                row[k] = bs[k] - jet.m * b0[k];
            }
            if let Some(c) = alpha_col {
                row[c] = -jet.a;
            }
        }
        (res, jets)
    }

    /// Basis at the nodes (row-major `N×N`).
    pub fn node_basis(&self) -> &[R] {
        &self.b0
    }
}

/// Invariance equations at fixed `(α, ε)`.
struct FixedParamSystem<'a, R> {
    grid: &'a CurveGrid<R>,
    p: ParamPoint<R>,
}

impl<R: Real> NonlinearSystem<R> for FixedParamSystem<'_, R> {
    fn dim(&self) -> usize {
        self.grid.n_grid()
    }

    fn residual(&self, v: &[R]) -> Result<Vec<R>> {
        Ok(self.grid.residual(v, &self.p))
    }

    fn jacobian(&self, v: &[R]) -> Result<Matrix<R>> {
        let mut jac = Matrix::zeros(self.grid.n_grid());
        self.grid.fill_invariance(v, &self.p, &mut jac, None);
        Ok(jac)
    }
}

/// A solved `2^n`-periodic invariant curve.
#[derive(Clone, Debug)]
pub struct PeriodicInvariantCurve<R> {
    pub period_exponent: u32,
    pub branch0: FourierCurve<R>,
    pub params: ParamPoint<R>,
    pub family: ForcedFamily<R>,
    pub residual_norm: R,
}

impl<R: Real> PeriodicInvariantCurve<R> {
    /// Number of family steps in one period.
    pub fn period(&self) -> usize {
        1usize << self.period_exponent
    }

    /// Value of branch `i` (the image of branch0 under `F^i`) at `theta`.
    pub fn branch_value(&self, i: usize, theta: R) -> R {
        let back = (theta - R::from_usize(i) * self.family.omega()).fract_turns();
        let mut s = CylinderState::new(back, self.branch0.eval(back));
        for _ in 0..i {
            s = map_step(&self.family, &self.params, s);
        }
        s.x
    }
}

/// A constant curve at a point of the attracting `2^n`-cycle of the
/// unforced logistic map at `alpha`, suitable as an `ε = 0` initial guess.
pub fn unforced_cycle_point<R: Real>(alpha: R, n: u32) -> R {
    let period = 1usize << n;
    let mut x = R::half();
    for _ in 0..(1usize << 14).max(64 * period) {
        x = logistic_eval(alpha, x);
    }
    // polish with Newton on f^P(x) = x
    for _ in 0..50 {
        let (mut y, mut d) = (x, R::one());
        for _ in 0..period {
            d *= alpha * (R::one() - y - y);
            y = logistic_eval(alpha, y);
        }
        let den = d - R::one();
        if den == R::zero() {
            break;
        }
        let step = (y - x) / den;
        x -= step;
        if step.abs() <= R::epsilon() * R::from_f64(4.0) {
            break;
        }
    }
    // report the branch point closest to the critical point
    let mut best = x;
    let mut y = x;
    for _ in 0..period {
        y = logistic_eval(alpha, y);
        if (y - R::half()).abs() < (best - R::half()).abs() {
            best = y;
        }
    }
    best
}

/// Newton-solves the invariance equations on one grid.
pub fn solve_on_grid<R: Real>(
    grid: &CurveGrid<R>,
    p: &ParamPoint<R>,
    initial: &FourierCurve<R>,
    opts: &CurveOptions,
) -> Result<(FourierCurve<R>, R)> {
    let sys = FixedParamSystem { grid, p: *p };
    let x0 = initial.resized(grid.n_grid())?.coeffs.to_vec();
    let tol = opts.tol_for(grid.family().effective_exponent(grid.period_exponent()));
    let sol = newton(&sys, x0, &NewtonOptions::new(tol, opts.max_iter))?;
    Ok((FourierCurve::from_coeffs(FourierCoeffs::from_vec(&sol.x)?), sol.residual_norm))
}

/// Sup distance between branch0 and branch `2^{n-1}`, the smallest shift
/// that would coincide if the period were not minimal.
pub fn half_period_separation<R: Real>(curve: &PeriodicInvariantCurve<R>, samples: usize) -> R {
    if curve.period_exponent == 0 {
        return R::from_f64(f64::INFINITY);
    }
    let half = curve.period() / 2;
    (0..samples)
        .map(|j| {
            let t = R::from_usize(j) / R::from_usize(samples);
            (curve.branch_value(half, t) - curve.branch0.eval(t)).abs()
        })
        .fold(R::zero(), |a, b| a.max(b))
}

/// Solves for the `2^n`-periodic invariant curve at `p`, doubling the mode
/// count while the spectral tail is too heavy.
pub fn solve_invariant_curve<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    n: u32,
    initial: &FourierCurve<R>,
    opts: &CurveOptions,
) -> Result<PeriodicInvariantCurve<R>> {
    let mut n_grid = opts.initial_modes(family.effective_exponent(n)).max(initial.n_modes());
    let mut guess = initial.clone();
    loop {
        let grid = CurveGrid::new(family, n, n_grid)?;
        let (curve, residual_norm) = solve_on_grid(&grid, p, &guess, opts)?;
        if curve.tail_ratio() <= opts.tail_tol {
            let out = PeriodicInvariantCurve {
                period_exponent: n,
                branch0: curve,
                params: *p,
                family: *family,
                residual_norm,
            };
            if n > 0 {
                let sep = half_period_separation(&out, 64);
                if sep.to_f64() < opts.sep_tol {
                    return Err(Error::MinimalPeriodViolation { requested: n, found: n - 1 });
                }
            }
            return Ok(out);
        }
        if n_grid * 2 > opts.n_max {
            return Err(Error::ModeBudgetExceeded { n_max: opts.n_max });
        }
        n_grid *= 2;
        guess = curve;
    }
}

/// Follows the invariant curve at fixed `alpha` through increasing `ε`
/// targets starting from `ε = 0`, halving steps on failure.
pub fn continue_in_epsilon<R: Real>(
    family: &ForcedFamily<R>,
    alpha: R,
    n: u32,
    eps_targets: &[R],
    opts: &CurveOptions,
) -> Result<Vec<PeriodicInvariantCurve<R>>> {
    let n_eff = family.effective_exponent(n);
    let n0 = opts.initial_modes(n_eff);
    let seed = FourierCurve::constant(n0, unforced_cycle_point(alpha, n_eff))?;
    let mut current = solve_invariant_curve(family, &ParamPoint::new(alpha, R::zero()), n, &seed, opts)?;
    let first_positive = eps_targets.iter().copied().find(|e| *e > R::zero());
    let min_step = first_positive.map(|e| e / R::from_f64(1024.0)).unwrap_or(R::zero());
    let mut out = Vec::with_capacity(eps_targets.len());
    for &target in eps_targets {
        let mut step = target - current.params.epsilon;
        while current.params.epsilon < target {
            let eps = if current.params.epsilon + step > target { target } else { current.params.epsilon + step };
            let p = ParamPoint::new(alpha, eps);
            match solve_invariant_curve(family, &p, n, &current.branch0, opts) {
                Ok(c) => current = c,
                Err(Error::NoConvergence { .. }) | Err(Error::SingularSystem { .. }) => {
                    step = step * R::half();
                    if step < min_step {
                        return Err(Error::StepUnderflow { eps: eps.to_f64() });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// Derivative cocycle `m(θ_j)` over one period along the curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleSamples<R> {
    pub values: GridSamples<R>,
}

/// `m(θ_j) = ∏_{k<2^n} ∂_x f(F^k(θ_j, x(θ_j)))` on the curve's grid.
pub fn curve_cocycle<R: Real>(curve: &PeriodicInvariantCurve<R>) -> Result<CocycleSamples<R>> {
    let n_grid = curve.branch0.n_modes();
    let values = GridSamples::from_fn(n_grid, |t| {
        let mut s = CylinderState::new(t, curve.branch0.eval(t));
        let mut m = R::one();
        for _ in 0..curve.period() {
            m *= cocycle_derivative(&curve.family, &curve.params, s);
            s = map_step(&curve.family, &curve.params, s);
        }
        m
    })?;
    Ok(CocycleSamples { values })
}

/// Reducibility of the linearization along a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reducibility {
    Reducible,
    Nonreducible,
}

/// Reducible iff the cocycle stays away from zero and keeps one sign.
pub fn reducibility_status<R: Real>(m: &CocycleSamples<R>, zero_tol: f64) -> Reducibility {
    let v = m.values.values();
    let min_abs = v.iter().map(|x| x.abs().to_f64()).fold(f64::INFINITY, f64::min);
    let pos = v.iter().all(|x| *x > R::zero());
    let neg = v.iter().all(|x| *x < R::zero());
    if min_abs > zero_tol && (pos || neg) {
        Reducibility::Reducible
    } else {
        Reducibility::Nonreducible
    }
}

/// Mean of `log|m(θ_j)|`, the curve's Lyapunov exponent over one period.
pub fn cocycle_mean_log<R: Real>(m: &CocycleSamples<R>) -> R {
    let v = m.values.values();
    v.iter().map(|x| x.abs().ln()).sum::<R>() / R::from_usize(v.len())
}

/// Sup-norm of the invariance residual of a curve, recomputed from scratch.
pub fn invariance_residual<R: Real>(
    family: &ForcedFamily<R>,
    p: &ParamPoint<R>,
    n: u32,
    curve: &FourierCurve<R>,
) -> Result<GridSamples<R>> {
    let grid = CurveGrid::new(family, n, curve.n_modes())?;
    GridSamples::new(grid.residual(&curve.coeffs.to_vec(), p))
}

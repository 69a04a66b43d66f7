//! Defining systems and continuation in `ε` of reducibility-loss branches
//! `S_n^±` and zero-Lyapunov (period-doubling) curves.
//!
//! Reducibility is lost where the derivative cocycle along the attracting
//! curve first vanishes: the critical branch becomes tangent to the critical
//! line `x = 1/2`. The defining system appends two equations to the
//! collocation rows,
//!
//! ```text
//! x(θ*) − 1/2 = 0,   x'(θ*) = 0,
//! ```
//!
//! with `α` and `θ*` as extra unknowns.

use crate::curve::{solve_invariant_curve, unforced_cycle_point, CurveGrid, CurveOptions, FourierCurve};
use crate::error::{Error, Result};
use crate::forced::{ForcedFamily, ParamPoint};
use crate::numerics::fourier::{BasisRow, FourierCoeffs};
use crate::numerics::linalg::{max_abs, Matrix};
use crate::numerics::newton::{newton, NewtonOptions, NonlinearSystem};
use crate::numerics::scalar::Real;
use crate::unimodal::{cascade, superstable_sequence};

/// Which side of `s_n` a reducibility-loss branch lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `S_n^−`, the branch with the smaller `α`.
    Minus,
    /// `S_n^+`
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    ReducibilityLossMinus,
    ReducibilityLossPlus,
    ZeroLyapunov,
}

/// One continuation point.
#[derive(Clone, Debug)]
pub struct BranchPoint<R> {
    pub params: ParamPoint<R>,
    pub theta_star: Option<R>,
    pub residual_norm: R,
    pub curve: FourierCurve<R>,
}

/// A polyline in the `(α, ε)` plane, ordered by increasing `ε`.
#[derive(Clone, Debug)]
pub struct BifurcationBranch<R> {
    pub kind: BranchKind,
    pub period_exponent: u32,
    /// `s_n` (reducibility loss) or `d_n` (zero Lyapunov) of the base map.
    pub anchor: R,
    pub points: Vec<BranchPoint<R>>,
}

impl<R: Real> BifurcationBranch<R> {
    /// `α` at a given schedule value, if traced.
    pub fn alpha_at(&self, eps: R) -> Option<R> {
        self.points.iter().find(|p| p.params.epsilon == eps).map(|p| p.params.alpha)
    }
}

/// Reducibility-loss system in `X = (coeffs, α, θ*)` at fixed `ε`.
pub struct ReducibilitySystem<'a, R> {
    grid: &'a CurveGrid<R>,
    epsilon: R,
}

impl<'a, R: Real> ReducibilitySystem<'a, R> {
    pub fn new(grid: &'a CurveGrid<R>, epsilon: R) -> Self {
        Self { grid, epsilon }
    }

    fn split<'x>(&self, x: &'x [R]) -> (&'x [R], R, R) {
        let n = self.grid.n_grid();
        (&x[..n], x[n], x[n + 1])
    }
}

impl<R: Real> NonlinearSystem<R> for ReducibilitySystem<'_, R> {
    fn dim(&self) -> usize {
        self.grid.n_grid() + 2
    }

    fn residual(&self, x: &[R]) -> Result<Vec<R>> {
        let (v, alpha, theta) = self.split(x);
        let p = ParamPoint::new(alpha, self.epsilon);
        let mut r = self.grid.residual(v, &p);
        let (val, d1, _) = FourierCoeffs::from_vec(v)?.eval_with_derivatives(theta);
        r.push(val - R::half());
        r.push(d1);
        Ok(r)
    }

    fn jacobian(&self, x: &[R]) -> Result<Matrix<R>> {
        Ok(self.residual_and_jacobian(x)?.1)
    }

    fn residual_and_jacobian(&self, x: &[R]) -> Result<(Vec<R>, Matrix<R>)> {
        let n = self.grid.n_grid();
        let (v, alpha, theta) = self.split(x);
        let p = ParamPoint::new(alpha, self.epsilon);
        let mut jac = Matrix::zeros(n + 2);
        let (mut r, _) = self.grid.fill_invariance(v, &p, &mut jac, Some(n));
        let row = BasisRow::at(n, theta);
        let dot = |b: &[R]| b.iter().zip(v).map(|(a, c)| *a * *c).sum::<R>();
        let (val, d1, d2) = (dot(&row.value), dot(&row.d1), dot(&row.d2));
        r.push(val - R::half());
        r.push(d1);
        jac.row_mut(n)[..n].copy_from_slice(&row.value);
        jac[(n, n + 1)] = d1;
        jac.row_mut(n + 1)[..n].copy_from_slice(&row.d1);
        jac[(n + 1, n + 1)] = d2;
        Ok((r, jac))
    }
}

/// Zero-Lyapunov system in `X = (coeffs, α)` at fixed `ε`.
pub struct ZeroLyapunovSystem<'a, R> {
    grid: &'a CurveGrid<R>,
    epsilon: R,
    zero_tol: f64,
}

impl<'a, R: Real> ZeroLyapunovSystem<'a, R> {
    pub fn new(grid: &'a CurveGrid<R>, epsilon: R, zero_tol: f64) -> Self {
        Self { grid, epsilon, zero_tol }
    }

    fn eval(&self, x: &[R], want_jac: bool) -> Result<(Vec<R>, Option<Matrix<R>>)> {
        let n = self.grid.n_grid();
        let p = ParamPoint::new(x[n], self.epsilon);
        let v = &x[..n];
        let mut jac = Matrix::zeros(n + 1);
        let (mut r, jets) = if want_jac {
            self.grid.fill_invariance(v, &p, &mut jac, Some(n))
        } else {
            let jets = self.grid.orbits(v, &p);
            let shifted = self.grid.shifted_values(v);
            (shifted.iter().zip(&jets).map(|(s, j)| *s - j.x).collect(), jets)
        };
        if let Some(small) = jets.iter().map(|j| j.m.abs()).find(|m| m.to_f64() < self.zero_tol) {
            return Err(Error::LogSingularity { value: small.to_f64() });
        }
        let inv_n = R::one() / R::from_usize(n);
        r.push(jets.iter().map(|j| j.m.abs().ln()).sum::<R>() * inv_n);
        if !want_jac {
            return Ok((r, None));
        }
        let b0 = self.grid.node_basis();
        let last = jac.row_mut(n);
        for (j, jet) in jets.iter().enumerate() {
            let w = jet.dm / jet.m * inv_n;
            for (dst, b) in last[..n].iter_mut().zip(&b0[j * n..(j + 1) * n]) {
                *dst += w * *b;
            }
            last[n] += jet.ma / jet.m * inv_n;
        }
        Ok((r, Some(jac)))
    }
}

impl<R: Real> NonlinearSystem<R> for ZeroLyapunovSystem<'_, R> {
    fn dim(&self) -> usize {
        self.grid.n_grid() + 1
    }

    fn residual(&self, x: &[R]) -> Result<Vec<R>> {
        Ok(self.eval(x, false)?.0)
    }

    fn jacobian(&self, x: &[R]) -> Result<Matrix<R>> {
        self.eval(x, true)?.1.ok_or_else(|| Error::Structural("missing Jacobian".into()))
    }
}

/// Residual of the reducibility-loss system at `X = (coeffs, α, θ*)`.
pub fn reducibility_loss_residual<R: Real>(
    x: &[R],
    epsilon: R,
    family: &ForcedFamily<R>,
    n: u32,
) -> Result<Vec<R>> {
    let grid = CurveGrid::new(family, n, x.len() - 2)?;
    ReducibilitySystem::new(&grid, epsilon).residual(x)
}

/// Residual of the zero-Lyapunov system at `X = (coeffs, α)`.
pub fn zero_lyapunov_residual<R: Real>(
    x: &[R],
    epsilon: R,
    family: &ForcedFamily<R>,
    n: u32,
    zero_tol: f64,
) -> Result<Vec<R>> {
    let grid = CurveGrid::new(family, n, x.len() - 1)?;
    ZeroLyapunovSystem::new(&grid, epsilon, zero_tol).residual(x)
}

/// Angles of the global maximum and minimum of a curve, located on a fine
/// sampling grid.
fn extremal_angles<R: Real>(curve: &FourierCurve<R>) -> (R, R) {
    let m = (curve.n_modes() * 16).max(256);
    let samples: Vec<R> = (0..m).map(|j| curve.eval(R::from_usize(j) / R::from_usize(m))).collect();
    let arg = |better: &dyn Fn(R, R) -> bool| {
        let mut best = 0;
        for j in 1..m {
            if better(samples[j], samples[best]) {
                best = j;
            }
        }
        R::from_usize(best) / R::from_usize(m)
    };
    (arg(&|a, b| a > b), arg(&|a, b| a < b))
}

fn pack<R: Real>(curve: &FourierCurve<R>, extra: &[R]) -> Vec<R> {
    let mut v = curve.coeffs.to_vec();
    v.extend_from_slice(extra);
    v
}

fn unpack_curve<R: Real>(x: &[R], n: usize) -> Result<FourierCurve<R>> {
    Ok(FourierCurve::from_coeffs(FourierCoeffs::from_vec(&x[..n])?))
}

/// Secant (or constant) predictor in `ε`.
fn predict<R: Real>(history: &[(R, Vec<R>)], eps: R) -> Vec<R> {
    let k = history.len();
    if k < 2 {
        return history[0].1.clone();
    }
    let (e0, x0) = &history[k - 2];
    let (e1, x1) = &history[k - 1];
    let t = (eps - *e1) / (*e1 - *e0);
    x1.iter().zip(x0).map(|(a, b)| *a + t * (*a - *b)).collect()
}

/// Continues a solution of a parameterized system through the schedule,
/// bisecting the `ε` step on failure down to `min_step`.
fn continue_system<R, S, F>(
    make: F,
    schedule: &[R],
    mut history: Vec<(R, Vec<R>)>,
    tol: R,
    opts: &CurveOptions,
) -> Result<Vec<(R, Vec<R>, R)>>
where
    R: Real,
    S: NonlinearSystem<R>,
    F: Fn(R) -> S,
{
    let first_positive = schedule.iter().copied().find(|e| *e > R::zero()).unwrap_or(R::one());
    let min_step = first_positive / R::from_f64(1024.0);
    let newton_opts = NewtonOptions::new(tol, opts.max_iter);
    let mut out = Vec::with_capacity(schedule.len());
    for &target in schedule {
        if let Some((e, x)) = history.last() {
            if *e == target {
                let sys = make(target);
                let norm = max_abs(&sys.residual(x)?);
                out.push((target, x.clone(), norm));
                continue;
            }
        }
        let mut step = target - history.last().map(|h| h.0).unwrap_or(R::zero());
        loop {
            let last_eps = history.last().map(|h| h.0).unwrap_or(R::zero());
            let eps = if last_eps + step >= target { target } else { last_eps + step };
            let sys = make(eps);
            match newton(&sys, predict(&history, eps), &newton_opts) {
                Ok(sol) => {
                    history.push((eps, sol.x.clone()));
                    if eps == target {
                        out.push((eps, sol.x, sol.residual_norm));
                        break;
                    }
                }
                Err(Error::NoConvergence { .. }) | Err(Error::SingularSystem { .. }) => {
                    step = step * R::half();
                    if step < min_step {
                        return Err(Error::StepUnderflow { eps: eps.to_f64() });
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// The superstable parameter of the base map at the family's effective
/// cascade index.
fn anchor_superstable<R: Real>(family: &ForcedFamily<R>, n: u32) -> Result<R> {
    let n_eff = family.effective_exponent(n);
    Ok(superstable_sequence::<R>(n_eff)?[n_eff as usize])
}

/// First reducibility-loss points on both sides at `eps`, starting from the
/// curve at `(s_n, eps)`. Returns `[(α, X)]` sorted by `α` (minus first).
fn first_points<R: Real>(
    family: &ForcedFamily<R>,
    n: u32,
    s_n: R,
    eps: R,
    opts: &CurveOptions,
) -> Result<[Vec<R>; 2]> {
    let n_eff = family.effective_exponent(n);
    let seed = FourierCurve::constant(opts.initial_modes(n_eff), R::half())?;
    let curve = solve_invariant_curve(family, &ParamPoint::new(s_n, eps), n, &seed, opts)?;
    let grid = CurveGrid::new(family, n, curve.branch0.n_modes())?;
    let sys = ReducibilitySystem::new(&grid, eps);
    let tol = opts.tol_for(n_eff);
    let (tmax, tmin) = extremal_angles(&curve.branch0);
    let mut sols = Vec::with_capacity(2);
    for theta in [tmax, tmin] {
        let x0 = pack(&curve.branch0, &[s_n, theta]);
        sols.push(newton(&sys, x0, &NewtonOptions::new(tol, opts.max_iter))?.x);
    }
    let a = sols[0][grid.n_grid()];
    let b = sols[1][grid.n_grid()];
    let scale = R::one().max(s_n.abs());
    if (a - b).abs() <= tol * scale {
        return Err(Error::SideAmbiguity { alpha: a.to_f64() });
    }
    let [first, second]: [Vec<R>; 2] =
        sols.try_into().map_err(|_| Error::Structural("expected two candidates".into()))?;
    Ok(if a < b { [first, second] } else { [second, first] })
}

fn branch_from<R: Real>(
    kind: BranchKind,
    n: u32,
    anchor: R,
    n_grid: usize,
    solved: Vec<(R, Vec<R>, R)>,
    has_theta: bool,
) -> Result<BifurcationBranch<R>> {
    let points = solved
        .into_iter()
        .map(|(eps, x, res)| {
            Ok(BranchPoint {
                params: ParamPoint::new(x[n_grid], eps),
                theta_star: has_theta.then(|| x[n_grid + 1].fract_turns()),
                residual_norm: res,
                curve: unpack_curve(&x, n_grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BifurcationBranch { kind, period_exponent: n, anchor, points })
}

fn check_schedule<R: Real>(schedule: &[R], allow_zero: bool) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if !allow_zero && !(schedule[0] > R::zero()) {
        return Err(Error::Structural("schedule must start at a positive epsilon".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Structural("schedule must be strictly ascending".into()));
    }
    Ok(())
}

/// Traces `S_n^−` and `S_n^+` together over an ascending `ε` schedule.
pub fn trace_reducibility_pair<R: Real>(
    family: &ForcedFamily<R>,
    n: u32,
    eps_schedule: &[R],
    opts: &CurveOptions,
) -> Result<[BifurcationBranch<R>; 2]> {
    check_schedule(eps_schedule, false)?;
    let s_n = anchor_superstable(family, n)?;
    let [minus, plus] = first_points(family, n, s_n, eps_schedule[0], opts)?;
    let minus = trace_from(family, n, s_n, eps_schedule, minus, Side::Minus, opts)?;
    let plus = trace_from(family, n, s_n, eps_schedule, plus, Side::Plus, opts)?;
    Ok([minus, plus])
}

fn trace_from<R: Real>(
    family: &ForcedFamily<R>,
    n: u32,
    s_n: R,
    schedule: &[R],
    first: Vec<R>,
    side: Side,
    opts: &CurveOptions,
) -> Result<BifurcationBranch<R>> {
    let n_grid = first.len() - 2;
    let grid = CurveGrid::new(family, n, n_grid)?;
    let tol = opts.tol_for(family.effective_exponent(n));
    let history = vec![(schedule[0], first)];
    let solved = continue_system(|e| ReducibilitySystem::new(&grid, e), schedule, history, tol, opts)?;
    let kind = match side {
        Side::Minus => BranchKind::ReducibilityLossMinus,
        Side::Plus => BranchKind::ReducibilityLossPlus,
    };
    branch_from(kind, n, s_n, n_grid, solved, true)
}

/// Traces one reducibility-loss branch over an ascending `ε` schedule.
pub fn trace_reducibility_loss<R: Real>(
    family: &ForcedFamily<R>,
    n: u32,
    side: Side,
    eps_schedule: &[R],
    opts: &CurveOptions,
) -> Result<BifurcationBranch<R>> {
    check_schedule(eps_schedule, false)?;
    let s_n = anchor_superstable(family, n)?;
    let [minus, plus] = first_points(family, n, s_n, eps_schedule[0], opts)?;
    let first = match side {
        Side::Minus => minus,
        Side::Plus => plus,
    };
    trace_from(family, n, s_n, eps_schedule, first, side, opts)
}

/// Traces the zero-Lyapunov curve of the `2^n`-periodic invariant curve,
/// anchored at `(d_n, 0)`.
pub fn trace_zero_lyapunov<R: Real>(
    family: &ForcedFamily<R>,
    n: u32,
    eps_schedule: &[R],
    opts: &CurveOptions,
) -> Result<BifurcationBranch<R>> {
    check_schedule(eps_schedule, true)?;
    if eps_schedule[0] < R::zero() {
        return Err(Error::Structural("schedule must be nonnegative".into()));
    }
    let n_eff = family.effective_exponent(n);
    let d_n = cascade::<R>(n_eff)?.entries[n_eff as usize].d;
    let n_grid = opts.initial_modes(n_eff);
    let grid = CurveGrid::new(family, n, n_grid)?;
    let x0 = unforced_cycle_point(d_n, n_eff);
    let seed = pack(&FourierCurve::constant(n_grid, x0)?, &[d_n]);
    let tol = opts.tol_for(n_eff);
    let history = vec![(R::zero(), seed)];
    let zero_tol = opts.zero_tol;
    let mut solved = Vec::new();
    let mut schedule = eps_schedule.to_vec();
    if schedule[0] == R::zero() {
        // polish the anchor itself
        let sys = ZeroLyapunovSystem::new(&grid, R::zero(), zero_tol);
        let sol = newton(&sys, history[0].1.clone(), &NewtonOptions::new(tol, opts.max_iter))?;
        solved.push((R::zero(), sol.x.clone(), sol.residual_norm));
        schedule.remove(0);
    }
    let history = match solved.last() {
        Some((e, x, _)) => vec![(*e, x.clone())],
        None => history,
    };
    if !schedule.is_empty() {
        solved.extend(continue_system(
            |e| ZeroLyapunovSystem::new(&grid, e, zero_tol),
            &schedule,
            history,
            tol,
            opts,
        )?);
    }
    branch_from(BranchKind::ZeroLyapunov, n, d_n, n_grid, solved, false)
}

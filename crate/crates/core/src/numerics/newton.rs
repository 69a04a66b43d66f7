//! Damped Newton iteration for square nonlinear systems.

use crate::error::{Error, Result};
use crate::numerics::linalg::{max_abs, Matrix};
use crate::numerics::scalar::Real;

/// A square system `F(x) = 0`.
pub trait NonlinearSystem<R: Real> {
    fn dim(&self) -> usize;

    fn residual(&self, x: &[R]) -> Result<Vec<R>>;

    fn jacobian(&self, x: &[R]) -> Result<Matrix<R>>;

    /// Residual and Jacobian together; override when they share work.
    fn residual_and_jacobian(&self, x: &[R]) -> Result<(Vec<R>, Matrix<R>)> {
        Ok((self.residual(x)?, self.jacobian(x)?))
    }
}

/// Iteration controls.
#[derive(Clone, Copy, Debug)]
pub struct NewtonOptions<R> {
    pub tol: R,
    pub max_iter: usize,
    /// Maximum number of step halvings per iteration.
    pub max_halvings: u32,
}

impl<R: Real> NewtonOptions<R> {
    pub fn new(tol: R, max_iter: usize) -> Self {
        Self { tol, max_iter, max_halvings: 8 }
    }
}

/// Converged Newton result.
#[derive(Clone, Debug)]
pub struct NewtonSolution<R> {
    pub x: Vec<R>,
    pub residual_norm: R,
    pub iterations: usize,
    /// Sup-norm of the residual before each iteration and at the end.
    pub history: Vec<R>,
}

/// Runs damped Newton from `x0` until `|F(x)|_∞ <= tol`.
pub fn newton<R: Real, S: NonlinearSystem<R> + ?Sized>(
    system: &S,
    x0: Vec<R>,
    opts: &NewtonOptions<R>,
) -> Result<NewtonSolution<R>> {
    if x0.len() != system.dim() {
        return Err(Error::Structural(format!(
            "initial guess has {} entries, system has {}",
            x0.len(),
            system.dim()
        )));
    }
    let mut x = x0;
    let mut r = system.residual(&x)?;
    let mut norm = max_abs(&r);
    let mut history = vec![norm];
    for iter in 0..opts.max_iter {
        if norm <= opts.tol {
            return Ok(NewtonSolution { x, residual_norm: norm, iterations: iter, history });
        }
        if !norm.is_finite() {
            break;
        }
        let jac = system.jacobian(&x)?;
        let neg: Vec<R> = r.iter().map(|v| -*v).collect();
        let dx = jac.lu_in_place()?.solve(&neg)?;
        let mut lambda = R::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<R> = x.iter().zip(&dx).map(|(a, d)| *a + lambda * *d).collect();
            if let Ok(rt) = system.residual(&trial) {
                let nt = max_abs(&rt);
                if nt.is_finite() && nt < norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            lambda *= R::half();
        }
        match accepted {
            Some((xt, rt, nt)) => {
                x = xt;
                r = rt;
                norm = nt;
                history.push(norm);
            }
            None => {
                return Err(Error::NoConvergence { residual: norm.to_f64(), iterations: iter + 1 })
            }
        }
    }
    if norm <= opts.tol {
        let iterations = history.len() - 1;
        return Ok(NewtonSolution { x, residual_norm: norm, iterations, history });
    }
    Err(Error::NoConvergence { residual: norm.to_f64(), iterations: opts.max_iter })
}

/// Adapter turning a pair of closures into a [`NonlinearSystem`].
pub struct FnSystem<F, J> {
    pub dim: usize,
    pub residual: F,
    pub jacobian: J,
}

impl<R, F, J> NonlinearSystem<R> for FnSystem<F, J>
where
    R: Real,
    F: Fn(&[R]) -> Vec<R>,
    J: Fn(&[R]) -> Matrix<R>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn residual(&self, x: &[R]) -> Result<Vec<R>> {
        Ok((self.residual)(x))
    }

    fn jacobian(&self, x: &[R]) -> Result<Matrix<R>> {
        Ok((self.jacobian)(x))
    }
}

/// Closure form: `newton_solve(F, J, x0, tol, max_iter)`.
pub fn newton_solve<R, F, J>(
    residual: F,
    jacobian: J,
    x0: Vec<R>,
    tol: R,
    max_iter: usize,
) -> Result<NewtonSolution<R>>
where
    R: Real,
    F: Fn(&[R]) -> Vec<R>,
    J: Fn(&[R]) -> Matrix<R>,
{
    let sys = FnSystem { dim: x0.len(), residual, jacobian };
    newton(&sys, x0, &NewtonOptions::new(tol, max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_jac(v: f64) -> Matrix<f64> {
        Matrix::from_row_major(1, vec![v]).unwrap()
    }

    #[test]
    fn square_root_of_four() {
        let sol = newton_solve(
            |x: &[f64]| vec![x[0] * x[0] - 4.0],
            |x: &[f64]| scalar_jac(2.0 * x[0]),
            vec![3.0],
            1e-14,
            50,
        )
        .unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_tail() {
        let sol = newton_solve(
            |x: &[f64]| vec![x[0] * x[0] - 4.0],
            |x: &[f64]| scalar_jac(2.0 * x[0]),
            vec![3.0],
            1e-15,
            50,
        )
        .unwrap();
        let h = &sol.history;
        assert!(h.len() >= 4);
        let tail = &h[h.len() - 4..h.len() - 1];
        // e_{k+1} <= C e_k^2 with C = 1/(2·2) for the residual of x² − 4
        for w in tail.windows(2) {
            if w[1] > 1e-15 {
                assert!(w[1] <= w[0] * w[0], "{:?}", h);
            }
        }
    }

    #[test]
    fn affine_converges_in_one_iteration() {
        let sol = newton_solve(
            |x: &[f64]| vec![x[0] - 5.0],
            |_: &[f64]| scalar_jac(1.0),
            vec![-17.0],
            1e-14,
            10,
        )
        .unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.x[0], 5.0);
    }

    #[test]
    fn circle_line_intersection() {
        let sol = newton_solve(
            |x: &[f64]| vec![x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]],
            |x: &[f64]| Matrix::from_row_major(2, vec![2.0 * x[0], 2.0 * x[1], 1.0, -1.0]).unwrap(),
            vec![1.0, 0.5],
            1e-14,
            50,
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol.x[0] - h).abs() < 1e-13 && (sol.x[1] - h).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_residual() {
        let err = newton_solve(
            |x: &[f64]| vec![x[0] * x[0] - 4.0],
            |x: &[f64]| scalar_jac(2.0 * x[0]),
            vec![300.0],
            1e-14,
            2,
        )
        .unwrap_err();
        match err {
            Error::NoConvergence { residual, .. } => assert!(residual > 1.0),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let err = newton_solve(
            |x: &[f64]| vec![x[0] * x[0] + 1.0],
            |x: &[f64]| scalar_jac(2.0 * x[0]),
            vec![0.0],
            1e-14,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }
}

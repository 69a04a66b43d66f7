//! Solves a `2^n`-periodic invariant curve of the forced logistic map and
//! inspects its cocycle.
//!
//! cargo run --release --example invariant_curve -- [alpha] [epsilon] [n]

use qpcascade::curve::{
    cocycle_mean_log, curve_cocycle, invariance_residual, reducibility_status, solve_invariant_curve,
    unforced_cycle_point, CurveOptions, FourierCurve,
};
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec, ParamPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let alpha = args.first().copied().unwrap_or(3.3);
    let eps = args.get(1).copied().unwrap_or(0.02);
    let n = args.get(2).copied().unwrap_or(1.0) as u32;

    let family = ForcedFamily::<f64>::new(OmegaSpec::Golden.value()?, ForcingSpec::multiplicative())?;
    let opts = CurveOptions::standard();
    let p = ParamPoint::new(alpha, eps);
    let seed = FourierCurve::constant(opts.initial_modes(n), unforced_cycle_point(alpha, n))?;
    let curve = solve_invariant_curve(&family, &p, n, &seed, &opts)?;
    let residual = invariance_residual(&family, &p, n, &curve.branch0)?.max_abs();
    let m = curve_cocycle(&curve)?;

    println!("period 2^{n} curve at alpha = {alpha}, eps = {eps}");
    println!("modes {}, sup residual {residual:.2e}, tail ratio {:.2e}", curve.branch0.n_modes(), curve.branch0.tail_ratio());
    for j in 0..8 {
        let t = j as f64 / 8.0;
        let branches: Vec<String> = (0..curve.period()).map(|i| format!("{:.8}", curve.branch_value(i, t))).collect();
        println!("theta = {t:.3}: {}", branches.join("  "));
    }
    println!("cocycle mean log {:.8}, {:?}", cocycle_mean_log(&m), reducibility_status(&m, opts.zero_tol));
    Ok(())
}

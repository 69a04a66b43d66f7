//! The same slopes in standard and double-double precision, with the mirror
//! sum `α'_n + β'_n`.
//!
//! cargo run --release --example extended_precision -- [n_max]

use qpcascade::curve::CurveOptions;
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec};
use qpcascade::numerics::{DoubleDouble, Real};
use qpcascade::universality::{estimate_slope, SlopeJobConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_max: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let cfg = SlopeJobConfig::default();
    let std_family = ForcedFamily::<f64>::new(OmegaSpec::Golden.value()?, ForcingSpec::additive())?;
    let ext_family = ForcedFamily::<DoubleDouble>::new(OmegaSpec::Golden.value()?, ForcingSpec::additive())?;
    println!("{:>3} {:>18} {:>10} {:>10} {:>22} {:>10} {:>10}", "n", "alpha' f64", "eps_a", "a'+b'", "alpha' dd", "eps_a", "a'+b'");
    for n in 0..=n_max {
        let s = estimate_slope(&std_family, &OmegaSpec::Golden, n, &cfg, true, &CurveOptions::standard())?;
        let e = estimate_slope(&ext_family, &OmegaSpec::Golden, n, &cfg, true, &CurveOptions::extended())?;
        println!(
            "{n:>3} {:>18.12} {:>10.1e} {:>10.1e} {:>22.16} {:>10.1e} {:>10.1e}",
            s.alpha_prime,
            s.accuracy,
            s.alpha_prime + s.beta_prime.unwrap_or(f64::NAN),
            e.alpha_prime.to_f64(),
            e.accuracy.to_f64(),
            (e.alpha_prime + e.beta_prime.unwrap_or(DoubleDouble::zero())).to_f64()
        );
    }
    Ok(())
}

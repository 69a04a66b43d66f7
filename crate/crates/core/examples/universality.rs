//! Ratio sequences of two forcings, their gap, the shift identity between
//! `ω` and `2ω`, and the `δ_{1,n}` estimates.
//!
//! cargo run --release --example universality -- [n_max]

use qpcascade::curve::CurveOptions;
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec};
use qpcascade::unimodal::FEIGENBAUM_DELTA;
use qpcascade::universality::{
    asymptotic_equivalence, delta1_sequence, estimate_slope, ratio_sequence, SlopeJobConfig, SlopeRecord,
};
use qpcascade::Result;

fn records(forcing: ForcingSpec<f64>, omega: OmegaSpec, n_max: u32) -> Result<Vec<SlopeRecord<f64>>> {
    let family = ForcedFamily::new(omega.value()?, forcing)?;
    let (cfg, opts) = (SlopeJobConfig::default(), CurveOptions::standard());
    (0..=n_max).map(|n| estimate_slope(&family, &omega, n, &cfg, false, &opts)).collect()
}

fn main() -> std::result::Result<(), Box<dyn std::error::Error>> {
    let n_max: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let flm = records(ForcingSpec::multiplicative(), OmegaSpec::Golden, n_max)?;
    let add = records(ForcingSpec::additive(), OmegaSpec::Golden, n_max)?;
    let flm2 = records(ForcingSpec::multiplicative(), OmegaSpec::TwoGolden, n_max - 1)?;

    let (rf, ra, r2) = (ratio_sequence(&flm)?, ratio_sequence(&add)?, ratio_sequence(&flm2)?);
    println!("{:>3} {:>14} {:>14} {:>10} {:>16}", "n", "r_n FLM", "r_n additive", "gap", "r_(n-1) FLM 2w");
    for (i, (n, a)) in rf.iter().enumerate() {
        let shifted = r2.iter().find(|r| r.0 + 1 == *n).map_or("---".into(), |r| format!("{:.10}", r.1));
        println!("{n:>3} {a:>14.10} {:>14.10} {:>10.2e} {shifted:>16}", ra[i].1, (a - ra[i].1).abs());
    }
    let v = asymptotic_equivalence(&rf, &r2, 1)?;
    println!("equivalent with offset 1: {} (rho ~ {:.3})", v.equivalent, v.rho_hat);
    for (n, d) in delta1_sequence(&flm, &flm2, FEIGENBAUM_DELTA)? {
        println!("delta_1,{n} = {d:.8}");
    }
    Ok(())
}

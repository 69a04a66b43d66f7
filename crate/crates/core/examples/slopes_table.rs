//! Slopes of the reducibility-loss branches and their ratio sequence.
//!
//! cargo run --release --example slopes_table -- [family] [omega] [n_max]
//!
//! e.g. `-- additive-cos golden 5` or `-- flm 2golden 4`.

use std::time::Instant;

use qpcascade::curve::CurveOptions;
use qpcascade::forced::{ForcedFamily, ForcingKind, ForcingSpec, OmegaSpec};
use qpcascade::universality::{estimate_slope, ratio_sequence, SlopeJobConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: ForcingKind = args.first().map(String::as_str).unwrap_or("flm").parse()?;
    let omega: OmegaSpec = args.get(1).map(String::as_str).unwrap_or("golden").parse()?;
    let n_max: u32 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(4);

    let forcing = match kind {
        ForcingKind::MultiplicativeCos => ForcingSpec::multiplicative(),
        ForcingKind::AdditiveCos => ForcingSpec::additive(),
        ForcingKind::AdditiveTwoHarmonic => ForcingSpec::two_harmonic(0.1),
    };
    let family = ForcedFamily::<f64>::new(omega.value()?, forcing)?;
    let cfg = SlopeJobConfig::default();
    let opts = CurveOptions::standard();

    println!("{kind}, omega = {omega}");
    println!("{:>3} {:>18} {:>18} {:>10} {:>8}", "n", "alpha'", "beta'", "eps_a", "secs");
    let mut records = Vec::new();
    for n in 0..=n_max {
        let t = Instant::now();
        let rec = estimate_slope(&family, &omega, n, &cfg, true, &opts)?;
        println!(
            "{:>3} {:>18.10} {:>18.10} {:>10.2e} {:>8.1}",
            n,
            rec.alpha_prime,
            rec.beta_prime.unwrap_or(f64::NAN),
            rec.accuracy,
            t.elapsed().as_secs_f64()
        );
        records.push(rec);
    }
    for (n, r) in ratio_sequence(&records)? {
        println!("r_{n} = {r:.10}");
    }
    Ok(())
}

//! Traces both reducibility-loss branches `S_n^∓` from `(s_n, 0)` and
//! prints the quotients that feed the slope extrapolation.
//!
//! cargo run --release --example reducibility_branch -- [n]

use qpcascade::continuation::trace_reducibility_pair;
use qpcascade::curve::CurveOptions;
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec};
use qpcascade::universality::SlopeJobConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let family = ForcedFamily::<f64>::new(OmegaSpec::Golden.value()?, ForcingSpec::multiplicative())?;
    let schedule = SlopeJobConfig::default().schedule::<f64>(n);
    let [minus, plus] = trace_reducibility_pair(&family, n, &schedule, &CurveOptions::standard())?;
    println!("s_{n} = {:.15}", minus.anchor);
    println!("{:>12} {:>18} {:>18} {:>14} {:>14}", "eps", "alpha-", "alpha+", "(a- - s)/eps", "(a+ - s)/eps");
    for (m, p) in minus.points.iter().zip(&plus.points) {
        let e = m.params.epsilon;
        println!(
            "{e:>12.4e} {:>18.12} {:>18.12} {:>14.8} {:>14.8}",
            m.params.alpha,
            p.params.alpha,
            (m.params.alpha - minus.anchor) / e,
            (p.params.alpha - plus.anchor) / e
        );
    }
    Ok(())
}

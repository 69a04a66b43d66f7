//! Classifies the attractor at a few parameter points.
//!
//! cargo run --release --example classify -- [alpha epsilon]...

use qpcascade::classify::{classify_attractor, ClassifyOptions};
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec, ParamPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let points: Vec<(f64, f64)> = if args.len() >= 2 {
        args.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    } else {
        vec![(2.9, 0.05), (3.3, 0.02), (3.3, 0.12), (3.5, 0.0), (3.9, 0.05), (4.5, 0.0)]
    };
    let family = ForcedFamily::<f64>::new(OmegaSpec::Golden.value()?, ForcingSpec::multiplicative())?;
    let opts = ClassifyOptions::default();
    for (a, e) in points {
        let c = classify_attractor(&family, &ParamPoint::new(a, e), &opts);
        let period = c.period_detected.map_or("-".to_string(), |p| p.to_string());
        println!("alpha {a:.4} eps {e:.4}: {:<26} lambda {:>10.6} period {period}", c.label.to_string(), c.lyapunov);
    }
    Ok(())
}

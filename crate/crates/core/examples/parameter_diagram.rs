//! Color-coded attractor diagram over an `(α, ε)` window, written as PPM
//! and CSV.
//!
//! cargo run --release --example parameter_diagram -- [width] [height] [threads] [out_dir]

use std::path::PathBuf;

use qpcascade::classify::{AttractorLabel, ClassifyOptions};
use qpcascade::cli::{compute_diagram, Window};
use qpcascade::forced::{ForcedFamily, ForcingSpec, OmegaSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let width: usize = args.first().map(|s| s.parse()).transpose()?.unwrap_or(120);
    let height: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(90);
    let threads: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let out = PathBuf::from(args.get(3).cloned().unwrap_or_else(|| "diagram-out".into()));

    let family = ForcedFamily::<f64>::new(OmegaSpec::Golden.value()?, ForcingSpec::multiplicative())?;
    let raster = compute_diagram(&family, Window::default(), width, height, &ClassifyOptions::default(), threads)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("diagram.ppm"), raster.to_ppm())?;
    std::fs::write(out.join("diagram.csv"), raster.to_table().to_csv())?;
    for label in AttractorLabel::ALL {
        println!("{:<26} {:>6}", label.to_string(), raster.count(label));
    }
    println!("wrote {}", out.display());
    Ok(())
}

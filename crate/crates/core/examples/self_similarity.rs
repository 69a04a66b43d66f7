//! Compares the `ω` diagram near `s_2` with the `2ω` diagram on its image
//! under the rescaling `L(α, ε) = (δ0(α − s*) + s*, δ1 ε)` and writes both
//! rasters as pixmaps.
//!
//! cargo run --release --example self_similarity -- [cells] [out_dir]

use std::path::PathBuf;

use qpcascade::cli::commands::{compare_selfsim, selfsim_map};
use qpcascade::cli::{RunConfig, Window};
use qpcascade::forced::OmegaSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(60);
    let out = PathBuf::from(std::env::args().nth(2).unwrap_or_else(|| "selfsim-out".into()));
    let cfg = RunConfig {
        window: Window::new(3.45, 3.55, 0.0, 0.01)?,
        width: cells,
        height: cells,
        delta1: Some(7.54718),
        ..RunConfig::default()
    };
    let m = selfsim_map(&cfg)?;
    let cmp = compare_selfsim(&cfg, &OmegaSpec::Golden, &OmegaSpec::TwoGolden, &m)?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join("source.ppm"), cmp.source.to_ppm())?;
    std::fs::write(out.join("image.ppm"), cmp.image.to_ppm())?;
    println!("s* = {:.10}, delta0 = {}, delta1 = {}", m.s_star, m.delta0, m.delta1);
    println!("image window {:?}", cmp.image.window);
    println!("label agreement {:.4} over {cells}x{cells} cells", cmp.agreement);
    Ok(())
}

//! Color-coded parameter-space rasters.

use std::thread;

use super::config::Window;
use super::table::{Cell, Table};
use crate::classify::{classify_attractor, AttractorClass, AttractorLabel, ClassifyOptions};
use crate::error::{Error, Result};
use crate::forced::{ForcedFamily, ParamPoint};
use crate::numerics::scalar::Real;

/// Labels on a node-centered grid: column `i` sits at
/// `α_min + i (α_max − α_min)/(width − 1)`, row 0 at `ε_max`, the last row at `ε_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramRaster {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    /// Row-major, top row first.
    pub cells: Vec<AttractorClass<f64>>,
}

impl DiagramRaster {
    pub fn alpha(&self, col: usize) -> f64 {
        node(self.window.alpha_min, self.window.alpha_max, self.width, col)
    }

    pub fn epsilon(&self, row: usize) -> f64 {
        node(self.window.eps_max, self.window.eps_min, self.height, row)
    }

    pub fn cell(&self, row: usize, col: usize) -> &AttractorClass<f64> {
        &self.cells[row * self.width + col]
    }

    /// Binary portable pixmap (P6, 8-bit).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        for c in &self.cells {
            out.extend_from_slice(&c.label.rgb());
        }
        out
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["row", "col", "alpha", "epsilon", "label", "lyapunov", "period"]);
        for row in 0..self.height {
            for col in 0..self.width {
                let c = self.cell(row, col);
                let period = c.period_detected.map_or(Cell::Missing, |p| Cell::Int(p as i64));
                let lyap = if c.lyapunov.is_finite() { Cell::Num(c.lyapunov) } else { Cell::Missing };
                t.rows.push(vec![
                    Cell::Int(row as i64),
                    Cell::Int(col as i64),
                    Cell::Num(self.alpha(col)),
                    Cell::Num(self.epsilon(row)),
                    Cell::Text(c.label.as_str().into()),
                    lyap,
                    period,
                ]);
            }
        }
        t
    }

    pub fn count(&self, label: AttractorLabel) -> usize {
        self.cells.iter().filter(|c| c.label == label).count()
    }
}

fn node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

/// Classifies every cell; cell `k` (row-major) is handled by worker
/// `k mod threads`, so the result does not depend on `threads`.
pub fn compute_diagram<R: Real>(
    family: &ForcedFamily<R>,
    window: Window,
    width: usize,
    height: usize,
    opts: &ClassifyOptions,
    threads: usize,
) -> Result<DiagramRaster> {
    window.validate()?;
    if width < 2 || height < 2 {
        return Err(Error::Config(format!("grid {width}x{height} is below 2x2")));
    }
    let mut raster = DiagramRaster { width, height, window, cells: Vec::new() };
    let total = width * height;
    let threads = threads.clamp(1, total);
    let points: Vec<ParamPoint<R>> = (0..total)
        .map(|k| ParamPoint::new(R::from_f64(raster.alpha(k % width)), R::from_f64(raster.epsilon(k / width))))
        .collect();
    let classify = |k: usize| {
        let c = classify_attractor(family, &points[k], opts);
        AttractorClass { label: c.label, lyapunov: c.lyapunov.to_f64(), period_detected: c.period_detected }
    };
    let mut cells: Vec<Option<AttractorClass<f64>>> = vec![None; total];
    thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let classify = &classify;
                scope.spawn(move || (w..total).step_by(threads).map(|k| (k, classify(k))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (k, c) in h.join().expect("diagram worker panicked") {
                cells[k] = Some(c);
            }
        }
    });
    raster.cells = cells.into_iter().map(|c| c.expect("every cell assigned")).collect();
    Ok(raster)
}

/// Fraction of cells carrying the same label.
pub fn label_agreement(a: &DiagramRaster, b: &DiagramRaster) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::IndexMismatch(format!(
            "raster sizes {}x{} and {}x{} differ",
            a.width, a.height, b.width, b.height
        )));
    }
    let same = a.cells.iter().zip(&b.cells).filter(|(x, y)| x.label == y.label).count();
    Ok(same as f64 / a.cells.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forced::ForcingSpec;

    fn family() -> ForcedFamily<f64> {
        ForcedFamily::new((5f64.sqrt() - 1.0) / 2.0, ForcingSpec::multiplicative()).unwrap()
    }

    fn quick() -> ClassifyOptions {
        ClassifyOptions { transient: 2_000, iters: 4_000, ..Default::default() }
    }

    #[test]
    fn grid_nodes_and_ppm_layout() {
        let w = Window::new(2.8, 4.6, 0.0, 0.1).unwrap();
        let r = compute_diagram(&family(), w, 4, 3, &quick(), 2).unwrap();
        assert_eq!(r.alpha(0), 2.8);
        assert_eq!(r.alpha(3), 4.6);
        assert_eq!(r.epsilon(0), 0.1);
        assert_eq!(r.epsilon(2), 0.0);
        let ppm = r.to_ppm();
        assert!(ppm.starts_with(b"P6\n4 3\n255\n"));
        assert_eq!(ppm.len(), b"P6\n4 3\n255\n".len() + 36);
        assert_eq!(r.cell(2, 3).label, AttractorLabel::Divergent);
        assert_eq!(r.cell(2, 0).label, AttractorLabel::ReducibleNonchaotic);
    }

    #[test]
    fn thread_count_does_not_change_cells() {
        let w = Window::new(2.9, 3.7, 0.0, 0.2).unwrap();
        let a = compute_diagram(&family(), w, 7, 5, &quick(), 1).unwrap();
        let b = compute_diagram(&family(), w, 7, 5, &quick(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(label_agreement(&a, &b).unwrap(), 1.0);
        let c = compute_diagram(&family(), w, 5, 5, &quick(), 1).unwrap();
        assert!(label_agreement(&a, &c).is_err());
    }
}

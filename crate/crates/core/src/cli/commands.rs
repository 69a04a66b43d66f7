//! The five subcommands. Each writes its outputs under `out_dir` and
//! returns a short report; numerical failures are written out first and
//! then returned as the error.

use std::path::{Path, PathBuf};
use std::thread;

use super::config::{RunConfig, Window};
use super::diagram::{compute_diagram, label_agreement, DiagramRaster};
use super::table::{Cell, Table};
use crate::classify::ClassifyOptions;
use crate::curve::CurveOptions;
use crate::error::{Error, Result};
use crate::forced::{ForcedFamily, OmegaSpec, ParamPoint};
use crate::numerics::scalar::{parse_real, DoubleDouble, Precision, Real};
use crate::unimodal::{cascade, superstable_sequence, FEIGENBAUM_DELTA};
use crate::universality::{
    accumulation_point, delta1_sequence, estimate_slope, AffineSelfSimMap, SlopeJobConfig, SlopeRecord,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn num<R: Real>(v: R) -> Cell {
    Cell::Num(v.to_f64())
}

// ---- cascade ----

/// Table of `(n, s_n, d_n, ratio_s, ratio_d)`; ratios are centered at `n`.
pub fn cascade_table<R: Real>(n_max: u32) -> Result<Table> {
    let c = cascade::<R>(n_max)?;
    let mut t = Table::new(["n", "s_n", "d_n", "ratio_s", "ratio_d"]);
    for e in &c.entries {
        let ratio = |r: &[R]| {
            (e.n as usize).checked_sub(1).and_then(|i| r.get(i)).map_or(Cell::Missing, |v| num(*v))
        };
        t.push(vec![Cell::Int(e.n as i64), num(e.s), num(e.d), ratio(&c.ratio_s), ratio(&c.ratio_d)])?;
    }
    Ok(t)
}

pub fn cmd_cascade(cfg: &RunConfig) -> Result<CommandReport> {
    let t = match cfg.precision {
        Precision::Standard => cascade_table::<f64>(cfg.n_max)?,
        Precision::Extended => cascade_table::<DoubleDouble>(cfg.n_max)?,
    };
    let path = write_file(&cfg.out_dir, "cascade.csv", t.to_csv().as_bytes())?;
    let last = t.rows.iter().rev().find_map(|r| r[3].num());
    let summary = match last {
        Some(r) => format!("{} rows; last ratio_s = {r:.6}", t.rows.len()),
        None => format!("{} rows", t.rows.len()),
    };
    Ok(CommandReport { files: vec![path], summary })
}

// ---- slopes ----

/// One slope job.
#[derive(Clone, Debug)]
pub struct SlopeJob<R> {
    pub family: ForcedFamily<R>,
    pub omega: OmegaSpec,
    pub n: u32,
}

/// Runs the jobs on `threads` workers (job `k` on worker `k mod threads`)
/// and returns the results in job order.
pub fn run_slope_jobs<R: Real + Send + Sync>(
    jobs: &[SlopeJob<R>],
    cfg: &SlopeJobConfig,
    beta: bool,
    opts: &CurveOptions,
    threads: usize,
) -> Vec<Result<SlopeRecord<R>>> {
    let threads = threads.clamp(1, jobs.len().max(1));
    let mut out: Vec<Option<Result<SlopeRecord<R>>>> = (0..jobs.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                scope.spawn(move || {
                    (w..jobs.len())
                        .step_by(threads)
                        .map(|k| (k, estimate_slope(&jobs[k].family, &jobs[k].omega, jobs[k].n, cfg, beta, opts)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, r) in h.join().expect("slope worker panicked") {
                out[k] = Some(r);
            }
        }
    });
    out.into_iter().map(|r| r.expect("every job assigned")).collect()
}

/// Slopes table with one row per `n`; failed rows carry `---` and a note.
pub fn slopes_table<R: Real>(results: &[(u32, Result<SlopeRecord<R>>)], beta: bool) -> Table {
    let mut header = vec!["n", "alpha_prime", "ratio", "accuracy"];
    if beta {
        header.extend(["beta_prime", "beta_accuracy"]);
    }
    let mut t = Table::new(header);
    for (i, (n, r)) in results.iter().enumerate() {
        let prev = i.checked_sub(1).and_then(|j| results.get(j)).filter(|(m, _)| m + 1 == *n);
        let mut row = vec![Cell::Int(*n as i64)];
        match r {
            Ok(rec) => {
                let ratio = match prev {
                    Some((_, Ok(p))) if p.alpha_prime != R::zero() => num(rec.alpha_prime / p.alpha_prime),
                    _ => Cell::Missing,
                };
                row.extend([num(rec.alpha_prime), ratio, num(rec.accuracy)]);
                if beta {
                    row.push(rec.beta_prime.map_or(Cell::Missing, num));
                    row.push(rec.beta_accuracy.map_or(Cell::Missing, num));
                }
            }
            Err(e) => {
                row.resize(t.header.len(), Cell::Missing);
                t.note(format!("n = {n} failed: {e}"));
            }
        }
        t.rows.push(row);
    }
    t
}

fn first_error<R>(results: &[(u32, Result<R>)]) -> Option<Error> {
    results.iter().find_map(|(_, r)| r.as_ref().err().cloned())
}

fn slopes_generic<R: Real + Send + Sync>(cfg: &RunConfig) -> Result<(Table, Option<Error>)> {
    let family = ForcedFamily::<R>::new(cfg.omega.value()?, cfg.forcing()?)?;
    let jobs: Vec<SlopeJob<R>> =
        (cfg.n_min..=cfg.n_max).map(|n| SlopeJob { family, omega: cfg.omega.clone(), n }).collect();
    let opts = CurveOptions::for_precision(cfg.precision);
    let results = run_slope_jobs(&jobs, &cfg.schedule, cfg.beta, &opts, cfg.threads);
    let results: Vec<_> = jobs.iter().map(|j| j.n).zip(results).collect();
    let mut t = slopes_table(&results, cfg.beta);
    t.note(format!("family = {}, E = {}, omega = {}", cfg.family, cfg.e, cfg.omega));
    Ok((t, first_error(&results)))
}

pub fn cmd_slopes(cfg: &RunConfig) -> Result<CommandReport> {
    let (t, err) = match cfg.precision {
        Precision::Standard => slopes_generic::<f64>(cfg)?,
        Precision::Extended => slopes_generic::<DoubleDouble>(cfg)?,
    };
    let path = write_file(&cfg.out_dir, "slopes.csv", t.to_csv().as_bytes())?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CommandReport { files: vec![path], summary: format!("{} slopes", t.rows.len()) })
}

// ---- delta1 ----

/// `(n, δ_{1,n}, δ_{1,n} − δ_{1,n−1})` rows.
pub fn delta1_table<R: Real>(values: &[(u32, R)]) -> Table {
    let mut t = Table::new(["n", "delta1", "difference"]);
    for (i, (n, d)) in values.iter().enumerate() {
        let diff = i
            .checked_sub(1)
            .map(|j| values[j])
            .filter(|(m, _)| m + 1 == *n)
            .map_or(Cell::Missing, |(_, p)| num(*d - p));
        t.rows.push(vec![Cell::Int(*n as i64), num(*d), diff]);
    }
    t
}

fn delta1_generic<R: Real + Send + Sync>(cfg: &RunConfig) -> Result<(Table, Option<Error>)> {
    let forcing = cfg.forcing::<R>()?;
    let omega2 = cfg.omega.doubled();
    let fam = ForcedFamily::<R>::new(cfg.omega.value()?, forcing)?;
    let fam2 = ForcedFamily::<R>::new(omega2.value()?, forcing)?;
    let n_lo = cfg.n_min.max(1);
    let mut jobs: Vec<SlopeJob<R>> =
        (n_lo..=cfg.n_max).map(|n| SlopeJob { family: fam, omega: cfg.omega.clone(), n }).collect();
    let split = jobs.len();
    jobs.extend((n_lo - 1..cfg.n_max).map(|n| SlopeJob { family: fam2, omega: omega2.clone(), n }));
    let opts = CurveOptions::for_precision(cfg.precision);
    let results: Vec<_> =
        jobs.iter().map(|j| j.n).zip(run_slope_jobs(&jobs, &cfg.schedule, false, &opts, cfg.threads)).collect();
    let (first, second) = results.split_at(split);
    let ok = |rs: &[(u32, Result<SlopeRecord<R>>)]| rs.iter().filter_map(|(_, r)| r.as_ref().ok().cloned()).collect::<Vec<_>>();
    let (rw, rw2) = (ok(first), ok(second));
    let usable: Vec<SlopeRecord<R>> =
        rw.into_iter().filter(|r| rw2.iter().any(|q| q.n + 1 == r.n)).collect();
    let delta0 = R::from_f64(cfg.delta0.unwrap_or(FEIGENBAUM_DELTA));
    let values = if usable.is_empty() { Vec::new() } else { delta1_sequence(&usable, &rw2, delta0)? };
    let mut t = delta1_table(&values);
    for (n, r) in &results {
        if let Err(e) = r {
            t.note(format!("slope job n = {n} failed: {e}"));
        }
    }
    t.note(format!("family = {}, E = {}, omega = {}, paired with {}", cfg.family, cfg.e, cfg.omega, omega2));
    Ok((t, first_error(&results)))
}

pub fn cmd_delta1(cfg: &RunConfig) -> Result<CommandReport> {
    let (t, err) = match cfg.precision {
        Precision::Standard => delta1_generic::<f64>(cfg)?,
        Precision::Extended => delta1_generic::<DoubleDouble>(cfg)?,
    };
    let path = write_file(&cfg.out_dir, "delta1.csv", t.to_csv().as_bytes())?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(CommandReport { files: vec![path], summary: format!("{} delta1 estimates", t.rows.len()) })
}

// ---- diagram ----

pub fn classify_options(cfg: &RunConfig) -> ClassifyOptions {
    ClassifyOptions { transient: cfg.transient, iters: cfg.iters, precision: cfg.precision, ..Default::default() }
}

fn diagram_generic<R: Real + Send + Sync>(cfg: &RunConfig, omega: &OmegaSpec, window: Window) -> Result<DiagramRaster> {
    let family = ForcedFamily::<R>::new(omega.value()?, cfg.forcing()?)?;
    compute_diagram(&family, window, cfg.width, cfg.height, &classify_options(cfg), cfg.threads)
}

fn diagram_at(cfg: &RunConfig, omega: &OmegaSpec, window: Window) -> Result<DiagramRaster> {
    match cfg.precision {
        Precision::Standard => diagram_generic::<f64>(cfg, omega, window),
        Precision::Extended => diagram_generic::<DoubleDouble>(cfg, omega, window),
    }
}

pub fn cmd_diagram(cfg: &RunConfig) -> Result<CommandReport> {
    let r = diagram_at(cfg, &cfg.omega, cfg.window)?;
    let ppm = write_file(&cfg.out_dir, "diagram.ppm", &r.to_ppm())?;
    let csv = write_file(&cfg.out_dir, "diagram.csv", r.to_table().to_csv().as_bytes())?;
    let counts: Vec<String> = crate::classify::AttractorLabel::ALL
        .iter()
        .map(|l| format!("{l}: {}", r.count(*l)))
        .collect();
    Ok(CommandReport { files: vec![ppm, csv], summary: counts.join(", ") })
}

// ---- selfsim ----

/// Image of a window under the rescaling.
pub fn remap_window(m: &AffineSelfSimMap<f64>, w: &Window) -> Result<Window> {
    let lo = m.apply(&ParamPoint::new(w.alpha_min, w.eps_min));
    let hi = m.apply(&ParamPoint::new(w.alpha_max, w.eps_max));
    Window::new(lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha), lo.epsilon.min(hi.epsilon), lo.epsilon.max(hi.epsilon))
}

/// The rescaling from the config, with `s*` from the cascade and `δ0 = δ`
/// when unset.
pub fn selfsim_map(cfg: &RunConfig) -> Result<AffineSelfSimMap<f64>> {
    let s_star = match &cfg.s_star {
        Some(s) => parse_real(s).map_err(|e| Error::Config(format!("s_star: {e}")))?,
        None => accumulation_point(&superstable_sequence::<f64>(12)?)?,
    };
    let delta1 = cfg.delta1.ok_or_else(|| Error::Config("selfsim needs delta1".into()))?;
    Ok(AffineSelfSimMap { s_star, delta0: cfg.delta0.unwrap_or(FEIGENBAUM_DELTA), delta1 })
}

/// Diagram of `family_a` on `window` against `family_b` on its image under `m`.
pub struct SelfSimComparison {
    pub source: DiagramRaster,
    pub image: DiagramRaster,
    pub agreement: f64,
}

pub fn compare_selfsim(cfg: &RunConfig, source_omega: &OmegaSpec, image_omega: &OmegaSpec, m: &AffineSelfSimMap<f64>) -> Result<SelfSimComparison> {
    let source = diagram_at(cfg, source_omega, cfg.window)?;
    let image = diagram_at(cfg, image_omega, remap_window(m, &cfg.window)?)?;
    let agreement = label_agreement(&source, &image)?;
    Ok(SelfSimComparison { source, image, agreement })
}

/// The ω-diagram on the configured window against the 2ω-diagram on its image.
pub fn cmd_selfsim(cfg: &RunConfig) -> Result<CommandReport> {
    let m = selfsim_map(cfg)?;
    let omega2 = cfg.omega.doubled();
    let cmp = compare_selfsim(cfg, &cfg.omega, &omega2, &m)?;
    let image_window = remap_window(&m, &cfg.window)?;
    let mut t = Table::new(["quantity", "value"]);
    let rows = [
        ("agreement", cmp.agreement),
        ("s_star", m.s_star),
        ("delta0", m.delta0),
        ("delta1", m.delta1),
        ("image_alpha_min", image_window.alpha_min),
        ("image_alpha_max", image_window.alpha_max),
        ("image_eps_min", image_window.eps_min),
        ("image_eps_max", image_window.eps_max),
    ];
    for (k, v) in rows {
        t.push(vec![Cell::Text(k.into()), Cell::Num(v)])?;
    }
    t.note(format!("source omega = {}, image omega = {}", cfg.omega, omega2));
    let files = vec![
        write_file(&cfg.out_dir, "selfsim.csv", t.to_csv().as_bytes())?,
        write_file(&cfg.out_dir, "selfsim_source.ppm", &cmp.source.to_ppm())?,
        write_file(&cfg.out_dir, "selfsim_image.ppm", &cmp.image.to_ppm())?,
    ];
    Ok(CommandReport { files, summary: format!("label agreement {:.4}", cmp.agreement) })
}

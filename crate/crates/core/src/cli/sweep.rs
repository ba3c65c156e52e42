//! Sweep orchestration and CSV emission.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::config::RunConfig;
use crate::cycle;
use crate::error::{Error, Result};
use crate::pipeline::{Model, PointResult};
use crate::units::mev_to_ghz;

pub const CSV_SCHEMA: u32 = 1;

pub const RATE_COLUMNS: [&str; 29] = [
    "stress_GPa",
    "alpha",
    "regime",
    "pi_z_GHz",
    "pi_perp_GHz",
    "pi_1e_perp_GHz",
    "delta_x_eV",
    "delta_y_eV",
    "sigma_x_eV",
    "sigma_y_eV",
    "lambda_z_GHz",
    "lambda_perp_x_GHz",
    "lambda_perp_y_GHz",
    "lambda_perp_l_x_GHz",
    "lambda_perp_l_y_GHz",
    "lambda_prime_GHz",
    "lambda_z_prime_GHz",
    "gamma_a1_MHz",
    "gamma_e12_MHz",
    "gamma_ave_MHz",
    "gamma_plus_MHz",
    "gamma_minus_MHz",
    "gamma_z_MHz",
    "gamma_lower_z_MHz",
    "gamma_lower_plus_MHz",
    "gamma_lower_minus_MHz",
    "gamma_rad_x_MHz",
    "gamma_rad_y_MHz",
    "tau_s",
];

pub const CYCLE_COLUMNS: [&str; 8] = [
    "n_g0",
    "n_gp",
    "n_gm",
    "intensity",
    "intensity_mw",
    "contrast",
    "steady_reached",
    "metastable",
];

#[derive(Debug)]
pub struct SweepPoint {
    /// Loading value in GPa.
    pub loading: f64,
    pub alpha: f64,
    pub result: Result<PointResult>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.result.is_err()).count()
    }
}

fn evaluate(cfg: &RunConfig, model: &Model, loading: f64) -> SweepPoint {
    let stride = if cfg.output.populations {
        cfg.output.population_stride
    } else {
        0
    };
    let result = cfg
        .stress
        .tensor_at(loading)
        .and_then(|t| model.evaluate_traced(&t, stride));
    if let Err(e) = &result {
        log::error!("point {loading} GPa failed: {e}");
    }
    SweepPoint {
        loading,
        alpha: cfg.stress.alpha(),
        result,
    }
}

/// Runs every loading point; the output order follows the config whether or
/// not the points run in parallel.
pub fn run_sweep(cfg: &RunConfig, model: &Model, parallel: bool) -> SweepResult {
    let pts = &cfg.stress.points;
    let points = if parallel {
        pts.par_iter().map(|&p| evaluate(cfg, model, p)).collect()
    } else {
        pts.iter().map(|&p| evaluate(cfg, model, p)).collect()
    };
    SweepResult { points }
}

/// Nine significant digits; −0 prints as 0.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

fn header(cols: &[&str]) -> String {
    format!("# nv_cycle_csv_schema={CSV_SCHEMA}\n{}\n", cols.join(","))
}

pub fn rate_fields(loading: f64, alpha: f64, r: &PointResult) -> Vec<String> {
    let p = &r.rates;
    let s = &p.state;
    let (g, soc, up, lo) = (&s.gaps, &s.soc, &p.upper, &p.lower);
    let mut out = vec![num(loading), num(alpha), p.regime.name().to_string()];
    out.extend(
        [
            mev_to_ghz(s.pi_3e.z),
            mev_to_ghz(s.pi_3e.perp()),
            mev_to_ghz(s.pi_1e.perp()),
            g.delta_x,
            g.delta_y,
            g.sigma_x,
            g.sigma_y,
            soc.lambda_z,
            soc.lambda_perp_x,
            soc.lambda_perp_y,
            soc.lambda_perp_l_x,
            soc.lambda_perp_l_y,
            soc.lambda_prime,
            soc.lambda_z_prime,
            up.gamma_a1,
            up.gamma_e12,
            up.gamma_ave,
            up.gamma_plus,
            up.gamma_minus,
            up.gamma_z,
            lo.gamma_z,
            lo.gamma_plus,
            lo.gamma_minus,
            p.rad_x,
            p.rad_y,
            p.relaxation.tau,
        ]
        .map(num),
    );
    out
}

pub fn cycle_fields(r: &PointResult) -> Vec<String> {
    let c = &r.contrast;
    let mut out: Vec<String> = c.polarization.map(num).to_vec();
    out.push(num(c.intensity));
    out.push(num(c.intensity_mw));
    out.push(num(c.contrast));
    out.push(c.steady_reached.to_string());
    out.push(c.metastable.to_string());
    out
}

pub fn rates_csv(res: &SweepResult) -> String {
    let mut s = header(&RATE_COLUMNS);
    for p in &res.points {
        if let Ok(r) = &p.result {
            s.push_str(&rate_fields(p.loading, p.alpha, r).join(","));
            s.push('\n');
        }
    }
    s
}

pub fn contrast_csv(res: &SweepResult) -> String {
    let cols: Vec<&str> = RATE_COLUMNS.iter().chain(&CYCLE_COLUMNS).copied().collect();
    let mut s = header(&cols);
    for p in &res.points {
        if let Ok(r) = &p.result {
            let mut f = rate_fields(p.loading, p.alpha, r);
            f.extend(cycle_fields(r));
            s.push_str(&f.join(","));
            s.push('\n');
        }
    }
    s
}

/// State labels of the cycle model that produced `r`.
fn state_labels(model: &Model, r: &PointResult) -> Result<Vec<String>> {
    Ok(cycle::assemble(&r.rates.cycle, &model.drive, model.mode)?.labels)
}

pub fn populations_csv(model: &Model, r: &PointResult) -> Result<Option<String>> {
    let Some(trace) = &r.trace else {
        return Ok(None);
    };
    let labels = state_labels(model, r)?;
    let mut cols = vec!["time_s".to_string()];
    cols.extend(labels.iter().map(|l| format!("n_{l}")));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut s = header(&cols);
    for (t, n) in trace.times.iter().zip(&trace.populations) {
        s.push_str(&num(*t));
        for v in n.iter() {
            let _ = write!(s, ",{}", num(*v));
        }
        s.push('\n');
    }
    Ok(Some(s))
}

pub fn populations_file(loading: f64) -> String {
    format!("populations_{loading}.csv")
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes `rates.csv`, `contrast.csv` and one `populations_<P>.csv` per
/// successful point.
pub fn write_outputs(dir: &Path, model: &Model, res: &SweepResult) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("rates.csv"), &rates_csv(res))?;
    write(&dir.join("contrast.csv"), &contrast_csv(res))?;
    for p in &res.points {
        if let Ok(r) = &p.result {
            if let Some(text) = populations_csv(model, r)? {
                write(&dir.join(populations_file(p.loading)), &text)?;
            }
        }
    }
    Ok(())
}

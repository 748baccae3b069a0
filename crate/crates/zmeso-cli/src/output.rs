//! Report emission: CSV tables, JSON mirrors, run manifests, and SVG plots.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use zmeso::meso::MomentReport;

/// Moment-table row in the fixed interchange schema.
#[derive(Debug, Serialize)]
pub struct MomentCsvRow {
    pub k: usize,
    pub empirical: f64,
    pub stderr: f64,
    pub gaussian: f64,
    pub arithmetic: Option<f64>,
    pub rmt: Option<f64>,
}

/// Convert a report to the interchange rows: `empirical` carries the mean
/// for k = 1 and centered moments beyond; the prediction columns live in
/// raw (unnormalized) scale.
pub fn moment_rows(report: &MomentReport, gaussian_raw: &dyn Fn(usize) -> f64) -> Vec<MomentCsvRow> {
    report
        .rows
        .iter()
        .map(|r| MomentCsvRow {
            k: r.k,
            empirical: r.empirical_raw,
            stderr: r.mc_stderr,
            gaussian: gaussian_raw(r.k),
            arithmetic: r.arithmetic_prediction,
            rmt: r.rmt_prediction,
        })
        .collect()
}

pub fn write_moment_csv(path: &Path, rows: &[MomentCsvRow]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "k,empirical,stderr,gaussian,arithmetic,rmt")?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        writeln!(
            f,
            "{},{:.12e},{:.12e},{:.12e},{},{}",
            r.k,
            r.empirical,
            r.stderr,
            r.gaussian,
            opt(r.arithmetic),
            opt(r.rmt)
        )?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

/// Run manifest: subcommand, echoed config, and content hashes of every
/// input file, enough to reproduce the run bit for bit.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
}

pub fn file_sha256(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(format!("{:x}", h.finalize()))
}

pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: BTreeMap<String, String>,
    seed: u64,
    input_paths: &[PathBuf],
) -> Result<()> {
    let mut inputs = BTreeMap::new();
    for p in input_paths {
        inputs.insert(p.display().to_string(), file_sha256(p)?);
    }
    let manifest = Manifest { command: command.to_string(), config, seed, inputs };
    write_json(&dir.join("manifest.json"), &manifest)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Inverse standard normal CDF (Acklam's rational approximation, |eps| < 1.2e-8).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN: f64 = 50.0;

fn svg_header(title: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n\
         <rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" \
         font-family=\"sans-serif\">{}</text>\n",
        PLOT_W / 2.0,
        xml_escape(title)
    )
}

/// Histogram of normalized samples with the standard normal density overlaid.
pub fn histogram_svg(values: &[f64], bins: usize, title: &str) -> String {
    assert!(bins >= 20, "at least 20 bins");
    let lo = -4.0f64;
    let hi = 4.0f64;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v >= lo && v < hi {
            counts[((v - lo) / width) as usize] += 1;
        }
    }
    let n = values.len() as f64;
    let dens: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let peak = dens.iter().cloned().fold(0.45, f64::max);
    let x_of = |v: f64| MARGIN + (v - lo) / (hi - lo) * (PLOT_W - 2.0 * MARGIN);
    let y_of = |d: f64| PLOT_H - MARGIN - d / peak * (PLOT_H - 2.0 * MARGIN);

    let mut svg = svg_header(title);
    for (i, &d) in dens.iter().enumerate() {
        let x0 = x_of(lo + i as f64 * width);
        let x1 = x_of(lo + (i as f64 + 1.0) * width);
        let y = y_of(d);
        svg.push_str(&format!(
            "<rect x=\"{x0:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#7aa6d6\" stroke=\"#3a6ea8\" stroke-width=\"0.5\"/>\n",
            x1 - x0,
            PLOT_H - MARGIN - y
        ));
    }
    let mut pts = Vec::new();
    for i in 0..=200 {
        let v = lo + (hi - lo) * i as f64 / 200.0;
        let d = (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt();
        pts.push(format!("{:.2},{:.2}", x_of(v), y_of(d)));
    }
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.8\"/>\n",
        pts.join(" ")
    ));
    svg.push_str(&axes(lo, hi, peak));
    svg.push_str("</svg>\n");
    svg
}

/// Q-Q plot of normalized samples against standard normal quantiles.
pub fn qq_svg(values: &[f64], title: &str) -> String {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let lim = 4.0f64;
    let x_of = |v: f64| MARGIN + (v + lim) / (2.0 * lim) * (PLOT_W - 2.0 * MARGIN);
    let y_of = |v: f64| PLOT_H - MARGIN - (v + lim) / (2.0 * lim) * (PLOT_H - 2.0 * MARGIN);
    let mut svg = svg_header(title);
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#c0392b\" \
         stroke-width=\"1.2\"/>\n",
        x_of(-lim),
        y_of(-lim),
        x_of(lim),
        y_of(lim)
    ));
    let step = (n / 2000).max(1);
    for i in (0..n).step_by(step) {
        let q = inverse_normal_cdf((i as f64 + 0.5) / n as f64);
        let v = sorted[i];
        if q.abs() <= lim && v.abs() <= lim {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.6\" fill=\"#3a6ea8\"/>\n",
                x_of(q),
                y_of(v)
            ));
        }
    }
    svg.push_str(&axes(-lim, lim, 1.0));
    svg.push_str("</svg>\n");
    svg
}

fn axes(lo: f64, hi: f64, _peak: f64) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        PLOT_H - MARGIN,
        PLOT_W - MARGIN,
        PLOT_H - MARGIN
    ));
    s.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        PLOT_H - MARGIN
    ));
    let ticks = 8;
    for i in 0..=ticks {
        let v = lo + (hi - lo) * i as f64 / ticks as f64;
        let x = MARGIN + (PLOT_W - 2.0 * MARGIN) * i as f64 / ticks as f64;
        s.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\" \
             font-family=\"sans-serif\">{v:.1}</text>\n",
            PLOT_H - MARGIN,
            PLOT_H - MARGIN + 5.0,
            PLOT_H - MARGIN + 18.0
        ));
    }
    s
}

//! Deterministic file emission: CSV (shortest round-trip floats, LF), a
//! minimal SVG curve plot, and the run manifest with per-file checksums.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Shortest decimal that round-trips; integral values keep a trailing ".0"
/// so the column stays visibly floating-point.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() && x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

pub struct CsvWriter {
    buf: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        CsvWriter {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "csv row width mismatch");
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// (x, y, y error) triples drawn as a polyline with error bars.
pub fn svg_curve(title: &str, xlabel: &str, points: &[(f64, f64, f64)]) -> Result<String> {
    if points.is_empty() {
        bail!("refusing to plot an empty curve");
    }
    let (w, h, ml, mb) = (640.0, 420.0, 60.0, 50.0);
    let (pw, ph) = (w - ml - 20.0, h - mb - 40.0);
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let lo_y = points
        .iter()
        .map(|p| p.1 - p.2)
        .fold(f64::INFINITY, f64::min);
    let hi_y = points
        .iter()
        .map(|p| p.1 + p.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let xr = if x1 > x0 { x1 - x0 } else { 1.0 };
    let yr = if hi_y > lo_y { hi_y - lo_y } else { 1.0 };
    let px = |x: f64| ml + (x - x0) / xr * pw;
    let py = |y: f64| 40.0 + (1.0 - (y - lo_y) / yr) * ph;

    let mut s = String::new();
    write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )?;
    write!(
        s,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"15\">{}</text>\n",
        w / 2.0,
        title
    )?;
    // axes with end-point labels
    write!(
        s,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"40\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        40.0 + ph,
        ml + pw,
        40.0 + ph,
        40.0 + ph
    )?;
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        write!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>\n",
            px(x),
            40.0 + ph + 18.0,
            fmt_f64(x)
        )?;
    }
    for y in [lo_y, hi_y] {
        write!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>\n",
            ml - 6.0,
            py(y) + 4.0,
            fmt_f64(y)
        )?;
    }
    write!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{xlabel}</text>\n",
        ml + pw / 2.0,
        h - 8.0
    )?;
    if points.len() > 1 {
        let path: Vec<String> = points
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1)))
            .collect();
        write!(
            s,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        )?;
    }
    for p in points {
        if p.2 > 0.0 {
            write!(
                s,
                "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" \
                 stroke=\"#1f6fb2\"/>\n",
                px(p.0),
                py(p.1 - p.2),
                py(p.1 + p.2)
            )?;
        }
        write!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f6fb2\"/>\n",
            px(p.0),
            py(p.1)
        )?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[derive(Serialize)]
pub struct Manifest {
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub wall_clock_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub metrics: Vec<Metric>,
    pub outputs: Vec<OutputRecord>,
    pub config: RunConfig,
}

#[derive(Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

/// Accumulates written files; the manifest goes last so a failed run leaves
/// no manifest behind.
pub struct OutputSet {
    dir: PathBuf,
    written: Vec<OutputRecord>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
        let digest = Sha256::digest(contents.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.written.push(OutputRecord {
            path: name.to_string(),
            sha256: hex,
        });
        Ok(())
    }

    pub fn finish(
        self,
        config: &RunConfig,
        seed: u64,
        elapsed: Duration,
        verdict: Option<String>,
        metrics: Vec<Metric>,
    ) -> Result<()> {
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: config.experiment.clone(),
            seed,
            wall_clock_secs: elapsed.as_secs_f64(),
            verdict,
            metrics,
            outputs: self.written,
            config: config.clone(),
        };
        let text = toml::to_string(&manifest).context("serializing manifest")?;
        let path = self.dir.join("manifest.toml");
        std::fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

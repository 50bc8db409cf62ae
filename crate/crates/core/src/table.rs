//! Result tables and plot files.
//!
//! Files carry every double with 17 significant digits so values survive a
//! text round trip; the terminal view rounds to 10 decimals for reading.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Complex(Complex64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub struct ResultTable {
    columns: Vec<(String, Kind)>,
    rows: Vec<Vec<Cell>>,
    metadata: Vec<(String, String)>,
}

/// 17 significant digits, scientific.
pub fn exact(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // Flagged rather than silently written as a number.
        format!("{v}")
    }
}

fn readable(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v:.10}")
    } else if v.is_finite() {
        format!("{v:.10e}")
    } else {
        format!("{v}")
    }
}

pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

impl ResultTable {
    pub fn new() -> Self {
        ResultTable {
            columns: Vec::new(),
            rows: Vec::new(),
            metadata: vec![("version".into(), env!("CARGO_PKG_VERSION").into())],
        }
    }

    pub fn real_column(mut self, name: impl Into<String>) -> Self {
        self.columns.push((name.into(), Kind::Real));
        self
    }

    /// Written as two columns, `name_re` and `name_im`.
    pub fn complex_column(mut self, name: impl Into<String>) -> Self {
        self.columns.push((name.into(), Kind::Complex));
        self
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::invalid(format!(
                "row has {} cells for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        for (cell, (name, kind)) in row.iter().zip(&self.columns) {
            if matches!((cell, kind), (Cell::Complex(_), Kind::Real)) {
                return Err(Error::invalid(format!("complex value in real column {name}")));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|(name, kind)| match kind {
                Kind::Real => vec![name.clone()],
                Kind::Complex => vec![format!("{name}_re"), format!("{name}_im")],
            })
            .collect()
    }

    /// Real values of one output column (by header name) in row order.
    pub fn column(&self, header: &str) -> Option<Vec<f64>> {
        for (j, (name, kind)) in self.columns.iter().enumerate() {
            let pick: Option<fn(&Cell) -> f64> = match kind {
                Kind::Real if name == header => Some(|c| match c {
                    Cell::Real(v) => *v,
                    Cell::Complex(z) => z.re,
                }),
                Kind::Complex if header == format!("{name}_re") => Some(|c| match c {
                    Cell::Real(v) => *v,
                    Cell::Complex(z) => z.re,
                }),
                Kind::Complex if header == format!("{name}_im") => Some(|c| match c {
                    Cell::Real(_) => 0.0,
                    Cell::Complex(z) => z.im,
                }),
                _ => None,
            };
            if let Some(f) = pick {
                return Some(self.rows.iter().map(|r| f(&r[j])).collect());
            }
        }
        None
    }

    fn render(&self, fmt: fn(f64) -> String) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.header().join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.columns)
                .flat_map(|(cell, (_, kind))| match (cell, kind) {
                    (Cell::Real(v), Kind::Real) => vec![fmt(*v)],
                    (Cell::Real(v), Kind::Complex) => vec![fmt(*v), fmt(0.0)],
                    (Cell::Complex(z), _) => vec![fmt(z.re), fmt(z.im)],
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Full-precision CSV with `#` metadata lines.
    pub fn to_csv(&self) -> String {
        self.render(exact)
    }

    /// Rounded view for terminals.
    pub fn to_display(&self) -> String {
        self.render(readable)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

impl Default for ResultTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Temp file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// A named 1-D profile for plotting.
#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Writes `<prefix>_<label>.dat` per series, two columns each, and returns
/// the paths written.
pub fn write_plot_data(prefix: &Path, series: &[Series]) -> Result<Vec<PathBuf>> {
    series
        .iter()
        .map(|s| {
            let path = suffixed(prefix, &format!("_{}.dat", sanitize(&s.label)));
            let mut text = format!("# x, {}\n", s.label);
            for (x, y) in &s.points {
                let _ = writeln!(text, "{} {}", exact(*x), exact(*y));
            }
            write_atomic(&path, text.as_bytes()).map(|_| path)
        })
        .collect()
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static line plot of 1-D profiles at `<prefix>.svg`.
pub fn write_svg(prefix: &Path, title: &str, series: &[Series]) -> Result<PathBuf> {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let finite = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x1 = x0 + 1.0;
    }
    if !(y0 < y1) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    for (v, x, anchor) in [(x0, pad, "start"), (x1, w - pad, "end")] {
        let _ = writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="{anchor}" font-size="11">{}</text>"#, h - pad + 16.0, readable(v));
    }
    for (v, y) in [(y0, h - pad), (y1, pad)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{y}" text-anchor="end" font-size="11">{}</text>"#, pad - 4.0, readable(v));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            w - pad - 4.0 - 0.0,
            pad + 14.0 * (i as f64 + 1.0),
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    let path = suffixed(prefix, ".svg");
    write_atomic(&path, svg.as_bytes())?;
    Ok(path)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new().real_column("x").complex_column("g");
        t.meta("route", "spectral");
        t.push_row(vec![0.1.into(), Complex64::new(1.0 / 3.0, -2e-300).into()]).unwrap();
        t.push_row(vec![0.2.into(), 0.5.into()]).unwrap();
        t
    }

    #[test]
    fn csv_round_trips_doubles_exactly() {
        let csv = sample().to_csv();
        let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "x,g_re,g_im");
        let cells: Vec<f64> = data[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells, vec![0.1, 1.0 / 3.0, -2e-300]);
        assert!(csv.contains("# route: spectral"));
    }

    #[test]
    fn rows_must_be_rectangular_and_typed() {
        let mut t = ResultTable::new().real_column("x");
        assert!(t.push_row(vec![]).is_err());
        assert!(t.push_row(vec![Complex64::new(0.0, 1.0).into()]).is_err());
    }

    #[test]
    fn display_rounds_for_reading() {
        let mut t = ResultTable::new().real_column("v");
        t.push_row(vec![(-1f64).exp().into()]).unwrap();
        assert!(t.to_display().contains("0.3678794412"));
    }

    #[test]
    fn atomic_write_and_plots() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        sample().write_csv(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), sample().to_csv());
        let series = vec![Series {
            label: "g t=1".into(),
            points: vec![(0.0, 1.0), (1.0, 0.5)],
        }];
        let dat = write_plot_data(&dir.path().join("p"), &series).unwrap();
        assert!(dat[0].ends_with("p_g_t_1.dat"));
        let svg = write_svg(&dir.path().join("p"), "profile", &series).unwrap();
        assert!(std::fs::read_to_string(svg).unwrap().contains("<polyline"));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

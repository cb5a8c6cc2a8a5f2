//! CSV emission with `#` metadata lines, and comparison against
//! user-supplied reference curves.

use sha2::{Digest, Sha256};
use std::io::{self, Write};
use std::path::Path;

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// A table of columns sharing the time axis. Missing values print as `nan`.
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub times: Vec<f64>,
    pub columns: Vec<(String, Vec<Option<f64>>)>,
}

impl Table {
    pub fn new(times: Vec<f64>) -> Self {
        Table { metadata: Vec::new(), times, columns: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.metadata.push((key.to_string(), value.into()));
        self
    }

    pub fn column(&mut self, name: &str, values: Vec<f64>) -> &mut Self {
        self.columns.push((name.to_string(), values.into_iter().map(Some).collect()));
        self
    }

    /// Column defined on a subset of the time axis.
    pub fn sparse_column(&mut self, name: &str, times: &[f64], values: &[f64]) -> &mut Self {
        let mut out = vec![None; self.times.len()];
        let mut j = 0;
        for (k, &t) in self.times.iter().enumerate() {
            if j < times.len() && times[j] == t {
                out[k] = Some(values[j]);
                j += 1;
            }
        }
        self.columns.push((name.to_string(), out));
        self
    }

    pub fn write(&self, out: &mut impl Write) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(out, "time_ns,{}", names.join(","))?;
        for (i, t) in self.times.iter().enumerate() {
            write!(out, "{}", format_time(*t))?;
            for (_, col) in &self.columns {
                match col[i] {
                    Some(v) => write!(out, ",{v}")?,
                    None => write!(out, ",nan")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn write_to(&self, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => {
                let mut w = io::BufWriter::new(std::fs::File::create(p)?);
                self.write(&mut w)?;
                w.flush()
            }
            None => self.write(&mut io::stdout().lock()),
        }
    }
}

/// Grid times are `start + k * step`; print them without the binary
/// representation noise.
fn format_time(t: f64) -> String {
    let fixed = format!("{t:.12}");
    let trimmed = fixed.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" { "0".into() } else { trimmed.to_string() }
}

/// Reads the first two numeric columns of a CSV, skipping `#` lines and a
/// header row if present.
pub fn read_reference(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let parsed: Option<(f64, f64)> = match (record.get(0), record.get(1)) {
            (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((t, v)) => {
                if times.last().is_some_and(|&last| t <= last) {
                    return Err(format!("{}: times must increase (row {})", path.display(), k + 1));
                }
                times.push(t);
                values.push(v);
            }
            None if k == 0 && times.is_empty() => {}
            None => return Err(format!("{}: row {} is not two numbers", path.display(), k + 1)),
        }
    }
    if times.len() < 2 {
        return Err(format!("{}: need at least two rows", path.display()));
    }
    Ok((times, values))
}

/// Linear interpolation of the reference onto `grid`; points outside the
/// reference span are skipped. Returns `(rms, points used)`.
pub fn rms_against(grid: &[f64], values: &[f64], ref_t: &[f64], ref_v: &[f64]) -> Option<(f64, usize)> {
    let (mut sum, mut n) = (0.0, 0usize);
    for (&t, &v) in grid.iter().zip(values) {
        if t < ref_t[0] || t > ref_t[ref_t.len() - 1] || !v.is_finite() {
            continue;
        }
        let j = ref_t.partition_point(|&x| x <= t).clamp(1, ref_t.len() - 1);
        let (t0, t1) = (ref_t[j - 1], ref_t[j]);
        let w = (t - t0) / (t1 - t0);
        let r = ref_v[j - 1] * (1.0 - w) + ref_v[j] * w;
        sum += (v - r).powi(2);
        n += 1;
    }
    (n > 0).then(|| ((sum / n as f64).sqrt(), n))
}

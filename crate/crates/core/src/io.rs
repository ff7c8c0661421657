//! Plain-text formats: instance files, metric CSVs and TOML-friendly floats.
//!
//! Instance files are line oriented and whitespace separated:
//!
//! ```text
//! n 4
//! d 5
//! delta 0
//! seed 7
//! X
//! <n rows of d values>
//! y_delta
//! <n values>
//! w_star
//! <d values>
//! support
//! <indices>
//! ```
//!
//! `seed`, `w_star` and `support` are optional; `w_star` and `support`
//! must appear together. The clean target is recomputed as `X w*`.
//! Floats use shortest round-trip formatting.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::Error;
use crate::metrics::{MetricRow, CSV_HEADER};
use crate::{GroundTruth, ProblemInstance, Result, Scalar};

/// `v` as a TOML float literal (always with a fraction or exponent).
pub fn toml_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        s + ".0"
    }
}

/// An instance read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile<T> {
    pub instance: ProblemInstance<T>,
    pub truth: Option<GroundTruth<T>>,
    pub seed: Option<u64>,
}

fn push_row<T: Scalar>(out: &mut String, values: impl IntoIterator<Item = T>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{}", v.to_f64_lossy());
    }
    out.push('\n');
}

pub fn format_instance<T: Scalar>(instance: &ProblemInstance<T>, truth: Option<&GroundTruth<T>>, seed: Option<u64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n {}", instance.n());
    let _ = writeln!(s, "d {}", instance.d());
    let _ = writeln!(s, "delta {}", instance.delta().to_f64_lossy());
    if let Some(seed) = seed {
        let _ = writeln!(s, "seed {seed}");
    }
    s.push_str("X\n");
    for row in instance.x().rows() {
        push_row(&mut s, row.iter().copied());
    }
    s.push_str("y_delta\n");
    push_row(&mut s, instance.y().iter().copied());
    if let Some(t) = truth {
        s.push_str("w_star\n");
        push_row(&mut s, t.w_star().iter().copied());
        s.push_str("support\n");
        let idx: Vec<String> = t.support().iter().map(|i| i.to_string()).collect();
        s.push_str(&idx.join(" "));
        s.push('\n');
    }
    s
}

pub fn write_instance<T: Scalar>(
    path: &Path,
    instance: &ProblemInstance<T>,
    truth: Option<&GroundTruth<T>>,
    seed: Option<u64>,
) -> Result<()> {
    std::fs::write(path, format_instance(instance, truth, seed))?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_values<T: Scalar>(line_no: usize, line: &str, expect: usize) -> Result<Vec<T>> {
    let vals: Vec<T> = line
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map(T::lit).map_err(|e| parse_err(line_no, format!("bad number `{tok}`: {e}"))))
        .collect::<Result<_>>()?;
    if vals.len() != expect {
        return Err(parse_err(line_no, format!("expected {expect} values, found {}", vals.len())));
    }
    Ok(vals)
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<InstanceFile<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("unexpected end of file, expected {what}")));

    let mut header = |key: &str| -> Result<(usize, String)> {
        let (no, line) = next(key)?;
        let mut parts = line.splitn(2, char::is_whitespace);
        let k = parts.next().unwrap_or_default();
        if k != key {
            return Err(parse_err(no, format!("expected `{key}`, found `{k}`")));
        }
        Ok((no, parts.next().unwrap_or_default().trim().to_string()))
    };
    let (no, n) = header("n")?;
    let n: usize = n.parse().map_err(|e| parse_err(no, e))?;
    let (no, d) = header("d")?;
    let d: usize = d.parse().map_err(|e| parse_err(no, e))?;
    let (no, delta) = header("delta")?;
    let delta: f64 = delta.parse().map_err(|e| parse_err(no, e))?;

    let (mut no, mut line) = next("seed or X")?;
    let mut seed = None;
    if let Some(rest) = line.strip_prefix("seed") {
        seed = Some(rest.trim().parse::<u64>().map_err(|e| parse_err(no, e))?);
        (no, line) = next("X")?;
    }
    if line != "X" {
        return Err(parse_err(no, format!("expected `X`, found `{line}`")));
    }
    let mut x = Array2::<T>::zeros((n, d));
    for i in 0..n {
        let (no, line) = next("design row")?;
        let row = parse_values::<T>(no, line, d)?;
        x.row_mut(i).assign(&Array1::from(row));
    }
    let (no, line) = next("y_delta")?;
    if line != "y_delta" {
        return Err(parse_err(no, format!("expected `y_delta`, found `{line}`")));
    }
    let (no, line) = next("target values")?;
    let y = Array1::from(parse_values::<T>(no, line, n)?);
    let instance = ProblemInstance::new(x, y, T::lit(delta))?;

    let truth = match next("w_star") {
        Err(_) => None,
        Ok((no, line)) => {
            if line != "w_star" {
                return Err(parse_err(no, format!("expected `w_star`, found `{line}`")));
            }
            let (no, line) = next("w_star values")?;
            let w = Array1::from(parse_values::<T>(no, line, d)?);
            let (no, line) = next("support")?;
            if line != "support" {
                return Err(parse_err(no, format!("expected `support`, found `{line}`")));
            }
            let (no, line) = next("support indices")?;
            let support = line.split_whitespace().map(|t| t.parse::<usize>().map_err(|e| parse_err(no, e))).collect::<Result<Vec<_>>>()?;
            let y_clean = instance.x().dot(&w);
            Some(GroundTruth::new(w, support, y_clean)?)
        }
    };
    Ok(InstanceFile { instance, truth, seed })
}

pub fn read_instance<T: Scalar>(path: &Path) -> Result<InstanceFile<T>> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// Writes rows under [`CSV_HEADER`].
pub fn write_metric_csv(path: &Path, rows: &[MetricRow]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(f, "{}", r.to_csv_line())?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn toml_floats() {
        assert_eq!(toml_float(1.0), "1.0");
        assert_eq!(toml_float(0.1), "0.1");
        assert_eq!(toml_float(1e-20), "1e-20");
        assert_eq!(toml_float(f64::INFINITY), "inf");
    }

    #[test]
    fn instance_round_trip() {
        let x = array![[1.0, 0.1 + 0.2, -3.5], [1e-17, 2.0, 0.0]];
        let w = array![0.0, 1.0 / 3.0, 0.0];
        let truth = GroundTruth::from_design(x.view(), w).unwrap();
        let inst = ProblemInstance::new(x, array![0.5, -0.25], 0.125).unwrap();
        let text = format_instance(&inst, Some(&truth), Some(42));
        let back = parse_instance::<f64>(&text).unwrap();
        assert_eq!(back.instance, inst);
        assert_eq!(back.truth.unwrap(), truth);
        assert_eq!(back.seed, Some(42));

        let bare = parse_instance::<f64>(&format_instance(&inst, None, None)).unwrap();
        assert!(bare.truth.is_none() && bare.seed.is_none());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_instance::<f64>("n 1\nd 2\ndelta 0\nX\n1 oops\ny_delta\n1\n").unwrap_err();
        assert!(err.to_string().contains("line 5"), "{err}");
        assert!(parse_instance::<f64>("n 1\nd 2\n").is_err());
    }
}

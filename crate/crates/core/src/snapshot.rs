//! Plain-text field snapshots.
//!
//! ```text
//! # gevrey-nse field v1 K=<K> kappa0=<val> reality=<0|1>
//! k1 k2 re1 im1 re2 im2
//! ```
//!
//! One line per nonzero mode. Floats use Rust's shortest round-trip form, so
//! a write/read cycle is bit exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField, Wavevector, C64};

const MAGIC: &str = "# gevrey-nse field v1";

pub fn write_field<W: Write>(u: &SpectralField, mut out: W) -> Result<()> {
    let g = u.grid();
    writeln!(out, "{MAGIC} K={} kappa0={:e} reality={}", g.k_max(), g.kappa0(), u.is_real() as u8)?;
    for (k, c) in u.iter_nonzero() {
        writeln!(out, "{} {} {:e} {:e} {:e} {:e}", k.k1, k.k2, c[0].re, c[0].im, c[1].re, c[1].im)?;
    }
    Ok(())
}

pub fn field_to_string(u: &SpectralField) -> String {
    let mut buf = Vec::new();
    write_field(u, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn header_value<'a>(fields: &[&'a str], key: &str, line: usize) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| parse_err(line, format!("header lacks {key}=")))
}

/// Parses a snapshot. Modes must be divergence free and, for `reality=1`,
/// conjugate symmetric, both to 1e-9; missing `-k` partners are filled in.
pub fn read_field<R: BufRead>(input: R) -> Result<SpectralField> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty snapshot"))?;
    let header = header?;
    let rest = header.strip_prefix(MAGIC).ok_or_else(|| parse_err(1, "not a gevrey-nse field v1 file"))?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let k_max: usize = header_value(&fields, "K", 1)?.parse().map_err(|_| parse_err(1, "bad K"))?;
    let kappa0: f64 = header_value(&fields, "kappa0", 1)?.parse().map_err(|_| parse_err(1, "bad kappa0"))?;
    let reality = match header_value(&fields, "reality", 1)? {
        "0" => false,
        "1" => true,
        other => return Err(parse_err(1, format!("reality must be 0 or 1, got {other}"))),
    };
    let grid = GridSpec::new(k_max, kappa0)?;
    let mut modes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines {
        let line = line?;
        let n = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 6 {
            return Err(parse_err(n, format!("expected 6 columns, found {}", parts.len())));
        }
        let k1: i32 = parts[0].parse().map_err(|_| parse_err(n, "bad k1"))?;
        let k2: i32 = parts[1].parse().map_err(|_| parse_err(n, "bad k2"))?;
        let mut v = [0.0f64; 4];
        for (slot, s) in v.iter_mut().zip(&parts[2..]) {
            *slot = s.parse().map_err(|_| parse_err(n, format!("bad number {s}")))?;
            if !slot.is_finite() {
                return Err(parse_err(n, "non-finite coefficient"));
            }
        }
        let k = Wavevector::new(k1, k2);
        if !seen.insert(k) {
            return Err(parse_err(n, format!("mode {k} listed twice")));
        }
        modes.push((k, [C64::new(v[0], v[1]), C64::new(v[2], v[3])]));
    }
    SpectralField::from_modes(grid, modes, reality)
}

pub fn field_from_str(s: &str) -> Result<SpectralField> {
    read_field(s.as_bytes())
}

//! Plain-text curve files.
//!
//! ```text
//! closed 4
//! 0 0 0
//! 1 0 0
//! 1 1 0
//! 0 1 0
//! ```
//!
//! Writers emit 17 significant digits so that reading back is exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{PLCurve, Point3};

pub fn write_curve(c: &PLCurve) -> String {
    let mut out = format!("{} {}\n", if c.is_closed() { "closed" } else { "open" }, c.vertices().len());
    for p in c.vertices() {
        out.push_str(&format!("{:.16e} {:.16e} {:.16e}\n", p.x, p.y, p.z));
    }
    out
}

pub fn read_curve(text: &str) -> Result<PLCurve> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty curve file".into() })?;
    let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
    let mut head = header.split_whitespace();
    let closed = match head.next() {
        Some("closed") => true,
        Some("open") => false,
        other => return Err(perr(hline, format!("expected `open` or `closed`, got {other:?}"))),
    };
    let n: usize =
        head.next().and_then(|s| s.parse().ok()).ok_or_else(|| perr(hline, "missing vertex count".into()))?;
    if head.next().is_some() {
        return Err(perr(hline, "trailing tokens in header".into()));
    }
    let mut vertices = Vec::with_capacity(n);
    for (ln, line) in lines {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| perr(ln, format!("bad number `{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 3 {
            return Err(perr(ln, format!("expected 3 coordinates, got {}", vals.len())));
        }
        vertices.push(Point3::new(vals[0], vals[1], vals[2]));
    }
    if vertices.len() != n {
        return Err(Error::Parse {
            line: hline + 1,
            msg: format!("header says {n} vertices, found {}", vertices.len()),
        });
    }
    PLCurve::new(vertices, closed)
}

pub fn save_curve(path: impl AsRef<Path>, c: &PLCurve) -> Result<()> {
    fs::write(path, write_curve(c))?;
    Ok(())
}

pub fn load_curve(path: impl AsRef<Path>) -> Result<PLCurve> {
    read_curve(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_loose_decimals() {
        let c = read_curve("open 2\n0 0 0\n1.5 -2e-3 .25\n").unwrap();
        assert!(!c.is_closed());
        assert_eq!(c.vertices()[1], Point3::new(1.5, -0.002, 0.25));
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_curve("").is_err());
        assert!(read_curve("loop 3\n").is_err());
        assert!(read_curve("open 3\n0 0 0\n1 0 0\n").is_err());
        assert!(read_curve("open 2\n0 0 0\n1 0\n").is_err());
        assert!(read_curve("closed 2\n0 0 0\n1 0 0\n").is_err());
        assert!(read_curve("open 2\n0 0 x\n1 0 0\n").is_err());
    }

    #[test]
    fn exact_roundtrip() {
        let c = PLCurve::closed(vec![
            Point3::new(0.1, 0.2, 0.3),
            Point3::new(1.0 / 3.0, -2.0 / 7.0, 1e-300),
            Point3::new(std::f64::consts::PI, 1e17, -0.0),
        ])
        .unwrap();
        assert_eq!(read_curve(&write_curve(&c)).unwrap(), c);
    }
}

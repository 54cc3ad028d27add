use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a grid density is continued outside its sampled nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    /// Zero outside the node rectangle.
    Zero,
    /// Periodic with period `nx * h` by `ny * h`; node `nx` wraps to node 0.
    Periodic,
}

/// Node values on a regular grid with bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    origin: Complex64,
    cell_size: f64,
    nx: usize,
    ny: usize,
    /// Row-major, `values[j * nx + i]` at `origin + h (i + j i)`.
    values: Vec<f64>,
    extension: Extension,
}

impl GridDensity {
    pub fn new(
        origin: Complex64,
        cell_size: f64,
        rows: Vec<Vec<f64>>,
        extension: Extension,
    ) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidDensity("grid cell size must be positive".into()));
        }
        let ny = rows.len();
        let nx = rows.first().map_or(0, Vec::len);
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidDensity("grid needs at least 2 x 2 nodes".into()));
        }
        let mut values = Vec::with_capacity(nx * ny);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != nx {
                return Err(Error::InvalidDensity(format!(
                    "grid row {j} has {} values, expected {nx}",
                    row.len()
                )));
            }
            for v in row {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidDensity(format!(
                        "grid node value {v} in row {j} is negative or not finite"
                    )));
                }
                values.push(v);
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidDensity("grid density is identically zero".into()));
        }
        Ok(Self {
            origin,
            cell_size,
            nx,
            ny,
            values,
            extension,
        })
    }

    /// Parses node values from CSV text, one grid row per line (`#` comments allowed).
    pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| Error::Parse {
                        line: n + 1,
                        message: format!("bad grid value {s:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    fn node(&self, i: i64, j: i64) -> f64 {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        match self.extension {
            Extension::Zero => {
                if i < 0 || j < 0 || i >= nx || j >= ny {
                    0.0
                } else {
                    self.values[(j * nx + i) as usize]
                }
            }
            Extension::Periodic => {
                let (i, j) = (i.rem_euclid(nx), j.rem_euclid(ny));
                self.values[(j * nx + i) as usize]
            }
        }
    }

    pub fn density(&self, z: Complex64) -> f64 {
        let u = (z.re - self.origin.re) / self.cell_size;
        let v = (z.im - self.origin.im) / self.cell_size;
        if self.extension == Extension::Zero {
            let (mx, my) = ((self.nx - 1) as f64, (self.ny - 1) as f64);
            if u < 0.0 || v < 0.0 || u > mx || v > my {
                return 0.0;
            }
        }
        let (fu, fv) = (u.floor(), v.floor());
        let (i, j) = (fu as i64, fv as i64);
        let (a, b) = (u - fu, v - fv);
        (1.0 - a) * (1.0 - b) * self.node(i, j)
            + a * (1.0 - b) * self.node(i + 1, j)
            + (1.0 - a) * b * self.node(i, j + 1)
            + a * b * self.node(i + 1, j + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(ext: Extension) -> GridDensity {
        GridDensity::new(
            Complex64::new(0.0, 0.0),
            2.0,
            vec![vec![0.0, 1.0, 2.0], vec![4.0, 5.0, 6.0]],
            ext,
        )
        .unwrap()
    }

    #[test]
    fn bilinear_between_nodes() {
        let g = grid(Extension::Zero);
        assert_relative_eq!(g.density(Complex64::new(0.0, 0.0)), 0.0);
        assert_relative_eq!(g.density(Complex64::new(2.0, 2.0)), 5.0);
        assert_relative_eq!(g.density(Complex64::new(1.0, 1.0)), 2.5);
        assert_relative_eq!(g.density(Complex64::new(3.0, 0.5)), 0.75 * 1.5 + 0.25 * 5.5);
    }

    #[test]
    fn zero_extension_vanishes_outside() {
        let g = grid(Extension::Zero);
        assert_eq!(g.density(Complex64::new(-0.1, 1.0)), 0.0);
        assert_eq!(g.density(Complex64::new(4.1, 1.0)), 0.0);
    }

    #[test]
    fn periodic_extension_wraps() {
        let g = grid(Extension::Periodic);
        let z = Complex64::new(1.3, 0.7);
        assert_relative_eq!(g.density(z), g.density(z + Complex64::new(6.0, -4.0)), max_relative = 1e-12);
        // Between the last column and the wrapped first column.
        assert_relative_eq!(g.density(Complex64::new(5.0, 0.0)), 1.0);
    }

    #[test]
    fn rejects_negative_and_ragged() {
        let bad = GridDensity::new(
            Complex64::new(0.0, 0.0),
            1.0,
            vec![vec![1.0, -1.0], vec![1.0, 1.0]],
            Extension::Zero,
        );
        assert!(bad.is_err());
        let ragged = GridDensity::new(
            Complex64::new(0.0, 0.0),
            1.0,
            vec![vec![1.0, 1.0], vec![1.0]],
            Extension::Zero,
        );
        assert!(ragged.is_err());
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = GridDensity::parse_rows("1,2\n# c\n3,x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "bad grid value \"x\": invalid float literal".into()
            }
        );
    }
}

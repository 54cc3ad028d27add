use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stockyard::lambda_stockyard;
use super::sup::{lambda_sup, SupOptions};
use super::{LambdaEstimate, Method};
use crate::ccpath::{sample_lambda_direct, DirectOptions};
use crate::density::DensityField;
use crate::error::{Error, Result};

/// Axis-aligned window sampled by an `n x n` lattice (its center when `n = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub n: usize,
}

impl Window {
    pub fn point(z: Complex64) -> Self {
        Self {
            x0: z.re,
            y0: z.im,
            x1: z.re,
            y1: z.im,
            n: 1,
        }
    }

    pub fn square(half_width: f64, n: usize) -> Self {
        Self {
            x0: -half_width,
            y0: -half_width,
            x1: half_width,
            y1: half_width,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.y0, self.x1, self.y1].iter().all(|v| v.is_finite());
        if !finite || self.n == 0 || self.x1 < self.x0 || self.y1 < self.y0 {
            return Err(Error::arg(format!("invalid window {self:?}")));
        }
        Ok(())
    }

    /// Sample points, `y` outer and `x` inner. A zero-width axis contributes a
    /// single coordinate.
    pub fn points(&self) -> Vec<Complex64> {
        let axis = |lo: f64, hi: f64| -> Vec<f64> {
            if self.n == 1 {
                vec![0.5 * (lo + hi)]
            } else if lo == hi {
                vec![lo]
            } else {
                let m = (self.n - 1) as f64;
                (0..self.n).map(|i| lo + (hi - lo) * i as f64 / m).collect()
            }
        };
        let xs = axis(self.x0, self.x1);
        axis(self.y0, self.y1)
            .into_iter()
            .flat_map(|y| xs.iter().map(move |&x| Complex64::new(x, y)))
            .collect()
    }
}

/// Window of base points crossed with a ladder of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub window: Window,
    pub deltas: Vec<f64>,
}

impl SweepGrid {
    pub fn new(window: Window, deltas: Vec<f64>) -> Result<Self> {
        window.validate()?;
        if deltas.is_empty() || deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::arg("deltas must be positive and finite"));
        }
        if deltas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("deltas must be strictly increasing"));
        }
        Ok(Self { window, deltas })
    }

    /// `count` radii `first * ratio^k`.
    pub fn geometric(first: f64, ratio: f64, count: usize) -> Vec<f64> {
        (0..count).map(|k| first * ratio.powi(k as i32)).collect()
    }
}

/// Options shared by every estimator in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepOptions {
    pub sup: SupOptions,
    pub direct: DirectOptions,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub z_index: usize,
    pub delta_index: usize,
    pub z: Complex64,
    pub delta: f64,
    pub result: Result<LambdaEstimate>,
}

/// Seed of cell `index` derived from the master seed (splitmix64 finalizer).
pub fn cell_seed(seed: u64, index: u64) -> u64 {
    let mut x = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Runs one estimator.
pub fn estimate(
    field: &DensityField,
    z: Complex64,
    delta: f64,
    method: Method,
    opts: &SweepOptions,
    seed: u64,
) -> Result<LambdaEstimate> {
    match method {
        Method::SupFormula => lambda_sup(field, z, delta, &opts.sup),
        Method::StockyardLower => lambda_stockyard(field, z, delta, &opts.sup),
        Method::DirectPath => sample_lambda_direct(field, z, delta, &opts.direct, &opts.sup, seed),
    }
}

/// Evaluates `method` over every `(z, delta)` of the grid in parallel. Rows come
/// back ordered by `(z index, delta index)`; failures stay in their rows.
pub fn lambda_sweep(
    field: &DensityField,
    grid: &SweepGrid,
    method: Method,
    opts: &SweepOptions,
) -> Vec<SweepRow> {
    let points = grid.window.points();
    let cells: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..grid.deltas.len()).map(move |k| (i, k)))
        .collect();
    cells
        .par_iter()
        .enumerate()
        .map(|(index, &(i, k))| {
            let (z, delta) = (points[i], grid.deltas[k]);
            SweepRow {
                z_index: i,
                delta_index: k,
                z,
                delta,
                result: estimate(field, z, delta, method, opts, cell_seed(opts.seed, index as u64)),
            }
        })
        .collect()
}

pub const SWEEP_HEADER: &str = "re(z),im(z),delta,method,value,witness_re,witness_im,witness_radius";

/// Float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes rows as CSV; failed rows carry an empty value and the error text.
pub fn write_sweep_csv(out: &mut impl Write, rows: &[SweepRow], method: Method) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER},error")?;
    for row in rows {
        let lead = format!("{},{},{},{}", fmt_f64(row.z.re), fmt_f64(row.z.im), fmt_f64(row.delta), method.name());
        match &row.result {
            Ok(est) => {
                let (wr, wi, rr) = match est.witness.as_ref().and_then(|w| w.disk()) {
                    Some((c, r)) => (fmt_f64(c.re), fmt_f64(c.im), fmt_f64(r)),
                    None => Default::default(),
                };
                writeln!(out, "{lead},{},{wr},{wi},{rr},", fmt_f64(est.value))?;
            }
            Err(e) => writeln!(out, "{lead},,,,,\"{}\"", e.to_string().replace('"', "'"))?,
        }
    }
    Ok(())
}

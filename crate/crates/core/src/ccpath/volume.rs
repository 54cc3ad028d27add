use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::control::{integrate_path, ControlSignal};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::structure::{cell_seed, lambda_sup, twist, SupOptions};

pub const HISTOGRAM_CELLS: usize = 64;
const CONTROL_INTERVALS: usize = 8;
const STEPS_PER_INTERVAL: usize = 16;
const CHUNK: usize = 256;

/// Occupancy estimate of the volume reached from `(z, t)` by horizontal paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeMc {
    pub estimate: f64,
    /// Two-sigma binomial band on the occupied fraction.
    pub band: f64,
    pub occupied: usize,
    pub paths: usize,
    /// Volume of the histogram box `[-3 delta, 3 delta]^2 x [-H, H]`.
    pub box_volume: f64,
    /// `H = Lambda_ub(z, 3 delta)`, the height of the outer box.
    pub height: f64,
}

fn random_control(rng: &mut ChaCha8Rng) -> Result<ControlSignal> {
    let values = (0..CONTROL_INTERVALS)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            (r * a.cos(), r * a.sin())
        })
        .collect();
    ControlSignal::uniform(values)
}

/// Endpoints of `n_paths` random 8-interval controls are placed, in the
/// twisted coordinates `(w - z, s - t - T(z, w))`, into a 64^3 histogram over the
/// outer box; the estimate is the occupied share of the box volume. It over
/// counts at fixed resolution and fills in as `n_paths` grows.
pub fn ball_volume_mc(
    field: &DensityField,
    z: Complex64,
    t: f64,
    delta: f64,
    n_paths: usize,
    seed: u64,
    sup: &SupOptions,
) -> Result<VolumeMc> {
    if !field.has_potential() {
        return Err(Error::PotentialUnavailable {
            family: field.kind().name(),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    if n_paths < 1000 {
        return Err(Error::arg("ball_volume_mc needs 1000 or more paths"));
    }
    let height = lambda_sup(field, z, 3.0 * delta, sup)?.value;
    let half = 3.0 * delta;
    let box_volume = (2.0 * half).powi(2) * 2.0 * height;
    let n = HISTOGRAM_CELLS;
    let total_cells = (n * n * n) as f64;
    let bin = |v: f64, lo: f64, hi: f64| -> Option<usize> {
        let u = (v - lo) / (hi - lo);
        (0.0..1.0).contains(&u).then(|| ((u * n as f64) as usize).min(n - 1))
    };

    let chunks: Vec<usize> = (0..n_paths.div_ceil(CHUNK)).collect();
    let sets = chunks
        .par_iter()
        .map(|&chunk| -> Result<HashSet<usize>> {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, chunk as u64));
            let mut cells = HashSet::new();
            if height <= 0.0 {
                return Ok(cells);
            }
            let count = CHUNK.min(n_paths - chunk * CHUNK);
            for _ in 0..count {
                let control = random_control(&mut rng)?;
                let end = integrate_path(field, (z.re, z.im, t), &control, delta, STEPS_PER_INTERVAL)?.end();
                let w = Complex64::new(end.x, end.y);
                let lift = end.t - t - twist(field, z, w)?;
                let idx = (
                    bin(end.x - z.re, -half, half),
                    bin(end.y - z.im, -half, half),
                    bin(lift, -height, height),
                );
                if let (Some(i), Some(j), Some(k)) = idx {
                    cells.insert((i * n + j) * n + k);
                }
            }
            Ok(cells)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut union = HashSet::new();
    for s in sets {
        union.extend(s);
    }
    let occupied = union.len();
    let p = occupied as f64 / total_cells;
    Ok(VolumeMc {
        estimate: p * box_volume,
        band: 2.0 * (p * (1.0 - p) / total_cells).sqrt() * box_volume,
        occupied,
        paths: n_paths,
        box_volume,
        height,
    })
}

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::geometry::{boundary_line_integral, Piece, PlaneCurve};
use crate::structure::{lambda_sup, Bound, LambdaEstimate, Method, SupOptions, Witness};

/// Sampling budget of the direct loop search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectOptions {
    pub samples: usize,
    /// Largest number of turns around a sampled circle.
    pub max_turns: u32,
    /// Share of samples spent on random convex polygons.
    pub polygon_share: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            max_turns: 8,
            polygon_share: 0.25,
        }
    }
}

/// `t`-displacement of the horizontal lift of a closed loop,
/// `closed-integral P_y dx - P_x dy`.
pub fn loop_displacement(field: &DensityField, curve: &PlaneCurve) -> Result<f64> {
    boundary_line_integral(field, curve)
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    Circle { center: Complex64, radius: f64, turns: u32 },
    Polygon { index: usize },
}

/// Largest radius of a circle around `center`, wound `turns` times and joined to
/// `z` by an out-and-back segment, whose total length stays within `delta`.
fn max_circle_radius(z: Complex64, center: Complex64, turns: u32, delta: f64) -> f64 {
    let d = (z - center).norm();
    let wind = TAU * turns as f64;
    let outside = (delta + 2.0 * d) / (wind + 2.0);
    if outside >= d {
        outside
    } else if delta >= 2.0 * d {
        (delta - 2.0 * d) / (wind - 2.0)
    } else {
        0.0
    }
}

fn circle_loop(z: Complex64, center: Complex64, radius: f64, turns: u32) -> Result<PlaneCurve> {
    let d = z - center;
    let angle = if d.norm() > 0.0 { d.arg() } else { 0.0 };
    let touch = center + Complex64::from_polar(radius, angle);
    let mut pieces = Vec::new();
    let joined = (touch - z).norm() > 1e-12 * radius.max(z.norm()).max(1.0);
    if joined {
        pieces.push(Piece::segment(z, touch));
    }
    for _ in 0..turns {
        pieces.extend_from_slice(PlaneCurve::circle(center, radius, angle, true).pieces());
    }
    if joined {
        pieces.push(Piece::segment(touch, z));
    }
    PlaneCurve::new(pieces)
}

/// Random convex polygon through `z`, clockwise, with perimeter `delta`.
fn random_polygon(rng: &mut ChaCha8Rng, z: Complex64, delta: f64) -> Vec<Complex64> {
    let n = rng.random_range(3..=9);
    let stretch = rng.random_range(0.3..1.0);
    let tilt = rng.random_range(0.0..TAU);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    angles.sort_by(|a, b| b.total_cmp(a));
    let rot = Complex64::from_polar(1.0, tilt);
    let mut pts: Vec<Complex64> = angles
        .iter()
        .map(|&a| rot * Complex64::new(a.cos(), stretch * a.sin()))
        .collect();
    let perimeter: f64 = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum();
    let anchor = pts[0];
    for p in &mut pts {
        *p = z + (*p - anchor) * (delta / perimeter);
    }
    pts
}

/// Lower bound for `Lambda(z, delta)` from explicit loops of length `<= delta`
/// based at `z`: circles wound around points near the sup witness, circles
/// through `z`, and random convex polygons. Reproducible for a given seed.
pub fn sample_lambda_direct(
    field: &DensityField,
    z: Complex64,
    delta: f64,
    opts: &DirectOptions,
    sup: &SupOptions,
    seed: u64,
) -> Result<LambdaEstimate> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    if !field.has_potential() {
        return Err(Error::PotentialUnavailable {
            family: field.kind().name(),
        });
    }
    let (hub, hub_radius) = lambda_sup(field, z, delta, sup)?
        .witness
        .and_then(|w| w.disk())
        .unwrap_or((z, delta));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = opts.samples.max(1);
    let polygon_count = ((samples as f64) * opts.polygon_share.clamp(0.0, 1.0)).round() as usize;
    let max_turns = opts.max_turns.max(1);

    let mut best: Option<(f64, Candidate)> = None;
    let mut polygons = Vec::new();
    let consider = |value: f64, cand: Candidate, best: &mut Option<(f64, Candidate)>| {
        if best.is_none_or(|(v, _)| value > v) {
            *best = Some((value, cand));
        }
    };
    for k in 0..samples.saturating_sub(polygon_count) {
        let turns = rng.random_range(1..=max_turns);
        let center = if k % 2 == 0 {
            // Circle through z.
            let r = max_circle_radius(z, z, turns, delta) * rng.random_range(0.5..=1.0);
            z + Complex64::from_polar(r, rng.random_range(0.0..TAU))
        } else {
            let spread = hub_radius.max(1e-3 * delta);
            hub + Complex64::from_polar(spread * rng.random::<f64>(), rng.random_range(0.0..TAU))
        };
        let cap = max_circle_radius(z, center, turns, delta);
        if !(cap > 0.0) {
            continue;
        }
        let radius = if rng.random_bool(0.5) {
            cap
        } else {
            cap * rng.random_range(0.05..=1.0)
        };
        let value = turns as f64 * field.disk_mass(center, radius)?;
        consider(value, Candidate::Circle { center, radius, turns }, &mut best);
    }
    for _ in 0..polygon_count {
        let verts = random_polygon(&mut rng, z, delta);
        let value = loop_displacement(field, &PlaneCurve::polygon(&verts)?)?;
        polygons.push(verts);
        consider(value, Candidate::Polygon { index: polygons.len() - 1 }, &mut best);
    }

    let (value, witness) = match best {
        Some((value, Candidate::Circle { center, radius, turns })) => (
            value,
            Some(Witness::Loop {
                path: circle_loop(z, center, radius, turns)?,
                circle: Some((center, radius)),
            }),
        ),
        Some((value, Candidate::Polygon { index })) => (
            value,
            Some(Witness::Loop {
                path: PlaneCurve::polygon(&polygons[index])?,
                circle: None,
            }),
        ),
        None => (0.0, None),
    };
    Ok(LambdaEstimate {
        z,
        delta,
        value: value.max(0.0),
        method: Method::DirectPath,
        bound: Bound::Lower,
        witness,
    })
}

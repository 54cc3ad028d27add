#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stockyard_core::density::{Bump, BumpLattice};
use stockyard_core::geometry::{Pen, Piece, PlaneCurve, Stockyard};
use stockyard_core::{Complex64, DensityField, PolynomialPotential};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn constant() -> DensityField {
    DensityField::constant(4.0).unwrap()
}

pub fn modulus_squared() -> DensityField {
    DensityField::polynomial(PolynomialPotential::modulus_power(1))
}

pub fn quartic() -> DensityField {
    DensityField::polynomial(PolynomialPotential::modulus_power(2))
}

/// `|z|^2 + 2 |z|^4`.
pub fn mixed_polynomial() -> DensityField {
    let one = c(1.0, 0.0);
    DensityField::polynomial(PolynomialPotential::new([(1, 1, one), (2, 2, 2.0 * one)]).unwrap())
}

pub fn radial_half() -> DensityField {
    DensityField::radial_alpha(0.5).unwrap()
}

pub fn few_bumps() -> DensityField {
    DensityField::bump_lattice(
        BumpLattice::new(vec![
            Bump { center: c(0.0, 0.0), mass: 1.0, radius: 0.25 },
            Bump { center: c(1.0, 0.5), mass: 0.5, radius: 0.2 },
            Bump { center: c(-0.7, 1.2), mass: 2.0, radius: 0.3 },
        ])
        .unwrap(),
    )
}

/// Convex polygon with 3..=7 vertices, clockwise, first vertex at `anchor`,
/// perimeter `perimeter`.
pub fn convex_polygon(rng: &mut ChaCha8Rng, anchor: Complex64, perimeter: f64) -> Vec<Complex64> {
    let n = rng.random_range(3..=7);
    let stretch = rng.random_range(0.3..1.0);
    let tilt = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
    let mut angles: Vec<f64> = (0..n).map(|k| (k as f64 + rng.random_range(0.1..0.9)) * TAU / n as f64).collect();
    angles.reverse();
    let mut pts: Vec<Complex64> = angles.iter().map(|&a| tilt * c(a.cos(), stretch * a.sin())).collect();
    let length: f64 = (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum();
    let first = pts[0];
    for p in &mut pts {
        *p = anchor + (*p - first) * (perimeter / length);
    }
    pts
}

/// Star-shaped (possibly nonconvex) simple polygon around `center`.
pub fn star_polygon(rng: &mut ChaCha8Rng, center: Complex64, scale: f64) -> Vec<Complex64> {
    let n = rng.random_range(3..=9);
    (0..n)
        .map(|k| {
            let a = (k as f64 + rng.random_range(0.1..0.9)) * TAU / n as f64;
            center + Complex64::from_polar(scale * rng.random_range(0.3..1.0), a)
        })
        .collect()
}

pub fn random_pen(rng: &mut ChaCha8Rng, span: f64) -> Pen {
    let center = c(rng.random_range(-span..span), rng.random_range(-span..span));
    let size = rng.random_range(0.05..1.0) * span.max(1.0);
    if rng.random_bool(0.5) {
        Pen::circle(center, size).unwrap()
    } else {
        Pen::polygon(star_polygon(rng, center, size)).unwrap()
    }
}

/// A valid stockyard based at `z` with fencing at most `budget`: a chain of
/// circles and convex polygons, each touching an earlier pen (the first one `z`).
pub fn random_stockyard(rng: &mut ChaCha8Rng, z: Complex64, budget: f64) -> Stockyard {
    let count = rng.random_range(1..=4);
    let shares: Vec<f64> = (0..count).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = shares.iter().sum();
    let used = rng.random_range(0.5..1.0) * budget;
    let mut anchors = vec![z];
    let mut pens = Vec::new();
    for share in shares {
        let fencing = used * share / total;
        let anchor = anchors[rng.random_range(0..anchors.len())];
        let pen = if rng.random_bool(0.6) {
            let radius = fencing / TAU;
            Pen::circle(anchor + Complex64::from_polar(radius, rng.random_range(0.0..TAU)), radius).unwrap()
        } else {
            Pen::polygon(convex_polygon(rng, anchor, fencing)).unwrap()
        };
        let boundary = pen.boundary();
        let length = boundary.length();
        anchors.extend((0..4).map(|k| boundary.point_at(length * (k as f64 + 0.5) / 4.0)));
        pens.push(pen);
    }
    Stockyard::new(z, budget, pens)
}

/// Closed loop of segments and arcs with total length `length`.
pub fn random_loop(rng: &mut ChaCha8Rng, length: f64) -> PlaneCurve {
    let center = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let verts = star_polygon(rng, center, 1.0);
    let n = verts.len();
    let pieces: Vec<Piece> = (0..n)
        .map(|i| {
            let (p, q) = (verts[i], verts[(i + 1) % n]);
            if rng.random_bool(0.5) {
                let sweep = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                Piece::arc_between(p, q, sweep).unwrap()
            } else {
                Piece::segment(p, q)
            }
        })
        .collect();
    let curve = PlaneCurve::new(pieces).unwrap();
    let scale = length / curve.length();
    curve.transformed(scale, c(0.0, 0.0))
}

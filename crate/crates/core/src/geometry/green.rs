use num_complex::Complex64;

use super::curve::{PlaneCurve, Piece};
use super::pen::{Pen, Stockyard};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_rect, QuadOptions, Rect};

const LINE_TOL: f64 = 1e-12;
const AREA_TOL: f64 = 1e-9;

fn piece_integral(field: &DensityField, piece: &Piece) -> Result<f64> {
    let length = piece.length();
    if length == 0.0 {
        return Ok(0.0);
    }
    let integrand = |t: f64| -> f64 {
        let v = piece.velocity(t);
        match field.gradient(piece.point(t)) {
            Ok((px, py)) => py * v.re - px * v.im,
            Err(_) => f64::NAN,
        }
    };
    // Absolute floor from the gradient size, so pieces with vanishing
    // integrals (radial segments, say) terminate.
    let scale = [0.0, 0.5, 1.0]
        .iter()
        .map(|&t| {
            let (px, py) = field.gradient(piece.point(t))?;
            Ok(px.hypot(py))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let opts = QuadOptions {
        abs_tol: (1e-15 * scale * length).max(1e-300),
        ..QuadOptions::default().with_rel_tol(LINE_TOL)
    };
    let est = integrate(integrand, 0.0, 1.0, &opts, "boundary line integral")?;
    Ok(est.value)
}

/// `closed-integral_curve P_y dx - P_x dy`, piece by piece.
///
/// For a clockwise pen boundary this is the enclosed mass of `Delta P`.
pub fn boundary_line_integral(field: &DensityField, curve: &PlaneCurve) -> Result<f64> {
    if !field.has_potential() {
        return Err(Error::PotentialUnavailable {
            family: field.kind().name(),
        });
    }
    curve
        .pieces()
        .iter()
        .map(|p| piece_integral(field, p))
        .sum()
}

/// Mass of `Delta P` inside a triangle, through the collapsed square
/// `(u, v) -> a + u (b - a) + u v (c - b)` with Jacobian `2 |area| u`.
pub fn triangle_mass(field: &DensityField, a: Complex64, b: Complex64, c: Complex64) -> Result<f64> {
    let twice_area = ((b - a).re * (c - a).im - (b - a).im * (c - a).re).abs();
    if twice_area == 0.0 {
        return Ok(0.0);
    }
    let opts = QuadOptions::default().with_rel_tol(AREA_TOL);
    let rect = Rect {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    let est = integrate_rect(
        |u, v| twice_area * u * field.density(a + (b - a) * u + (c - b) * (u * v)),
        rect,
        &opts,
        "triangle mass",
    )?;
    Ok(est.value)
}

/// Ear-clipping triangulation of a simple polygon.
pub fn triangulate(vertices: &[Complex64]) -> Vec<[Complex64; 3]> {
    let orientation = {
        let n = vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (vertices[i], vertices[(i + 1) % n]);
                p.re * q.im - q.re * p.im
            })
            .sum::<f64>()
            .signum()
    };
    let cross = |o: Complex64, p: Complex64, q: Complex64| {
        ((p - o).re * (q - o).im - (p - o).im * (q - o).re) * orientation
    };
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let n = idx.len();
        let ear = (0..n).find(|&k| {
            let (p, o, q) = (
                vertices[idx[(k + n - 1) % n]],
                vertices[idx[k]],
                vertices[idx[(k + 1) % n]],
            );
            if cross(p, o, q) <= 0.0 {
                return false;
            }
            idx.iter().all(|&m| {
                let w = vertices[m];
                if w == p || w == o || w == q {
                    return true;
                }
                !(cross(p, o, w) >= 0.0 && cross(o, q, w) >= 0.0 && cross(q, p, w) >= 0.0)
            })
        });
        // A simple polygon always has an ear; fall back to the first corner
        // only if round-off hides every one.
        let k = ear.unwrap_or(0);
        out.push([
            vertices[idx[(k + n - 1) % n]],
            vertices[idx[k]],
            vertices[idx[(k + 1) % n]],
        ]);
        idx.remove(k);
    }
    out.push([vertices[idx[0]], vertices[idx[1]], vertices[idx[2]]]);
    out
}

/// `int_pen Delta P`.
pub fn pen_mass(field: &DensityField, pen: &Pen) -> Result<f64> {
    match pen {
        Pen::Circle { center, radius } => field.disk_mass(*center, *radius),
        Pen::Polygon { vertices } => triangulate(vertices)
            .into_iter()
            .map(|[a, b, c]| triangle_mass(field, a, b, c))
            .sum(),
    }
}

/// Total mass over the pens of a valid stockyard, one term per listed pen.
pub fn stockyard_mass(field: &DensityField, stockyard: &Stockyard) -> Result<f64> {
    let report = stockyard.validate();
    if !report.passed() {
        return Err(Error::InvalidStockyard(report.failures().join("; ")));
    }
    let mut cache: Vec<(&Pen, f64)> = Vec::new();
    let mut total = 0.0;
    for pen in &stockyard.pens {
        let mass = match cache.iter().find(|(p, _)| *p == pen) {
            Some(&(_, m)) => m,
            None => {
                let m = pen_mass(field, pen)?;
                cache.push((pen, m));
                m
            }
        };
        total += mass;
    }
    Ok(total)
}

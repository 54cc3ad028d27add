use num_complex::Complex64;

use super::curve::{PlaneCurve, Piece};
use crate::error::{Error, Result};

fn triangle(a: Complex64, b: Complex64, c: Complex64) -> PlaneCurve {
    PlaneCurve::polygon(&[a, b, c]).expect("three vertices")
}

/// Splits a closed loop of length `3 delta` into seven closed loops of length
/// at most `2 delta` whose line integrals add up to the original one.
///
/// With `z0 = gamma(0)`, `z1`, `z2` the points at one and two thirds of the
/// length, loops 1-3 follow each third and return along its chord; loops 4-6
/// are the corner triangles `z_j -> m_j -> m_{j-1} -> z_j` cut off by the
/// chord midpoints `m_j = (z_j + z_{j+1}) / 2`, and loop 7 is the midpoint
/// triangle `m_0 -> m_1 -> m_2`. The chords cancel in pairs.
pub fn split_loop_into_seven(curve: &PlaneCurve) -> Result<[PlaneCurve; 7]> {
    let length = curve.length();
    if length < 1e-12 {
        return Err(Error::DegenerateLoop(length));
    }
    if !curve.is_closed() {
        return Err(Error::InvalidGeometry("loop to split is not closed".into()));
    }
    let third = length / 3.0;
    let arcs = [
        curve.subcurve(0.0, third),
        curve.subcurve(third, 2.0 * third),
        curve.subcurve(2.0 * third, length),
    ];
    let z = [curve.start(), arcs[1].start(), arcs[2].start()];
    let m = [
        0.5 * (z[0] + z[1]),
        0.5 * (z[1] + z[2]),
        0.5 * (z[2] + z[0]),
    ];
    let closing = |arc: &PlaneCurve, to: Complex64| -> PlaneCurve {
        let mut pieces = arc.pieces().to_vec();
        pieces.push(Piece::segment(arc.end(), to));
        PlaneCurve::new(pieces).expect("chord starts at the arc end")
    };
    Ok([
        closing(&arcs[0], z[0]),
        closing(&arcs[1], z[1]),
        closing(&arcs[2], z[2]),
        triangle(z[0], m[0], m[2]),
        triangle(z[1], m[1], m[0]),
        triangle(z[2], m[2], m[1]),
        triangle(m[0], m[1], m[2]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equilateral_triangle() {
        let delta = 2.0;
        let h = delta * 3f64.sqrt() / 2.0;
        let tri = PlaneCurve::polygon(&[c(0.0, 0.0), c(delta, 0.0), c(0.5 * delta, h)]).unwrap();
        let parts = split_loop_into_seven(&tri).unwrap();
        for p in &parts[..3] {
            assert!(p.signed_area().abs() < 1e-12);
            assert_relative_eq!(p.length(), 2.0 * delta, max_relative = 1e-12);
        }
        for p in &parts[3..] {
            assert_relative_eq!(p.length(), 1.5 * delta, max_relative = 1e-12);
            assert_relative_eq!(p.signed_area(), tri.signed_area() / 4.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn circle_pieces_stay_short() {
        let delta = 1.0;
        let circle = PlaneCurve::circle(c(0.3, 0.0), 3.0 * delta / (2.0 * PI), 0.2, true);
        let parts = split_loop_into_seven(&circle).unwrap();
        for p in &parts {
            assert!(p.is_closed());
            assert!(p.length() <= 2.0 * delta + 1e-9);
        }
        let total: f64 = parts.iter().map(PlaneCurve::signed_area).sum();
        assert_relative_eq!(total, circle.signed_area(), max_relative = 1e-12);
    }

    #[test]
    fn degenerate_loop_rejected() {
        let dot = PlaneCurve::polygon(&[c(1.0, 1.0), c(1.0, 1.0)]).unwrap();
        assert!(matches!(split_loop_into_seven(&dot), Err(Error::DegenerateLoop(_))));
    }
}

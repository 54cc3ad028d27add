use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One smooth piece of a plane curve, parametrized by arc length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Piece {
    Segment {
        start: Complex64,
        end: Complex64,
    },
    /// `center + radius * e^{i(start_angle + theta)}` for `theta` from 0 to
    /// `sweep`; a negative sweep runs clockwise.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn segment(start: Complex64, end: Complex64) -> Self {
        Piece::Segment { start, end }
    }

    /// Arc from `p` to `q` turning through `sweep` radians (`0 < |sweep| < 2 pi`).
    pub fn arc_between(p: Complex64, q: Complex64, sweep: f64) -> Result<Self> {
        let chord = (q - p).norm();
        if !(sweep.abs() > 0.0 && sweep.abs() < TAU) || chord == 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "cannot fit an arc of sweep {sweep} between {p} and {q}"
            )));
        }
        let radius = chord / (2.0 * (0.5 * sweep.abs()).sin());
        // Center sits on the chord bisector, to the left for counterclockwise arcs.
        let mid = 0.5 * (p + q);
        let unit = (q - p) / chord;
        let normal = Complex64::new(-unit.im, unit.re) * sweep.signum();
        let offset = radius * (0.5 * sweep.abs()).cos();
        let center = mid + normal * offset;
        Ok(Piece::Arc {
            center,
            radius,
            start_angle: (p - center).arg(),
            sweep,
        })
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { start, end } => (end - start).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at fraction `t` in [0, 1] of the piece.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Segment { start, end } => start + (end - start) * t,
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => center + Complex64::from_polar(radius, start_angle + sweep * t),
        }
    }

    /// Derivative of [`Piece::point`] with respect to `t`.
    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Segment { start, end } => end - start,
            Piece::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => Complex64::i() * Complex64::from_polar(radius * sweep, start_angle + sweep * t),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// The part of the piece between fractions `t0` and `t1`.
    pub fn sub(&self, t0: f64, t1: f64) -> Self {
        match *self {
            Piece::Segment { .. } => Piece::Segment {
                start: self.point(t0),
                end: self.point(t1),
            },
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start_angle: start_angle + sweep * t0,
                sweep: sweep * (t1 - t0),
            },
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Piece::Segment { start, end } => Piece::Segment {
                start: end,
                end: start,
            },
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Piece::Arc {
                center,
                radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
        }
    }

    pub fn transformed(&self, scale: f64, shift: Complex64) -> Self {
        match *self {
            Piece::Segment { start, end } => Piece::Segment {
                start: start * scale + shift,
                end: end * scale + shift,
            },
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Piece::Arc {
                center: center * scale + shift,
                radius: radius * scale,
                start_angle,
                sweep,
            },
        }
    }
}

/// Piecewise smooth plane curve made of segments and circular arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurve {
    pieces: Vec<Piece>,
}

fn joint_tolerance(pieces: &[Piece]) -> f64 {
    let scale = pieces
        .iter()
        .map(|p| p.start().norm().max(p.length()))
        .fold(1.0, f64::max);
    1e-9 * scale
}

impl PlaneCurve {
    /// Chains `pieces`, which must meet end to start.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidGeometry("curve has no pieces".into()));
        }
        let tol = joint_tolerance(&pieces);
        for (k, w) in pieces.windows(2).enumerate() {
            let gap = (w[1].start() - w[0].end()).norm();
            if gap > tol {
                return Err(Error::InvalidGeometry(format!(
                    "pieces {k} and {} do not meet (gap {gap:e})",
                    k + 1
                )));
            }
        }
        Ok(Self { pieces })
    }

    /// Closed polygon through `vertices` in the given order.
    pub fn polygon(vertices: &[Complex64]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidGeometry("polygon needs two or more vertices".into()));
        }
        let n = vertices.len();
        Self::new(
            (0..n)
                .map(|i| Piece::segment(vertices[i], vertices[(i + 1) % n]))
                .collect(),
        )
    }

    /// Full circle starting at angle `start_angle`, clockwise if `clockwise`.
    pub fn circle(center: Complex64, radius: f64, start_angle: f64, clockwise: bool) -> Self {
        Self {
            pieces: vec![Piece::Arc {
                center,
                radius,
                start_angle,
                sweep: if clockwise { -TAU } else { TAU },
            }],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }

    pub fn start(&self) -> Complex64 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.pieces[self.pieces.len() - 1].end()
    }

    pub fn is_closed(&self) -> bool {
        (self.end() - self.start()).norm() <= joint_tolerance(&self.pieces)
    }

    /// Point at arc length `s` from the start.
    pub fn point_at(&self, s: f64) -> Complex64 {
        let (i, t) = self.locate(s);
        self.pieces[i].point(t)
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let mut acc = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let l = p.length();
            if s <= acc + l || i + 1 == self.pieces.len() {
                let t = if l > 0.0 { ((s - acc) / l).clamp(0.0, 1.0) } else { 0.0 };
                return (i, t);
            }
            acc += l;
        }
        unreachable!("curve has at least one piece")
    }

    /// The portion between arc lengths `s0 < s1`.
    pub fn subcurve(&self, s0: f64, s1: f64) -> Self {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for p in &self.pieces {
            let l = p.length();
            let (a, b) = (acc, acc + l);
            acc = b;
            let lo = s0.max(a);
            let hi = s1.min(b);
            if hi <= lo || l == 0.0 {
                continue;
            }
            out.push(p.sub((lo - a) / l, (hi - a) / l));
        }
        if out.is_empty() {
            let z = self.point_at(s0);
            out.push(Piece::segment(z, z));
        }
        Self { pieces: out }
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(&self, other: &PlaneCurve) -> Result<Self> {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        Self::new(pieces)
    }

    /// Image under `w -> scale * w + shift`.
    pub fn transformed(&self, scale: f64, shift: Complex64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| p.transformed(scale, shift))
                .collect(),
        }
    }

    /// `(1/2) Im closed-integral conj(w) dw`, the signed (counterclockwise positive)
    /// enclosed area of a closed curve.
    pub fn signed_area(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Segment { start, end } => 0.5 * (start.re * end.im - end.re * start.im),
                Piece::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                } => {
                    // int (x dy - y dx)/2 along c + R e^{i phi}
                    let (a, b) = (start_angle, start_angle + sweep);
                    0.5 * (radius * radius * sweep
                        + radius * (center.re * (b.sin() - a.sin()) - center.im * (b.cos() - a.cos())))
                }
            })
            .sum()
    }
}

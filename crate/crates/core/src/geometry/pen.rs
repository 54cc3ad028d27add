use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::curve::PlaneCurve;
use crate::error::{Error, Result};

/// A pen: the open region enclosed by a circle or a simple polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawPen")]
pub enum Pen {
    Circle { center: Complex64, radius: f64 },
    /// Vertices of a simple polygon, stored clockwise.
    Polygon { vertices: Vec<Complex64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawPen {
    Circle { center: Complex64, radius: f64 },
    Polygon { vertices: Vec<Complex64> },
}

impl TryFrom<RawPen> for Pen {
    type Error = Error;

    fn try_from(raw: RawPen) -> Result<Self> {
        match raw {
            RawPen::Circle { center, radius } => Pen::circle(center, radius),
            RawPen::Polygon { vertices } => Pen::polygon(vertices),
        }
    }
}

fn polygon_area(vertices: &[Complex64]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Complex64, b: Complex64, p: Complex64| point_segment_distance(p, a, b) == 0.0;
    on(q1, q2, p1) || on(q1, q2, p2) || on(p1, p2, q1) || on(p1, p2, q2)
}

pub(crate) fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn segment_distance(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// Distance between a circle (the curve) and a segment.
fn circle_segment_distance(center: Complex64, radius: f64, a: Complex64, b: Complex64) -> f64 {
    let near = point_segment_distance(center, a, b);
    let far = (a - center).norm().max((b - center).norm());
    if near > radius {
        near - radius
    } else if far < radius {
        radius - far
    } else {
        0.0
    }
}

impl Pen {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "circle pen needs a positive radius, got {radius}"
            )));
        }
        Ok(Pen::Circle { center, radius })
    }

    /// Simple polygon pen; vertices may be given in either orientation.
    pub fn polygon(vertices: Vec<Complex64>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidGeometry("polygon pen needs three or more vertices".into()));
        }
        let area = polygon_area(&vertices);
        if !(area.abs() > 0.0) {
            return Err(Error::InvalidGeometry("polygon pen encloses no area".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
                let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                let hit = if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let shared = if j == i + 1 { a2 } else { a1 };
                    let (other_a, other_b) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                    point_segment_distance(other_b, a1, a2) == 0.0 && other_b != shared
                        || point_segment_distance(other_a, b1, b2) == 0.0 && other_a != shared
                } else {
                    segments_intersect(a1, a2, b1, b2)
                };
                if hit {
                    return Err(Error::InvalidGeometry(format!(
                        "polygon pen is not simple: edges {i} and {j} meet"
                    )));
                }
            }
        }
        let mut vertices = vertices;
        if area > 0.0 {
            vertices.reverse();
        }
        Ok(Pen::Polygon { vertices })
    }

    /// Fencing used, the boundary length.
    pub fn fencing(&self) -> f64 {
        match self {
            Pen::Circle { radius, .. } => TAU * radius,
            Pen::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).map(|i| (vertices[(i + 1) % n] - vertices[i]).norm()).sum()
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Pen::Circle { radius, .. } => 0.5 * TAU * radius * radius,
            Pen::Polygon { vertices } => polygon_area(vertices).abs(),
        }
    }

    /// Boundary traversed clockwise, the orientation in which the line
    /// integral `closed-integral P_y dx - P_x dy` equals the enclosed mass.
    pub fn boundary(&self) -> PlaneCurve {
        match self {
            Pen::Circle { center, radius } => PlaneCurve::circle(*center, *radius, 0.0, true),
            Pen::Polygon { vertices } => {
                PlaneCurve::polygon(vertices).expect("validated polygon has vertices")
            }
        }
    }

    /// Distance from `z` to the boundary curve.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            Pen::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            Pen::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| point_segment_distance(z, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Whether `z` lies in the closed region.
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Pen::Circle { center, radius } => (z - center).norm() <= *radius,
            Pen::Polygon { vertices } => {
                if self.boundary_distance(z) == 0.0 {
                    return true;
                }
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if (a.im > z.im) != (b.im > z.im) {
                        let x = a.re + (z.im - a.im) / (b.im - a.im) * (b.re - a.re);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Distance between the two boundary curves (0 when they touch or cross).
    pub fn boundary_gap(&self, other: &Pen) -> f64 {
        match (self, other) {
            (
                Pen::Circle {
                    center: c1,
                    radius: r1,
                },
                Pen::Circle {
                    center: c2,
                    radius: r2,
                },
            ) => {
                let d = (c1 - c2).norm();
                if d > r1 + r2 {
                    d - r1 - r2
                } else if d < (r1 - r2).abs() {
                    (r1 - r2).abs() - d
                } else {
                    0.0
                }
            }
            (Pen::Circle { center, radius }, Pen::Polygon { vertices })
            | (Pen::Polygon { vertices }, Pen::Circle { center, radius }) => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        circle_segment_distance(*center, *radius, vertices[i], vertices[(i + 1) % n])
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            (Pen::Polygon { vertices: a }, Pen::Polygon { vertices: b }) => {
                let (n, m) = (a.len(), b.len());
                let mut best = f64::INFINITY;
                for i in 0..n {
                    for j in 0..m {
                        best = best.min(segment_distance(a[i], a[(i + 1) % n], b[j], b[(j + 1) % m]));
                    }
                }
                best
            }
        }
    }

    /// Largest coordinate magnitude touched by the pen, for tolerances.
    pub(crate) fn extent(&self) -> f64 {
        match self {
            Pen::Circle { center, radius } => center.norm() + radius,
            Pen::Polygon { vertices } => vertices.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }
}

/// A finite family of pens whose fenced boundaries form one connected set
/// passing through the base point, with total fencing at most the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stockyard {
    pub base: Complex64,
    pub budget: f64,
    pub pens: Vec<Pen>,
}

/// Outcome of [`Stockyard::validate`], with measured slack for every invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockyardReport {
    pub nonempty: bool,
    /// Distance from the base point to the nearest pen boundary.
    pub base_distance: f64,
    pub base_on_boundary: bool,
    pub fencing_used: f64,
    pub budget: f64,
    pub within_budget: bool,
    /// Connected components of the union of pen boundaries.
    pub components: usize,
    pub connected: bool,
    pub tolerance: f64,
}

impl StockyardReport {
    pub fn passed(&self) -> bool {
        self.nonempty && self.base_on_boundary && self.within_budget && self.connected
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.nonempty {
            out.push("stockyard has no pens".to_string());
        }
        if !self.base_on_boundary {
            out.push(format!(
                "base point is {:e} away from every pen boundary",
                self.base_distance
            ));
        }
        if !self.within_budget {
            out.push(format!(
                "fencing {} exceeds budget {}",
                self.fencing_used, self.budget
            ));
        }
        if !self.connected {
            out.push(format!("pen boundaries form {} components", self.components));
        }
        out
    }
}

impl Stockyard {
    pub fn new(base: Complex64, budget: f64, pens: Vec<Pen>) -> Self {
        Self { base, budget, pens }
    }

    pub fn fencing(&self) -> f64 {
        self.pens.iter().map(Pen::fencing).sum()
    }

    /// Geometric tolerance for touching tests, `1e-9` scaled by the
    /// configuration size so that large stockyards are judged consistently.
    pub fn tolerance(&self) -> f64 {
        let scale = self
            .pens
            .iter()
            .map(Pen::extent)
            .fold(self.base.norm().max(self.budget), f64::max);
        1e-9 * scale.max(1.0)
    }

    pub fn validate(&self) -> StockyardReport {
        let tolerance = self.tolerance();
        let base_distance = self
            .pens
            .iter()
            .map(|p| p.boundary_distance(self.base))
            .fold(f64::INFINITY, f64::min);
        let fencing_used = self.fencing();
        let components = boundary_components(&self.pens, tolerance);
        StockyardReport {
            nonempty: !self.pens.is_empty(),
            base_distance,
            base_on_boundary: base_distance <= tolerance,
            fencing_used,
            budget: self.budget,
            within_budget: fencing_used <= self.budget * (1.0 + 1e-12) + tolerance * 1e-3,
            components,
            connected: components <= 1,
            tolerance,
        }
    }
}

fn boundary_components(pens: &[Pen], tolerance: f64) -> usize {
    let n = pens.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if pens[i] == pens[j] || pens[i].boundary_gap(&pens[j]) <= tolerance {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

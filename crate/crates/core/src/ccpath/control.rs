use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityField;
use crate::error::{Error, Result};

/// Piecewise constant control `(alpha, beta)` on a partition of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSignal {
    breakpoints: Vec<f64>,
    values: Vec<(f64, f64)>,
}

impl ControlSignal {
    /// `breakpoints` runs from 0 to 1 strictly increasing, one value per interval,
    /// each with `alpha^2 + beta^2 <= 1`.
    pub fn new(breakpoints: Vec<f64>, values: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::arg("control needs one value per interval"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::arg("control breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::arg("control breakpoints must increase"));
        }
        for &(a, b) in &values {
            if !(a * a + b * b <= 1.0 + 1e-12) {
                return Err(Error::arg(format!("control ({a}, {b}) exceeds unit speed")));
            }
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![(alpha, beta)])
    }

    /// Equal intervals.
    pub fn uniform(values: Vec<(f64, f64)>) -> Result<Self> {
        let n = values.len();
        let mut breaks: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
        if let Some(last) = breaks.last_mut() {
            *last = 1.0;
        }
        Self::new(breaks, values)
    }

    /// Unit-speed control tracing the closed polygon through `vertices` once,
    /// returned with the speed scale `delta` equal to its perimeter.
    pub fn from_polygon(vertices: &[Complex64]) -> Result<(Self, f64)> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::arg("polygon needs two or more vertices"));
        }
        let edges: Vec<Complex64> = (0..n).map(|i| vertices[(i + 1) % n] - vertices[i]).collect();
        let perimeter: f64 = edges.iter().map(|e| e.norm()).sum();
        if !(perimeter > 0.0) {
            return Err(Error::DegenerateLoop(perimeter));
        }
        let mut breaks = vec![0.0];
        let mut values = Vec::new();
        let mut run = 0.0;
        for e in edges.iter().filter(|e| e.norm() > 0.0) {
            run += e.norm();
            breaks.push(run / perimeter);
            values.push((e.re / e.norm(), -e.im / e.norm()));
        }
        *breaks.last_mut().unwrap() = 1.0;
        Ok((Self::new(breaks, values)?, perimeter))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[(f64, f64)] {
        &self.values
    }
}

/// State `(x, y, t)` at parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub delta: f64,
    pub samples: Vec<PathSample>,
}

impl Trajectory {
    pub fn end(&self) -> PathSample {
        *self.samples.last().expect("trajectory has samples")
    }
}

/// Horizontal lift of the control: `x' = delta alpha`, `y' = -delta beta`,
/// `t' = delta (alpha P_y + beta P_x)`, by classical RK4 with `steps` steps per
/// interval. The planar part is piecewise linear and taken exactly.
pub fn integrate_path(
    field: &DensityField,
    start: (f64, f64, f64),
    control: &ControlSignal,
    delta: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !field.has_potential() {
        return Err(Error::PotentialUnavailable {
            family: field.kind().name(),
        });
    }
    if steps < 16 {
        return Err(Error::arg("integrate_path needs 16 or more steps per interval"));
    }
    let (mut x, mut y, mut t) = start;
    let mut samples = vec![PathSample { s: 0.0, x, y, t }];
    for (k, &(alpha, beta)) in control.values.iter().enumerate() {
        let (s0, s1) = (control.breakpoints[k], control.breakpoints[k + 1]);
        let h = (s1 - s0) / steps as f64;
        let (vx, vy) = (delta * alpha, -delta * beta);
        let rate = |px: f64, py: f64| -> Result<f64> {
            let (gx, gy) = field.gradient(Complex64::new(px, py))?;
            Ok(delta * (alpha * gy + beta * gx))
        };
        let (x0, y0) = (x, y);
        for i in 0..steps {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let m = 0.5 * (a + b);
            // The right side does not depend on t, so the two midpoint stages coincide.
            let k1 = rate(x0 + vx * a, y0 + vy * a)?;
            let k2 = rate(x0 + vx * m, y0 + vy * m)?;
            let k4 = rate(x0 + vx * b, y0 + vy * b)?;
            t += h / 6.0 * (k1 + 4.0 * k2 + k4);
            x = x0 + vx * b;
            y = y0 + vy * b;
            samples.push(PathSample {
                s: if i + 1 == steps { s1 } else { s0 + b },
                x,
                y,
                t,
            });
        }
    }
    Ok(Trajectory { delta, samples })
}

/// Writes `s,x,y,t` rows.
pub fn write_trajectory_csv(out: &mut impl Write, trajectory: &Trajectory) -> io::Result<()> {
    writeln!(out, "s,x,y,t")?;
    for p in &trajectory.samples {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", p.s, p.x, p.y, p.t)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::PolynomialPotential;
    use approx::assert_relative_eq;

    #[test]
    fn zero_control_stays_put() {
        let p = DensityField::polynomial(PolynomialPotential::modulus_power(2));
        let tr = integrate_path(&p, (1.0, 2.0, 3.0), &ControlSignal::constant(0.0, 0.0).unwrap(), 5.0, 16).unwrap();
        assert!(tr.samples.iter().all(|s| (s.x, s.y, s.t) == (1.0, 2.0, 3.0)));
    }

    #[test]
    fn straight_control_moves_along_x() {
        let p = DensityField::radial_alpha(0.5).unwrap();
        let tr = integrate_path(&p, (0.3, -1.0, 0.0), &ControlSignal::constant(0.5, 0.0).unwrap(), 4.0, 16).unwrap();
        let end = tr.end();
        assert_relative_eq!(end.x, 2.3, max_relative = 1e-14);
        assert_eq!(end.y, -1.0);
    }

    #[test]
    fn square_loop_lifts_by_four_times_area() {
        let p2 = DensityField::polynomial(PolynomialPotential::modulus_power(1));
        let a = 1.5;
        // Clockwise square starting at (0.2, 0.7).
        let o = Complex64::new(0.2, 0.7);
        let verts = [o, o + Complex64::new(0.0, a), o + Complex64::new(a, a), o + Complex64::new(a, 0.0)];
        let (control, delta) = ControlSignal::from_polygon(&verts).unwrap();
        assert_relative_eq!(delta, 4.0 * a);
        let tr = integrate_path(&p2, (o.re, o.im, 0.0), &control, delta, 16).unwrap();
        let end = tr.end();
        assert!((end.x - o.re).abs() < 1e-12 && (end.y - o.im).abs() < 1e-12);
        assert_relative_eq!(end.t, 4.0 * a * a, max_relative = 1e-12);
    }

    #[test]
    fn t_shift_is_exact() {
        let p = DensityField::radial_alpha(0.3).unwrap();
        let control = ControlSignal::uniform(vec![(0.6, 0.8), (-1.0, 0.0), (0.0, -0.5)]).unwrap();
        let a = integrate_path(&p, (0.5, 0.5, 0.0), &control, 2.0, 20).unwrap();
        let b = integrate_path(&p, (0.5, 0.5, 0.0), &control, 2.0, 20).unwrap();
        assert_eq!(a, b);
        let shifted = integrate_path(&p, (0.5, 0.5, 7.0), &control, 2.0, 20).unwrap();
        for (u, v) in a.samples.iter().zip(&shifted.samples) {
            assert_eq!((u.x, u.y), (v.x, v.y));
            assert!((v.t - u.t - 7.0).abs() <= 1e-12 * v.t.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_fast_controls_and_few_steps() {
        assert!(ControlSignal::constant(0.8, 0.8).is_err());
        assert!(ControlSignal::new(vec![0.0, 0.6, 0.5, 1.0], vec![(0.0, 0.0); 3]).is_err());
        let p = DensityField::constant(1.0).unwrap();
        assert!(integrate_path(&p, (0.0, 0.0, 0.0), &ControlSignal::constant(1.0, 0.0).unwrap(), 1.0, 8).is_err());
    }

    #[test]
    fn csv_dump() {
        let p = DensityField::constant(4.0).unwrap();
        let tr = integrate_path(&p, (0.0, 0.0, 0.0), &ControlSignal::constant(1.0, 0.0).unwrap(), 1.0, 16).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 18);
        assert!(text.starts_with("s,x,y,t\n"));
    }
}

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// `1 / int_{|u|<1} exp(-1/(1-|u|^2)) du`, the mollifier normalization.
pub const MOLLIFIER_NORM: f64 = 2.143_565_775_792_248;

/// Unit-mass mollifier profile on the unit disk, as a function of `|u|`.
pub fn mollifier(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        MOLLIFIER_NORM * (-1.0 / (1.0 - t * t)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Complex64,
    pub mass: f64,
    pub radius: f64,
}

impl Bump {
    pub fn density(&self, z: Complex64) -> f64 {
        let s = (z - self.center).norm() / self.radius;
        if s >= 1.0 {
            0.0
        } else {
            self.mass * mollifier(s) / (self.radius * self.radius)
        }
    }

    /// Mass of this bump lying inside the disk `B(center, r)`.
    pub fn mass_in_disk(&self, center: Complex64, r: f64) -> f64 {
        let d = (self.center - center).norm();
        let rho = self.radius;
        if d + rho <= r {
            return self.mass;
        }
        if d - rho >= r {
            return 0.0;
        }
        // Integrate the radial profile in t = s / rho against the angular
        // fraction of the circle |w - center_bump| = s inside the disk.
        let lo = ((r - d).abs() / rho).min(1.0);
        let hi = ((r + d) / rho).min(1.0);
        let mut total = 0.0;
        if r > d && lo > 0.0 {
            total += smooth_ends(|t| TAU * t * mollifier(t), 0.0, lo);
        }
        if hi > lo && d > 0.0 {
            total += smooth_ends(
                |t| {
                    let s = t * rho;
                    let cos = ((d * d + s * s - r * r) / (2.0 * d * s)).clamp(-1.0, 1.0);
                    2.0 * cos.acos() * t * mollifier(t)
                },
                lo,
                hi,
            );
        }
        self.mass * total
    }
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// Gauss-Legendre after the substitution `t = a + (b-a)(1 - cos(pi u))/2`, which
/// absorbs square-root behaviour at either endpoint.
fn smooth_ends(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gl32();
    let half = 0.5 * (b - a);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| {
            let u = 0.5 * (xi + 1.0);
            let t = a + half * (1.0 - (PI * u).cos());
            0.5 * wi * f(t) * half * PI * (PI * u).sin()
        })
        .sum()
}

/// Sum of mollifier bumps, bucketed on a square grid for disk-mass queries.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpLattice {
    bumps: Vec<Bump>,
    origin: Complex64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
    cell_mass: Vec<f64>,
    cell_reach: Vec<f64>,
    max_radius: f64,
}

impl BumpLattice {
    pub fn new(bumps: Vec<Bump>) -> Result<Self> {
        if bumps.is_empty() {
            return Err(Error::InvalidDensity("bump lattice has no bumps".into()));
        }
        for b in &bumps {
            if !(b.mass > 0.0 && b.radius > 0.0 && b.mass.is_finite() && b.radius.is_finite()) {
                return Err(Error::InvalidDensity(format!(
                    "bump at {} needs positive mass and radius",
                    b.center
                )));
            }
        }
        let max_radius = bumps.iter().map(|b| b.radius).fold(0.0, f64::max);
        let cell = 4.0_f64.max(2.0 * max_radius);
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for b in &bumps {
            x0 = x0.min(b.center.re);
            y0 = y0.min(b.center.im);
            x1 = x1.max(b.center.re);
            y1 = y1.max(b.center.im);
        }
        let nx = ((x1 - x0) / cell).floor() as usize + 1;
        let ny = ((y1 - y0) / cell).floor() as usize + 1;
        let origin = Complex64::new(x0, y0);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut cell_mass = vec![0.0; nx * ny];
        let mut cell_reach = vec![0.0_f64; nx * ny];
        for (idx, b) in bumps.iter().enumerate() {
            let i = (((b.center.re - x0) / cell) as usize).min(nx - 1);
            let j = (((b.center.im - y0) / cell) as usize).min(ny - 1);
            let k = j * nx + i;
            buckets[k].push(idx as u32);
            cell_mass[k] += b.mass;
            cell_reach[k] = cell_reach[k].max(b.radius);
        }
        Ok(Self {
            bumps,
            origin,
            cell,
            nx,
            ny,
            buckets,
            cell_mass,
            cell_reach,
            max_radius,
        })
    }

    /// Bumps at the Gaussian integers `k` with `|Re k|, |Im k| <= extent`, mass
    /// `1/(1+|k|)` and radius `min(1/4, mass)`.
    pub fn decaying_gaussian(extent: i32) -> Self {
        let mut bumps = Vec::new();
        for a in -extent..=extent {
            for b in -extent..=extent {
                let k = Complex64::new(a as f64, b as f64);
                let mass = 1.0 / (1.0 + k.norm());
                bumps.push(Bump {
                    center: k,
                    mass,
                    radius: mass.min(0.25),
                });
            }
        }
        Self::new(bumps).expect("lattice bumps are valid")
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_mass.iter().sum()
    }

    fn cell_box(&self, i: usize, j: usize) -> (f64, f64, f64, f64) {
        let x = self.origin.re + i as f64 * self.cell;
        let y = self.origin.im + j as f64 * self.cell;
        (x, x + self.cell, y, y + self.cell)
    }

    fn cell_range(&self, lo: f64, hi: f64, start: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - start) / self.cell).floor();
        let b = ((hi - start) / self.cell).floor();
        if b < 0.0 || a > (n - 1) as f64 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    }

    pub fn density(&self, z: Complex64) -> f64 {
        let reach = self.max_radius;
        let (Some((i0, i1)), Some((j0, j1))) = (
            self.cell_range(z.re - reach, z.re + reach, self.origin.re, self.nx),
            self.cell_range(z.im - reach, z.im + reach, self.origin.im, self.ny),
        ) else {
            return 0.0;
        };
        let mut total = 0.0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &b in &self.buckets[j * self.nx + i] {
                    total += self.bumps[b as usize].density(z);
                }
            }
        }
        total
    }

    /// Exact (to the 1D rule) mass of all bumps inside `B(center, r)`.
    pub fn disk_mass(&self, center: Complex64, r: f64) -> f64 {
        let reach = self.max_radius;
        let (Some((i0, i1)), Some((j0, j1))) = (
            self.cell_range(center.re - r - reach, center.re + r + reach, self.origin.re, self.nx),
            self.cell_range(center.im - r - reach, center.im + r + reach, self.origin.im, self.ny),
        ) else {
            return 0.0;
        };
        let mut total = 0.0;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let k = j * self.nx + i;
                if self.buckets[k].is_empty() {
                    continue;
                }
                let (x0, x1, y0, y1) = self.cell_box(i, j);
                let reach = self.cell_reach[k];
                let dx_far = (center.re - x0).abs().max((center.re - x1).abs());
                let dy_far = (center.im - y0).abs().max((center.im - y1).abs());
                if dx_far.hypot(dy_far) + reach <= r {
                    total += self.cell_mass[k];
                    continue;
                }
                let dx_near = (x0 - center.re).max(center.re - x1).max(0.0);
                let dy_near = (y0 - center.im).max(center.im - y1).max(0.0);
                if dx_near.hypot(dy_near) - reach >= r {
                    continue;
                }
                for &b in &self.buckets[k] {
                    total += self.bumps[b as usize].mass_in_disk(center, r);
                }
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};
    use approx::assert_relative_eq;

    #[test]
    fn mollifier_has_unit_mass() {
        let opts = QuadOptions::default().with_rel_tol(1e-13);
        let m = integrate(|t| TAU * t * mollifier(t), 0.0, 1.0, &opts, "mollifier").unwrap();
        assert_relative_eq!(m.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn enclosed_bump_contributes_full_mass() {
        let lattice = BumpLattice::new(vec![Bump {
            center: Complex64::new(0.0, 0.0),
            mass: 3.0,
            radius: 0.1,
        }])
        .unwrap();
        assert_eq!(lattice.disk_mass(Complex64::new(0.0, 0.0), 1.0), 3.0);
        assert_eq!(lattice.disk_mass(Complex64::new(5.0, 0.0), 1.0), 0.0);
    }

    #[test]
    fn centered_disk_fraction_matches_radial_integral() {
        let bump = Bump {
            center: Complex64::new(0.0, 0.0),
            mass: 2.0,
            radius: 0.5,
        };
        let opts = QuadOptions::default().with_rel_tol(1e-13);
        let exact = integrate(|t| TAU * t * mollifier(t), 0.0, 0.6, &opts, "frac").unwrap();
        let got = bump.mass_in_disk(Complex64::new(0.0, 0.0), 0.3);
        assert_relative_eq!(got, 2.0 * exact.value, max_relative = 1e-8);
    }

    #[test]
    fn half_plane_split_by_symmetry() {
        // A huge disk whose boundary passes through the bump center takes half
        // of the mass up to curvature of order radius / r.
        let bump = Bump {
            center: Complex64::new(0.0, 0.0),
            mass: 1.0,
            radius: 0.25,
        };
        let got = bump.mass_in_disk(Complex64::new(1e6, 0.0), 1e6);
        assert_relative_eq!(got, 0.5, max_relative = 1e-6);
    }

    #[test]
    fn complementary_disks_cover_the_bump() {
        // B(c, r) and the far side: mass inside plus mass at distance >= r sums to m,
        // checked against a small-disk partition around the bump.
        let bump = Bump {
            center: Complex64::new(0.3, -0.2),
            mass: 1.5,
            radius: 0.4,
        };
        let c = Complex64::new(0.0, 0.0);
        let inner = bump.mass_in_disk(c, 0.35);
        let outer = bump.mass_in_disk(c, 5.0);
        assert_relative_eq!(outer, 1.5);
        assert!(inner > 0.0 && inner < 1.5);
        let bigger = bump.mass_in_disk(c, 0.5);
        assert!(bigger > inner);
    }

    #[test]
    fn bucketed_mass_matches_per_bump_sum() {
        let lattice = BumpLattice::decaying_gaussian(12);
        for (c, r) in [
            (Complex64::new(0.1, 0.2), 3.7),
            (Complex64::new(-5.5, 4.25), 7.0),
            (Complex64::new(11.0, -11.0), 2.2),
            (Complex64::new(0.0, 0.0), 40.0),
        ] {
            let direct: f64 = lattice.bumps().iter().map(|b| b.mass_in_disk(c, r)).sum();
            assert_relative_eq!(lattice.disk_mass(c, r), direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn density_sums_overlapping_neighbours() {
        let lattice = BumpLattice::decaying_gaussian(3);
        let z = Complex64::new(0.05, 0.0);
        let direct: f64 = lattice.bumps().iter().map(|b| b.density(z)).sum();
        assert_relative_eq!(lattice.density(z), direct, max_relative = 1e-14);
        assert_eq!(lattice.density(Complex64::new(0.5, 0.5)), 0.0);
    }
}

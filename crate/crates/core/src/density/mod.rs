//! Laplacian densities `Delta P` and, where available, the potential `P`.
//!
//! Convention: `Delta P = P_xx + P_yy = 4 d^2 P / dz dzbar`.

mod bump;
mod grid;
mod polynomial;
mod radial;
mod spec;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bump::{mollifier, Bump, BumpLattice, MOLLIFIER_NORM};
pub use grid::{Extension, GridDensity};
pub use polynomial::{polynomial_lambda, Monomial, PolynomialPotential};
pub use radial::{potential_from_radial, Profile, RadialPotential};
pub use spec::{load_density_spec, parse_density_spec};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_rect, QuadOptions, Rect};

/// Relative tolerance requested from disk-mass quadratures.
pub const DISK_MASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Zero,
    Constant,
    Polynomial,
    RadialAlpha,
    RadialProfile,
    BumpLattice,
    Grid,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Zero => "zero",
            FamilyKind::Constant => "constant",
            FamilyKind::Polynomial => "polynomial",
            FamilyKind::RadialAlpha => "radial_alpha",
            FamilyKind::RadialProfile => "radial_profile",
            FamilyKind::BumpLattice => "bump_lattice",
            FamilyKind::Grid => "grid",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
enum Family {
    Zero,
    Constant(f64),
    Polynomial(Arc<PolynomialPotential>),
    RadialAlpha {
        alpha: f64,
        potential: Arc<RadialPotential>,
    },
    RadialProfile(Arc<RadialPotential>),
    BumpLattice(Arc<BumpLattice>),
    Grid(Arc<GridDensity>),
}

/// An immutable Laplacian density, cheap to clone and share between threads.
#[derive(Debug, Clone)]
pub struct DensityField {
    family: Family,
    weight: f64,
}

impl DensityField {
    fn from_family(family: Family) -> Self {
        Self {
            family,
            weight: 1.0,
        }
    }

    /// `Delta P = 0`; a test double, the only field allowed to vanish.
    pub fn zero() -> Self {
        Self::from_family(Family::Zero)
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "constant density must be positive, got {c}"
            )));
        }
        Ok(Self::from_family(Family::Constant(c)))
    }

    pub fn polynomial(p: PolynomialPotential) -> Self {
        Self::from_family(Family::Polynomial(Arc::new(p)))
    }

    /// `Delta P = (1 + |z|^2)^(-alpha/2)` for `0 < alpha < 2/3`.
    pub fn radial_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0 / 3.0) {
            return Err(Error::InvalidDensity(format!(
                "alpha must lie in (0, 2/3), got {alpha}"
            )));
        }
        let potential = potential_from_radial(Arc::new(move |r: f64| {
            (1.0 + r * r).powf(-0.5 * alpha)
        }))?;
        Ok(Self::from_family(Family::RadialAlpha {
            alpha,
            potential: Arc::new(potential),
        }))
    }

    /// Radial density `Delta P(z) = profile(|z|)`, potential reconstructed.
    pub fn radial_profile(profile: Profile) -> Result<Self> {
        if (0..=64).all(|i| profile(0.25 * i as f64) == 0.0) {
            return Err(Error::InvalidDensity("radial profile vanishes on samples".into()));
        }
        let potential = potential_from_radial(profile)?;
        Ok(Self::from_family(Family::RadialProfile(Arc::new(potential))))
    }

    pub fn bump_lattice(lattice: BumpLattice) -> Self {
        Self::from_family(Family::BumpLattice(Arc::new(lattice)))
    }

    pub fn grid(grid: GridDensity) -> Self {
        Self::from_family(Family::Grid(Arc::new(grid)))
    }

    /// The same field with `Delta P` (and `P`) multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::arg(format!("scale factor must be positive, got {factor}")));
        }
        Ok(Self {
            family: self.family.clone(),
            weight: self.weight * factor,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn kind(&self) -> FamilyKind {
        match &self.family {
            Family::Zero => FamilyKind::Zero,
            Family::Constant(_) => FamilyKind::Constant,
            Family::Polynomial(_) => FamilyKind::Polynomial,
            Family::RadialAlpha { .. } => FamilyKind::RadialAlpha,
            Family::RadialProfile(_) => FamilyKind::RadialProfile,
            Family::BumpLattice(_) => FamilyKind::BumpLattice,
            Family::Grid(_) => FamilyKind::Grid,
        }
    }

    pub fn has_potential(&self) -> bool {
        !matches!(self.family, Family::BumpLattice(_) | Family::Grid(_))
    }

    /// Radially symmetric about the origin.
    pub fn is_radial(&self) -> bool {
        match &self.family {
            Family::Zero | Family::Constant(_) => true,
            Family::RadialAlpha { .. } | Family::RadialProfile(_) => true,
            Family::Polynomial(p) => p.terms().iter().all(|t| t.j == t.k),
            _ => false,
        }
    }

    /// Invariant under every translation.
    pub fn is_translation_invariant(&self) -> bool {
        matches!(self.family, Family::Zero | Family::Constant(_))
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::RadialAlpha { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn as_polynomial(&self) -> Option<&PolynomialPotential> {
        match &self.family {
            Family::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_bump_lattice(&self) -> Option<&BumpLattice> {
        match &self.family {
            Family::BumpLattice(b) => Some(b),
            _ => None,
        }
    }

    fn unavailable(&self) -> Error {
        Error::PotentialUnavailable {
            family: self.kind().name(),
        }
    }

    /// `Delta P(z)`.
    pub fn density(&self, z: Complex64) -> f64 {
        let base = match &self.family {
            Family::Zero => 0.0,
            Family::Constant(c) => *c,
            Family::Polynomial(p) => p.laplacian(z).max(0.0),
            Family::RadialAlpha { potential, .. } | Family::RadialProfile(potential) => {
                potential.profile(z.norm())
            }
            Family::BumpLattice(b) => b.density(z),
            Family::Grid(g) => g.density(z),
        };
        self.weight * base
    }

    /// `P(z)`, normalized so that radial potentials vanish at the origin.
    pub fn potential(&self, z: Complex64) -> Result<f64> {
        let base = match &self.family {
            Family::Zero => 0.0,
            Family::Constant(c) => 0.25 * c * z.norm_sqr(),
            Family::Polynomial(p) => p.value(z),
            Family::RadialAlpha { potential, .. } | Family::RadialProfile(potential) => {
                potential.value(z.norm())
            }
            _ => return Err(self.unavailable()),
        };
        Ok(self.weight * base)
    }

    /// `(P_x, P_y)`.
    pub fn gradient(&self, z: Complex64) -> Result<(f64, f64)> {
        let (gx, gy) = match &self.family {
            Family::Zero => (0.0, 0.0),
            Family::Constant(c) => (0.5 * c * z.re, 0.5 * c * z.im),
            Family::Polynomial(p) => p.gradient(z),
            Family::RadialAlpha { potential, .. } | Family::RadialProfile(potential) => {
                potential.gradient(z.re, z.im)
            }
            _ => return Err(self.unavailable()),
        };
        Ok((self.weight * gx, self.weight * gy))
    }

    /// `P_z = (P_x - i P_y) / 2`.
    pub fn dz(&self, z: Complex64) -> Result<Complex64> {
        let (gx, gy) = self.gradient(z)?;
        Ok(Complex64::new(0.5 * gx, -0.5 * gy))
    }

    /// `mu(center, r) = int_{B(center, r)} Delta P`.
    ///
    /// Closed forms for constant and polynomial densities, a one-dimensional
    /// reduction for radial ones, per-bump integrals for bump lattices and
    /// adaptive polar quadrature otherwise.
    pub fn disk_mass(&self, center: Complex64, r: f64) -> Result<f64> {
        check_radius(r)?;
        let base = match &self.family {
            Family::Zero => 0.0,
            Family::Constant(c) => c * PI * r * r,
            Family::Polynomial(p) => polynomial_disk_mass(p, center, r),
            Family::RadialAlpha { potential, .. } | Family::RadialProfile(potential) => {
                radial_disk_mass(potential, center, r)?
            }
            Family::BumpLattice(b) => b.disk_mass(center, r),
            Family::Grid(_) => return self.disk_mass_polar(center, r),
        };
        Ok(self.weight * base)
    }

    /// `mu(center, r)` by adaptive polar quadrature regardless of family.
    pub fn disk_mass_polar(&self, center: Complex64, r: f64) -> Result<f64> {
        self.sector_mass(center, 0.0, r, 0.0, TAU)
    }

    /// Mass of the polar sector `{center + s e^{i theta}: s in [r0, r1], theta in [theta0, theta1]}`.
    pub fn sector_mass(
        &self,
        center: Complex64,
        r0: f64,
        r1: f64,
        theta0: f64,
        theta1: f64,
    ) -> Result<f64> {
        check_radius(r1)?;
        if let Family::Zero = self.family {
            return Ok(0.0);
        }
        let opts = QuadOptions::default().with_rel_tol(DISK_MASS_TOL);
        let rect = Rect {
            x0: r0,
            x1: r1,
            y0: theta0,
            y1: theta1,
        };
        let est = integrate_rect(
            |s, theta| s * self.density(center + Complex64::from_polar(s, theta)),
            rect,
            &opts,
            "disk mass",
        )?;
        Ok(est.value.max(0.0))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("disk radius must be positive, got {r}")))
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact disk integral of the Laplacian polynomial: expanding about the center,
/// only the `|u|^(2i)` terms survive the angular integration.
fn polynomial_disk_mass(p: &PolynomialPotential, center: Complex64, r: f64) -> f64 {
    let cb = center.conj();
    let mut total = Complex64::new(0.0, 0.0);
    for t in p.laplacian_terms() {
        for i in 0..=t.j.min(t.k) {
            let moment = PI * r.powi(2 * i as i32 + 2) / (i + 1) as f64;
            total += t.coeff
                * binomial(t.j, i)
                * binomial(t.k, i)
                * center.powu(t.j - i)
                * cb.powu(t.k - i)
                * moment;
        }
    }
    total.re.max(0.0)
}

/// Radial density on an off-center disk: integrate over circles `|w| = s`
/// weighted by the angle each one spends inside the disk.
fn radial_disk_mass(potential: &RadialPotential, center: Complex64, r: f64) -> Result<f64> {
    let d = center.norm();
    if d == 0.0 {
        return Ok(TAU * potential.moment(r));
    }
    let inner = if r > d { TAU * potential.moment(r - d) } else { 0.0 };
    // Offsets x = s - d run over [x_lo, r]; the half angle comes from the
    // factored form sin^2(theta/2) = (r - x)(r + x) / (4 s d).
    let x_lo = if r > d { r - 2.0 * d } else { -r };
    let half = 0.5 * (r - x_lo);
    let arc = |x: f64| {
        let s = d + x;
        if s <= 0.0 {
            return 0.0;
        }
        let sin2 = ((r - x) * (r + x) / (4.0 * s * d)).clamp(0.0, 1.0);
        4.0 * sin2.sqrt().asin() * s * potential.profile(s)
    };
    // x = x_lo + half (1 - cos(pi u)) removes the square-root edges.
    let opts = QuadOptions {
        abs_tol: (1e-12 * inner).max(1e-300),
        ..QuadOptions::default().with_rel_tol(1e-10)
    };
    let ring = integrate(
        |u| {
            let x = x_lo + half * (1.0 - (PI * u).cos());
            arc(x) * half * PI * (PI * u).sin()
        },
        0.0,
        1.0,
        &opts,
        "radial disk mass",
    )?;
    Ok(inner + ring.value)
}

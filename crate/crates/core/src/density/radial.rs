use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{fixed_gl16, integrate, QuadOptions};

/// Radial Laplacian profile `f(r)`.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const FIRST_NODE: f64 = 1e-3;
const NODE_RATIO: f64 = 1.15;
const LAST_NODE: f64 = 1e9;
const TABLE_TOL: f64 = 1e-12;
const REQUIRED_TOL: f64 = 1e-9;

/// Radial potential reconstructed from its Laplacian profile.
///
/// For `Delta P = f(|z|)` the radial ODE `P'' + P'/r = f` gives
/// `P'(r) = M(r) / r` with `M(r) = int_0^r s f(s) ds`. `M` and `P` are tabulated
/// on a geometric node ladder and completed between nodes by a 16-point
/// Gauss-Legendre rule, so each query costs a binary search plus one short rule.
#[derive(Clone)]
pub struct RadialPotential {
    profile: Profile,
    nodes: Vec<f64>,
    moment: Vec<f64>,
    potential: Vec<f64>,
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("nodes", &self.nodes.len())
            .field("moment_at_last", &self.moment.last())
            .finish()
    }
}

/// Builds the radial potential of `profile`.
pub fn potential_from_radial(profile: Profile) -> Result<RadialPotential> {
    let mut nodes = vec![0.0];
    let mut r = FIRST_NODE;
    while r < LAST_NODE {
        nodes.push(r);
        r *= NODE_RATIO;
    }
    nodes.push(LAST_NODE);

    let opts = QuadOptions::default().with_rel_tol(TABLE_TOL);
    let mut moment = vec![0.0_f64; nodes.len()];
    let mut potential = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        let (a, b) = (nodes[i - 1], nodes[i]);
        let piece = integrate(|s| s * profile(s), a, b, &opts, "radial moment")
            .or_else(|_| {
                integrate(
                    |s| s * profile(s),
                    a,
                    b,
                    &opts.with_rel_tol(REQUIRED_TOL),
                    "radial moment",
                )
            })?;
        if !piece.value.is_finite() || piece.value < -1e-12 * moment[i - 1].abs().max(1e-300) {
            return Err(Error::InvalidDensity(format!(
                "radial profile has negative or non-finite mass on [{a}, {b}]"
            )));
        }
        moment[i] = moment[i - 1] + piece.value;
    }
    let mut table = RadialPotential {
        profile,
        nodes,
        moment,
        potential: Vec::new(),
    };
    for i in 1..table.nodes.len() {
        let (a, b) = (table.nodes[i - 1], table.nodes[i]);
        let piece = integrate(
            |s| table.derivative(s),
            a,
            b,
            &opts.with_rel_tol(REQUIRED_TOL),
            "radial potential",
        )?;
        potential[i] = potential[i - 1] + piece.value;
    }
    table.potential = potential;
    Ok(table)
}

impl RadialPotential {
    pub fn profile(&self, r: f64) -> f64 {
        (self.profile)(r)
    }

    fn bracket(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// `M(r) = int_0^r s f(s) ds`; the disk mass about the origin is `2 pi M(r)`.
    pub fn moment(&self, r: f64) -> f64 {
        let r = r.abs();
        if r == 0.0 {
            return 0.0;
        }
        let i = self.bracket(r.min(LAST_NODE));
        let base = self.moment[i];
        let a = self.nodes[i];
        if r > LAST_NODE {
            let opts = QuadOptions::default().with_rel_tol(REQUIRED_TOL);
            return base
                + integrate(|s| s * self.profile(s), a, r, &opts, "radial moment tail")
                    .map(|e| e.value)
                    .unwrap_or(f64::NAN);
        }
        base + fixed_gl16(|s| s * self.profile(s), a, r)
    }

    /// `P'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        self.moment(r) / r
    }

    /// `P(r)` normalized by `P(0) = 0`.
    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        if r == 0.0 {
            return 0.0;
        }
        let i = self.bracket(r.min(LAST_NODE));
        self.potential[i] + fixed_gl16(|s| self.derivative(s), self.nodes[i], r)
    }

    /// `(P_x, P_y)` at `(x, y)`.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let r = x.hypot(y);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let radial = self.moment(r) / (r * r);
        (radial * x, radial * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn alpha_profile(alpha: f64) -> Profile {
        Arc::new(move |r: f64| (1.0 + r * r).powf(-alpha / 2.0))
    }

    #[test]
    fn constant_profile_gives_r_squared() {
        let p = potential_from_radial(Arc::new(|_| 4.0)).unwrap();
        for r in [1e-4, 0.3, 1.0, 7.5, 1e3, 2e6] {
            assert_relative_eq!(p.derivative(r), 2.0 * r, max_relative = 1e-11);
            assert_relative_eq!(p.value(r), r * r, max_relative = 1e-9);
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let p = potential_from_radial(Arc::new(|_| 0.0)).unwrap();
        assert_eq!(p.derivative(3.0), 0.0);
        assert_eq!(p.value(3.0), 0.0);
        assert_eq!(p.gradient(1.0, 2.0), (0.0, 0.0));
    }

    #[test]
    fn alpha_half_matches_closed_form() {
        let p = potential_from_radial(alpha_profile(0.5)).unwrap();
        for r in [0.01_f64, 0.5, 1.0, 2.0, 10.0, 123.4, 1e4, 1e6] {
            let exact = ((1.0 + r * r).powf(0.75) - 1.0) / (1.5 * r);
            assert_relative_eq!(p.derivative(r), exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn gradient_is_radial() {
        let p = potential_from_radial(alpha_profile(0.5)).unwrap();
        let (gx, gy) = p.gradient(3.0, 4.0);
        let d = p.derivative(5.0);
        assert_relative_eq!(gx, 0.6 * d, max_relative = 1e-14);
        assert_relative_eq!(gy, 0.8 * d, max_relative = 1e-14);
        assert_eq!(p.gradient(0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn rejects_negative_profiles() {
        assert!(potential_from_radial(Arc::new(|r| 1.0 - r)).is_err());
    }
}

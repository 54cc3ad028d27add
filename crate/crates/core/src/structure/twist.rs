use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stockyard::lambda_stockyard;
use super::sup::{lambda_sup, SupOptions};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Twist of the ball about `z` at `w`: `T(z, w) = -2 Im int_0^1 (w - z) P_z(z + s (w - z)) ds`.
///
/// The comparable box for the ball about `(z, t)` is centered on `t + T(z, w)`
/// over the point `w`.
pub fn twist(field: &DensityField, z: Complex64, w: Complex64) -> Result<f64> {
    if !field.has_potential() {
        return Err(Error::PotentialUnavailable {
            family: field.kind().name(),
        });
    }
    let step = w - z;
    if step.norm() == 0.0 {
        return Ok(0.0);
    }
    let integrand = |s: f64| match field.dz(z + step * s) {
        Ok(pz) => (step * pz).im,
        Err(_) => f64::NAN,
    };
    let scale = [0.0, 0.5, 1.0]
        .iter()
        .map(|&s| field.dz(z + step * s).map(|pz| (step * pz).norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let opts = QuadOptions {
        abs_tol: (1e-9 * scale).max(1e-300),
        ..QuadOptions::default().with_rel_tol(1e-9)
    };
    Ok(-2.0 * integrate(integrand, 0.0, 1.0, &opts, "twist")?.value)
}

/// Inner and outer box volumes sandwiching the ball `B((z, t), delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Boxes `{|w - z| < delta/4} x {|s - t - T| < Lambda(z, delta/4)}` inside the
/// ball and `{|w - z| < 3 delta} x {|s - t - T| < Lambda(z, 3 delta)}` around it.
/// The inner height uses the certified stockyard bound at budget `delta/4`
/// (construction parameter `delta / (16 pi)`), the outer one the sup proxy.
pub fn volume_estimate(
    field: &DensityField,
    z: Complex64,
    delta: f64,
    opts: &SupOptions,
) -> Result<VolumeBounds> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    let inner = lambda_stockyard(field, z, delta / (16.0 * PI), opts)?.value;
    let outer = lambda_sup(field, z, 3.0 * delta, opts)?.value;
    Ok(VolumeBounds {
        lower: PI * (delta / 4.0).powi(2) * 2.0 * inner,
        upper: PI * (3.0 * delta).powi(2) * 2.0 * outer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::PolynomialPotential;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn twist_examples() {
        let p2 = DensityField::polynomial(PolynomialPotential::modulus_power(1));
        assert_eq!(twist(&p2, c(1.0, 2.0), c(1.0, 2.0)).unwrap(), 0.0);
        assert_relative_eq!(twist(&p2, c(1.0, 0.0), c(0.0, 1.0)).unwrap(), -2.0, max_relative = 1e-12);
        assert!(twist(&p2, c(0.0, 0.0), c(3.0, -4.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn twist_closed_form_for_modulus_squared() {
        // P_z = conj(z), and the s-dependent part s |w - z|^2 of the integrand is real.
        let p2 = DensityField::polynomial(PolynomialPotential::modulus_power(1));
        for (z, w) in [(c(0.5, -1.0), c(2.0, 3.0)), (c(-3.0, 0.25), c(1.0, 1.0))] {
            let closed = -2.0 * ((w - z) * z.conj()).im;
            assert_relative_eq!(twist(&p2, z, w).unwrap(), closed, max_relative = 1e-12);
        }
    }

    #[test]
    fn volume_sandwich_for_constant_field() {
        let k = DensityField::constant(4.0).unwrap();
        let opts = SupOptions::default();
        let v1 = volume_estimate(&k, c(0.0, 0.0), 1.0, &opts).unwrap();
        assert!(v1.lower > 0.0 && v1.lower <= v1.upper);
        let sup3 = lambda_sup(&k, c(0.0, 0.0), 3.0, &opts).unwrap().value;
        assert_relative_eq!(v1.upper, 18.0 * PI * sup3, max_relative = 1e-12);
        let v2 = volume_estimate(&k, c(0.0, 0.0), 2.0, &opts).unwrap();
        assert!(v2.upper >= v1.upper);
    }

    #[test]
    fn zero_field_volume_is_zero() {
        let v = volume_estimate(&DensityField::zero(), c(0.0, 0.0), 1.0, &SupOptions::default()).unwrap();
        assert_eq!((v.lower, v.upper), (0.0, 0.0));
    }
}

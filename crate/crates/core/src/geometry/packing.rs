use num_complex::Complex64;

use crate::error::{Error, Result};

/// `b^2 / (16 a^2)`, the guaranteed number of disjoint radius-`a` disks in `B(0, b)`.
pub fn packing_lower_bound(outer: f64, inner: f64) -> f64 {
    outer * outer / (16.0 * inner * inner)
}

/// Centers of disjoint radius-`inner` disks inside `B(0, outer)`.
///
/// The disk contains the centered square of side `n * 2 inner` with
/// `n = floor(sqrt(2) outer / (2 inner))`; its `n x n` cells each hold one disk.
/// When `n = 0` the single concentric disk is returned.
pub fn pack_disks(outer: f64, inner: f64) -> Result<Vec<Complex64>> {
    if !(inner > 0.0 && inner <= outer && outer.is_finite()) {
        return Err(Error::arg(format!(
            "packing needs 0 < a <= b, got a = {inner}, b = {outer}"
        )));
    }
    let n = (std::f64::consts::SQRT_2 * outer / (2.0 * inner)).floor() as usize;
    if n == 0 {
        return Ok(vec![Complex64::new(0.0, 0.0)]);
    }
    let first = -(n as f64 - 1.0) * inner;
    let mut centers = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            centers.push(Complex64::new(
                first + 2.0 * inner * i as f64,
                first + 2.0 * inner * j as f64,
            ));
        }
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_counts() {
        assert_eq!(pack_disks(1.0, 1.0).unwrap(), vec![Complex64::new(0.0, 0.0)]);
        assert_eq!(packing_lower_bound(1.0, 1.0), 1.0 / 16.0);
        assert_eq!(pack_disks(10.0, 1.0).unwrap().len(), 49);
        assert_eq!(packing_lower_bound(10.0, 1.0), 6.25);
        assert_eq!(pack_disks(4.0, 1.0).unwrap().len(), 4);
        assert_eq!(packing_lower_bound(4.0, 1.0), 1.0);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(pack_disks(1.0, 2.0).is_err());
        assert!(pack_disks(1.0, 0.0).is_err());
    }
}

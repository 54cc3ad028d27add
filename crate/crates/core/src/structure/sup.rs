use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Bound, LambdaEstimate, Method, Witness};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::stats::geometric_ladder;

/// Search budget of the sup-formula optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupOptions {
    /// Log-spaced radii between `min_radius` and the outer radius.
    pub rungs: usize,
    /// Lattice points per side over the square around the search disk.
    pub lattice: usize,
    /// Best coarse points polished by the simplex search.
    pub polish_starts: usize,
    pub polish_evaluations: usize,
    /// Lower cutoff for the inner radius, since `mu(z, r) / r -> 0` as `r -> 0`.
    pub min_radius: f64,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            rungs: 16,
            lattice: 33,
            polish_starts: 5,
            polish_evaluations: 120,
            min_radius: 1e-3,
        }
    }
}

impl SupOptions {
    fn validate(&self) -> Result<()> {
        if self.rungs == 0 || self.lattice == 0 || !(self.min_radius > 0.0) {
            return Err(Error::arg("sup options need rungs, lattice and min_radius > 0"));
        }
        Ok(())
    }
}

/// Maximizer of `mu(center, radius) / radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMax {
    pub value: f64,
    pub center: Complex64,
    pub radius: f64,
}

/// `sup { mu(w, r) / r : |w - z| <= search_radius, min_radius <= r <= max_radius }`.
///
/// A coarse stage scans a log ladder of radii against a square lattice masked
/// to the search disk; the best few lattice points are then polished by a
/// Nelder-Mead search in `(Re w, Im w, ln r)` with projection back onto the
/// feasible set. Fully deterministic; ties go to the earliest lattice point.
pub fn sup_mass_ratio(
    field: &DensityField,
    z: Complex64,
    search_radius: f64,
    max_radius: f64,
    opts: &SupOptions,
) -> Result<RatioMax> {
    sup_weighted_ratio(field, z, search_radius, max_radius, |r| r, opts)
}

/// Same search for `mu(w, r) / weight(r)` with a positive `weight`.
pub fn sup_weighted_ratio(
    field: &DensityField,
    z: Complex64,
    search_radius: f64,
    max_radius: f64,
    weight: impl Fn(f64) -> f64,
    opts: &SupOptions,
) -> Result<RatioMax> {
    opts.validate()?;
    if !(search_radius >= 0.0 && max_radius > 0.0) {
        return Err(Error::arg("search radius must be >= 0 and max radius > 0"));
    }
    let lo = opts.min_radius.min(max_radius);
    let radii = if lo < max_radius {
        geometric_ladder(lo, max_radius, opts.rungs)
    } else {
        vec![max_radius]
    };
    let mut centers = Vec::new();
    let n = opts.lattice;
    if n == 1 || search_radius == 0.0 {
        centers.push(z);
    } else {
        let step = 2.0 * search_radius / (n - 1) as f64;
        for j in 0..n {
            for i in 0..n {
                let w = z + Complex64::new(
                    -search_radius + step * i as f64,
                    -search_radius + step * j as f64,
                );
                if (w - z).norm() <= search_radius * (1.0 + 1e-12) {
                    centers.push(w);
                }
            }
        }
    }

    let mut coarse = Vec::with_capacity(centers.len() * radii.len());
    for &w in &centers {
        for &r in &radii {
            let value = field.disk_mass(w, r)? / weight(r);
            coarse.push(RatioMax {
                value,
                center: w,
                radius: r,
            });
        }
    }
    let mut order: Vec<usize> = (0..coarse.len()).collect();
    order.sort_by(|&a, &b| coarse[b].value.total_cmp(&coarse[a].value).then(a.cmp(&b)));
    let mut best = coarse[order[0]];
    if best.value <= 0.0 {
        return Ok(best);
    }

    let (ln_lo, ln_hi) = (radii[0].ln(), max_radius.ln());
    let project = |x: &[f64]| -> (Complex64, f64) {
        let mut w = Complex64::new(x[0], x[1]);
        let d = (w - z).norm();
        if d > search_radius {
            w = if d > 0.0 { z + (w - z) * (search_radius / d) } else { z };
        }
        (w, x[2].clamp(ln_lo, ln_hi).exp())
    };
    let spatial_step = if n > 1 {
        (2.0 * search_radius / (n - 1) as f64).max(f64::MIN_POSITIVE)
    } else {
        search_radius.max(max_radius) * 1e-3
    };
    let log_step = if radii.len() > 1 {
        (ln_hi - ln_lo) / (radii.len() - 1) as f64
    } else {
        0.0
    };
    let simplex = SimplexOptions {
        max_evaluations: opts.polish_evaluations,
        x_tol: 1e-9 * spatial_step.max(1e-300),
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    for &start in order.iter().take(opts.polish_starts) {
        let s = coarse[start];
        let x0 = [s.center.re, s.center.im, s.radius.ln()];
        let steps = [
            0.5 * spatial_step,
            0.5 * spatial_step,
            if log_step > 0.0 { 0.5 * log_step } else { 0.0 },
        ];
        let result = nelder_mead(
            |x| {
                let (w, r) = project(x);
                match field.disk_mass(w, r) {
                    Ok(m) => -m / weight(r),
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            &x0,
            &steps,
            &simplex,
        );
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let (w, r) = project(&result.point);
        if -result.value > best.value {
            best = RatioMax {
                value: -result.value,
                center: w,
                radius: r,
            };
        }
    }
    Ok(best)
}

/// Upper proxy for the global structure,
/// `sup_{|w - z| <= delta} sup_{r <= delta} (delta / r) mu(w, r)`.
pub fn lambda_sup(
    field: &DensityField,
    z: Complex64,
    delta: f64,
    opts: &SupOptions,
) -> Result<LambdaEstimate> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::arg(format!("delta must be positive, got {delta}")));
    }
    let best = sup_mass_ratio(field, z, delta, delta, opts)?;
    Ok(LambdaEstimate {
        z,
        delta,
        value: delta * best.value,
        method: Method::SupFormula,
        bound: Bound::UpperComparable,
        witness: Some(Witness::Disk {
            center: best.center,
            radius: best.radius,
        }),
    })
}

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::sup::{lambda_sup, SupOptions};
use super::{Bound, LambdaEstimate, Method, Witness};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::geometry::{pen_mass, Pen, Stockyard};

/// Stockyard with budget `4 pi delta` built from the sup-formula witness
/// `B(w, r)` at `delta`: a connector circle spanning from `z` to the nearest
/// point of `dB(w, r)`, plus as many copies of `dB(w, r)` as the remaining
/// fencing allows. Its mass is a certified lower bound for `Lambda(z, 4 pi delta)`.
pub fn constructive_stockyard(
    z: Complex64,
    delta: f64,
    center: Complex64,
    radius: f64,
) -> Result<Stockyard> {
    let budget = 2.0 * TAU * delta;
    let d = (z - center).norm();
    let direction = if d > 0.0 {
        (z - center) / d
    } else {
        Complex64::new(1.0, 0.0)
    };
    let touch = center + direction * radius;
    let span = (z - touch).norm();
    let mut pens = Vec::new();
    let mut used = 0.0;
    let scale = z.norm().max(center.norm()).max(delta).max(1.0);
    if span > 1e-12 * scale {
        let connector = Pen::circle(0.5 * (z + touch), 0.5 * span)?;
        used += connector.fencing();
        pens.push(connector);
    }
    let copy = Pen::circle(center, radius)?;
    let copies = ((budget - used) / copy.fencing()).floor().max(0.0) as usize;
    pens.extend(std::iter::repeat_n(copy, copies));
    let stockyard = Stockyard::new(z, budget, pens);
    let report = stockyard.validate();
    if !report.passed() {
        return Err(Error::InvalidStockyard(report.failures().join("; ")));
    }
    Ok(stockyard)
}

/// Certified lower bound for `Lambda(z, 4 pi delta)` from [`constructive_stockyard`].
pub fn lambda_stockyard(
    field: &DensityField,
    z: Complex64,
    delta: f64,
    opts: &SupOptions,
) -> Result<LambdaEstimate> {
    let sup = lambda_sup(field, z, delta, opts)?;
    let Some(Witness::Disk { center, radius }) = sup.witness else {
        unreachable!("lambda_sup always returns a disk witness")
    };
    let stockyard = constructive_stockyard(z, delta, center, radius)?;
    let mut value = 0.0;
    let mut copy_mass = None;
    for pen in &stockyard.pens {
        let is_copy = matches!(pen, Pen::Circle { center: c, radius: r } if *c == center && *r == radius);
        value += if is_copy {
            *copy_mass.get_or_insert(pen_mass(field, pen)?)
        } else {
            pen_mass(field, pen)?
        };
    }
    Ok(LambdaEstimate {
        z,
        delta,
        value,
        method: Method::StockyardLower,
        bound: Bound::Lower,
        witness: Some(Witness::Stockyard {
            center,
            radius,
            stockyard,
        }),
    })
}

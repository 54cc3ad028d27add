//! Estimators for the global structure `Lambda(z, delta)`.

mod stockyard;
mod sup;
mod sweep;
mod twist;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use stockyard::{constructive_stockyard, lambda_stockyard};
pub use sup::{lambda_sup, sup_mass_ratio, sup_weighted_ratio, RatioMax, SupOptions};
pub use sweep::{
    cell_seed, estimate, fmt_f64, lambda_sweep, write_sweep_csv, SweepGrid, SweepOptions,
    SweepRow, Window, SWEEP_HEADER,
};
pub use twist::{twist, volume_estimate, VolumeBounds};

use crate::geometry::{PlaneCurve, Stockyard};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SupFormula,
    StockyardLower,
    DirectPath,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SupFormula, Method::StockyardLower, Method::DirectPath];

    pub fn name(self) -> &'static str {
        match self {
            Method::SupFormula => "sup",
            Method::StockyardLower => "stockyard",
            Method::DirectPath => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Comparable to `Lambda` up to constants, and above the best stockyard.
    UpperComparable,
    Lower,
}

/// What realizes an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Maximizing disk `B(center, radius)` of the sup formula.
    Disk { center: Complex64, radius: f64 },
    /// Constructed stockyard around the disk `B(center, radius)`.
    Stockyard {
        center: Complex64,
        radius: f64,
        stockyard: Stockyard,
    },
    /// Best sampled loop, with the circle it winds around when it is one.
    Loop {
        path: PlaneCurve,
        circle: Option<(Complex64, f64)>,
    },
}

impl Witness {
    pub fn disk(&self) -> Option<(Complex64, f64)> {
        match self {
            Witness::Disk { center, radius } | Witness::Stockyard { center, radius, .. } => {
                Some((*center, *radius))
            }
            Witness::Loop { circle, .. } => *circle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub z: Complex64,
    pub delta: f64,
    pub value: f64,
    pub method: Method,
    pub bound: Bound,
    pub witness: Option<Witness>,
}

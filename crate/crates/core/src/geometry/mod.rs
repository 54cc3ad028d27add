//! Pens, stockyards, the Green identity and the planar constructions built on them.

mod curve;
mod green;
mod packing;
mod pen;
mod split;

pub use curve::{Piece, PlaneCurve};
pub use green::{boundary_line_integral, pen_mass, stockyard_mass, triangle_mass, triangulate};
pub use packing::{pack_disks, packing_lower_bound};
pub use pen::{Pen, Stockyard, StockyardReport};
pub use split::split_loop_into_seven;

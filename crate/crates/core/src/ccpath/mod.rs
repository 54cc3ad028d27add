//! Horizontal paths over the model hypersurface: lifting controls, loop
//! displacement, direct loop sampling of `Lambda`, and ball volumes.

mod control;
mod direct;
mod volume;

pub use control::{integrate_path, write_trajectory_csv, ControlSignal, PathSample, Trajectory};
pub use direct::{loop_displacement, sample_lambda_direct, DirectOptions};
pub use volume::{ball_volume_mc, VolumeMc, HISTOGRAM_CELLS};

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stockyard_core::stats::geometric_ladder;
use stockyard_core::structure::{Method, Window};
use stockyard_core::Complex64;

#[derive(Debug, Parser)]
#[command(name = "stockyard", version, about = "Lambda estimates, growth classification and volume bounds for a planar density")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate Lambda(z, delta) at points or over a window.
    Lambda(RunArgs),
    /// Decide linear / quadratic / no uniform global structure.
    Classify(ClassifyArgs),
    /// Run the identity suite (Green, packing, split, sandwich, bridge).
    Validate(ValidateArgs),
    /// Sandwich volume bounds and a Monte Carlo ball volume.
    Volume(VolumeArgs),
    /// Single-method sweep over a window and delta ladder.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sup,
    Stockyard,
    Direct,
    All,
}

impl MethodArg {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Sup => vec![Method::SupFormula],
            MethodArg::Stockyard => vec![Method::StockyardLower],
            MethodArg::Direct => vec![Method::DirectPath],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Density spec file.
    #[arg(long)]
    pub density: PathBuf,
    /// Base point `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub z: Option<Complex64>,
    /// Radius `v` or geometric ladder `a:b:n`.
    #[arg(long, value_parser = parse_ladder, default_value = "1")]
    pub delta: Ladder,
    /// Window `x0,y0,x1,y1,n`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Master seed; required by `volume`, 0 elsewhere when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Common {
    /// Points from `--window`, else `--z`, else the origin.
    pub fn window(&self) -> Window {
        self.window
            .or(self.z.map(Window::point))
            .unwrap_or(Window::point(Complex64::new(0.0, 0.0)))
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = MethodArg::Sup)]
    pub method: MethodArg,
    /// Loops sampled by the direct method.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Half width of the slope clusters at 1 and 2.
    #[arg(long, default_value_t = 0.15)]
    pub slope_tol: f64,
    /// Cross-z slope spread that rules out a uniform structure.
    #[arg(long, default_value_t = 0.3)]
    pub spread: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Monte Carlo paths per point.
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Override every identity tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also validate a stockyard given as JSON.
    #[arg(long)]
    pub stockyard: Option<PathBuf>,
    /// Density used for the stockyard mass.
    #[arg(long)]
    pub density: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, hide = true)]
    pub flip_orientation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ladder(pub Vec<f64>);

fn numbers(text: &str, count: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {text:?}"));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

pub fn parse_point(text: &str) -> Result<Complex64, String> {
    let v = numbers(text, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

pub fn parse_ladder(text: &str) -> Result<Ladder, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let positive = |s: &str| -> Result<f64, String> {
        match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(format!("{s:?} is not a positive number")),
        }
    };
    match parts.as_slice() {
        [v] => Ok(Ladder(vec![positive(v)?])),
        [a, b, n] => {
            let (a, b) = (positive(a)?, positive(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
            if n == 0 || (n > 1 && b <= a) || (n == 1 && a != b) {
                return Err(format!("ladder {text:?} needs a < b and n >= 1 (a = b when n = 1)"));
            }
            Ok(Ladder(geometric_ladder(a, b, n)))
        }
        _ => Err(format!("expected v or a:b:n, got {text:?}")),
    }
}

pub fn parse_window(text: &str) -> Result<Window, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 5 {
        return Err(format!("expected x0,y0,x1,y1,n, got {text:?}"));
    }
    let v = numbers(&parts[..4].join(","), 4)?;
    let n: usize = parts[4].trim().parse().map_err(|e| format!("{:?}: {e}", parts[4]))?;
    let w = Window { x0: v[0], y0: v[1], x1: v[2], y1: v[3], n };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

//! One- and two-dimensional adaptive quadrature.
//!
//! Both integrators use the 7-point Gauss / 15-point Kronrod pair. In two
//! dimensions the pair is applied as a tensor product on rectangular cells and
//! the worst cells are bisected first (global adaptivity). Cells whose sampled
//! integrand varies by less than [`VARIATION_GATE`] relative to its magnitude
//! are accepted without further refinement.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Relative variation below which a 2D cell is never refined.
pub const VARIATION_GATE: f64 = 0.10;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the 7-point rule living on the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Abscissae and weights of the 15-point Kronrod rule on [-1, 1], together
/// with the embedded 7-point Gauss weights (zero on the pure Kronrod nodes).
struct Kronrod15 {
    nodes: [f64; 15],
    wk: [f64; 15],
    wg: [f64; 15],
}

fn kronrod15() -> &'static Kronrod15 {
    static RULE: OnceLock<Kronrod15> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; 15];
        let mut wk = [0.0; 15];
        let mut wg = [0.0; 15];
        for i in 0..7 {
            nodes[i] = -XGK[i];
            nodes[14 - i] = XGK[i];
            wk[i] = WGK[i];
            wk[14 - i] = WGK[i];
            if i % 2 == 1 {
                wg[i] = WG[i / 2];
                wg[14 - i] = WG[i / 2];
            }
        }
        nodes[7] = 0.0;
        wk[7] = WGK[7];
        wg[7] = WG[3];
        Kronrod15 { nodes, wk, wg }
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Cached 16-point Gauss-Legendre rule, used for short fixed-order integrals.
pub(crate) fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Fixed-order 16-point Gauss-Legendre integral over [a, b].
pub(crate) fn fixed_gl16(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = gl16();
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    x.iter().zip(w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of intervals (1D) or cells (2D) kept at once.
    pub max_cells: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_cells: 20_000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15_interval(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Interval {
    let rule = kronrod15();
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let (mut k, mut g) = (0.0, 0.0);
    for i in 0..15 {
        let fx = f(c + h * rule.nodes[i]);
        k += rule.wk[i] * fx;
        g += rule.wg[i] * fx;
    }
    Interval {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over [a, b].
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: &QuadOptions,
    context: &'static str,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = gk15_interval(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while error > opts.target(value) {
        if heap.len() >= opts.max_cells {
            return Err(Error::QuadratureFailure {
                context,
                estimate: error,
                tolerance: opts.target(value),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureFailure {
                context,
                estimate: error,
                tolerance: opts.target(value),
            });
        }
        let left = gk15_interval(&f, worst.a, mid);
        let right = gk15_interval(&f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally to keep accumulated round-off out of the error.
        if evaluations % 3000 == 0 {
            value = heap.iter().map(|i| i.value).sum();
            error = heap.iter().map(|i| i.error).sum();
        }
    }
    let value = heap.iter().map(|i| i.value).sum();
    let error = heap.iter().map(|i| i.error).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Axis-aligned rectangle [x0, x1] x [y0, y1] in the integration parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

struct Cell {
    rect: Rect,
    value: f64,
    error: f64,
    split_x: bool,
    settled: bool,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.priority() == other.priority()
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority().total_cmp(&other.priority())
    }
}
impl Cell {
    fn priority(&self) -> f64 {
        if self.settled {
            -1.0
        } else {
            self.error
        }
    }
}

fn gk15_cell(f: &impl Fn(f64, f64) -> f64, rect: Rect) -> Cell {
    let rule = kronrod15();
    let hx = 0.5 * (rect.x1 - rect.x0);
    let cx = 0.5 * (rect.x1 + rect.x0);
    let hy = 0.5 * (rect.y1 - rect.y0);
    let cy = 0.5 * (rect.y1 + rect.y0);
    let (mut kk, mut gg, mut gk, mut kg) = (0.0, 0.0, 0.0, 0.0);
    let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..15 {
        let x = cx + hx * rule.nodes[i];
        let (mut rk, mut rg) = (0.0, 0.0);
        for j in 0..15 {
            let v = f(x, cy + hy * rule.nodes[j]);
            fmin = fmin.min(v);
            fmax = fmax.max(v);
            rk += rule.wk[j] * v;
            rg += rule.wg[j] * v;
        }
        kk += rule.wk[i] * rk;
        kg += rule.wk[i] * rg;
        gk += rule.wg[i] * rk;
        gg += rule.wg[i] * rg;
    }
    let jac = hx * hy;
    let err_x = ((kk - gk) * jac).abs();
    let err_y = ((kk - kg) * jac).abs();
    let err = ((kk - gg) * jac).abs().max(err_x).max(err_y);
    let scale = fmax.abs().max(fmin.abs());
    let variation = if scale > 0.0 { (fmax - fmin) / scale } else { 0.0 };
    Cell {
        rect,
        value: kk * jac,
        error: err,
        split_x: err_x >= err_y,
        settled: variation <= VARIATION_GATE,
    }
}

/// Globally adaptive tensor Gauss-Kronrod cubature of `f(u, v)` over `rect`.
pub fn integrate_rect(
    f: impl Fn(f64, f64) -> f64,
    rect: Rect,
    opts: &QuadOptions,
    context: &'static str,
) -> Result<Estimate> {
    let first = gk15_cell(&f, rect);
    let mut evaluations = 225;
    let mut value = first.value;
    let mut open_error = if first.settled { 0.0 } else { first.error };
    let mut settled_error = if first.settled { first.error } else { 0.0 };
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while open_error + settled_error > opts.target(value) {
        // Settled cells are accepted as they are; stop once they dominate.
        if open_error <= 0.01 * opts.target(value) {
            break;
        }
        if heap.len() >= opts.max_cells {
            return Err(Error::QuadratureFailure {
                context,
                estimate: open_error + settled_error,
                tolerance: opts.target(value),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.settled {
            heap.push(worst);
            break;
        }
        let r = worst.rect;
        let halves = if worst.split_x {
            let m = 0.5 * (r.x0 + r.x1);
            [Rect { x1: m, ..r }, Rect { x0: m, ..r }]
        } else {
            let m = 0.5 * (r.y0 + r.y1);
            [Rect { y1: m, ..r }, Rect { y0: m, ..r }]
        };
        value -= worst.value;
        open_error -= worst.error;
        for half in halves {
            let cell = gk15_cell(&f, half);
            evaluations += 225;
            value += cell.value;
            if cell.settled {
                settled_error += cell.error;
            } else {
                open_error += cell.error;
            }
            heap.push(cell);
        }
        open_error = open_error.max(0.0);
    }
    let value = heap.iter().map(|c| c.value).sum::<f64>();
    let error = heap.iter().map(|c| c.error).sum::<f64>();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

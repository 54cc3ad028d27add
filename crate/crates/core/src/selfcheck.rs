//! Identity suite behind `stockyard validate`: Green's identity, the packing
//! bound, the seven-curve split, the stockyard sandwich and the bridge between
//! lifted paths and line integrals, each reported with its measured residual.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ccpath::{integrate_path, loop_displacement, ControlSignal};
use crate::density::{DensityField, PolynomialPotential};
use crate::error::Result;
use crate::geometry::{
    boundary_line_integral, pack_disks, packing_lower_bound, pen_mass, split_loop_into_seven,
    stockyard_mass, Pen, Piece, PlaneCurve, Stockyard,
};
use crate::structure::{lambda_sup, SupOptions};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuiteOptions {
    /// Replaces every default tolerance.
    pub tolerance: Option<f64>,
    /// Traverses pen boundaries counterclockwise in the Green check.
    pub flip_orientation: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub cases: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn fields() -> Vec<DensityField> {
    vec![
        DensityField::constant(4.0).expect("positive constant"),
        DensityField::polynomial(PolynomialPotential::modulus_power(1)),
        DensityField::polynomial(PolynomialPotential::modulus_power(2)),
        DensityField::radial_alpha(0.5).expect("alpha in range"),
    ]
}

fn star(rng: &mut ChaCha8Rng, center: Complex64, scale: f64) -> Vec<Complex64> {
    let n = rng.random_range(3..=8);
    (0..n)
        .map(|k| {
            let a = (k as f64 + rng.random_range(0.1..0.9)) * TAU / n as f64;
            center + Complex64::from_polar(scale * rng.random_range(0.3..1.0), a)
        })
        .collect()
}

fn point(rng: &mut ChaCha8Rng, span: f64) -> Complex64 {
    Complex64::new(rng.random_range(-span..span), rng.random_range(-span..span))
}

fn green(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Result<IdentityResult> {
    let fields = fields();
    let (mut residual, mut sign): (f64, f64) = (0.0, 1.0);
    let cases = 24;
    for k in 0..cases {
        let f = &fields[k % fields.len()];
        let center = point(rng, 2.0);
        let size = rng.random_range(0.1..2.0);
        let pen = if k % 2 == 0 {
            Pen::circle(center, size)?
        } else {
            Pen::polygon(star(rng, center, size))?
        };
        let boundary = if opts.flip_orientation { pen.boundary().reversed() } else { pen.boundary() };
        let mass = pen_mass(f, &pen)?;
        let line = boundary_line_integral(f, &boundary)?;
        let r = (line - mass).abs() / mass;
        if r > residual {
            residual = r;
            sign = (line / mass).signum();
        }
    }
    Ok(IdentityResult {
        name: "green_identity",
        cases,
        residual,
        tolerance: opts.tolerance.unwrap_or(1e-5),
        detail: format!("line integral / pen mass has sign {sign:+}"),
    })
}

fn packing(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Result<IdentityResult> {
    let cases = 100;
    let mut residual: f64 = 0.0;
    for _ in 0..cases {
        let a = 10f64.powf(rng.random_range(-2.0..1.0));
        let b = a * 10f64.powf(rng.random_range(0.0..1.5));
        let centers = pack_disks(b, a)?;
        let bound = packing_lower_bound(b, a);
        residual = residual.max((bound - centers.len() as f64).max(0.0) / bound);
        for (i, p) in centers.iter().enumerate() {
            residual = residual.max((p.norm() + a - b).max(0.0) / b);
            for q in &centers[i + 1..] {
                residual = residual.max((2.0 * a - (p - q).norm()).max(0.0) / a);
            }
        }
    }
    Ok(IdentityResult {
        name: "packing_bound",
        cases,
        residual,
        tolerance: opts.tolerance.unwrap_or(1e-12),
        detail: "count >= b^2/(16 a^2), disjoint, inside B(0, b)".into(),
    })
}

fn split(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Result<IdentityResult> {
    let fields = fields();
    let cases = 20;
    let mut residual: f64 = 0.0;
    for k in 0..cases {
        let center = point(rng, 1.0);
        let verts = star(rng, center, 1.0);
        let n = verts.len();
        let pieces = (0..n)
            .map(|i| {
                let (p, q) = (verts[i], verts[(i + 1) % n]);
                if i % 2 == 0 {
                    Piece::arc_between(p, q, rng.random_range(0.3..2.5))
                } else {
                    Ok(Piece::segment(p, q))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let curve = PlaneCurve::new(pieces)?;
        let delta = curve.length() / 3.0;
        let f = &fields[k % fields.len()];
        let whole = boundary_line_integral(f, &curve)?;
        let mut sum = 0.0;
        let mut scale = whole.abs();
        for part in split_loop_into_seven(&curve)? {
            residual = residual.max((part.length() - 2.0 * delta).max(0.0) / delta);
            let v = boundary_line_integral(f, &part)?;
            scale = scale.max(v.abs());
            sum += v;
        }
        residual = residual.max((sum - whole).abs() / scale);
    }
    Ok(IdentityResult {
        name: "seven_curve_split",
        cases,
        residual,
        tolerance: opts.tolerance.unwrap_or(1e-9),
        detail: "sum of seven line integrals vs original; piece length <= 2 delta".into(),
    })
}

fn sandwich(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Result<IdentityResult> {
    let fields = fields();
    let sup = SupOptions::default();
    let cases = 12;
    let mut residual: f64 = 0.0;
    for k in 0..cases {
        let f = &fields[k % fields.len()];
        let z = point(rng, 2.0);
        let delta = rng.random_range(0.2..4.0);
        let mut pens = Vec::new();
        let mut anchor = z;
        for _ in 0..rng.random_range(1..=3) {
            let radius = delta / (3.0 * TAU);
            let pen = Pen::circle(anchor + Complex64::from_polar(radius, rng.random_range(0.0..TAU)), radius)?;
            if let Pen::Circle { center, radius } = pen {
                anchor = center + Complex64::from_polar(radius, rng.random_range(0.0..TAU));
            }
            pens.push(pen);
        }
        let s = Stockyard::new(z, delta, pens);
        let upper = lambda_sup(f, z, delta, &sup)?.value;
        residual = residual.max((stockyard_mass(f, &s)? / upper - 1.0).max(0.0));
    }
    Ok(IdentityResult {
        name: "stockyard_sandwich",
        cases,
        residual,
        tolerance: opts.tolerance.unwrap_or(1e-9),
        detail: "stockyard mass <= lambda_sup".into(),
    })
}

fn bridge(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> Result<IdentityResult> {
    let fields = [
        DensityField::polynomial(PolynomialPotential::modulus_power(1)),
        DensityField::polynomial(PolynomialPotential::modulus_power(2)),
    ];
    let cases = 20;
    let mut residual: f64 = 0.0;
    for k in 0..cases {
        let f = &fields[k % 2];
        let center = point(rng, 2.0);
        let size = rng.random_range(0.2..2.0);
        let verts = star(rng, center, size);
        let (control, delta) = ControlSignal::from_polygon(&verts)?;
        let path = integrate_path(f, (verts[0].re, verts[0].im, 0.0), &control, delta, 16)?;
        let line = loop_displacement(f, &PlaneCurve::polygon(&verts)?)?;
        residual = residual.max((path.end().t - line).abs());
    }
    Ok(IdentityResult {
        name: "bridge_identity",
        cases,
        residual,
        tolerance: opts.tolerance.unwrap_or(1e-6),
        detail: "lifted t-displacement vs line integral".into(),
    })
}

pub fn run_identity_suite(opts: &SuiteOptions) -> Result<Vec<IdentityResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    Ok(vec![
        green(&mut rng, opts)?,
        packing(&mut rng, opts)?,
        split(&mut rng, opts)?,
        sandwich(&mut rng, opts)?,
        bridge(&mut rng, opts)?,
    ])
}

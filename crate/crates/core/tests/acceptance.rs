//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stockyard_core::ccpath::{
    ball_volume_mc, integrate_path, loop_displacement, sample_lambda_direct, ControlSignal, DirectOptions,
};
use stockyard_core::classify::{dichotomy_probe, disk_mass_table, ClassifyOptions, UgsReport, Verdict, DOUBLING_BOUND};
use stockyard_core::density::{Bump, BumpLattice};
use stockyard_core::geometry::{
    boundary_line_integral, pack_disks, packing_lower_bound, pen_mass, split_loop_into_seven, stockyard_mass,
    PlaneCurve,
};
use stockyard_core::quadrature::gauss_legendre;
use stockyard_core::stats::{geometric_ladder, log_log_fit};
use stockyard_core::structure::{lambda_stockyard, lambda_sup, volume_estimate, SupOptions, Window};
use stockyard_core::{Complex64, DensityField};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:.1?}, limit {limit:?}"))
}

fn lattice() -> DensityField {
    DensityField::bump_lattice(BumpLattice::decaying_gaussian(120))
}

fn lattice_window() -> Window {
    Window::square(20.0, 5)
}

fn lattice_ladder() -> Vec<f64> {
    (0..8).rev().map(|k| 40.0 / 2f64.powi(k)).collect()
}

fn constant_field_exactness() -> Outcome {
    let start = Instant::now();
    let f = constant();
    let opts = SupOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let zs: Vec<Complex64> = (0..5).map(|_| c(rng.random_range(-100.0..100.0), rng.random_range(-100.0..100.0))).collect();
    let mut worst: f64 = 0.0;
    for delta in [1.0, 10.0, 100.0] {
        let exact = 4.0 * PI * delta * delta;
        let values: Vec<f64> = zs.iter().map(|&z| lambda_sup(&f, z, delta, &opts).unwrap().value).collect();
        for v in &values {
            worst = worst.max((v / exact - 1.0).abs());
        }
        let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &v| (a.min(v), b.max(v)));
        ensure((hi - lo) / lo < 0.01, || format!("cross-z spread {} at delta {delta}", (hi - lo) / lo))?;
    }
    ensure(worst < 0.01, || format!("relative error {worst}"))?;
    let report = dichotomy_probe(&f, Window::square(50.0, 3), &geometric_ladder(1.0, 100.0, 5), &ClassifyOptions::default())
        .map_err(|e| e.to_string())?;
    let ex = report.exponents.as_ref().ok_or("no exponents")?;
    ensure(report.verdict == Verdict::Quadratic, || format!("verdict {}", report.verdict))?;
    ensure(ex.min >= 1.98 && ex.max <= 2.02, || format!("slopes in [{}, {}]", ex.min, ex.max))?;
    within_time(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("max rel err {worst:.1e}, verdict Quadratic, slopes [{:.4}, {:.4}]", ex.min, ex.max))
}

fn radial_exponents() -> Outcome {
    let start = Instant::now();
    let f = radial_half();
    let opts = SupOptions::default();
    let ladder = geometric_ladder(100.0, 1e4, 9);
    let at_origin: Vec<f64> = ladder.iter().map(|&d| lambda_sup(&f, c(0.0, 0.0), d, &opts).unwrap().value).collect();
    let track: Vec<f64> = ladder.iter().map(|&d| lambda_sup(&f, c(d.powf(1.5), 0.0), d, &opts).unwrap().value).collect();
    let s0 = log_log_fit(&ladder, &at_origin).ok_or("fit failed")?.slope;
    let st = log_log_fit(&ladder, &track).ok_or("fit failed")?.slope;
    ensure((s0 - 1.5).abs() <= 0.1, || format!("origin slope {s0}"))?;
    ensure(st <= 1.35, || format!("track slope {st}"))?;
    let window = Window { x0: 0.0, y0: 0.0, x1: 1e6, y1: 0.0, n: 3 };
    let report = dichotomy_probe(&f, window, &ladder, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::NoUgs, || format!("verdict {}", report.verdict))?;
    within_time(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("origin slope {s0:.4}, track slope {st:.4}, verdict NoUGS"))
}

fn quartic_band() -> Outcome {
    let f = quartic();
    let opts = SupOptions::default();
    let mut ratios = Vec::new();
    for x in [0.0, 1.0, 10.0, 100.0] {
        for delta in [1.0, 10.0, 100.0] {
            let v = lambda_sup(&f, c(x, 0.0), delta, &opts).unwrap().value;
            ratios.push(v / ((x + delta).powi(2) * delta * delta));
        }
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    ensure(hi / lo <= 50.0, || format!("band C/c = {}", hi / lo))?;
    let window = Window { x0: 0.0, y0: 0.0, x1: 100.0, y1: 0.0, n: 5 };
    let report = dichotomy_probe(&f, window, &[1.0, 10.0, 100.0], &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.verdict == Verdict::NoUgs, || format!("verdict {}", report.verdict))?;
    Ok(format!("band [{lo:.3}, {hi:.3}], C/c = {:.2}, verdict NoUGS", hi / lo))
}

fn green_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let fields = [constant(), modulus_squared(), quartic(), mixed_polynomial(), radial_half()];
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let f = &fields[k % fields.len()];
        let pen = random_pen(&mut rng, 3.0);
        let area = pen_mass(f, &pen).map_err(|e| e.to_string())?;
        let line = boundary_line_integral(f, &pen.boundary()).map_err(|e| e.to_string())?;
        worst = worst.max((area - line).abs() / area);
    }
    ensure(worst <= 1e-5, || format!("worst relative residual {worst:e}"))?;
    Ok(format!("50 pens, worst relative residual {worst:.1e}"))
}

fn packing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let check = |b: f64, a: f64| -> Result<usize, String> {
        let centers = pack_disks(b, a).map_err(|e| e.to_string())?;
        ensure(centers.len() as f64 >= b * b / (16.0 * a * a), || format!("{} disks for b/a = {}", centers.len(), b / a))?;
        for (i, p) in centers.iter().enumerate() {
            ensure(p.norm() + a <= b * (1.0 + 1e-12), || format!("disk at {p} leaves B(0, {b})"))?;
            for q in &centers[i + 1..] {
                ensure((p - q).norm() >= 2.0 * a * (1.0 - 1e-12), || format!("disks at {p} and {q} overlap"))?;
            }
        }
        Ok(centers.len())
    };
    for _ in 0..100 {
        let a = 10f64.powf(rng.random_range(-3.0..1.0));
        let b = a * 10f64.powf(rng.random_range(0.0..1.7));
        check(b, a)?;
    }
    let spot10 = check(10.0, 1.0)?;
    let spot4 = check(4.0, 1.0)?;
    ensure(spot10 == 49 && spot4 == 4, || format!("spot counts {spot10}, {spot4}"))?;
    ensure(packing_lower_bound(10.0, 1.0) <= 49.0, || "bound".into())?;
    Ok("100 random (a, b) packed; b = 10a gives 49, b = 4a gives 4".into())
}

fn seven_curve_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fields = [modulus_squared(), quartic(), radial_half()];
    let (mut worst_len, mut worst_sum): (f64, f64) = (0.0, 0.0);
    for k in 0..50 {
        let delta = rng.random_range(0.2..3.0);
        let curve = random_loop(&mut rng, 3.0 * delta);
        let f = &fields[k % fields.len()];
        let parts = split_loop_into_seven(&curve).map_err(|e| e.to_string())?;
        let whole = boundary_line_integral(f, &curve).map_err(|e| e.to_string())?;
        let mut sum = 0.0;
        for p in &parts {
            worst_len = worst_len.max(p.length() / delta);
            sum += boundary_line_integral(f, p).map_err(|e| e.to_string())?;
        }
        worst_sum = worst_sum.max((sum - whole).abs() / whole.abs().max(1e-300));
    }
    ensure(worst_len <= 2.0 + 1e-9, || format!("piece length reaches {worst_len} delta"))?;
    ensure(worst_sum <= 1e-9, || format!("sum residual {worst_sum:e}"))?;
    Ok(format!("50 loops, longest piece {worst_len:.4} delta, worst sum residual {worst_sum:.1e}"))
}

fn sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fields = [constant(), modulus_squared(), quartic(), radial_half(), few_bumps()];
    let opts = SupOptions::default();
    let (mut worst_upper, mut worst_lower): (f64, f64) = (0.0, f64::INFINITY);
    for k in 0..200 {
        let f = &fields[k % fields.len()];
        let z = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let delta = 10f64.powf(rng.random_range(-1.0..1.0));
        let s = random_stockyard(&mut rng, z, delta);
        ensure(s.validate().passed(), || format!("generated stockyard invalid: {:?}", s.validate().failures()))?;
        let upper = lambda_sup(f, z, delta, &opts).map_err(|e| e.to_string())?.value;
        let mass = stockyard_mass(f, &s).map_err(|e| e.to_string())?;
        worst_upper = worst_upper.max(mass / upper);
        // The constructive stockyard at parameter delta / (4 pi) has fencing budget delta.
        let built = lambda_stockyard(f, z, delta / (4.0 * PI), &opts).map_err(|e| e.to_string())?;
        if let Some(stockyard_core::structure::Witness::Stockyard { stockyard, .. }) = &built.witness {
            ensure(stockyard.budget <= delta * (1.0 + 1e-12), || "constructive budget".into())?;
        }
        worst_upper = worst_upper.max(built.value / upper);
        let lower = lambda_stockyard(f, z, delta, &opts).map_err(|e| e.to_string())?.value;
        worst_lower = worst_lower.min(lower / upper);
    }
    ensure(worst_upper <= 1.0, || format!("stockyard mass / lambda_sup reached {worst_upper}"))?;
    ensure(worst_lower >= 0.4, || format!("lambda_stockyard / lambda_sup fell to {worst_lower}"))?;
    Ok(format!("200 stockyards, max mass/sup {worst_upper:.3}, min stockyard/sup {worst_lower:.3}"))
}

fn direct_isoperimetry() -> Outcome {
    let f = constant();
    let opts = DirectOptions::default();
    let sup = SupOptions::default();
    let mut lo_ratio: f64 = f64::INFINITY;
    let mut hi_ratio: f64 = 0.0;
    for (k, (z, delta)) in [(c(0.0, 0.0), 1.0), (c(3.0, -2.0), 5.0), (c(-40.0, 10.0), 0.3)].into_iter().enumerate() {
        let est = sample_lambda_direct(&f, z, delta, &opts, &sup, 100 + k as u64).map_err(|e| e.to_string())?;
        let ratio = est.value / (delta * delta / PI);
        lo_ratio = lo_ratio.min(ratio);
        hi_ratio = hi_ratio.max(ratio);
        let upper = lambda_sup(&f, z, delta, &sup).map_err(|e| e.to_string())?.value;
        ensure(est.value <= upper, || format!("direct {} above sup {upper}", est.value))?;
    }
    ensure(lo_ratio >= 0.8 && hi_ratio <= 1.0 + 1e-9, || format!("ratios in [{lo_ratio}, {hi_ratio}]"))?;
    Ok(format!("direct / (delta^2/pi) in [{lo_ratio:.4}, {hi_ratio:.4}]"))
}

fn bridge_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for f in [modulus_squared(), quartic()] {
        for _ in 0..20 {
            let center = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let scale = rng.random_range(0.2..2.0);
            let verts = star_polygon(&mut rng, center, scale);
            let (control, delta) = ControlSignal::from_polygon(&verts).map_err(|e| e.to_string())?;
            let t0 = rng.random_range(-5.0..5.0);
            let path = integrate_path(&f, (verts[0].re, verts[0].im, t0), &control, delta, 16).map_err(|e| e.to_string())?;
            let line = loop_displacement(&f, &PlaneCurve::polygon(&verts).unwrap()).map_err(|e| e.to_string())?;
            worst = worst.max((path.end().t - t0 - line).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("worst residual {worst:e}"))?;
    Ok(format!("40 loops, worst |lifted dt - displacement| {worst:.1e}"))
}

fn volume_sandwich() -> Outcome {
    let f = constant();
    let sup = SupOptions::default();
    let z = c(0.7, -0.3);
    let mut notes = Vec::new();
    for delta in [1.0, 5.0] {
        let bounds = volume_estimate(&f, z, delta, &sup).map_err(|e| e.to_string())?;
        let mc = ball_volume_mc(&f, z, 0.0, delta, 10_000, 11, &sup).map_err(|e| e.to_string())?;
        ensure(bounds.lower <= mc.estimate && mc.estimate <= bounds.upper, || {
            format!("delta {delta}: mc {} outside [{}, {}]", mc.estimate, bounds.lower, bounds.upper)
        })?;
        let doubled = volume_estimate(&f, z, 2.0 * delta, &sup).map_err(|e| e.to_string())?;
        let growth = doubled.upper / bounds.upper;
        ensure((8.0..=32.0).contains(&growth), || format!("upper(2 delta)/upper(delta) = {growth}"))?;
        notes.push(format!("delta {delta}: {:.3e} <= {:.3e} <= {:.3e}, growth {growth:.2}", bounds.lower, mc.estimate, bounds.upper));
    }
    Ok(notes.join("; "))
}

fn doubling(report: &UgsReport) -> Outcome {
    let f = constant();
    let sup = SupOptions::default();
    let mut worst: f64 = 0.0;
    for z in [c(0.0, 0.0), c(17.0, -4.0)] {
        for delta in [0.5, 1.0, 10.0, 100.0] {
            let r = lambda_sup(&f, z, 2.0 * delta, &sup).unwrap().value / lambda_sup(&f, z, delta, &sup).unwrap().value;
            worst = worst.max((r - 4.0).abs());
        }
    }
    ensure(worst <= 0.05, || format!("constant-field ratio off 4 by {worst}"))?;
    ensure(matches!(report.verdict, Verdict::Linear | Verdict::Quadratic), || "lattice not classified UGS".into())?;
    let max_ratio = report.doubling.iter().filter_map(|r| r.max_ratio).fold(0.0, f64::max);
    ensure(!report.doubling.is_empty() && max_ratio <= DOUBLING_BOUND, || format!("lattice doubling ratio {max_ratio}"))?;
    Ok(format!("constant |ratio - 4| <= {worst:.1e}; bump lattice ({}) max ratio {max_ratio:.3}", report.verdict))
}

/// Mass of one bump inside `B(center, r)` by graded Gauss-Legendre panels in
/// the bump's own radius, with the inside arc of each circle in closed form.
fn brute_bump_mass(bump: &Bump, center: Complex64, r: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let d = (bump.center - center).norm();
    let rho = bump.radius;
    if d + rho <= r {
        return bump.mass;
    }
    if d >= r + rho {
        return 0.0;
    }
    let inside = |s: f64| -> f64 {
        if s + d <= r {
            TAU
        } else if s >= r + d || d >= r + s {
            0.0
        } else {
            2.0 * ((s * s + d * d - r * r) / (2.0 * s * d)).clamp(-1.0, 1.0).acos()
        }
    };
    let profile = |s: f64| bump.density(bump.center + Complex64::new(s, 0.0));
    let mut breaks = vec![0.0, rho];
    for k in [(r - d).abs(), r + d] {
        if k > 0.0 && k < rho {
            breaks.push(k);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Geometric grading toward both ends of the interval.
        let mut cuts = vec![a, b];
        for level in 1..=30 {
            let h = 0.5 * (b - a) * 0.5f64.powi(level);
            cuts.push(a + h);
            cuts.push(b - h);
        }
        cuts.sort_by(f64::total_cmp);
        for p in cuts.windows(2) {
            let (lo, hi) = (p[0], p[1]);
            let half = 0.5 * (hi - lo);
            for (x, wt) in nodes.0.iter().zip(&nodes.1) {
                let s = lo + half * (1.0 + x);
                total += wt * half * inside(s) * s * profile(s);
            }
        }
    }
    total
}

fn lattice_classifier(report: &UgsReport, elapsed: Duration) -> Outcome {
    let field = lattice();
    let lat = field.as_bump_lattice().unwrap();
    let window = lattice_window();
    let ladder = lattice_ladder();
    let points = window.points();
    let table = disk_mass_table(&field, &points, &ladder).map_err(|e| e.to_string())?;
    let nodes = gauss_legendre(10);
    let mut worst: f64 = 0.0;
    for (i, &z) in points.iter().enumerate() {
        for (k, &delta) in ladder.iter().enumerate() {
            let oracle: f64 = lat.bumps().iter().map(|b| brute_bump_mass(b, z, delta, &nodes)).sum();
            worst = worst.max((table[i][k] - oracle).abs() / oracle.max(1e-300));
        }
    }
    ensure(worst <= 1e-6, || format!("disk masses off the brute-force sums by {worst:e}"))?;
    ensure(report.verdict == Verdict::Linear, || format!("verdict {}", report.verdict))?;
    within_time(elapsed, Duration::from_secs(600))?;
    Ok(format!("verdict Linear in {elapsed:.1?}; mu table matches brute-force sums to {worst:.1e}"))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report_line = |label: &str, started: Instant, outcome: Outcome| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {label}: {detail} [{secs:.1}s]"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {label}: {why} [{secs:.1}s]");
            }
        }
    };
    let run = |f: fn() -> Outcome| std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));

    let t = Instant::now();
    report_line("AC1 constant field lambda_sup and Quadratic verdict", t, run(constant_field_exactness));
    let t = Instant::now();
    report_line("AC2 radial alpha = 0.5 exponents and NoUGS", t, run(radial_exponents));
    let t = Instant::now();
    report_line("AC3 |z|^4 band and NoUGS", t, run(quartic_band));
    let t = Instant::now();
    report_line("AC4 Green identity suite", t, run(green_identity));
    let t = Instant::now();
    report_line("AC5 packing suite", t, run(packing));
    let t = Instant::now();
    report_line("AC6 seven-curve split suite", t, run(seven_curve_split));
    let t = Instant::now();
    report_line("AC7 sandwich soundness", t, run(sandwich));
    let t = Instant::now();
    report_line("AC8 direct-sampler isoperimetry", t, run(direct_isoperimetry));
    let t = Instant::now();
    report_line("AC9 bridge identity", t, run(bridge_identity));
    let t = Instant::now();
    report_line("AC10 volume sandwich", t, run(volume_sandwich));

    let started = Instant::now();
    let probe = dichotomy_probe(&lattice(), lattice_window(), &lattice_ladder(), &ClassifyOptions::default());
    let probe_time = started.elapsed();
    match probe {
        Ok(report) => {
            report_line("AC11 doubling", Instant::now(), run_with(&report, doubling));
            report_line("AC12 bump-lattice Linear verdict", started, lattice_classifier(&report, probe_time));
        }
        Err(e) => {
            report_line("AC11 doubling", started, Err(format!("lattice probe failed: {e}")));
            report_line("AC12 bump-lattice Linear verdict", started, Err(format!("lattice probe failed: {e}")));
        }
    }

    println!("{} of 12 criteria passed", 12 - failures);
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

fn run_with(report: &UgsReport, f: fn(&UgsReport) -> Outcome) -> Outcome {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(report))).unwrap_or_else(|_| Err("panicked".into()))
}

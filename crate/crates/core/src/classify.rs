//! Decision procedures for a uniform global structure: linear (`Lambda ~ delta`),
//! quadratic (`Lambda ~ delta^2`), none, or not decidable from the sampled data.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::stats::{fit_line, log_log_fit, median};
use crate::structure::{
    lambda_sup, lambda_sweep, sup_mass_ratio, sup_weighted_ratio, Method, SupOptions, SweepGrid,
    SweepOptions, Window,
};

/// The doubling chain constant `f(2 delta) <= f(9/4 delta) <= 49 f(delta)`.
pub const DOUBLING_BOUND: f64 = 49.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Linear,
    Quadratic,
    #[serde(rename = "NoUGS")]
    NoUgs,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Linear => "Linear",
            Verdict::Quadratic => "Quadratic",
            Verdict::NoUgs => "NoUGS",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

/// One numerically checked condition, with the window it was checked on and
/// the comparability constants it found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub window: Window,
    pub ladder: Vec<f64>,
    pub statistic: f64,
    pub constants: BTreeMap<String, f64>,
    pub outcome: Outcome,
}

impl ConditionCheck {
    fn new(name: &str, window: Window, ladder: &[f64], statistic: f64, outcome: Outcome) -> Self {
        Self {
            name: name.to_string(),
            window,
            ladder: ladder.to_vec(),
            statistic,
            constants: BTreeMap::new(),
            outcome,
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.constants.insert(key.to_string(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Half width of the slope clusters around 1 and 2.
    pub slope_tolerance: f64,
    /// Cross-z slope spread above which there is no uniform structure.
    pub spread_threshold: f64,
    /// Largest log-log slope of `sup_z mu(z, delta) / delta` still read as bounded.
    pub linear_trend: f64,
    /// The inner-sup infimum must reach this share of its median.
    pub inf_fraction: f64,
    /// Candidates for `delta*`, each paired with `M = delta* / 2`.
    pub delta_stars: Vec<f64>,
    /// Decades of ladder required above a quadratic `delta*`.
    pub tail_decades: f64,
    pub sup: SupOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            slope_tolerance: 0.15,
            spread_threshold: 0.3,
            linear_trend: 0.5,
            inf_fraction: 1e-3,
            delta_stars: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            tail_decades: 1.0,
            sup: SupOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub z: Complex64,
    pub slope: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSummary {
    pub fits: Vec<SlopeFit>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
}

impl ExponentSummary {
    fn from_fits(fits: Vec<SlopeFit>) -> Self {
        let slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
        let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let max = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        Self {
            fits,
            min,
            max,
            mean,
            spread: max - min,
        }
    }

    fn clustered_at(&self, target: f64, tol: f64) -> bool {
        self.fits.iter().all(|f| (f.slope - target).abs() <= tol)
    }
}

/// `max_z Lambda_ub(z, 2 delta) / Lambda_ub(z, delta)`, or `None` when some
/// `Lambda_ub(z, delta)` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingRow {
    pub delta: f64,
    pub max_ratio: Option<f64>,
    pub exceeds_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UgsReport {
    pub verdict: Verdict,
    pub window: Window,
    pub ladder: Vec<f64>,
    pub exponents: Option<ExponentSummary>,
    /// `max / min` of `Lambda_ub(z, delta) / delta^p` over the window and ladder.
    pub linear_band: Option<f64>,
    pub quadratic_band: Option<f64>,
    pub band_threshold: f64,
    pub checks: Vec<ConditionCheck>,
    pub doubling: Vec<DoublingRow>,
    pub notes: Vec<String>,
}

impl UgsReport {
    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Doubling rows over the bound, counted only once a uniform verdict is in.
    pub fn doubling_violations(&self) -> usize {
        match self.verdict {
            Verdict::Linear | Verdict::Quadratic => {
                self.doubling.iter().filter(|r| r.exceeds_bound).count()
            }
            _ => 0,
        }
    }
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() || ladder.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::arg("delta ladder must be positive and finite"));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("delta ladder must be strictly increasing"));
    }
    Ok(())
}

fn span(ladder: &[f64]) -> f64 {
    ladder[ladder.len() - 1] / ladder[0]
}

/// `mu(z, delta)` for every window point (rows) and ladder rung (columns).
pub fn disk_mass_table(field: &DensityField, points: &[Complex64], ladder: &[f64]) -> Result<Vec<Vec<f64>>> {
    points
        .par_iter()
        .map(|&z| ladder.iter().map(|&d| field.disk_mass(z, d)).collect())
        .collect()
}

fn band(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    (lo > 0.0 && hi.is_finite()).then(|| hi / lo)
}

fn linear_a(window: Window, ladder: &[f64], table: &[Vec<f64>], opts: &ClassifyOptions) -> ConditionCheck {
    let sups: Vec<f64> = (0..ladder.len())
        .map(|k| table.iter().map(|row| row[k] / ladder[k]).fold(0.0, f64::max))
        .collect();
    let statistic = sups.iter().copied().fold(0.0, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = ladder
        .iter()
        .zip(&sups)
        .filter(|(_, s)| **s > 0.0)
        .map(|(d, s)| (*d, *s))
        .unzip();
    let name = "linear_a_mass_over_delta";
    if !statistic.is_finite() {
        return ConditionCheck::new(name, window, ladder, statistic, Outcome::Fail);
    }
    match log_log_fit(&xs, &ys) {
        Some(fit) => {
            let outcome = if fit.slope <= opts.linear_trend { Outcome::Pass } else { Outcome::Fail };
            ConditionCheck::new(name, window, ladder, statistic, outcome)
                .with("C", statistic)
                .with("trend_slope", fit.slope)
        }
        None if xs.is_empty() => ConditionCheck::new(name, window, ladder, statistic, Outcome::Pass).with("C", statistic),
        None => ConditionCheck::new(name, window, ladder, statistic, Outcome::Inconclusive),
    }
}

fn linear_b(field: &DensityField, window: Window, ladder: &[f64], opts: &ClassifyOptions) -> Result<ConditionCheck> {
    let points = window.points();
    let name = "linear_b_inner_sup";
    let mut last = None;
    for &star in &opts.delta_stars {
        let m = star / 2.0;
        let inner = points
            .par_iter()
            .map(|&z| sup_mass_ratio(field, z, star, m, &opts.sup).map(|r| r.value))
            .collect::<Result<Vec<f64>>>()?;
        let inf = inner.iter().copied().fold(f64::INFINITY, f64::min);
        let med = median(&inner).unwrap_or(0.0);
        let outcome = if inf > 0.0 && inf >= opts.inf_fraction * med { Outcome::Pass } else { Outcome::Fail };
        let check = ConditionCheck::new(name, window, ladder, inf, outcome)
            .with("delta_star", star)
            .with("M", m)
            .with("c", inf)
            .with("median", med);
        if outcome == Outcome::Pass {
            return Ok(check);
        }
        last = Some(check);
    }
    Ok(last.unwrap_or_else(|| ConditionCheck::new(name, window, ladder, 0.0, Outcome::Inconclusive)))
}

/// Conditions for a linear structure: (a) `mu(z, delta) / delta` shows no growth
/// trend over the ladder; (b) the inner double sup of `mu / r` over
/// `|w - z| <= delta*`, `r <= M` stays away from 0 across the window for
/// some `delta*` in `opts.delta_stars` with `M = delta* / 2`.
pub fn check_linear_conditions(
    field: &DensityField,
    window: Window,
    ladder: &[f64],
    opts: &ClassifyOptions,
) -> Result<[ConditionCheck; 2]> {
    window.validate()?;
    validate_ladder(ladder)?;
    let table = disk_mass_table(field, &window.points(), ladder)?;
    Ok([linear_a(window, ladder, &table, opts), linear_b(field, window, ladder, opts)?])
}

fn quadratic_pair(window: Window, ladder: &[f64], table: &[Vec<f64>], opts: &ClassifyOptions) -> [ConditionCheck; 2] {
    let (name_a, name_b) = ("quadratic_a_small_scale", "quadratic_b_large_scale");
    let top = ladder[ladder.len() - 1];
    let mut fallback: Option<[ConditionCheck; 2]> = None;
    for j in 0..ladder.len() {
        let tail = &ladder[j..];
        if top / ladder[j] < 10f64.powf(opts.tail_decades) * (1.0 - 1e-12) || tail.len() < 3 {
            break;
        }
        let star = ladder[j];
        let small = table
            .iter()
            .flat_map(|row| (0..=j).map(|k| row[k] / ladder[k]))
            .fold(0.0, f64::max);
        let a_outcome = if small.is_finite() { Outcome::Pass } else { Outcome::Fail };
        let a = ConditionCheck::new(name_a, window, ladder, small, a_outcome)
            .with("delta_star", star)
            .with("C", small);

        let ratios = || table.iter().flat_map(|row| (j..ladder.len()).map(|k| row[k] / (ladder[k] * ladder[k])));
        let tail_band = band(ratios());
        let mut worst_slope: f64 = 0.0;
        for row in table {
            let ys: Vec<f64> = (j..ladder.len()).map(|k| row[k] / (ladder[k] * ladder[k])).collect();
            match log_log_fit(tail, &ys) {
                Some(fit) => worst_slope = worst_slope.max(fit.slope.abs()),
                None => worst_slope = f64::INFINITY,
            }
        }
        let b_outcome = match tail_band {
            Some(bd) if bd <= span(ladder).sqrt() && worst_slope <= opts.slope_tolerance => Outcome::Pass,
            _ => Outcome::Fail,
        };
        let lo = ratios().fold(f64::INFINITY, f64::min);
        let hi = ratios().fold(0.0, f64::max);
        let b = ConditionCheck::new(name_b, window, ladder, tail_band.unwrap_or(f64::INFINITY), b_outcome)
            .with("delta_star", star)
            .with("c", lo)
            .with("C", hi)
            .with("max_abs_tail_slope", worst_slope);
        if a.passed() && b.passed() {
            return [a, b];
        }
        let better = match &fallback {
            None => true,
            Some([_, fb]) => b.statistic < fb.statistic,
        };
        if better {
            fallback = Some([a, b]);
        }
    }
    fallback.unwrap_or_else(|| {
        [
            ConditionCheck::new(name_a, window, ladder, f64::NAN, Outcome::Inconclusive),
            ConditionCheck::new(name_b, window, ladder, f64::NAN, Outcome::Inconclusive),
        ]
    })
}

/// Conditions for a quadratic structure, searching `delta*` over the ladder rungs that
/// leave `tail_decades` above them: (a) `mu(z, delta) / delta` bounded for
/// `delta <= delta*`; (b) `mu(z, delta) / delta^2` flat (every per-z tail slope
/// within the slope tolerance) and inside a band `C / c <= sqrt(ladder span)`
/// for `delta >= delta*`.
pub fn check_quadratic_conditions(
    field: &DensityField,
    window: Window,
    ladder: &[f64],
    opts: &ClassifyOptions,
) -> Result<[ConditionCheck; 2]> {
    window.validate()?;
    validate_ladder(ladder)?;
    let table = disk_mass_table(field, &window.points(), ladder)?;
    Ok(quadratic_pair(window, ladder, &table, opts))
}

/// `max_z Lambda_ub(z, 2 delta) / Lambda_ub(z, delta)` for each rung.
pub fn doubling_ratio(
    field: &DensityField,
    window: Window,
    ladder: &[f64],
    opts: &ClassifyOptions,
) -> Result<Vec<DoublingRow>> {
    window.validate()?;
    validate_ladder(ladder)?;
    let points = window.points();
    ladder
        .iter()
        .map(|&delta| {
            let pairs = points
                .par_iter()
                .map(|&z| {
                    Ok((
                        lambda_sup(field, z, delta, &opts.sup)?.value,
                        lambda_sup(field, z, 2.0 * delta, &opts.sup)?.value,
                    ))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            Ok(doubling_row(delta, &pairs))
        })
        .collect()
}

fn doubling_row(delta: f64, pairs: &[(f64, f64)]) -> DoublingRow {
    let max_ratio = if pairs.iter().any(|(a, _)| *a <= 0.0) {
        None
    } else {
        Some(pairs.iter().map(|(a, b)| b / a).fold(0.0, f64::max))
    };
    DoublingRow {
        delta,
        max_ratio,
        exceeds_bound: max_ratio.is_some_and(|r| r > DOUBLING_BOUND),
    }
}

/// Empirical constants of the growth bounds a uniform structure forces:
/// `C1 = inf_z sup_{|w - z| <= delta0, r <= delta0} mu(w, r) / (r + r^2)` at
/// the first rung and `C2 = sup mu(z, delta) / (delta + delta^2)` over the table.
fn growth_constants(
    field: &DensityField,
    window: Window,
    ladder: &[f64],
    table: &[Vec<f64>],
    opts: &ClassifyOptions,
) -> Result<[ConditionCheck; 2]> {
    let delta0 = ladder[0];
    let c1 = window
        .points()
        .par_iter()
        .map(|&z| sup_weighted_ratio(field, z, delta0, delta0, |r| r + r * r, &opts.sup).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let c2 = table
        .iter()
        .flat_map(|row| row.iter().zip(ladder).map(|(m, d)| m / (d + d * d)))
        .fold(0.0, f64::max);
    Ok([
        ConditionCheck::new("growth_lower_c1", window, ladder, c1, if c1 > 0.0 { Outcome::Pass } else { Outcome::Fail })
            .with("delta0", delta0)
            .with("C1", c1),
        ConditionCheck::new("growth_upper_c2", window, ladder, c2, if c2.is_finite() { Outcome::Pass } else { Outcome::Fail })
            .with("C2", c2),
    ])
}

/// Samples `Lambda_ub(z, delta)` over the window and ladder, fits per-z
/// log-log slopes and decides between a linear, a quadratic, or no uniform
/// structure, attaching the condition checks as evidence.
///
/// Linear needs the linear conditions to pass, the quadratic ones to fail, and
/// either every slope within `1 +- tol` or `Lambda_ub / delta` confined to a
/// band of ratio `sqrt(ladder span)`; Quadratic is symmetric with exponent 2.
/// Otherwise NoUGS when the slope spread exceeds the threshold, else
/// Inconclusive. Ladders under two decades or three rungs are Inconclusive.
pub fn dichotomy_probe(
    field: &DensityField,
    window: Window,
    ladder: &[f64],
    opts: &ClassifyOptions,
) -> Result<UgsReport> {
    window.validate()?;
    validate_ladder(ladder)?;
    let mut report = UgsReport {
        verdict: Verdict::Inconclusive,
        window,
        ladder: ladder.to_vec(),
        exponents: None,
        linear_band: None,
        quadratic_band: None,
        band_threshold: span(ladder).sqrt(),
        checks: Vec::new(),
        doubling: Vec::new(),
        notes: Vec::new(),
    };
    if ladder.len() < 3 || span(ladder) < 100.0 * (1.0 - 1e-12) {
        report.notes.push("ladder spans under two decades or has under three rungs".into());
        return Ok(report);
    }
    if field.is_translation_invariant() {
        report.notes.push("field is translation invariant; any window is representative".into());
    } else if field.is_radial() {
        report.notes.push("field is radial; only |z| matters".into());
    }

    let points = window.points();
    let grid = SweepGrid::new(window, ladder.to_vec())?;
    let sweep_opts = SweepOptions {
        sup: opts.sup,
        ..SweepOptions::default()
    };
    let rows = lambda_sweep(field, &grid, Method::SupFormula, &sweep_opts);
    let mut upper = vec![vec![0.0; ladder.len()]; points.len()];
    for row in rows {
        upper[row.z_index][row.delta_index] = row.result?.value;
    }

    for (k, &delta) in ladder.iter().enumerate() {
        if let Some(k2) = ladder.iter().position(|&d| (d - 2.0 * delta).abs() <= 1e-9 * d) {
            let pairs: Vec<(f64, f64)> = upper.iter().map(|row| (row[k], row[k2])).collect();
            report.doubling.push(doubling_row(delta, &pairs));
        }
    }
    if upper.iter().flatten().any(|v| !(*v > 0.0)) {
        report.notes.push("Lambda_ub vanishes somewhere on the grid; exponents undefined".into());
        return Ok(report);
    }

    let logs: Vec<f64> = ladder.iter().map(|d| d.ln()).collect();
    let fits = points
        .iter()
        .zip(&upper)
        .map(|(&z, row)| {
            let ys: Vec<f64> = row.iter().map(|v| v.ln()).collect();
            let fit = fit_line(&logs, &ys).ok_or_else(|| Error::arg("slope fit failed"))?;
            Ok(SlopeFit {
                z,
                slope: fit.slope,
                r_squared: fit.r_squared,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let exponents = ExponentSummary::from_fits(fits);
    let scaled = |p: i32| band(upper.iter().flat_map(|row| row.iter().zip(ladder).map(move |(v, d)| v / d.powi(p))));
    report.linear_band = scaled(1);
    report.quadratic_band = scaled(2);

    let table = disk_mass_table(field, &points, ladder)?;
    let lin = [linear_a(window, ladder, &table, opts), linear_b(field, window, ladder, opts)?];
    let quad = quadratic_pair(window, ladder, &table, opts);
    let lin_ok = lin.iter().all(ConditionCheck::passed);
    let quad_ok = quad.iter().all(ConditionCheck::passed);
    let within = |b: Option<f64>| b.is_some_and(|b| b <= report.band_threshold);
    let linear_shape = exponents.clustered_at(1.0, opts.slope_tolerance) || within(report.linear_band);
    let quadratic_shape = exponents.clustered_at(2.0, opts.slope_tolerance) || within(report.quadratic_band);

    report.verdict = if linear_shape && lin_ok && !quad_ok {
        Verdict::Linear
    } else if quadratic_shape && quad_ok && !lin_ok {
        Verdict::Quadratic
    } else if exponents.spread > opts.spread_threshold {
        Verdict::NoUgs
    } else {
        Verdict::Inconclusive
    };
    report.checks.extend(lin);
    report.checks.extend(quad);
    report.checks.extend(growth_constants(field, window, ladder, &table, opts)?);
    report.exponents = Some(exponents);
    if report.doubling_violations() > 0 {
        report.notes.push(format!("doubling ratio above {DOUBLING_BOUND} for a uniform verdict"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::PolynomialPotential;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ladder(a: f64, b: f64, n: usize) -> Vec<f64> {
        crate::stats::geometric_ladder(a, b, n)
    }

    fn fast() -> ClassifyOptions {
        ClassifyOptions {
            sup: SupOptions {
                rungs: 10,
                lattice: 9,
                polish_starts: 2,
                polish_evaluations: 60,
                min_radius: 1e-3,
            },
            ..ClassifyOptions::default()
        }
    }

    #[test]
    fn constant_field_is_quadratic() {
        let k = DensityField::constant(4.0).unwrap();
        let report = dichotomy_probe(&k, Window::square(10.0, 3), &ladder(1.0, 100.0, 5), &fast()).unwrap();
        assert_eq!(report.verdict, Verdict::Quadratic);
        let ex = report.exponents.as_ref().unwrap();
        assert!((ex.mean - 2.0).abs() < 0.02 && ex.spread < 0.02);
        assert_relative_eq!(report.quadratic_band.unwrap(), 1.0, max_relative = 1e-6);
        assert!(!report.check("linear_a_mass_over_delta").unwrap().passed());
        let b = report.check("quadratic_b_large_scale").unwrap();
        assert!(b.passed());
        assert_relative_eq!(b.constants["c"], 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn scaling_leaves_verdict_and_slopes() {
        let k = DensityField::constant(4.0).unwrap();
        let w = Window::square(1.0, 2);
        let l = ladder(1.0, 100.0, 3);
        let a = dichotomy_probe(&k, w, &l, &fast()).unwrap();
        let b = dichotomy_probe(&k.scaled(7.5).unwrap(), w, &l, &fast()).unwrap();
        assert_eq!(a.verdict, b.verdict);
        for (x, y) in a.exponents.unwrap().fits.iter().zip(&b.exponents.unwrap().fits) {
            assert!((x.slope - y.slope).abs() < 1e-9);
        }
    }

    #[test]
    fn short_ladder_and_zero_field_are_inconclusive() {
        let k = DensityField::constant(4.0).unwrap();
        assert_eq!(
            dichotomy_probe(&k, Window::square(1.0, 2), &[1.0], &fast()).unwrap().verdict,
            Verdict::Inconclusive
        );
        let z = dichotomy_probe(&DensityField::zero(), Window::square(1.0, 2), &ladder(1.0, 100.0, 3), &fast()).unwrap();
        assert_eq!(z.verdict, Verdict::Inconclusive);
        assert!(z.doubling.is_empty() || z.doubling.iter().all(|r| r.max_ratio.is_none()));
    }

    #[test]
    fn quartic_is_not_uniform() {
        let q = DensityField::polynomial(PolynomialPotential::modulus_power(2));
        let w = Window {
            x0: 0.0,
            y0: 0.0,
            x1: 100.0,
            y1: 0.0,
            n: 5,
        };
        let report = dichotomy_probe(&q, w, &ladder(1.0, 100.0, 3), &fast()).unwrap();
        assert_eq!(report.verdict, Verdict::NoUgs);
        let [_, b] = check_quadratic_conditions(&q, w, &ladder(1.0, 100.0, 5), &fast()).unwrap();
        assert!(!b.passed());
    }

    #[test]
    fn radial_alpha_fails_quadratic_tail() {
        let a = DensityField::radial_alpha(0.5).unwrap();
        let [_, b] = check_quadratic_conditions(&a, Window::point(Complex64::new(0.0, 0.0)), &ladder(1.0, 1e3, 7), &fast()).unwrap();
        assert!(!b.passed());
        assert_relative_eq!(b.constants["max_abs_tail_slope"], 0.5, max_relative = 1e-3);
    }

    #[test]
    fn linear_checks_on_constant_and_zero() {
        let k = DensityField::constant(4.0).unwrap();
        let [a, _] = check_linear_conditions(&k, Window::square(1.0, 2), &ladder(1.0, 100.0, 3), &fast()).unwrap();
        assert!(!a.passed());
        assert_relative_eq!(a.constants["trend_slope"], 1.0, max_relative = 1e-9);
        let [_, b] = check_linear_conditions(&DensityField::zero(), Window::square(1.0, 2), &[1.0, 2.0], &fast()).unwrap();
        assert!(!b.passed());
    }

    #[test]
    fn doubling_on_constant_field_is_four() {
        let k = DensityField::constant(4.0).unwrap();
        let rows = doubling_ratio(&k, Window::square(3.0, 2), &[1.0, 5.0], &fast()).unwrap();
        for r in rows {
            assert_relative_eq!(r.max_ratio.unwrap(), 4.0, max_relative = 1e-9);
            assert!(!r.exceeds_bound);
        }
        let zero = doubling_ratio(&DensityField::zero(), Window::square(3.0, 2), &[1.0], &fast()).unwrap();
        assert_eq!(zero[0].max_ratio, None);
    }

    #[test]
    fn window_enlargement_does_not_lower_sup_statistic() {
        let q = DensityField::polynomial(PolynomialPotential::modulus_power(2));
        let l = ladder(1.0, 10.0, 3);
        let small = check_linear_conditions(&q, Window::square(1.0, 3), &l, &fast()).unwrap();
        let large = check_linear_conditions(&q, Window::square(2.0, 5), &l, &fast()).unwrap();
        assert!(large[0].statistic >= small[0].statistic);
    }

    #[test]
    fn report_serializes() {
        let k = DensityField::constant(1.0).unwrap();
        let report = dichotomy_probe(&k, Window::square(1.0, 1), &ladder(1.0, 100.0, 3), &fast()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"verdict\":\"Quadratic\""));
        let back: UgsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, Verdict::Quadratic);
    }
}

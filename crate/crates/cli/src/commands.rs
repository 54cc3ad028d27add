use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use stockyard_core::ccpath::{ball_volume_mc, DirectOptions};
use stockyard_core::classify::{dichotomy_probe, ClassifyOptions};
use stockyard_core::density::parse_density_spec;
use stockyard_core::geometry::{stockyard_mass, Stockyard};
use stockyard_core::selfcheck::{run_identity_suite, SuiteOptions};
use stockyard_core::structure::{
    cell_seed, fmt_f64, lambda_sweep, volume_estimate, write_sweep_csv, LambdaEstimate, SupOptions,
    SweepGrid, SweepOptions, SweepRow,
};
use stockyard_core::{DensityField, Error};

use crate::args::{ClassifyArgs, Common, Format, RunArgs, ValidateArgs, VolumeArgs};
use crate::{emit, header_line, read_input, ConfigHash, Failure, Outcome, VERSION};

fn load_density(path: &PathBuf) -> Result<(DensityField, Vec<u8>), Failure> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Config(format!("{}: not valid UTF-8", path.display())))?;
    let field = parse_density_spec(&text, path.parent()).map_err(|e| match e {
        Error::Parse { .. } | Error::InvalidDensity(_) | Error::InvalidArgument(_) => {
            Failure::Config(format!("{}: {e}", path.display()))
        }
        other => other.into(),
    })?;
    Ok((field, bytes))
}

/// Arguments with the fields that cannot change the output cleared.
fn normalized(common: &Common) -> Common {
    let mut c = common.clone();
    c.density = PathBuf::new();
    c.out = None;
    c.jobs = 0;
    c
}

fn prepare<A: Clone + std::fmt::Debug>(
    command: &str,
    args: &A,
    common: impl Fn(&mut A) -> &mut Common,
) -> Result<(DensityField, String), Failure> {
    let mut clean = args.clone();
    let path = common(&mut clean).density.clone();
    *common(&mut clean) = normalized(common(&mut clean));
    let (field, bytes) = load_density(&path)?;
    Ok((field, ConfigHash::new(command, &clean).file(&bytes).hex()))
}

fn json_document(hash: &str, key: &str, body: impl Serialize) -> Result<String, Failure> {
    let doc = json!({
        "tool": format!("stockyard {VERSION}"),
        "config_hash": format!("sha256:{hash}"),
        key: body,
    });
    serde_json::to_string_pretty(&doc)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Numeric(format!("serializing output: {e}")))
}

fn grid(common: &Common) -> Result<SweepGrid, Failure> {
    Ok(SweepGrid::new(common.window(), common.delta.0.clone())?)
}

fn sweep_options(common: &Common, samples: usize) -> SweepOptions {
    SweepOptions {
        sup: SupOptions::default(),
        direct: DirectOptions {
            samples,
            ..DirectOptions::default()
        },
        seed: common.seed.unwrap_or(0),
    }
}

fn quoted(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "'"))
}

fn witness_fields(est: &LambdaEstimate) -> [String; 3] {
    match est.witness.as_ref().and_then(|w| w.disk()) {
        Some((c, r)) => [fmt_f64(c.re), fmt_f64(c.im), fmt_f64(r)],
        None => Default::default(),
    }
}

fn numeric_rows(count: usize) -> Outcome {
    match count {
        0 => Ok(()),
        n => Err(Failure::Numeric(format!("{n} row(s) failed; see the error column"))),
    }
}

pub fn lambda(a: &RunArgs) -> Outcome {
    let (field, hash) = prepare("lambda", a, |x| &mut x.common)?;
    let grid = grid(&a.common)?;
    let opts = sweep_options(&a.common, a.samples);
    let methods = a.method.methods();
    let columns: Vec<Vec<SweepRow>> = methods.iter().map(|&m| lambda_sweep(&field, &grid, m, &opts)).collect();
    let cells = columns[0].len();
    let mut failed = 0;
    let text = match a.common.format {
        Format::Csv => {
            let mut s = header_line(&hash) + "\nre(z),im(z),delta";
            for m in &methods {
                let n = m.name();
                write!(s, ",{n}_value,{n}_witness_re,{n}_witness_im,{n}_witness_radius").unwrap();
            }
            s.push_str(",error\n");
            for i in 0..cells {
                let row = &columns[0][i];
                write!(s, "{},{},{}", fmt_f64(row.z.re), fmt_f64(row.z.im), fmt_f64(row.delta)).unwrap();
                let mut errors = Vec::new();
                for (m, col) in methods.iter().zip(&columns) {
                    match &col[i].result {
                        Ok(est) => {
                            let [wr, wi, rr] = witness_fields(est);
                            write!(s, ",{},{wr},{wi},{rr}", fmt_f64(est.value)).unwrap();
                        }
                        Err(e) => {
                            s.push_str(",,,,");
                            errors.push(format!("{}: {e}", m.name()));
                        }
                    }
                }
                if errors.is_empty() {
                    s.push_str(",\n");
                } else {
                    failed += 1;
                    writeln!(s, ",{}", quoted(&errors.join("; "))).unwrap();
                }
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = (0..cells)
                .map(|i| {
                    let mut estimates = serde_json::Map::new();
                    let mut errors = serde_json::Map::new();
                    for (m, col) in methods.iter().zip(&columns) {
                        match &col[i].result {
                            Ok(est) => {
                                estimates.insert(m.name().into(), json!(est));
                            }
                            Err(e) => {
                                errors.insert(m.name().into(), json!(e.to_string()));
                            }
                        }
                    }
                    if !errors.is_empty() {
                        failed += 1;
                    }
                    json!({
                        "z": columns[0][i].z,
                        "delta": columns[0][i].delta,
                        "estimates": estimates,
                        "errors": errors,
                    })
                })
                .collect();
            json_document(&hash, "rows", rows)?
        }
    };
    emit(a.common.out.as_deref(), &text)?;
    numeric_rows(failed)
}

pub fn sweep(a: &RunArgs) -> Outcome {
    let methods = a.method.methods();
    let [method] = methods[..] else {
        return Err(Failure::Config("sweep runs a single method; use `lambda --method all` for all".into()));
    };
    let (field, hash) = prepare("sweep", a, |x| &mut x.common)?;
    let rows = lambda_sweep(&field, &grid(&a.common)?, method, &sweep_options(&a.common, a.samples));
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    let text = match a.common.format {
        Format::Csv => {
            let mut buf = (header_line(&hash) + "\n").into_bytes();
            write_sweep_csv(&mut buf, &rows, method).expect("writing to memory");
            String::from_utf8(buf).expect("csv is UTF-8")
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| match &r.result {
                    Ok(est) => json!(est),
                    Err(e) => json!({ "z": r.z, "delta": r.delta, "method": method, "error": e.to_string() }),
                })
                .collect();
            json_document(&hash, "rows", rows)?
        }
    };
    emit(a.common.out.as_deref(), &text)?;
    numeric_rows(failed)
}

pub fn classify(a: &ClassifyArgs) -> Outcome {
    let (field, hash) = prepare("classify", a, |x| &mut x.common)?;
    let opts = ClassifyOptions {
        slope_tolerance: a.slope_tol,
        spread_threshold: a.spread,
        ..ClassifyOptions::default()
    };
    let report = dichotomy_probe(&field, a.common.window(), &a.common.delta.0, &opts)?;
    let doc = json_document(&hash, "report", &report)?;
    match &a.common.out {
        Some(path) => {
            emit(Some(path), &doc)?;
            emit(None, &format!("{}\n", report.verdict))
        }
        None => emit(None, &format!("{}\n{doc}", report.verdict)),
    }
}

#[derive(Serialize)]
struct VolumeRow {
    z: stockyard_core::Complex64,
    delta: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    mc_estimate: Option<f64>,
    mc_band: Option<f64>,
    in_sandwich: Option<bool>,
    error: Option<String>,
}

pub fn volume(a: &VolumeArgs) -> Outcome {
    let Some(seed) = a.common.seed else {
        return Err(Failure::Config("volume needs --seed for the Monte Carlo estimate".into()));
    };
    let (field, hash) = prepare("volume", a, |x| &mut x.common)?;
    let grid = grid(&a.common)?;
    let sup = SupOptions::default();
    let points = grid.window.points();
    let cells: Vec<_> = points
        .iter()
        .flat_map(|&z| grid.deltas.iter().map(move |&d| (z, d)))
        .collect();
    let rows: Vec<VolumeRow> = cells
        .par_iter()
        .enumerate()
        .map(|(index, &(z, delta))| {
            let result = volume_estimate(&field, z, delta, &sup).and_then(|bounds| {
                let mc = ball_volume_mc(&field, z, 0.0, delta, a.paths, cell_seed(seed, index as u64), &sup)?;
                Ok((bounds, mc))
            });
            match result {
                Ok((b, mc)) => VolumeRow {
                    z,
                    delta,
                    lower: Some(b.lower),
                    upper: Some(b.upper),
                    mc_estimate: Some(mc.estimate),
                    mc_band: Some(mc.band),
                    in_sandwich: Some(mc.estimate + mc.band >= b.lower && mc.estimate - mc.band <= b.upper),
                    error: None,
                },
                Err(e) => VolumeRow {
                    z,
                    delta,
                    lower: None,
                    upper: None,
                    mc_estimate: None,
                    mc_band: None,
                    in_sandwich: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let text = match a.common.format {
        Format::Csv => {
            let mut s = header_line(&hash) + "\nre(z),im(z),delta,lower,upper,mc_estimate,mc_band,in_sandwich,error\n";
            let num = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    fmt_f64(r.z.re),
                    fmt_f64(r.z.im),
                    fmt_f64(r.delta),
                    num(r.lower),
                    num(r.upper),
                    num(r.mc_estimate),
                    num(r.mc_band),
                    r.in_sandwich.map(|b| b.to_string()).unwrap_or_default(),
                    r.error.as_deref().map(quoted).unwrap_or_default(),
                )
                .unwrap();
            }
            s
        }
        Format::Json => json_document(&hash, "rows", &rows)?,
    };
    emit(a.common.out.as_deref(), &text)?;
    numeric_rows(failed)
}

pub fn validate(a: &ValidateArgs) -> Outcome {
    if let Some(t) = a.tol {
        if !(t >= 0.0) {
            return Err(Failure::Config(format!("--tol must be >= 0, got {t}")));
        }
    }
    let mut clean = a.clone();
    clean.out = None;
    clean.jobs = 0;
    clean.stockyard = None;
    clean.density = None;
    let mut hash = ConfigHash::new("validate", &clean);
    let opts = SuiteOptions {
        tolerance: a.tol,
        flip_orientation: a.flip_orientation,
        seed: 0,
    };
    let results = run_identity_suite(&opts)?;
    let mut s = String::from("identity,cases,residual,tolerance,status,detail\n");
    let mut failures = Vec::new();
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(
            s,
            "{},{},{},{},{status},{}",
            r.name,
            r.cases,
            fmt_f64(r.residual),
            fmt_f64(r.tolerance),
            quoted(&r.detail)
        )
        .unwrap();
        if !r.passed() {
            failures.push(format!("{}: residual {:e} > tolerance {:e} ({})", r.name, r.residual, r.tolerance, r.detail));
        }
    }
    if let Some(path) = &a.stockyard {
        let bytes = read_input(path)?;
        hash = hash.file(&bytes);
        let yard: Stockyard = serde_json::from_slice(&bytes)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let report = yard.validate();
        let mut detail = report.failures().join("; ");
        if let Some(dpath) = &a.density {
            let (field, dbytes) = load_density(dpath)?;
            hash = hash.file(&dbytes);
            if report.passed() {
                detail = format!("mass {}", fmt_f64(stockyard_mass(&field, &yard)?));
            }
        }
        let status = if report.passed() { "PASS" } else { "FAIL" };
        writeln!(s, "stockyard,{},,,{status},{}", yard.pens.len(), quoted(&detail)).unwrap();
        if !report.passed() {
            failures.push(format!("stockyard {}: {detail}", path.display()));
        }
    } else if a.density.is_some() {
        return Err(Failure::Config("--density is only used together with --stockyard".into()));
    }
    emit(a.out.as_deref(), &format!("{}\n{s}", header_line(&hash.hex())))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(failures.join("\n")))
    }
}

//! Plain-text density specifications.
//!
//! ```text
//! # quartic modulus
//! [density]
//! family = polynomial
//! coeffs = 2,2,1,0
//! ```
//!
//! Keys of the `[density]` section: `family` (`zero`, `constant`,
//! `polynomial`, `radial_alpha`, `bump_lattice`, `grid`), `c`, `alpha`,
//! `coeffs` (`j,k,re,im` triples separated by `;`), `bumps` (`x,y,mass,radius`
//! separated by `;`), `grid_file`, `origin` (`x,y`), `cell_size`, `extension`
//! (`zero` or `periodic`) and an optional positive `scale`. A bump lattice may
//! instead name a generated pattern in a `[lattice]` section with
//! `pattern = decaying_gaussian` and `extent = <n>`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use super::{Bump, BumpLattice, DensityField, Extension, GridDensity, PolynomialPotential};
use crate::error::{Error, Result};

#[derive(Debug, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str)> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("missing key `{key}`"),
        })
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|(line, v)| parse_f64(line, v))
            .transpose()
    }
}

fn parse_f64(line: usize, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("bad number {v:?}: {e}"),
    })
}

fn parse_tuples(line: usize, v: &str, arity: usize) -> Result<Vec<Vec<f64>>> {
    v.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let nums = t
                .split(',')
                .map(|x| parse_f64(line, x))
                .collect::<Result<Vec<_>>>()?;
            if nums.len() != arity {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {arity} numbers in {t:?}, found {}", nums.len()),
                });
            }
            Ok(nums)
        })
        .collect()
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Parse {
                line,
                message: format!("unterminated section header {content:?}"),
            })?;
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate section [{name}]"),
                });
            }
            sections.insert(
                name.clone(),
                Section {
                    line,
                    ..Section::default()
                },
            );
            current = Some(name);
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found {content:?}"),
        })?;
        let section = current
            .as_ref()
            .and_then(|n| sections.get_mut(n))
            .ok_or_else(|| Error::Parse {
                line,
                message: "key outside of any section".into(),
            })?;
        let key = key.trim().to_string();
        if section.entries.contains_key(&key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        section.entries.insert(key, (line, value.trim().to_string()));
    }
    Ok(sections)
}

/// Parses a density specification. Relative `grid_file` paths are resolved
/// against `base_dir`.
pub fn parse_density_spec(text: &str, base_dir: Option<&Path>) -> Result<DensityField> {
    let sections = parse_sections(text)?;
    let density = sections.get("density").ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing [density] section".into(),
    })?;
    let (family_line, family) = density.require("family")?;
    let located = |line: usize| move |e: Error| match e {
        Error::Parse { .. } | Error::Io { .. } => e,
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    };
    let field = match family {
        "zero" => DensityField::zero(),
        "constant" => {
            let (line, v) = density.require("c")?;
            DensityField::constant(parse_f64(line, v)?).map_err(located(line))?
        }
        "radial_alpha" => {
            let (line, v) = density.require("alpha")?;
            DensityField::radial_alpha(parse_f64(line, v)?).map_err(located(line))?
        }
        "polynomial" => {
            let (line, v) = density.require("coeffs")?;
            let mut coeffs = Vec::new();
            for t in parse_tuples(line, v, 4)? {
                if t[0] < 0.0 || t[1] < 0.0 || t[0].fract() != 0.0 || t[1].fract() != 0.0 {
                    return Err(Error::Parse {
                        line,
                        message: format!("exponents must be non-negative integers, got {},{}", t[0], t[1]),
                    });
                }
                coeffs.push((t[0] as u32, t[1] as u32, Complex64::new(t[2], t[3])));
            }
            DensityField::polynomial(PolynomialPotential::new(coeffs).map_err(located(line))?)
        }
        "bump_lattice" => {
            let lattice = if let Some(section) = sections.get("lattice") {
                let (line, pattern) = section.require("pattern")?;
                if pattern != "decaying_gaussian" {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown lattice pattern {pattern:?}"),
                    });
                }
                let extent = section.number("extent")?.unwrap_or(120.0);
                if !(extent >= 0.0 && extent <= 2000.0 && extent.fract() == 0.0) {
                    return Err(Error::Parse {
                        line: section.get("extent").map_or(section.line, |(l, _)| l),
                        message: format!("extent must be an integer in [0, 2000], got {extent}"),
                    });
                }
                BumpLattice::decaying_gaussian(extent as i32)
            } else {
                let (line, v) = density.require("bumps")?;
                let bumps = parse_tuples(line, v, 4)?
                    .into_iter()
                    .map(|t| Bump {
                        center: Complex64::new(t[0], t[1]),
                        mass: t[2],
                        radius: t[3],
                    })
                    .collect();
                BumpLattice::new(bumps).map_err(located(line))?
            };
            DensityField::bump_lattice(lattice)
        }
        "grid" => {
            let (line, file) = density.require("grid_file")?;
            let path = match base_dir {
                Some(dir) if Path::new(file).is_relative() => dir.join(file),
                _ => Path::new(file).to_path_buf(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let rows = GridDensity::parse_rows(&text).map_err(|e| match e {
                Error::Parse { line: l, message } => Error::Parse {
                    line,
                    message: format!("{}:{l}: {message}", path.display()),
                },
                other => other,
            })?;
            let origin = match density.get("origin") {
                Some((l, v)) => {
                    let t = parse_tuples(l, v, 2)?;
                    let t = t.first().ok_or_else(|| Error::Parse {
                        line: l,
                        message: "origin needs x,y".into(),
                    })?;
                    Complex64::new(t[0], t[1])
                }
                None => Complex64::new(0.0, 0.0),
            };
            let (cl, cv) = density.require("cell_size")?;
            let cell = parse_f64(cl, cv)?;
            let extension = match density.get("extension") {
                None | Some((_, "zero")) => Extension::Zero,
                Some((_, "periodic")) => Extension::Periodic,
                Some((l, other)) => {
                    return Err(Error::Parse {
                        line: l,
                        message: format!("unknown extension {other:?}"),
                    })
                }
            };
            DensityField::grid(GridDensity::new(origin, cell, rows, extension).map_err(located(line))?)
        }
        other => {
            return Err(Error::Parse {
                line: family_line,
                message: format!("unknown family {other:?}"),
            })
        }
    };
    match density.get("scale") {
        Some((line, v)) => field.scaled(parse_f64(line, v)?).map_err(located(line)),
        None => Ok(field),
    }
}

/// Reads and parses a density specification file.
pub fn load_density_spec(path: &Path) -> Result<DensityField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_density_spec(&text, path.parent())
}

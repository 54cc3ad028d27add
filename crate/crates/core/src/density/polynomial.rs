use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One monomial `c * z^j * conj(z)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub j: u32,
    pub k: u32,
    pub coeff: Complex64,
}

/// Real polynomial potential `P(z) = sum c_{j,k} z^j conj(z)^k` with Hermitian
/// coefficients, together with its Laplacian `4 d^2P/dz dzbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    terms: Vec<Monomial>,
    laplacian: Vec<Monomial>,
    degree: u32,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl PolynomialPotential {
    /// Builds the potential from `(j, k, coeff)` triples. Repeated `(j, k)`
    /// pairs are summed. Fails if the coefficients are not Hermitian, if the
    /// Laplacian vanishes identically, or if the Laplacian is negative at any
    /// point of the validation lattice.
    pub fn new(coeffs: impl IntoIterator<Item = (u32, u32, Complex64)>) -> Result<Self> {
        let mut merged: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (j, k, c) in coeffs {
            *merged.entry((j, k)).or_default() += c;
        }
        merged.retain(|_, c| c.norm() > 0.0);
        for (&(j, k), &c) in &merged {
            let mirror = merged.get(&(k, j)).copied().unwrap_or_default();
            if (c - mirror.conj()).norm() > HERMITIAN_TOL * c.norm().max(1.0) {
                return Err(Error::InvalidDensity(format!(
                    "coefficient ({j},{k}) = {c} has no Hermitian partner ({k},{j}) = {}",
                    c.conj()
                )));
            }
        }
        let terms: Vec<Monomial> = merged
            .iter()
            .map(|(&(j, k), &coeff)| Monomial { j, k, coeff })
            .collect();
        let degree = terms.iter().map(|t| t.j + t.k).max().unwrap_or(0);
        let laplacian: Vec<Monomial> = terms
            .iter()
            .filter(|t| t.j > 0 && t.k > 0)
            .map(|t| Monomial {
                j: t.j - 1,
                k: t.k - 1,
                coeff: t.coeff * (4.0 * t.j as f64 * t.k as f64),
            })
            .collect();
        if laplacian.is_empty() {
            return Err(Error::InvalidDensity(
                "polynomial is harmonic (its Laplacian vanishes identically)".into(),
            ));
        }
        let p = Self {
            terms,
            laplacian,
            degree,
        };
        p.validate_subharmonic()?;
        Ok(p)
    }

    /// `|z|^(2n)`, the standard radial examples (`n = 1` gives `|z|^2`).
    pub fn modulus_power(n: u32) -> Self {
        Self::new([(n, n, Complex64::new(1.0, 0.0))]).expect("|z|^2n is subharmonic")
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn laplacian_terms(&self) -> &[Monomial] {
        &self.laplacian
    }

    /// Total degree `m` of `P`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn value(&self, z: Complex64) -> f64 {
        eval(&self.terms, z).re
    }

    pub fn laplacian(&self, z: Complex64) -> f64 {
        eval(&self.laplacian, z).re
    }

    /// `dP/dz`.
    pub fn dz(&self, z: Complex64) -> Complex64 {
        let d: Vec<Monomial> = self
            .terms
            .iter()
            .filter(|t| t.j > 0)
            .map(|t| Monomial {
                j: t.j - 1,
                k: t.k,
                coeff: t.coeff * t.j as f64,
            })
            .collect();
        eval(&d, z)
    }

    /// `(P_x, P_y)`. For real `P`, `P_x = 2 Re(P_z)` and `P_y = -2 Im(P_z)`.
    pub fn gradient(&self, z: Complex64) -> (f64, f64) {
        let pz = self.dz(z);
        (2.0 * pz.re, -2.0 * pz.im)
    }

    /// `d^a/dz^a d^b/dzbar^b` of the Laplacian, evaluated at `z`.
    pub fn laplacian_derivative(&self, a: u32, b: u32, z: Complex64) -> Complex64 {
        let d: Vec<Monomial> = self
            .laplacian
            .iter()
            .filter(|t| t.j >= a && t.k >= b)
            .map(|t| Monomial {
                j: t.j - a,
                k: t.k - b,
                coeff: t.coeff * falling(t.j, a) * falling(t.k, b),
            })
            .collect();
        eval(&d, z)
    }

    fn validate_subharmonic(&self) -> Result<()> {
        let mut samples = Vec::new();
        for i in 0..=40 {
            for j in 0..=40 {
                samples.push(Complex64::new(-10.0 + 0.5 * i as f64, -10.0 + 0.5 * j as f64));
            }
        }
        for r in [30.0, 100.0, 1000.0] {
            for q in 0..64 {
                samples.push(Complex64::from_polar(r, std::f64::consts::TAU * q as f64 / 64.0));
            }
        }
        for z in samples {
            let v = self.laplacian(z);
            let scale: f64 = self
                .laplacian
                .iter()
                .map(|t| t.coeff.norm() * z.norm().powi((t.j + t.k) as i32))
                .sum();
            if v < -1e-10 * scale.max(1e-300) {
                return Err(Error::InvalidDensity(format!(
                    "Laplacian is negative ({v:e}) at {z}; P is not subharmonic"
                )));
            }
        }
        Ok(())
    }
}

/// Size of the global structure of a polynomial model domain:
/// `sum_{k=0}^{m-2} (sum_{a=0}^{k} |d^k Delta P / dz^a dzbar^(k-a) (z)|) delta^(k+2)`,
/// from exact derivatives of the Laplacian.
pub fn polynomial_lambda(p: &PolynomialPotential, z: Complex64, delta: f64) -> f64 {
    let top = p.degree().saturating_sub(2);
    (0..=top)
        .map(|k| {
            let derivatives: f64 = (0..=k)
                .map(|a| p.laplacian_derivative(a, k - a, z).norm())
                .sum();
            derivatives * delta.powi(k as i32 + 2)
        })
        .sum()
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

fn eval(terms: &[Monomial], z: Complex64) -> Complex64 {
    let zb = z.conj();
    terms
        .iter()
        .map(|t| t.coeff * z.powu(t.j) * zb.powu(t.k))
        .sum()
}

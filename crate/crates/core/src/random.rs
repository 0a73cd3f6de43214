//! Random bit-polynomial models.
//!
//! Every coefficient is drawn from its own ChaCha stream keyed by
//! `(seed, index, position)`, so a sample depends only on that triple.

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{coeff_bitsize, IntPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelKind {
    /// Coefficients uniform in `[-2^τ, 2^τ]`.
    Uniform,
    /// Uniform coefficients on the monomials in `support`, zero elsewhere.
    Support { support: Vec<usize> },
    /// Coefficient `i` uniform in `s_i · [1, 2^τ]`.
    Signs { signs: Vec<i8> },
    /// Coefficients of exact bitsize `τ`.
    ExactBits,
    /// `f + σ·g` with `g` drawn from `base`.
    Smoothed {
        base_poly: IntPolynomial,
        sigma: i64,
        base: Box<RandomModel>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomModel {
    pub degree: usize,
    pub tau: u64,
    #[serde(flatten)]
    pub kind: ModelKind,
}

/// `u(𝔣)`, either exact or an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uniformity {
    pub value: f64,
    pub is_bound: bool,
}

impl RandomModel {
    pub fn uniform(degree: usize, tau: u64) -> Result<Self> {
        RandomModel {
            degree,
            tau,
            kind: ModelKind::Uniform,
        }
        .validated()
    }

    pub fn support(degree: usize, tau: u64, mut support: Vec<usize>) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        RandomModel {
            degree,
            tau,
            kind: ModelKind::Support { support },
        }
        .validated()
    }

    pub fn signs(degree: usize, tau: u64, signs: Vec<i8>) -> Result<Self> {
        RandomModel {
            degree,
            tau,
            kind: ModelKind::Signs { signs },
        }
        .validated()
    }

    pub fn exact_bits(degree: usize, tau: u64) -> Result<Self> {
        RandomModel {
            degree,
            tau,
            kind: ModelKind::ExactBits,
        }
        .validated()
    }

    pub fn smoothed(base_poly: IntPolynomial, sigma: i64, base: RandomModel) -> Result<Self> {
        let (degree, tau) = (base.degree, base.tau);
        RandomModel {
            degree,
            tau,
            kind: ModelKind::Smoothed {
                base_poly,
                sigma,
                base: Box::new(base),
            },
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.degree;
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if d < 1 {
            return bad("degree must be at least 1".into());
        }
        match &self.kind {
            ModelKind::Uniform => {}
            ModelKind::Support { support } => {
                if let Some(&i) = support.iter().find(|&&i| i > d) {
                    return bad(format!("support index {i} exceeds degree {d}"));
                }
                for need in [0, 1, d - 1, d] {
                    if !support.contains(&need) {
                        return bad(format!("support must contain 0, 1, d-1, d; missing {need}"));
                    }
                }
            }
            ModelKind::Signs { signs } => {
                if signs.len() != d + 1 {
                    return bad(format!("expected {} signs, got {}", d + 1, signs.len()));
                }
                if signs.iter().any(|&s| s != 1 && s != -1) {
                    return bad("signs must be +1 or -1".into());
                }
            }
            ModelKind::ExactBits => {
                if self.tau < 1 {
                    return bad("exact bitsize needs tau >= 1".into());
                }
            }
            ModelKind::Smoothed {
                base_poly,
                sigma,
                base,
            } => {
                if *sigma == 0 {
                    return bad("sigma must be nonzero".into());
                }
                if base_poly.degree() > d {
                    return bad(format!(
                        "base polynomial degree {} exceeds {d}",
                        base_poly.degree()
                    ));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Short name used in reports.
    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Uniform => "uniform",
            ModelKind::Support { .. } => "support",
            ModelKind::Signs { .. } => "signs",
            ModelKind::ExactBits => "exactbits",
            ModelKind::Smoothed { .. } => "smoothed",
        }
    }

    /// Same model at another degree. Support and sign vectors cannot be
    /// resized and are rejected.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        match &self.kind {
            ModelKind::Uniform | ModelKind::ExactBits => RandomModel {
                degree,
                ..self.clone()
            }
            .validated(),
            _ if degree == self.degree => Ok(self.clone()),
            _ => Err(Error::InvalidModel(format!(
                "{} model has a fixed degree {}",
                self.name(),
                self.degree
            ))),
        }
    }

    /// `τ(𝔣)`: every sample has bitsize at most this.
    pub fn tau_bound(&self) -> u64 {
        match &self.kind {
            ModelKind::Smoothed {
                base_poly,
                sigma,
                base,
            } => {
                let tau_f = base_poly
                    .coeffs()
                    .iter()
                    .map(coeff_bitsize)
                    .max()
                    .unwrap_or(0);
                let tau_sigma = coeff_bitsize(&BigInt::from(*sigma));
                tau_f.max(base.tau_bound() + tau_sigma) + 1
            }
            _ => self.tau,
        }
    }

    /// `u(𝔣) = ln(w(𝔣)(1 + 2^{τ(𝔣)+1}))`.
    pub fn uniformity(&self) -> Uniformity {
        let exact = |value| Uniformity {
            value,
            is_bound: false,
        };
        match &self.kind {
            ModelKind::Uniform | ModelKind::Support { .. } => exact(0.0),
            // w = 2^{-τ}
            ModelKind::Signs { .. } | ModelKind::ExactBits => {
                exact((2.0 + 2f64.powi(-(self.tau as i32))).ln())
            }
            ModelKind::Smoothed {
                base_poly,
                sigma,
                base,
            } => {
                let tau_f = base_poly
                    .coeffs()
                    .iter()
                    .map(coeff_bitsize)
                    .max()
                    .unwrap_or(0) as f64;
                let tau_sigma = coeff_bitsize(&BigInt::from(*sigma)) as f64;
                let inner = base.uniformity();
                let value = 1.0 + (tau_f - base.tau_bound() as f64).max(tau_sigma) + inner.value;
                Uniformity {
                    value,
                    is_bound: true,
                }
            }
        }
    }

    /// The polynomial with the given `(seed, index)`.
    pub fn sample(&self, seed: u64, index: u64) -> IntPolynomial {
        IntPolynomial::new(self.sample_coeffs(seed, index))
    }

    fn sample_coeffs(&self, seed: u64, index: u64) -> Vec<BigInt> {
        let d = self.degree;
        let two_tau = BigInt::one() << self.tau;
        match &self.kind {
            ModelKind::Uniform => (0..=d)
                .map(|i| coeff_rng(seed, index, i).gen_bigint_range(&-&two_tau, &(&two_tau + 1)))
                .collect(),
            ModelKind::Support { support } => (0..=d)
                .map(|i| {
                    if support.binary_search(&i).is_ok() {
                        coeff_rng(seed, index, i).gen_bigint_range(&-&two_tau, &(&two_tau + 1))
                    } else {
                        BigInt::zero()
                    }
                })
                .collect(),
            ModelKind::Signs { signs } => (0..=d)
                .map(|i| {
                    let m =
                        coeff_rng(seed, index, i).gen_bigint_range(&BigInt::one(), &(&two_tau + 1));
                    if signs[i] < 0 {
                        -m
                    } else {
                        m
                    }
                })
                .collect(),
            ModelKind::ExactBits => {
                let low = BigInt::one() << (self.tau - 1);
                (0..=d)
                    .map(|i| {
                        let mut rng = coeff_rng(seed, index, i);
                        // 2^{τ-1} magnitudes times two signs, one draw
                        let k = rng.gen_bigint_range(&BigInt::zero(), &two_tau);
                        if k < low {
                            &low + k
                        } else {
                            -(&k)
                        }
                    })
                    .collect()
            }
            ModelKind::Smoothed {
                base_poly,
                sigma,
                base,
            } => {
                let g = base.sample_coeffs(seed, index);
                let sigma = BigInt::from(*sigma);
                (0..=d)
                    .map(|i| base_poly.coeff(i) + &sigma * &g[i])
                    .collect()
            }
        }
    }
}

fn coeff_rng(seed: u64, index: u64, position: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(position as u64);
    rng
}

//! Double-precision Aberth–Ehrlich root finder.
//!
//! Only used to validate exact results. Starting points follow the upper
//! convex hull of `(i, ln|f_i|)` so that each annulus of root moduli gets the
//! right number of initial guesses; outside the unit disk the iteration works
//! on the reversed polynomial to avoid overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::scaled_to_f64;
use crate::error::{Error, Result};
use crate::poly::{coeff_bitsize, IntPolynomial};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRootSet {
    pub roots: Vec<Complex64>,
    /// Largest `|f(z)| / Σ|f_i||z|^i` over the roots.
    pub residual_bound: f64,
}

impl ComplexRootSet {
    /// Roots with `|Im z| ≤ imag_tol` (real part returned), sorted.
    pub fn real_roots(&self, imag_tol: f64) -> Vec<f64> {
        let mut r: Vec<f64> = self
            .roots
            .iter()
            .filter(|z| z.im.abs() <= imag_tol)
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    /// Smallest pairwise distance, `+∞` for fewer than two roots.
    pub fn min_distance(&self) -> f64 {
        min_pairwise(&self.roots)
    }
}

pub(crate) fn min_pairwise(z: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            best = best.min((z[i] - z[j]).norm());
        }
    }
    best
}

/// All complex roots of the square-free part of `f`.
pub fn numeric_roots(f: &IntPolynomial, tol: f64) -> Result<ComplexRootSet> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() < 1 {
        return Err(Error::DegreeTooSmall {
            degree: f.degree(),
            min: 1,
        });
    }
    if !(tol >= 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} below 1e-12"
        )));
    }
    let g = f.square_free_part()?;
    let coeffs = f64_coeffs(&g);
    aberth(&coeffs, tol)
}

/// Coefficients as `f64`, rescaled by a power of two when they would overflow.
fn f64_coeffs(f: &IntPolynomial) -> Vec<f64> {
    let tau = f.coeffs().iter().map(coeff_bitsize).max().unwrap_or(0) as i64;
    let shift = (tau - 900).max(0);
    f.coeffs().iter().map(|c| scaled_to_f64(c, shift)).collect()
}

/// `p(z)` and `p'(z)` by Horner.
fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

fn abs_horner(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * r + ci.abs())
}

struct Poly<'a> {
    c: &'a [f64],
    rev: Vec<f64>,
}

impl Poly<'_> {
    fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Newton correction `p(z)/p'(z)`.
    fn newton(&self, z: Complex64) -> Complex64 {
        if z.norm() <= 1.0 {
            let (p, dp) = horner(self.c, z);
            p / dp
        } else {
            let w = z.inv();
            let (q, dq) = horner(&self.rev, w);
            let d = self.degree() as f64;
            (w * (d - w * dq / q)).inv()
        }
    }

    fn residual(&self, z: Complex64) -> f64 {
        let (p, scale) = if z.norm() <= 1.0 {
            (horner(self.c, z).0, abs_horner(self.c, z.norm()))
        } else {
            let w = z.inv();
            (horner(&self.rev, w).0, abs_horner(&self.rev, w.norm()))
        };
        if scale == 0.0 {
            0.0
        } else {
            p.norm() / scale
        }
    }
}

/// Starting points from the upper convex hull of `(i, ln|c_i|)`.
fn initial_points(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(i, x)| (i, x.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut z = Vec::with_capacity(d);
    // zero roots cannot occur after the square-free step except a simple one
    if hull[0].0 > 0 {
        z.push(Complex64::new(0.0, 0.0));
    }
    let tau = std::f64::consts::TAU;
    for w in hull.windows(2) {
        let (i, j) = (w[0].0, w[1].0);
        let k = j - i;
        let radius = ((w[0].1 - w[1].1) / k as f64).exp();
        for m in 0..k {
            let angle = tau * m as f64 / k as f64 + tau * i as f64 / d as f64 + 0.4;
            z.push(Complex64::from_polar(radius, angle));
        }
    }
    z
}

fn aberth(c: &[f64], tol: f64) -> Result<ComplexRootSet> {
    let d = c.len() - 1;
    let poly = Poly {
        c,
        rev: c.iter().rev().copied().collect(),
    };
    if d == 1 {
        let z = Complex64::new(-c[0] / c[1], 0.0);
        return Ok(ComplexRootSet {
            roots: vec![z],
            residual_bound: poly.residual(z),
        });
    }
    let mut z = initial_points(c);
    let mut done = vec![false; d];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && done.iter().any(|x| !x) {
        iterations += 1;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let n = poly.newton(z[k]);
            if !n.is_finite() {
                // exact hit on a root or a critical point
                if poly.residual(z[k]) == 0.0 {
                    done[k] = true;
                } else {
                    let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                    z[k] += nudge;
                }
                continue;
            }
            let s: Complex64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = n / (1.0 - n * s);
            if step.is_finite() {
                z[k] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * z[k].norm() || step.norm() < 1e-300 {
                    done[k] = true;
                }
            }
        }
    }
    let residual_bound = z.iter().map(|&x| poly.residual(x)).fold(0.0, f64::max);
    if !(residual_bound <= tol) {
        return Err(Error::NoConvergence {
            residual: residual_bound,
            tol,
            iterations,
        });
    }
    Ok(ComplexRootSet {
        roots: z,
        residual_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    /// Distance from each expected root to the closest computed root.
    fn matched_error(set: &ComplexRootSet, expected: &[Complex64]) -> f64 {
        assert_eq!(set.roots.len(), expected.len());
        let mut used = vec![false; expected.len()];
        let mut total = 0.0;
        for z in &set.roots {
            let (j, dist) = expected
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, e)| (j, (z - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[j] = true;
            total += dist;
        }
        total
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn examples() {
        let r = numeric_roots(&p(&[1, 0, 1]), DEFAULT_TOL).unwrap();
        assert!(matched_error(&r, &[Complex64::i(), -Complex64::i()]) < 1e-10);
        let r = numeric_roots(&p(&[-1, 0, 4]), DEFAULT_TOL).unwrap();
        assert!(matched_error(&r, &[re(0.5), re(-0.5)]) < 1e-10);
        let r = numeric_roots(&p(&[0, -1, 0, 1]), DEFAULT_TOL).unwrap();
        assert!(matched_error(&r, &[re(-1.0), re(0.0), re(1.0)]) < 1e-10);
        assert_eq!(r.real_roots(1e-9).len(), 3);
    }

    #[test]
    fn errors() {
        assert_eq!(
            numeric_roots(&IntPolynomial::zero(), DEFAULT_TOL),
            Err(Error::ZeroPolynomial)
        );
        assert!(numeric_roots(&p(&[3]), DEFAULT_TOL).is_err());
        assert!(numeric_roots(&p(&[0, 1]), 1e-13).is_err());
    }

    #[test]
    fn uses_square_free_part() {
        let f = p(&[-1, 2]).mul(&p(&[-1, 2])).mul(&p(&[1, 1]));
        let r = numeric_roots(&f, DEFAULT_TOL).unwrap();
        assert!(matched_error(&r, &[re(0.5), re(-1.0)]) < 1e-10);
    }

    #[test]
    fn known_rational_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..=10);
            let mut f = IntPolynomial::constant(1);
            let mut expected: Vec<Complex64> = Vec::new();
            while expected.len() < n {
                let (a, b) = (rng.gen_range(-40i64..=40), rng.gen_range(1i64..=16));
                let z = a as f64 / b as f64;
                if expected.iter().any(|e| (e.re - z).abs() < 1e-12) {
                    continue;
                }
                expected.push(re(z));
                f = f.mul(&p(&[-a, b]));
            }
            let r = numeric_roots(&f, DEFAULT_TOL).unwrap();
            assert!(matched_error(&r, &expected) <= 1e-8, "{f}");
        }
    }

    #[test]
    fn roots_of_unity_and_spread_moduli() {
        let r = numeric_roots(&p(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]), DEFAULT_TOL).unwrap();
        let expected: Vec<Complex64> = (0..8)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 8.0))
            .collect();
        assert!(matched_error(&r, &expected) < 1e-10);
        // roots 1e-6 and 1e6
        let f = p(&[-1, 1_000_000]).mul(&p(&[-1_000_000, 1]));
        let r = numeric_roots(&f, DEFAULT_TOL).unwrap();
        let mut x = r.real_roots(1e-6);
        x.sort_by(f64::total_cmp);
        assert!((x[0] - 1e-6).abs() < 1e-16 && (x[1] - 1e6).abs() < 1e-4);
    }

    #[test]
    fn random_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let d = rng.gen_range(1..=64);
            let c: Vec<i64> = (0..=d)
                .map(|_| rng.gen_range(-(1i64 << 32)..=(1i64 << 32)))
                .collect();
            let f = p(&c);
            if f.degree() < 1 {
                continue;
            }
            let r = numeric_roots(&f, DEFAULT_TOL).unwrap();
            assert_eq!(r.roots.len(), f.square_free_part().unwrap().degree());
            assert!(r.residual_bound <= DEFAULT_TOL);
            // Vieta: sum of roots = -f_{d-1}/f_d
            let g = f.square_free_part().unwrap().to_f64_coeffs();
            let n = g.len() - 1;
            let s: Complex64 = r.roots.iter().sum();
            let scale: f64 = r.roots.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
            assert!((s.re + g[n - 1] / g[n]).abs() <= 1e-8 * scale && s.im.abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn deterministic() {
        let f = p(&[3, -7, 0, 11, 5, -2, 9]);
        assert_eq!(
            numeric_roots(&f, DEFAULT_TOL).unwrap(),
            numeric_roots(&f, DEFAULT_TOL).unwrap()
        );
    }
}

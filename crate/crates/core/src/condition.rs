//! Local and global condition numbers on `I = [-1, 1]`.
//!
//! `cond(f, x) = ‖f‖₁ / max{|f(x)|, |f'(x)|/d}`. Its reciprocal `h` is
//! `d`-Lipschitz, which turns a finite set of exact evaluations into a
//! certified bracket for `cond_ℝ(f) = max_{x ∈ I} cond(f, x)`.
//!
//! The bracket starts on the uniform dyadic grid of spacing `2^{-ℓ} ≤ 1/(4d)`
//! and refines only the cells whose lower bound on `h` could still undercut
//! the best value seen. A cell is a grid point `x` with radius `r` equal to its
//! spacing; on `[x - r, x + r] ∩ I` we use the larger of the Lipschitz bound
//! `h(x) - d·r` and a second-order Taylor bound built from `|f(x)|`, `|f'(x)|`
//! and `max |f''|` over the cell.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{scaled_to_f64, Dyadic};
use crate::error::{Error, Result};
use crate::poly::{eval_numerator, IntPolynomial};

pub const DEFAULT_REL_TOL: f64 = 0.5;
pub const DEFAULT_MAX_GRID: usize = 1 << 22;

/// Deepest grid level; keeps grid numerators in `i64`.
const MAX_LEVEL: u32 = 60;

/// Certified bracket `lower ≤ cond_ℝ(f) ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondBracket {
    /// Largest `cond(f, x)` over the evaluated grid points.
    pub lower: f64,
    /// `+∞` when no finite certificate was reached.
    #[serde(with = "crate::condition::serde_inf")]
    pub upper: f64,
    /// Number of exact evaluations.
    pub grid_size: usize,
    /// Finest grid spacing used.
    pub delta: f64,
    /// Whether `upper / lower ≤ 1 + rel_tol` was reached (or `f` has a
    /// singular zero on a grid point, where both ends are `+∞`).
    pub achieved: bool,
}

impl CondBracket {
    pub fn is_finite(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn lg_upper(&self) -> f64 {
        self.upper.log2()
    }
}

/// Exact evaluation of `|f|` and `|f'|` at dyadic points, rounded to `f64`.
pub(crate) struct CondEvaluator {
    coeffs: Vec<BigInt>,
    deriv: Vec<BigInt>,
    degree: usize,
    norm: f64,
    abs_coeffs: Vec<f64>,
}

impl CondEvaluator {
    pub fn new(f: &IntPolynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(CondEvaluator {
            coeffs: f.coeffs().to_vec(),
            deriv: f.derivative().into_coeffs(),
            degree: f.degree(),
            norm: scaled_to_f64(&f.one_norm(), 0),
            abs_coeffs: f.to_f64_coeffs().iter().map(|c| c.abs()).collect(),
        })
    }

    /// `(|f(x)|, |f'(x)|)` for `x = n / 2^e`.
    pub fn abs_values(&self, n: &BigInt, e: u64) -> (f64, f64) {
        let d = self.degree as u64;
        let fv = eval_numerator(&self.coeffs, n, e);
        let fa = scaled_to_f64(&fv, (e * d) as i64).abs();
        let dfa = if self.deriv.is_empty() {
            0.0
        } else {
            let dv = eval_numerator(&self.deriv, n, e);
            scaled_to_f64(&dv, (e * (d - 1)) as i64).abs()
        };
        (fa, dfa)
    }

    /// `1 / cond(f, x)` from the absolute values.
    fn inv_cond(&self, fa: f64, dfa: f64) -> f64 {
        let scaled_d = if self.degree == 0 {
            0.0
        } else {
            dfa / self.degree as f64
        };
        fa.max(scaled_d) / self.norm
    }

    /// Upper bound of `|f''|` on `[-rho, rho]`.
    fn second_derivative_bound(&self, rho: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.abs_coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * rho + (i * (i - 1)) as f64 * c;
        }
        acc * (1.0 + 1e-12)
    }

    /// Lower bound of `h` on the cell of radius `r` around `x`.
    fn cell_lower_bound(&self, x: f64, r: f64, fa: f64, dfa: f64) -> f64 {
        let d = self.degree as f64;
        let h = self.inv_cond(fa, dfa);
        let lipschitz = h - d * r;
        if self.degree == 0 {
            return h;
        }
        let rho = (x.abs() + r).min(1.0);
        let m2 = self.second_derivative_bound(rho);
        let value_lb = fa - r * dfa - 0.5 * r * r * m2;
        let slope_lb = (dfa - r * m2) / d;
        let slack = 1e-12 * (fa + r * dfa + r * m2) / self.norm;
        let taylor = value_lb.max(slope_lb) / self.norm - slack;
        lipschitz.max(taylor)
    }
}

/// `cond(f, x)` for `x ∈ [-1, 1]`; `+∞` exactly when `f(x) = f'(x) = 0`.
pub fn local_cond(f: &IntPolynomial, x: &Dyadic) -> Result<f64> {
    let ev = CondEvaluator::new(f)?;
    if x.abs() > Dyadic::one() {
        return Err(Error::InvalidArgument(format!("point {x} outside [-1, 1]")));
    }
    let (fa, dfa) = ev.abs_values(x.num(), x.exp());
    Ok(1.0 / ev.inv_cond(fa, dfa))
}

#[derive(Clone, Copy)]
struct Cell {
    k: i64,
    level: u32,
    fa: f64,
    dfa: f64,
    h: f64,
    lb: f64,
}

impl Cell {
    fn x(&self) -> f64 {
        self.k as f64 / 2f64.powi(self.level as i32)
    }

    fn radius(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }
}

fn evaluate_cells(ev: &CondEvaluator, points: Vec<(i64, u32)>) -> Vec<Cell> {
    let eval = |&(k, level): &(i64, u32)| {
        let (fa, dfa) = ev.abs_values(&BigInt::from(k), level as u64);
        let h = ev.inv_cond(fa, dfa);
        let x = k as f64 / 2f64.powi(level as i32);
        let r = 2f64.powi(-(level as i32));
        let lb = ev.cell_lower_bound(x, r, fa, dfa);
        Cell {
            k,
            level,
            fa,
            dfa,
            h,
            lb,
        }
    };
    if points.len() >= 64 {
        points.par_iter().map(eval).collect()
    } else {
        points.iter().map(eval).collect()
    }
}

/// Certified bracket for `cond_ℝ(f)`, refined until `upper/lower ≤ 1 + rel_tol`
/// or `max_grid` evaluations are exhausted.
pub fn global_cond_bracket(
    f: &IntPolynomial,
    rel_tol: f64,
    max_grid: usize,
) -> Result<CondBracket> {
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    let ev = CondEvaluator::new(f)?;
    let d = ev.degree.max(1) as u64;
    let level0 = (4 * d).next_power_of_two().trailing_zeros();
    let half = 1i64 << level0;
    let mut cells = evaluate_cells(&ev, (-half..=half).map(|k| (k, level0)).collect());
    let mut grid_size = cells.len();
    let mut finest = level0;

    let singular = |grid_size: usize, finest: u32| CondBracket {
        lower: f64::INFINITY,
        upper: f64::INFINITY,
        grid_size,
        delta: 2f64.powi(-(finest as i32)),
        achieved: true,
    };

    loop {
        let best = cells.iter().map(|c| c.h).fold(f64::INFINITY, f64::min);
        if best == 0.0 {
            return Ok(singular(grid_size, finest));
        }
        let lb_min = cells.iter().map(|c| c.lb).fold(f64::INFINITY, f64::min);
        let upper = if lb_min > 0.0 {
            1.0 / lb_min
        } else {
            f64::INFINITY
        };
        let bracket = |achieved| CondBracket {
            lower: 1.0 / best,
            upper,
            grid_size,
            delta: 2f64.powi(-(finest as i32)),
            achieved,
        };
        let target = best / (1.0 + rel_tol);
        if lb_min >= target {
            return Ok(bracket(true));
        }
        let (refine, keep): (Vec<Cell>, Vec<Cell>) = cells.into_iter().partition(|c| c.lb < target);
        let mut new_points = Vec::with_capacity(2 * refine.len());
        for c in &refine {
            let level = c.level + 1;
            for k in [2 * c.k - 1, 2 * c.k + 1] {
                if k.unsigned_abs() <= 1u64 << level {
                    new_points.push((k, level));
                }
            }
        }
        let deepest = refine.iter().map(|c| c.level).max().unwrap_or(finest);
        if grid_size + new_points.len() > max_grid || deepest >= MAX_LEVEL {
            return Ok(bracket(false));
        }
        grid_size += new_points.len();
        finest = finest.max(deepest + 1);
        cells = keep;
        // the old centers keep their values with half the radius
        for c in refine {
            let level = c.level + 1;
            let k = 2 * c.k;
            let lb = ev.cell_lower_bound(c.x(), c.radius() / 2.0, c.fa, c.dfa);
            cells.push(Cell { k, level, lb, ..c });
        }
        cells.extend(evaluate_cells(&ev, new_points));
    }
}

/// `Δ^ℝ_ε(f) ≥ 1/(12 d U)` for `ε = 1/(e d U)`, where `U` bounds `cond_ℝ(f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationBound {
    pub bound: f64,
    pub eps: f64,
}

pub fn separation_lower_bound(degree: usize, bracket: &CondBracket) -> Result<SeparationBound> {
    if !bracket.upper.is_finite() {
        return Err(Error::UnboundedCondition);
    }
    let du = degree.max(1) as f64 * bracket.upper;
    Ok(SeparationBound {
        bound: 1.0 / (12.0 * du),
        eps: 1.0 / (std::f64::consts::E * du),
    })
}

/// Convenience wrapper: bracket with the default tolerances, then the bound.
pub fn separation_lower_bound_for(f: &IntPolynomial) -> Result<SeparationBound> {
    let b = global_cond_bracket(f, DEFAULT_REL_TOL, DEFAULT_MAX_GRID)?;
    separation_lower_bound(f.degree(), &b)
}

/// Serializes non-finite floats as `null`.
pub(crate) mod serde_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

//! The Descartes subdivision solver.
//!
//! Each pending node carries `g_J`, the image of `f` on `J = (a, b)` rescaled to
//! `(0, 1)`: `g_J(y) ∝ f(a + (b - a) y)` with integer coefficients. The sign
//! variation bound of the node is `var(T_1(R(g_J)))`; children are
//! `g_L = H_1(g_J)` and `g_R = T_1(g_L)`, and `g_R(0) = 0` exactly when `f`
//! vanishes at the midpoint.

use std::collections::VecDeque;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicInterval};
use crate::error::Result;
use crate::poly::{sign_variations, taylor_shift_in_place, IntPolynomial};

/// One visited node of the subdivision tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub interval: DyadicInterval,
    pub depth: usize,
    pub var: usize,
    /// Index of the parent in [`SubdivisionTrace::var_per_node`].
    pub parent: Option<usize>,
}

/// Size statistics of one subdivision tree, nodes listed in FIFO visiting order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionTrace {
    pub node_count: usize,
    pub depth: usize,
    pub width_per_depth: Vec<usize>,
    #[serde(skip)]
    pub var_per_node: Vec<NodeRecord>,
    #[serde(skip)]
    pub wall_time: f64,
    /// The square-free polynomial the tree was built for.
    pub square_free: IntPolynomial,
}

impl SubdivisionTrace {
    pub fn max_width(&self) -> usize {
        self.width_per_depth.iter().copied().max().unwrap_or(0)
    }

    /// Sum of `var` over the nodes at each depth.
    pub fn var_sum_per_depth(&self) -> Vec<usize> {
        let mut sums = vec![0; self.width_per_depth.len()];
        for n in &self.var_per_node {
            sums[n.depth] += n.var;
        }
        sums
    }

    /// Children indices of every node, in visiting order.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.var_per_node.len()];
        for (i, n) in self.var_per_node.iter().enumerate() {
            if let Some(p) = n.parent {
                out[p].push(i);
            }
        }
        out
    }
}

/// An isolating interval. When `inverted` is set the root lies in
/// `{1/y : y ∈ (lo, hi)}`, an interval of `(-∞, -1) ∪ (1, ∞)`; the pre-image
/// never straddles 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolatingInterval {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub inverted: bool,
}

impl IsolatingInterval {
    /// Outward-rounded `f64` bounds of the real interval, for display.
    /// Endpoints exactly representable in `f64` are returned unchanged.
    pub fn approx_bounds(&self) -> (f64, f64) {
        if !self.inverted {
            return (round_down(&self.lo), round_up(&self.hi));
        }
        // 1/x is exact only for powers of two
        let recip = |x: &Dyadic, toward_pos: bool| -> f64 {
            if x.is_zero() {
                return if toward_pos {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                };
            }
            let r = 1.0 / x.to_f64();
            let exact = fits_f64(x) && x.num().magnitude().bits() == 1;
            match (exact, toward_pos) {
                (true, _) => r,
                (false, true) => r.next_up(),
                (false, false) => r.next_down(),
            }
        };
        (recip(&self.hi, false), recip(&self.lo, true))
    }
}

fn fits_f64(x: &Dyadic) -> bool {
    x.num().bits() <= 53 && x.exp() <= 1000
}

fn round_down(x: &Dyadic) -> f64 {
    let v = x.to_f64();
    if fits_f64(x) {
        v
    } else {
        v.next_down()
    }
}

fn round_up(x: &Dyadic) -> f64 {
    let v = x.to_f64();
    if fits_f64(x) {
        v
    } else {
        v.next_up()
    }
}

/// A root found exactly at a subdivision point or at `±1`. When `inverted` is
/// set the root is `1 / value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRoot {
    #[serde(flatten)]
    pub value: Dyadic,
    pub inverted: bool,
}

impl ExactRoot {
    pub fn approx(&self) -> f64 {
        if self.inverted {
            1.0 / self.value.to_f64()
        } else {
            self.value.to_f64()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationResult {
    pub intervals: Vec<IsolatingInterval>,
    pub exact_roots: Vec<ExactRoot>,
    pub trace: SubdivisionTrace,
    /// Trees for `(-1, 0)` and `(0, 1)` of the reciprocal polynomial, present
    /// for [`isolate_all`] when the degree is positive.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub outer_traces: Vec<SubdivisionTrace>,
}

impl IsolationResult {
    pub fn root_count(&self) -> usize {
        self.intervals.len() + self.exact_roots.len()
    }
}

/// Isolates the real roots of `f` in `(-1, 1)`.
pub fn isolate_unit(f: &IntPolynomial) -> Result<IsolationResult> {
    let sqf = f.square_free_part()?;
    let run = descartes(&sqf, DyadicInterval::unit());
    Ok(IsolationResult {
        intervals: run.intervals.into_iter().map(|j| plain(j, false)).collect(),
        exact_roots: run
            .exact
            .into_iter()
            .map(|value| ExactRoot {
                value,
                inverted: false,
            })
            .collect(),
        trace: run.trace,
        outer_traces: Vec::new(),
    })
}

/// Isolates all real roots of `f`: `(-1, 1)` directly, `±1` by exact
/// evaluation, and `|x| > 1` through the reciprocal polynomial on `(-1, 0)`
/// and `(0, 1)`. Results are ordered along the real line.
pub fn isolate_all(f: &IntPolynomial) -> Result<IsolationResult> {
    let mut res = isolate_unit(f)?;
    let sqf = res.trace.square_free.clone();
    for e in [-1i64, 1] {
        let x = Dyadic::from(e);
        if sqf.evaluate(&x).is_zero() {
            res.exact_roots.push(ExactRoot {
                value: x,
                inverted: false,
            });
        }
    }
    let g = sqf.reciprocal();
    if g.degree() > 0 {
        let halves = DyadicInterval::unit().split();
        for half in [halves.0, halves.1] {
            let run = descartes(&g, half);
            res.intervals
                .extend(run.intervals.into_iter().map(|j| plain(j, true)));
            res.exact_roots
                .extend(run.exact.into_iter().map(invert_exact));
            res.outer_traces.push(run.trace);
        }
    }
    res.intervals.sort_by(|a, b| {
        let (al, ah) = a.approx_bounds();
        let (bl, bh) = b.approx_bounds();
        al.total_cmp(&bl).then(ah.total_cmp(&bh))
    });
    res.exact_roots
        .sort_by(|a, b| a.approx().total_cmp(&b.approx()));
    Ok(res)
}

fn plain(j: DyadicInterval, inverted: bool) -> IsolatingInterval {
    IsolatingInterval {
        lo: j.lo().clone(),
        hi: j.hi().clone(),
        inverted,
    }
}

/// `1 / m` stays dyadic when the numerator of `m` is `±1`.
fn invert_exact(m: Dyadic) -> ExactRoot {
    if m.num().magnitude().is_one() {
        let value = Dyadic::from_int(m.num().clone() << m.exp() as usize);
        ExactRoot {
            value,
            inverted: false,
        }
    } else {
        ExactRoot {
            value: m,
            inverted: true,
        }
    }
}

pub(crate) struct Run {
    pub intervals: Vec<DyadicInterval>,
    pub exact: Vec<Dyadic>,
    pub trace: SubdivisionTrace,
}

/// Integer coefficients of `2^{ed} f(a + (b - a) y)`, length `deg f + 1`.
pub(crate) fn unit_image(f: &IntPolynomial, j: &DyadicInterval) -> Vec<BigInt> {
    let e = j.lo().exp().max(j.hi().exp());
    let a = j.lo().num_at(e);
    let w = j.hi().num_at(e) - &a;
    let mut g = f
        .homothety(e as i64)
        .taylor_shift(&a)
        .scale_variable(&w)
        .into_coeffs();
    g.resize(f.degree() + 1, BigInt::zero());
    g
}

/// `var(T_1(R(g)))`.
pub(crate) fn image_var(g: &[BigInt]) -> usize {
    let mut r: Vec<BigInt> = g.iter().rev().cloned().collect();
    taylor_shift_in_place(&mut r, &BigInt::one());
    sign_variations(&r)
}

/// `H_1` in place, followed by removal of the common power of two.
fn halve_in_place(g: &mut [BigInt]) {
    let d = g.len() - 1;
    for (i, c) in g.iter_mut().enumerate() {
        if !c.is_zero() {
            *c <<= d - i;
        }
    }
    let tz = g
        .iter()
        .filter_map(|c| c.trailing_zeros())
        .min()
        .unwrap_or(0);
    if tz > 0 {
        for c in g.iter_mut() {
            *c >>= tz;
        }
    }
}

/// Algorithm core: FIFO subdivision of `start` for a square-free `f`.
pub(crate) fn descartes(f: &IntPolynomial, start: DyadicInterval) -> Run {
    let t0 = Instant::now();
    let mut intervals = Vec::new();
    let mut exact = Vec::new();
    let mut nodes: Vec<NodeRecord> = Vec::new();
    let mut width: Vec<usize> = Vec::new();

    let mut queue = VecDeque::new();
    let g0 = unit_image(f, &start);
    queue.push_back((start, g0, 0usize, None));

    while let Some((j, g, depth, parent)) = queue.pop_front() {
        let v = image_var(&g);
        let idx = nodes.len();
        nodes.push(NodeRecord {
            interval: j.clone(),
            depth,
            var: v,
            parent,
        });
        if width.len() <= depth {
            width.resize(depth + 1, 0);
        }
        width[depth] += 1;
        match v {
            0 => {}
            1 => intervals.push(j),
            _ => {
                let (jl, jr) = j.split();
                let mut gl = g;
                halve_in_place(&mut gl);
                let mut gr = gl.clone();
                taylor_shift_in_place(&mut gr, &BigInt::one());
                if gr[0].is_zero() {
                    exact.push(jl.hi().clone());
                }
                queue.push_back((jl, gl, depth + 1, Some(idx)));
                queue.push_back((jr, gr, depth + 1, Some(idx)));
            }
        }
    }

    let trace = SubdivisionTrace {
        node_count: nodes.len(),
        depth: width.len() - 1,
        width_per_depth: width,
        var_per_node: nodes,
        wall_time: t0.elapsed().as_secs_f64(),
        square_free: f.clone(),
    };
    Run {
        intervals,
        exact,
        trace,
    }
}

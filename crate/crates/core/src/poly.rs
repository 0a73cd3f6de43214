//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{Dyadic, DyadicInterval};
use crate::error::{Error, Result};

/// `f = Σ f_i X^i`, stored low degree first with trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The monomial `X`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Exact value at a dyadic point.
    pub fn evaluate(&self, x: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        let num = eval_numerator(&self.coeffs, x.num(), x.exp());
        Dyadic::new(num, x.exp() * self.degree() as u64)
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `‖f‖₁ = Σ |f_i|`.
    pub fn one_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Smallest `τ` with `|f_i| ≤ 2^τ` for every coefficient.
    pub fn bitsize(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.coeffs.iter().map(coeff_bitsize).max().unwrap_or(0))
    }

    /// `R(f) = X^d f(1/X)`; the degree drops by the multiplicity of 0 as a root.
    pub fn reciprocal(&self) -> IntPolynomial {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPolynomial::new(c)
    }

    /// `H_k(f) = 2^{dk} f(X / 2^k)`; for negative `k` this is `f(2^{|k|} X)`,
    /// which equals `R ∘ H_{|k|} ∘ R`. Roots are multiplied by `2^k`.
    pub fn homothety(&self, k: i64) -> IntPolynomial {
        let d = self.degree();
        let k_abs = k.unsigned_abs() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = if k >= 0 { k_abs * (d - i) } else { k_abs * i };
                c << e
            })
            .collect();
        IntPolynomial::new(coeffs)
    }

    /// `T_c(f) = f(X + c)`.
    pub fn taylor_shift(&self, c: &BigInt) -> IntPolynomial {
        let mut a = self.coeffs.clone();
        taylor_shift_in_place(&mut a, c);
        IntPolynomial::new(a)
    }

    /// `f(c X)`.
    pub fn scale_variable(&self, c: &BigInt) -> IntPolynomial {
        let mut p = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for f in &self.coeffs {
            out.push(f * &p);
            p *= c;
        }
        IntPolynomial::new(out)
    }

    /// Sign changes in `(f_0, …, f_d)` after deleting zeros.
    pub fn var_count(&self) -> usize {
        sign_variations(&self.coeffs)
    }

    /// `var((X+1)^d f((aX + b)/(X + 1)))` for `J = (a, b)`.
    ///
    /// Computed as `T_1(R(G))` with `G(y) = 2^{ed} f(a + (b-a) y)`, where `2^e`
    /// is the common denominator of the endpoints; the positive factor does not
    /// change signs.
    pub fn var_in_interval(&self, j: &DyadicInterval) -> usize {
        if self.is_zero() {
            return 0;
        }
        let e = j.lo().exp().max(j.hi().exp());
        let a = j.lo().num_at(e);
        let w = j.hi().num_at(e) - &a;
        let g = self.homothety(e as i64).taylor_shift(&a).scale_variable(&w);
        // reverse over the full length d+1 so the degree is kept
        let mut c = g.coeffs;
        c.resize(self.degree() + 1, BigInt::zero());
        c.reverse();
        taylor_shift_in_place(&mut c, &BigInt::one());
        sign_variations(&c)
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|f| f * c).collect())
    }

    /// Coefficients rounded to `f64`.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| crate::dyadic::scaled_to_f64(c, 0))
            .collect()
    }
}

/// `⌈lg |c|⌉`, with 0 for `|c| ≤ 1`.
pub(crate) fn coeff_bitsize(c: &BigInt) -> u64 {
    let m = c.magnitude();
    if m.bits() <= 1 {
        return 0;
    }
    let bits = m.bits();
    if m.trailing_zeros() == Some(bits - 1) {
        bits - 1
    } else {
        bits
    }
}

/// `Σ c_i n^i 2^{e(d-i)}` for `d = c.len() - 1`, i.e. `2^{ed} f(n / 2^e)`.
pub(crate) fn eval_numerator(c: &[BigInt], n: &BigInt, e: u64) -> BigInt {
    let Some((top, rest)) = c.split_last() else {
        return BigInt::zero();
    };
    let mut acc = top.clone();
    for (k, ci) in rest.iter().rev().enumerate() {
        acc *= n;
        if !ci.is_zero() {
            acc += ci << ((k as u64 + 1) * e) as usize;
        }
    }
    acc
}

pub(crate) fn sign_variations(c: &[BigInt]) -> usize {
    let mut last = Sign::NoSign;
    let mut count = 0;
    for s in c.iter().map(BigInt::sign) {
        if s == Sign::NoSign {
            continue;
        }
        if last != Sign::NoSign && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// In-place `f(X + c)` by repeated synthetic division, `O(d²)` additions.
pub(crate) fn taylor_shift_in_place(a: &mut [BigInt], c: &BigInt) {
    let n = a.len();
    if n < 2 || c.is_zero() {
        return;
    }
    let unit = if c.is_one() {
        Some(true)
    } else if (-c).is_one() {
        Some(false)
    } else {
        None
    };
    for i in 0..n - 1 {
        for j in (i..n - 1).rev() {
            let (lo, hi) = a.split_at_mut(j + 1);
            let next = &hi[0];
            if next.is_zero() {
                continue;
            }
            match unit {
                Some(true) => lo[j] += next,
                Some(false) => lo[j] -= next,
                None => lo[j] += next * c,
            }
        }
    }
}

impl fmt::Display for IntPolynomial {
    /// Text form: `c_0 c_1 … c_d`; the zero polynomial prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_line(s, 1)
    }
}

fn parse_line(s: &str, line: usize) -> Result<IntPolynomial> {
    let coeffs = s
        .split_whitespace()
        .map(|tok| {
            BigInt::from_str(tok).map_err(|_| Error::Parse {
                line,
                msg: format!("invalid integer coefficient {tok:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        return Err(Error::Parse {
            line,
            msg: "no coefficients".into(),
        });
    }
    Ok(IntPolynomial::new(coeffs))
}

/// Parses the one-polynomial-per-line text format; blank lines and lines
/// starting with `#` are skipped. Errors carry the 1-based line number.
pub fn parse_polynomials(text: &str) -> Result<Vec<IntPolynomial>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<String>,
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolyRepr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|c| BigInt::from_str(c).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

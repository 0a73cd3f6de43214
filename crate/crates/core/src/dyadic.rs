//! Exact binary rationals `num / 2^exp` and open intervals with dyadic endpoints.
//!
//! Every endpoint produced by bisecting `(-1, 1)` and every disk center of the
//! root-count cover is dyadic, so this is the only number type the exact parts
//! of the crate need.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The value `num / 2^exp`, kept normalized: `exp == 0` or `num` is odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        let mut num = num.into();
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        if tz > 0 {
            num >>= tz;
        }
        Dyadic { num, exp: exp - tz }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic {
            num: n.into(),
            exp: 0,
        }
    }

    /// Nearest dyadic to `x` with at most `bits` fractional bits (round to nearest).
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "cannot convert non-finite value to a dyadic");
        let scaled = (x * 2f64.powi(bits as i32)).round();
        let num = BigInt::from(scaled as i128);
        Dyadic::new(num, bits as u64)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// `self / 2^k`.
    pub fn shr(&self, k: u64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            num: self.num.clone(),
            exp: self.exp + k,
        }
    }

    /// `self * 2^k`.
    pub fn shl(&self, k: u64) -> Dyadic {
        let drop = k.min(self.exp);
        let num = &self.num << (k - drop) as usize;
        Dyadic::new(num, self.exp - drop)
    }

    /// Numerator after rescaling to denominator `2^exp` (requires `exp >= self.exp`).
    pub(crate) fn num_at(&self, exp: u64) -> BigInt {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp) as usize
    }

    /// Closest `f64`; exact when the value is representable.
    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.num, self.exp as i64)
    }
}

/// `num / 2^shift` as an `f64`, without overflowing on huge numerators.
pub(crate) fn scaled_to_f64(num: &BigInt, shift: i64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let bits = num.bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (num >> drop as usize).to_f64().unwrap_or(f64::NAN);
    ldexp(top, drop - shift)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.num_at(e).cmp(&other.num_at(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.num_at(e) + rhs.num_at(e), e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.num_at(e) - rhs.num_at(e), e)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `num/2^exp` or a plain integer.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a dyadic: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            None => BigInt::from_str(s).map(Dyadic::from_int).map_err(|_| bad()),
            Some((n, d)) => {
                let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let e = d.trim().strip_prefix("2^").ok_or_else(bad)?;
                let exp = e.parse::<u64>().map_err(|_| bad())?;
                Ok(Dyadic::new(num, exp))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    num: String,
    exp: u64,
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DyadicRepr {
            num: self.num.to_string(),
            exp: self.exp,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = DyadicRepr::deserialize(d)?;
        let num = BigInt::from_str(&r.num).map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(num, r.exp))
    }
}

/// Open interval `(lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo >= hi {
            return Err(Error::EmptyInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(DyadicInterval { lo, hi })
    }

    /// The interval `(-1, 1)`.
    pub fn unit() -> Self {
        DyadicInterval {
            lo: Dyadic::from(-1),
            hi: Dyadic::one(),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Dyadic {
        (&self.lo + &self.hi).shr(1)
    }

    /// The open halves `(lo, mid)` and `(mid, hi)`.
    pub fn split(&self) -> (DyadicInterval, DyadicInterval) {
        let m = self.midpoint();
        (
            DyadicInterval {
                lo: self.lo.clone(),
                hi: m.clone(),
            },
            DyadicInterval {
                lo: m,
                hi: self.hi.clone(),
            },
        )
    }

    /// Strict membership.
    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo < x && x < &self.hi
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

//! Content, gcd and square-free part over `ℤ[X]`.
//!
//! The gcd is the primitive remainder sequence: pseudo-remainders with the
//! content divided out at every step, so coefficient growth stays bounded by
//! the size of the true gcd's cofactors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// Mersenne prime used for the modular square-freeness certificate.
const CERT_PRIME: u64 = (1 << 61) - 1;

impl IntPolynomial {
    /// Gcd of the coefficients, non-negative; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `f / content(f)` with a positive leading coefficient.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        IntPolynomial::new(self.coeffs().iter().map(|x| x / &c).collect())
    }

    /// `lc(b)^{deg a - deg b + 1} · a mod b`.
    pub fn pseudo_rem(&self, b: &IntPolynomial) -> IntPolynomial {
        assert!(!b.is_zero(), "pseudo-remainder by the zero polynomial");
        let db = b.degree();
        let lb = b.leading_coeff();
        let mut r: Vec<BigInt> = self.coeffs().to_vec();
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for x in r.iter_mut() {
                *x *= &lb;
            }
            let off = dr - db;
            for (i, bc) in b.coeffs().iter().enumerate() {
                r[off + i] -= &lr * bc;
            }
            debug_assert!(r[dr].is_zero());
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPolynomial::new(r)
    }

    /// Exact quotient `self / divisor`; `None` unless the division is exact in `ℤ[X]`.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(IntPolynomial::zero());
        }
        let dd = divisor.degree();
        if self.degree() < dd {
            return None;
        }
        let ld = divisor.leading_coeff();
        let mut r = self.coeffs().to_vec();
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + dd];
            let (qk, rem) = top.div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (i, c) in divisor.coeffs().iter().enumerate() {
                r[k + i] -= &qk * c;
            }
            q[k] = qk;
        }
        if r.iter().all(Zero::is_zero) {
            Some(IntPolynomial::new(q))
        } else {
            None
        }
    }

    /// Greatest common divisor, primitive with positive leading coefficient
    /// times the gcd of the contents.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return other.normalized_sign();
        }
        if other.is_zero() {
            return self.normalized_sign();
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&c)
    }

    fn normalized_sign(&self) -> IntPolynomial {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Primitive square-free part `f / gcd(f, f')` with positive leading coefficient.
    ///
    /// Has the same real (and complex) roots as `f`, each simple.
    pub fn square_free_part(&self) -> Result<IntPolynomial> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == 0 {
            return Ok(IntPolynomial::constant(1));
        }
        if certified_square_free_mod_p(self, CERT_PRIME) {
            return Ok(self.primitive_part());
        }
        let g = self.gcd(&self.derivative());
        let q = self
            .div_exact(&g)
            .expect("gcd(f, f') divides f exactly in Z[X]");
        Ok(q.primitive_part())
    }

    pub fn is_square_free(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.degree() == 0
            || certified_square_free_mod_p(self, CERT_PRIME)
            || self.gcd(&self.derivative()).degree() == 0
    }
}

/// True when `gcd(f mod p, f' mod p) = 1` and `p ∤ lc(f)`, which certifies that
/// `f` is square-free over `ℚ`: a nontrivial integer gcd would keep its degree
/// modulo `p`.
fn certified_square_free_mod_p(f: &IntPolynomial, p: u64) -> bool {
    let d = f.degree();
    if (d as u64) >= p {
        return false;
    }
    let big_p = BigInt::from(p);
    let reduce = |c: &BigInt| c.mod_floor(&big_p).to_u64().unwrap();
    let fp: Vec<u64> = f.coeffs().iter().map(reduce).collect();
    if fp[d] == 0 {
        return false;
    }
    let dfp: Vec<u64> = (1..=d).map(|i| mul_mod(fp[i], i as u64, p)).collect();
    poly_gcd_degree_mod(fp, dfp, p) == 0
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Degree of the gcd over `𝔽_p` (Euclid with monic remainders).
fn poly_gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    trim_mod(&mut a);
    trim_mod(&mut b);
    while !b.is_empty() {
        let inv = pow_mod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let lead = mul_mod(*a.last().unwrap(), inv, p);
            let off = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                let t = mul_mod(lead, bc, p);
                a[off + i] = (a[off + i] + p - t) % p;
            }
            trim_mod(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

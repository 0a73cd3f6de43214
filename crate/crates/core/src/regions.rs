//! The dyadic disk cover `Ω_d` of `[-1, 1]`, the root-count bound over it,
//! Obreshkoff discs of an interval, and the `ε`-real separation.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicInterval};
use crate::error::{Error, Result};
use crate::oracle::{min_pairwise, numeric_roots, ComplexRootSet, DEFAULT_TOL};
use crate::poly::{eval_numerator, IntPolynomial};

/// Boundary margin for membership tests on oracle roots.
pub const MEMBERSHIP_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Dyadic,
    pub radius: Dyadic,
}

impl Disk {
    pub fn membership(&self, z: Complex64, margin: f64) -> Membership {
        let dist = (z - Complex64::new(self.center.to_f64(), 0.0)).norm();
        classify(dist, self.radius.to_f64(), margin)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Outside,
    Ambiguous,
}

fn classify(dist: f64, radius: f64, margin: f64) -> Membership {
    if dist < radius - margin {
        Membership::Inside
    } else if dist > radius + margin {
        Membership::Outside
    } else {
        Membership::Ambiguous
    }
}

/// Membership in a union: inside if inside any part, outside if outside all.
fn union_membership(parts: impl Iterator<Item = Membership>) -> Membership {
    let mut result = Membership::Outside;
    for m in parts {
        match m {
            Membership::Inside => return Membership::Inside,
            Membership::Ambiguous => result = Membership::Ambiguous,
            Membership::Outside => {}
        }
    }
    result
}

/// Membership in an intersection: outside if outside any part.
fn intersection_membership(parts: impl Iterator<Item = Membership>) -> Membership {
    let mut result = Membership::Inside;
    for m in parts {
        match m {
            Membership::Outside => return Membership::Outside,
            Membership::Ambiguous => result = Membership::Ambiguous,
            Membership::Inside => {}
        }
    }
    result
}

/// Disks `𝔻(ξ_n, ρ_n)` for `n = -N..=N`, `N = ⌈lg d⌉`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskFamily {
    pub n_max: u32,
    pub disks: Vec<Disk>,
}

impl DiskFamily {
    pub fn disk(&self, n: i32) -> &Disk {
        &self.disks[(n + self.n_max as i32) as usize]
    }

    /// Membership in the open union `Ω_d`.
    pub fn membership(&self, z: Complex64, margin: f64) -> Membership {
        union_membership(self.disks.iter().map(|disk| disk.membership(z, margin)))
    }

    /// Counts roots in `Ω_d` as a range; boundary-ambiguous roots widen it.
    pub fn count(&self, roots: &[Complex64], margin: f64) -> CountRange {
        let mut range = CountRange { min: 0, max: 0 };
        for &z in roots {
            match self.membership(z, margin) {
                Membership::Inside => {
                    range.min += 1;
                    range.max += 1;
                }
                Membership::Ambiguous => range.max += 1,
                Membership::Outside => {}
            }
        }
        range
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

pub(crate) fn ceil_lg(d: usize) -> u32 {
    d.next_power_of_two().trailing_zeros()
}

pub fn disk_family(d: usize) -> Result<DiskFamily> {
    if d < 2 {
        return Err(Error::DegreeTooSmall { degree: d, min: 2 });
    }
    let n_max = ceil_lg(d);
    let big_n = n_max as i32;
    let disks = (-big_n..=big_n)
        .map(|n| {
            let k = n.unsigned_abs() as u64;
            let (center, radius) = if n.unsigned_abs() < n_max {
                // 1 - 3/2^{k+2}, 3/2^{k+3}
                (Dyadic::one() - Dyadic::new(3, k + 2), Dyadic::new(3, k + 3))
            } else {
                (Dyadic::one() - Dyadic::new(1, k), Dyadic::new(3, k + 1))
            };
            let center = if n < 0 {
                -center
            } else if n == 0 {
                Dyadic::zero()
            } else {
                center
            };
            Disk { center, radius }
        })
        .collect();
    Ok(DiskFamily { n_max, disks })
}

/// `lg |n|` for a nonzero big integer.
pub(crate) fn lg_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 60 {
        return (crate::dyadic::scaled_to_f64(n, 0)).abs().log2();
    }
    let top = crate::dyadic::scaled_to_f64(&(n >> (bits - 60)), 0).abs();
    top.log2() + (bits - 60) as f64
}

/// `Σ_n lg(e‖f‖₁/|f(ξ_n)|)`, an upper bound on the number of roots in `Ω_d`.
pub fn rho_upper_bound(f: &IntPolynomial) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = f.degree();
    let family = disk_family(d)?;
    let lg_norm = lg_big(&f.one_norm()) + std::f64::consts::LOG2_E;
    let mut total = 0.0;
    for disk in &family.disks {
        let xi = &disk.center;
        let v = eval_numerator(f.coeffs(), xi.num(), xi.exp());
        if v.bits() == 0 {
            return Ok(f64::INFINITY);
        }
        let lg_value = lg_big(&v) - (xi.exp() * d as u64) as f64;
        total += lg_norm - lg_value;
    }
    Ok(total)
}

/// Oracle count of roots of `f` in `Ω_d`.
pub fn count_roots_in_omega(f: &IntPolynomial) -> Result<CountRange> {
    let family = disk_family(f.degree())?;
    let roots = numeric_roots(f, DEFAULT_TOL)?;
    Ok(family.count(&roots.roots, MEMBERSHIP_MARGIN))
}

/// The two Obreshkoff discs of `J` for parameter `ϱ`: centers at
/// `mid(J) ± i·center_offset`, both passing through the endpoints of `J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObreshkoffPair {
    pub interval: DyadicInterval,
    pub rho: usize,
    pub center_offset: f64,
    pub radius: f64,
}

pub fn obreshkoff_discs(j: &DyadicInterval, rho: usize) -> ObreshkoffPair {
    let w = j.width().to_f64();
    let phi = std::f64::consts::PI / (rho as f64 + 2.0);
    let center_offset = if rho == 0 { 0.0 } else { 0.5 * w / phi.tan() };
    ObreshkoffPair {
        interval: j.clone(),
        rho,
        center_offset,
        radius: 0.5 * w / phi.sin(),
    }
}

impl ObreshkoffPair {
    pub fn centers(&self) -> [Complex64; 2] {
        let m = self.interval.midpoint().to_f64();
        [
            Complex64::new(m, self.center_offset),
            Complex64::new(m, -self.center_offset),
        ]
    }

    fn disc_memberships(&self, p: Complex64, margin: f64) -> impl Iterator<Item = Membership> + '_ {
        let r = self.radius;
        self.centers()
            .into_iter()
            .map(move |c| classify((p - c).norm(), r, margin * r.max(1.0)))
    }

    /// Membership in the area (union of the open discs).
    pub fn area_membership(&self, p: Complex64, margin: f64) -> Membership {
        union_membership(self.disc_memberships(p, margin))
    }

    /// Membership in the lens (intersection of the open discs).
    pub fn lens_membership(&self, p: Complex64, margin: f64) -> Membership {
        intersection_membership(self.disc_memberships(p, margin))
    }
}

pub fn point_in_area(p: Complex64, pair: &ObreshkoffPair) -> bool {
    pair.area_membership(p, 0.0) == Membership::Inside
}

pub fn point_in_lens(p: Complex64, pair: &ObreshkoffPair) -> bool {
    pair.lens_membership(p, 0.0) == Membership::Inside
}

/// Distance from `z` to `[-1, 1]`.
pub fn dist_to_unit(z: Complex64) -> f64 {
    let dx = (z.re.abs() - 1.0).max(0.0);
    dx.hypot(z.im)
}

/// Minimum distance between roots in `I_ε`, from precomputed oracle roots.
pub fn separation_in_eps(roots: &ComplexRootSet, eps: f64) -> f64 {
    let near: Vec<Complex64> = roots
        .roots
        .iter()
        .copied()
        .filter(|&z| dist_to_unit(z) <= eps)
        .collect();
    min_pairwise(&near)
}

/// `Δ^ℝ_ε(f)`: minimum distance between roots of `f` within `ε` of `[-1, 1]`.
/// Zero when `f` has a multiple root, `+∞` with fewer than two such roots.
pub fn eps_real_separation(f: &IntPolynomial, eps: f64) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = f.degree().max(1) as f64;
    if !(0.0..1.0 / d).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "eps {eps} outside [0, 1/d)"
        )));
    }
    if !f.is_square_free() {
        return Ok(0.0);
    }
    if f.degree() < 2 {
        return Ok(f64::INFINITY);
    }
    Ok(separation_in_eps(&numeric_roots(f, DEFAULT_TOL)?, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn dy(n: i64, e: u64) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn family_d4() {
        let fam = disk_family(4).unwrap();
        assert_eq!(fam.n_max, 2);
        assert_eq!(
            fam.disk(0),
            &Disk {
                center: Dyadic::zero(),
                radius: dy(3, 3)
            }
        );
        assert_eq!(
            fam.disk(1),
            &Disk {
                center: dy(5, 3),
                radius: dy(3, 4)
            }
        );
        assert_eq!(
            fam.disk(2),
            &Disk {
                center: dy(3, 2),
                radius: dy(3, 3)
            }
        );
        for n in 1..=2 {
            assert_eq!(fam.disk(-n).center, -fam.disk(n).center.clone());
            assert_eq!(fam.disk(-n).radius, fam.disk(n).radius);
        }
        assert!(disk_family(1).is_err());
    }

    #[test]
    fn family_covers_unit_interval_except_first_gap() {
        // disk 0 ends at 3/8 and disk 1 starts at 7/16; disk N fills this only for N <= 2
        let in_gap = |x: f64| x.abs() > 0.375 && x.abs() < 0.4375;
        for d in [2, 3, 5, 16, 64, 256] {
            let fam = disk_family(d).unwrap();
            let pts = if d == 16 { 20_000 } else { 2_000 };
            for i in 0..=pts {
                let x = -1.0 + 2.0 * i as f64 / pts as f64;
                let covered = fam
                    .disks
                    .iter()
                    .any(|k| (x - k.center.to_f64()).abs() <= k.radius.to_f64());
                assert_eq!(covered, fam.n_max <= 2 || !in_gap(x), "d={d} x={x}");
            }
        }
    }

    #[test]
    fn rho_bound_examples() {
        let b = rho_upper_bound(&p(&[1, 0, 1])).unwrap();
        let e = std::f64::consts::E;
        let expected = 3.0 * (2.0 * e).log2() - 2.0 * (1.25f64).log2();
        assert!((b - expected).abs() < 1e-12, "{b} vs {expected}");
        assert_eq!(rho_upper_bound(&p(&[0, 1, 0, 1])).unwrap(), f64::INFINITY);
        assert!(rho_upper_bound(&p(&[1, 1])).is_err());
        assert_eq!(
            rho_upper_bound(&IntPolynomial::zero()),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn lg_big_matches_f64() {
        for n in [1i64, 3, 1000, 1 << 40, i64::MAX] {
            assert!((lg_big(&BigInt::from(n)) - (n as f64).log2()).abs() < 1e-12);
        }
        let big = BigInt::from(3) << 500;
        assert!((lg_big(&big) - (500.0 + 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn omega_counts() {
        assert_eq!(
            count_roots_in_omega(&p(&[-1, 0, 4])).unwrap(),
            CountRange { min: 2, max: 2 }
        );
        assert_eq!(
            count_roots_in_omega(&p(&[4, 0, 1])).unwrap(),
            CountRange { min: 0, max: 0 }
        );
        let mut c = vec![0i64; 9];
        c[0] = -256;
        c[8] = 1;
        assert_eq!(
            count_roots_in_omega(&p(&c)).unwrap(),
            CountRange { min: 0, max: 0 }
        );
    }

    #[test]
    fn obreshkoff_geometry() {
        let j = DyadicInterval::new(Dyadic::zero(), Dyadic::one()).unwrap();
        let pair = obreshkoff_discs(&j, 0);
        assert_eq!((pair.radius, pair.center_offset), (0.5, 0.0));
        assert!(point_in_area(Complex64::new(0.5, 0.49), &pair));
        assert!(point_in_lens(Complex64::new(0.5, 0.49), &pair));
        assert!(!point_in_area(Complex64::new(0.5, 0.51), &pair));
        for rho in 0..20 {
            let pair = obreshkoff_discs(&j, rho);
            for c in pair.centers() {
                for end in [0.0, 1.0] {
                    let dist = (c - Complex64::new(end, 0.0)).norm();
                    assert!((dist - pair.radius).abs() <= 1e-12 * pair.radius);
                }
            }
            let phi = std::f64::consts::PI / (rho as f64 + 2.0);
            assert!((2.0 * pair.radius - 1.0 / phi.sin()).abs() < 1e-12 * pair.radius);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn area_grows_lens_shrinks(re in -3.0f64..3.0, im in -3.0f64..3.0, rho in 0usize..30) {
            let j = DyadicInterval::new(dy(-1, 2), dy(3, 3)).unwrap();
            let (a, b) = (obreshkoff_discs(&j, rho), obreshkoff_discs(&j, rho + 1));
            let z = Complex64::new(re, im);
            if point_in_area(z, &a) {
                prop_assert!(point_in_area(z, &b));
            }
            if point_in_lens(z, &b) {
                prop_assert!(point_in_lens(z, &a));
            }
        }
    }

    #[test]
    fn separation_examples() {
        assert!((eps_real_separation(&p(&[-1, 0, 4]), 0.1).unwrap() - 1.0).abs() < 1e-12);
        assert!((eps_real_separation(&p(&[-1, 0, 4]), 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            eps_real_separation(&p(&[1, 0, 1]), 0.1).unwrap(),
            f64::INFINITY
        );
        assert_eq!(eps_real_separation(&p(&[1, -4, 4]), 0.1).unwrap(), 0.0);
        assert!(eps_real_separation(&p(&[-1, 0, 4]), 0.5).is_err());
    }

    #[test]
    fn distance_to_unit_interval() {
        assert_eq!(dist_to_unit(Complex64::new(0.3, 0.0)), 0.0);
        assert_eq!(dist_to_unit(Complex64::new(0.3, -0.2)), 0.2);
        assert!((dist_to_unit(Complex64::new(4.0, 4.0)) - 5.0).abs() < 1e-15);
    }
}

//! Truncated Laurent series in `1/z` with exact rational coefficients.
//!
//! A [`LaurentSeries`] stores every coefficient of `z^n` for `n >= -trunc`
//! exactly; coefficients below that are unknown and are never reported as
//! zero. Operations propagate the tightest sound truncation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Formal series `sum_n c_n z^n` with finitely many positive powers, exact for
/// every exponent `n >= -trunc`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Rational>,
    trunc: i64,
}

impl LaurentSeries {
    /// Collects `(exponent, coefficient)` pairs, summing repeated exponents.
    /// Terms below `-trunc` and zero coefficients are dropped.
    pub fn new<I>(terms: I, trunc: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut coeffs: BTreeMap<i64, Rational> = BTreeMap::new();
        for (exp, c) in terms {
            if exp < -trunc {
                continue;
            }
            *coeffs.entry(exp).or_insert_with(Rational::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentSeries { coeffs, trunc }
    }

    pub fn zero(trunc: i64) -> Self {
        LaurentSeries {
            coeffs: BTreeMap::new(),
            trunc,
        }
    }

    pub fn one(trunc: i64) -> Self {
        Self::monomial(0, Rational::one(), trunc)
    }

    pub fn monomial(exp: i64, coeff: Rational, trunc: i64) -> Self {
        Self::new([(exp, coeff)], trunc)
    }

    /// Exponents `n >= -trunc` are exact.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lowest exponent whose coefficient is known.
    pub fn lowest_known(&self) -> i64 {
        -self.trunc
    }

    /// Coefficient of `z^exp`, or an error if it lies below the truncation.
    pub fn coeff(&self, exp: i64) -> Result<Rational> {
        if exp < -self.trunc {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient of z^{exp} requested but series is exact only down to z^{}",
                -self.trunc
            )));
        }
        Ok(self
            .coeffs
            .get(&exp)
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// Nonzero stored terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Forgets everything below `-trunc` (only ever lowers precision).
    pub fn with_trunc(&self, trunc: i64) -> Self {
        let trunc = trunc.min(self.trunc);
        LaurentSeries {
            coeffs: self
                .coeffs
                .range(-trunc..)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            trunc,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc);
        }
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiplication by the exact monomial `z^s`.
    pub fn shift(&self, s: i64) -> Self {
        LaurentSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, v)| (e + s, v.clone()))
                .collect(),
            trunc: self.trunc - s,
        }
    }

    pub(crate) fn map_coeffs<F>(&self, mut f: F) -> Self
    where
        F: FnMut(i64, &Rational) -> Rational,
    {
        Self::new(self.coeffs.iter().map(|(e, c)| (*e, f(*e, c))), self.trunc)
    }

    /// Coefficient of `z^{-1}`: the residue at `z = infinity` up to the sign
    /// convention `1/(2 pi i) oint_{z=inf} b(z) dz = b_{-1}`.
    pub fn residue(&self) -> Result<Rational> {
        if self.trunc < 1 {
            return Err(Error::InsufficientPrecision(format!(
                "residue needs trunc >= 1, series has trunc {}",
                self.trunc
            )));
        }
        self.coeff(-1)
    }

    /// The class `c` in `0..=r` with every exponent `= c (mod r+1)`, if any.
    /// The zero series has no class.
    pub fn grading_class(&self, r: u32) -> Option<u32> {
        let m = i64::from(r) + 1;
        let mut exps = self.coeffs.keys();
        let c = exps.next()?.rem_euclid(m);
        exps.all(|e| e.rem_euclid(m) == c).then_some(c as u32)
    }

    fn effective_top(&self) -> i64 {
        self.leading_exponent()
            .unwrap_or(-self.trunc - 1)
            .max(-self.trunc - 1)
    }

    /// Cauchy product. The result is exact down to `z^{-t}` with
    /// `t = min(ta - top(b), tb - top(a))`.
    pub fn mul_series(&self, other: &Self) -> Self {
        let trunc = (self.trunc - other.effective_top()).min(other.trunc - self.effective_top());
        let mut out: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in other.coeffs.range((-trunc - ea)..) {
                *out.entry(ea + eb).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentSeries { coeffs: out, trunc }
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        Self::new(
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(e, c)| (*e, c.clone())),
            trunc,
        )
    }

    pub fn sub_series(&self, other: &Self) -> Self {
        self.add_series(&-other)
    }

    /// Largest absolute value among the known coefficients, zero if none.
    pub fn max_abs_coeff(&self) -> Rational {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Exponents with nonzero coefficients, highest first.
    pub fn support_desc(&self) -> Vec<i64> {
        self.coeffs.keys().rev().copied().collect()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(z^{})", -self.trunc - 1)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.add_series(rhs)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.sub_series(rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.mul_series(rhs)
    }
}

/// A series lying in one residue class `c (mod r+1)` times an overall factor
/// `omega^phase`, `omega = exp(i pi/(r+1))`.
///
/// Since `omega^(r+1) = -1` the pair `(body, phase)` and
/// `(-body, phase + r + 1)` denote the same value; [`PhasedSeries::normalized`]
/// picks the representative with `phase` in `0..=r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasedSeries {
    body: LaurentSeries,
    r: u32,
    class: u32,
    phase: i64,
}

impl PhasedSeries {
    pub fn new(body: LaurentSeries, r: u32, class: u32, phase: i64) -> Result<Self> {
        if r < 2 {
            return Err(Error::Domain(format!("r must be >= 2, got {r}")));
        }
        let m = i64::from(r) + 1;
        if i64::from(class) >= m {
            return Err(Error::Domain(format!(
                "residue class {class} out of range 0..={r}"
            )));
        }
        if let Some((e, _)) = body
            .terms()
            .find(|(e, _)| e.rem_euclid(m) != i64::from(class))
        {
            return Err(Error::Domain(format!(
                "exponent {e} is not in residue class {class} mod {m}"
            )));
        }
        Ok(PhasedSeries {
            body,
            r,
            class,
            phase: phase.rem_euclid(2 * m),
        })
    }

    /// Wraps a series with a single residue class, phase 0. The zero series is
    /// put in class 0.
    pub fn from_series(body: LaurentSeries, r: u32) -> Result<Self> {
        let class = match body.grading_class(r) {
            Some(c) => c,
            None if body.is_zero() => 0,
            None => {
                return Err(Error::Domain(
                    "series mixes residue classes; no phase-algebra representation".into(),
                ))
            }
        };
        Self::new(body, r, class, 0)
    }

    pub fn body(&self) -> &LaurentSeries {
        &self.body
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn residue_class(&self) -> u32 {
        self.class
    }

    pub fn phase(&self) -> i64 {
        self.phase
    }

    fn period(&self) -> i64 {
        i64::from(self.r) + 1
    }

    /// The substitution `z -> omega z`.
    ///
    /// The coefficient of `z^n` picks up `omega^n = omega^c (-1)^((n-c)/(r+1))`;
    /// the `omega^c` goes into the phase and the sign stays in the body.
    pub fn rotate(&self) -> Self {
        let m = self.period();
        let c = i64::from(self.class);
        let body = self.body.map_coeffs(|e, v| {
            if ((e - c) / m).rem_euclid(2) == 0 {
                v.clone()
            } else {
                -v
            }
        });
        PhasedSeries {
            body,
            r: self.r,
            class: self.class,
            phase: (self.phase + c).rem_euclid(2 * m),
        }
    }

    /// Multiplies by `omega^q`.
    pub fn times_omega_power(&self, q: i64) -> Self {
        PhasedSeries {
            phase: (self.phase + q).rem_euclid(2 * self.period()),
            ..self.clone()
        }
    }

    /// Representative with phase in `0..=r`.
    pub fn normalized(&self) -> Self {
        let m = self.period();
        if self.phase >= m {
            PhasedSeries {
                body: -&self.body,
                r: self.r,
                class: self.class,
                phase: self.phase - m,
            }
        } else {
            self.clone()
        }
    }

    /// Equality of the represented values (exact to the common truncation).
    pub fn same_value(&self, other: &Self) -> bool {
        if self.r != other.r {
            return false;
        }
        let a = self.normalized();
        let b = other.normalized();
        let t = a.body.trunc().min(b.body.trunc());
        if a.body.with_trunc(t).is_zero() && b.body.with_trunc(t).is_zero() {
            return true;
        }
        a.phase == b.phase && a.body.with_trunc(t) == b.body.with_trunc(t)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::Domain("phased series with different r".into()));
        }
        let m = self.period() as u32;
        PhasedSeries::new(
            self.body.mul_series(&other.body),
            self.r,
            (self.class + other.class) % m,
            self.phase + other.phase,
        )
    }

    /// Sum of two phased series that share class and phase (after
    /// normalization).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let a = self.normalized();
        let b = other.normalized();
        if a.r != b.r || a.class != b.class {
            return Err(Error::Domain(
                "adding phased series of different classes".into(),
            ));
        }
        if a.phase != b.phase {
            return Err(Error::Domain(format!(
                "adding phased series with phases {} and {}",
                a.phase, b.phase
            )));
        }
        PhasedSeries::new(a.body.add_series(&b.body), a.r, a.class, a.phase)
    }

    pub(crate) fn with_body(&self, body: LaurentSeries, class: u32) -> Result<Self> {
        PhasedSeries::new(body, self.r, class, self.phase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qi};
    use alloc::vec;

    fn ser(terms: &[(i64, Rational)], trunc: i64) -> LaurentSeries {
        LaurentSeries::new(terms.iter().cloned(), trunc)
    }

    #[test]
    fn add_cancels_and_propagates_truncation() {
        let a = ser(&[(0, qi(1)), (-1, qi(1))], 5);
        let b = ser(&[(-1, qi(-1))], 5);
        assert_eq!(&a + &b, LaurentSeries::one(5));

        let z = ser(&[(1, qi(1))], 3);
        let s = &z + &LaurentSeries::zero(10);
        assert_eq!(s.trunc(), 3);
        assert_eq!(s, z);

        let s = &LaurentSeries::one(2) + &ser(&[(-2, qi(1))], 2);
        assert_eq!(s, ser(&[(0, qi(1)), (-2, qi(1))], 2));
    }

    #[test]
    fn mul_examples() {
        let a = ser(&[(0, qi(1)), (-1, qi(1))], 6);
        let b = ser(&[(0, qi(1)), (-1, qi(-1))], 6);
        assert_eq!(&a * &b, ser(&[(0, qi(1)), (-2, qi(-1))], 6));

        let z2 = LaurentSeries::monomial(2, qi(1), 10);
        let zm2 = LaurentSeries::monomial(-2, qi(1), 10);
        let p = &z2 * &zm2;
        assert_eq!(p.coeff(0).unwrap(), qi(1));
        assert!(p.terms().count() == 1);

        let a = ser(&[(0, qi(1)), (-3, q(-5, 24))], 8);
        let d = ser(&[(0, qi(1)), (-3, q(41, 24))], 8);
        let p = &a * &d;
        assert_eq!(p, ser(&[(0, qi(1)), (-3, q(3, 2)), (-6, q(-205, 576))], 8));
    }

    #[test]
    fn mul_truncation_accounts_for_positive_powers() {
        // z^2 * (1 + O(z^-4)): the z^-2 coefficient would need b_{-4}
        let a = LaurentSeries::monomial(2, qi(1), 10);
        let b = LaurentSeries::one(3);
        let p = &a * &b;
        assert_eq!(p.trunc(), 1);
        assert!(p.coeff(-2).is_err());
    }

    #[test]
    fn residue_examples() {
        let s = ser(&[(1, qi(3)), (-1, qi(7)), (-2, qi(1))], 4);
        assert_eq!(s.residue().unwrap(), qi(7));
        assert_eq!(LaurentSeries::one(3).residue().unwrap(), qi(0));
        assert_eq!(ser(&[(-2, qi(1))], 3).residue().unwrap(), qi(0));
        assert!(matches!(
            LaurentSeries::one(0).residue(),
            Err(Error::InsufficientPrecision(_))
        ));
    }

    #[test]
    fn grading_examples() {
        assert_eq!(ser(&[(0, qi(1)), (-3, qi(1))], 5).grading_class(2), Some(0));
        assert_eq!(ser(&[(1, qi(1)), (-2, qi(1))], 5).grading_class(2), Some(1));
        assert_eq!(ser(&[(0, qi(1)), (-1, qi(1))], 5).grading_class(2), None);
        assert_eq!(LaurentSeries::zero(5).grading_class(2), None);
    }

    #[test]
    fn coefficients_below_truncation_are_unknown() {
        let s = LaurentSeries::new(vec![(0, qi(1)), (-7, qi(2))], 4);
        assert_eq!(s.num_terms(), 1);
        assert!(s.coeff(-5).is_err());
        assert_eq!(s.coeff(-4).unwrap(), qi(0));
    }

    #[test]
    fn rotation_examples() {
        let one = PhasedSeries::from_series(LaurentSeries::one(6), 2).unwrap();
        assert_eq!(one.rotate(), one);

        let z3 = PhasedSeries::from_series(LaurentSeries::monomial(3, qi(1), 6), 2).unwrap();
        let rotated = z3.rotate();
        assert_eq!(rotated.body(), &LaurentSeries::monomial(3, qi(-1), 6));
        assert_eq!(rotated.phase(), 0);
        let expected = PhasedSeries::new(LaurentSeries::monomial(3, qi(1), 6), 2, 0, 3).unwrap();
        assert!(rotated.same_value(&expected));

        // z^-1 for r = 2: class 2, omega^-1 = omega^2 * omega^-3 = -omega^2
        let zm1 = PhasedSeries::from_series(LaurentSeries::monomial(-1, qi(1), 6), 2).unwrap();
        let rotated = zm1.rotate();
        assert_eq!(rotated.residue_class(), 2);
        assert_eq!(rotated.phase(), 2);
        assert_eq!(rotated.body(), &LaurentSeries::monomial(-1, qi(-1), 6));
    }

    #[test]
    fn rotating_2r_plus_2_times_is_identity() {
        let s = LaurentSeries::new(vec![(1, qi(2)), (-3, q(1, 3)), (-7, qi(5))], 9);
        let p = PhasedSeries::from_series(s, 3).unwrap();
        let mut x = p.clone();
        for _ in 0..8 {
            x = x.rotate();
        }
        assert!(x.same_value(&p));
    }

    #[test]
    fn mixed_classes_rejected() {
        let s = ser(&[(0, qi(1)), (-1, qi(1))], 5);
        assert!(matches!(
            PhasedSeries::from_series(s, 2),
            Err(Error::Domain(_))
        ));
    }
}

//! Differential polynomials in the jet variables `u_a^(k)`.
//!
//! Monomials are kept in a canonical form: jets sorted by `(field, order)`
//! with positive powers. The grading is `deg u_a^(k) = a + 1 + k`.

use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::{qi, Rational};

/// The jet variable `u_field^(order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub field: u32,
    pub order: u32,
}

impl Jet {
    pub fn new(field: u32, order: u32) -> Self {
        Jet { field, order }
    }

    pub fn degree(&self) -> i64 {
        i64::from(self.field) + 1 + i64::from(self.order)
    }

    pub fn derivative(&self) -> Jet {
        Jet::new(self.field, self.order + 1)
    }
}

/// Product of jet powers in canonical order; the empty product is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Jet, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(jet: Jet) -> Self {
        Monomial(alloc::vec![(jet, 1)])
    }

    /// Builds from arbitrary `(jet, power)` factors, merging repeats.
    pub fn from_factors<I: IntoIterator<Item = (Jet, u32)>>(factors: I) -> Self {
        let mut map: BTreeMap<Jet, u32> = BTreeMap::new();
        for (j, p) in factors {
            *map.entry(j).or_insert(0) += p;
        }
        Monomial(map.into_iter().filter(|(_, p)| *p > 0).collect())
    }

    pub fn factors(&self) -> &[(Jet, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(j, p)| j.degree() * i64::from(*p)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_factors(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn power_of(&self, jet: Jet) -> u32 {
        self.0
            .iter()
            .find(|(j, _)| *j == jet)
            .map_or(0, |(_, p)| *p)
    }

    /// The monomial with the power of `jet` lowered by one.
    fn lower(&self, jet: Jet) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(j, p)| match (j == jet, p) {
                    (true, 1) => None,
                    (true, p) => Some((j, p - 1)),
                    _ => Some((j, p)),
                })
                .collect(),
        )
    }
}

/// A polynomial with rational coefficients in the jet variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms([(Monomial::one(), c)])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `u_field^(order)`.
    pub fn var(field: u32, order: u32) -> Self {
        Self::from_terms([(Monomial::var(Jet::new(field, order)), Rational::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut out = DiffPoly::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Constant term (coefficient of the empty monomial).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Returns the constant if the polynomial has no jet variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coeff_of(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_poly(&self, other: &DiffPoly) -> DiffPoly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        DiffPoly { terms: acc }
    }

    pub fn add_poly(&self, other: &DiffPoly) -> DiffPoly {
        let mut acc = self.terms.clone();
        for (m, c) in &other.terms {
            *acc.entry(m.clone()).or_insert_with(Rational::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        DiffPoly { terms: acc }
    }

    /// `d/du` for a single jet variable.
    pub fn partial(&self, jet: Jet) -> DiffPoly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let p = m.power_of(jet);
            if p > 0 {
                *acc.entry(m.lower(jet)).or_insert_with(Rational::zero) += c * qi(i64::from(p));
            }
        }
        acc.retain(|_, c| !c.is_zero());
        DiffPoly { terms: acc }
    }

    /// Total `x`-derivative: `u_a^(k) -> u_a^(k+1)` with the Leibniz rule.
    pub fn total_x(&self) -> DiffPoly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in &self.terms {
            for &(jet, p) in m.factors() {
                let next = m.lower(jet).mul(&Monomial::var(jet.derivative()));
                *acc.entry(next).or_insert_with(Rational::zero) += c * qi(i64::from(p));
            }
        }
        acc.retain(|_, c| !c.is_zero());
        DiffPoly { terms: acc }
    }

    pub fn total_x_n(&self, n: usize) -> DiffPoly {
        (0..n).fold(self.clone(), |acc, _| acc.total_x())
    }

    /// All jet variables that occur.
    pub fn jets(&self) -> BTreeSet<Jet> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(j, _)| *j))
            .collect()
    }

    /// Fields `a` of every occurring `u_a^(k)`.
    pub fn fields(&self) -> BTreeSet<u32> {
        self.jets().into_iter().map(|j| j.field).collect()
    }

    /// Grading degree of every monomial.
    pub fn degrees(&self) -> BTreeSet<i64> {
        self.terms.keys().map(Monomial::degree).collect()
    }

    /// True when every monomial has degree `deg` (vacuously for zero).
    pub fn is_homogeneous(&self, deg: i64) -> bool {
        self.terms.keys().all(|m| m.degree() == deg)
    }

    /// Evolutionary derivation `D_K p = sum dp/du_a^(k) * d_x^k K_a` where
    /// `flow[a-1] = K_a`.
    pub fn prolong(&self, flow: &[DiffPoly]) -> DiffPoly {
        let mut derivs: BTreeMap<Jet, DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for jet in self.jets() {
            let Some(base) = flow.get(jet.field as usize - 1) else {
                continue;
            };
            let dk = derivs
                .entry(jet)
                .or_insert_with(|| base.total_x_n(jet.order as usize))
                .clone();
            out = out.add_poly(&self.partial(jet).mul_poly(&dk));
        }
        out
    }

    /// Renders with `u` for the single field of `r = 2`, `u_a` otherwise.
    pub fn display(&self, single_field: bool) -> DisplayDiffPoly<'_> {
        DisplayDiffPoly {
            poly: self,
            single_field,
        }
    }
}

pub struct DisplayDiffPoly<'a> {
    poly: &'a DiffPoly,
    single_field: bool,
}

impl fmt::Display for DisplayDiffPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs} ")?;
            }
            for (k, (jet, p)) in m.factors().iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                if self.single_field {
                    f.write_str("u")?;
                } else {
                    write!(f, "u_{}", jet.field)?;
                }
                if jet.order > 0 {
                    write!(f, "^({})", jet.order)?;
                }
                if *p > 1 {
                    write!(f, "**{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(false).fmt(f)
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        self.add_poly(rhs)
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        self.add_poly(&-rhs)
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        self.mul_poly(rhs)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

//! Pseudo-differential operators `sum_i f_i d^i` with differential-polynomial
//! coefficients.
//!
//! Composition uses `d^i f = sum_{l>=0} C(i, l) f^(l) d^(i-l)` with the
//! generalized binomial `C(i, l)` for integer `i` of either sign. An operator
//! carries the lowest power down to which it is known; `None` means every
//! unlisted power is exactly zero.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::{qi, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsDO {
    terms: BTreeMap<i64, DiffPoly>,
    order: i64,
    low: Option<i64>,
}

/// `C(i, l) = i (i-1) ... (i-l+1) / l!`.
pub fn binomial(i: i64, l: u32) -> Rational {
    let mut acc = Rational::one();
    for t in 0..i64::from(l) {
        acc *= qi(i - t);
        acc /= qi(t + 1);
    }
    acc
}

impl PsDO {
    pub fn new<I>(terms: I, order: i64, low: Option<i64>) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, DiffPoly)>,
    {
        let mut map: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (p, c) in terms {
            if p > order {
                return Err(Error::Domain(format!(
                    "term d^{p} above declared order {order}"
                )));
            }
            if low.is_some_and(|l| p < l) {
                continue;
            }
            let slot = map.entry(p).or_default();
            *slot = slot.add_poly(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(PsDO {
            terms: map,
            order,
            low,
        })
    }

    /// `d^i`, exact.
    pub fn d_power(i: i64) -> Self {
        PsDO {
            terms: [(i, DiffPoly::one())].into_iter().collect(),
            order: i,
            low: None,
        }
    }

    /// Multiplication by `f`, exact.
    pub fn multiplication(f: DiffPoly) -> Self {
        PsDO::new([(0, f)], 0, None).expect("order 0 term")
    }

    /// `L = d^r + sum_{a=1}^{r-1} u_a d^(r-1-a)`.
    pub fn lax(r: u32) -> Self {
        let coeffs: Vec<DiffPoly> = (1..r).map(|a| DiffPoly::var(a, 0)).collect();
        Self::lax_with(&coeffs)
    }

    /// `d^r + sum_a coeffs[a-1] d^(r-1-a)` with `r = coeffs.len() + 1`.
    pub fn lax_with(coeffs: &[DiffPoly]) -> Self {
        let r = coeffs.len() as i64 + 1;
        let terms = core::iter::once((r, DiffPoly::one())).chain(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (r - 2 - i as i64, c.clone())),
        );
        PsDO::new(terms, r, None).expect("powers below r")
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest known power, `None` if exact.
    pub fn low(&self) -> Option<i64> {
        self.low
    }

    /// Number of known powers below the order, `None` if exact.
    pub fn depth(&self) -> Option<i64> {
        self.low.map(|l| self.order - l)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &DiffPoly)> {
        self.terms.iter().map(|(p, c)| (*p, c))
    }

    pub fn coeff(&self, power: i64) -> Result<DiffPoly> {
        if self.low.is_some_and(|l| power < l) {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient of d^{power} requested, operator known down to d^{}",
                self.low.unwrap_or_default()
            )));
        }
        Ok(self.terms.get(&power).cloned().unwrap_or_default())
    }

    /// Lowest power with a nonzero coefficient.
    pub fn lowest_term(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Coefficient of `d^-1`.
    pub fn residue(&self) -> Result<DiffPoly> {
        self.coeff(-1)
    }

    /// `( . )_+`: the part with powers `>= 0`, as an exact operator.
    pub fn positive_part(&self) -> Result<PsDO> {
        if self.low.is_some_and(|l| l > 0) {
            return Err(Error::InsufficientPrecision(format!(
                "differential part needs the operator down to d^0, have d^{}",
                self.low.unwrap_or_default()
            )));
        }
        PsDO::new(
            self.terms.range(0..).map(|(p, c)| (*p, c.clone())),
            self.order.max(0),
            None,
        )
    }

    /// True when the operator is exact with no negative powers.
    pub fn is_differential(&self) -> bool {
        self.low.is_none() && self.terms.keys().all(|p| *p >= 0)
    }

    /// Forgets every power below `low`.
    pub fn truncated(&self, low: i64) -> PsDO {
        let low = self.low.map_or(low, |l| l.max(low));
        PsDO {
            terms: self
                .terms
                .range(low..)
                .map(|(p, c)| (*p, c.clone()))
                .collect(),
            order: self.order,
            low: Some(low),
        }
    }

    fn combine_low(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add(&self, other: &PsDO) -> PsDO {
        let low = Self::combine_low(self.low, other.low);
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(p, c)| (*p, c.clone()));
        PsDO::new(terms, self.order.max(other.order), low).expect("orders are maxed")
    }

    pub fn sub(&self, other: &PsDO) -> PsDO {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Rational) -> PsDO {
        PsDO {
            terms: self
                .terms
                .iter()
                .map(|(p, f)| (*p, f.scale(c)))
                .filter(|(_, f)| !f.is_zero())
                .collect(),
            order: self.order,
            low: self.low,
        }
    }

    /// Lowest power of `self * other` that is determined by the known parts.
    pub fn sound_product_low(&self, other: &PsDO) -> Option<i64> {
        Self::combine_low(
            self.low.map(|l| l + other.order),
            other.low.map(|l| l + self.order),
        )
    }

    fn product_is_infinite(&self, other: &PsDO) -> bool {
        self.terms.keys().any(|p| *p < 0) && other.terms.values().any(|c| c.as_constant().is_none())
    }

    /// Composition, computing every power `>= min_power`.
    pub fn mul_to(&self, other: &PsDO, min_power: i64) -> Result<PsDO> {
        if let Some(sound) = self.sound_product_low(other) {
            if min_power < sound {
                return Err(Error::InsufficientPrecision(format!(
                    "product requested down to d^{min_power}, factors only determine d^{sound}"
                )));
            }
        }
        let mut acc: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (&j, g) in &other.terms {
            let mut derivs: Vec<DiffPoly> = alloc::vec![g.clone()];
            for (&i, f) in &self.terms {
                let mut l_max = i + j - min_power;
                if i >= 0 {
                    l_max = l_max.min(i);
                }
                if l_max < 0 {
                    continue;
                }
                for l in 0..=l_max as usize {
                    while derivs.len() <= l {
                        let next = derivs.last().expect("seeded").total_x();
                        derivs.push(next);
                    }
                    if derivs[l].is_zero() {
                        break;
                    }
                    let c = binomial(i, l as u32);
                    if c.is_zero() {
                        continue;
                    }
                    let term = f.mul_poly(&derivs[l]).scale(&c);
                    let slot = acc.entry(i + j - l as i64).or_default();
                    *slot = slot.add_poly(&term);
                }
            }
        }
        let exact = self.low.is_none() && other.low.is_none() && !self.product_is_infinite(other);
        let low = if exact { None } else { Some(min_power) };
        PsDO::new(acc, self.order + other.order, low)
    }

    /// Composition down to the lowest sound power.
    pub fn mul(&self, other: &PsDO) -> Result<PsDO> {
        match self.sound_product_low(other) {
            Some(low) => self.mul_to(other, low),
            None if self.product_is_infinite(other) => Err(Error::InsufficientPrecision(
                "product of exact operators has an infinite tail; give a depth with mul_to".into(),
            )),
            None => {
                let lowest = self.lowest_term().unwrap_or(0) + other.lowest_term().unwrap_or(0)
                    - self.order.max(0);
                self.mul_to(other, lowest)
            }
        }
    }

    pub fn pow(&self, n: u32) -> Result<PsDO> {
        if n == 0 {
            return Ok(PsDO::d_power(0));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &PsDO) -> Result<PsDO> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// The `r`-th root `P = d + sum_{i<=0} p_i d^i` of a monic operator of
    /// order `r`, known down to `d^(1-depth)`.
    ///
    /// Coefficients are fixed one power at a time: with `p_q` still zero,
    /// the `d^(q+r-1)` coefficient of `P^r` misses exactly `r p_q`.
    pub fn root(&self, r: u32, depth: usize) -> Result<PsDO> {
        let r64 = i64::from(r);
        if r == 0 || self.order != r64 {
            return Err(Error::Domain(format!(
                "root of order {r} requested for an operator of order {}",
                self.order
            )));
        }
        if self.terms.get(&r64).and_then(DiffPoly::as_constant) != Some(Rational::one()) {
            return Err(Error::Domain("operator is not monic".into()));
        }
        let mut root = PsDO::d_power(1).truncated(1);
        let r_inv = qi(r64).recip();
        for j in 0..depth as i64 {
            let power = -j;
            let trial = PsDO {
                terms: root.terms.clone(),
                order: 1,
                low: Some(power),
            };
            let target_power = power + r64 - 1;
            let got = trial.pow(r)?.coeff(target_power)?;
            let want = self.coeff(target_power)?;
            let p = (&want - &got).scale(&r_inv);
            if !p.is_zero() {
                root.terms.insert(power, p);
            }
            root.low = Some(power);
        }
        Ok(root)
    }
}

impl fmt::Display for PsDO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c}) d^{p}")?;
        }
        if first {
            f.write_str("0")?;
        }
        if let Some(l) = self.low {
            write!(f, " + O(d^{})", l - 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn u() -> DiffPoly {
        DiffPoly::var(1, 0)
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binomial(3, 2), qi(3));
        assert_eq!(binomial(2, 3), qi(0));
        assert_eq!(binomial(-1, 4), qi(1));
        assert_eq!(binomial(-1, 3), qi(-1));
        assert_eq!(binomial(-2, 2), qi(3));
    }

    #[test]
    fn leibniz_rule() {
        let d = PsDO::d_power(1);
        let mu = PsDO::multiplication(u());
        let p = d.mul(&mu).unwrap();
        let expected = PsDO::new([(1, u()), (0, u().total_x())], 1, None).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn inverse_times_d_is_identity() {
        let p = PsDO::d_power(-1).mul(&PsDO::d_power(1)).unwrap();
        assert_eq!(p, PsDO::d_power(0));
    }

    #[test]
    fn inverse_d_past_function() {
        let mu = PsDO::multiplication(u());
        assert!(PsDO::d_power(-1).mul(&mu).is_err());
        let p = PsDO::d_power(-1).mul_to(&mu, -4).unwrap();
        assert_eq!(p.coeff(-1).unwrap(), u());
        assert_eq!(p.coeff(-2).unwrap(), -&DiffPoly::var(1, 1));
        assert_eq!(p.coeff(-3).unwrap(), DiffPoly::var(1, 2));
        assert_eq!(p.coeff(-4).unwrap(), -&DiffPoly::var(1, 3));
        assert!(p.coeff(-5).is_err());
    }

    #[test]
    fn kdv_root() {
        let l = PsDO::lax(2);
        let p = l.root(2, 4).unwrap();
        assert_eq!(p.coeff(1).unwrap(), DiffPoly::one());
        assert!(p.coeff(0).unwrap().is_zero());
        assert_eq!(p.coeff(-1).unwrap(), u().scale(&q(1, 2)));
        assert_eq!(p.coeff(-2).unwrap(), DiffPoly::var(1, 1).scale(&q(-1, 4)));
        assert_eq!(p.pow(2).unwrap().truncated(-2), l.truncated(-2));
    }

    #[test]
    fn root_of_free_operator_is_d() {
        let l = PsDO::lax_with(&[DiffPoly::zero(), DiffPoly::zero()]);
        let p = l.root(3, 6).unwrap();
        assert_eq!(p.terms().count(), 1);
        assert_eq!(p.coeff(1).unwrap(), DiffPoly::one());
    }

    #[test]
    fn root_rejects_bad_input() {
        let l = PsDO::lax(3);
        assert!(matches!(l.root(2, 3), Err(Error::Domain(_))));
        let scaled = l.scale(&qi(2));
        assert!(matches!(scaled.root(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn residues() {
        let l = PsDO::lax(2);
        let p = l.root(2, 3).unwrap();
        assert_eq!(p.residue().unwrap(), u().scale(&q(1, 2)));
        assert!(PsDO::d_power(1).residue().unwrap().is_zero());
        assert!(l.residue().unwrap().is_zero());
    }

    #[test]
    fn three_halves_power_positive_part() {
        let p = PsDO::lax(2).root(2, 3).unwrap();
        let b = p.pow(3).unwrap().positive_part().unwrap();
        let expected = PsDO::new(
            [
                (3, DiffPoly::one()),
                (1, u().scale(&q(3, 2))),
                (0, DiffPoly::var(1, 1).scale(&q(3, 4))),
            ],
            3,
            None,
        )
        .unwrap();
        assert_eq!(b, expected);
    }
}

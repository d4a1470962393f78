//! Flows `dL/dt_m = alpha_m [(L^(m/r))_+, L]` of the r-reduced KP hierarchy,
//! Hamiltonian densities `h_k = Res L^(k/r)`, normal coordinates and the
//! initial data on the `t_{>=2} = 0` slice.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::psdo::PsDO;
use crate::string_ops::{alpha_coeff, double_factorial_r};
use crate::{qi, Rational};

fn check_r(r: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::Domain(format!("r must be >= 2, got {r}")));
    }
    Ok(())
}

/// `[(L^(m/r))_+, L]` for the generic Lax operator, checked to be a
/// differential operator of order at most `r - 2`.
pub fn lax_commutator(m: u32, r: u32) -> Result<PsDO> {
    check_r(r)?;
    if m == 0 {
        return Err(Error::Domain("flow index m must be >= 1".into()));
    }
    let l = PsDO::lax(r);
    let root = l.root(r, m as usize)?;
    commutator_with_root(&l, &root, m, r)
}

fn commutator_with_root(l: &PsDO, root: &PsDO, m: u32, r: u32) -> Result<PsDO> {
    let b = root.pow(m)?.positive_part()?;
    let c = b.commutator(l)?;
    if !c.is_differential() {
        return Err(Error::InvariantViolation(format!(
            "[(L^({m}/{r}))_+, L] has negative powers"
        )));
    }
    if let Some((p, _)) = c.terms().find(|(p, _)| *p > i64::from(r) - 2) {
        return Err(Error::InvariantViolation(format!(
            "[(L^({m}/{r}))_+, L] has a d^{p} term"
        )));
    }
    Ok(c)
}

fn rhs_from_commutator(c: &PsDO, m: u32, r: u32) -> Result<Vec<DiffPoly>> {
    let alpha = alpha_coeff(i64::from(m), r)?;
    (1..r)
        .map(|a| Ok(c.coeff(i64::from(r) - 1 - i64::from(a))?.scale(&alpha)))
        .collect()
}

/// `du_a/dt_m` for `a = 1..r-1` (index `a - 1`).
pub fn flow_rhs(m: u32, r: u32) -> Result<Vec<DiffPoly>> {
    let c = lax_commutator(m, r)?;
    rhs_from_commutator(&c, m, r)
}

/// The flows of one hierarchy, computed on demand from a shared root of `L`.
#[derive(Clone, Debug)]
pub struct FlowSystem {
    r: u32,
    lax: PsDO,
    root: PsDO,
    flows: BTreeMap<u32, Vec<DiffPoly>>,
}

impl FlowSystem {
    pub fn new(r: u32) -> Result<Self> {
        check_r(r)?;
        let lax = PsDO::lax(r);
        let root = lax.root(r, 1)?;
        Ok(FlowSystem {
            r,
            lax,
            root,
            flows: BTreeMap::new(),
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    fn ensure_root_depth(&mut self, depth: usize) -> Result<()> {
        let have = self.root.depth().unwrap_or(i64::MAX);
        if have < depth as i64 {
            self.root = self.lax.root(self.r, depth)?;
        }
        Ok(())
    }

    /// `du_a/dt_m`, cached.
    pub fn flow(&mut self, m: u32) -> Result<&[DiffPoly]> {
        if m == 0 {
            return Err(Error::Domain("flow index m must be >= 1".into()));
        }
        if !self.flows.contains_key(&m) {
            self.ensure_root_depth(m as usize)?;
            let c = commutator_with_root(&self.lax, &self.root, m, self.r)?;
            let rhs = rhs_from_commutator(&c, m, self.r)?;
            self.flows.insert(m, rhs);
        }
        Ok(&self.flows[&m])
    }

    /// The evolutionary derivation `D_m` applied to `p`.
    pub fn derive(&mut self, m: u32, p: &DiffPoly) -> Result<DiffPoly> {
        let flow = self.flow(m)?.to_vec();
        Ok(p.prolong(&flow))
    }

    /// `D_m K_n = D_n K_m` for every field.
    pub fn flows_commute(&mut self, m: u32, n: u32) -> Result<bool> {
        let km = self.flow(m)?.to_vec();
        let kn = self.flow(n)?.to_vec();
        Ok(km
            .iter()
            .zip(kn.iter())
            .all(|(a, b)| b.prolong(&km) == a.prolong(&kn)))
    }
}

pub fn flow_commute_check(m: u32, n: u32, r: u32) -> Result<bool> {
    FlowSystem::new(r)?.flows_commute(m, n)
}

/// `h_k = Res L^(k/r)`.
pub fn hamiltonian_density(k: u32, r: u32) -> Result<DiffPoly> {
    check_r(r)?;
    if k == 0 {
        return Err(Error::Domain("h_k needs k >= 1".into()));
    }
    let root = PsDO::lax(r).root(r, k as usize + 1)?;
    root.pow(k)?.residue()
}

/// Normal coordinate `w_a = h_a / a!_(r)!`.
pub fn normal_coordinate(alpha: u32, r: u32) -> Result<DiffPoly> {
    check_field(alpha, r)?;
    let h = hamiltonian_density(alpha, r)?;
    Ok(h.scale(&double_factorial_r(i64::from(alpha), r)?.recip()))
}

/// `h_{a,p} = h_{a+(p+1)r} / (a+(p+1)r)!_(r)!`.
pub fn density(alpha: u32, p: u32, r: u32) -> Result<DiffPoly> {
    check_field(alpha, r)?;
    let k = alpha + (p + 1) * r;
    let h = hamiltonian_density(k, r)?;
    Ok(h.scale(&double_factorial_r(i64::from(k), r)?.recip()))
}

fn check_field(alpha: u32, r: u32) -> Result<()> {
    check_r(r)?;
    if alpha == 0 || alpha >= r {
        return Err(Error::Domain(format!(
            "field index {alpha} outside 1..={}",
            r - 1
        )));
    }
    Ok(())
}

/// `M_a = w_a - u_a / r`.
pub fn miura_remainder(alpha: u32, r: u32) -> Result<DiffPoly> {
    let w = normal_coordinate(alpha, r)?;
    Ok(&w - &DiffPoly::var(alpha, 0).scale(&qi(i64::from(r)).recip()))
}

/// True iff `w_a - u_a / r` only involves `u_1 .. u_(a-1)` and their jets.
pub fn miura_leading_check(alpha: u32, r: u32) -> Result<bool> {
    let rem = miura_remainder(alpha, r)?;
    Ok(rem.fields().iter().all(|&f| f < alpha))
}

/// A polynomial in `x` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XPolynomial(pub Vec<Rational>);

impl XPolynomial {
    pub fn zero() -> Self {
        XPolynomial(Vec::new())
    }

    /// `c x`.
    pub fn linear(c: Rational) -> Self {
        XPolynomial(vec![Rational::zero(), c]).trimmed()
    }

    pub fn constant(c: Rational) -> Self {
        XPolynomial(vec![c]).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self) -> Self {
        XPolynomial(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * qi(k as i64))
                .collect(),
        )
        .trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        XPolynomial((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect()).trimmed()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        XPolynomial(self.0.iter().map(|v| v * c).collect()).trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return XPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        XPolynomial(out).trimmed()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// Substitutes `u_a = fields[a-1]` (functions of `x`) into `p`.
pub fn substitute(p: &DiffPoly, fields: &[XPolynomial]) -> XPolynomial {
    let mut out = XPolynomial::zero();
    for (mono, c) in p.terms() {
        let mut term = XPolynomial::constant(c.clone());
        for (jet, pow) in mono.factors() {
            let mut f = fields
                .get(jet.field as usize - 1)
                .cloned()
                .unwrap_or_default();
            for _ in 0..jet.order {
                f = f.derivative();
            }
            for _ in 0..*pow {
                term = term.mul(&f);
            }
        }
        out = out.add(&term);
    }
    out
}

/// `u_a` on the slice `t_{>=2} = 0`, index `a - 1`.
///
/// The normal coordinates there are `w_a = delta_(a, r-1) x`; the triangular
/// Miura map `w_a = u_a / r + M_a(u_1 .. u_(a-1))` is inverted field by field.
pub fn initial_data(r: u32) -> Result<Vec<XPolynomial>> {
    check_r(r)?;
    let mut u: Vec<XPolynomial> = vec![XPolynomial::zero(); r as usize - 1];
    let r_q = qi(i64::from(r));
    for alpha in 1..r {
        let rem = miura_remainder(alpha, r)?;
        if rem.fields().iter().any(|&f| f >= alpha) {
            return Err(Error::InvariantViolation(format!(
                "Miura map is not triangular at w_{alpha}"
            )));
        }
        let w = if alpha == r - 1 {
            XPolynomial::linear(Rational::one())
        } else {
            XPolynomial::zero()
        };
        let m = substitute(&rem, &u);
        u[alpha as usize - 1] = w.add(&m.scale(&qi(-1))).scale(&r_q);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn kdv_flows() {
        let f1 = flow_rhs(1, 2).unwrap();
        assert_eq!(f1, vec![DiffPoly::var(1, 1)]);
        let f2 = flow_rhs(2, 2).unwrap();
        assert!(f2[0].is_zero());
        let f3 = flow_rhs(3, 2).unwrap();
        let expected = &DiffPoly::var(1, 3).scale(&q(1, 12))
            + &(&DiffPoly::var(1, 0) * &DiffPoly::var(1, 1)).scale(&q(1, 2));
        assert_eq!(f3[0], expected);
    }

    #[test]
    fn first_flow_is_translation() {
        for r in 2..5 {
            let f = flow_rhs(1, r).unwrap();
            for (i, k) in f.iter().enumerate() {
                assert_eq!(*k, DiffPoly::var(i as u32 + 1, 1));
            }
        }
    }

    #[test]
    fn commuting_examples() {
        assert!(flow_commute_check(1, 3, 2).unwrap());
        assert!(flow_commute_check(3, 5, 2).unwrap());
        assert!(flow_commute_check(1, 2, 3).unwrap());
    }

    #[test]
    fn a_wrong_flow_does_not_commute() {
        // perturbing the KdV flow breaks the symmetry with t_5
        let mut sys = FlowSystem::new(2).unwrap();
        let k5 = sys.flow(5).unwrap().to_vec();
        let k3 = sys.flow(3).unwrap().to_vec();
        let bad = vec![&k3[0] + &(&DiffPoly::var(1, 0) * &DiffPoly::var(1, 0))];
        assert_ne!(k5[0].prolong(&bad), bad[0].prolong(&k5));
    }

    #[test]
    fn densities_and_normal_coordinates() {
        assert_eq!(
            hamiltonian_density(1, 2).unwrap(),
            DiffPoly::var(1, 0).scale(&q(1, 2))
        );
        assert_eq!(
            normal_coordinate(1, 2).unwrap(),
            DiffPoly::var(1, 0).scale(&q(1, 2))
        );
        assert_eq!(
            normal_coordinate(1, 3).unwrap(),
            DiffPoly::var(1, 0).scale(&q(1, 3))
        );
        for r in 2..5u32 {
            for a in 1..r {
                assert!(normal_coordinate(a, r)
                    .unwrap()
                    .is_homogeneous(i64::from(a) + 1));
            }
        }
        // r | k: Res of an integer power of L vanishes
        assert!(hamiltonian_density(2, 2).unwrap().is_zero());
        assert!(hamiltonian_density(3, 3).unwrap().is_zero());
    }

    #[test]
    fn density_uses_shifted_index() {
        // h_{1,0} for r = 2 is h_3 / 3!!
        let h3 = hamiltonian_density(3, 2).unwrap();
        assert_eq!(density(1, 0, 2).unwrap(), h3.scale(&q(1, 3)));
        assert!(h3.is_homogeneous(4));
    }

    #[test]
    fn miura_examples() {
        assert!(miura_leading_check(1, 2).unwrap());
        assert!(miura_leading_check(1, 3).unwrap());
        assert!(miura_leading_check(2, 3).unwrap());
        assert!(!miura_remainder(2, 3).unwrap().is_zero());
        assert!(matches!(miura_leading_check(3, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn initial_data_examples() {
        let u3 = initial_data(3).unwrap();
        assert!(u3[0].is_zero());
        assert_eq!(u3[1], XPolynomial::linear(qi(3)));
        let u2 = initial_data(2).unwrap();
        assert_eq!(u2[0], XPolynomial::linear(qi(2)));
        for r in 2..6 {
            for f in initial_data(r).unwrap() {
                assert!(f.eval(&qi(0)).is_zero());
            }
        }
    }

    #[test]
    fn initial_data_round_trips_through_normal_coordinates() {
        for r in 2..5u32 {
            let u = initial_data(r).unwrap();
            for a in 1..r {
                let w = substitute(&normal_coordinate(a, r).unwrap(), &u);
                let expected = if a == r - 1 {
                    XPolynomial::linear(qi(1))
                } else {
                    XPolynomial::zero()
                };
                assert_eq!(w, expected, "r={r} a={a}");
            }
        }
    }

    #[test]
    fn initial_slope_matches_string_series() {
        for r in 2..5u32 {
            let u = initial_data(r).unwrap();
            let slope = u[r as usize - 2].coeff(1);
            assert_eq!(slope, crate::string_ops::potential_slope(r, 5).unwrap());
        }
    }
}

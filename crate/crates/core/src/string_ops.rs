//! String operators and the formal series `a(z)`, `d(z)`.
//!
//! `S_z z^k = (k - (r-1)/2) z^(k-r) - z^(k+1)` and its formal adjoint
//! `S_z* z^k = ((r-1)/2 - k) z^(k-r) - z^(k+1)`. The series
//! `a(z) = 1 + sum_k a_k z^(-(r+1)k)` is the unique solution of
//! `S_z^r a = (-z)^r a`, and `d(z) = 1 + sum_k d_k z^(-(r+1)k)` the unique
//! solution of `-S_z*(d(z)/z) = a(omega z)`.

use alloc::format;
use alloc::vec::Vec;

use num_traits::One;

use crate::error::{Error, Result};
use crate::series::{LaurentSeries, PhasedSeries};
use crate::{q, qi, Rational};

/// Truncation used for intermediate quantities that are exact polynomials.
const EXACT: i64 = 1 << 40;

fn check_r(r: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::Domain(format!("r must be >= 2, got {r}")));
    }
    Ok(())
}

/// `n (n-r) (n-2r) ...` down to the first factor in `1..=r`; equal to 1 for
/// `n` in `-(r-1)..=0`.
pub fn double_factorial_r(n: i64, r: u32) -> Result<Rational> {
    check_r(r)?;
    let r = i64::from(r);
    if n < -(r - 1) {
        return Err(Error::Domain(format!(
            "generalized double factorial undefined for n = {n} < -(r-1) = {}",
            -(r - 1)
        )));
    }
    let mut acc = Rational::one();
    let mut k = n;
    while k > 0 {
        acc *= qi(k);
        k -= r;
    }
    Ok(acc)
}

/// Flow normalization `alpha_m = 1 / m!_(r)!`.
pub fn alpha_coeff(m: i64, r: u32) -> Result<Rational> {
    if m < 1 {
        return Err(Error::Domain(format!("alpha_m needs m >= 1, got {m}")));
    }
    Ok(double_factorial_r(m, r)?.recip())
}

/// Shift weights `m_n = (n - r)!_(r)!`.
pub fn m_coeff(n: i64, r: u32) -> Result<Rational> {
    if n < 1 {
        return Err(Error::Domain(format!("m_n needs n >= 1, got {n}")));
    }
    double_factorial_r(n - i64::from(r), r)
}

fn s_weight(k: i64, r: u32) -> Rational {
    q(2 * k - i64::from(r) + 1, 2)
}

/// `S_z b`. The truncation drops by one: the `-z b` term is the only one that
/// lifts an unknown coefficient.
pub fn apply_s(b: &LaurentSeries, r: u32) -> LaurentSeries {
    let r64 = i64::from(r);
    LaurentSeries::new(
        b.terms()
            .flat_map(|(k, c)| [(k - r64, c * s_weight(k, r)), (k + 1, -c.clone())]),
        b.trunc() - 1,
    )
}

/// `S_z* b`.
pub fn apply_s_star(b: &LaurentSeries, r: u32) -> LaurentSeries {
    let r64 = i64::from(r);
    LaurentSeries::new(
        b.terms()
            .flat_map(|(k, c)| [(k - r64, -(c * s_weight(k, r))), (k + 1, -c.clone())]),
        b.trunc() - 1,
    )
}

pub fn apply_s_pow(b: &LaurentSeries, r: u32, n: usize) -> LaurentSeries {
    (0..n).fold(b.clone(), |acc, _| apply_s(&acc, r))
}

pub fn apply_s_star_pow(b: &LaurentSeries, r: u32, n: usize) -> LaurentSeries {
    (0..n).fold(b.clone(), |acc, _| apply_s_star(&acc, r))
}

impl PhasedSeries {
    /// `S_z` has rational coefficients, so only the body and class change.
    pub fn apply_s(&self) -> Result<PhasedSeries> {
        let body = apply_s(self.body(), self.r());
        self.with_body(body, shifted_class(self.residue_class(), self.r()))
    }

    pub fn apply_s_star(&self) -> Result<PhasedSeries> {
        let body = apply_s_star(self.body(), self.r());
        self.with_body(body, shifted_class(self.residue_class(), self.r()))
    }
}

fn shifted_class(c: u32, r: u32) -> u32 {
    (i64::from(c) - i64::from(r)).rem_euclid(i64::from(r) + 1) as u32
}

/// `z -> omega z` on a single-class series.
pub fn rotate_omega(b: &PhasedSeries) -> PhasedSeries {
    b.rotate()
}

/// `a(omega z)` for a class-0 series: phase 0, sign `(-1)^k` on block `k`.
pub fn rotated_rational(a: &LaurentSeries, r: u32) -> Result<LaurentSeries> {
    let p = PhasedSeries::new(a.clone(), r, 0, 0)?.rotate().normalized();
    debug_assert_eq!(p.phase(), 0);
    Ok(p.body().clone())
}

/// `S_z^r b - (-z)^r b`.
pub fn a_equation_residual(b: &LaurentSeries, r: u32) -> LaurentSeries {
    let lhs = apply_s_pow(b, r, r as usize);
    let sign = if r.is_multiple_of(2) { qi(1) } else { qi(-1) };
    let rhs = b.shift(i64::from(r)).scale(&sign);
    &lhs - &rhs
}

/// `-S_z*(d/z) - a(omega z)`.
pub fn d_equation_residual(d: &LaurentSeries, a: &LaurentSeries, r: u32) -> Result<LaurentSeries> {
    let lhs = -&apply_s_star(&d.shift(-1), r);
    Ok(&lhs - &rotated_rational(a, r)?)
}

/// Exact-truncation bound of an `a`/`d` series carrying `k` blocks: the next
/// unknown coefficient sits at `z^-((r+1)(k+1))`.
pub fn block_trunc(r: u32, k: usize) -> i64 {
    (i64::from(r) + 1) * (k as i64 + 1) - 1
}

/// `a(z)` through `a_K z^(-(r+1)K)`.
///
/// Each step adds the next block coefficient as the single unknown and solves
/// the highest-order coefficient of the residual that it touches.
pub fn solve_a(r: u32, order: usize) -> Result<LaurentSeries> {
    check_r(r)?;
    let block = i64::from(r) + 1;
    let mut a = LaurentSeries::one(EXACT);
    let mut residual = a_equation_residual(&a, r);
    for k in 1..=order as i64 {
        let exp = -block * k;
        let probe = a_equation_residual(&LaurentSeries::monomial(exp, qi(1), EXACT), r);
        let (lead, lead_coeff) = probe
            .terms()
            .next_back()
            .map(|(e, c)| (e, c.clone()))
            .ok_or_else(|| {
                Error::InvariantViolation("string operator annihilates a monomial".into())
            })?;
        let ak = -residual.coeff(lead)? / &lead_coeff;
        residual = &residual + &probe.scale(&ak);
        a = &a + &LaurentSeries::monomial(exp, ak, EXACT);
        if let Some(top) = residual.leading_exponent() {
            if top >= -block * (k + 1) {
                return Err(Error::InvariantViolation(format!(
                    "a-recursion left a nonzero residual at z^{top} after block {k}"
                )));
            }
        }
    }
    Ok(a.with_trunc(block_trunc(r, order)))
}

/// `d(z)` through `d_K z^(-(r+1)K)`.
pub fn solve_d(r: u32, order: usize) -> Result<LaurentSeries> {
    let a = solve_a(r, order)?;
    solve_d_from(&a, r, order)
}

/// `d(z)` given `a(z)` with at least `order` blocks.
pub fn solve_d_from(a: &LaurentSeries, r: u32, order: usize) -> Result<LaurentSeries> {
    check_r(r)?;
    let block = i64::from(r) + 1;
    let trunc = block_trunc(r, order);
    if a.trunc() < trunc {
        return Err(Error::InsufficientPrecision(format!(
            "d needs a(z) exact to z^-{trunc}, have z^-{}",
            a.trunc()
        )));
    }
    let target = rotated_rational(&a.with_trunc(trunc), r)?;
    let lhs_of = |d: &LaurentSeries| -&apply_s_star(&d.shift(-1), r);
    let mut d = LaurentSeries::one(EXACT);
    let mut residual = &lhs_of(&d) - &target;
    for k in 1..=order as i64 {
        let exp = -block * k;
        let probe = lhs_of(&LaurentSeries::monomial(exp, qi(1), EXACT));
        let (lead, lead_coeff) = probe
            .terms()
            .next_back()
            .map(|(e, c)| (e, c.clone()))
            .ok_or_else(|| Error::InvariantViolation("S* annihilates a monomial".into()))?;
        let dk = -residual.coeff(lead)? / &lead_coeff;
        residual = &residual + &probe.scale(&dk);
        d = &d + &LaurentSeries::monomial(exp, dk, EXACT);
        if let Some(top) = residual.leading_exponent() {
            if top > -block * (k + 1) {
                return Err(Error::InvariantViolation(format!(
                    "d-recursion left a nonzero residual at z^{top} after block {k}"
                )));
            }
        }
    }
    Ok(d.with_trunc(trunc))
}

/// Block coefficients `c_1..c_K` of a class-0 series `1 + sum c_k z^(-(r+1)k)`.
pub fn block_coefficients(s: &LaurentSeries, r: u32, order: usize) -> Result<Vec<Rational>> {
    let block = i64::from(r) + 1;
    (1..=order as i64).map(|k| s.coeff(-block * k)).collect()
}

/// `a(z)`, `d(z)` and the numbers derived from them for one `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringSeriesBundle {
    pub r: u32,
    pub order: usize,
    pub a: LaurentSeries,
    pub d: LaurentSeries,
}

impl StringSeriesBundle {
    pub fn new(r: u32, order: usize) -> Result<Self> {
        let a = solve_a(r, order)?;
        let d = solve_d_from(&a, r, order)?;
        Ok(StringSeriesBundle { r, order, a, d })
    }

    pub fn a_coeffs(&self) -> Vec<Rational> {
        block_coefficients(&self.a, self.r, self.order).expect("bundle keeps its own order")
    }

    pub fn d_coeffs(&self) -> Vec<Rational> {
        block_coefficients(&self.d, self.r, self.order).expect("bundle keeps its own order")
    }

    /// `g_n`: equals `d_k` when `n = (r+1)k` and vanishes otherwise.
    pub fn g_coeff(&self, n: usize) -> Result<Rational> {
        self.d.coeff(-(n as i64))
    }

    /// `a(omega z)` as a phased series (always phase 0 here).
    pub fn rotated_a(&self) -> PhasedSeries {
        PhasedSeries::new(self.a.clone(), self.r, 0, 0)
            .expect("a(z) lies in class 0")
            .rotate()
    }
}

/// `sum_{k=0}^{r-1} S*^(r-1-k)(a(omega z)) S^k a(z)`, evaluated in the phase
/// algebra. The value is `(-1)^(r-1) r z^(r-1)` on every retained order.
pub fn concomitant_sum(r: u32, order: usize) -> Result<LaurentSeries> {
    check_r(r)?;
    let a = solve_a(r, order)?;
    let a_phased = PhasedSeries::new(a, r, 0, 0)?;
    let rotated = a_phased.rotate();
    let mut total: Option<PhasedSeries> = None;
    let mut s_pows = Vec::with_capacity(r as usize);
    let mut cur = a_phased;
    for _ in 0..r {
        s_pows.push(cur.clone());
        cur = cur.apply_s()?;
    }
    let mut star_pows = Vec::with_capacity(r as usize);
    let mut cur = rotated;
    for _ in 0..r {
        star_pows.push(cur.clone());
        cur = cur.apply_s_star()?;
    }
    for k in 0..r as usize {
        let term = star_pows[r as usize - 1 - k].mul(&s_pows[k])?;
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term)?,
        });
    }
    let total = total.expect("r >= 2 summands").normalized();
    if total.phase() != 0 {
        return Err(Error::InvariantViolation(format!(
            "concomitant summands carry phase omega^{}",
            total.phase()
        )));
    }
    let body = total.body().clone();
    if body.trunc() < 1 {
        return Err(Error::InsufficientPrecision(format!(
            "concomitant at order {order} is exact only to z^{}; increase --order",
            -body.trunc()
        )));
    }
    Ok(body)
}

/// The expected concomitant value `(-1)^(r-1) r z^(r-1)`.
pub fn concomitant_expected(r: u32, trunc: i64) -> LaurentSeries {
    let sign = if r % 2 == 1 { 1 } else { -1 };
    LaurentSeries::monomial(i64::from(r) - 1, qi(sign * i64::from(r)), trunc)
}

/// Smallest block count that makes `Res S*^m(a(omega z)) S^n a(z)` exact.
pub fn ortho_required_order(r: u32, m: usize, n: usize) -> usize {
    let block = r as usize + 1;
    // need (r+1)(K+1) - 1 - m - n >= 1
    (m + n + 2).div_ceil(block).saturating_sub(1)
}

/// `Res_{z=inf} S*^m(b(z)) S^n a(z)` for an arbitrary `b` (normally
/// `a(omega z)`).
pub fn ortho_residue_with(
    b: &LaurentSeries,
    a: &LaurentSeries,
    r: u32,
    m: usize,
    n: usize,
) -> Result<Rational> {
    let left = apply_s_star_pow(b, r, m);
    let right = apply_s_pow(a, r, n);
    (&left * &right).residue().map_err(|_| {
        Error::InsufficientPrecision(format!(
            "residue for (m, n) = ({m}, {n}) is not exact; increase --order"
        ))
    })
}

/// `Res_{z=inf} S*^m(a(omega z)) S^n a(z)` with `a` carrying `order` blocks.
pub fn ortho_residue(r: u32, m: usize, n: usize, order: usize) -> Result<Rational> {
    let a = solve_a(r, order)?;
    let b = rotated_rational(&a, r)?;
    ortho_residue_with(&b, &a, r, m, n)
}

/// [`ortho_residue`] with the order chosen by [`ortho_required_order`].
pub fn ortho_residue_auto(r: u32, m: usize, n: usize) -> Result<Rational> {
    ortho_residue(r, m, n, ortho_required_order(r, m, n))
}

/// Residues for every `0 <= m, n <= max`, sharing the powers of `S` and `S*`.
/// Row index is `m`, column index `n`.
pub fn ortho_matrix(r: u32, max: usize, order: usize) -> Result<Vec<Vec<Rational>>> {
    let a = solve_a(r, order)?;
    let b = rotated_rational(&a, r)?;
    ortho_matrix_with(&b, &a, r, max)
}

pub fn ortho_matrix_with(
    b: &LaurentSeries,
    a: &LaurentSeries,
    r: u32,
    max: usize,
) -> Result<Vec<Vec<Rational>>> {
    let mut lefts = Vec::with_capacity(max + 1);
    let mut rights = Vec::with_capacity(max + 1);
    let (mut l, mut rt) = (b.clone(), a.clone());
    for _ in 0..=max {
        lefts.push(l.clone());
        rights.push(rt.clone());
        l = apply_s_star(&l, r);
        rt = apply_s(&rt, r);
    }
    lefts
        .iter()
        .enumerate()
        .map(|(m, left)| {
            rights
                .iter()
                .enumerate()
                .map(|(n, right)| {
                    (left * right).residue().map_err(|_| {
                        Error::InsufficientPrecision(format!(
                            "residue for (m, n) = ({m}, {n}) is not exact; increase --order"
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * qi(k))
}

/// Taylor coefficients in `x` of the wave function slice:
/// `f(x; z) = sum_n (-1)^n/n! S^n a(z) x^n`.
pub fn wave_slice_coefficients(r: u32, order: usize, count: usize) -> Result<Vec<LaurentSeries>> {
    let a = solve_a(r, order)?;
    let mut out = Vec::with_capacity(count + 1);
    let mut cur = a;
    for n in 0..=count {
        let sign = if n % 2 == 0 { qi(1) } else { qi(-1) };
        out.push(cur.scale(&(sign / factorial(n))));
        cur = apply_s(&cur, r);
    }
    Ok(out)
}

/// `Res d(z) (-1)^n/n! S^n a(z) z^-1` for `n = 0..=count`: the `x^n`
/// coefficient of `Psi` at `t_{>=2} = 0`. Expected `(1, 0, 0, ...)`.
pub fn psi_initial_check(r: u32, order: usize, count: usize) -> Result<Vec<Rational>> {
    let bundle = StringSeriesBundle::new(r, order)?;
    let slices = wave_slice_coefficients(r, order, count)?;
    slices
        .iter()
        .enumerate()
        .map(|(n, f)| {
            (&bundle.d * f).shift(-1).residue().map_err(|_| {
                Error::InsufficientPrecision(format!(
                    "Psi coefficient x^{n} is not exact at order {order}; increase --order"
                ))
            })
        })
        .collect()
}

/// Smallest block count for which [`psi_initial_check`] is exact up to `count`.
pub fn psi_required_order(r: u32, count: usize) -> usize {
    // trunc of d * S^n a / z is (r+1)(K+1) - n, needs >= 1
    count.div_ceil(r as usize + 1)
}

/// The slope `c` of the potential `u_(r-1) = c x` on the `t_{>=2} = 0` slice,
/// read off from `a(z)`: the `x^1` part of `L f = z^r f` is
/// `(-1)^(r+1) S^(r+1) a + c a + z^r S a = 0`.
pub fn potential_slope(r: u32, order: usize) -> Result<Rational> {
    let a = solve_a(r, order)?;
    let sign = if r.is_multiple_of(2) { qi(1) } else { qi(-1) };
    let top = apply_s_pow(&a, r, r as usize + 1).scale(&sign);
    let lower = apply_s(&a, r).shift(i64::from(r));
    let rem = &top - &lower;
    let c = rem.coeff(0)?;
    let check = &rem - &a.scale(&c);
    if !check.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "x-slice of the Lax equation is not a constant multiple of a(z): {check}"
        )));
    }
    Ok(c)
}

//! Numerical evaluation of the Pearcey-type integrals
//!
//! ```text
//! A(z) = -i/sqrt(2 pi) z^((r-1)/2) e^(z^(r+1)/(r+1)) int_G  exp[ w^(r+1)/((r+1)r) - w z^r/r] dw
//! D(z) = -i omega^((r+1)/2)/sqrt(2 pi) z^((r+1)/2) e^(-z^(r+1)/(r+1))
//!            int_(G/omega) w^-1 exp[-w^(r+1)/((r+1)r) + w z^r/r] dw
//! ```
//!
//! with `G` running from `infinity e^(-i pi/(r+1))` to `infinity e^(i pi/(r+1))`.
//! The sign of `A`'s prefactor is the one that gives `A = 1 + O(1/z)`.
//!
//! Both integrals are evaluated on steepest-descent paths. The saddles are
//! `w = z zeta` with `zeta^r = 1`; writing `w = z zeta (1 + v)` the exponent
//! relative to a saddle is `+-lambda zeta F(v)`, with `lambda = z^(r+1)/r` and
//! `F(v) = ((1+v)^(r+1) - 1)/(r+1) - v`. Each path is parametrized by
//! `lambda zeta F(v(s)) = -s^2`, so the integrand is `e^(-s^2) v'(s)` and no
//! cancellation occurs. The contour is the chain of saddle paths joining its
//! two end valleys; past a Stokes line this picks up subdominant saddles. The
//! index of the `D` contour about `w = 0` is read off the traced chain and
//! corrected with a numerically integrated circle.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// Needed for the float methods on targets without std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::string_ops::{block_coefficients, solve_a, solve_d};

pub type Complex = Complex64;

/// Which integral: `A(z)` with expansion `a(z)`, or `D(z)` with `d(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    A,
    D,
}

/// Contour and quadrature settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    pub r: u32,
    /// Radius of the circle around `w = 0` used for index corrections. The
    /// sign picks the side the contour passes the origin on: positive is the
    /// saddle side (index 0), negative the opposite side (index 1).
    pub origin_detour: f64,
    /// Gauss nodes on each half of the path (rounded up to whole 16-point
    /// panels).
    pub nodes_per_ray: usize,
    /// Absolute accuracy goal. The path is cut where `e^(-s^2)` is six orders
    /// below it.
    pub tolerance: f64,
}

const PANEL: usize = 16;
const MAX_NODES: usize = 1 << 14;
const CIRCLE_NODES: usize = 128;

impl ContourSpec {
    pub fn new(r: u32) -> Self {
        ContourSpec {
            r,
            origin_detour: 0.25,
            nodes_per_ray: 128,
            tolerance: 1e-10,
        }
    }

    pub fn with_nodes(mut self, nodes_per_ray: usize) -> Self {
        self.nodes_per_ray = nodes_per_ray;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_detour(mut self, origin_detour: f64) -> Self {
        self.origin_detour = origin_detour;
        self
    }

    /// Incoming asymptotic direction of `G`.
    pub fn ray_in(&self) -> Complex {
        Complex::from_polar(1.0, -PI / (f64::from(self.r) + 1.0))
    }

    /// Outgoing asymptotic direction of `G`.
    pub fn ray_out(&self) -> Complex {
        Complex::from_polar(1.0, PI / (f64::from(self.r) + 1.0))
    }

    /// Path parameter where the integrand `e^(-s^2)` drops below
    /// `tolerance * 1e-6`.
    pub fn cutoff(&self) -> f64 {
        (-(self.tolerance * 1e-6).ln()).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::Domain(format!("r must be >= 2, got {}", self.r)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Configuration("tolerance must be positive".into()));
        }
        if self.nodes_per_ray < PANEL {
            return Err(Error::Configuration(format!(
                "nodes_per_ray must be at least {PANEL}"
            )));
        }
        Ok(())
    }
}

/// Sector `{|arg z| < pi/r}` where `A(z) ~ a(z)`, as `(lo, hi)` in radians.
pub fn sector_a(r: u32) -> (f64, f64) {
    let h = PI / f64::from(r);
    (-h, h)
}

/// Sector `omega^-1 {|arg z| < pi/r}` where `D(z) ~ d(z)`.
pub fn sector_d(r: u32) -> (f64, f64) {
    let h = PI / f64::from(r);
    let s = PI / (f64::from(r) + 1.0);
    (-h - s, h - s)
}

pub fn sector(which: Which, r: u32) -> (f64, f64) {
    match which {
        Which::A => sector_a(r),
        Which::D => sector_d(r),
    }
}

pub fn in_sector(which: Which, r: u32, z: Complex) -> bool {
    let (lo, hi) = sector(which, r);
    let t = z.arg();
    !z.is_zero() && t > lo && t < hi
}

fn check_sector(which: Which, r: u32, z: Complex) -> Result<()> {
    if in_sector(which, r, z) {
        return Ok(());
    }
    let (lo, hi) = sector(which, r);
    let name = match which {
        Which::A => "S = {|arg z| < pi/r}",
        Which::D => "omega^-1 S = {-pi/r - pi/(r+1) < arg z < pi/r - pi/(r+1)}",
    };
    Err(Error::Domain(format!(
        "z = {} + {}i (arg {:.6}) lies outside the sector {name}, i.e. arg z in ({lo:.6}, {hi:.6})",
        z.re,
        z.im,
        z.arg()
    )))
}

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// `F(v) = sum_{j=2}^{r+1} C(r+1, j) v^j / (r+1)` and `F'(v) = (1+v)^r - 1`,
/// expanded so small `v` keeps full relative precision.
struct Phase {
    f_coeffs: Vec<f64>,
    df_coeffs: Vec<f64>,
}

impl Phase {
    fn new(r: u32) -> Self {
        let n = r as usize + 1;
        let mut binom = alloc::vec![1.0f64; n + 1];
        for j in 1..=n {
            binom[j] = binom[j - 1] * (n + 1 - j) as f64 / j as f64;
        }
        let mut f_coeffs = alloc::vec![0.0; n + 1];
        for j in 2..=n {
            f_coeffs[j] = binom[j] / n as f64;
        }
        let df_coeffs: Vec<f64> = (0..n).map(|j| f_coeffs[j + 1] * (j + 1) as f64).collect();
        Phase {
            f_coeffs,
            df_coeffs,
        }
    }

    fn horner(c: &[f64], v: Complex) -> Complex {
        c.iter()
            .rev()
            .fold(Complex::zero(), |acc, &k| acc * v + Complex::new(k, 0.0))
    }

    fn f(&self, v: Complex) -> Complex {
        Self::horner(&self.f_coeffs, v)
    }

    fn df(&self, v: Complex) -> Complex {
        Self::horner(&self.df_coeffs, v)
    }
}

struct PathPoint {
    v: Complex,
    dv_ds: Complex,
}

struct Branch {
    nodes: Vec<PathPoint>,
    /// `1 + v` far out on the path, for valley identification.
    far: Complex,
    /// Accumulated change of `arg(1 + v)` from the saddle to `far`.
    winding_arg: f64,
}

/// Follows `lambda F(v(s)) = -s^2` from the saddle with initial direction
/// `sign * sqrt(-2/(lambda r))`, recording the path at the given `s` values
/// (increasing) and then continuing far out.
fn trace_branch(phase: &Phase, lambda: Complex, r: u32, sign: f64, at: &[f64]) -> Result<Branch> {
    let d0 = (Complex::new(-2.0, 0.0) / (lambda * f64::from(r))).sqrt() * sign;
    let slope = |s: f64, v: Complex| -> Complex {
        if s == 0.0 {
            d0
        } else {
            Complex::new(-2.0 * s, 0.0) / (lambda * phase.df(v))
        }
    };
    let newton = |s: f64, mut v: Complex| -> Option<Complex> {
        for _ in 0..60 {
            let dfv = lambda * phase.df(v);
            if dfv.norm() < 1e-300 {
                return None;
            }
            let step = (lambda * phase.f(v) + s * s) / dfv;
            v -= step;
            if !v.re.is_finite() || !v.im.is_finite() {
                return None;
            }
            if step.norm() <= 1e-15 * (1.0 + v.norm()) {
                return Some(v);
            }
        }
        None
    };

    let mut s = 0.0f64;
    let mut v = Complex::zero();
    let mut arg_acc = 0.0f64;
    let scale = (1.0 / lambda.norm()).sqrt().min(1.0);
    let advance = |s: &mut f64, v: &mut Complex, target: f64, arg_acc: &mut f64| -> Result<()> {
        while *s < target {
            let mut h = (target - *s).min(0.05 * s.max(1.0));
            loop {
                let pred = *v + slope(*s, *v) * h;
                let ok = newton(*s + h, pred).filter(|nv| {
                    (*nv - pred).norm() <= 0.25 * (slope(*s, *v) * h).norm() + 1e-12 * scale
                });
                match ok {
                    Some(nv) => {
                        let ratio = (Complex::new(1.0, 0.0) + nv) / (Complex::new(1.0, 0.0) + *v);
                        *arg_acc += ratio.arg();
                        *v = nv;
                        *s += h;
                        break;
                    }
                    None => {
                        h *= 0.5;
                        if h < 1e-10 {
                            return Err(Error::InsufficientPrecision(format!(
                                "steepest-descent path stalls at s = {s:.6} (z on or near a Stokes line)"
                            )));
                        }
                    }
                }
            }
            if (lambda * phase.df(*v)).norm() < 1e-9 * (1.0 + lambda.norm()) {
                return Err(Error::InsufficientPrecision(
                    "steepest-descent path runs into another saddle (z on a Stokes line)".into(),
                ));
            }
        }
        Ok(())
    };

    let mut nodes = Vec::with_capacity(at.len());
    for &target in at {
        advance(&mut s, &mut v, target, &mut arg_acc)?;
        nodes.push(PathPoint {
            v,
            dv_ds: slope(s, v),
        });
    }
    // go far out so that 1 + v points into its valley
    let mut target = s.max(1.0);
    while (Complex::new(1.0, 0.0) + v).norm() < 200.0 {
        target *= 2.0;
        if target > 1e12 {
            return Err(Error::InsufficientPrecision(
                "steepest-descent path does not escape to infinity".into(),
            ));
        }
        advance(&mut s, &mut v, target, &mut arg_acc)?;
    }
    Ok(Branch {
        nodes,
        far: Complex::new(1.0, 0.0) + v,
        winding_arg: arg_acc,
    })
}

/// Quadrature nodes and weights in `s` on `[0, cutoff]`.
fn s_grid(nodes_per_ray: usize, cutoff: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = nodes_per_ray.div_ceil(PANEL).max(1);
    let (x, w) = gauss_legendre(PANEL);
    let width = cutoff / panels as f64;
    let mut s = Vec::with_capacity(panels * PANEL);
    let mut ws = Vec::with_capacity(panels * PANEL);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(w.iter()) {
            s.push(mid + 0.5 * width * xi);
            ws.push(0.5 * width * wi);
        }
    }
    (s, ws)
}

/// Valley index `j` such that `arg w` is near `(offset + 2 pi j)/(r+1)`.
fn valley(w: Complex, r: u32, offset: f64) -> (i64, f64) {
    let n = f64::from(r) + 1.0;
    let x = (n * w.arg() - offset) / (2.0 * PI);
    let j = x.round();
    ((j as i64).rem_euclid(i64::from(r) + 1), (x - j).abs())
}

/// One saddle's steepest-descent path, oriented from valley `from` to `to`,
/// in the coordinate `u = w/z`.
struct SaddlePath {
    from: i64,
    to: i64,
    /// `int exp(phase - phase at the saddle) amp dv` from `from` to `to`.
    value: Complex,
    magnitude: f64,
    /// Change of `arg u` from the `from` end to the `to` end.
    arg_change: f64,
    far_from: Complex,
    far_to: Complex,
}

fn saddle_path<A>(
    z: Complex,
    zeta: Complex,
    lambda: Complex,
    r: u32,
    valley_offset: f64,
    grid: &(Vec<f64>, Vec<f64>),
    amp: &A,
) -> Result<SaddlePath>
where
    A: Fn(Complex) -> Result<Complex>,
{
    let phase = Phase::new(r);
    let (s, ws) = grid;
    let plus = trace_branch(&phase, lambda, r, 1.0, s)?;
    let minus = trace_branch(&phase, lambda, r, -1.0, s)?;
    let (to, dp) = valley(z * zeta * plus.far, r, valley_offset);
    let (from, dm) = valley(z * zeta * minus.far, r, valley_offset);
    if dp > 0.25 || dm > 0.25 || to == from {
        return Err(Error::InsufficientPrecision(
            "steepest-descent path does not end in two distinct valleys (z on a Stokes line)"
                .into(),
        ));
    }
    let mut value = Complex::zero();
    let mut magnitude = 0.0;
    for ((sv, wv), (pp, pm)) in s
        .iter()
        .zip(ws.iter())
        .zip(plus.nodes.iter().zip(minus.nodes.iter()))
    {
        let e = (-sv * sv).exp() * wv;
        let a = amp(pp.v)? * pp.dv_ds * e;
        let b = amp(pm.v)? * pm.dv_ds * e;
        magnitude += a.norm() + b.norm();
        value += a - b;
    }
    Ok(SaddlePath {
        from,
        to,
        value,
        magnitude,
        arg_change: plus.winding_arg - minus.winding_arg,
        far_from: zeta * minus.far,
        far_to: zeta * plus.far,
    })
}

struct ContourIntegral {
    /// In units of `dv` at the saddle `w = z`, relative to the phase there.
    value: Complex,
    magnitude: f64,
    /// Winding (in radians) of `w` from the incoming end to the outgoing end.
    arg_change: f64,
    far_in: Complex,
    far_out: Complex,
}

/// Integral from valley `r` to valley `0` of `exp(sigma phi(w) - sigma phi(z))`
/// with `phi(w) = w^(r+1)/((r+1)r) - w z^r/r`, written as a chain of
/// steepest-descent paths through the saddles `w = z zeta`, `zeta^r = 1`.
/// `amp` acts on `v` with `w = z zeta (1+v)`; `jacobian` says whether `dw`
/// (true) or `dw/w` (false) is integrated.
#[allow(clippy::too_many_arguments)]
fn contour_integral<A>(
    z: Complex,
    sigma: f64,
    r: u32,
    valley_offset: f64,
    nodes_per_ray: usize,
    cutoff: f64,
    jacobian: bool,
    amp: A,
) -> Result<ContourIntegral>
where
    A: Fn(Complex) -> Result<Complex>,
{
    let rf = f64::from(r);
    let zr1 = z.powu(r + 1);
    let grid = s_grid(nodes_per_ray, cutoff);
    let mut paths = Vec::with_capacity(r as usize);
    let mut first_error = None;
    for k in 0..r {
        let zeta = Complex::from_polar(1.0, 2.0 * PI * f64::from(k) / rf);
        let lambda = zr1 * zeta * (sigma / rf);
        match saddle_path(z, zeta, lambda, r, valley_offset, &grid, &amp) {
            Ok(p) => paths.push((zeta, p)),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let chain = valley_chain(&paths, i64::from(r), 0).ok_or_else(|| {
        first_error.unwrap_or_else(|| {
            Error::InsufficientPrecision(
                "no chain of steepest-descent paths joins the end valleys".into(),
            )
        })
    })?;

    let mut value = Complex::zero();
    let mut magnitude = 0.0;
    let mut arg_change = 0.0;
    let mut prev_end: Option<Complex> = None;
    let mut far_in = Complex::zero();
    for (idx, forward) in &chain {
        let (zeta, p) = &paths[*idx];
        let weight = (zr1 * (*zeta - 1.0) * (-sigma / (rf + 1.0))).exp();
        let weight = if jacobian { weight * zeta } else { weight };
        let orient = if *forward { 1.0 } else { -1.0 };
        let (start, end) = if *forward {
            (p.far_from, p.far_to)
        } else {
            (p.far_to, p.far_from)
        };
        value += weight * p.value * orient;
        magnitude += weight.norm() * p.magnitude;
        arg_change += orient * p.arg_change;
        match prev_end {
            Some(e) => arg_change += wrap(start.arg() - e.arg()),
            None => far_in = z * start,
        }
        prev_end = Some(end);
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::InsufficientPrecision(
            "saddle contribution overflows double precision".into(),
        ));
    }
    Ok(ContourIntegral {
        value,
        magnitude,
        arg_change,
        far_in,
        far_out: z * prev_end.expect("chain is nonempty"),
    })
}

/// Path of saddle edges from valley `start` to `goal`, as (index, forward).
fn valley_chain(
    paths: &[(Complex, SaddlePath)],
    start: i64,
    goal: i64,
) -> Option<Vec<(usize, bool)>> {
    let mut prev: Vec<Option<(i64, usize, bool)>> = alloc::vec![None; paths.len() + 2];
    let mut seen = alloc::vec![false; paths.len() + 2];
    let slot = |v: i64| v as usize;
    let mut queue = alloc::collections::VecDeque::from([start]);
    seen[slot(start)] = true;
    while let Some(v) = queue.pop_front() {
        if v == goal {
            break;
        }
        for (i, (_, p)) in paths.iter().enumerate() {
            let next = if p.from == v {
                Some((p.to, true))
            } else if p.to == v {
                Some((p.from, false))
            } else {
                None
            };
            if let Some((n, fwd)) = next {
                if slot(n) < seen.len() && !seen[slot(n)] {
                    seen[slot(n)] = true;
                    prev[slot(n)] = Some((v, i, fwd));
                    queue.push_back(n);
                }
            }
        }
    }
    if !seen[slot(goal)] {
        return None;
    }
    let mut chain = Vec::new();
    let mut v = goal;
    while v != start {
        let (p, i, fwd) = prev[slot(v)]?;
        chain.push((i, fwd));
        v = p;
    }
    chain.reverse();
    Some(chain)
}

/// Result of one quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex,
    /// `|I_N - I_(N/2)|` plus a rounding floor.
    pub error_estimate: f64,
    /// Nodes per half-path actually used.
    pub nodes_per_ray: usize,
}

fn principal_pow(z: Complex, p: f64) -> Complex {
    Complex::from_polar(z.norm().powf(p), z.arg() * p)
}

fn wrap(x: f64) -> f64 {
    let y = num_traits::Euclid::rem_euclid(&(x + PI), &(2.0 * PI)) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

fn eval_raw(which: Which, z: Complex, spec: &ContourSpec, nodes: usize) -> Result<(Complex, f64)> {
    let r = spec.r;
    let rf = f64::from(r);
    let cutoff = spec.cutoff();
    let sqrt_2pi = (2.0 * PI).sqrt();
    match which {
        Which::A => {
            let p = contour_integral(z, 1.0, r, PI, nodes, cutoff, true, |_| {
                Ok(Complex::new(1.0, 0.0))
            })?;
            let pref = Complex::new(0.0, -1.0 / sqrt_2pi) * principal_pow(z, (rf - 1.0) / 2.0) * z;
            Ok((pref * p.value, pref.norm() * p.magnitude))
        }
        Which::D => {
            let eps = spec.origin_detour.abs();
            if spec.origin_detour == 0.0 || !eps.is_finite() {
                return Err(Error::Configuration(
                    "origin_detour must be nonzero: the contour may not pass through w = 0".into(),
                ));
            }
            if eps >= 0.5 * z.norm() {
                return Err(Error::Configuration(format!(
                    "detour radius {eps} reaches the saddle region (|z| = {})",
                    z.norm()
                )));
            }
            let p = contour_integral(z, -1.0, r, 0.0, nodes, cutoff, false, |v| {
                let den = Complex::new(1.0, 0.0) + v;
                if den.norm() < 1e-8 {
                    return Err(Error::InsufficientPrecision(
                        "steepest-descent path passes through the pole w = 0".into(),
                    ));
                }
                Ok(den.inv())
            })?;
            // winding of (descent path - reference contour) about w = 0
            let n = rf + 1.0;
            let theta_in = -2.0 * PI / n;
            let theta_out = 0.0;
            let total = p.arg_change + wrap(theta_out - p.far_out.arg()) - 2.0 * PI / n
                + wrap(p.far_in.arg() - theta_in);
            let winding = (total / (2.0 * PI)).round();
            if (total - 2.0 * PI * winding).abs() > 0.1 {
                return Err(Error::InsufficientPrecision(
                    "could not determine the contour index about w = 0".into(),
                ));
            }
            let mut integral = p.value;
            let mut magnitude = p.magnitude;
            let index_shift = if spec.origin_detour > 0.0 { 0.0 } else { 1.0 };
            let loops = -winding - index_shift;
            if loops != 0.0 {
                let circle = origin_circle(&Phase::new(r), -z.powu(r + 1) / rf, eps / z.norm())?;
                integral += circle * loops;
                magnitude += circle.norm() * loops.abs();
            }
            let pref = Complex::new(1.0 / sqrt_2pi, 0.0) * principal_pow(z, (rf + 1.0) / 2.0);
            Ok((pref * integral, pref.norm() * magnitude))
        }
    }
}

/// `oint exp(lambda F(v)) dv/(1+v)` counterclockwise on `|1 + v| = rho`.
fn origin_circle(phase: &Phase, lambda: Complex, rho: f64) -> Result<Complex> {
    let mut acc = Complex::zero();
    for k in 0..CIRCLE_NODES {
        let t = 2.0 * PI * k as f64 / CIRCLE_NODES as f64;
        let v = Complex::new(-1.0, 0.0) + Complex::from_polar(rho, t);
        acc += (lambda * phase.f(v)).exp();
    }
    let val = acc * Complex::new(0.0, 2.0 * PI / CIRCLE_NODES as f64);
    if !val.re.is_finite() || !val.im.is_finite() {
        return Err(Error::InsufficientPrecision(
            "residue at w = 0 overflows double precision".into(),
        ));
    }
    Ok(val)
}

/// Evaluates `A(z)` or `D(z)`, doubling the node count until the estimated
/// error is below `spec.tolerance`.
pub fn eval(which: Which, z: Complex, spec: &ContourSpec) -> Result<Evaluation> {
    spec.validate()?;
    check_sector(which, spec.r, z)?;
    let mut nodes = spec.nodes_per_ray.div_ceil(PANEL) * PANEL;
    let (mut coarse, _) = eval_raw(which, z, spec, (nodes / 2).max(PANEL))?;
    loop {
        let (fine, mag) = eval_raw(which, z, spec, nodes)?;
        let estimate = (fine - coarse).norm() + 64.0 * f64::EPSILON * mag.max(fine.norm());
        if estimate <= spec.tolerance || nodes >= MAX_NODES {
            if estimate > spec.tolerance {
                return Err(Error::InsufficientPrecision(format!(
                    "quadrature error estimate {estimate:e} above tolerance {:e} at {nodes} nodes",
                    spec.tolerance
                )));
            }
            return Ok(Evaluation {
                value: fine,
                error_estimate: estimate,
                nodes_per_ray: nodes,
            });
        }
        coarse = fine;
        nodes *= 2;
    }
}

pub fn eval_a(z: Complex, spec: &ContourSpec) -> Result<Evaluation> {
    eval(Which::A, z, spec)
}

pub fn eval_d(z: Complex, spec: &ContourSpec) -> Result<Evaluation> {
    eval(Which::D, z, spec)
}

/// `1 + sum_{k=1}^{K} c_k z^(-(r+1)k)`.
pub fn series_value(coeffs: &[f64], r: u32, z: Complex) -> Complex {
    let step = z.powi(-(r as i32 + 1));
    let mut pw = Complex::new(1.0, 0.0);
    let mut acc = Complex::new(1.0, 0.0);
    for c in coeffs {
        pw *= step;
        acc += pw * *c;
    }
    acc
}

/// Block coefficients of `a(z)` or `d(z)` as floats.
pub fn series_coefficients(which: Which, r: u32, order: usize) -> Result<Vec<f64>> {
    let s = match which {
        Which::A => solve_a(r, order)?,
        Which::D => solve_d(r, order)?,
    };
    block_coefficients(&s, r, order)?
        .iter()
        .map(|c| {
            c.to_f64()
                .ok_or_else(|| Error::InvariantViolation("coefficient not representable".into()))
        })
        .collect()
}

/// Quadrature value against the `K`-term asymptotic series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticComparison {
    pub z: Complex,
    pub value: Complex,
    pub truncation: Complex,
    pub terms: usize,
    pub gap: f64,
    /// `|c_(K+1)| / |z|^((r+1)(K+1))`.
    pub next_term: f64,
    /// `2 * next_term`.
    pub bound: f64,
    pub error_estimate: f64,
}

impl AsymptoticComparison {
    pub fn passes(&self) -> bool {
        self.gap <= self.bound
    }
}

/// `|numeric value - K-term truncation|` together with the next-term bound.
pub fn asym_compare(
    which: Which,
    z: Complex,
    terms: usize,
    spec: &ContourSpec,
) -> Result<AsymptoticComparison> {
    let eval = eval(which, z, spec)?;
    let coeffs = series_coefficients(which, spec.r, terms + 1)?;
    let truncation = series_value(&coeffs[..terms], spec.r, z);
    let n = (spec.r as i32 + 1) * (terms as i32 + 1);
    let next_term = coeffs[terms].abs() / z.norm().powi(n);
    Ok(AsymptoticComparison {
        z,
        value: eval.value,
        truncation,
        terms,
        gap: (eval.value - truncation).norm(),
        next_term,
        bound: 2.0 * next_term,
        error_estimate: eval.error_estimate,
    })
}

pub fn asym_gap(which: Which, z: Complex, terms: usize, spec: &ContourSpec) -> Result<f64> {
    asym_compare(which, z, terms, spec).map(|c| c.gap)
}

/// The complementary solution `sqrt(2 pi) z^((r+1)/2) e^(-z^(r+1)/(r+1))`
/// that an index-1 contour adds to `D` (up to a constant factor).
pub fn complementary_solution(r: u32, z: Complex) -> Complex {
    let rf = f64::from(r);
    principal_pow(z, (rf + 1.0) / 2.0) * (-z.powu(r + 1) / (rf + 1.0)).exp() * (2.0 * PI).sqrt()
}

//! Floating-point checks of the residue pairing on model charts
//! `t = z_0^{e_0} ⋯ z_k^{e_k}`.
//!
//! Test functions are separable and radial, `η(z) = Π h_i(|z_i|²)`, so every
//! chart integral is a product of one-dimensional integrals in `u = |z|²`.
//! With the measure `(i/2π) dz∧dz̄ = du dθ/2π`, the coordinate `z_i` of a
//! divisor contributes
//!
//! ```text
//! ∫_0^1 u^{σ e_i + γ_i − 1} h_i(u) du,    σ = s + α,
//! ```
//!
//! where `γ_i = ⌈α e_i⌉ − α e_i` plus the section exponent. A factor with
//! `γ_i = 0` has a simple pole whose Laurent coefficients are log-moments of
//! `h_i'`; every other factor is holomorphic at `σ = 0` with log-moments of
//! `h_i` as Taylor coefficients.

use num::ToPrimitive;
use quadrature::{clenshaw_curtis, double_exponential};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sncdegeneration::Alpha;

/// Tolerance for integrals carrying at most one logarithm.
pub const TOL_SINGLE_LOG: f64 = 1e-6;
/// Tolerance for constants assembled from `log²` moments and above.
pub const TOL_CONSTANT: f64 = 1e-4;
/// Laurent coefficients below this magnitude count as zero.
pub const POLE_THRESHOLD: f64 = 1e-7;

/// `ε(k) = (−1)^{k(k−1)/2}`.
pub fn epsilon(k: i64) -> f64 {
    if (k * (k - 1) / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Density of `ε(2)/(2πi) dt∧dt̄` against `du dθ/2π`: `dt∧dt̄ = −2i dx∧dy`
/// and `dx dy = du dθ/2`.
pub fn renormalization_measure() -> f64 {
    -epsilon(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogMode {
    /// Tanh-sinh after `u = v^{1/(a+1)}`, which removes `u^a` for `−1 < a < 0`.
    Substitution,
    /// Closed-form integral of the first three Taylor terms near `0` plus
    /// Clenshaw-Curtis on the remainder.
    TaylorTail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub log_mode: LogMode,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-11, max_depth: 12, log_mode: LogMode::Substitution }
    }
}

impl QuadratureConfig {
    pub fn taylor_tail() -> Self {
        QuadratureConfig { log_mode: LogMode::TaylorTail, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `h(u) = (Σ c_i u^i) · b(u/w)` with `b(x) = exp(1 − 1/(1 − x²))` on `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub width: f64,
    pub poly: Vec<f64>,
}

// Taylor coefficients of b at 0, in powers of x.
const BUMP_TAYLOR: [f64; 7] = [1.0, 0.0, -1.0, 0.0, -0.5, 0.0, -1.0 / 6.0];

impl Profile {
    pub fn bump(height: f64, width: f64) -> Self {
        Profile { width, poly: vec![height] }
    }

    pub fn new(width: f64, poly: Vec<f64>) -> Result<Self> {
        let p = Profile { width, poly };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width < 1.0) {
            return Err(Error::InvalidInput(format!("profile width {} is not in (0, 1)", self.width)));
        }
        if self.poly.is_empty() || self.poly.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("profile polynomial must be finite and nonempty".into()));
        }
        Ok(())
    }

    pub fn at_zero(&self) -> f64 {
        self.poly[0]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Profile { width: self.width, poly: self.poly.iter().map(|x| c * x).collect() }
    }

    fn poly_deriv(&self, d: usize, u: f64) -> f64 {
        self.poly
            .iter()
            .enumerate()
            .skip(d)
            .map(|(i, c)| c * (0..d).map(|j| (i - j) as f64).product::<f64>() * u.powi((i - d) as i32))
            .sum()
    }

    // b, b', b'' at x = u/w, each differentiated in x.
    fn bump_derivs(x: f64) -> [f64; 3] {
        if x >= 1.0 {
            return [0.0; 3];
        }
        let m = 1.0 - x * x;
        let b = (1.0 - 1.0 / m).exp();
        if b == 0.0 {
            return [0.0; 3];
        }
        let q = -2.0 * x / (m * m);
        let dq = -2.0 / (m * m) - 8.0 * x * x / (m * m * m);
        [b, b * q, b * (q * q + dq)]
    }

    /// `h^{(d)}(u)` for `d ≤ 2`.
    pub fn deriv(&self, d: usize, u: f64) -> f64 {
        debug_assert!(d <= 2);
        if u >= self.width {
            return 0.0;
        }
        let [b0, b1, b2] = Self::bump_derivs(u / self.width);
        let w = self.width;
        let p = |k| self.poly_deriv(k, u);
        match d {
            0 => p(0) * b0,
            1 => p(1) * b0 + p(0) * b1 / w,
            _ => p(2) * b0 + 2.0 * p(1) * b1 / w + p(0) * b2 / (w * w),
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.deriv(0, u)
    }

    /// First `terms` Taylor coefficients of `h^{(d)}` at `0`.
    pub fn taylor(&self, d: usize, terms: usize) -> Vec<f64> {
        let deg = terms + d;
        let mut h = vec![0.0; deg];
        for (i, c) in self.poly.iter().enumerate() {
            for (j, b) in BUMP_TAYLOR.iter().enumerate() {
                if i + j < deg {
                    h[i + j] += c * b / self.width.powi(j as i32);
                }
            }
        }
        (0..terms).map(|m| h[m + d] * ((m + 1)..=(m + d)).map(|x| x as f64).product::<f64>()).collect()
    }
}

/// One radial profile per coordinate `z_0..z_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTestFunction {
    pub profiles: Vec<Profile>,
}

impl SeparableTestFunction {
    /// Profiles `h_i = (1 + u·i/4)·b(u/w_i)` with staggered widths.
    pub fn standard(coords: usize) -> Self {
        let profiles = (0..coords)
            .map(|i| Profile { width: 0.55 + 0.1 * (i % 4) as f64, poly: vec![1.0, 0.25 * i as f64] })
            .collect();
        SeparableTestFunction { profiles }
    }

    pub fn validate(&self) -> Result<()> {
        self.profiles.iter().try_for_each(Profile::validate)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.profiles[0] = out.profiles[0].scaled(c);
        out
    }
}

/// Chart `z_0..z_n` with `t = Π_{i≤k} z_i^{e_i}` and sections
/// `ζ_α ⊗ z^{p1}`, `ζ_α ⊗ z^{p2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelChart {
    pub n: usize,
    pub e: Vec<u32>,
    pub alpha: Alpha,
    pub p1: Vec<u32>,
    pub p2: Vec<u32>,
}

impl ModelChart {
    pub fn new(n: usize, e: Vec<u32>, alpha: Alpha, p1: Vec<u32>, p2: Vec<u32>) -> Result<Self> {
        let c = ModelChart { n, e, alpha, p1, p2 };
        c.validate()?;
        Ok(c)
    }

    /// Sections `z_{K_1}` and `z_{K_2}` with `K_i ⊆ I_α` of equal size.
    pub fn with_sections(n: usize, e: Vec<u32>, alpha: Alpha, k1: &[usize], k2: &[usize]) -> Result<Self> {
        let mono = |ks: &[usize]| {
            let mut p = vec![0u32; n + 1];
            for &i in ks {
                if i <= n {
                    p[i] += 1;
                }
            }
            p
        };
        let c = ModelChart { n, p1: mono(k1), p2: mono(k2), e, alpha };
        c.validate()?;
        let ia = c.i_alpha();
        if k1.len() != k2.len() || !k1.iter().chain(k2).all(|i| ia.contains(i)) {
            return Err(Error::InvalidInput("section index sets must be equal-size subsets of I_α".into()));
        }
        if k1.len() > c.mu() {
            return Err(Error::InvalidInput(format!("#K = {} exceeds μ = {}", k1.len(), c.mu())));
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.e.is_empty() || self.e.len() > self.n + 1 || self.e.contains(&0) {
            return Err(Error::InvalidInput("multiplicities must be positive and at most n + 1".into()));
        }
        if self.p1.len() != self.n + 1 || self.p2.len() != self.n + 1 {
            return Err(Error::InvalidInput("section exponents must have length n + 1".into()));
        }
        if self.i_alpha().is_empty() {
            return Err(Error::UnknownEigenvalue(self.alpha.to_string()));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.e.len() - 1
    }

    pub fn i_alpha(&self) -> Vec<usize> {
        (0..self.e.len()).filter(|&i| self.alpha.divides(self.e[i])).collect()
    }

    pub fn mu(&self) -> usize {
        self.i_alpha().len() - 1
    }

    pub fn is_diagonal(&self) -> bool {
        self.p1 == self.p2
    }

    /// `r = μ − #K_1`, read from the first section.
    pub fn r(&self) -> usize {
        let deg: usize = self.i_alpha().iter().map(|&i| self.p1[i] as usize).sum();
        self.mu().saturating_sub(deg)
    }

    fn alpha_f64(&self) -> f64 {
        self.alpha.0.to_f64().unwrap_or(0.0)
    }

    /// `⌈α e_i⌉`.
    pub fn ceil_ae(&self, i: usize) -> i64 {
        let ae = &self.alpha.0 * num::BigRational::from_integer(self.e[i].into());
        ae.ceil().to_integer().to_i64().unwrap_or(0)
    }

    /// `(e_i, γ_i)` with the section exponents included; `e_i = 0` off the divisor.
    fn exponent(&self, i: usize) -> (f64, f64) {
        let sec = 0.5 * (self.p1[i] + self.p2[i]) as f64;
        if i < self.e.len() {
            let e = self.e[i] as f64;
            (e, self.ceil_ae(i) as f64 - self.alpha_f64() * e + sec)
        } else {
            (0.0, 1.0 + sec)
        }
    }

    /// `C_J = Π_{j∈J} e_j`.
    pub fn c_j(&self, j: &[usize]) -> u64 {
        j.iter().map(|&i| self.e[i] as u64).product()
    }

    /// Coordinates of `I_α` where both sections are units.
    pub fn pole_set(&self) -> Vec<usize> {
        self.i_alpha().into_iter().filter(|&i| self.p1[i] == 0 && self.p2[i] == 0).collect()
    }
}

fn adaptive<F: Fn(f64) -> f64 + Sync>(cfg: &QuadratureConfig, f: &F, a: f64, b: f64, depth: u32) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let out = double_exponential::integrate(f, a, b, cfg.abs_tol);
    let budget = cfg.abs_tol.max(cfg.rel_tol * out.integral.abs());
    if out.integral.is_finite() && out.error_estimate <= budget {
        return Ok(out.integral);
    }
    if depth >= cfg.max_depth {
        return Err(Error::QuadratureNonconvergence(format!(
            "[{a}, {b}] error estimate {:e} after depth {depth}",
            out.error_estimate
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive(cfg, f, a, mid, depth + 1)? + adaptive(cfg, f, mid, b, depth + 1)?)
}

fn smooth<F: Fn(f64) -> f64>(cfg: &QuadratureConfig, f: F, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let out = clenshaw_curtis::integrate(f, a, b, cfg.abs_tol);
    if !out.integral.is_finite() {
        return Err(Error::QuadratureNonconvergence(format!("Clenshaw-Curtis on [{a}, {b}]")));
    }
    Ok(out.integral)
}

/// `∫_0^δ u^p (log u)^ℓ du` for `p > −1`.
pub fn power_log_integral(p: f64, ell: u32, delta: f64) -> f64 {
    let ld = delta.ln();
    let lead = delta.powf(p + 1.0) / (p + 1.0);
    let mut acc = lead;
    for l in 1..=ell {
        acc = lead * ld.powi(l as i32) - l as f64 / (p + 1.0) * acc;
    }
    acc
}

/// `∫_0^w u^a (log u)^ℓ h^{(d)}(u) du` for `a > −1`.
pub fn log_moment(cfg: &QuadratureConfig, h: &Profile, d: usize, a: f64, ell: u32) -> Result<f64> {
    if a <= -1.0 {
        return Err(Error::InvalidInput(format!("exponent {a} is not integrable at 0")));
    }
    let w = h.width;
    let li = ell as i32;
    match cfg.log_mode {
        LogMode::Substitution => {
            let g = a + 1.0;
            if (a - a.round()).abs() < 1e-15 && a >= 0.0 {
                let f = |u: f64| if u <= 0.0 { 0.0 } else { u.powf(a) * u.ln().powi(li) * h.deriv(d, u) };
                adaptive(cfg, &f, 0.0, w, 0)
            } else {
                let f = |v: f64| if v <= 0.0 { 0.0 } else { v.ln().powi(li) * h.deriv(d, v.powf(1.0 / g)) };
                Ok(adaptive(cfg, &f, 0.0, w.powf(g), 0)? / g.powi(li + 1))
            }
        }
        LogMode::TaylorTail => {
            let delta = 0.05 * w;
            let t = h.taylor(d, 3);
            let head: f64 = t.iter().enumerate().map(|(m, c)| c * power_log_integral(a + m as f64, ell, delta)).sum();
            let rem = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let tail = t[0] + u * (t[1] + u * t[2]);
                u.powf(a) * u.ln().powi(li) * (h.deriv(d, u) - tail)
            };
            let body = |u: f64| u.powf(a) * u.ln().powi(li) * h.deriv(d, u);
            Ok(head + smooth(cfg, rem, 0.0, delta)? + smooth(cfg, body, delta, w)?)
        }
    }
}

/// Truncated Laurent series `Σ_{i ≥ low} c_i σ^i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    pub low: i32,
    pub coeffs: Vec<f64>,
}

impl Laurent {
    pub fn coeff(&self, i: i32) -> f64 {
        if i < self.low {
            return 0.0;
        }
        self.coeffs.get((i - self.low) as usize).copied().unwrap_or(0.0)
    }

    /// Highest index carried.
    pub fn high(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let low = self.low + other.low;
        let high = (self.high() + other.low).min(self.low + other.high());
        let coeffs = (low..=high)
            .map(|i| (self.low..=self.high()).map(|a| self.coeff(a) * other.coeff(i - a)).sum())
            .collect();
        Laurent { low, coeffs }
    }

    fn scale(mut self, c: f64) -> Laurent {
        self.coeffs.iter_mut().for_each(|x| *x *= c);
        self
    }

    /// Index of the first coefficient above [`POLE_THRESHOLD`], negated and
    /// clamped at `0`.
    pub fn pole_order(&self) -> u32 {
        (self.low..0).find(|&i| self.coeff(i).abs() > POLE_THRESHOLD).map_or(0, |i| (-i) as u32)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

// (1/2π)∫ e^{i m θ} dθ; only the cosine survives for real profiles.
fn angular(cfg: &QuadratureConfig, m: i64) -> Result<f64> {
    let f = |x: f64| (2.0 * std::f64::consts::PI * m as f64 * x).cos();
    smooth(cfg, f, 0.0, 1.0)
}

/// Laurent series of the coordinate factor `i` up to index `high`.
fn factor_series(cfg: &QuadratureConfig, chart: &ModelChart, h: &Profile, i: usize, high: i32) -> Result<Laurent> {
    let (e, gamma) = chart.exponent(i);
    let ang = angular(cfg, chart.p1[i] as i64 - chart.p2[i] as i64)?;
    if gamma.abs() < 1e-15 {
        // −(1/(σe)) ∫ u^{σe} h' du
        let coeffs = (0..=(high + 1).max(0) as u32)
            .map(|l| Ok(-e.powi(l as i32 - 1) / factorial(l) * log_moment(cfg, h, 1, 0.0, l)?))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Laurent { low: -1, coeffs }.scale(ang));
    }
    let top = if e == 0.0 { 0 } else { high.max(0) as u32 };
    let coeffs = (0..=top)
        .map(|l| Ok(e.powi(l as i32) / factorial(l) * log_moment(cfg, h, 0, gamma - 1.0, l)?))
        .collect::<Result<Vec<_>>>()?;
    let mut s = Laurent { low: 0, coeffs };
    s.coeffs.resize(high.max(0) as usize + 1, 0.0);
    Ok(s.scale(ang))
}

fn check_inputs(chart: &ModelChart, eta: &SeparableTestFunction, cfg: &QuadratureConfig) -> Result<()> {
    chart.validate()?;
    eta.validate()?;
    cfg.validate()?;
    if eta.profiles.len() != chart.n + 1 {
        return Err(Error::InvalidInput(format!(
            "test function has {} profiles for {} coordinates",
            eta.profiles.len(),
            chart.n + 1
        )));
    }
    Ok(())
}

/// Laurent expansion of `F` at `s = −α` in `σ = s + α`, from `σ^{−(k+1)}`
/// through `count` coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentExpansion {
    pub series: Laurent,
    pub pole_order: u32,
}

pub fn laurent_coefficients(
    chart: &ModelChart,
    eta: &SeparableTestFunction,
    count: usize,
    cfg: &QuadratureConfig,
) -> Result<LaurentExpansion> {
    check_inputs(chart, eta, cfg)?;
    let low = -(chart.k() as i32 + 1);
    let high = low + count as i32 - 1;
    // Each factor must reach past `high` by the poles of the others.
    let reach = high + chart.k() as i32 + 1;
    let factors = (0..=chart.n)
        .into_par_iter()
        .map(|i| factor_series(cfg, chart, &eta.profiles[i], i, reach))
        .collect::<Result<Vec<_>>>()?;
    let prod = factors.iter().fold(Laurent { low: 0, coeffs: vec![1.0] }, |acc, f| acc.mul(f));
    let coeffs = (low..=high).map(|i| prod.coeff(i)).collect();
    let series = Laurent { low, coeffs };
    let pole_order = series.pole_order();
    Ok(LaurentExpansion { series, pole_order })
}

/// `Res_{s=−α} (−(s+α))^r F(s)`.
fn residue(chart: &ModelChart, eta: &SeparableTestFunction, r: usize, cfg: &QuadratureConfig) -> Result<(f64, u32)> {
    let count = chart.k() + 1;
    let exp = laurent_coefficients(chart, eta, count, cfg)?;
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    Ok((sign * exp.series.coeff(-(r as i32) - 1), exp.pole_order))
}

/// Residue of `ε(2)/(2πi) ∫ |t|^{2s} (dt/t)∧conj(dt/t) g` at `s = 0`.
pub fn renormalization_residue(g: &Profile, cfg: &QuadratureConfig) -> Result<f64> {
    g.validate()?;
    cfg.validate()?;
    Ok(-renormalization_measure() * log_moment(cfg, g, 1, 0.0, 0)?)
}

/// `(i/2π) ∫ log|z|² ∂∂̄η` on the disk, i.e. `∫_0^w log u · (u h')' du`.
pub fn poincare_lelong_1d(h: &Profile, cfg: &QuadratureConfig) -> Result<f64> {
    h.validate()?;
    cfg.validate()?;
    Ok(log_moment(cfg, h, 1, 0.0, 1)? + log_moment(cfg, h, 2, 1.0, 1)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingConstant {
    pub r: usize,
    /// `J = I_α ∖ K`.
    pub j: Vec<usize>,
    pub c_j: u64,
    pub residue: f64,
    pub stratum_integral: f64,
    pub ratio: f64,
    /// `(−1)^r / ((r+1)!·C_J)`.
    pub target: f64,
}

impl PairingConstant {
    pub fn passed(&self, tol: f64) -> bool {
        (self.ratio - self.target).abs() <= tol
    }
}

/// Weighted integral of `η` over the stratum `z_J = 0`.
fn stratum_integral(chart: &ModelChart, eta: &SeparableTestFunction, j: &[usize], cfg: &QuadratureConfig) -> Result<f64> {
    (0..=chart.n)
        .map(|i| {
            let h = &eta.profiles[i];
            if j.contains(&i) {
                return Ok(h.at_zero());
            }
            let (_, gamma) = chart.exponent(i);
            log_moment(cfg, h, 0, gamma - 1.0, 0)
        })
        .product()
}

/// Ratio of `Res_{s=−α}(−(s+α))^r F(s)` to the stratum integral on the
/// diagonal `K_1 = K_2`.
pub fn primitive_pairing_constant(
    chart: &ModelChart,
    eta: &SeparableTestFunction,
    cfg: &QuadratureConfig,
) -> Result<PairingConstant> {
    check_inputs(chart, eta, cfg)?;
    if !chart.is_diagonal() {
        return Err(Error::InvalidInput("pairing constant needs K_1 = K_2".into()));
    }
    let r = chart.r();
    let j = chart.pole_set();
    let (res, _) = residue(chart, eta, r, cfg)?;
    let stratum = stratum_integral(chart, eta, &j, cfg)?;
    let c_j = chart.c_j(&j);
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    Ok(PairingConstant {
        r,
        c_j,
        residue: res,
        stratum_integral: stratum,
        ratio: res / stratum,
        target: sign / (factorial(r as u32 + 1) * c_j as f64),
        j,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonal {
    pub pole_order: u32,
    pub residue: f64,
}

impl OffDiagonal {
    pub fn vanishes(&self, tol: f64) -> bool {
        self.pole_order == 0 && self.residue.abs() <= tol
    }
}

pub fn off_diagonal_vanishing(
    chart: &ModelChart,
    eta: &SeparableTestFunction,
    cfg: &QuadratureConfig,
) -> Result<OffDiagonal> {
    check_inputs(chart, eta, cfg)?;
    if chart.is_diagonal() {
        return Err(Error::InvalidInput("off-diagonal check needs K_1 ≠ K_2".into()));
    }
    let (residue, pole_order) = residue(chart, eta, chart.r(), cfg)?;
    Ok(OffDiagonal { pole_order, residue })
}

/// `F(s)` for real `s > −α` as a product of convergent integrals, with the
/// profile of coordinate `j` optionally replaced by `u h_j'(u)/e_j`.
fn f_at(
    chart: &ModelChart,
    eta: &SeparableTestFunction,
    s: f64,
    euler_on: Option<usize>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let sigma = s + chart.alpha_f64();
    (0..=chart.n)
        .map(|i| {
            let (e, gamma) = chart.exponent(i);
            let a = sigma * e + gamma - 1.0;
            let ang = angular(cfg, chart.p1[i] as i64 - chart.p2[i] as i64)?;
            let h = &eta.profiles[i];
            let v = if euler_on == Some(i) {
                log_moment(cfg, h, 1, a + 1.0, 0)? / e
            } else {
                log_moment(cfg, h, 0, a, 0)?
            };
            Ok(ang * v)
        })
        .product()
}

/// `F(s; (1/e_j) z_j∂_j η) / (−(s + ⌈αe_j⌉/e_j) F(s; η))`, which is `1`.
pub fn self_adjointness_ratio(
    chart: &ModelChart,
    eta: &SeparableTestFunction,
    j: usize,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_inputs(chart, eta, cfg)?;
    if j > chart.k() || chart.p1[j] != 0 || chart.p2[j] != 0 {
        return Err(Error::InvalidInput(format!("coordinate {j} must be a divisor coordinate free of the sections")));
    }
    if s <= -chart.alpha_f64() {
        return Err(Error::InvalidInput(format!("s = {s} is not to the right of −α")));
    }
    let moved = f_at(chart, eta, s, Some(j), cfg)?;
    let plain = f_at(chart, eta, s, None, cfg)?;
    let factor = -(s + chart.ceil_ae(j) as f64 / chart.e[j] as f64);
    Ok(moved / (factor * plain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn reduced(n: usize, k: usize, ks: &[usize]) -> ModelChart {
        ModelChart::with_sections(n, vec![1; k + 1], Alpha::zero(), ks, ks).unwrap()
    }

    // s·∫_0^1 u^{s−1} g du = ∫_0^1 g(v^{1/s}) dv, extrapolated to s = 0.
    fn residue_oracle(g: &Profile) -> f64 {
        let at = |s: f64| {
            let f = |v: f64| g.value(v.powf(1.0 / s));
            double_exponential::integrate(f, 0.0, 1.0, 1e-13).integral
        };
        let s = 1e-3;
        2.0 * at(s / 2.0) - at(s)
    }

    #[test]
    fn epsilon_table() {
        let got: Vec<f64> = (0..6).map(epsilon).collect();
        assert_eq!(got, vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0]);
        assert_eq!(renormalization_measure(), 1.0);
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let h = Profile::new(0.7, vec![0.8, -0.4, 1.5]).unwrap();
        let eps = 1e-5;
        for &u in &[0.05, 0.2, 0.43, 0.66] {
            let fd1 = (h.value(u + eps) - h.value(u - eps)) / (2.0 * eps);
            let fd2 = (h.deriv(1, u + eps) - h.deriv(1, u - eps)) / (2.0 * eps);
            assert!((fd1 - h.deriv(1, u)).abs() < 1e-7, "{u}");
            assert!((fd2 - h.deriv(2, u)).abs() < 1e-5, "{u}");
        }
        assert_eq!(h.value(0.7), 0.0);
        assert_eq!(h.value(0.0), 0.8);
    }

    #[test]
    fn taylor_matches_small_u() {
        let h = Profile::new(0.6, vec![1.0, 0.5, -2.0]).unwrap();
        for d in 0..=2 {
            let t = h.taylor(d, 3);
            let u = 1e-3;
            let approx = t[0] + u * (t[1] + u * t[2]);
            assert!((approx - h.deriv(d, u)).abs() < 1e-7, "d = {d}");
        }
    }

    #[test]
    fn power_log_closed_form() {
        // ∫_0^1 u^p log²u du = 2/(p+1)³
        assert!((power_log_integral(0.5, 2, 1.0) - 2.0 / 1.5f64.powi(3)).abs() < 1e-14);
        let f = |u: f64| u.powf(-0.3) * u.ln();
        let num = double_exponential::integrate(f, 0.0, 0.4, 1e-13).integral;
        let got = power_log_integral(-0.3, 1, 0.4);
        assert!((got - num).abs() < 1e-7, "{got} vs {num}");
    }

    #[test]
    fn log_moments_agree_across_modes() {
        let h = Profile::new(0.65, vec![1.0, 0.7]).unwrap();
        let tail = QuadratureConfig::taylor_tail();
        for &(d, a, l) in &[(0, 0.0, 1), (0, -0.5, 0), (0, -0.5, 2), (1, 0.0, 2), (1, 0.0, 3), (2, 1.0, 1), (0, 1.0, 2)] {
            let p = log_moment(&cfg(), &h, d, a, l).unwrap();
            let q = log_moment(&tail, &h, d, a, l).unwrap();
            let tol = if l <= 1 { TOL_SINGLE_LOG } else { TOL_CONSTANT };
            assert!((p - q).abs() < tol * 1e-2, "d={d} a={a} l={l}: {p} vs {q}");
        }
    }

    #[test]
    fn renormalization_residue_is_value_at_zero() {
        let g = Profile::bump(1.0, 0.7);
        let got = renormalization_residue(&g, &cfg()).unwrap();
        assert!((got - 1.0).abs() < TOL_SINGLE_LOG);
        assert!((residue_oracle(&g) - got).abs() < TOL_SINGLE_LOG);
        let g0 = Profile::new(0.7, vec![0.0, 3.0]).unwrap();
        assert!(renormalization_residue(&g0, &cfg()).unwrap().abs() < TOL_SINGLE_LOG);
        let g2 = g.scaled(-2.5);
        assert!((renormalization_residue(&g2, &cfg()).unwrap() + 2.5).abs() < TOL_SINGLE_LOG);
    }

    #[test]
    fn renormalization_finite_part_exists() {
        // ∫_0^1 (g − g(0))/u du converges, so the pole is exactly g(0)/s.
        let g = Profile::new(0.6, vec![1.3, 0.4]).unwrap();
        let f = |u: f64| (g.value(u) - g.at_zero()) / u;
        let inner = adaptive(&cfg(), &f, 0.0, g.width, 0).unwrap();
        let outer = -g.at_zero() * g.width.ln().abs();
        assert!((inner + outer).is_finite());
    }

    #[test]
    fn poincare_lelong_returns_value_at_zero() {
        for (w, h0) in [(0.5, 1.0), (0.8, 1.0), (0.7, 0.0), (0.6, -0.75)] {
            let h = Profile::new(w, vec![h0, 0.9]).unwrap();
            let got = poincare_lelong_1d(&h, &cfg()).unwrap();
            let ibp = -log_moment(&cfg(), &h, 1, 0.0, 0).unwrap();
            assert!((got - h0).abs() < TOL_SINGLE_LOG, "w={w}: {got}");
            assert!((got - ibp).abs() < TOL_SINGLE_LOG);
        }
    }

    #[test]
    fn pole_orders_follow_unit_sections() {
        let eta2 = SeparableTestFunction::standard(2);
        let c = ModelChart::with_sections(1, vec![1], Alpha::zero(), &[], &[]).unwrap();
        assert_eq!(laurent_coefficients(&c, &eta2, 3, &cfg()).unwrap().pole_order, 1);
        let c = reduced(1, 1, &[]);
        assert_eq!(laurent_coefficients(&c, &eta2, 3, &cfg()).unwrap().pole_order, 2);
        let t = ModelChart::new(1, vec![1, 1], Alpha::zero(), vec![1, 1], vec![1, 1]).unwrap();
        let exp = laurent_coefficients(&t, &eta2, 3, &cfg()).unwrap();
        assert_eq!(exp.pole_order, 0);
        assert!(exp.series.coeff(0).abs() > 1e-3);
    }

    #[test]
    fn simple_pole_leading_coefficient() {
        // k = 0: F(σ) = h_0(0)/(e σ)·∫h_1 + O(1).
        let eta = SeparableTestFunction::standard(2);
        let c = ModelChart::with_sections(1, vec![3], Alpha::new(1, 3), &[], &[]).unwrap();
        let exp = laurent_coefficients(&c, &eta, 2, &cfg()).unwrap();
        let rest = log_moment(&cfg(), &eta.profiles[1], 0, 0.0, 0).unwrap();
        assert!((exp.series.coeff(-1) - rest / 3.0).abs() < TOL_SINGLE_LOG);
    }

    #[test]
    fn constants_at_r_zero() {
        let eta = SeparableTestFunction::standard(2);
        let c = ModelChart::with_sections(1, vec![1, 1], Alpha::zero(), &[1], &[1]).unwrap();
        let pc = primitive_pairing_constant(&c, &eta, &cfg()).unwrap();
        assert_eq!((pc.r, pc.j.clone(), pc.c_j), (0, vec![0], 1));
        assert!(pc.passed(TOL_CONSTANT), "{pc:?}");

        let c = ModelChart::with_sections(1, vec![2, 1], Alpha::new(1, 2), &[], &[]).unwrap();
        let pc = primitive_pairing_constant(&c, &eta, &cfg()).unwrap();
        assert_eq!((pc.r, pc.c_j), (0, 2));
        assert!((pc.ratio - 0.5).abs() < TOL_CONSTANT, "{pc:?}");
    }

    #[test]
    fn ratio_is_sign_over_multiplicity_product() {
        // Measured value of the constant for r ≥ 1: (−1)^r / C_J, without a
        // factorial. See the acceptance suite for the comparison target.
        let eta = SeparableTestFunction::standard(3);
        let c = reduced(2, 2, &[2]);
        let pc = primitive_pairing_constant(&c, &eta, &cfg()).unwrap();
        assert_eq!(pc.r, 1);
        assert!((pc.ratio + 1.0).abs() < TOL_CONSTANT, "{pc:?}");
        let c = ModelChart::with_sections(2, vec![2, 3, 1], Alpha::zero(), &[], &[]).unwrap();
        let pc = primitive_pairing_constant(&c, &eta, &cfg()).unwrap();
        assert_eq!((pc.r, pc.c_j), (2, 6));
        assert!((pc.ratio - 1.0 / 6.0).abs() < TOL_CONSTANT, "{pc:?}");
    }

    #[test]
    fn ratio_stable_across_log_modes() {
        let eta = SeparableTestFunction::standard(3);
        let c = ModelChart::with_sections(2, vec![2, 1, 3], Alpha::new(1, 2), &[], &[]).unwrap();
        let a = primitive_pairing_constant(&c, &eta, &cfg()).unwrap();
        let b = primitive_pairing_constant(&c, &eta, &QuadratureConfig::taylor_tail()).unwrap();
        assert!((a.ratio - b.ratio).abs() < TOL_CONSTANT);
        assert!((a.stratum_integral - b.stratum_integral).abs() < TOL_SINGLE_LOG);
    }

    #[test]
    fn off_diagonal_vanishes_and_diagonal_does_not() {
        let eta = SeparableTestFunction::standard(3);
        let off = ModelChart::with_sections(2, vec![1; 3], Alpha::zero(), &[1], &[2]).unwrap();
        let got = off_diagonal_vanishing(&off, &eta, &cfg()).unwrap();
        assert!(got.vanishes(TOL_SINGLE_LOG), "{got:?}");
        let swapped = ModelChart::with_sections(2, vec![1; 3], Alpha::zero(), &[2], &[1]).unwrap();
        let back = off_diagonal_vanishing(&swapped, &eta, &cfg()).unwrap();
        assert!((back.residue - got.residue).abs() < 1e-12);
        let diag = reduced(2, 2, &[1]);
        let (res, order) = residue(&diag, &eta, 1, &cfg()).unwrap();
        assert_eq!(order, 2);
        assert!(res.abs() > 1e-2);
    }

    #[test]
    fn self_adjointness_numerics() {
        let eta = SeparableTestFunction::standard(3);
        let c = ModelChart::with_sections(2, vec![2, 3, 1], Alpha::new(1, 2), &[], &[]).unwrap();
        for j in 0..3 {
            for &s in &[-0.3, 0.1, 0.8] {
                let r = self_adjointness_ratio(&c, &eta, j, s, &cfg()).unwrap();
                assert!((r - 1.0).abs() < TOL_SINGLE_LOG, "j={j} s={s}: {r}");
            }
        }
        assert!(self_adjointness_ratio(&c, &eta, 0, -0.6, &cfg()).is_err());
    }

    #[test]
    fn input_validation() {
        let eta = SeparableTestFunction::standard(2);
        assert!(matches!(
            ModelChart::with_sections(1, vec![2, 2], Alpha::new(1, 3), &[], &[]),
            Err(Error::UnknownEigenvalue(_))
        ));
        assert!(ModelChart::with_sections(1, vec![1, 2], Alpha::new(1, 2), &[0], &[0]).is_err());
        let c = reduced(2, 2, &[]);
        assert!(laurent_coefficients(&c, &eta, 2, &cfg()).is_err());
        let bad = QuadratureConfig { abs_tol: 0.0, ..cfg() };
        assert!(renormalization_residue(&Profile::bump(1.0, 0.5), &bad).is_err());
        assert!(Profile::new(1.0, vec![1.0]).is_err());
    }

    fn chart_strategy() -> impl Strategy<Value = (ModelChart, u64)> {
        (0usize..=2, prop::collection::vec(1u32..=4, 3), 0usize..4, any::<u64>()).prop_filter_map(
            "I_α nonempty",
            |(k, es, ai, seed)| {
                let e: Vec<u32> = es[..=k].to_vec();
                let alpha = [Alpha::zero(), Alpha::new(1, 2), Alpha::new(1, 3), Alpha::new(1, 4)][ai].clone();
                let probe = ModelChart::new(k, e.clone(), alpha.clone(), vec![0; k + 1], vec![0; k + 1]).ok()?;
                let ia = probe.i_alpha();
                let ks: Vec<usize> = ia.iter().copied().filter(|i| (seed >> i) & 1 == 1).take(probe.mu()).collect();
                ModelChart::with_sections(k, e, alpha, &ks, &ks).ok().map(|c| (c, seed))
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pole_order_bounded_by_divisor_count((chart, _) in chart_strategy()) {
            let eta = SeparableTestFunction::standard(chart.n + 1);
            let exp = laurent_coefficients(&chart, &eta, chart.k() + 2, &cfg()).unwrap();
            prop_assert!(exp.pole_order as usize <= chart.k() + 1);
            prop_assert_eq!(exp.pole_order as usize, chart.pole_set().len());
        }

        #[test]
        fn residues_linear_in_test_function((chart, seed) in chart_strategy()) {
            let eta = SeparableTestFunction::standard(chart.n + 1);
            let c = 0.5 + (seed % 7) as f64;
            let r = chart.r();
            let (a, _) = residue(&chart, &eta, r, &cfg()).unwrap();
            let (b, _) = residue(&chart, &eta.scaled(c), r, &cfg()).unwrap();
            prop_assert!((b - c * a).abs() < TOL_SINGLE_LOG * (1.0 + a.abs() * c));
        }

        #[test]
        fn renormalization_linear(h0 in -3.0f64..3.0, w in 0.3f64..0.9) {
            let g = Profile::new(w, vec![h0, 1.0]).unwrap();
            let got = renormalization_residue(&g, &cfg()).unwrap();
            prop_assert!((got - h0).abs() < TOL_SINGLE_LOG);
        }
    }
}

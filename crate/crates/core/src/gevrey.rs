//! Gevrey-type weights `e^{phi(kappa0^{-1} A^{1/2})}`, the classes `C(sigma)`
//! defined by growth of `|A^{alpha/2} u|`, the inclusion bounds between the
//! two families, and the Fréchet metric on smooth fields.

use std::f64::consts::{E, LN_2};

use crate::bilinear::bilinear_b;
use crate::error::{Error, Result};
use crate::inequalities::BoundCheck;
use crate::spectral::{stokes_apply, Dealias, SpectralField, Wavevector};

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// `phi_b(chi) = b [ln(chi + e)]^2`
    PhiB,
    /// `b [ln(chi + e)]^{1 + epsilon}`
    PowerLog { epsilon: f64 },
    /// Piecewise-linear `phi` through `(chi, phi)` nodes, sorted by `chi`,
    /// extended linearly past both ends. `b` multiplies the table.
    Custom(Vec<(f64, f64)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GevreyWeight {
    pub b: f64,
    pub kind: WeightKind,
}

impl GevreyWeight {
    pub fn phi_b(b: f64) -> Self {
        Self { b, kind: WeightKind::PhiB }
    }

    pub fn power_log(b: f64, epsilon: f64) -> Self {
        Self { b, kind: WeightKind::PowerLog { epsilon } }
    }

    pub fn custom(b: f64, table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 || table.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::arg("custom weight table needs >= 2 nodes with increasing chi"));
        }
        Ok(Self { b, kind: WeightKind::Custom(table) })
    }

    /// `phi(chi)`, including the factor `b`.
    pub fn phi(&self, chi: f64) -> f64 {
        match &self.kind {
            WeightKind::PhiB => self.b * (chi + E).ln().powi(2),
            WeightKind::PowerLog { epsilon } => self.b * (chi + E).ln().powf(1.0 + epsilon),
            WeightKind::Custom(t) => self.b * interpolate(t, chi),
        }
    }

    /// Samples `phi' > 0` and `phi'' < 0` by central differences on a
    /// geometric grid over `[1, chi_max]`.
    pub fn is_admissible(&self, chi_max: f64, samples: usize) -> bool {
        if self.b <= 0.0 {
            return self.b == 0.0;
        }
        let n = samples.max(3);
        let ratio = chi_max.max(1.0 + 1e-6).ln() / (n - 1) as f64;
        (0..n).all(|i| {
            let x = (ratio * i as f64).exp();
            let h = 1e-3 * x;
            let (fm, f0, fp) = (self.phi(x - h), self.phi(x), self.phi(x + h));
            let d1 = (fp - fm) / (2.0 * h);
            let d2 = (fp - 2.0 * f0 + fm) / (h * h);
            d1 > 0.0 && d2 < 0.0
        })
    }
}

fn interpolate(t: &[(f64, f64)], x: f64) -> f64 {
    let seg = match t.iter().position(|&(c, _)| c > x) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => t.len() - 2,
    };
    let ((x0, y0), (x1, y1)) = (t[seg], t[seg + 1]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// `(e^{phi(kappa0^{-1} A^{1/2})} u)^(k) = e^{phi(|k|)} u_hat(k)`.
pub fn apply_weight(u: &SpectralField, w: &GevreyWeight) -> SpectralField {
    u.scale_modes(|k| w.phi(k.norm()).exp())
}

/// `|e^{phi} u|`; for [`GevreyWeight::phi_b`] this is `|u|_b`.
pub fn gevrey_norm(u: &SpectralField, w: &GevreyWeight) -> f64 {
    u.weighted_norm(|k| w.phi(k.norm()).exp())
}

/// `|u|_b = |E^b u|`.
pub fn norm_b(u: &SpectralField, b: f64) -> f64 {
    gevrey_norm(u, &GevreyWeight::phi_b(b))
}

/// A `C(sigma)` certificate: `d_alpha <= c0 e^{sigma alpha^2}` for
/// `alpha = 1..=alpha_max`, with `d_alpha = |A^{alpha/2} u|^2 / (nu^2 kappa0^{2 alpha})`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsigmaFit {
    pub sigma: f64,
    pub c0: f64,
    pub ln_c0: f64,
    pub alpha_max: usize,
    /// `ln d_alpha`, index `alpha - 1`.
    pub ln_d: Vec<f64>,
    /// `ln(c0 e^{sigma alpha^2}) - ln d_alpha >= 0`.
    pub residuals: Vec<f64>,
}

impl CsigmaFit {
    fn from_sigma(sigma: f64, ln_d: Vec<f64>) -> Self {
        let alpha_max = ln_d.len();
        let ln_c0 = ln_d
            .iter()
            .enumerate()
            .map(|(i, l)| l - sigma * ((i + 1) * (i + 1)) as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let residuals = ln_d
            .iter()
            .enumerate()
            .map(|(i, l)| ln_c0 + sigma * ((i + 1) * (i + 1)) as f64 - l)
            .collect();
        Self { sigma, c0: ln_c0.exp(), ln_c0, alpha_max, ln_d, residuals }
    }

    fn zero(alpha_max: usize) -> Self {
        Self {
            sigma: 0.0,
            c0: 0.0,
            ln_c0: f64::NEG_INFINITY,
            alpha_max,
            ln_d: vec![f64::NEG_INFINITY; alpha_max],
            residuals: vec![0.0; alpha_max],
        }
    }

    /// The zero-field sentinel `sigma = 0, c0 = 0`.
    pub fn is_sentinel(&self) -> bool {
        self.c0 == 0.0
    }

    /// `c0 e^{sigma alpha^2}` in log form.
    pub fn ln_bound(&self, alpha: usize) -> f64 {
        self.ln_c0 + self.sigma * (alpha * alpha) as f64
    }

    /// The same `c0` with a larger `sigma`; still a certificate.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        let mut out = self.clone();
        out.sigma = sigma;
        out.residuals = (1..=self.alpha_max).map(|a| out.ln_bound(a) - self.ln_d[a - 1]).collect();
        out
    }

    /// Re-evaluates the inequality for `u` at every sampled alpha.
    pub fn verifies(&self, u: &SpectralField, nu: f64) -> bool {
        let ln_d = ln_d_alpha(u, nu, self.alpha_max);
        ln_d.iter().enumerate().all(|(i, &l)| {
            let bound = self.ln_bound(i + 1);
            l == f64::NEG_INFINITY || l <= bound + 1e-12 * bound.abs().max(1.0)
        })
    }

    /// Rows `(alpha, d_alpha, c0 e^{sigma alpha^2})`.
    pub fn table(&self) -> Vec<(usize, f64, f64)> {
        (1..=self.alpha_max).map(|a| (a, self.ln_d[a - 1].exp(), self.ln_bound(a).exp())).collect()
    }
}

/// `ln d_alpha` for `alpha = 1..=alpha_max`, evaluated in log space.
pub fn ln_d_alpha(u: &SpectralField, nu: f64, alpha_max: usize) -> Vec<f64> {
    let lk = u.grid().kappa0().ln();
    (1..=alpha_max)
        .map(|a| u.ln_stokes_norm_sq(a as f64 / 2.0) - 2.0 * nu.ln() - 2.0 * a as f64 * lk)
        .collect()
}

/// Least-squares fit of `ln d_alpha` against `alpha^2`, then `c0` lifted so
/// the inequality holds at every sampled `alpha`. A negative slope is
/// clamped to zero.
pub fn csigma_fit(u: &SpectralField, nu: f64, alpha_max: usize) -> Result<CsigmaFit> {
    if alpha_max < 2 {
        return Err(Error::arg("alpha_max must be at least 2"));
    }
    if !(nu > 0.0) {
        return Err(Error::arg("viscosity must be positive"));
    }
    if u.is_zero() {
        return Ok(CsigmaFit::zero(alpha_max));
    }
    let ln_d = ln_d_alpha(u, nu, alpha_max);
    let xs: Vec<f64> = (1..=alpha_max).map(|a| (a * a) as f64).collect();
    let n = alpha_max as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ln_d.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ln_d).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = (sxy / sxx).max(0.0);
    Ok(CsigmaFit::from_sigma(slope, ln_d))
}

/// Smallest `c0` making `u` a member of `C(sigma)` over the sampled range.
pub fn csigma_certificate(u: &SpectralField, nu: f64, sigma: f64, alpha_max: usize) -> CsigmaFit {
    if u.is_zero() {
        let mut z = CsigmaFit::zero(alpha_max);
        z.sigma = sigma;
        return z;
    }
    CsigmaFit::from_sigma(sigma, ln_d_alpha(u, nu, alpha_max))
}

/// `c1 = sum_{m >= 2} e^{-m} = 1 / (e^2 - e)`.
pub fn c1() -> f64 {
    1.0 / (E * E - E)
}

/// `c(epsilon) = e^{2 b [ln(e^2 + e)]^{1 + epsilon}}`.
pub fn c_epsilon(b: f64, epsilon: f64) -> f64 {
    (2.0 * b * (E * E + E).ln().powf(1.0 + epsilon)).exp()
}

/// `c2 = c(1)`.
pub fn c2(b: f64) -> f64 {
    c_epsilon(b, 1.0)
}

/// `c3 = e^{b (ln 2)^2} (1 + e)^{2 b ln 2}`.
pub fn c3(b: f64) -> f64 {
    (b * LN_2 * LN_2).exp() * (1.0 + E).powf(2.0 * b * LN_2)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Prop53Outcome {
    Checked { b: f64, check: BoundCheck },
    /// `sigma = 0`: the exponent `b` would be infinite.
    Degenerate,
}

/// With `b = 1 / (2^{4 + 2 eps} sigma)`, checks
/// `|e^{b [ln(kappa0^{-1} A^{1/2} + e)]^{1+eps}} u|^2
///   <= (4/3) c(eps) |u|^2 + c0^{1/3} (c1 |A^{1/2} u|)^{2/3} nu^{4/3} kappa0^{-2/3}`.
pub fn prop53_bound_check(u: &SpectralField, fit: &CsigmaFit, epsilon: f64, nu: f64) -> Result<Prop53Outcome> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::arg(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    if u.is_zero() {
        return Ok(Prop53Outcome::Checked { b: f64::INFINITY, check: BoundCheck::new(0.0, 0.0) });
    }
    if fit.sigma <= 0.0 {
        return Ok(Prop53Outcome::Degenerate);
    }
    let b = 1.0 / (2f64.powf(4.0 + 2.0 * epsilon) * fit.sigma);
    let lhs = gevrey_norm(u, &GevreyWeight::power_log(b, epsilon)).powi(2);
    let kap = u.grid().kappa0();
    let rhs = 4.0 / 3.0 * c_epsilon(b, epsilon) * u.norm().powi(2)
        + fit.c0.cbrt() * (c1() * u.stokes_norm(0.5)).powf(2.0 / 3.0) * nu.powf(4.0 / 3.0) * kap.powf(-2.0 / 3.0);
    Ok(Prop53Outcome::Checked { b, check: BoundCheck::new(lhs, rhs) })
}

/// Gevrey exponent reached from `C(sigma)`: `b = 1 / (64 sigma)`.
pub fn thm54_b(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::arg("sigma must be positive"));
    }
    Ok(1.0 / (64.0 * sigma))
}

/// Gevrey exponent of the force when zero is in the attractor: `1 / (160 ln beta3)`.
pub fn cor55_b(beta3: f64) -> Result<f64> {
    if !(beta3 > 1.0) {
        return Err(Error::arg("beta3 must exceed 1"));
    }
    Ok(1.0 / (160.0 * beta3.ln()))
}

/// The alternative exponent `1 / (96 ln beta3)` used for solutions on the
/// attractor (from membership in `C((3/2) ln beta3)`).
pub fn attractor_b(beta3: f64) -> Result<f64> {
    if !(beta3 > 1.0) {
        return Err(Error::arg("beta3 must exceed 1"));
    }
    Ok(1.0 / (96.0 * beta3.ln()))
}

/// Checks
/// `|E^b B(u,u)| <= (c3 c_A / kappa0^{2b ln 2}) (|A^{b ln2} u|^{1/2} |A^{1 + b ln2} u|^{1/2} |A^{1/2} E^b u|
///   + |A^{1/2 + b ln2} u|^{1/2} |A^{3/2 + b ln2} u|^{1/2} |E^b u|)`
/// using the untruncated product.
pub fn lemma71_check(u: &SpectralField, b: f64, c_a: f64) -> Result<BoundCheck> {
    let grid = u.grid().with_dealias(Dealias::ExtendTo2K);
    let bu = bilinear_b(u, u, &grid)?;
    let w = GevreyWeight::phi_b(b);
    let lhs = gevrey_norm(&bu, &w);
    let s = b * LN_2;
    let kap = grid.kappa0();
    let eb = apply_weight(u, &w);
    let t1 = (u.stokes_norm(s) * u.stokes_norm(1.0 + s)).sqrt() * eb.stokes_norm(0.5);
    let t2 = (u.stokes_norm(0.5 + s) * u.stokes_norm(1.5 + s)).sqrt() * eb.norm();
    let rhs = c3(b) * c_a / kap.powf(2.0 * s) * (t1 + t2);
    Ok(BoundCheck::new(lhs, rhs))
}

/// Partial Fréchet distance plus the bound `2^{-alpha_max}` on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrechetDistance {
    pub value: f64,
    pub tail: f64,
}

/// `sum_{alpha=1}^{alpha_max} 2^{-alpha} |A^{alpha/2}(u-v)| / (1 + |A^{alpha/2}(u-v)|)`.
pub fn frechet_distance(u: &SpectralField, v: &SpectralField, alpha_max: usize) -> Result<FrechetDistance> {
    let d = u.sub(v)?;
    let value = (1..=alpha_max)
        .map(|a| {
            let n = d.stokes_norm(a as f64 / 2.0);
            let frac = if n.is_infinite() { 1.0 } else { n / (1.0 + n) };
            0.5f64.powi(a as i32) * frac
        })
        .sum();
    Ok(FrechetDistance { value, tail: 0.5f64.powi(alpha_max as i32) })
}

/// Rows `(b, |u|_b)` for a sweep of exponents.
pub fn weight_sweep(u: &SpectralField, bs: &[f64]) -> Vec<(f64, f64)> {
    bs.iter().map(|&b| (b, norm_b(u, b))).collect()
}

/// `|A^{-1/2} E^b g|`, the weighted force size entering the attractor bound.
pub fn weighted_force_norm(g: &SpectralField, b: f64) -> f64 {
    let w = GevreyWeight::phi_b(b);
    let grid = *g.grid();
    g.weighted_norm(|k: Wavevector| w.phi(k.norm()).exp() / grid.eigenvalue(k).sqrt())
}

/// `A^sigma` composed with `E^b`, handy for diagnostics.
pub fn stokes_weighted(u: &SpectralField, sigma: f64, b: f64) -> SpectralField {
    apply_weight(&stokes_apply(u, sigma), &GevreyWeight::phi_b(b))
}

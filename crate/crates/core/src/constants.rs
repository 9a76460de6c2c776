//! The constant chain bounding attractor solutions in strips of analyticity,
//! evaluated as plain arithmetic. Anything that can leave the f64 range is
//! carried as a natural log; `R~_new` needs a doubly logged form.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::logspace::ln_add;
use crate::spectral::SpectralField;

pub const DEFAULT_GAMMA_MAX: usize = 40;
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Grashof number `G = |g| / (nu^2 kappa0^2)`.
pub fn grashof(g: &SpectralField, nu: f64) -> f64 {
    let k = g.grid().kappa0();
    g.norm() / (nu * nu * k * k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainInputs {
    pub g: f64,
    pub nu: f64,
    pub kappa0: f64,
    pub c_l: f64,
    pub c_a: f64,
}

impl ChainInputs {
    pub fn validate(&self) -> Result<()> {
        let named = [("G", self.g), ("nu", self.nu), ("kappa0", self.kappa0), ("c_L", self.c_l), ("c_A", self.c_a)];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaTerm {
    pub gamma: usize,
    pub big_gamma: f64,
    pub epsilon: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundSet {
    pub inputs: ChainInputs,
    pub rt1: f64,
    pub rt2: f64,
    pub rt3: f64,
    pub r2: f64,
    pub n2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub cg: f64,
    pub ln_beta1: f64,
    pub ln_c1: f64,
    pub ln_c2: f64,
    pub ln_cg: f64,
    pub gamma_terms: Vec<GammaTerm>,
    /// Bound on the log-truncation error of `C1 C2` at `gamma_max`.
    pub product_tail: f64,
}

fn gamma_term(gamma: usize, i: &ChainInputs, rt1: f64, rt2: f64, rt3: f64, delta: f64) -> GammaTerm {
    let lam = i.nu * i.kappa0 * i.kappa0;
    let big = |g: usize| {
        2f64.powf(g as f64 + 1.5) * i.c_a * (2f64.powi(g as i32 + 2) * i.c_a * rt1 * rt2 + (rt1 * rt3).sqrt())
    };
    let (g0, g1) = (big(gamma), big(gamma + 1));
    let epsilon = 1.0 / (2.0 * SQRT_2 * g0 * delta * lam)
        + SQRT_2 / (g0 * lam * lam * delta * delta)
        + PI * PI / (72.0 * lam * lam * delta.powi(4) * g0 * g1);
    let eta = (rt1 * rt3).sqrt() / (2f64.powi(gamma as i32 + 2) * i.c_a * rt1 * rt2);
    GammaTerm { gamma, big_gamma: g0, epsilon, eta }
}

/// Runs the recursion `R~1, R~2, delta_{1,2,3}, N2, R~3, Gamma, eps, eta,
/// C1, C2, C3, beta1, beta2, C(g)` with `delta_alpha = delta3`. The products
/// stop at `gamma_max`; successive `eps`, `eta` shrink at least by half, so
/// the dropped log-mass is at most twice the first omitted term.
pub fn appendix_bounds(inputs: ChainInputs, gamma_max: usize, tol: f64) -> Result<BoundSet> {
    inputs.validate()?;
    if gamma_max < 4 {
        return Err(Error::arg("gamma_max must be at least 4"));
    }
    let ChainInputs { g, nu, kappa0, c_l, c_a } = inputs;
    let lam = nu * kappa0 * kappa0;
    let s = 2.0 * c_l * c_l + c_a;

    let rt1 = SQRT_2 * g;
    // plain products: powi may round differently once constant-folded
    let r2 = 2137.0 * (c_l * c_l * (c_l * c_l)) * (g * g * g);
    let lead = 3.0 * (SQRT_2 * 256.0 * 24f64.powi(6) * c_l.powi(16)).powf(2.0 / 3.0) / (4.0 * s.powf(4.0 / 3.0));
    let rt2 = (lead * g.powi(6) + 4.0 * r2 * r2).sqrt();
    let delta1 = 1.0 / (16.0 * 24f64.powi(3) * c_l.powi(8) * lam * g.powi(4));
    let bracket = s.powf(8.0 / 3.0) * rt1.powf(8.0 / 3.0) * (lam / (8.0 * delta1 * delta1)).powf(2.0 / 3.0)
        + s.powi(4) * lam * lam * rt1 * rt1 * r2 * r2;
    let delta2 = delta1.min(bracket.powf(-0.5) / 16.0);
    let delta3 = delta2 / 2.0;
    let n2 = r2 * r2 + 2.0 * delta2 * rt1 * rt1 / (lam * delta1 * delta1) + 16.0 * s * s * lam * delta2 * rt1 * rt2.powi(3);
    let rt3 = 4.0 * n2.sqrt() / (nu.sqrt() * kappa0 * delta3.sqrt());

    let gamma_terms: Vec<_> = (3..=gamma_max).map(|k| gamma_term(k, &inputs, rt1, rt2, rt3, delta3)).collect();
    let ln_p1: f64 = gamma_terms.iter().map(|t| t.epsilon.ln_1p()).sum();
    let ln_p2: f64 = gamma_terms.iter().map(|t| t.eta.ln_1p()).sum();
    let next = gamma_term(gamma_max + 1, &inputs, rt1, rt2, rt3, delta3);
    let product_tail = 2.0 * (next.epsilon + next.eta);
    if !(product_tail <= tol) {
        return Err(Error::Numerical(format!(
            "product tail {product_tail:e} exceeds tolerance {tol:e} at gamma_max = {gamma_max}"
        )));
    }

    let c3 = 4.0 * (2f64.powf(2.5) * c_a * c_a * rt1 * rt2 + SQRT_2 * c_a * (rt1 * rt3).sqrt());
    let ln_beta1 = 2.0 * SQRT_2 * lam * c3 * delta3;
    let beta2 = (72.0 * SQRT_2 / (PI * PI)).max(c_a * c_a * rt1 * rt2);
    let ln_c1 = ln_p1;
    let ln_c2 = (27.0 / 128.0 * c_l.powi(8) * rt1 * rt1).ln() + ln_p2;
    let ln_cg = ln_c1 + ln_c2 + 2.0 * rt3.ln() - 9.5 * beta2.ln();

    Ok(BoundSet {
        inputs,
        rt1,
        rt2,
        rt3,
        r2,
        n2,
        delta1,
        delta2,
        delta3,
        beta1: ln_beta1.exp(),
        beta2,
        c1: ln_c1.exp(),
        c2: ln_c2.exp(),
        c3,
        cg: ln_cg.exp(),
        ln_beta1,
        ln_c1,
        ln_c2,
        ln_cg,
        gamma_terms,
        product_tail,
    })
}

impl BoundSet {
    /// `(name, value)` rows in chain order.
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("Rt1", self.rt1),
            ("R2", self.r2),
            ("Rt2", self.rt2),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("delta3", self.delta3),
            ("N2", self.n2),
            ("Rt3", self.rt3),
            ("C1", self.c1),
            ("C2", self.c2),
            ("C3", self.c3),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("Cg", self.cg),
            ("ln_C1", self.ln_c1),
            ("ln_C2", self.ln_c2),
            ("ln_beta1", self.ln_beta1),
            ("ln_Cg", self.ln_cg),
            ("product_tail", self.product_tail),
        ]
    }
}

/// `ln R~_alpha^2 = ln C(g) + 4^g (6 alpha + 1 - 3 g) ln beta1 + (-g^2 + (4 alpha - 1) g + 11 alpha) ln beta2`
/// with `g = floor(2 alpha)`.
pub fn ln_rtilde_sq(alpha: f64, b: &BoundSet) -> Result<f64> {
    if !(alpha >= 3.0) {
        return Err(Error::arg(format!("alpha must be at least 3, got {alpha}")));
    }
    let g = (2.0 * alpha).floor();
    Ok(b.ln_cg
        + 4f64.powf(g) * (6.0 * alpha + 1.0 - 3.0 * g) * b.ln_beta1
        + (-g * g + (4.0 * alpha - 1.0) * g + 11.0 * alpha) * b.beta2.ln())
}

/// `R~_alpha`; saturates to `+inf` when only the log is representable.
pub fn rtilde_alpha(alpha: f64, b: &BoundSet) -> Result<f64> {
    Ok((ln_rtilde_sq(alpha, b)? / 2.0).exp())
}

/// `ln R~_j` for the integer-indexed bounds `|A^{j/2} u| <= R~_j nu kappa0^j`:
/// the chain values for `j <= 3`, then `R~_j^2 = C(g) beta1^{4^j} beta2^{j^2 + 9j/2}`.
pub fn ln_rtilde_index(j: usize, b: &BoundSet) -> Result<f64> {
    match j {
        0 => Err(Error::arg("index must be at least 1")),
        1 => Ok(b.rt1.ln()),
        2 => Ok(b.rt2.ln()),
        3 => Ok(b.rt3.ln()),
        _ => {
            let jf = j as f64;
            Ok(0.5 * (b.ln_cg + 4f64.powf(jf) * b.ln_beta1 + (jf * jf + 4.5 * jf) * b.beta2.ln()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GevreyBoundInputs {
    /// Strip half-width.
    pub delta: f64,
    /// Gevrey exponent.
    pub b: f64,
    /// `|A^{-1/2} E^b g|`.
    pub g_weighted: f64,
}

/// Constants that enter `R~_new`, from the weighted-class analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ClassConstants {
    /// `c1`, `c2(b)`, `c3(b)` from the weight analysis, with `c0` from a `C(sigma)` certificate.
    pub fn for_exponent(c0: f64, b: f64) -> Self {
        Self { c0, c1: crate::gevrey::c1(), c2: crate::gevrey::c2(b), c3: crate::gevrey::c3(b) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RtildeNew {
    pub ln_m1: f64,
    pub ln_m2: f64,
    /// `ln(M1 delta nu kappa0^2)`.
    pub ln_exponent: f64,
    /// `(4/3) c2 R~1^2 + c0^{1/3} (c1 R~1)^{2/3}`, the `delta -> 0` limit of `R~_new^2`.
    pub base: f64,
    /// `ln R~_new^2`, `+inf` past the f64 range.
    pub ln_sq: f64,
    /// `ln ln R~_new^2`, finite even when `ln_sq` is not; NaN when `R~_new < 1`.
    pub ln_ln_sq: f64,
}

impl RtildeNew {
    pub fn m1(&self) -> f64 {
        self.ln_m1.exp()
    }

    pub fn m2(&self) -> f64 {
        self.ln_m2.exp()
    }

    pub fn value(&self) -> f64 {
        (self.ln_sq / 2.0).exp()
    }

    /// `ln(R~_new nu)`, the log of the bound on `|u|_b` in the strip.
    pub fn ln_bound(&self, nu: f64) -> f64 {
        self.ln_sq / 2.0 + nu.ln()
    }
}

/// `R~_new^2 = e^{M1 delta nu kappa0^2} base + M2 (e^{M1 delta nu kappa0^2} - 1)` with
/// `M1 = 4 (c3 c_A)^2 R^2 + 2 sqrt2 c3 c_A R`,
/// `M2 = 2 sqrt2 |A^{-1/2} E^b g|^2 / ((2 sqrt2 (c3 c_A)^2 R^2 + 2 c3 c_A R) nu^4 kappa0^2)`,
/// `R = R~_{3 + 2 b ln 2}`.
pub fn rtilde_new(inputs: &GevreyBoundInputs, bounds: &BoundSet, k: &ClassConstants) -> Result<RtildeNew> {
    let GevreyBoundInputs { delta, b, g_weighted } = *inputs;
    if !(delta >= 0.0 && b >= 0.0 && g_weighted >= 0.0) {
        return Err(Error::arg("delta, b and the weighted force norm must be nonnegative"));
    }
    let ChainInputs { nu, kappa0, c_a, .. } = bounds.inputs;
    let ln_r = ln_rtilde_sq(3.0 + 2.0 * b * LN_2, bounds)? / 2.0;
    let ln_cc = (k.c3 * c_a).ln();
    let ln_m1 = ln_add((4.0f64).ln() + 2.0 * ln_cc + 2.0 * ln_r, (2.0 * SQRT_2).ln() + ln_cc + ln_r);
    let ln_den = ln_add((2.0 * SQRT_2).ln() + 2.0 * ln_cc + 2.0 * ln_r, LN_2 + ln_cc + ln_r);
    let ln_m2 = (2.0 * SQRT_2).ln() + 2.0 * g_weighted.ln() - ln_den - 4.0 * nu.ln() - 2.0 * kappa0.ln();
    let ln_exponent = ln_m1 + (delta * nu * kappa0 * kappa0).ln();
    let base = 4.0 / 3.0 * k.c2 * bounds.rt1 * bounds.rt1 + k.c0.cbrt() * (k.c1 * bounds.rt1).powf(2.0 / 3.0);

    let x = ln_exponent.exp();
    let m2 = ln_m2.exp();
    // e^x base + M2 (e^x - 1) = e^x (base + M2 (1 - e^{-x}))
    let rest = (base + m2 * -(-x).exp_m1()).ln();
    let ln_sq = x + rest;
    let ln_ln_sq = if x > 1e3 {
        ln_exponent + (rest / x).ln_1p()
    } else {
        ln_sq.ln()
    };
    Ok(RtildeNew { ln_m1, ln_m2, ln_exponent, base, ln_sq, ln_ln_sq })
}

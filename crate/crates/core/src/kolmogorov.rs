//! Forcing by a single Stokes eigenvector. Then `B(g, g) = 0`, every Taylor
//! coefficient is a scalar multiple `U_n = p_n(lambda) g`, and the solution
//! through zero is `u(t) = phi(t) g` with `phi' + nu lambda phi = 1`, which is
//! unbounded as `t -> -inf`. So zero is not on the attractor.

use std::f64::consts::SQRT_2;

use crate::bilinear::bilinear_b;
use crate::error::{Error, Result};
use crate::logspace::SignedLog;
use crate::spectral::{stokes_apply, GridSpec, SpectralField, Wavevector, C64};
use crate::taylor::{radius_from_norms, RadiusEstimate};

#[derive(Clone, Debug)]
pub struct EigenForce {
    pub k: Wavevector,
    /// `|g|` in the L^2 norm.
    pub amplitude: f64,
    pub lambda: f64,
    pub field: SpectralField,
}

/// Real shear force on the pair `+-k`, velocity perpendicular to `k`.
pub fn eigen_force(k: Wavevector, amplitude: f64, grid: GridSpec) -> Result<EigenForce> {
    if k.is_zero() {
        return Err(Error::ZeroMode);
    }
    if !grid.contains(k) {
        return Err(Error::OutOfGrid(k, grid.k_max()));
    }
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::arg("forcing amplitude must be nonzero and finite"));
    }
    let r = k.norm();
    // |g|^2 = 2 L^2 |c|^2 over the conjugate pair
    let c = amplitude / (grid.period() * SQRT_2);
    let coeff = [C64::new(-c * k.k2 as f64 / r, 0.0), C64::new(c * k.k1 as f64 / r, 0.0)];
    let field = SpectralField::from_modes(grid, [(k, coeff)], true)?;
    let lambda = grid.eigenvalue(k);

    let stokes_defect = stokes_apply(&field, 1.0).sub(&field.scale(lambda))?.norm();
    let transport = bilinear_b(&field, &field, &grid)?.norm();
    if stokes_defect > 1e-14 * lambda * field.norm() || transport > 0.0 {
        return Err(Error::Numerical(format!(
            "eigenforce invariants fail: Stokes defect {stokes_defect:e}, |B(g,g)| = {transport:e}"
        )));
    }
    Ok(EigenForce { k, amplitude, lambda, field })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PnSequence {
    pub lambda: f64,
    pub nu: f64,
    pub delta0: f64,
    /// `p_0 ..= p_N` with `p_0 = 0`.
    pub values: Vec<SignedLog>,
}

impl PnSequence {
    pub fn get(&self, n: usize) -> f64 {
        self.values[n].to_f64()
    }

    pub fn ln_abs(&self, n: usize) -> f64 {
        self.values[n].ln_abs()
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// `max_{1 <= n <= N} |p_n| / delta0`, in log form.
    pub fn ln_max_ratio(&self) -> f64 {
        self.values[1..].iter().map(|v| v.ln_abs()).fold(f64::NEG_INFINITY, f64::max) - self.delta0.ln()
    }

    /// Largest relative defect of `(n+1) p_{n+1} - (n-1) p_{n-1} + nu delta0 lambda p_n = 0`.
    pub fn recursion_defect(&self) -> f64 {
        let c = self.nu * self.delta0 * self.lambda;
        (1..self.order())
            .map(|n| {
                let a = self.values[n + 1].scale((n + 1) as f64);
                let b = self.values[n - 1].scale(n as f64 - 1.0);
                let d = self.values[n].scale(c);
                let scale = a.ln_abs().max(b.ln_abs()).max(d.ln_abs());
                if scale == f64::NEG_INFINITY {
                    return 0.0;
                }
                let r = a.sub(b).add(d);
                if r.is_zero() { 0.0 } else { (r.ln_abs() - scale).exp() }
            })
            .fold(0.0, f64::max)
    }
}

/// `p_1 = delta0`, `p_2 = -nu lambda delta0^2 / 2`,
/// `p_{n+1} = ((n-1) / (n+1)) p_{n-1} - (nu delta0 lambda / (n+1)) p_n`, in signed-log form.
pub fn pn_sequence(lambda: f64, nu: f64, delta0: f64, n: usize) -> Result<PnSequence> {
    if n < 2 {
        return Err(Error::arg("sequence length must be at least 2"));
    }
    let mut values = vec![SignedLog::ZERO, SignedLog::from_f64(delta0)];
    let c = nu * delta0 * lambda;
    for m in 1..n {
        let mf = m as f64;
        let next = values[m - 1].scale((mf - 1.0) / (mf + 1.0)).sub(values[m].scale(c / (mf + 1.0)));
        values.push(next);
    }
    Ok(PnSequence { lambda, nu, delta0, values })
}

/// `P(T) = (1 - ((1 - T) / (1 + T))^a) / (nu lambda)`, `a = nu lambda delta0 / 2`:
/// the sum of `p_n T^n`, with radius of convergence exactly one when `a` is not an integer.
pub fn closed_form_series(z: C64, lambda: f64, nu: f64, delta0: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let nl = nu * lambda;
    if nl == 0.0 {
        // lambda -> 0 limit: delta0 atanh(T)
        return ((one + z).ln() - (one - z).ln()) * (delta0 / 2.0);
    }
    let a = nl * delta0 / 2.0;
    (one - ((one - z) / (one + z)).powf(a)) / nl
}

/// `phi(t) = 1/(nu lambda) + (phi0 - 1/(nu lambda)) e^{-nu lambda t}`.
pub fn phi(t: f64, phi0: f64, lambda: f64, nu: f64) -> f64 {
    let s = 1.0 / (nu * lambda);
    s + (phi0 - s) * (-nu * lambda * t).exp()
}

/// `phi' + nu lambda phi - 1` for the closed form, with the derivative taken analytically.
pub fn phi_ode_residual(t: f64, phi0: f64, lambda: f64, nu: f64) -> f64 {
    let s = 1.0 / (nu * lambda);
    let dphi = -nu * lambda * (phi0 - s) * (-nu * lambda * t).exp();
    dphi + nu * lambda * phi(t, phi0, lambda, nu) - 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KolmogorovVerdict {
    NotInAttractor,
}

#[derive(Clone, Debug)]
pub struct KolmogorovReport {
    pub verdict: KolmogorovVerdict,
    /// `u* = g / (nu lambda)`.
    pub equilibrium: SpectralField,
    /// `|nu A u* - g| / |g|`.
    pub stokes_residual: f64,
    /// `|B(u*, u*)| / |u*|`.
    pub transport_residual: f64,
    /// `(t, phi(t))` with `phi(0) = 0` for increasingly negative `t`; grows without bound.
    pub backward_growth: Vec<(f64, f64)>,
    /// `(T, P(T))` toward `T = -1`, where the closed form blows up.
    pub boundary_blowup: Vec<(f64, f64)>,
    pub pn: PnSequence,
    pub ln_max_ratio: f64,
    pub radius: Option<RadiusEstimate>,
    /// `a - 1`, the exponent in `|p_n| ~ n^{a-1}`.
    pub predicted_exponent: f64,
}

impl KolmogorovReport {
    pub fn render(&self) -> String {
        let mut s = String::from("verdict: NotInAttractor\n");
        s.push_str("witness: u(t) = phi(t) g with phi' + nu lambda phi = 1; a bounded solution must sit at u* = g/(nu lambda) != 0\n");
        s.push_str(&format!("stokes_residual: {:e}\n", self.stokes_residual));
        s.push_str(&format!("transport_residual: {:e}\n", self.transport_residual));
        for (t, p) in &self.backward_growth {
            s.push_str(&format!("phi({t:e}) = {p:e}\n"));
        }
        for (z, p) in &self.boundary_blowup {
            s.push_str(&format!("P({z}) = {p:e}\n"));
        }
        s.push_str(&format!("max |p_n| / delta0: {:e}\n", self.ln_max_ratio.exp()));
        if let Some(r) = &self.radius {
            s.push_str(&format!("rho_hat: {:e}\n", r.rho_hat));
            s.push_str(&format!("fitted_exponent: {:e}\n", r.algebraic_exponent));
        }
        s.push_str(&format!("predicted_exponent: {:e}\n", self.predicted_exponent));
        s
    }
}

pub fn kolmogorov_verdict(f: &EigenForce, nu: f64, delta0: f64, n: usize) -> Result<KolmogorovReport> {
    let nl = nu * f.lambda;
    let equilibrium = f.field.scale(1.0 / nl);
    let g_norm = f.field.norm();
    let stokes_residual = stokes_apply(&equilibrium, 1.0).scale(nu).sub(&f.field)?.norm() / g_norm;
    let transport_residual = bilinear_b(&equilibrium, &equilibrium, f.field.grid())?.norm() / equilibrium.norm();
    let backward_growth = [1.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|&m| {
            let t = -m / nl;
            (t, phi(t, 0.0, f.lambda, nu))
        })
        .collect();
    let boundary_blowup = [-0.9, -0.99, -0.999, -0.9999]
        .iter()
        .map(|&z| (z, closed_form_series(C64::new(z, 0.0), f.lambda, nu, delta0).re))
        .collect();
    let pn = pn_sequence(f.lambda, nu, delta0, n)?;
    let norms: Vec<f64> = (0..=n).map(|i| pn.get(i).abs()).collect();
    Ok(KolmogorovReport {
        verdict: KolmogorovVerdict::NotInAttractor,
        equilibrium,
        stokes_residual,
        transport_residual,
        backward_growth,
        boundary_blowup,
        ln_max_ratio: pn.ln_max_ratio(),
        radius: radius_from_norms(&norms).ok(),
        pn,
        predicted_exponent: nl * delta0 / 2.0 - 1.0,
    })
}

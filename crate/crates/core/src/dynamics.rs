//! Galerkin NSE integration in real and complex time.
//!
//! Along the ray `zeta = t0 + rho e^{i theta}` the system is
//! `du/drho = e^{i theta} (g - nu A u - B(u, u))`. The integrator works on
//! `w = u - u_s` with `u_s = (nu A)^{-1} g`, so
//! `dw/drho = -e^{i theta} (nu A w + B(u, u))`: the linear part is applied
//! exactly by modewise integrating factors and stationary Stokes states are
//! fixed points to rounding.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bilinear::{Backend, Convolver};
use crate::constants::{ln_rtilde_index, BoundSet};
use crate::error::{Error, Result};
use crate::gevrey::norm_b;
use crate::spectral::{hermitian_product, random_real_field, Dealias, GridSpec, SpectralField, C64};

/// Largest admissible `dt nu kappa0^2 (sqrt2 K)^2`.
pub const STIFFNESS_LIMIT: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Ray angle, `|theta| <= pi/4`.
    pub theta: f64,
    /// Ray length.
    pub t_end: f64,
    /// Exponent for the `|u|_b` diagnostic.
    pub b: f64,
    /// Keep every `record_every`-th state (0: first and last only).
    pub record_every: usize,
    pub backend: Backend,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, theta: 0.0, t_end: 1.0, b: 0.0, record_every: 0, backend: Backend::Fft }
    }
}

impl IntegratorConfig {
    pub fn validate(&self, grid: &GridSpec, nu: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::arg(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.theta.abs() <= FRAC_PI_4 + 1e-15) {
            return Err(Error::arg(format!("ray angle must satisfy |theta| <= pi/4, got {}", self.theta)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::arg("t_end must be nonnegative"));
        }
        let stiff = self.dt * nu * grid.lambda_max();
        if stiff > STIFFNESS_LIMIT {
            return Err(Error::arg(format!("dt nu lambda_max = {stiff:e} exceeds {STIFFNESS_LIMIT}")));
        }
        Ok(())
    }
}

/// One IFRK4 stepper bound to a force and ray direction.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: GridSpec,
    nu: f64,
    rot: C64,
    conv: Convolver,
    u_s: SpectralField,
    g: SpectralField,
}

impl Stepper {
    pub fn new(g: &SpectralField, nu: f64, theta: f64, backend: Backend) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::arg("viscosity must be positive"));
        }
        let grid = g.grid().with_dealias(Dealias::TruncateToK);
        let g = SpectralField::from_raw(grid, g.coeffs().to_vec(), g.is_real());
        let u_s = g.scale_modes(|k| 1.0 / (nu * grid.eigenvalue(k)));
        Ok(Self { grid, nu, rot: C64::from_polar(1.0, theta), conv: Convolver::new(grid, backend), u_s, g })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn force(&self) -> &SpectralField {
        &self.g
    }

    /// `(nu A)^{-1} g`.
    pub fn stokes_state(&self) -> &SpectralField {
        &self.u_s
    }

    fn factor(&self, h: f64) -> impl Fn(crate::spectral::Wavevector) -> C64 + '_ {
        let c = -self.rot * self.nu * h;
        let grid = self.grid;
        move |k| (c * grid.eigenvalue(k)).exp()
    }

    fn propagate(&self, w: &SpectralField, h: f64) -> SpectralField {
        let f = self.factor(h);
        let real = w.is_real() && self.rot.im == 0.0;
        w.map_modes(|k, c| {
            let e = f(k);
            [c[0] * e, c[1] * e]
        }, real)
    }

    /// `-e^{i theta} B(w + u_s, w + u_s)`.
    fn nonlinear(&self, w: &SpectralField) -> Result<SpectralField> {
        let u = w.add(&self.u_s)?;
        Ok(self.conv.apply(&u, &u)?.scale_complex(-self.rot))
    }

    /// One Lawson RK4 step of length `h` in the shifted variable.
    fn step_shifted(&self, w: &SpectralField, h: f64) -> Result<SpectralField> {
        let hc = |x: f64| C64::new(x, 0.0);
        let w_half = self.propagate(w, h / 2.0);
        let w_full = self.propagate(w, h);
        let k1 = self.nonlinear(w)?;
        let k2 = self.nonlinear(&self.propagate(&w.axpy(hc(h / 2.0), &k1)?, h / 2.0))?;
        let k3 = self.nonlinear(&w_half.axpy(hc(h / 2.0), &k2)?)?;
        let k4 = self.nonlinear(&w_full.axpy(hc(h), &self.propagate(&k3, h / 2.0))?)?;
        let mid = self.propagate(&k2.add(&k3)?, h / 2.0);
        w_full
            .axpy(hc(h / 6.0), &self.propagate(&k1, h))?
            .axpy(hc(h / 3.0), &mid)?
            .axpy(hc(h / 6.0), &k4)
    }

    /// Advances `u` by `h` along the ray.
    pub fn step(&self, u: &SpectralField, h: f64) -> Result<SpectralField> {
        let w = u.sub(&self.u_s)?;
        let out = self.step_shifted(&w, h)?.add(&self.u_s)?;
        let n = out.norm();
        if !n.is_finite() || n > 1e150 {
            return Err(Error::Numerical(format!("state norm {n:e} after step")));
        }
        Ok(out)
    }
}

/// One IFRK4 step of `du/drho = e^{i theta} (g - nu A u - B(u, u))`.
pub fn step(u: &SpectralField, g: &SpectralField, nu: f64, dt: f64, theta: f64) -> Result<SpectralField> {
    let cfg = IntegratorConfig { dt, theta, ..Default::default() };
    cfg.validate(g.grid(), nu)?;
    let u = SpectralField::from_raw(g.grid().with_dealias(Dealias::TruncateToK), u.coeffs().to_vec(), u.is_real());
    Stepper::new(g, nu, theta, Backend::Fft)?.step(&u, dt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepDiagnostics {
    pub rho: f64,
    pub t: C64,
    pub norm: f64,
    pub norm_a_half: f64,
    pub norm_b: f64,
    /// Relative energy-balance defect; NaN off the real axis and at the ends.
    pub energy_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t0: f64,
    pub theta: f64,
    pub times: Vec<C64>,
    pub states: Vec<SpectralField>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Ray parameter of the first non-finite step; the last state is finite.
    pub blow_up: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn max_energy_residual(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.energy_residual).filter(|r| r.is_finite()).fold(0.0, f64::max)
    }
}

/// `d/dt |u|^2/2 + nu |A^{1/2} u|^2 - (g, u)` with a five-point central
/// difference, relative to the largest of the three terms.
fn energy_audit(diag: &mut [StepDiagnostics], inner_gu: &[f64], nu: f64, dt: f64) {
    let e: Vec<f64> = diag.iter().map(|d| 0.5 * d.norm * d.norm).collect();
    for i in 2..diag.len().saturating_sub(2) {
        let de = (e[i - 2] - 8.0 * e[i - 1] + 8.0 * e[i + 1] - e[i + 2]) / (12.0 * dt);
        let diss = nu * diag[i].norm_a_half * diag[i].norm_a_half;
        let scale = de.abs().max(diss).max(inner_gu[i].abs());
        diag[i].energy_residual = if scale > 0.0 { (de + diss - inner_gu[i]).abs() / scale } else { 0.0 };
    }
}

/// Integrates from `u0` for `ceil(t_end / dt)` equal steps along the ray.
pub fn integrate(u0: &SpectralField, g: &SpectralField, nu: f64, t0: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate(g.grid(), nu)?;
    g.grid().check_same(u0.grid())?;
    let st = Stepper::new(g, nu, cfg.theta, cfg.backend)?;
    let grid = *st.grid();
    let mut u = SpectralField::from_raw(grid, u0.coeffs().to_vec(), u0.is_real());
    let n_steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let h = if n_steps == 0 { 0.0 } else { cfg.t_end / n_steps as f64 };
    let rot = C64::from_polar(1.0, cfg.theta);
    let real_axis = cfg.theta == 0.0 && u.is_real() && g.is_real();

    let diag_of = |u: &SpectralField, rho: f64| StepDiagnostics {
        rho,
        t: C64::new(t0, 0.0) + rot * rho,
        norm: u.norm(),
        norm_a_half: u.stokes_norm(0.5),
        norm_b: norm_b(u, cfg.b),
        energy_residual: f64::NAN,
    };
    let gu = |u: &SpectralField| hermitian_product(u, st.force()).map(|c| c.re).unwrap_or(f64::NAN);

    let mut times = vec![C64::new(t0, 0.0)];
    let mut states = vec![u.clone()];
    let mut diagnostics = vec![diag_of(&u, 0.0)];
    let mut inner = vec![gu(&u)];
    let mut blow_up = None;
    for i in 1..=n_steps {
        let rho = i as f64 * h;
        match st.step(&u, h) {
            Ok(next) => u = next,
            Err(Error::Numerical(_)) => {
                blow_up = Some(rho);
                break;
            }
            Err(e) => return Err(e),
        }
        diagnostics.push(diag_of(&u, rho));
        inner.push(gu(&u));
        if cfg.record_every > 0 && i % cfg.record_every == 0 && i != n_steps {
            times.push(diagnostics[i].t);
            states.push(u.clone());
        }
    }
    let last_rho = diagnostics.last().map_or(0.0, |d| d.rho);
    let end = C64::new(t0, 0.0) + rot * last_rho;
    if times[times.len() - 1] != end {
        times.push(end);
        states.push(u);
    }
    if real_axis {
        energy_audit(&mut diagnostics, &inner, nu, h);
    }
    Ok(Trajectory { t0, theta: cfg.theta, times, states, diagnostics, blow_up })
}

#[derive(Clone, Debug)]
pub struct MemberOutcome {
    pub seed: u64,
    pub blow_up: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct AttractorSample {
    pub samples: Vec<SpectralField>,
    pub members: Vec<MemberOutcome>,
    pub min_norm: f64,
    pub max_norm: f64,
    pub min_norm_b: f64,
    pub max_norm_b: f64,
    /// `min |u|` over the samples, the distance from 0 to the sample set.
    pub dist_zero: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleConfig {
    pub members: usize,
    pub t_transient: f64,
    pub t_sample: f64,
    pub samples_per_member: usize,
    pub seed: u64,
}

/// Random members with modes `|k|_inf <= 4` and components uniform in
/// `[-nu kappa0, nu kappa0]`; member `i` draws from seed `seed + i`.
pub fn attractor_sample(
    g: &SpectralField,
    nu: f64,
    ens: &EnsembleConfig,
    cfg: &IntegratorConfig,
) -> Result<AttractorSample> {
    let grid = g.grid().with_dealias(Dealias::TruncateToK);
    let amp = nu * grid.kappa0();
    let runs: Vec<Result<(Vec<SpectralField>, MemberOutcome)>> = (0..ens.members)
        .into_par_iter()
        .map(|i| {
            let seed = ens.seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u0 = random_real_field(grid, 4, amp, &mut rng);
            let pre = integrate(&u0, g, nu, 0.0, &IntegratorConfig { t_end: ens.t_transient, record_every: 0, ..*cfg })?;
            if pre.blow_up.is_some() {
                return Ok((Vec::new(), MemberOutcome { seed, blow_up: pre.blow_up }));
            }
            let per = ens.samples_per_member.max(1);
            let stride = ((ens.t_sample / cfg.dt).ceil() as usize / per).max(1);
            let post = integrate(
                pre.last(),
                g,
                nu,
                ens.t_transient,
                &IntegratorConfig { t_end: stride as f64 * cfg.dt * per as f64, record_every: stride, ..*cfg },
            )?;
            let samples = post.states.into_iter().skip(1).collect();
            Ok((samples, MemberOutcome { seed, blow_up: post.blow_up }))
        })
        .collect();
    let mut samples = Vec::new();
    let mut members = Vec::new();
    for r in runs {
        let (s, m) = r?;
        samples.extend(s);
        members.push(m);
    }
    let norms: Vec<f64> = samples.iter().map(|u| u.norm()).collect();
    let gnorms: Vec<f64> = samples.iter().map(|u| norm_b(u, cfg.b)).collect();
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    Ok(AttractorSample {
        min_norm: min(&norms),
        max_norm: max(&norms),
        min_norm_b: min(&gnorms),
        max_norm_b: max(&gnorms),
        dist_zero: min(&norms),
        samples,
        members,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlackRow {
    /// Power: the row compares `|A^{j/2} u|` with `R~_j nu kappa0^j`.
    pub j: usize,
    pub max_norm: f64,
    pub ln_bound: f64,
    /// `ln bound - ln max_norm`; nonnegative when the bound holds.
    pub ln_slack: f64,
}

/// Compares sampled `|A^{j/2} u|` with the chain bounds for `j = 1..=5`.
pub fn bound_slack(samples: &[SpectralField], bounds: &BoundSet) -> Result<Vec<SlackRow>> {
    let nu = bounds.inputs.nu;
    let k0 = bounds.inputs.kappa0;
    (1..=5)
        .map(|j| {
            let max_norm = samples.iter().map(|u| u.stokes_norm(j as f64 / 2.0)).fold(0.0, f64::max);
            let ln_bound = ln_rtilde_index(j, bounds)? + nu.ln() + j as f64 * k0.ln();
            Ok(SlackRow { j, max_norm, ln_bound, ln_slack: ln_bound - max_norm.ln() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayResult {
    pub theta: f64,
    pub rho_end: f64,
    /// Reached `|Im zeta| = delta` (or full length on the real ray).
    pub reached: bool,
    pub sup_norm_b: f64,
    pub blow_up: Option<f64>,
    /// `(rho, |u|_b)` along the ray.
    pub profile: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayProfile {
    pub rays: Vec<RayResult>,
    pub sup_norm_b: f64,
    /// `ln(R~_new nu)`.
    pub ln_bound: f64,
    /// `ln bound - ln sup`; positive when the bound holds.
    pub ln_slack: f64,
    /// Some ray blew up before reaching the strip edge.
    pub narrower_strip: bool,
}

pub const RAY_ANGLES: [f64; 5] = [-FRAC_PI_4, -FRAC_PI_8, 0.0, FRAC_PI_8, FRAC_PI_4];

/// Integrates from `u0` along each ray in [`RAY_ANGLES`] up to `|Im zeta| = delta`;
/// the real ray runs as far as the `pi/8` rays.
pub fn gevrey_along_ray(
    u0: &SpectralField,
    g: &SpectralField,
    nu: f64,
    delta: f64,
    ln_bound: f64,
    cfg: &IntegratorConfig,
) -> Result<RayProfile> {
    if !(delta > 0.0) {
        return Err(Error::arg("strip half-width must be positive"));
    }
    let rays: Vec<Result<RayResult>> = RAY_ANGLES
        .par_iter()
        .map(|&theta| {
            let s = theta.sin().abs();
            let rho_end = delta / if s > 0.0 { s } else { FRAC_PI_8.sin() };
            let steps = (rho_end / cfg.dt).ceil().max(1.0);
            let c = IntegratorConfig { theta, t_end: rho_end, dt: rho_end / steps, record_every: 0, ..*cfg };
            let tr = integrate(u0, g, nu, 0.0, &c)?;
            let profile: Vec<(f64, f64)> = tr.diagnostics.iter().map(|d| (d.rho, d.norm_b)).collect();
            let sup = profile.iter().map(|p| p.1).fold(0.0, f64::max);
            Ok(RayResult { theta, rho_end, reached: tr.blow_up.is_none(), sup_norm_b: sup, blow_up: tr.blow_up, profile })
        })
        .collect();
    let rays = rays.into_iter().collect::<Result<Vec<_>>>()?;
    let sup = rays.iter().map(|r| r.sup_norm_b).fold(0.0, f64::max);
    let narrower_strip = rays.iter().any(|r| !r.reached);
    Ok(RayProfile { ln_slack: ln_bound - sup.ln(), rays, sup_norm_b: sup, ln_bound, narrower_strip })
}

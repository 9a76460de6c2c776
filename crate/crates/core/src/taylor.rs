//! Taylor expansion of a solution through `u(0) = 0` in the variable `T` of
//! the conformal map from the strip `|Im t| < delta` onto the unit disk, and
//! the convergence test built on it.
//!
//! With `psi(T) = 1 / (1 - T^2)` the solution obeys
//! `dU/dT = delta0 psi(T) (g - nu A U - B(U, U))`, which gives
//! `U_0 = 0`, `U_1 = delta0 g` and
//! `(n+1) U_{n+1} = (n-1) U_{n-1} - nu delta0 A U_n - delta0 sum_{h+k=n} B(U_k, U_h)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bilinear::{bilinear_b, Backend, Convolver, PhysicalField};
use crate::error::{Error, Result};
use crate::gevrey::GevreyWeight;
use crate::spectral::{stokes_apply, Coeff, Dealias, GridSpec, SpectralField, C64};

/// Coefficient norms above this stop the recursion.
pub const DIVERGENCE_CAP: f64 = 1e300;
pub const DEFAULT_MARGIN: f64 = 0.05;

/// `T = (e^{pi t / 2 delta} - 1) / (e^{pi t / 2 delta} + 1)`, a bijection from
/// the strip `|Im t| < delta` onto the unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalMap {
    delta: f64,
}

impl ConformalMap {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::arg(format!("strip half-width must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `delta0 = 4 delta / pi = dt/dT` at `T = 0`.
    pub fn delta0(&self) -> f64 {
        4.0 * self.delta / PI
    }

    pub fn to_disk(&self, t: C64) -> C64 {
        (t * (PI / (4.0 * self.delta))).tanh()
    }

    /// `t = (2 delta / pi) [ln(1 + T) - ln(1 - T)]`.
    pub fn to_strip(&self, z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        ((one + z).ln() - (one - z).ln()) * (2.0 * self.delta / PI)
    }

    pub fn to_disk_real(&self, t: f64) -> f64 {
        (t * PI / (4.0 * self.delta)).tanh()
    }

    pub fn to_strip_real(&self, z: f64) -> f64 {
        self.delta0() * z.atanh()
    }
}

/// `psi(T) = 1 / (1 - T^2)`.
pub fn psi(z: C64) -> C64 {
    (C64::new(1.0, 0.0) - z * z).inv()
}

#[derive(Clone, Debug)]
pub struct TaylorSeries {
    pub map: ConformalMap,
    pub nu: f64,
    pub b: f64,
    /// `U_0 ..= U_N`; shorter than requested when the recursion diverged.
    pub coeffs: Vec<SpectralField>,
    /// `|U_n|_b`.
    pub gnorms: Vec<f64>,
    pub n_requested: usize,
    pub divergent: bool,
}

impl TaylorSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest available index.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn grid(&self) -> &GridSpec {
        self.coeffs[0].grid()
    }

    /// Rows `(n, |U_n|_b, |U_n|_b / |U_{n-1}|_b)`; the ratio is NaN when undefined.
    pub fn norm_table(&self) -> Vec<(usize, f64, f64)> {
        self.gnorms
            .iter()
            .enumerate()
            .map(|(n, &v)| {
                let r = if n > 0 && self.gnorms[n - 1] > 0.0 { v / self.gnorms[n - 1] } else { f64::NAN };
                (n, v, r)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorConfig {
    pub n: usize,
    pub b: f64,
    pub backend: Backend,
}

impl Default for TaylorConfig {
    fn default() -> Self {
        Self { n: 64, b: 0.0, backend: Backend::Fft }
    }
}

/// `sum_{k=1}^{n-1} (U_k . grad) U_{n-k}` from cached physical samples.
fn cauchy_sum(conv: &Convolver, cache: &[PhysicalField], n: usize, reality: bool) -> SpectralField {
    let mut w = conv.zero_buffers();
    let m2 = w[0].len();
    let chunk = (m2 / rayon::current_num_threads().max(1)).max(256);
    let (w0, w1) = w.split_at_mut(1);
    w0[0]
        .par_chunks_mut(chunk)
        .zip(w1[0].par_chunks_mut(chunk))
        .enumerate()
        .for_each(|(ci, (a, b))| {
            let base = ci * chunk;
            for k in 1..n {
                let (u, v) = (&cache[k], &cache[n - k]);
                for (p, (wa, wb)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                    let i = base + p;
                    let (x, y) = (u.vel[0][i], u.vel[1][i]);
                    *wa += x * v.grad[0][0][i] + y * v.grad[1][0][i];
                    *wb += x * v.grad[0][1][i] + y * v.grad[1][1][i];
                }
            }
        });
    conv.finish(w, reality)
}

/// Generates `U_0 ..= U_N` on `grid` with Galerkin-truncated products.
/// The FFT backend keeps physical samples of every `U_k`, so each step costs
/// one forward transform plus pointwise products.
pub fn taylor_coefficients(
    g: &SpectralField,
    nu: f64,
    map: ConformalMap,
    cfg: &TaylorConfig,
) -> Result<TaylorSeries> {
    if cfg.n < 2 {
        return Err(Error::arg("series order must be at least 2"));
    }
    if !(nu > 0.0) {
        return Err(Error::arg("viscosity must be positive"));
    }
    let grid = g.grid().with_dealias(Dealias::TruncateToK);
    let g = SpectralField::from_raw(grid, g.coeffs().to_vec(), g.is_real());
    let conv = Convolver::new(grid, cfg.backend);
    let weight = GevreyWeight::phi_b(cfg.b);
    let d0 = map.delta0();
    let reality = g.is_real();

    let mut coeffs = vec![SpectralField::zeros(grid), g.scale(d0)];
    let mut cache: Vec<PhysicalField> = Vec::new();
    let mut divergent = false;
    if cfg.backend == Backend::Fft {
        cache.push(conv.physical(&coeffs[0]));
        cache.push(conv.physical(&coeffs[1]));
    }
    for n in 1..cfg.n {
        let sum = match cfg.backend {
            Backend::Fft => cauchy_sum(&conv, &cache, n, reality),
            Backend::Direct => {
                let mut s = SpectralField::zeros(grid);
                for k in 1..n {
                    s = s.add(&bilinear_b(&coeffs[k], &coeffs[n - k], &grid)?)?;
                }
                s
            }
        };
        let np1 = (n + 1) as f64;
        let next = coeffs[n - 1]
            .scale((n as f64 - 1.0) / np1)
            .axpy(C64::new(-nu * d0 / np1, 0.0), &stokes_apply(&coeffs[n], 1.0))?
            .axpy(C64::new(-d0 / np1, 0.0), &sum)?;
        let size = next.norm().max(crate::gevrey::gevrey_norm(&next, &weight));
        if !(size <= DIVERGENCE_CAP) {
            divergent = true;
            break;
        }
        if cfg.backend == Backend::Fft {
            cache.push(conv.physical(&next));
        }
        coeffs.push(next);
    }
    let gnorms = coeffs.iter().map(|u| crate::gevrey::gevrey_norm(u, &weight)).collect();
    Ok(TaylorSeries { map, nu, b: cfg.b, coeffs, gnorms, n_requested: cfg.n, divergent })
}

/// Largest relative defect of
/// `(n+1) U_{n+1} - (n-1) U_{n-1} + nu delta0 A U_n + delta0 sum B(U_k, U_h)`
/// over `1 <= n < N`, with every product re-evaluated by direct summation.
pub fn recursion_residual(s: &TaylorSeries, g: &SpectralField) -> Result<f64> {
    let grid = *s.grid();
    let d0 = s.map.delta0();
    let g = SpectralField::from_raw(grid, g.coeffs().to_vec(), g.is_real());
    let mut worst: f64 = 0.0;
    let defect0 = s.coeffs[1].sub(&g.scale(d0))?.norm();
    if s.coeffs[1].norm() > 0.0 {
        worst = defect0 / s.coeffs[1].norm();
    }
    for n in 1..s.order() {
        let mut sum = SpectralField::zeros(grid);
        for k in 1..=n / 2 {
            let h = n - k;
            let term = if k == h {
                bilinear_b(&s.coeffs[k], &s.coeffs[h], &grid)?
            } else {
                crate::bilinear::bilinear_sym(&s.coeffs[k], &s.coeffs[h], &grid)?
            };
            sum = sum.add(&term)?;
        }
        let a = s.coeffs[n + 1].scale((n + 1) as f64);
        let b = s.coeffs[n - 1].scale(n as f64 - 1.0);
        let c = stokes_apply(&s.coeffs[n], 1.0).scale(s.nu * d0);
        let d = sum.scale(d0);
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if scale == 0.0 {
            continue;
        }
        let r = a.sub(&b)?.add(&c)?.add(&d)?.norm();
        worst = worst.max(r / scale);
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct SeriesValue {
    /// `sum_{n <= n_used} U_n T^n`, complexified.
    pub field: SpectralField,
    /// `|U_{n_used}|_b |T|^{n_used} / (1 - q)`; `+inf` when `q >= 1`.
    pub remainder: f64,
    /// Observed term ratio `|T| / rho_hat`, or the last coefficient ratio times `|T|`.
    pub q: f64,
}

fn tail_ratio(s: &TaylorSeries, n_used: usize) -> f64 {
    if let Ok(r) = radius_estimate(s) {
        if r.rho_hat.is_infinite() {
            return 0.0;
        }
        return 1.0 / r.rho_hat;
    }
    if n_used >= 1 && s.gnorms[n_used - 1] > 0.0 {
        s.gnorms[n_used] / s.gnorms[n_used - 1]
    } else {
        0.0
    }
}

fn horner(coeffs: &[&[Coeff]], z: C64) -> Vec<Coeff> {
    let mut acc = coeffs[coeffs.len() - 1].to_vec();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        for (a, b) in acc.iter_mut().zip(c.iter()) {
            a[0] = a[0] * z + b[0];
            a[1] = a[1] * z + b[1];
        }
    }
    acc
}

/// Horner evaluation of the partial sum through `U_{n_used}` at `|T| < 1`.
pub fn evaluate_series(s: &TaylorSeries, z: C64, n_used: usize) -> Result<SeriesValue> {
    if !(z.norm() < 1.0) {
        return Err(Error::arg(format!("|T| must be below 1, got {}", z.norm())));
    }
    if n_used > s.order() {
        return Err(Error::arg(format!("only {} coefficients available", s.len())));
    }
    let parts: Vec<&[Coeff]> = s.coeffs[..=n_used].iter().map(|u| u.coeffs()).collect();
    let field = SpectralField::from_raw(*s.grid(), horner(&parts, z), s.coeffs[0].is_real() && z.im == 0.0);
    let q = z.norm() * tail_ratio(s, n_used);
    let lead = s.gnorms[n_used] * z.norm().powi(n_used as i32);
    let remainder = if lead == 0.0 {
        0.0
    } else if q < 1.0 {
        lead / (1.0 - q)
    } else {
        f64::INFINITY
    };
    Ok(SeriesValue { field, remainder, q })
}

/// `dU/dT` of the partial sum through `U_{n_used}`.
pub fn evaluate_derivative(s: &TaylorSeries, z: C64, n_used: usize) -> Result<SpectralField> {
    if n_used == 0 {
        return Ok(SpectralField::zeros(*s.grid()));
    }
    let scaled: Vec<Vec<Coeff>> = (1..=n_used)
        .map(|n| s.coeffs[n].coeffs().iter().map(|c| [c[0] * n as f64, c[1] * n as f64]).collect())
        .collect();
    let parts: Vec<&[Coeff]> = scaled.iter().map(|v| v.as_slice()).collect();
    Ok(SpectralField::from_raw(*s.grid(), horner(&parts, z), s.coeffs[0].is_real() && z.im == 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    /// `exp(-slope)`; `+inf` for the zero series.
    pub rho_hat: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Inclusive index window of the fit.
    pub window: (usize, usize),
    /// `|U_n|_b / |U_{n-1}|_b` over the window.
    pub ratios: Vec<(usize, f64)>,
    /// Slope of `ln |U_n|_b` against `ln n` on the same window.
    pub algebraic_exponent: f64,
}

fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Root-test estimate from the norm sequence alone.
pub fn radius_from_norms(gnorms: &[f64]) -> Result<RadiusEstimate> {
    if gnorms.iter().all(|&v| v == 0.0) {
        return Ok(RadiusEstimate {
            rho_hat: f64::INFINITY,
            slope: f64::NEG_INFINITY,
            intercept: f64::NEG_INFINITY,
            window: (0, gnorms.len().saturating_sub(1)),
            ratios: Vec::new(),
            algebraic_exponent: f64::NAN,
        });
    }
    let nonzero = gnorms.iter().filter(|&&v| v > 0.0 && v.is_finite()).count();
    if nonzero < 8 {
        return Err(Error::Numerical(format!("{nonzero} nonzero coefficients, need at least 8")));
    }
    let last = gnorms.len() - 1;
    let lo = last / 2;
    let pts: Vec<(usize, f64)> =
        (lo.max(1)..=last).filter(|&n| gnorms[n] > 0.0 && gnorms[n].is_finite()).map(|n| (n, gnorms[n])).collect();
    if pts.len() < 2 {
        return Err(Error::Numerical("fit window holds fewer than 2 nonzero coefficients".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept) = affine_fit(&xs, &ys);
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let (algebraic_exponent, _) = affine_fit(&lx, &ys);
    let ratios = (lo.max(1)..=last)
        .filter(|&n| gnorms[n - 1] > 0.0)
        .map(|n| (n, gnorms[n] / gnorms[n - 1]))
        .collect();
    Ok(RadiusEstimate { rho_hat: (-slope).exp(), slope, intercept, window: (lo, last), ratios, algebraic_exponent })
}

pub fn radius_estimate(s: &TaylorSeries) -> Result<RadiusEstimate> {
    radius_from_norms(&s.gnorms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithZeroInAttractor,
    EvidenceZeroNotInAttractor,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ConsistentWithZeroInAttractor => "ConsistentWithZeroInAttractor",
            Self::EvidenceZeroNotInAttractor => "EvidenceZeroNotInAttractor",
            Self::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerdictConfig {
    pub margin: f64,
    pub radial_samples: usize,
    pub angular_samples: usize,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        Self { margin: DEFAULT_MARGIN, radial_samples: 8, angular_samples: 16 }
    }
}

#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub rho_hat: f64,
    pub radius: Option<RadiusEstimate>,
    pub margin: f64,
    /// Largest sampled `|U(T)|_b` on `|T| <= min(rho_hat, 1) - margin`.
    pub sup_norm: f64,
    pub sample_radius: f64,
    pub bound: f64,
    pub divergent: bool,
    pub n_terms: usize,
    pub k_max: usize,
}

impl VerdictReport {
    /// Plain-text block for logs and the CLI.
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("verdict: {}\n", self.verdict));
        s.push_str(&format!("rho_hat: {:e}\n", self.rho_hat));
        if let Some(r) = &self.radius {
            s.push_str(&format!("fit_window: {}..={}\n", r.window.0, r.window.1));
            s.push_str(&format!("algebraic_exponent: {:e}\n", r.algebraic_exponent));
        }
        s.push_str(&format!("margin: {}\n", self.margin));
        s.push_str(&format!("sample_radius: {:e}\n", self.sample_radius));
        s.push_str(&format!("sup_sampled_norm_b: {:e}\n", self.sup_norm));
        s.push_str(&format!("bound_M: {:e}\n", self.bound));
        s.push_str(&format!("coefficients: {} (K = {})\n", self.n_terms, self.k_max));
        s.push_str(&format!("divergent: {}\n", self.divergent));
        s.push_str(
            "note: finite K and finite N make this numerical evidence, not a proof; \
             the truncated series is a Galerkin approximation.\n",
        );
        s
    }
}

/// `|U(T)|_b` of the full partial sum.
pub fn series_norm_b(s: &TaylorSeries, z: C64) -> Result<f64> {
    let v = evaluate_series(s, z, s.order())?;
    Ok(crate::gevrey::norm_b(&v.field, s.b))
}

/// Evidence if `rho_hat < 1 - margin` or a sampled `|U(T)|_b` exceeds `bound`;
/// consistent if `rho_hat >= 1` and every sample stays below `bound`.
pub fn criterion_verdict(s: &TaylorSeries, bound: f64, cfg: &VerdictConfig) -> Result<VerdictReport> {
    let radius = radius_estimate(s).ok();
    let rho_hat = radius.as_ref().map_or(f64::NAN, |r| r.rho_hat);
    let sample_radius = (rho_hat.min(1.0) - cfg.margin).max(0.0);
    let mut sup: f64 = 0.0;
    if sample_radius > 0.0 {
        let pts: Vec<C64> = (1..=cfg.radial_samples)
            .flat_map(|i| {
                let r = sample_radius * i as f64 / cfg.radial_samples as f64;
                (0..cfg.angular_samples)
                    .map(move |j| C64::from_polar(r, 2.0 * PI * j as f64 / cfg.angular_samples as f64))
            })
            .collect();
        let norms: Vec<f64> = pts.par_iter().map(|&z| series_norm_b(s, z)).collect::<Result<_>>()?;
        sup = norms.into_iter().fold(0.0, f64::max);
    }
    let verdict = if rho_hat < 1.0 - cfg.margin || sup > bound {
        Verdict::EvidenceZeroNotInAttractor
    } else if rho_hat >= 1.0 && sup <= bound {
        Verdict::ConsistentWithZeroInAttractor
    } else {
        Verdict::Inconclusive
    };
    Ok(VerdictReport {
        verdict,
        rho_hat,
        radius,
        margin: cfg.margin,
        sup_norm: sup,
        sample_radius,
        bound,
        divergent: s.divergent,
        n_terms: s.len(),
        k_max: s.grid().k_max(),
    })
}

/// Largest `|dU/dT - delta0 psi(T) (g - nu A U - B(U, U))| / |U_1|` over the samples.
pub fn ode_residual(s: &TaylorSeries, g: &SpectralField, samples: &[C64]) -> Result<f64> {
    let limit = match radius_estimate(s) {
        Ok(r) => r.rho_hat.min(1.0),
        Err(_) => 1.0,
    };
    let grid = *s.grid();
    let g = SpectralField::from_raw(grid, g.coeffs().to_vec(), g.is_real());
    let scale = s.coeffs[1].norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let conv = Convolver::new(grid, Backend::Fft);
    let mut worst: f64 = 0.0;
    for &z in samples {
        if !(z.norm() < limit) {
            return Err(Error::arg(format!("sample |T| = {} outside the disk of radius {limit}", z.norm())));
        }
        let u = evaluate_series(s, z, s.order())?.field;
        let du = evaluate_derivative(s, z, s.order())?;
        let rhs = g.sub(&stokes_apply(&u, 1.0).scale(s.nu))?.sub(&conv.apply(&u, &u)?)?;
        let rhs = rhs.scale_complex(psi(z) * s.map.delta0());
        worst = worst.max(du.sub(&rhs)?.norm() / scale);
    }
    Ok(worst)
}

/// Worst conjugate-symmetry defect over all coefficients.
pub fn max_symmetry_defect(s: &TaylorSeries) -> f64 {
    s.coeffs.iter().map(|u| u.symmetry_defect()).fold(0.0, f64::max)
}

pub fn max_divergence_defect(s: &TaylorSeries) -> f64 {
    s.coeffs.iter().map(|u| u.divergence_defect()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_real_field, Wavevector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eigen_force(grid: GridSpec, k: Wavevector, amp: f64) -> SpectralField {
        let r = k.norm();
        let c = C64::new(amp, 0.0);
        SpectralField::from_modes(grid, [(k, [c * (-k.k2 as f64 / r), c * (k.k1 as f64 / r)])], true).unwrap()
    }

    #[test]
    fn conformal_map_round_trip() {
        let m = ConformalMap::new(0.3).unwrap();
        assert!((m.delta0() - 1.2 / PI).abs() < 1e-15);
        for &(r, th) in &[(0.0, 0.0), (0.5, 1.0), (0.99, -2.5), (0.9, 3.0)] {
            let z = C64::from_polar(r, th);
            let t = m.to_strip(z);
            assert!(t.im.abs() < 0.3);
            assert!((m.to_disk(t) - z).norm() < 1e-12);
        }
        assert!((m.to_strip_real(m.to_disk_real(0.7)) - 0.7).abs() < 1e-12);
        assert!(ConformalMap::new(0.0).is_err());
    }

    #[test]
    fn leading_coefficients() {
        let grid = GridSpec::new(5, 1.0).unwrap();
        let g = random_real_field(grid, 3, 1.0, &mut ChaCha8Rng::seed_from_u64(1));
        let map = ConformalMap::new(0.2).unwrap();
        let s = taylor_coefficients(&g, 0.7, map, &TaylorConfig { n: 4, ..Default::default() }).unwrap();
        let d0 = map.delta0();
        assert!(s.coeffs[0].is_zero());
        assert!(s.coeffs[1].sub(&g.scale(d0)).unwrap().norm() < 1e-15);
        let u2 = stokes_apply(&g, 1.0).scale(-0.7 * d0 * d0 / 2.0);
        assert!(s.coeffs[2].sub(&u2).unwrap().norm() < 1e-14 * u2.norm());
    }

    #[test]
    fn zero_force_gives_zero_series() {
        let grid = GridSpec::new(3, 1.0).unwrap();
        let s = taylor_coefficients(&SpectralField::zeros(grid), 1.0, ConformalMap::new(0.1).unwrap(), &TaylorConfig { n: 10, ..Default::default() })
            .unwrap();
        assert!(s.coeffs.iter().all(|u| u.is_zero()));
        assert_eq!(radius_estimate(&s).unwrap().rho_hat, f64::INFINITY);
    }

    #[test]
    fn eigenmode_third_coefficient() {
        let grid = GridSpec::new(4, 1.0).unwrap();
        let k = Wavevector::new(2, 1);
        let g = eigen_force(grid, k, 0.8);
        let (nu, lam) = (0.9, 5.0);
        let map = ConformalMap::new(0.15).unwrap();
        let d0 = map.delta0();
        let s = taylor_coefficients(&g, nu, map, &TaylorConfig { n: 3, ..Default::default() }).unwrap();
        let want = g.scale(d0 / 3.0 + nu * nu * d0.powi(3) * lam * lam / 6.0);
        assert!(s.coeffs[3].sub(&want).unwrap().norm() < 1e-14 * want.norm());
    }

    #[test]
    fn fft_and_direct_backends_agree() {
        let grid = GridSpec::new(4, 1.0).unwrap();
        let g = random_real_field(grid, 4, 2.0, &mut ChaCha8Rng::seed_from_u64(2));
        let map = ConformalMap::new(0.3).unwrap();
        let a = taylor_coefficients(&g, 0.5, map, &TaylorConfig { n: 12, b: 0.1, backend: Backend::Fft }).unwrap();
        let b = taylor_coefficients(&g, 0.5, map, &TaylorConfig { n: 12, b: 0.1, backend: Backend::Direct }).unwrap();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!(x.sub(y).unwrap().norm() <= 1e-11 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn series_evaluation_edge_cases() {
        let grid = GridSpec::new(3, 1.0).unwrap();
        let g = random_real_field(grid, 2, 1.0, &mut ChaCha8Rng::seed_from_u64(3));
        let s = taylor_coefficients(&g, 1.0, ConformalMap::new(0.2).unwrap(), &TaylorConfig { n: 6, ..Default::default() }).unwrap();
        assert!(evaluate_series(&s, C64::new(0.0, 0.0), 6).unwrap().field.is_zero());
        let z = C64::new(0.3, -0.2);
        let one = evaluate_series(&s, z, 1).unwrap().field;
        let want = s.coeffs[1].scale_complex(z);
        assert!(one.sub(&want).unwrap().norm() < 1e-15);
        assert!(evaluate_series(&s, C64::new(1.0, 0.0), 3).is_err());
    }

    #[test]
    fn geometric_norms_give_inverse_ratio() {
        let r: f64 = 1.7;
        let norms: Vec<f64> = (0..40).map(|n| r.powi(n)).collect();
        let est = radius_from_norms(&norms).unwrap();
        assert!((est.rho_hat - 1.0 / r).abs() < 0.01 / r);
        assert!(radius_from_norms(&[1.0, 2.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_force_verdict_is_consistent() {
        let grid = GridSpec::new(3, 1.0).unwrap();
        let s = taylor_coefficients(&SpectralField::zeros(grid), 1.0, ConformalMap::new(0.1).unwrap(), &TaylorConfig { n: 10, ..Default::default() })
            .unwrap();
        let rep = criterion_verdict(&s, 1.0, &VerdictConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::ConsistentWithZeroInAttractor);
        assert!(rep.render().contains("not a proof"));
    }

    #[test]
    fn recursion_defect_and_structure() {
        let grid = GridSpec::new(5, 1.0).unwrap();
        let g = random_real_field(grid, 3, 3.0, &mut ChaCha8Rng::seed_from_u64(4));
        let s = taylor_coefficients(&g, 0.4, ConformalMap::new(0.3).unwrap(), &TaylorConfig { n: 20, ..Default::default() }).unwrap();
        assert!(recursion_residual(&s, &g).unwrap() < 1e-10);
        assert!(max_symmetry_defect(&s) < 1e-13 * s.gnorms.iter().cloned().fold(0.0, f64::max));
        assert!(max_divergence_defect(&s) < 1e-12 * s.gnorms.iter().cloned().fold(1.0, f64::max));
        assert!(s.coeffs.iter().all(|u| u.is_real()));
    }
}

//! The Navier-Stokes nonlinearity `B(u, v) = P((u . grad) v)`.
//!
//! In Fourier space
//! `w_hat(k) = P_k sum_{h + j = k} i kappa0 (u_hat(h) . j) v_hat(j)`.
//! [`bilinear_b`] evaluates this sum directly and is the reference path.
//! [`Convolver`] can instead go through physical space with zero padding to
//! `M >= 2K + K_out + 1` points per axis, which makes the pseudo-spectral
//! product alias free on the kept modes, so both paths agree to rounding.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::spectral::{project_mode, Coeff, Dealias, GridSpec, SpectralField, C64, ZERO_COEFF};

fn output_grid(grid: &GridSpec) -> GridSpec {
    match grid.dealias() {
        Dealias::TruncateToK => *grid,
        Dealias::ExtendTo2K => grid.doubled(),
    }
}

/// Direct-summation `B(u, v)`. `grid` selects the dealias policy and must share
/// the lattice of both inputs. Complexified inputs use the same formula.
pub fn bilinear_b(u: &SpectralField, v: &SpectralField, grid: &GridSpec) -> Result<SpectralField> {
    grid.check_same(u.grid())?;
    grid.check_same(v.grid())?;
    let out = output_grid(grid);
    let mut acc = vec![ZERO_COEFF; out.len()];
    let vs: Vec<_> = v.iter_nonzero().map(|(j, b)| (j, *b)).collect();
    for (h, a) in u.iter_nonzero() {
        for &(j, b) in &vs {
            let k = h + j;
            if k.is_zero() {
                continue;
            }
            let Some(idx) = out.index(k) else { continue };
            let s = a[0] * j.k1 as f64 + a[1] * j.k2 as f64;
            acc[idx][0] += s * b[0];
            acc[idx][1] += s * b[1];
        }
    }
    Ok(finish_direct(out, acc, u.is_real() && v.is_real()))
}

/// `B(u, v) + B(v, u)` in one pass over the mode pairs.
pub fn bilinear_sym(u: &SpectralField, v: &SpectralField, grid: &GridSpec) -> Result<SpectralField> {
    grid.check_same(u.grid())?;
    grid.check_same(v.grid())?;
    let out = output_grid(grid);
    let mut acc = vec![ZERO_COEFF; out.len()];
    let us: Vec<_> = u.iter_nonzero().map(|(j, b)| (j, *b)).collect();
    let vs: Vec<_> = v.iter_nonzero().map(|(j, b)| (j, *b)).collect();
    for &(h, a) in &us {
        for &(j, b) in &vs {
            let k = h + j;
            if k.is_zero() {
                continue;
            }
            let Some(idx) = out.index(k) else { continue };
            // (u_hat(h) . j) v_hat(j) + (v_hat(j) . h) u_hat(h)
            let s = a[0] * j.k1 as f64 + a[1] * j.k2 as f64;
            let t = b[0] * h.k1 as f64 + b[1] * h.k2 as f64;
            acc[idx][0] += s * b[0] + t * a[0];
            acc[idx][1] += s * b[1] + t * a[1];
        }
    }
    Ok(finish_direct(out, acc, u.is_real() && v.is_real()))
}

fn finish_direct(out: GridSpec, mut acc: Vec<Coeff>, reality: bool) -> SpectralField {
    let ik = C64::new(0.0, out.kappa0());
    for (i, k) in out.modes() {
        let c = [acc[i][0] * ik, acc[i][1] * ik];
        acc[i] = project_mode(k, &c);
    }
    let center = out.index(crate::spectral::Wavevector::new(0, 0)).unwrap();
    acc[center] = ZERO_COEFF;
    SpectralField::from_raw(out, acc, reality)
}

/// Which algorithm evaluates the convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    Direct,
    #[default]
    Fft,
}

/// Velocity and velocity gradient of a field sampled on the padded grid.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    pub(crate) vel: [Vec<C64>; 2],
    /// `grad[m][c] = d_m u_c`
    pub(crate) grad: [[Vec<C64>; 2]; 2],
}

/// Evaluates `B` for fields on a fixed grid, caching FFT plans.
#[derive(Clone)]
pub struct Convolver {
    grid: GridSpec,
    out: GridSpec,
    backend: Backend,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("grid", &self.grid)
            .field("backend", &self.backend)
            .field("m", &self.m)
            .finish()
    }
}

fn smooth_size_at_least(n: usize) -> usize {
    let mut m = n.max(4);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 && m % 2 == 0 {
            return m;
        }
        m += 1;
    }
}

impl Convolver {
    pub fn new(grid: GridSpec, backend: Backend) -> Self {
        let out = output_grid(&grid);
        let m = smooth_size_at_least(2 * grid.k_max() + out.k_max() + 1);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        Self { grid, out, backend, m, fwd, inv }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn output_grid(&self) -> &GridSpec {
        &self.out
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Points per axis of the padded physical grid.
    pub fn padded_size(&self) -> usize {
        self.m
    }

    pub fn apply(&self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        match self.backend {
            Backend::Direct => bilinear_b(u, v, &self.grid),
            Backend::Fft => {
                self.grid.check_same(u.grid())?;
                self.grid.check_same(v.grid())?;
                let pu = self.velocity(u);
                let gv = self.gradient(v);
                let mut w = [vec![C64::new(0.0, 0.0); self.m * self.m], vec![C64::new(0.0, 0.0); self.m * self.m]];
                accumulate(&mut w, &pu, &gv);
                Ok(self.finish(w, u.is_real() && v.is_real()))
            }
        }
    }

    fn slot(&self, k: crate::spectral::Wavevector) -> usize {
        let m = self.m as i32;
        (k.k1.rem_euclid(m) as usize) * self.m + k.k2.rem_euclid(m) as usize
    }

    fn to_physical(&self, u: &SpectralField, comp: usize, deriv: Option<usize>) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.m * self.m];
        let kap = self.grid.kappa0();
        for (k, c) in u.iter_nonzero() {
            let val = match deriv {
                None => c[comp],
                Some(d) => {
                    let kd = if d == 0 { k.k1 } else { k.k2 } as f64;
                    c[comp] * C64::new(0.0, kap * kd)
                }
            };
            buf[self.slot(k)] = val;
        }
        self.fft2d(&mut buf, &self.inv);
        buf
    }

    pub(crate) fn velocity(&self, u: &SpectralField) -> [Vec<C64>; 2] {
        [self.to_physical(u, 0, None), self.to_physical(u, 1, None)]
    }

    pub(crate) fn gradient(&self, u: &SpectralField) -> [[Vec<C64>; 2]; 2] {
        [
            [self.to_physical(u, 0, Some(0)), self.to_physical(u, 1, Some(0))],
            [self.to_physical(u, 0, Some(1)), self.to_physical(u, 1, Some(1))],
        ]
    }

    pub fn physical(&self, u: &SpectralField) -> PhysicalField {
        PhysicalField { vel: self.velocity(u), grad: self.gradient(u) }
    }

    pub(crate) fn zero_buffers(&self) -> [Vec<C64>; 2] {
        [vec![C64::new(0.0, 0.0); self.m * self.m], vec![C64::new(0.0, 0.0); self.m * self.m]]
    }

    /// Forward transform of the physical product, truncation to the output
    /// grid and Leray projection.
    pub(crate) fn finish(&self, mut w: [Vec<C64>; 2], reality: bool) -> SpectralField {
        let norm = 1.0 / (self.m * self.m) as f64;
        for buf in &mut w {
            self.fft2d(buf, &self.fwd);
        }
        let mut coeffs = vec![ZERO_COEFF; self.out.len()];
        for (i, k) in self.out.modes() {
            let s = self.slot(k);
            let c = [w[0][s] * norm, w[1][s] * norm];
            coeffs[i] = project_mode(k, &c);
        }
        let mut f = SpectralField::from_raw(self.out, coeffs, false);
        if reality {
            f = symmetrize(f);
        }
        f
    }

    fn fft2d(&self, buf: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        fft2d(buf, self.m, plan);
    }
}

fn fft2d(buf: &mut [C64], m: usize, plan: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(buf, &mut scratch);
    transpose(buf, m);
    plan.process_with_scratch(buf, &mut scratch);
    transpose(buf, m);
}

/// Samples `u` at the points `x = (i, j) L / m`, returned row-major in `i`.
/// Requires `m > 2K` so no mode folds onto another.
pub fn sample_grid(u: &SpectralField, m: usize) -> [Vec<C64>; 2] {
    assert!(m > 2 * u.grid().k_max(), "sampling grid too coarse");
    let plan = FftPlanner::new().plan_fft_inverse(m);
    let mi = m as i32;
    let mut out = [vec![C64::new(0.0, 0.0); m * m], vec![C64::new(0.0, 0.0); m * m]];
    for (k, c) in u.iter_nonzero() {
        let s = (k.k1.rem_euclid(mi) as usize) * m + k.k2.rem_euclid(mi) as usize;
        out[0][s] = c[0];
        out[1][s] = c[1];
    }
    for buf in &mut out {
        fft2d(buf, m, &plan);
    }
    out
}

/// `w_c += sum_m a_m d_m b_c` pointwise.
pub(crate) fn accumulate(w: &mut [Vec<C64>; 2], vel: &[Vec<C64>; 2], grad: &[[Vec<C64>; 2]; 2]) {
    for c in 0..2 {
        let (g0, g1) = (&grad[0][c], &grad[1][c]);
        for (((w, a0), a1), (d0, d1)) in w[c].iter_mut().zip(&vel[0]).zip(&vel[1]).zip(g0.iter().zip(g1)) {
            *w += a0 * d0 + a1 * d1;
        }
    }
}

/// Restores exact conjugate symmetry lost to FFT rounding.
fn symmetrize(f: SpectralField) -> SpectralField {
    let grid = *f.grid();
    let src = f.coeffs();
    let mut coeffs = vec![ZERO_COEFF; grid.len()];
    for (i, k) in grid.modes() {
        let j = grid.index(-k).unwrap();
        let (a, b) = (src[i], src[j]);
        coeffs[i] = [(a[0] + b[0].conj()) * 0.5, (a[1] + b[1].conj()) * 0.5];
    }
    SpectralField::from_raw(grid, coeffs, true)
}

fn transpose(buf: &mut [C64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

//! Truncated Fourier representation of mean-zero, divergence-free periodic
//! vector fields on the square `[0, L]^2`, with `kappa0 = 2 pi / L`.
//!
//! A field is stored densely over the lattice `|k|_inf <= K`; the slot of the
//! zero wavevector exists but is always zero. Physical values are recovered as
//! `u(x) = sum_k u_hat(k) exp(i kappa0 k.x)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Fourier coefficient of a planar vector field.
pub type Coeff = [C64; 2];

pub const ZERO_COEFF: Coeff = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wavevector {
    pub k1: i32,
    pub k2: i32,
}

impl Wavevector {
    pub const fn new(k1: i32, k2: i32) -> Self {
        Self { k1, k2 }
    }

    pub fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }

    pub fn norm_sq(self) -> f64 {
        let (a, b) = (self.k1 as f64, self.k2 as f64);
        a * a + b * b
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sup_norm(self) -> usize {
        self.k1.unsigned_abs().max(self.k2.unsigned_abs()) as usize
    }

    /// `k . c` for a complex coefficient.
    pub fn dot(self, c: &Coeff) -> C64 {
        c[0] * self.k1 as f64 + c[1] * self.k2 as f64
    }
}

impl std::ops::Neg for Wavevector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }
}

impl std::ops::Add for Wavevector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.k1 + o.k1, self.k2 + o.k2)
    }
}

impl fmt::Display for Wavevector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// What the bilinear term keeps of its convolution output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dealias {
    /// Galerkin truncation: keep `|k|_inf <= K`.
    #[default]
    TruncateToK,
    /// Keep the whole finite support `|k|_inf <= 2K` of the product.
    ExtendTo2K,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    k_max: usize,
    kappa0: f64,
    dealias: Dealias,
}

impl GridSpec {
    pub fn new(k_max: usize, kappa0: f64) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::InvalidGrid("truncation K must be at least 1".into()));
        }
        if !(kappa0 > 0.0 && kappa0.is_finite()) {
            return Err(Error::InvalidGrid(format!("kappa0 must be positive, got {kappa0}")));
        }
        Ok(Self { k_max, kappa0, dealias: Dealias::TruncateToK })
    }

    pub fn with_dealias(mut self, dealias: Dealias) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Period `L = 2 pi / kappa0`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.kappa0
    }

    /// First Stokes eigenvalue `lambda_1 = kappa0^2`.
    pub fn lambda1(&self) -> f64 {
        self.kappa0 * self.kappa0
    }

    /// Stokes eigenvalue `kappa0^2 |k|^2` of mode `k`.
    pub fn eigenvalue(&self, k: Wavevector) -> f64 {
        self.lambda1() * k.norm_sq()
    }

    /// Largest eigenvalue on the grid, reached at the corners.
    pub fn lambda_max(&self) -> f64 {
        2.0 * self.lambda1() * (self.k_max * self.k_max) as f64
    }

    pub fn side(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn len(&self) -> usize {
        self.side() * self.side()
    }

    pub fn contains(&self, k: Wavevector) -> bool {
        k.sup_norm() <= self.k_max
    }

    pub fn index(&self, k: Wavevector) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let km = self.k_max as i32;
        Some(((k.k1 + km) as usize) * self.side() + (k.k2 + km) as usize)
    }

    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let km = self.k_max as i32;
        let side = self.side();
        Wavevector::new((idx / side) as i32 - km, (idx % side) as i32 - km)
    }

    /// All nonzero wavevectors of the grid in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, Wavevector)> + '_ {
        (0..self.len()).map(|i| (i, self.wavevector(i))).filter(|(_, k)| !k.is_zero())
    }

    /// Same `kappa0` and policy, different truncation.
    pub fn with_k_max(&self, k_max: usize) -> Result<Self> {
        Ok(Self::new(k_max, self.kappa0)?.with_dealias(self.dealias))
    }

    /// Grid that holds the full support of a product of two fields on `self`.
    pub fn doubled(&self) -> Self {
        Self { k_max: 2 * self.k_max, ..*self }
    }

    /// Grids are compatible when truncation and `kappa0` agree; the dealias
    /// policy only matters to the bilinear term.
    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.k_max == other.k_max && self.kappa0.to_bits() == other.kappa0.to_bits()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.k_max, self.kappa0, other.k_max, other.kappa0))
        }
    }
}

/// Removes the component of `c` along `k`.
pub fn project_mode(k: Wavevector, c: &Coeff) -> Coeff {
    if k.is_zero() {
        return ZERO_COEFF;
    }
    let s = k.dot(c) / k.norm_sq();
    [c[0] - s * k.k1 as f64, c[1] - s * k.k2 as f64]
}

fn coeff_norm_sq(c: &Coeff) -> f64 {
    c[0].norm_sqr() + c[1].norm_sqr()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Coeff>,
    reality: bool,
}

/// Realness check tolerance for fields assembled from arbitrary coefficients.
const REALITY_TOL: f64 = 1e-13;

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![ZERO_COEFF; grid.len()], reality: true }
    }

    /// Wraps dense coefficients without checks. Callers guarantee the
    /// invariants (zero mean slot, divergence free, symmetry if `reality`).
    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<Coeff>, reality: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs, reality }
    }

    /// Builds a field from sparse coefficients that must already be
    /// divergence free. If `reality` is requested, missing partners `-k` are
    /// filled with conjugates and present ones must match.
    pub fn from_modes<I>(grid: GridSpec, modes: I, reality: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Wavevector, Coeff)>,
    {
        let mut f = Self::zeros(grid);
        f.reality = false;
        for (k, c) in modes {
            if k.is_zero() {
                return Err(Error::ZeroMode);
            }
            let i = grid.index(k).ok_or(Error::OutOfGrid(k, grid.k_max()))?;
            let scale = 1.0 + c[0].norm().max(c[1].norm());
            if k.dot(&c).norm() > 1e-9 * k.norm() * scale {
                return Err(Error::arg(format!("coefficient at {k} is not divergence free")));
            }
            f.coeffs[i] = c;
        }
        if reality {
            f.symmetrize_from_partners()?;
        } else {
            f.reality = f.is_conjugate_symmetric(REALITY_TOL);
        }
        Ok(f)
    }

    fn symmetrize_from_partners(&mut self) -> Result<()> {
        let grid = self.grid;
        for (i, k) in grid.modes() {
            let j = grid.index(-k).expect("grid is symmetric");
            let a = self.coeffs[i];
            let b = self.coeffs[j];
            let a_zero = coeff_norm_sq(&a) == 0.0;
            let b_zero = coeff_norm_sq(&b) == 0.0;
            if b_zero && !a_zero {
                self.coeffs[j] = [a[0].conj(), a[1].conj()];
            } else if !a_zero && !b_zero {
                let d = (a[0] - b[0].conj()).norm() + (a[1] - b[1].conj()).norm();
                if d > 1e-9 * (1.0 + coeff_norm_sq(&a).sqrt()) {
                    return Err(Error::arg(format!("modes {k} and {} are not conjugate", -k)));
                }
            }
        }
        self.reality = true;
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn is_real(&self) -> bool {
        self.reality
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn get(&self, k: Wavevector) -> Coeff {
        self.grid.index(k).map_or(ZERO_COEFF, |i| self.coeffs[i])
    }

    /// Nonzero modes in storage order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (Wavevector, &Coeff)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| coeff_norm_sq(c) != 0.0)
            .map(|(i, c)| (self.grid.wavevector(i), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| coeff_norm_sq(c) == 0.0)
    }

    /// `max_k |k . u_hat(k)| / |k|`.
    pub fn divergence_defect(&self) -> f64 {
        self.grid
            .modes()
            .map(|(i, k)| k.dot(&self.coeffs[i]).norm() / k.norm())
            .fold(0.0, f64::max)
    }

    /// `max_k |u_hat(-k) - conj(u_hat(k))|`, relative to the largest coefficient.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (i, k) in self.grid.modes() {
            let j = self.grid.index(-k).unwrap();
            let (a, b) = (self.coeffs[i], self.coeffs[j]);
            worst = worst.max((a[0] - b[0].conj()).norm()).max((a[1] - b[1].conj()).norm());
        }
        worst / scale
    }

    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }

    fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| coeff_norm_sq(c).sqrt()).fold(0.0, f64::max)
    }

    /// `sum_k |u_hat(k)|^2` without the `L^2` factor.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(coeff_norm_sq).sum()
    }

    /// `|u| = (L^2 sum |u_hat(k)|^2)^(1/2)`.
    pub fn norm(&self) -> f64 {
        let l = self.grid.period();
        (l * l * self.coeff_energy()).sqrt()
    }

    /// `|u|` of `u` weighted modewise by `w(k)`, i.e. `(L^2 sum w(k)^2 |u_hat|^2)^(1/2)`.
    pub fn weighted_norm(&self, w: impl Fn(Wavevector) -> f64) -> f64 {
        let l = self.grid.period();
        let s: f64 = self
            .grid
            .modes()
            .map(|(i, k)| {
                let e = coeff_norm_sq(&self.coeffs[i]);
                if e == 0.0 {
                    0.0
                } else {
                    let wk = w(k);
                    wk * wk * e
                }
            })
            .sum();
        l * (s).sqrt()
    }

    /// `|A^sigma u|`.
    pub fn stokes_norm(&self, sigma: f64) -> f64 {
        let grid = self.grid;
        self.weighted_norm(|k| grid.eigenvalue(k).powf(sigma))
    }

    /// `ln |A^sigma u|^2` evaluated by log-sum-exp; `-inf` for the zero field.
    pub fn ln_stokes_norm_sq(&self, sigma: f64) -> f64 {
        let l = self.grid.period();
        let terms: Vec<f64> = self
            .grid
            .modes()
            .filter_map(|(i, k)| {
                let e = coeff_norm_sq(&self.coeffs[i]);
                (e > 0.0).then(|| e.ln() + 2.0 * sigma * self.grid.eigenvalue(k).ln())
            })
            .collect();
        crate::logspace::log_sum_exp(&terms) + 2.0 * l.ln()
    }

    pub fn map_modes(&self, f: impl Fn(Wavevector, &Coeff) -> Coeff, reality: bool) -> Self {
        let grid = self.grid;
        let mut coeffs = vec![ZERO_COEFF; grid.len()];
        for (i, k) in grid.modes() {
            coeffs[i] = f(k, &self.coeffs[i]);
        }
        Self::from_raw(grid, coeffs, reality)
    }

    /// Multiplies each mode by a real factor depending on `k` only.
    pub fn scale_modes(&self, f: impl Fn(Wavevector) -> f64) -> Self {
        self.map_modes(
            |k, c| {
                let s = f(k);
                [c[0] * s, c[1] * s]
            },
            self.reality,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_modes(|_| s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        let reality = self.reality && s.im == 0.0;
        self.map_modes(|_, c| [c[0] * s, c[1] * s], reality)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let mut out = self.zip_with(other, |a, b| a + s * b);
        out.reality = self.reality && other.reality && s.im == 0.0;
        Ok(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| [f(a[0], b[0]), f(a[1], b[1])])
            .collect();
        Self::from_raw(self.grid, coeffs, self.reality && other.reality)
    }

    /// Re-embeds the field on a grid with a different truncation, padding with
    /// zeros or dropping modes beyond the new `K`.
    pub fn resized(&self, k_max: usize) -> Result<Self> {
        let grid = self.grid.with_k_max(k_max)?;
        let mut out = Self::zeros(grid);
        for (i, k) in grid.modes() {
            out.coeffs[i] = self.get(k);
        }
        out.reality = self.reality;
        Ok(out)
    }

    /// Real and imaginary parts as two real fields: `u = re + i im`.
    pub fn split_complex(&self) -> (Self, Self) {
        let grid = self.grid;
        let mut re = Self::zeros(grid);
        let mut im = Self::zeros(grid);
        for (i, k) in grid.modes() {
            let j = grid.index(-k).unwrap();
            let (a, b) = (self.coeffs[i], self.coeffs[j]);
            // re_hat(k) = (u_hat(k) + conj u_hat(-k)) / 2
            for c in 0..2 {
                re.coeffs[i][c] = (a[c] + b[c].conj()) * 0.5;
                im.coeffs[i][c] = (a[c] - b[c].conj()) * C64::new(0.0, -0.5);
            }
        }
        (re, im)
    }

    /// Physical-space value at `x`, by direct summation.
    pub fn eval_at(&self, x: [f64; 2]) -> [C64; 2] {
        let kap = self.grid.kappa0;
        let mut out = [C64::new(0.0, 0.0); 2];
        for (k, c) in self.iter_nonzero() {
            let ph = C64::from_polar(1.0, kap * (k.k1 as f64 * x[0] + k.k2 as f64 * x[1]));
            out[0] += c[0] * ph;
            out[1] += c[1] * ph;
        }
        out
    }
}

/// Leray projection of arbitrary (not necessarily solenoidal) coefficients.
pub fn leray_project<I>(raw: I, grid: GridSpec) -> Result<SpectralField>
where
    I: IntoIterator<Item = (Wavevector, Coeff)>,
{
    let mut coeffs = vec![ZERO_COEFF; grid.len()];
    for (k, c) in raw {
        if k.is_zero() {
            return Err(Error::ZeroMode);
        }
        let i = grid.index(k).ok_or(Error::OutOfGrid(k, grid.k_max()))?;
        coeffs[i] = project_mode(k, &c);
    }
    let mut f = SpectralField::from_raw(grid, coeffs, false);
    f.reality = f.is_conjugate_symmetric(REALITY_TOL);
    Ok(f)
}

/// Leray projection of a field already stored on a grid.
pub fn leray_project_field(u: &SpectralField) -> SpectralField {
    u.map_modes(project_mode, u.reality)
}

/// `A^sigma u`: each mode scaled by `(kappa0^2 |k|^2)^sigma`.
pub fn stokes_apply(u: &SpectralField, sigma: f64) -> SpectralField {
    if sigma == 0.0 {
        return u.clone();
    }
    let grid = u.grid;
    u.scale_modes(|k| grid.eigenvalue(k).powf(sigma))
}

/// `(u, v) = L^2 sum_k u_hat(k) . v_hat(-k)`; the real scalar product for
/// real fields, bilinear (not Hermitian) for complexified ones.
pub fn inner_product(u: &SpectralField, v: &SpectralField) -> Result<C64> {
    u.grid.check_same(&v.grid)?;
    let grid = u.grid;
    let mut s = C64::new(0.0, 0.0);
    for (i, k) in grid.modes() {
        let a = &u.coeffs[i];
        if coeff_norm_sq(a) == 0.0 {
            continue;
        }
        let b = &v.coeffs[grid.index(-k).unwrap()];
        s += a[0] * b[0] + a[1] * b[1];
    }
    let l = grid.period();
    Ok(s * (l * l))
}

/// Hermitian product of the complexified space, `L^2 sum u_hat(k) . conj v_hat(k)`.
/// Agrees with [`inner_product`] whenever `v` is real.
pub fn hermitian_product(u: &SpectralField, v: &SpectralField) -> Result<C64> {
    u.grid.check_same(&v.grid)?;
    let s: C64 = u
        .coeffs
        .iter()
        .zip(&v.coeffs)
        .map(|(a, b)| a[0] * b[0].conj() + a[1] * b[1].conj())
        .sum();
    let l = u.grid.period();
    Ok(s * (l * l))
}

/// Random real divergence-free field: each mode with `|k|_inf <= max_mode` in
/// a half plane gets independent components uniform in `[-amp, amp]` (real
/// and imaginary parts), is Leray-projected, and mirrored to `-k`.
pub fn random_real_field<R: Rng + ?Sized>(
    grid: GridSpec,
    max_mode: usize,
    amp: f64,
    rng: &mut R,
) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let m = max_mode.min(grid.k_max()) as i32;
    for k1 in -m..=m {
        for k2 in -m..=m {
            let k = Wavevector::new(k1, k2);
            if !upper_half(k) {
                continue;
            }
            let mut c = [C64::new(0.0, 0.0); 2];
            for comp in &mut c {
                *comp = C64::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp));
            }
            let p = project_mode(k, &c);
            let i = grid.index(k).unwrap();
            let j = grid.index(-k).unwrap();
            f.coeffs[i] = p;
            f.coeffs[j] = [p[0].conj(), p[1].conj()];
        }
    }
    f
}

/// Random field with `n_modes` distinct conjugate mode pairs drawn from
/// `|k|_inf <= max_mode`.
pub fn random_sparse_field<R: Rng + ?Sized>(
    grid: GridSpec,
    max_mode: usize,
    n_modes: usize,
    amp: f64,
    rng: &mut R,
) -> SpectralField {
    let m = max_mode.min(grid.k_max()) as i32;
    let mut f = SpectralField::zeros(grid);
    let mut placed = 0;
    while placed < n_modes {
        let k = Wavevector::new(rng.gen_range(-m..=m), rng.gen_range(-m..=m));
        if !upper_half(k) || coeff_norm_sq(&f.get(k)) != 0.0 {
            continue;
        }
        let c = [
            C64::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp)),
            C64::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp)),
        ];
        let p = project_mode(k, &c);
        if coeff_norm_sq(&p) == 0.0 {
            continue;
        }
        let (i, j) = (grid.index(k).unwrap(), grid.index(-k).unwrap());
        f.coeffs[i] = p;
        f.coeffs[j] = [p[0].conj(), p[1].conj()];
        placed += 1;
        let pairs = ((2 * m + 1) * (2 * m + 1) - 1) / 2;
        if placed as i32 >= pairs {
            break;
        }
    }
    f
}

/// Random complexified field `a + i b` with `a`, `b` independent real fields.
pub fn random_complex_field<R: Rng + ?Sized>(
    grid: GridSpec,
    max_mode: usize,
    amp: f64,
    rng: &mut R,
) -> SpectralField {
    let a = random_real_field(grid, max_mode, amp, rng);
    let b = random_real_field(grid, max_mode, amp, rng);
    a.axpy(C64::new(0.0, 1.0), &b).expect("same grid")
}

fn upper_half(k: Wavevector) -> bool {
    k.k2 > 0 || (k.k2 == 0 && k.k1 > 0)
}

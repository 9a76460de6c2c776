//! Property tests for the operator identities and Gevrey-norm structure.

use gevrey_nse::bilinear::{bilinear_b, Backend, Convolver};
use gevrey_nse::gevrey::{csigma_fit, gevrey_norm, norm_b, GevreyWeight};
use gevrey_nse::spectral::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(k: usize, seed: u64) -> SpectralField {
    random_real_field(GridSpec::new(k, 1.0).unwrap(), k, 1.0, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_orthogonality_untruncated(k in 2usize..6, s1: u64, s2: u64) {
        let (u, v) = (field(k, s1), field(k, s2));
        let grid = u.grid().with_dealias(Dealias::ExtendTo2K);
        let b = bilinear_b(&u, &v, &grid).unwrap();
        let v2 = v.resized(2 * k).unwrap();
        let ip = inner_product(&b, &v2).unwrap();
        prop_assert!(ip.re.abs() <= 1e-10 * b.norm() * v.norm());
    }

    #[test]
    fn enstrophy_identity_untruncated(k in 2usize..6, s: u64) {
        let u = field(k, s);
        let grid = u.grid().with_dealias(Dealias::ExtendTo2K);
        let b = bilinear_b(&u, &u, &grid).unwrap();
        let au = stokes_apply(&u.resized(2 * k).unwrap(), 1.0);
        let ip = inner_product(&b, &au).unwrap();
        prop_assert!(ip.re.abs() <= 1e-10 * b.norm() * au.norm());
    }

    #[test]
    fn bilinearity(s1: u64, s2: u64, s3: u64, a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let (u, u2, v) = (field(4, s1), field(4, s2), field(4, s3));
        let grid = *u.grid();
        let lhs = bilinear_b(&u.scale(a).add(&u2.scale(c)).unwrap(), &v, &grid).unwrap();
        let rhs = bilinear_b(&u, &v, &grid).unwrap().scale(a).add(&bilinear_b(&u2, &v, &grid).unwrap().scale(c)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().norm() <= 1e-12 * (rhs.norm() + lhs.norm()).max(1e-300));
    }

    #[test]
    fn stokes_powers_compose(s: u64, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let u = field(5, s);
        let lhs = stokes_apply(&stokes_apply(&u, a), b);
        let rhs = stokes_apply(&u, a + b);
        prop_assert!(rel(&lhs, &rhs) <= 1e-13);
    }

    #[test]
    fn leray_is_idempotent_and_reality_survives(s: u64) {
        let u = field(4, s);
        let p = leray_project_field(&u);
        prop_assert!(rel(&p, &u) <= 1e-15);
        prop_assert!(rel(&leray_project_field(&p), &p) <= 1e-15);
        prop_assert!(stokes_apply(&u, 0.7).is_real());
        prop_assert!(bilinear_b(&u, &u, u.grid()).unwrap().is_real());
    }

    #[test]
    fn fft_backend_matches_direct(k in 2usize..7, s1: u64, s2: u64, extend: bool) {
        let (u, v) = (field(k, s1), field(k, s2));
        let pol = if extend { Dealias::ExtendTo2K } else { Dealias::TruncateToK };
        let grid = u.grid().with_dealias(pol);
        let d = bilinear_b(&u, &v, &grid).unwrap();
        let f = Convolver::new(grid, Backend::Fft).apply(&u, &v).unwrap();
        prop_assert!(f.sub(&d).unwrap().norm() <= 1e-12 * d.norm().max(1e-300));
    }

    #[test]
    fn gevrey_norm_is_a_norm(s1: u64, s2: u64, b in 0.0f64..1.0, a in -4.0f64..4.0) {
        let (u, v) = (field(5, s1), field(5, s2));
        let w = GevreyWeight::phi_b(b);
        let sum = gevrey_norm(&u.add(&v).unwrap(), &w);
        prop_assert!(sum <= (gevrey_norm(&u, &w) + gevrey_norm(&v, &w)) * (1.0 + 1e-14));
        let scaled = gevrey_norm(&u.scale(a), &w);
        prop_assert!((scaled - a.abs() * gevrey_norm(&u, &w)).abs() <= 1e-13 * scaled.max(1e-300));
    }

    #[test]
    fn gevrey_norm_monotone_in_b(s: u64, b in 0.0f64..1.0, db in 0.0f64..1.0) {
        let u = field(5, s);
        prop_assert!(norm_b(&u, b + db) >= norm_b(&u, b));
        prop_assert!(norm_b(&u, b) >= u.norm() * (1.0 - 1e-15));
    }

    #[test]
    fn csigma_fit_always_certifies(s: u64, nu in 0.1f64..3.0, amax in 3usize..14) {
        let u = field(6, s);
        let fit = csigma_fit(&u, nu, amax).unwrap();
        prop_assert!(fit.sigma >= 0.0);
        prop_assert!(fit.residuals.iter().all(|&r| r >= -1e-12));
        prop_assert!(fit.verifies(&u, nu));
    }
}

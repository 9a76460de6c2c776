//! Overflow-safe scalar arithmetic: log-sum-exp and signed log magnitudes.

use std::cmp::Ordering;

/// `ln(sum exp(x_i))`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// A real number stored as `sign * exp(ln_abs)`, so magnitudes far outside
/// the f64 range stay representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLog {
    sign: i8,
    ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: Self = Self { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Self { sign: 1, ln_abs: x.ln() },
            Some(Ordering::Less) => Self { sign: -1, ln_abs: (-x).ln() },
            _ => Self::ZERO,
        }
    }

    pub fn from_parts(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: sign.signum(), ln_abs }
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// `ln |x|`, `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.ln_abs
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Nearest f64; saturates to +-inf.
    pub fn to_f64(self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn scale(self, s: f64) -> Self {
        if s == 0.0 || self.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.sign * s.signum() as i8, self.ln_abs + s.abs().ln())
    }

    pub fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_abs >= o.ln_abs { (self, o) } else { (o, self) };
        let r = (small.ln_abs - big.ln_abs).exp();
        if big.sign == small.sign {
            Self::from_parts(big.sign, big.ln_abs + r.ln_1p())
        } else if r == 1.0 {
            Self::ZERO
        } else {
            Self::from_parts(big.sign, big.ln_abs + (-r).ln_1p())
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(Self { sign: -o.sign, ..o })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let xs = [0.1, -2.0, 3.5];
        let direct: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        // beyond f64 range
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((ln_add(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn signed_log_arithmetic() {
        let a = SignedLog::from_f64(3.0);
        let b = SignedLog::from_f64(-5.0);
        assert!((a.add(b).to_f64() + 2.0).abs() < 1e-14);
        assert!((a.sub(b).to_f64() - 8.0).abs() < 1e-14);
        assert!((b.scale(-0.5).to_f64() - 2.5).abs() < 1e-14);
        assert!(a.sub(a).is_zero());
        let huge = SignedLog::from_parts(1, 2000.0);
        let sum = huge.add(huge);
        assert!((sum.ln_abs() - (2000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(sum.to_f64(), f64::INFINITY);
    }
}

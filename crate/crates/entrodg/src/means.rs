//! Two-point averaging operators used by the entropy-conservative numerical
//! state: arithmetic mean, logarithmic mean, product operator, and the
//! `f_r` family satisfying the jump identity `[[a^r]] = r f_r(a) [[a]]`.

use thiserror::Error;

use crate::numeric::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeansError {
    #[error("logarithmic mean requires nonnegative arguments")]
    NegativeArgument,
    #[error("f_r operator unsupported for r = {0} (supported: 1..=5)")]
    UnsupportedOrder(usize),
}

/// Arithmetic mean `{{a}}`.
#[inline]
pub fn arith_mean<S: Scalar>(al: S, ar: S) -> S {
    (al + ar) * S::c(0.5)
}

/// Logarithmic mean `(a_R - a_L) / (ln a_R - ln a_L)`.
///
/// Returns `a_L` for equal arguments and zero if either argument is zero.
/// Near-equal arguments use the Ismail-Roe series to avoid cancellation.
pub fn log_mean<S: Scalar>(al: S, ar: S) -> Result<S, MeansError> {
    if al < S::zero() || ar < S::zero() {
        return Err(MeansError::NegativeArgument);
    }
    if al == ar {
        return Ok(al);
    }
    if al == S::zero() || ar == S::zero() {
        return Ok(S::zero());
    }
    let f = (ar - al) / (ar + al);
    if f.abs() < S::c(1e-4) {
        Ok(log_mean_series(al, ar))
    } else {
        Ok((ar - al) / (ar.ln() - al.ln()))
    }
}

/// Ismail-Roe series form of the logarithmic mean,
/// `(a_L + a_R) / (2 F)` with `F = 1 + u/3 + u^2/5 + u^3/7`, `u = f^2`,
/// `f = (a_R - a_L)/(a_R + a_L)`. Accurate for `|f| <~ 1e-2`.
pub fn log_mean_series<S: Scalar>(al: S, ar: S) -> S {
    let f = (ar - al) / (ar + al);
    let u = f * f;
    let ff = S::one() + u * (S::c(1.0 / 3.0) + u * (S::c(0.2) + u * S::c(1.0 / 7.0)));
    (al + ar) / (S::c(2.0) * ff)
}

/// The averaging operator `f_r`, consistent with `a^{r-1}`.
///
/// `f_1 = 1`, `f_2 = {{a}}`, `f_3 = (2/3){{a}}^2 + (1/3){{a^2}}`,
/// `f_4 = {{a}}{{a^2}}`, and `f_5` from the degree-four power sum.
pub fn f_r<S: Scalar>(r: usize, al: S, ar: S) -> Result<S, MeansError> {
    let am = arith_mean(al, ar);
    let a2m = arith_mean(al * al, ar * ar);
    match r {
        1 => Ok(S::one()),
        2 => Ok(am),
        3 => Ok(S::c(2.0 / 3.0) * am * am + S::c(1.0 / 3.0) * a2m),
        4 => Ok(am * a2m),
        5 => {
            let al2 = al * al;
            let ar2 = ar * ar;
            let sum = ar2 * ar2 + ar2 * ar * al + ar2 * al2 + ar * al2 * al + al2 * al2;
            Ok(S::c(0.2) * sum)
        }
        _ => Err(MeansError::UnsupportedOrder(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_mean_equal_arguments() {
        assert_eq!(log_mean(2.0, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn log_mean_zero_branch() {
        assert_eq!(log_mean(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(log_mean(5.0, 0.0).unwrap(), 0.0);
        assert_eq!(log_mean(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_mean_rejects_negative() {
        assert_eq!(log_mean(-1.0, 2.0), Err(MeansError::NegativeArgument));
    }

    #[test]
    fn log_mean_known_value() {
        let v = log_mean(1.0, std::f64::consts::E).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn log_mean_series_matches_direct_formula() {
        // Compare the series against the raw definition where the latter is
        // still accurate (the direct formula cancels badly for |f| < ~1e-3).
        for &delta in &[6e-3f64, 1e-2, 2e-2] {
            let al = 3.0f64;
            let ar = al * (1.0 + delta);
            let series = log_mean_series(al, ar);
            let direct = (ar - al) / (ar.ln() - al.ln());
            assert!(
                (series - direct).abs() / direct < 1e-13,
                "delta={delta}: {series} vs {direct}"
            );
        }
    }

    #[test]
    fn log_mean_branches_agree_at_threshold() {
        // At the branch point |f| = 1e-4 the direct formula still carries
        // ~1e-12 relative cancellation noise; the two evaluations must agree
        // within that.
        let al = 3.0f64;
        let ar = al * (1.0 + 2e-4);
        let series = log_mean_series(al, ar);
        let direct = (ar - al) / (ar.ln() - al.ln());
        assert!((series - direct).abs() / direct < 5e-12);
    }

    #[test]
    fn f2_jump_identity_example() {
        // [[a^2]] = 8 = 2 * f_2(1, 3) * [[a]] with f_2 = 2, [[a]] = 2.
        let f2 = f_r(2, 1.0f64, 3.0).unwrap();
        assert_eq!(f2, 2.0);
        assert_eq!(2.0 * f2 * 2.0, 8.0);
    }

    #[test]
    fn f3_jump_identity_example() {
        // f_3(1, 2) = (2/3)(1.5)^2 + (1/3)(2.5) = 7/3 and 2^3 - 1 = 7.
        let f3 = f_r(3, 1.0f64, 2.0).unwrap();
        assert!((f3 - 7.0 / 3.0).abs() < 1e-15);
        assert!((3.0 * f3 * 1.0 - 7.0).abs() < 1e-14);
    }

    #[test]
    fn equal_argument_consistency() {
        for r in 1..=5usize {
            let v = f_r(r, 1.7f64, 1.7).unwrap();
            let expect = 1.7f64.powi(r as i32 - 1);
            assert!((v - expect).abs() < 1e-13 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn f_r_out_of_range() {
        assert!(f_r(0, 1.0f64, 2.0).is_err());
        assert!(f_r(6, 1.0f64, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn jump_identity_randomized(al in 1e-3f64..1e3, ar in 1e-3f64..1e3) {
            for r in 1..=5usize {
                let f = f_r(r, al, ar).unwrap();
                let lhs = ar.powi(r as i32) - al.powi(r as i32);
                let rhs = r as f64 * f * (ar - al);
                let scale = ar.powi(r as i32).abs().max(al.powi(r as i32).abs()).max(1e-300);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "r={} lhs={} rhs={}", r, lhs, rhs);
            }
        }

        #[test]
        fn log_mean_between_min_and_max(al in 1e-6f64..1e6, ar in 1e-6f64..1e6) {
            let v = log_mean(al, ar).unwrap();
            prop_assert!(v >= al.min(ar) - 1e-12 * al.max(ar));
            prop_assert!(v <= al.max(ar) + 1e-12 * al.max(ar));
        }

        #[test]
        fn log_mean_jump_identity(al in 1e-3f64..1e3, ar in 1e-3f64..1e3) {
            // [[ln a]] = [[a]] / a^ln
            let v = log_mean(al, ar).unwrap();
            let lhs = ar.ln() - al.ln();
            let rhs = (ar - al) / v;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-12));
        }
    }
}

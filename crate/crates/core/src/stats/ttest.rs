use serde::{Deserialize, Serialize};

use super::special::student_t_two_sided_p;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TTestKind {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Pooled variance, `n_a + n_b - 2` degrees of freedom.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    /// Two-sided.
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub kind: TTestKind,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    t_test(a, b, TTestKind::Welch)
}

pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    t_test(a, b, TTestKind::Pooled)
}

/// Two-sample t-test of `mean(a) = mean(b)`; `t > 0` means `a` has the larger mean.
pub fn t_test(a: &[f64], b: &[f64], kind: TTestKind) -> Result<TTestResult, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewObservations { needed: 2, got: s.len() });
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    let diff = mean_a - mean_b;

    let (se2, df) = match kind {
        TTestKind::Welch => {
            let (ua, ub) = (var_a / na, var_b / nb);
            let se2 = ua + ub;
            let denom = ua * ua / (na - 1.0) + ub * ub / (nb - 1.0);
            let df = if denom > 0.0 { se2 * se2 / denom } else { na + nb - 2.0 };
            (se2, df)
        }
        TTestKind::Pooled => {
            let df = na + nb - 2.0;
            let sp2 = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / df;
            (sp2 * (1.0 / na + 1.0 / nb), df)
        }
    };

    if se2 == 0.0 {
        if diff == 0.0 {
            return Err(StatsError::UndefinedStatistic(
                "both samples have zero variance and equal means".into(),
            ));
        }
        return Ok(TTestResult {
            t: diff.signum() * f64::INFINITY,
            df,
            p_value: 0.0,
            mean_a,
            mean_b,
            kind,
        });
    }

    let t = diff / se2.sqrt();
    Ok(TTestResult {
        t,
        df,
        p_value: student_t_two_sided_p(t, df),
        mean_a,
        mean_b,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn identical_samples() {
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_relative_eq!(r.p_value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn welch_against_high_precision_oracle() {
        // mpmath at 40 digits: direct Welch formula + regularized incomplete beta
        let r = welch_t_test(&[10.0, 12.0, 14.0, 16.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(r.t, 7.274_613_391_789_285, max_relative = 1e-6);
        assert_relative_eq!(r.df, 4.411_764_705_882_353, max_relative = 1e-6);
        assert_relative_eq!(r.p_value, 1.288_892_033_788_13e-3, max_relative = 1e-6);
    }

    #[test]
    fn pooled_matches_reference() {
        // scipy.stats.ttest_ind(equal_var=True)
        let r = pooled_t_test(&[10.0, 12.0, 14.0, 16.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_relative_eq!(r.t, 7.274_613_391_789_284, max_relative = 1e-9);
        assert_relative_eq!(r.p_value, 3.434_320_548_227_725e-4, max_relative = 1e-8);
        assert_eq!(r.df, 6.0);
    }

    #[test]
    fn zero_variance_equal_means_is_error() {
        assert!(matches!(
            welch_t_test(&[2.0, 2.0], &[2.0, 2.0, 2.0]),
            Err(StatsError::UndefinedStatistic(_))
        ));
        let r = welch_t_test(&[3.0, 3.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.t, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn too_small() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn swapping_negates_t(
            a in prop::collection::vec(-50.0f64..50.0, 2..30),
            b in prop::collection::vec(-50.0f64..50.0, 2..30),
        ) {
            let Ok(ab) = welch_t_test(&a, &b) else { return Ok(()); };
            let ba = welch_t_test(&b, &a).unwrap();
            prop_assert_eq!(ab.t, -ba.t);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
            prop_assert_eq!(ab.t.signum() * (ab.mean_a - ab.mean_b).signum() >= 0.0, true);
        }
    }
}

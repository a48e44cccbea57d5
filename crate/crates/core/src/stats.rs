//! Sample summaries and Welch's unequal-variance t test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::statistics::Statistics;

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator), 0 for one value.
    pub sd: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary {
            n,
            mean: f64::NAN,
            sd: f64::NAN,
        };
    }
    let mean = xs.mean();
    let sd = if n > 1 { xs.std_dev() } else { 0.0 };
    Summary { n, mean, sd }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub dof: f64,
    /// Two-sided p value.
    pub p: f64,
}

pub fn welch(a: &[f64], b: &[f64]) -> Result<WelchResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewObservations);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (a.variance(), b.variance());
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    if se2 <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let t = (a.mean() - b.mean()) / se2.sqrt();
    let dof = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(WelchResult { t, dof, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_example() {
        let r = welch(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((r.t + 1.0).abs() < 1e-12);
        assert!((r.dof - 8.0).abs() < 1e-12);
        assert!(r.p > 0.3 && r.p < 0.4);
    }

    #[test]
    fn identical_samples() {
        let r = welch(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert!((r.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            welch(&[1.0], &[1.0, 2.0]),
            Err(StatsError::TooFewObservations)
        );
        assert_eq!(
            welch(&[1.0, 1.0], &[1.0, 1.0]),
            Err(StatsError::ZeroVariance)
        );
        let s = summarize(&[4.0]);
        assert_eq!((s.mean, s.sd), (4.0, 0.0));
    }

    #[test]
    fn separated_samples() {
        let a = [0.0, 1e-6, -1e-6, 0.0];
        let b = [1.0, 1.0 + 1e-6, 1.0 - 1e-6, 1.0];
        assert!(welch(&a, &b).unwrap().p < 1e-10);
    }
}

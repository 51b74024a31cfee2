use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Differences smaller than this count as identical.
pub const IDENTICAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedTTest {
    pub t: f64,
    /// Two-sided.
    pub p_value: f64,
    pub mean_difference: f64,
}

/// Paired t-test of `a - b`. When every difference is below [`IDENTICAL`] the
/// samples are treated as identical (`t = 0`, `p = 1`).
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "paired t-test needs two equal samples of at least 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    if d.iter().all(|v| v.abs() < IDENTICAL) {
        return Ok(PairedTTest {
            t: 0.0,
            p_value: 1.0,
            mean_difference: mean,
        });
    }
    let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Ok(PairedTTest {
            t: mean.signum() * f64::INFINITY,
            p_value: 0.0,
            mean_difference: mean,
        });
    }
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(PairedTTest {
        t,
        p_value,
        mean_difference: mean,
    })
}

/// Mean and sample (n − 1) standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = if v.len() > 1 {
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (m, s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedStudy {
    pub scores_a: Vec<f64>,
    pub scores_b: Vec<f64>,
    pub mean_a: f64,
    pub std_a: f64,
    pub mean_b: f64,
    pub std_b: f64,
    /// Test of `a - b`.
    pub test: PairedTTest,
}

/// Runs both specifications for seeds `0..n_seeds` and compares the scores
/// (typically test MSE) with a paired t-test.
pub fn seed_study<A, B>(n_seeds: u64, mut run_a: A, mut run_b: B) -> Result<SeedStudy>
where
    A: FnMut(u64) -> Result<f64>,
    B: FnMut(u64) -> Result<f64>,
{
    let scores_a = (0..n_seeds).map(&mut run_a).collect::<Result<Vec<_>>>()?;
    let scores_b = (0..n_seeds).map(&mut run_b).collect::<Result<Vec<_>>>()?;
    let (mean_a, std_a) = mean_std(&scores_a);
    let (mean_b, std_b) = mean_std(&scores_b);
    let test = paired_t_test(&scores_a, &scores_b)?;
    Ok(SeedStudy {
        scores_a,
        scores_b,
        mean_a,
        std_a,
        mean_b,
        std_b,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let r = paired_t_test(&[0.3, 0.4, 0.5], &[0.3, 0.4, 0.5]).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn hand_computed_statistic() {
        let a = [1.0, 2.0, 4.0, 7.0];
        let b = [0.5, 1.0, 3.5, 5.0];
        // d = [0.5, 1, 0.5, 2], mean 1, sd = sqrt(1.5 / 3)
        let r = paired_t_test(&a, &b).unwrap();
        let want = 1.0 / ((0.5f64).sqrt() / 2.0);
        assert!((r.t - want).abs() < 1e-10);
        assert!(r.p_value > 0.0 && r.p_value < 0.2);
    }
}

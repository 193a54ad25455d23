//! Regression metrics: MAE, RMSE and the coefficient of determination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three scores reported for every (model, target) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsTriple {
    pub mae: f64,
    pub rmse: f64,
    pub r2: f64,
}

impl MetricsTriple {
    pub fn compute(y: &[f64], yhat: &[f64]) -> Result<Self> {
        Ok(MetricsTriple {
            mae: mae(y, yhat)?,
            rmse: rmse(y, yhat)?,
            r2: r2(y, yhat)?,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "mae" => Some(self.mae),
            "rmse" => Some(self.rmse),
            "r2" => Some(self.r2),
            _ => None,
        }
    }
}

fn check_pair(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptyInput("metric vectors"));
    }
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch { expected: y.len(), actual: yhat.len() });
    }
    if y.iter().chain(yhat.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric input"));
    }
    Ok(())
}

/// Mean absolute error.
pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    let sum: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / y.len() as f64)
}

/// Root mean square error.
pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    let sum: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sum / y.len() as f64).sqrt())
}

/// Coefficient of determination, with the baseline mean taken over the
/// evaluated rows. Zero target variance yields 0 when residuals are also
/// zero and an error otherwise.
pub fn r2(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    if y.len() < 2 {
        return Err(Error::EmptyInput("r2 needs at least 2 rows"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_res: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    let ss_tot: f64 = y.iter().map(|a| (a - mean) * (a - mean)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::UndefinedR2);
    }
    Ok(1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mae_identity_is_zero() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(mae(&y, &y).unwrap(), 0.0);
    }

    #[test]
    fn mae_hand_example() {
        // (|3-1| + |5-9|) / 2 = 3
        assert_eq!(mae(&[3.0, 5.0], &[1.0, 9.0]).unwrap(), 3.0);
    }

    #[test]
    fn rmse_identity_is_zero() {
        let y = [4.0, 5.0];
        assert_eq!(rmse(&y, &y).unwrap(), 0.0);
    }

    #[test]
    fn rmse_hand_example() {
        // sqrt((9 + 16) / 2) = sqrt(12.5)
        let v = rmse(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert!((v - 3.5355).abs() < 1e-4);
    }

    #[test]
    fn r2_perfect_fit() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(r2(&y, &y).unwrap(), 1.0);
    }

    #[test]
    fn r2_mean_predictor_is_zero() {
        let y = [1.0, 2.0, 3.0];
        let yhat = [2.0, 2.0, 2.0];
        assert_eq!(r2(&y, &yhat).unwrap(), 0.0);
    }

    #[test]
    fn r2_hand_example() {
        // 1 - 8/2 = -3
        assert_eq!(r2(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -3.0);
    }

    #[test]
    fn r2_zero_variance_zero_residual() {
        assert_eq!(r2(&[5.0, 5.0], &[5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn r2_zero_variance_nonzero_residual_errors() {
        assert!(matches!(r2(&[5.0, 5.0], &[5.0, 6.0]), Err(Error::UndefinedR2)));
    }

    #[test]
    fn length_mismatch_errors() {
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }
}

//! First-order mean-field critical fields for the chain with a
//! next-nearest-neighbour coupling `Delta`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{CriticalPointEstimate, EstimateMethod};

/// Beyond this `Delta / J` the linearisation is not trusted.
pub const VALIDITY_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldPrediction {
    pub delta: f64,
    #[serde(rename = "b_c_dy_over_J")]
    pub b_c_dy_over_j: f64,
    #[serde(rename = "b_c_gs_over_J")]
    pub b_c_gs_over_j: f64,
    pub validity_warning: bool,
}

impl MeanFieldPrediction {
    /// Both predictions as estimates (no uncertainty attached).
    pub fn estimates(&self) -> [CriticalPointEstimate; 2] {
        [self.b_c_dy_over_j, self.b_c_gs_over_j].map(|b_c| CriticalPointEstimate {
            b_c,
            uncertainty: 0.0,
            method: EstimateMethod::MeanField,
            residual: 0.0,
        })
    }
}

/// `B_c^dy = 1 + 3 Delta / 2` and `B_c^gs = 1 + 16 Delta / (3 pi)`, in units
/// of `J`.
pub fn predict_critical_points(delta: f64) -> Result<MeanFieldPrediction> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidSpec(format!(
            "Delta must be finite and non-negative, got {delta}"
        )));
    }
    Ok(MeanFieldPrediction {
        delta,
        b_c_dy_over_j: 1.0 + 1.5 * delta,
        b_c_gs_over_j: 1.0 + 16.0 * delta / (3.0 * PI),
        validity_warning: delta > VALIDITY_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        let p = predict_critical_points(0.1).unwrap();
        assert!((p.b_c_dy_over_j - 1.15).abs() < 1e-12);
        assert!((p.b_c_gs_over_j - 1.1698).abs() < 1e-4);
        assert!(!p.validity_warning);
        let z = predict_critical_points(0.0).unwrap();
        assert_eq!((z.b_c_dy_over_j, z.b_c_gs_over_j), (1.0, 1.0));
        assert!(predict_critical_points(0.31).unwrap().validity_warning);
        assert!(!predict_critical_points(0.3).unwrap().validity_warning);
        assert!(predict_critical_points(-0.1).is_err());
        assert!(predict_critical_points(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn linear_and_ordered(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (pa, pb) = (predict_critical_points(a).unwrap(), predict_critical_points(b).unwrap());
            prop_assert!(((pa.b_c_dy_over_j - pb.b_c_dy_over_j) - 1.5 * (a - b)).abs() < 1e-12);
            // The ground-state shift is always the larger one.
            prop_assert!(pa.b_c_gs_over_j >= pa.b_c_dy_over_j);
            if a > 0.0 {
                prop_assert!(pa.b_c_gs_over_j > pa.b_c_dy_over_j);
            }
        }
    }
}

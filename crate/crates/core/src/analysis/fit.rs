use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares cubic `c0 + c1 x + c2 x^2 + c3 x^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicFit {
    pub coefficients: [f64; 4],
    /// RMS of the fit residuals.
    pub residual_rms: f64,
    /// RMS of the residuals of the best constant (the mean).
    pub constant_rms: f64,
}

impl CubicFit {
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coefficients;
        ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
    }
}

/// Relative singular-value cutoff below which the design is rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

pub fn cubic_fit(xs: &[f64], ys: &[f64]) -> Result<CubicFit> {
    assert_eq!(xs.len(), ys.len(), "x and y lengths differ");
    let n = xs.len();
    if n < 4 {
        return Err(Error::DegenerateFit(format!("{n} points, a cubic needs at least 4")));
    }
    let a = DMatrix::from_fn(n, 4, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > RANK_TOLERANCE * smax.max(f64::MIN_POSITIVE))
        .count();
    if rank < 4 {
        return Err(Error::DegenerateFit(format!(
            "design matrix has rank {rank}; the points need at least 4 distinct abscissae"
        )));
    }
    let c = svd
        .solve(&b, RANK_TOLERANCE * smax)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let residual = &a * &c - &b;
    let mean = ys.iter().sum::<f64>() / n as f64;
    let constant_ss: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    Ok(CubicFit {
        coefficients: [c[0], c[1], c[2], c[3]],
        residual_rms: (residual.norm_squared() / n as f64).sqrt(),
        constant_rms: (constant_ss / n as f64).sqrt(),
    })
}

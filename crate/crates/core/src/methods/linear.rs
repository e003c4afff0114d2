use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::encoding::{check_lengths, check_parent_columns, finish_numeric, ColumnMeta, FeatureEncoder, FitColumn};
use crate::data::{Column, ColumnBounds};
use crate::error::{Error, Result};
use crate::mechanisms::laplace_noise;

/// Smallest table a private regression is fitted on.
pub const MIN_PRIVATE_ROWS: usize = 10;
/// Fraction of a linear regression's budget spent on the sufficient statistics.
pub const COEFFICIENT_SHARE: f64 = 0.8;

/// Linear model over unit-box features, predicting the target rescaled to [0, 1].
///
/// `coefficients[0]` is the intercept; the rest follow the feature encoding of `parents`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub target: ColumnMeta,
    pub parents: Vec<ColumnMeta>,
    pub coefficients: Vec<f64>,
    pub residual_std: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearOptions {
    /// Optional upper clip on the residual std, in rescaled units.
    pub max_residual_std: Option<f64>,
}

fn target_range(meta: &ColumnMeta) -> Result<(f64, f64)> {
    match meta.bounds {
        ColumnBounds::Numeric { min, max } => Ok((min, max)),
        ColumnBounds::Categorical { .. } => Err(Error::MethodTypeMismatch {
            column: meta.name.clone(),
            method: "linear_regression".into(),
            ty: meta.ty.name().into(),
        }),
    }
}

fn design(encoder: &FeatureEncoder, columns: &[&Column], n: usize) -> Result<DMatrix<f64>> {
    let d = encoder.width() + 1;
    let mut x = DMatrix::<f64>::zeros(n, d);
    let mut row = vec![0.0; d - 1];
    for r in 0..n {
        encoder.encode(columns, r, &mut row)?;
        x[(r, 0)] = 1.0;
        for (j, v) in row.iter().enumerate() {
            x[(r, j + 1)] = *v;
        }
    }
    Ok(x)
}

fn solve_ridge(gram: &DMatrix<f64>, moment: &DVector<f64>, mut ridge: f64) -> DVector<f64> {
    let d = gram.nrows();
    loop {
        let a = gram + DMatrix::<f64>::identity(d, d) * ridge;
        if let Some(ch) = a.clone().cholesky() {
            return ch.solve(moment);
        }
        if let Some(sol) = a.lu().solve(moment) {
            if sol.iter().all(|v| v.is_finite()) {
                return sol;
            }
        }
        ridge = if ridge > 0.0 { ridge * 2.0 } else { 1e-12 };
    }
}

/// Ridge regression by sufficient-statistics perturbation.
///
/// Gram matrix entries (upper triangle) and feature-target moments get Laplace noise at
/// `0.8·ε` with L1 sensitivity equal to their count; the residual mean square gets
/// Laplace noise with sensitivity `1/n` at `0.2·ε`.
pub fn fit_linear<R: Rng + ?Sized>(
    target: &FitColumn<'_>,
    parents: &[FitColumn<'_>],
    epsilon: Option<f64>,
    options: &LinearOptions,
    rng: &mut R,
) -> Result<LinearModel> {
    let n = check_lengths(target, parents)?;
    let target_meta = target.meta();
    let (min, max) = target_range(&target_meta)?;
    if epsilon.is_some() && n < MIN_PRIVATE_ROWS {
        return Err(Error::TooFewRows {
            column: target.name.to_string(),
            rows: n,
            min: MIN_PRIVATE_ROWS,
        });
    }
    let y_raw = target.values.as_numeric().ok_or_else(|| Error::MethodTypeMismatch {
        column: target.name.to_string(),
        method: "linear_regression".into(),
        ty: target.ty.name().into(),
    })?;
    let span = max - min;
    let y = DVector::from_iterator(n, y_raw.iter().map(|v| ((v - min) / span).clamp(0.0, 1.0)));
    let parent_meta: Vec<ColumnMeta> = parents.iter().map(FitColumn::meta).collect();
    let encoder = FeatureEncoder::new(&parent_meta)?;
    let columns: Vec<&Column> = parents.iter().map(|p| p.values).collect();
    let x = design(&encoder, &columns, n)?;
    let d = x.ncols();

    let mut gram = x.transpose() * &x;
    let mut moment = x.transpose() * &y;
    let beta = match epsilon {
        None => {
            let svd = gram.clone().svd(true, true);
            let tol = 1e-12 * svd.singular_values.max().max(1.0);
            svd.solve(&moment, tol)
                .map_err(|e| Error::InvalidArgument(format!("least squares failed: {e}")))?
        }
        Some(eps) => {
            let eps_coef = COEFFICIENT_SHARE * eps;
            let entries = (d * (d + 1) / 2 + d) as f64;
            for i in 0..d {
                for j in i..d {
                    let v = laplace_noise(gram[(i, j)], entries, Some(eps_coef), rng)?;
                    gram[(i, j)] = v;
                    gram[(j, i)] = v;
                }
            }
            for i in 0..d {
                moment[i] = laplace_noise(moment[i], entries, Some(eps_coef), rng)?;
            }
            let scale = entries / eps_coef;
            solve_ridge(&gram, &moment, 3.0 * scale * (d as f64).sqrt())
        }
    };

    let pred = &x * &beta;
    let mse = y
        .iter()
        .zip(pred.iter())
        .map(|(t, p)| (t - p.clamp(0.0, 1.0)).powi(2))
        .sum::<f64>()
        / n as f64;
    let eps_resid = epsilon.map(|e| e * (1.0 - COEFFICIENT_SHARE));
    let noisy = laplace_noise(mse, 1.0 / n as f64, eps_resid, rng)?.max(0.0);
    let mut residual_std = noisy.sqrt();
    if let Some(cap) = options.max_residual_std {
        residual_std = residual_std.min(cap);
    }
    Ok(LinearModel {
        target: target_meta,
        parents: parent_meta,
        coefficients: beta.iter().copied().collect(),
        residual_std,
    })
}

impl LinearModel {
    /// Mean prediction for every row, in the target's original units (not clipped).
    pub fn predict(&self, parents: &[&Column], n: usize) -> Result<Vec<f64>> {
        check_parent_columns(&self.parents, parents, n)?;
        let (min, max) = target_range(&self.target)?;
        let encoder = FeatureEncoder::new(&self.parents)?;
        let mut row = vec![0.0; encoder.width()];
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            encoder.encode(parents, r, &mut row)?;
            let z = self.coefficients[0] + row.iter().zip(&self.coefficients[1..]).map(|(a, b)| a * b).sum::<f64>();
            out.push(min + z * (max - min));
        }
        Ok(out)
    }

    pub fn sample<R: Rng + ?Sized>(&self, parents: &[&Column], n: usize, rng: &mut R) -> Result<Column> {
        let (min, max) = target_range(&self.target)?;
        let means = self.predict(parents, n)?;
        let noise = Normal::new(0.0, self.residual_std * (max - min))
            .map_err(|e| Error::MalformedModel(format!("residual std: {e}")))?;
        Ok(Column::Numeric(
            means
                .into_iter()
                .map(|m| finish_numeric(m + noise.sample(rng), self.target.ty, min, max))
                .collect(),
        ))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        target_range(&self.target)?;
        let width = FeatureEncoder::new(&self.parents)?.width();
        if self.coefficients.len() != width + 1
            || !self.coefficients.iter().all(|c| c.is_finite())
            || !(self.residual_std.is_finite() && self.residual_std >= 0.0)
        {
            return Err(Error::MalformedModel(format!(
                "linear model for \"{}\" is malformed",
                self.target.name
            )));
        }
        Ok(())
    }
}

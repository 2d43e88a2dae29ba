use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LearnError, RidgeModel, Standardization};
use crate::exec::{self, ExecMode};
use crate::featurize::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Folds {
    K(usize),
    LeaveOneOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: Folds,
    /// Seed of the row shuffle that assigns folds.
    pub seed: u64,
    pub standardize: bool,
    pub mode: ExecMode,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions { folds: Folds::K(5), seed: 0, standardize: true, mode: ExecMode::Sequential }
    }
}

/// Ridge solutions for any penalty from one eigendecomposition of the smaller
/// Gram matrix of the centred, optionally scaled design `X`.
///
/// Every solution has the form `w = basis diag(1 / (e + M lambda)) proj`:
/// with `X'X = V E V'` (tall designs) `basis = V`, `proj = V'X'y`; with
/// `XX' = Q E Q'` (wide designs) `basis = X'Q`, `proj = Q'y`.
pub(crate) struct RidgeSolver {
    standardization: Standardization,
    eigenvalues: DVector<f64>,
    basis: DMatrix<f64>,
    proj: DMatrix<f64>,
    y_mean: Vec<f64>,
    rows: usize,
}

impl RidgeSolver {
    pub fn new(x: &DMatrix<f64>, y: &DMatrix<f64>, standardize: bool) -> Result<Self, LearnError> {
        if x.nrows() != y.nrows() {
            return Err(LearnError::LengthMismatch { what: "targets", expected: x.nrows(), found: y.nrows() });
        }
        if x.nrows() == 0 {
            return Err(LearnError::TooFewRows { needed: 1, found: 0 });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite("features"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(LearnError::NonFinite("targets"));
        }
        let standardization = Standardization::fit(x, standardize);
        let xs = standardization.apply(x);
        let rows = x.nrows();
        let y_mean: Vec<f64> = y.column_iter().map(|c| c.iter().sum::<f64>() / rows as f64).collect();
        let yc = DMatrix::from_fn(rows, y.ncols(), |r, k| y[(r, k)] - y_mean[k]);

        let wide = xs.nrows() < xs.ncols();
        let gram = if wide { &xs * xs.transpose() } else { xs.transpose() * &xs };
        let eig = gram.try_symmetric_eigen(f64::EPSILON, 0).ok_or(LearnError::Decomposition)?;
        let (basis, proj) = if wide {
            (xs.transpose() * &eig.eigenvectors, eig.eigenvectors.transpose() * yc)
        } else {
            let proj = eig.eigenvectors.transpose() * (xs.transpose() * yc);
            (eig.eigenvectors, proj)
        };
        // Gram eigenvalues are nonnegative; clamp rounding noise
        let eigenvalues = eig.eigenvalues.map(|e| e.max(0.0));
        Ok(RidgeSolver { standardization, eigenvalues, basis, proj, y_mean, rows })
    }

    /// `features x outputs` weights minimizing the mean-loss objective at `lambda`.
    pub fn weights(&self, lambda: f64) -> DMatrix<f64> {
        let penalty = self.rows as f64 * lambda;
        let mut scaled = self.proj.clone();
        for (r, e) in self.eigenvalues.iter().enumerate() {
            scaled.row_mut(r).scale_mut(1.0 / (e + penalty));
        }
        &self.basis * scaled
    }

    pub fn predict(&self, weights: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = self.standardization.apply(x) * weights;
        for (k, mean) in self.y_mean.iter().enumerate() {
            out.column_mut(k).add_scalar_mut(*mean);
        }
        out
    }

    pub fn into_model(self, lambda: f64, classes: Option<Vec<usize>>) -> RidgeModel {
        let w = self.weights(lambda);
        RidgeModel {
            weights: w.column_iter().map(|c| c.iter().copied().collect()).collect(),
            intercepts: self.y_mean,
            lambda,
            standardization: self.standardization,
            classes,
            featurizer: None,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<(), LearnError> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(LearnError::InvalidLambda(lambda))
    }
}

fn column(y: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(y.len(), 1, y)
}

/// Ridge regression at a fixed penalty.
pub fn ridge_fit(x: &FeatureMatrix, y: &[f64], lambda: f64, standardize: bool) -> Result<RidgeModel, LearnError> {
    check_lambda(lambda)?;
    Ok(RidgeSolver::new(x.values(), &column(y), standardize)?.into_model(lambda, None))
}

/// Ridge regression with the penalty chosen by cross-validated squared error
/// and refit on all rows.
pub fn ridge_cv(x: &FeatureMatrix, y: &[f64], grid: &[f64], opts: &CvOptions) -> Result<RidgeModel, LearnError> {
    let lambda = select_lambda(x.values(), &column(y), grid, opts)?;
    Ok(RidgeSolver::new(x.values(), &column(y), opts.standardize)?.into_model(lambda, None))
}

/// Shuffled row partition into folds of near-equal size.
pub(crate) fn fold_assignment(rows: usize, folds: Folds, seed: u64) -> Result<Vec<Vec<usize>>, LearnError> {
    let k = match folds {
        Folds::K(k) => k,
        Folds::LeaveOneOut => rows,
    };
    if k < 2 {
        return Err(LearnError::InvalidFolds(k));
    }
    if rows < k {
        return Err(LearnError::TooFewRows { needed: k, found: rows });
    }
    let mut idx: Vec<usize> = (0..rows).collect();
    if folds != Folds::LeaveOneOut {
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    Ok((0..k).map(|f| idx[f * rows / k..(f + 1) * rows / k].to_vec()).collect())
}

/// Grid value with the smallest summed held-out squared error over all
/// outputs; ties keep the earlier grid entry.
pub(crate) fn select_lambda(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    grid: &[f64],
    opts: &CvOptions,
) -> Result<f64, LearnError> {
    if grid.is_empty() {
        return Err(LearnError::EmptyLambdaGrid);
    }
    for &l in grid {
        check_lambda(l)?;
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let folds = fold_assignment(x.nrows(), opts.folds, opts.seed)?;

    let per_fold = exec::try_map(opts.mode, &folds, |test| -> Result<Vec<f64>, LearnError> {
        let mut in_test = vec![false; x.nrows()];
        for &r in test {
            in_test[r] = true;
        }
        let train: Vec<usize> = (0..x.nrows()).filter(|r| !in_test[*r]).collect();
        let solver = RidgeSolver::new(&x.select_rows(&train), &y.select_rows(&train), opts.standardize)?;
        let x_test = x.select_rows(test);
        let y_test = y.select_rows(test);
        Ok(grid
            .iter()
            .map(|&l| {
                let pred = solver.predict(&solver.weights(l), &x_test);
                (pred - &y_test).iter().map(|e| e * e).sum()
            })
            .collect())
    })?;

    let mut errors = vec![0.0; grid.len()];
    for fold in &per_fold {
        for (e, f) in errors.iter_mut().zip(fold) {
            *e += f;
        }
    }
    let mut best = 0;
    for i in 1..grid.len() {
        if errors[i] < errors[best] {
            best = i;
        }
    }
    Ok(grid[best])
}

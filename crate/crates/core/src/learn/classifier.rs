use nalgebra::DMatrix;

use super::ridge::{select_lambda, CvOptions, RidgeSolver};
use super::{LearnError, RidgeModel};
use crate::featurize::FeatureMatrix;

/// One-vs-rest ridge classifier.
///
/// Each class gets a `{-1, +1}` target column; a single penalty is chosen by
/// cross-validated squared error summed over all columns, and prediction is
/// the argmax of the per-class decision values.
pub fn ridge_classifier_fit(
    x: &FeatureMatrix,
    classes: &[usize],
    grid: &[f64],
    opts: &CvOptions,
) -> Result<RidgeModel, LearnError> {
    if classes.len() != x.nrows() {
        return Err(LearnError::LengthMismatch { what: "class labels", expected: x.nrows(), found: classes.len() });
    }
    let mut labels = classes.to_vec();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() < 2 {
        return Err(LearnError::SingleClass);
    }
    let targets = DMatrix::from_fn(classes.len(), labels.len(), |r, k| {
        if classes[r] == labels[k] { 1.0 } else { -1.0 }
    });
    let lambda = select_lambda(x.values(), &targets, grid, opts)?;
    Ok(RidgeSolver::new(x.values(), &targets, opts.standardize)?.into_model(lambda, Some(labels)))
}

use super::LearnError;

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r2_score(y_true: &[f64], y_pred: &[f64]) -> Result<f64, LearnError> {
    if y_true.len() != y_pred.len() {
        return Err(LearnError::LengthMismatch { what: "predictions", expected: y_true.len(), found: y_pred.len() });
    }
    if y_true.len() < 2 {
        return Err(LearnError::TooFewRows { needed: 2, found: y_true.len() });
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(LearnError::ZeroVariance);
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Fraction of matching labels.
pub fn accuracy<T: PartialEq>(truth: &[T], predicted: &[T]) -> Result<f64, LearnError> {
    if truth.len() != predicted.len() {
        return Err(LearnError::LengthMismatch { what: "predictions", expected: truth.len(), found: predicted.len() });
    }
    if truth.is_empty() {
        return Err(LearnError::TooFewRows { needed: 1, found: 0 });
    }
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

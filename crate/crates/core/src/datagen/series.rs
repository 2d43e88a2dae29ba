use super::DatagenError;
use crate::persistence::PointCloud;

/// Sampled local extrema: strict sign changes of the first difference, and
/// the midpoint of every plateau that a sign change brackets.
pub fn extrema(series: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    if series.len() < 3 {
        return out;
    }
    // last index whose forward difference was nonzero, and that difference's sign
    let mut last: Option<(usize, f64)> = None;
    for k in 1..series.len() {
        let step = series[k] - series[k - 1];
        if step == 0.0 {
            continue;
        }
        if let Some((prev, prev_step)) = last {
            if prev_step * step < 0.0 {
                // the extremum spans indices prev..=k-1; take its midpoint
                out.push(series[(prev + k - 1) / 2]);
            }
        }
        last = Some((k, step));
    }
    out
}

/// Points `(x_k, x_{k+tau}, ..., x_{k+(dim-1)tau})`.
pub fn delay_embed(series: &[f64], dim: usize, tau: usize) -> Result<PointCloud, DatagenError> {
    if dim == 0 || tau == 0 {
        return Err(DatagenError::InvalidParameter("embedding dimension and delay must be positive".into()));
    }
    let span = (dim - 1) * tau;
    if series.len() <= span {
        return Err(DatagenError::TooShort { needed: span + 1, found: series.len() });
    }
    let count = series.len() - span;
    let mut flat = Vec::with_capacity(count * dim);
    for k in 0..count {
        flat.extend((0..dim).map(|c| series[k + c * tau]));
    }
    PointCloud::from_flat(dim, flat).map_err(|e| DatagenError::InvalidParameter(e.to_string()))
}

/// Sample autocorrelation at lags `0..=max_lag` (normalized by the lag-0
/// value; all zeros for a constant series).
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n.max(1) as f64;
    let c: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let var: f64 = c.iter().map(|x| x * x).sum();
    (0..=max_lag.min(n.saturating_sub(1)))
        .map(|lag| {
            if var == 0.0 {
                return 0.0;
            }
            c[..n - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum::<f64>() / var
        })
        .collect()
}

/// First lag in `1..=max_lag` at which the autocorrelation has a local
/// minimum; the global minimum over the range if none exists.
pub fn embedding_delay(series: &[f64], max_lag: usize) -> usize {
    let ac = autocorrelation(series, max_lag + 1);
    let top = max_lag.min(ac.len().saturating_sub(2));
    if top == 0 {
        return 1;
    }
    for lag in 1..=top {
        if ac[lag] <= ac[lag - 1] && ac[lag] < ac[lag + 1] {
            return lag;
        }
    }
    (1..=top).min_by(|&a, &b| ac[a].total_cmp(&ac[b])).unwrap_or(1)
}

/// First lag in `1..=max_lag` at which the autocorrelation is no longer
/// positive, falling back to [`embedding_delay`] when it stays positive.
pub fn zero_crossing_delay(series: &[f64], max_lag: usize) -> usize {
    let ac = autocorrelation(series, max_lag);
    (1..ac.len()).find(|&lag| ac[lag] <= 0.0).unwrap_or_else(|| embedding_delay(series, max_lag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrema_of_sine_alternate() {
        let s: Vec<f64> = (0..2000).map(|k| (k as f64 * 0.01).sin()).collect();
        let e = extrema(&s);
        assert_eq!(e.len(), 6);
        for (k, v) in e.iter().enumerate() {
            let target = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - target).abs() < 1e-4);
        }
    }

    #[test]
    fn extrema_edge_cases() {
        assert!(extrema(&[1.0, 2.0, 3.0, 4.0]).is_empty());
        assert!(extrema(&[1.0, 2.0]).is_empty());
        let tri = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 3.0, 2.0];
        assert_eq!(extrema(&tri), vec![2.0, 0.0, 3.0]);
        // plateau maximum at indices 2..=4
        let plateau = [0.0, 1.0, 5.0, 5.0, 5.0, 1.0];
        assert_eq!(extrema(&plateau), vec![5.0]);
        // a plateau inside a monotone run is not an extremum
        assert!(extrema(&[0.0, 1.0, 1.0, 2.0]).is_empty());
    }

    #[test]
    fn delay_embedding() {
        let c = delay_embed(&[1.0, 2.0, 3.0, 4.0], 2, 1).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0, 2.0], vec![2.0, 3.0], vec![3.0, 4.0]]);
        let c = delay_embed(&[1.0, 2.0, 3.0], 1, 4).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0], vec![2.0], vec![3.0]]);
        let c = delay_embed(&[1.0, 2.0, 3.0, 4.0, 5.0], 3, 2).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0, 3.0, 5.0]]);
        assert!(matches!(delay_embed(&[1.0, 2.0, 3.0, 4.0], 3, 2), Err(DatagenError::TooShort { .. })));
    }

    #[test]
    fn delay_of_a_sinusoid_is_half_its_period() {
        let s: Vec<f64> = (0..5000).map(|k| (std::f64::consts::TAU * k as f64 / 42.0).sin()).collect();
        assert_eq!(embedding_delay(&s, 50), 21);
        assert_eq!(zero_crossing_delay(&s, 50), 11);
        let slow: Vec<f64> = (0..500).map(|k| k as f64).collect();
        assert_eq!(zero_crossing_delay(&slow, 5), embedding_delay(&slow, 5));
        assert_eq!(autocorrelation(&[2.0; 10], 3), vec![0.0; 4]);
    }
}

use std::f64::consts::PI;

use super::{uniform, DatagenError, Rng};

/// Minimum series length after striding.
pub const ZERO_ONE_MIN_LENGTH: usize = 1000;
const FREQUENCIES: usize = 100;

/// Zero-one test for chaos on every `stride`-th sample: median over random
/// frequencies `c` in `(pi/5, 4pi/5)` of the correlation between `n` and the
/// oscillation-corrected mean-square displacement of the translation
/// variables, for `n` up to a tenth of the length. Near 0 for regular and
/// near 1 for chaotic dynamics.
pub fn zero_one_test(series: &[f64], stride: usize, rng: &mut Rng) -> Result<f64, DatagenError> {
    if stride == 0 {
        return Err(DatagenError::InvalidParameter("stride must be positive".into()));
    }
    let phi: Vec<f64> = series.iter().step_by(stride).copied().collect();
    if phi.len() < ZERO_ONE_MIN_LENGTH {
        return Err(DatagenError::TooShort { needed: ZERO_ONE_MIN_LENGTH * stride, found: series.len() });
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(DatagenError::InvalidParameter("non-finite sample".into()));
    }
    let len = phi.len();
    let mean = phi.iter().sum::<f64>() / len as f64;
    let centred: Vec<f64> = phi.iter().map(|v| v - mean).collect();
    let ncut = len / 10;

    let mut scores: Vec<f64> = (0..FREQUENCIES)
        .map(|_| {
            let c = uniform(rng, PI / 5.0, 4.0 * PI / 5.0);
            growth_rate(&centred, c, ncut)
        })
        .collect();
    scores.sort_by(f64::total_cmp);
    let median = if FREQUENCIES % 2 == 1 {
        scores[FREQUENCIES / 2]
    } else {
        0.5 * (scores[FREQUENCIES / 2 - 1] + scores[FREQUENCIES / 2])
    };
    Ok(median.clamp(0.0, 1.0))
}

/// `K_c`: correlation of `n` with `D_c(n)` over `1 <= n <= ncut`.
fn growth_rate(phi: &[f64], c: f64, ncut: usize) -> f64 {
    let len = phi.len();
    let mut p = Vec::with_capacity(len);
    let mut q = Vec::with_capacity(len);
    let (mut ps, mut qs) = (0.0, 0.0);
    for (k, v) in phi.iter().enumerate() {
        let angle = (k + 1) as f64 * c;
        ps += v * angle.cos();
        qs += v * angle.sin();
        p.push(ps);
        q.push(qs);
    }
    let mean = phi.iter().sum::<f64>() / len as f64;
    let window = len - ncut;
    let d: Vec<f64> = (1..=ncut)
        .map(|n| {
            let msd = (0..window)
                .map(|j| {
                    let (dp, dq) = (p[j + n] - p[j], q[j + n] - q[j]);
                    dp * dp + dq * dq
                })
                .sum::<f64>()
                / window as f64;
            let n = n as f64;
            msd - mean * mean * (1.0 - (n * c).cos()) / (1.0 - c.cos())
        })
        .collect();
    let xs: Vec<f64> = (1..=ncut).map(|n| n as f64).collect();
    correlation(&xs, &d)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb <= f64::EPSILON * f64::EPSILON * n {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

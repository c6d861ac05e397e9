//! Log-log scaling fits with bootstrap uncertainty.

use serde::Serialize;

use super::HarnessError;

/// Least-squares fit of `log(mean)` against `log n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits `(n, mean)` pairs on log-log axes. Nonpositive (or non-finite)
/// means are excluded; fewer than 4 surviving points is an error.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit, HarnessError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, m)| *n > 0.0 && *m > 0.0 && m.is_finite())
        .map(|&(n, m)| (n.ln(), m.ln()))
        .collect();
    if usable.len() < 4 {
        return Err(HarnessError::TooFewPoints(usable.len()));
    }
    let k = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(ScalingFit { slope, intercept, r2, points: usable.len() })
}

/// Percentile bootstrap interval for the fitted slope: resamples each
/// grid point's per-trial values with replacement, refits, and reports
/// the `[2.5%, 97.5%]` slope quantiles.
pub fn bootstrap_slope_ci(
    per_n: &[(f64, Vec<f64>)],
    resamples: usize,
    seed: u64,
) -> Result<(f64, f64), HarnessError> {
    use rand::Rng;
    let mut rng = crate::seed::rng(crate::seed::mix(seed, crate::seed::tag::BOOTSTRAP));
    let mut slopes = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let points: Vec<(f64, f64)> = per_n
            .iter()
            .map(|(n, vals)| {
                let mean = (0..vals.len())
                    .map(|_| vals[rng.gen_range(0..vals.len())])
                    .sum::<f64>()
                    / vals.len() as f64;
                (*n, mean)
            })
            .collect();
        if let Ok(fit) = fit_scaling(&points) {
            slopes.push(fit.slope);
        }
    }
    if slopes.is_empty() {
        return Err(HarnessError::TooFewPoints(0));
    }
    slopes.sort_by(f64::total_cmp);
    let lo = slopes[(slopes.len() as f64 * 0.025) as usize];
    let hi = slopes[((slopes.len() as f64 * 0.975) as usize).min(slopes.len() - 1)];
    Ok((lo, hi))
}

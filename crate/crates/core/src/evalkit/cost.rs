//! Projected prompt cost as a function of the number of views.

/// Images sent for a tuple with `k` derived views (original included).
pub fn tuple_image_count(k: usize) -> usize {
    k + 1
}

/// Projected input tokens for a run whose cost column is labelled `k`,
/// where `k = 0` is the single-image baseline and `k ≥ 1` counts `k` images.
pub fn cost_model(k: usize, per_image_tokens: u64, text_tokens: u64) -> u64 {
    text_tokens + k.max(1) as u64 * per_image_tokens
}

/// Ordinary least squares `y = slope·x + intercept`. Needs two distinct x.
pub fn fit_linear(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_and_views() {
        assert_eq!(cost_model(0, 963, 60), 1023);
        assert_eq!(cost_model(3, 963, 60), 2949);
        assert_eq!(cost_model(5, 0, 60), 60);
        assert_eq!(tuple_image_count(3), 4);
    }

    #[test]
    fn fit_recovers_line() {
        let pts: Vec<_> = (1..=5).map(|x| (x as f64, 2.5 * x as f64 - 1.0)).collect();
        let (s, b) = fit_linear(&pts).unwrap();
        assert!((s - 2.5).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
        assert!(fit_linear(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}

//! Gaussian kernel density estimation with Silverman's bandwidth rule,
//! emitted as chart-ready curves plus quartile statistics.

use serde::{Deserialize, Serialize};

use super::AnalyticsError;

const CURVE_POINTS: usize = 200;
const BANDWIDTH_FLOOR: f64 = 1e-3;
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionData {
    pub series_name: String,
    pub sample_values: Vec<f64>,
    /// 200 evenly spaced (x, density) samples over [min - 3h, max + 3h].
    pub kde_curve: Vec<(f64, f64)>,
    pub quartiles: (f64, f64, f64),
    pub min: f64,
    pub max: f64,
    pub bandwidth: f64,
}

/// Quantile by linear interpolation on the sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Silverman's rule: 0.9 * min(sigma, IQR / 1.34) * n^(-1/5), floored at 1e-3.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len();
    let sigma = if n > 1 {
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let h = 0.9 * sigma.min(iqr / 1.34) * (n as f64).powf(-0.2);
    h.max(BANDWIDTH_FLOOR)
}

/// Gaussian-kernel density at a point.
pub fn kde_density(values: &[f64], bandwidth: f64, x: f64) -> f64 {
    let scale = 1.0 / (values.len() as f64 * bandwidth * SQRT_TWO_PI);
    values
        .iter()
        .map(|v| {
            let z = (x - v) / bandwidth;
            (-0.5 * z * z).exp()
        })
        .sum::<f64>()
        * scale
}

/// Estimate the density of `values`. `bandwidth` of `None` applies
/// Silverman's rule.
pub fn kde(
    series_name: impl Into<String>,
    values: &[f64],
    bandwidth: Option<f64>,
) -> Result<DistributionData, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::NoValues);
    }
    let h = bandwidth.unwrap_or_else(|| silverman_bandwidth(values));
    debug_assert!(h > 0.0);

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let min = sorted[0];
    let max = *sorted.last().expect("non-empty");

    let lo = min - 3.0 * h;
    let hi = max + 3.0 * h;
    let step = (hi - lo) / (CURVE_POINTS - 1) as f64;
    let kde_curve: Vec<(f64, f64)> = (0..CURVE_POINTS)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, kde_density(values, h, x))
        })
        .collect();

    Ok(DistributionData {
        series_name: series_name.into(),
        sample_values: values.to_vec(),
        kde_curve,
        quartiles: (
            quantile(&sorted, 0.25),
            quantile(&sorted, 0.5),
            quantile(&sorted, 0.75),
        ),
        min,
        max,
        bandwidth: h,
    })
}

/// Trapezoid integral of an emitted curve; close to 1 for any sane density.
pub fn trapezoid_integral(curve: &[(f64, f64)]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_value_peaks_at_closed_form_height() {
        let data = kde("one", &[0.42], None).unwrap();
        // With one sample sigma = IQR = 0, so the bandwidth floor applies.
        assert_relative_eq!(data.bandwidth, 1e-3, epsilon = 1e-15);
        let expected_peak = 1.0 / (data.bandwidth * SQRT_TWO_PI);
        assert_relative_eq!(
            kde_density(&[0.42], data.bandwidth, 0.42),
            expected_peak,
            epsilon = 1e-9
        );
        let curve_max = data
            .kde_curve
            .iter()
            .map(|&(_, d)| d)
            .fold(0.0, f64::max);
        assert!(curve_max <= expected_peak + 1e-9);
        assert!(curve_max >= expected_peak * 0.999);
        assert_eq!(data.quartiles, (0.42, 0.42, 0.42));
    }

    #[test]
    fn symmetric_sample_gives_symmetric_density() {
        let values = [0.2, 0.3, 0.45, 0.55, 0.7, 0.8];
        let data = kde("sym", &values, None).unwrap();
        let curve = &data.kde_curve;
        let n = curve.len();
        for i in 0..n / 2 {
            let (xl, dl) = curve[i];
            let (xr, dr) = curve[n - 1 - i];
            assert_relative_eq!(xl - 0.5, -(xr - 0.5), epsilon = 1e-9);
            assert_relative_eq!(dl, dr, epsilon = 1e-9);
        }
    }

    #[test]
    fn curve_matches_brute_force_kernel_sum() {
        // 20-value fixture against a direct double-loop evaluation.
        let values: Vec<f64> = (0..20).map(|i| 0.05 * i as f64 + 0.01 * (i % 3) as f64).collect();
        let data = kde("fixture", &values, None).unwrap();
        let h = data.bandwidth;
        for &(x, density) in &data.kde_curve {
            let mut direct = 0.0;
            for v in &values {
                direct += (-0.5 * ((x - v) / h) * ((x - v) / h)).exp();
            }
            direct /= values.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt();
            assert_relative_eq!(density, direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn integral_is_close_to_one() {
        let values: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 0.5 + 0.5).collect();
        let data = kde("s", &values, None).unwrap();
        let integral = trapezoid_integral(&data.kde_curve);
        assert!((integral - 1.0).abs() < 0.02, "integral = {integral}");
    }

    #[test]
    fn quartiles_are_ordered_and_interpolated() {
        let values = [1.0, 2.0, 3.0, 4.0];
        let data = kde("q", &values, None).unwrap();
        let (q1, med, q3) = data.quartiles;
        assert!(q1 <= med && med <= q3);
        assert_relative_eq!(q1, 1.75, epsilon = 1e-12);
        assert_relative_eq!(med, 2.5, epsilon = 1e-12);
        assert_relative_eq!(q3, 3.25, epsilon = 1e-12);
    }

    #[test]
    fn no_values_is_an_error() {
        assert!(matches!(kde("x", &[], None), Err(AnalyticsError::NoValues)));
    }

    #[test]
    fn explicit_bandwidth_is_respected() {
        let data = kde("b", &[0.1, 0.9], Some(0.25)).unwrap();
        assert_relative_eq!(data.bandwidth, 0.25, epsilon = 1e-15);
        assert_relative_eq!(data.kde_curve[0].0, 0.1 - 0.75, epsilon = 1e-12);
    }
}

use crate::error::{invalid, Result};

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return invalid("slope fit needs at least two paired samples");
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return invalid("log-log fit needs positive samples");
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return invalid("slope fit needs distinct abscissae");
    }
    Ok(sxy / sxx)
}

/// `max / min` of a nonempty list of positive values.
pub fn spread_ratio(values: &[f64]) -> Result<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || !(lo > 0.0) {
        return invalid("spread ratio needs positive values");
    }
    Ok(hi / lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_slope() {
        let xs = [0.1, 0.05, 0.02, 0.01];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ratio_rejects_zero() {
        assert!(spread_ratio(&[1.0, 0.0]).is_err());
        assert_eq!(spread_ratio(&[2.0, 1.0, 4.0]).unwrap(), 4.0);
    }
}

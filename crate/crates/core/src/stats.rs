use crate::error::{Error, Result};

/// Mean and centered sum of squares, two-pass.
pub(crate) fn moments(x: &[f64]) -> (f64, f64) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let ss = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss)
}

/// Sample Pearson correlation coefficient of two equal-length vectors.
pub(crate) fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "vectors of different lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidInput("need at least two pairs".into()));
    }
    let (ma, sa) = moments(a);
    if sa == 0.0 {
        return Err(Error::ConstantInput("first"));
    }
    pearson_with(a, ma, sa, b)
}

/// Pearson correlation when the moments of `a` are already known.
pub(crate) fn pearson_with(a: &[f64], mean_a: f64, ss_a: f64, b: &[f64]) -> Result<f64> {
    let (mb, sb) = moments(b);
    if sb == 0.0 {
        return Err(Error::ConstantInput("second"));
    }
    let cross: f64 = a.iter().zip(b).map(|(x, y)| (x - mean_a) * (y - mb)).sum();
    Ok((cross / (ss_a.sqrt() * sb.sqrt())).clamp(-1.0, 1.0))
}

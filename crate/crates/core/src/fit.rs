use crate::error::{Error, Result};

/// Least-squares line `log y = slope * log x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

impl LogLogFit {
    /// `exp(intercept)`, the coefficient of the fitted power law.
    pub fn coefficient(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Fits a power law through positive samples. Needs at least two points
/// with distinct abscissae.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter(format!(
            "fit needs matching sample lists ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidParameter(
            "log-log fit needs positive finite samples".into(),
        ));
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            usable: n,
            required: 2,
        });
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "fit abscissae are all equal".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        points: n,
    })
}

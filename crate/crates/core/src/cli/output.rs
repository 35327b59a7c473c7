use std::io::Write;

use crate::assembly::{Boundary, Preset};
use crate::dispersion::{DispersionSample, ErrorOrderFit};
use crate::eigen::EigenReport;
use crate::error::Result;

pub const REPORT_HEADER: &str =
    "preset,dim,bc,n,mode_j,mode_k,lambda_h,lambda_exact,ev_rel_err,ef_l2_err,ef_energy_scaled";
pub const DISPERSION_HEADER: &str = "preset,lambda,mu_h,abs_err";
pub const SUMMARY_HEADER: &str =
    "preset,dim,bc,family,mode_j,mode_k,points,ev_slope,l2_slope,energy_slope";

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_report(
    w: &mut dyn Write,
    preset: Preset,
    dim: usize,
    bc: Boundary,
    n: usize,
    report: &EigenReport,
) -> Result<()> {
    for m in &report.modes {
        writeln!(
            w,
            "{preset},{dim},{},{n},{},{},{},{},{},{},{}",
            bc.name(),
            m.mode_j,
            m.mode_k,
            num(m.lambda_h),
            num(m.lambda_exact),
            num(m.ev_rel_err),
            num(m.ef_l2_err),
            num(m.ef_energy_scaled)
        )?;
    }
    Ok(())
}

/// Dispersion rows; the optional fit is appended as `#`-prefixed footer
/// rows so that the table itself keeps a fixed column count.
pub fn write_dispersion(
    w: &mut dyn Write,
    preset: Preset,
    samples: &[DispersionSample],
    fit: Option<&ErrorOrderFit>,
) -> Result<()> {
    writeln!(w, "{DISPERSION_HEADER}")?;
    for s in samples {
        writeln!(
            w,
            "{preset},{},{},{}",
            num(s.lambda),
            num(s.mu_h),
            num(s.abs_error())
        )?;
    }
    if let Some(f) = fit {
        writeln!(w, "# order,{}", num(f.order))?;
        writeln!(w, "# coefficient,{}", num(f.coefficient))?;
    }
    Ok(())
}

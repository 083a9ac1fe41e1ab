//! CSV serialization shared by the library and the CLI.
//!
//! All CSV files start with the version comment `# schema=1` followed by a
//! header row. Floats are written in plain decimal with 15 significant
//! digits, which round-trips f64 for the magnitudes that occur here and keeps
//! the files diffable.

use std::io::{self, Write};

use crate::cumulant::{MomentTrajectory, MomentVector};
use crate::liouville::Observables;

pub const SCHEMA_LINE: &str = "# schema=1";

/// Plain-decimal formatting with 15 significant digits.
pub fn fmt15(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".to_string()
        } else if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (14 - exponent).clamp(0, 320) as usize;
    let s = format!("{v:.decimals$}");
    // Trim trailing zeros but keep at least one digit after the point.
    if s.contains('.') {
        let t = s.trim_end_matches('0');
        let t = t.strip_suffix('.').unwrap_or(t);
        t.to_string()
    } else {
        s
    }
}

/// Cumulant trajectory: `t` followed by the moment fields.
pub fn write_moment_trajectory<W: Write>(w: &mut W, traj: &MomentTrajectory) -> io::Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "t,{}", MomentVector::CSV_FIELDS.join(","))?;
    for (t, m) in traj.times.iter().zip(traj.moments.iter()) {
        let mut row = vec![fmt15(*t)];
        row.extend(m.as_array().iter().map(|&v| fmt15(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Master-equation snapshots: one row per sample time.
pub fn write_snapshots<W: Write>(
    w: &mut W,
    times: &[f64],
    observables: &[Observables],
) -> io::Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "t,sz,n,szsz,sxsx")?;
    for (t, o) in times.iter().zip(observables.iter()) {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt15(*t),
            fmt15(o.sz),
            fmt15(o.n),
            fmt15(o.szsz),
            fmt15(o.sxsx)
        )?;
    }
    Ok(())
}

/// Per-snapshot Fock distributions, long format.
pub fn write_fock_distributions<W: Write>(
    w: &mut W,
    times: &[f64],
    observables: &[Observables],
) -> io::Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "t,n,prob")?;
    for (t, o) in times.iter().zip(observables.iter()) {
        for (n, p) in o.fock_distribution.iter().enumerate() {
            writeln!(w, "{},{},{}", fmt15(*t), n, fmt15(*p))?;
        }
    }
    Ok(())
}

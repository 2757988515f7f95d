//! CSV writers for run records and aggregate curves.

use std::io::Write;

use crate::error::{Error, Result};

use super::repro::Curve;
use super::RunRecord;

/// One row per epoch: `t,played,realized,regret,estimate_error` followed by
/// the policy's diagnostic columns. `estimate_error` is empty for policies
/// without estimates.
pub fn write_run<W: Write>(record: &RunRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "t".to_string(),
        "played".into(),
        "realized".into(),
        "regret".into(),
        "estimate_error".into(),
    ];
    header.extend(record.diagnostic_names.iter().cloned());
    w.write_record(&header)?;
    for row in &record.epochs {
        let mut fields = vec![
            row.t.to_string(),
            row.played.to_string(),
            row.realized.to_string(),
            row.regret.to_string(),
            row.estimate_error
                .map(|e| e.to_string())
                .unwrap_or_default(),
        ];
        fields.extend(row.diagnostics.iter().map(f64::to_string));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// `t` followed by `<name>_mean,<name>_std` per curve. All curves must
/// share the same epochs.
pub fn write_curves<W: Write>(curves: &[(&str, &Curve)], out: W) -> Result<()> {
    let Some((_, first)) = curves.first() else {
        return Err(Error::param("curves", "nothing to write"));
    };
    if curves.iter().any(|(_, c)| c.t != first.t) {
        return Err(Error::param("curves", "curves cover different epochs"));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for (name, _) in curves {
        header.push(format!("{name}_mean"));
        header.push(format!("{name}_std"));
    }
    w.write_record(&header)?;
    for (i, t) in first.t.iter().enumerate() {
        let mut fields = vec![t.to_string()];
        for (_, c) in curves {
            fields.push(c.mean[i].to_string());
            fields.push(c.std[i].to_string());
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

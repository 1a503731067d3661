use std::io::Write;

use greenroute_core::sa::AnnealTrace;
use serde::Serialize;

#[derive(Serialize)]
struct Row {
    epoch: usize,
    temperature: f64,
    current: f64,
    best: f64,
    accepted: bool,
    /// Empty for a skipped step.
    kind: Option<u8>,
}

/// Writes `epoch,temperature,current,best,accepted,kind`, one row per step.
pub fn write_trace<W: Write>(trace: &AnnealTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &trace.rows {
        w.serialize(Row {
            epoch: r.epoch,
            temperature: r.temperature,
            current: r.current,
            best: r.best,
            accepted: r.accepted,
            kind: r.kind.map(|k| k.number()),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Best objective at the end of each epoch.
pub fn best_by_epoch(trace: &AnnealTrace) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in &trace.rows {
        match out.last_mut() {
            Some(last) if last.0 == r.epoch => last.1 = r.best,
            _ => out.push((r.epoch, r.best)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenroute_core::sa::{MoveKind, TraceRow};

    fn row(epoch: usize, best: f64, kind: Option<MoveKind>) -> TraceRow {
        TraceRow { epoch, temperature: 1.0, current: best, best, accepted: kind.is_some(), kind, delta: None }
    }

    #[test]
    fn csv_layout() {
        let trace = AnnealTrace { rows: vec![row(0, 10.0, Some(MoveKind::Swap)), row(0, 9.5, None)] };
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "epoch,temperature,current,best,accepted,kind\n0,1.0,10.0,10.0,true,4\n0,1.0,9.5,9.5,false,\n"
        );
    }

    #[test]
    fn last_best_per_epoch() {
        let trace = AnnealTrace { rows: vec![row(0, 10.0, None), row(0, 9.0, None), row(1, 8.0, None)] };
        assert_eq!(best_by_epoch(&trace), [(0, 9.0), (1, 8.0)]);
    }
}

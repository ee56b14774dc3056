//! CSV and JSON rendering of sweep records.

use lambda_holo_core::sweeps::{Coord, SweepPoint};
use serde_json::{Map, Value};

/// Column names: coordinates (alphabetical), fidelity, diagnostics.
pub fn columns(points: &[SweepPoint]) -> Vec<&'static str> {
    let mut cols: Vec<&'static str> = points
        .first()
        .map(|p| p.coords.keys().copied().collect())
        .unwrap_or_default();
    cols.push("fidelity");
    cols.push("excited_population");
    if points.iter().any(|p| p.overlap_phase.is_some()) {
        cols.push("overlap_phase");
    }
    cols
}

fn cells(p: &SweepPoint, with_phase: bool) -> Vec<String> {
    let mut row: Vec<String> = p.coords.values().map(Coord::to_string).collect();
    row.push(format!("{:.6}", p.fidelity));
    row.push(format!("{:.6e}", p.excited_population));
    if with_phase {
        row.push(
            p.overlap_phase
                .map(|v| format!("{v:.6}"))
                .unwrap_or_default(),
        );
    }
    row
}

pub fn csv(points: &[SweepPoint]) -> Result<Vec<u8>, csv::Error> {
    let cols = columns(points);
    let with_phase = cols.last() == Some(&"overlap_phase");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&cols)?;
    for p in points {
        w.write_record(cells(p, with_phase))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn json(points: &[SweepPoint]) -> Vec<u8> {
    let records: Vec<Value> = points
        .iter()
        .map(|p| {
            let mut m = Map::new();
            for (k, c) in &p.coords {
                let v = match c {
                    Coord::Freq(v) | Coord::Num(v) => number(*v),
                    Coord::Text(s) => Value::String(s.clone()),
                };
                m.insert((*k).to_owned(), v);
            }
            m.insert("fidelity".into(), number(p.fidelity));
            m.insert("excited_population".into(), number(p.excited_population));
            if let Some(phase) = p.overlap_phase {
                m.insert("overlap_phase".into(), number(phase));
            }
            Value::Object(m)
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&records).expect("records serialize");
    out.push(b'\n');
    out
}

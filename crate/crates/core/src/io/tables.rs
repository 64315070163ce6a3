//! CSV and JSON renderings of comparison tables.

use serde::{Deserialize, Serialize};

use super::canonical::format_fixed;
use super::documents::Document;
use crate::metrics::{CostCoefficients, MetricsRow, ResponseTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsTable {
    pub n_units: usize,
    pub baseline: String,
    pub coefficients: CostCoefficients,
    pub rows: Vec<MetricsRow>,
}

impl Document for MetricsTable {
    const FORMAT: &'static str = "cscp.metrics/1";
}

impl Document for ResponseTable {
    const FORMAT: &'static str = "cscp.response/1";
}

fn fixed(v: f64) -> String {
    format_fixed(v).unwrap_or_else(|| "nan".to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is utf-8")
}

pub fn metrics_csv(table: &MetricsTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "spec_id", "family", "controls", "indicators", "wires_command", "wires_signal", "nprkl",
        "nprsl", "g", "s_area", "w",
    ])
    .expect("in-memory write");
    for r in &table.rows {
        let a = &r.absolute;
        w.write_record([
            r.spec_id.clone(),
            r.family.name().to_string(),
            a.controls.to_string(),
            a.indicators.to_string(),
            a.nprkl.to_string(),
            a.nprsl.to_string(),
            fixed(r.nprkl),
            fixed(r.nprsl),
            fixed(r.g),
            fixed(r.s_area),
            fixed(r.w),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn response_csv(table: &ResponseTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["task".to_string()];
    for id in &table.spec_ids {
        header.push(format!("{id}_s"));
        header.push(format!("{id}_within_10pct"));
    }
    w.write_record(&header).expect("in-memory write");
    for row in &table.rows {
        let mut rec = vec![serde_json::to_string(&row.task).expect("step serializes")];
        for (t, ok) in row.seconds.iter().zip(&row.within_10pct) {
            rec.push(fixed(*t));
            rec.push(ok.to_string());
        }
        w.write_record(&rec).expect("in-memory write");
    }
    finish(w)
}

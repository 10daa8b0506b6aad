//! `catalog`: generators, integrals and charts known to the library.

use bcklab::canonical::ChartId;
use bcklab::integrals::{IntegralId, IntegralInfo};
use bcklab::symmetry::catalog::{listing, Record};
use serde::Serialize;

use crate::Format;

#[derive(Debug, Serialize)]
pub struct ChartInfo {
    pub id: ChartId,
    pub integral: IntegralId,
    pub window: &'static str,
    pub momentum: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Listing {
    pub generators: Vec<Record>,
    pub integrals: Vec<IntegralInfo>,
    pub charts: Vec<ChartInfo>,
}

pub fn build() -> Listing {
    Listing {
        generators: listing(),
        integrals: IntegralId::ALL.into_iter().map(IntegralId::info).collect(),
        charts: ChartId::ALL
            .into_iter()
            .map(|id| ChartInfo {
                id,
                integral: id.integral(),
                window: id.window(),
                momentum: id.momentum_map(),
            })
            .collect(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Render the listing; CSV carries the generator table only.
pub fn render(format: Format) -> String {
    let l = build();
    match format {
        Format::Json => serde_json::to_string_pretty(&l).expect("listing serializes") + "\n",
        Format::Csv => {
            let mut out = String::from("name,source,kind,binding,tau,xi,f,integral,sign\n");
            for r in &l.generators {
                let cells = [
                    r.name.clone(),
                    serde_json::to_value(r.source)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_owned))
                        .unwrap_or_default(),
                    format!("{:?}", r.kind).to_lowercase(),
                    r.binding.to_owned(),
                    r.tau.clone(),
                    r.xi.clone(),
                    r.f.clone(),
                    r.integral.map(|i| i.to_string()).unwrap_or_default(),
                    r.sign.map(|s| s.to_string()).unwrap_or_default(),
                ];
                let row: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
    }
}

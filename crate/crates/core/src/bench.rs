//! Parameter sweeps over abstraction × relation set × adjacency mode ×
//! minimum support, reporting pattern counts, mining time and peak
//! candidate counts.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::karmalego::{mine, MinSupport, MiningConfig};
use crate::model::{IntervalDatabase, TimeStamp};
use crate::relations::{RelationConfig, RelationMode};
use crate::sac::SacMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub relations: Vec<RelationMode>,
    pub sac: Vec<SacMode>,
    pub min_vs: Vec<MinSupport>,
    pub epsilon: TimeStamp,
    pub max_gap: Option<TimeStamp>,
    pub max_size: Option<usize>,
}

impl Default for BenchGrid {
    fn default() -> Self {
        BenchGrid {
            relations: vec![RelationMode::Allen7, RelationMode::Abstract3],
            sac: SacMode::ALL.to_vec(),
            min_vs: ["0.9", "0.8", "0.7", "0.6", "0.5"]
                .iter()
                .map(|s| s.parse().expect("valid support"))
                .collect(),
            epsilon: 0,
            max_gap: None,
            max_size: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub abstraction: String,
    pub relations: RelationMode,
    pub sac: SacMode,
    pub min_vs: MinSupport,
    pub n_tirps: usize,
    pub runtime_ms: f64,
    pub peak_candidates: u64,
}

/// Times one mining call (excluding any I/O) and summarizes it.
pub fn run_cell(abstraction: &str, db: &IntervalDatabase, cfg: &MiningConfig) -> Result<BenchRow> {
    let t0 = Instant::now();
    let tree = mine(db, cfg)?;
    let runtime_ms = t0.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRow {
        abstraction: abstraction.to_string(),
        relations: cfg.relations.mode,
        sac: cfg.sac,
        min_vs: cfg.min_support,
        n_tirps: tree.len(),
        runtime_ms,
        peak_candidates: tree.stats.peak_candidates(),
    })
}

/// One row per (abstraction, relations, sac, min_vs) cell, in that nesting
/// order.
pub fn run_grid(dbs: &[(String, IntervalDatabase)], grid: &BenchGrid) -> Result<Vec<BenchRow>> {
    if grid.relations.is_empty() || grid.sac.is_empty() || grid.min_vs.is_empty() {
        return Err(Error::InvalidArgument(
            "bench grid has an empty dimension".into(),
        ));
    }
    let mut rows = Vec::new();
    for (name, db) in dbs {
        for &mode in &grid.relations {
            for &sac in &grid.sac {
                for &min_vs in &grid.min_vs {
                    let mut cfg = MiningConfig::new(min_vs)
                        .with_relations(RelationConfig {
                            epsilon: grid.epsilon,
                            max_gap: grid.max_gap,
                            mode,
                        })
                        .with_sac(sac);
                    cfg.max_size = grid.max_size;
                    let row = run_cell(name, db, &cfg)?;
                    log::info!(
                        "{name} {mode} {sac} {min_vs}: {} patterns in {:.1} ms",
                        row.n_tirps,
                        row.runtime_ms
                    );
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(w: W, rows: &[BenchRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let wrap = |e: csv::Error| Error::io("<output>", std::io::Error::other(e.to_string()));
    out.write_record([
        "abstraction",
        "relations",
        "sac",
        "min_vs",
        "n_tirps",
        "runtime_ms",
        "peak_candidates",
    ])
    .map_err(wrap)?;
    for r in rows {
        out.write_record([
            r.abstraction.clone(),
            r.relations.to_string(),
            r.sac.to_string(),
            format!("{:.6}", r.min_vs.as_f64()),
            r.n_tirps.to_string(),
            format!("{:.3}", r.runtime_ms),
            r.peak_candidates.to_string(),
        ])
        .map_err(wrap)?;
    }
    out.flush().map_err(|e| Error::io("<output>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, GeneratorConfig};

    #[test]
    fn grid_rows_and_nesting() {
        let g = generate(&GeneratorConfig {
            entities: 12,
            contradiction_rate: 0.5,
            ..Default::default()
        })
        .unwrap();
        let grid = BenchGrid {
            relations: vec![RelationMode::Allen7],
            sac: vec![SacMode::None, SacMode::Csac],
            min_vs: vec!["0.5".parse().unwrap()],
            ..Default::default()
        };
        let rows = run_grid(&[("kb".into(), g.db)], &grid).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1].n_tirps <= rows[0].n_tirps);
        let mut buf = Vec::new();
        write_bench_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "abstraction,relations,sac,min_vs,n_tirps,runtime_ms,peak_candidates"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("kb,allen7,none,0.500000,"));
        assert!(run_grid(
            &[],
            &BenchGrid {
                sac: vec![],
                ..Default::default()
            }
        )
        .is_err());
    }
}

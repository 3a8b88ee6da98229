//! Browser bindings for the demo page: a mining explorer, an adjacency
//! timeline for single entities and a discretization explorer.
//!
//! Everything crosses the boundary as strings: CSV in, JSON out. The logic
//! lives in plain functions so it can be tested natively.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use tirpmine::abstraction::discretize::{
    apply_cutoffs, ewd_cutoffs, sax_breakpoints, td4c_kl_cutoffs, z_normalize,
    DEFAULT_PERCENTILE_STEP,
};
use tirpmine::abstraction::{state_name, Method};
use tirpmine::detect::detect;
use tirpmine::io::{build_database, database_rows, read_interval_rows, tirp_records};
use tirpmine::relations::classify_pair;
use tirpmine::sac::{has_strict_gap, instance_satisfies, karma_pair_admissible};
use tirpmine::synth::{generate, GeneratorConfig};
use tirpmine::{
    mine, EntityRecord, IntervalDatabase, MinSupport, MiningConfig, RelationConfig, RelationMode,
    SacMode, Tirp,
};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// An interval database held on the Rust side between calls.
#[wasm_bindgen]
pub struct Explorer {
    db: IntervalDatabase,
}

#[derive(Serialize)]
struct IntervalView {
    index: usize,
    concept: String,
    value: String,
    start: i64,
    end: i64,
}

impl Explorer {
    pub fn from_csv(text: &str) -> Result<Explorer> {
        let rows = read_interval_rows(text.as_bytes(), "input").map_err(err)?;
        let db = build_database(&rows, &Default::default(), []).map_err(err)?;
        Ok(Explorer { db })
    }

    /// Seeded synthetic database with planted patterns.
    pub fn synthetic(seed: u64, contradiction_rate: f64) -> Result<Explorer> {
        let g = generate(&GeneratorConfig {
            entities: 20,
            planted: 2,
            pattern_size: 3,
            plant_rate: 0.7,
            noise_intervals: 4,
            contradiction_rate,
            seed,
            ..Default::default()
        })
        .map_err(err)?;
        Ok(Explorer { db: g.db })
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        tirpmine::io::write_interval_rows(&mut buf, &database_rows(&self.db))
            .expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    fn config(min_vs: &str, relations: &str, sac: &str, epsilon: i64) -> Result<MiningConfig> {
        let min: MinSupport = min_vs.parse().map_err(err)?;
        let mode: RelationMode = relations.parse().map_err(err)?;
        let sac: SacMode = sac.parse().map_err(err)?;
        let cfg = MiningConfig::new(min)
            .with_relations(RelationConfig {
                epsilon,
                max_gap: None,
                mode,
            })
            .with_sac(sac);
        cfg.validate().map_err(err)?;
        Ok(cfg)
    }

    fn entity(&self, id: &str) -> Result<&EntityRecord> {
        self.db
            .entity(id)
            .ok_or_else(|| format!("no entity `{id}`"))
    }

    fn view(&self, e: &EntityRecord) -> Vec<IntervalView> {
        let t = self.db.symbols();
        e.intervals
            .iter()
            .enumerate()
            .map(|(index, iv)| IntervalView {
                index,
                concept: t.concept_name(iv.symbol.concept).to_string(),
                value: t.value_name(iv.symbol.value).to_string(),
                start: iv.start,
                end: iv.end,
            })
            .collect()
    }

    pub fn summary_json(&self) -> Value {
        let entities: Vec<Value> = self
            .db
            .entities()
            .iter()
            .map(|e| json!({ "id": e.id, "intervals": e.intervals.len() }))
            .collect();
        json!({ "entities": entities, "symbols": self.db.symbols().len() })
    }

    pub fn intervals_json(&self, entity: &str) -> Result<Value> {
        let e = self.entity(entity)?;
        Ok(json!(self.view(e)))
    }

    /// Patterns under the chosen mode plus pattern counts under every mode.
    pub fn mine_json(
        &self,
        min_vs: &str,
        relations: &str,
        sac: &str,
        max_size: usize,
    ) -> Result<Value> {
        let mut cfg = Self::config(min_vs, relations, sac, 0)?;
        if max_size > 0 {
            cfg.max_size = Some(max_size);
        }
        let mut counts = BTreeMap::new();
        for mode in SacMode::ALL {
            let c = MiningConfig { sac: mode, ..cfg };
            counts.insert(mode.as_str(), mine(&self.db, &c).map_err(err)?.len());
        }
        let tree = mine(&self.db, &cfg).map_err(err)?;
        let patterns: Vec<Value> = tirp_records(&tree, &self.db)
            .iter()
            .filter(|r| r.size() > 1)
            .map(|r| {
                json!({
                    "symbols": r.symbols,
                    "relations": r.relation_codes(),
                    "supporting": r.supporting,
                    "total": r.total,
                    "mean_hor_sup": r.mean_hor_sup,
                })
            })
            .collect();
        Ok(json!({ "counts": counts, "patterns": patterns }))
    }

    fn parse_pattern(&self, symbols: &str, relations: &str) -> Result<Tirp> {
        let record = tirpmine::io::TirpRecord {
            symbols: symbols.split(',').map(|s| s.trim().to_string()).collect(),
            relations: relations
                .chars()
                .map(|c| {
                    tirpmine::Relation::from_code(c).ok_or_else(|| format!("bad relation `{c}`"))
                })
                .collect::<Result<_>>()?,
            supporting: 0,
            total: 0,
            mean_hor_sup: 0.0,
            mean_duration: 0.0,
        };
        let k = record.symbols.len();
        if record.relations.len() != k * (k - 1) / 2 {
            return Err(format!("{k} symbols need {} relations", k * (k - 1) / 2));
        }
        record
            .to_tirp(self.db.symbols())
            .ok_or_else(|| "pattern uses a symbol absent from the data".to_string())
    }

    /// Intervals of one entity plus every unconstrained instance of the
    /// pattern there, each with its verdict under every mode and the
    /// intervals that block its gaps.
    pub fn timeline_json(&self, entity: &str, symbols: &str, relations: &str) -> Result<Value> {
        let e = self.entity(entity)?;
        let tirp = self.parse_pattern(symbols, relations)?;
        let mode = if relations.chars().any(|c| "BOC".contains(c)) {
            "abstract3"
        } else {
            "allen7"
        };
        let cfg = Self::config("1", mode, "none", 0)?;
        let instances: Vec<Value> = detect(&tirp, e, &cfg)
            .into_iter()
            .map(|idx| {
                let ids: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
                let verdicts: BTreeMap<&str, bool> = SacMode::ALL
                    .iter()
                    .map(|&m| (m.as_str(), instance_satisfies(m, e, &ids)))
                    .collect();
                let mut blockers: Vec<usize> = ids
                    .iter()
                    .enumerate()
                    .flat_map(|(p, &i)| {
                        ids[p + 1..]
                            .iter()
                            .flat_map(move |&j| gap_blockers(e, i, j))
                    })
                    .collect();
                blockers.sort_unstable();
                blockers.dedup();
                json!({ "indices": ids, "verdicts": verdicts, "blockers": blockers })
            })
            .collect();
        Ok(json!({ "intervals": self.view(e), "instances": instances }))
    }

    /// Relation and adjacency verdicts for two intervals of one entity.
    pub fn pair_json(&self, entity: &str, i: usize, j: usize, epsilon: i64) -> Result<Value> {
        let e = self.entity(entity)?;
        let n = e.intervals.len();
        if i >= n || j >= n || i == j {
            return Err(format!("need two distinct interval indices below {n}"));
        }
        let (i, j) = (i.min(j), i.max(j));
        let (a, b) = (&e.intervals[i], &e.intervals[j]);
        let rel = |mode| {
            let cfg = RelationConfig {
                epsilon,
                max_gap: None,
                mode,
            };
            classify_pair(a, b, &cfg).map(|r| r.map(|r| r.code().to_string()))
        };
        let admissible: BTreeMap<&str, bool> = SacMode::ALL
            .iter()
            .map(|&m| (m.as_str(), karma_pair_admissible(m, e, i, j)))
            .collect();
        Ok(json!({
            "first": i,
            "second": j,
            "allen7": rel(RelationMode::Allen7).map_err(err)?,
            "abstract3": rel(RelationMode::Abstract3).map_err(err)?,
            "strict_gap": has_strict_gap(a, b),
            "blockers": gap_blockers(e, i, j),
            "admissible": admissible,
        }))
    }
}

/// Intervals sharing a semantic type with `i` or `j` that reach into the
/// strict gap between them; empty when there is no strict gap.
fn gap_blockers(e: &EntityRecord, i: usize, j: usize) -> Vec<usize> {
    let (a, b) = (&e.intervals[i], &e.intervals[j]);
    if !has_strict_gap(a, b) {
        return Vec::new();
    }
    e.intervals
        .iter()
        .enumerate()
        .filter(|&(t, iv)| {
            t != i
                && t != j
                && iv.end > a.end
                && iv.start < b.start
                && (iv.sem_type() == a.sem_type() || iv.sem_type() == b.sem_type())
        })
        .map(|(t, _)| t)
        .collect()
}

/// Cutoffs for one concept's values and the resulting state counts per
/// class. SAX cutoffs are reported in the original units.
pub fn discretize_json(
    values: &[f64],
    labels: &[String],
    method: &str,
    bins: usize,
) -> Result<Value> {
    let method: Method = method.parse().map_err(err)?;
    if values.is_empty() {
        return Err("no values".into());
    }
    if !labels.is_empty() && labels.len() != values.len() {
        return Err("labels must match values one to one".into());
    }
    let cutoffs = match method {
        Method::Ewd => ewd_cutoffs(values, bins).map_err(err)?,
        Method::Sax => {
            let breaks = sax_breakpoints(bins).map_err(err)?;
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            if z_normalize(values).is_none() {
                return Err("values have no spread".into());
            }
            breaks.iter().map(|z| mean + z * sd).collect()
        }
        Method::Td4cKl => {
            if labels.is_empty() {
                return Err("supervised discretization needs labels".into());
            }
            let labeled: Vec<(f64, &str)> = values
                .iter()
                .copied()
                .zip(labels.iter().map(String::as_str))
                .collect();
            td4c_kl_cutoffs(&labeled, bins, DEFAULT_PERCENTILE_STEP)
                .map_err(err)?
                .cutoffs
        }
        Method::Kb => return Err("knowledge-based cutoffs come from a knowledge base".into()),
    };
    let states: Vec<String> = (0..=cutoffs.len())
        .map(|b| state_name(b, cutoffs.len() + 1))
        .collect();
    let mut counts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (k, &v) in values.iter().enumerate() {
        let class = labels.get(k).map_or("all", String::as_str);
        counts.entry(class).or_insert_with(|| vec![0; states.len()])[apply_cutoffs(v, &cutoffs)] +=
            1;
    }
    Ok(json!({ "cutoffs": cutoffs, "states": states, "counts": counts }))
}

fn to_js(v: Result<Value>) -> std::result::Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(csv: &str) -> std::result::Result<Explorer, JsError> {
        Explorer::from_csv(csv).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = generate)]
    pub fn generate_js(
        seed: u32,
        contradiction_rate: f64,
    ) -> std::result::Result<Explorer, JsError> {
        Explorer::synthetic(seed.into(), contradiction_rate).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = csv)]
    pub fn csv_js(&self) -> String {
        self.to_csv()
    }

    #[wasm_bindgen(js_name = summary)]
    pub fn summary_js(&self) -> String {
        self.summary_json().to_string()
    }

    #[wasm_bindgen(js_name = intervals)]
    pub fn intervals_js(&self, entity: &str) -> std::result::Result<String, JsError> {
        to_js(self.intervals_json(entity))
    }

    #[wasm_bindgen(js_name = mine)]
    pub fn mine_js(
        &self,
        min_vs: &str,
        relations: &str,
        sac: &str,
        max_size: u32,
    ) -> std::result::Result<String, JsError> {
        to_js(self.mine_json(min_vs, relations, sac, max_size as usize))
    }

    #[wasm_bindgen(js_name = timeline)]
    pub fn timeline_js(
        &self,
        entity: &str,
        symbols: &str,
        relations: &str,
    ) -> std::result::Result<String, JsError> {
        to_js(self.timeline_json(entity, symbols, relations))
    }

    #[wasm_bindgen(js_name = pair)]
    pub fn pair_js(
        &self,
        entity: &str,
        i: u32,
        j: u32,
        epsilon: i32,
    ) -> std::result::Result<String, JsError> {
        to_js(self.pair_json(entity, i as usize, j as usize, epsilon.into()))
    }
}

/// `values` and `labels` are comma- or whitespace-separated; labels may be
/// empty.
#[wasm_bindgen]
pub fn discretize(
    values: &str,
    labels: &str,
    method: &str,
    bins: u32,
) -> std::result::Result<String, JsError> {
    let split = |s: &str| -> Vec<String> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    };
    let values: std::result::Result<Vec<f64>, _> =
        split(values).iter().map(|t| t.parse::<f64>()).collect();
    let values = values.map_err(|e| JsError::new(&format!("bad value: {e}")))?;
    to_js(discretize_json(
        &values,
        &split(labels),
        method,
        bins as usize,
    ))
}

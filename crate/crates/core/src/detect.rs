//! Detection of known patterns in (possibly unseen) entities, and the
//! per-entity feature matrices built from the detections.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::karmalego::{instance_span, GapIndex, MiningConfig, Tirp};
use crate::model::{EntityRecord, IntervalDatabase};
use crate::par;
use crate::relations::classify_ordered;
use crate::sac::SacMode;

/// All instances of `tirp` in `entity` honoring every stored relation and
/// the configured adjacency criterion. Instances come out in lexicographic
/// order of their index tuples.
pub fn detect(tirp: &Tirp, entity: &EntityRecord, cfg: &MiningConfig) -> Vec<Vec<u32>> {
    let gaps = (cfg.sac != SacMode::None).then(|| GapIndex::new(entity));
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(tirp.size());
    search(tirp, entity, cfg, gaps.as_ref(), &mut chosen, &mut out);
    out
}

fn search(
    tirp: &Tirp,
    entity: &EntityRecord,
    cfg: &MiningConfig,
    gaps: Option<&GapIndex>,
    chosen: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    let pos = chosen.len();
    if pos == tirp.size() {
        out.push(chosen.clone());
        return;
    }
    let ivs = &entity.intervals;
    let from = chosen.last().map_or(0, |&l| l as usize + 1);
    let want = tirp.symbols[pos];
    'cand: for j in from..ivs.len() {
        let b = &ivs[j];
        if b.symbol != want {
            continue;
        }
        for (q, &iq) in chosen.iter().enumerate() {
            let a = &ivs[iq as usize];
            if classify_ordered(a, b, &cfg.relations) != Some(tirp.relation(q, pos)) {
                continue 'cand;
            }
            if let Some(g) = gaps {
                if cfg.sac.constrains(q, pos, a, b) && !g.adjacent(entity, iq as usize, j) {
                    continue 'cand;
                }
            }
        }
        chosen.push(j as u32);
        search(tirp, entity, cfg, gaps, chosen, out);
        chosen.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// 1 if the pattern occurs, else 0.
    Binary,
    /// Number of instances.
    HorizontalSupport,
    /// Mean instance span.
    MeanDuration,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Binary => "binary",
            Representation::HorizontalSupport => "hs",
            Representation::MeanDuration => "meand",
        }
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Representation::Binary),
            "hs" => Ok(Representation::HorizontalSupport),
            "meand" => Ok(Representation::MeanDuration),
            _ => Err(Error::InvalidArgument(format!(
                "unknown representation `{s}` (expected binary, hs or meand)"
            ))),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Entities by patterns, row-major. Absent patterns are 0 in every
/// representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub entity_ids: Vec<String>,
    pub labels: Vec<Option<String>>,
    pub columns: usize,
    pub cells: Vec<f64>,
    pub representation: Representation,
}

impl FeatureMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.columns + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.cells[row * self.columns..(row + 1) * self.columns]
    }

    pub fn rows(&self) -> usize {
        self.entity_ids.len()
    }
}

pub fn cell_value(rep: Representation, entity: &EntityRecord, instances: &[Vec<u32>]) -> f64 {
    if instances.is_empty() {
        return 0.0;
    }
    match rep {
        Representation::Binary => 1.0,
        Representation::HorizontalSupport => instances.len() as f64,
        Representation::MeanDuration => {
            let total: i64 = instances.iter().map(|i| instance_span(entity, i)).sum();
            total as f64 / instances.len() as f64
        }
    }
}

pub fn feature_matrix(
    tirps: &[Tirp],
    db: &IntervalDatabase,
    rep: Representation,
    cfg: &MiningConfig,
) -> FeatureMatrix {
    let rows = par::map_collect(db.entities(), |_, e| {
        tirps
            .iter()
            .map(|t| cell_value(rep, e, &detect(t, e, cfg)))
            .collect::<Vec<f64>>()
    });
    FeatureMatrix {
        entity_ids: db.entities().iter().map(|e| e.id.clone()).collect(),
        labels: db.entities().iter().map(|e| e.label.clone()).collect(),
        columns: tirps.len(),
        cells: rows.into_iter().flatten().collect(),
        representation: rep,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::karmalego::MinSupport;
    use crate::model::DatabaseBuilder;
    use crate::relations::Relation;

    fn cfg() -> MiningConfig {
        MiningConfig::new(MinSupport::new(1, 2).unwrap())
    }

    fn db() -> IntervalDatabase {
        DatabaseBuilder::new()
            // planted exact instance
            .interval("a", "M", "High", 0, 10)
            .interval("a", "H", "Low", 20, 30)
            // missing the second symbol
            .interval("b", "M", "High", 0, 10)
            // contradiction inside the gap
            .interval("c", "M", "High", 0, 10)
            .interval("c", "H", "High", 12, 15)
            .interval("c", "H", "Low", 20, 30)
            // two instances spanning 4 and 6
            .interval("d", "M", "High", 0, 2)
            .interval("d", "H", "Low", 3, 4)
            .interval("d", "M", "High", 10, 12)
            .interval("d", "H", "Low", 14, 16)
            .build()
            .unwrap()
    }

    fn pattern(db: &IntervalDatabase) -> Tirp {
        let t = db.symbols();
        Tirp::pair(
            t.symbol("M", "High").unwrap(),
            Relation::Before,
            t.symbol("H", "Low").unwrap(),
        )
    }

    #[test]
    fn detect_examples() {
        let db = db();
        let p = pattern(&db);
        assert_eq!(
            detect(&p, db.entity("a").unwrap(), &cfg()),
            vec![vec![0, 1]]
        );
        assert!(detect(&p, db.entity("b").unwrap(), &cfg()).is_empty());
        let c = db.entity("c").unwrap();
        assert_eq!(detect(&p, c, &cfg()).len(), 1);
        assert!(detect(&p, c, &cfg().with_sac(SacMode::Csac)).is_empty());
    }

    #[test]
    fn matrix_representations() {
        let db = db();
        let p = pattern(&db);
        let pats = [p];
        let hs = feature_matrix(&pats, &db, Representation::HorizontalSupport, &cfg());
        let bin = feature_matrix(&pats, &db, Representation::Binary, &cfg());
        let dur = feature_matrix(&pats, &db, Representation::MeanDuration, &cfg());
        let d = db.entities().iter().position(|e| e.id == "d").unwrap();
        // d: [0,2]<[3,4], [0,2]<[14,16], [10,12]<[14,16]
        assert_eq!(hs.get(d, 0), 3.0);
        assert_eq!(dur.get(d, 0), (4.0 + 16.0 + 6.0) / 3.0);
        let b = db.entities().iter().position(|e| e.id == "b").unwrap();
        assert_eq!(
            (bin.get(b, 0), hs.get(b, 0), dur.get(b, 0)),
            (0.0, 0.0, 0.0)
        );
        for r in 0..db.len() {
            assert_eq!(bin.get(r, 0), if hs.get(r, 0) > 0.0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn mean_duration_of_two_instances() {
        let db = DatabaseBuilder::new()
            .interval("e", "A", "x", 0, 1)
            .interval("e", "B", "x", 2, 4)
            .interval("e", "A", "x", 10, 11)
            .interval("e", "B", "x", 15, 16)
            .build()
            .unwrap();
        let t = db.symbols();
        let p = Tirp::pair(
            t.symbol("A", "x").unwrap(),
            Relation::Before,
            t.symbol("B", "x").unwrap(),
        );
        let cfg = MiningConfig::new(MinSupport::new(1, 1).unwrap()).with_relations(
            crate::relations::RelationConfig {
                max_gap: Some(5),
                ..Default::default()
            },
        );
        let e = &db.entities()[0];
        let inst = detect(&p, e, &cfg);
        assert_eq!(inst, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(cell_value(Representation::MeanDuration, e, &inst), 5.0);
        assert!("bogus".parse::<Representation>().is_err());
    }
}

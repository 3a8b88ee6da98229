//! State abstraction of raw time-stamped measurements into symbolic
//! intervals.

pub mod discretize;
pub mod interpolate;
pub mod kb;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DatabaseBuilder, IntervalDatabase, TimeStamp, ValidityWindow};

pub use discretize::{
    apply_cutoffs, ewd_cutoffs, sax_breakpoints, sax_symbols, td4c_kl_cutoffs, td4c_score,
    td4c_with_candidates, z_normalize, Td4cResult,
};
pub use interpolate::interpolate;
pub use kb::{kb_state, KbBin, KbConcept, KbContext, KnowledgeBase, ANY_CONTEXT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    Kb,
    Ewd,
    Sax,
    Td4cKl,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kb => "kb",
            Method::Ewd => "ewd",
            Method::Sax => "sax",
            Method::Td4cKl => "td4c-kl",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kb" => Ok(Method::Kb),
            "ewd" => Ok(Method::Ewd),
            "sax" => Ok(Method::Sax),
            "td4c-kl" | "td4c_kl" => Ok(Method::Td4cKl),
            _ => Err(Error::InvalidArgument(format!(
                "unknown abstraction method `{s}` (expected kb, ewd, sax or td4c-kl)"
            ))),
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.as_str().to_string()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPoint {
    pub entity_id: String,
    pub concept: String,
    pub timestamp: TimeStamp,
    pub value: f64,
}

/// A measurement after discretization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePoint {
    pub entity_id: String,
    pub concept: String,
    pub value: String,
    pub timestamp: TimeStamp,
}

/// One symbolic interval in named (text) form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub entity_id: String,
    pub concept: String,
    pub value: String,
    pub start: TimeStamp,
    pub end: TimeStamp,
}

/// Learned cutoffs of one concept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSet {
    pub concept: String,
    pub method: Method,
    pub cutoffs: Vec<f64>,
}

impl CutoffSet {
    pub fn bins(&self) -> usize {
        self.cutoffs.len() + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty()
            || self.cutoffs.iter().any(|c| !c.is_finite())
            || self.cutoffs.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Discretization(format!(
                "cutoffs of `{}` must be finite and strictly increasing",
                self.concept
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbstractionConfig {
    pub method: Method,
    pub bins: usize,
    /// Points averaged per SAX symbol.
    pub paa_window: usize,
    pub percentile_step: u32,
    /// Validity window for concepts the knowledge base does not cover.
    pub window: ValidityWindow,
}

impl Default for AbstractionConfig {
    fn default() -> Self {
        AbstractionConfig {
            method: Method::Kb,
            bins: 3,
            paa_window: 1,
            percentile_step: discretize::DEFAULT_PERCENTILE_STEP,
            window: ValidityWindow::symmetric(1),
        }
    }
}

impl AbstractionConfig {
    pub fn new(method: Method) -> Self {
        AbstractionConfig {
            method,
            ..Default::default()
        }
    }

    pub fn with_bins(mut self, bins: usize) -> Self {
        self.bins = bins;
        self
    }
}

/// Name of state `bin` out of `bins`, ordered low to high.
pub fn state_name(bin: usize, bins: usize) -> String {
    const THREE: [&str; 3] = ["Low", "Medium", "High"];
    const FIVE: [&str; 5] = ["Very_Low", "Low", "Medium", "High", "Very_High"];
    match bins {
        2 => ["Low", "High"][bin].to_string(),
        3 => THREE[bin].to_string(),
        5 => FIVE[bin].to_string(),
        _ => format!("S{bin}"),
    }
}

fn by_concept(points: &[RawPoint]) -> BTreeMap<&str, Vec<&RawPoint>> {
    let mut m: BTreeMap<&str, Vec<&RawPoint>> = BTreeMap::new();
    for p in points {
        m.entry(p.concept.as_str()).or_default().push(p);
    }
    m
}

/// Learns one cutoff set per concept. Knowledge-based abstraction learns
/// nothing; SAX records its fixed breakpoints. Supervised learning only sees
/// points of labelled entities.
pub fn learn_cutoffs(
    points: &[RawPoint],
    labels: &HashMap<String, String>,
    cfg: &AbstractionConfig,
) -> Result<Vec<CutoffSet>> {
    let mut out = Vec::new();
    for (concept, pts) in by_concept(points) {
        let cutoffs = match cfg.method {
            Method::Kb => continue,
            Method::Ewd => {
                let values: Vec<f64> = pts.iter().map(|p| p.value).collect();
                ewd_cutoffs(&values, cfg.bins)
            }
            Method::Sax => sax_breakpoints(cfg.bins),
            Method::Td4cKl => {
                let labeled: Vec<(f64, &str)> = pts
                    .iter()
                    .filter_map(|p| labels.get(&p.entity_id).map(|l| (p.value, l.as_str())))
                    .collect();
                td4c_kl_cutoffs(&labeled, cfg.bins, cfg.percentile_step).map(|r| r.cutoffs)
            }
        }
        .map_err(|e| Error::Discretization(format!("concept `{concept}`: {e}")))?;
        out.push(CutoffSet {
            concept: concept.to_string(),
            method: cfg.method,
            cutoffs,
        });
    }
    Ok(out)
}

/// Discretizes every point. `contexts` maps entity ids to a knowledge-base
/// context selector; entities without one use the `*` block.
pub fn assign_states(
    points: &[RawPoint],
    cfg: &AbstractionConfig,
    kb: Option<&KnowledgeBase>,
    contexts: &HashMap<String, String>,
    cutoffs: &[CutoffSet],
) -> Result<Vec<StatePoint>> {
    let mut out = Vec::with_capacity(points.len());
    match cfg.method {
        Method::Kb => {
            let kb = kb.ok_or_else(|| {
                Error::InvalidArgument("knowledge-based abstraction needs a knowledge base".into())
            })?;
            for p in points {
                let ctx = contexts
                    .get(&p.entity_id)
                    .map_or(ANY_CONTEXT, String::as_str);
                let value = kb_state(&p.concept, ctx, p.value, kb)?;
                out.push(StatePoint {
                    entity_id: p.entity_id.clone(),
                    concept: kb
                        .qualified_concept(&p.concept, ctx)
                        .expect("kb_state resolved the context"),
                    value: value.to_string(),
                    timestamp: p.timestamp,
                });
            }
        }
        Method::Ewd | Method::Td4cKl => {
            let sets: HashMap<&str, &CutoffSet> =
                cutoffs.iter().map(|c| (c.concept.as_str(), c)).collect();
            for p in points {
                let set = sets
                    .get(p.concept.as_str())
                    .ok_or_else(|| Error::UnknownConcept(p.concept.clone()))?;
                out.push(StatePoint {
                    entity_id: p.entity_id.clone(),
                    concept: p.concept.clone(),
                    value: state_name(apply_cutoffs(p.value, &set.cutoffs), set.bins()),
                    timestamp: p.timestamp,
                });
            }
        }
        Method::Sax => {
            let mut series: BTreeMap<(&str, &str), Vec<(TimeStamp, f64)>> = BTreeMap::new();
            for p in points {
                series
                    .entry((p.entity_id.as_str(), p.concept.as_str()))
                    .or_default()
                    .push((p.timestamp, p.value));
            }
            for ((entity, concept), mut s) in series {
                s.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
                for (t, bin) in sax_symbols(&s, cfg.bins, cfg.paa_window)? {
                    out.push(StatePoint {
                        entity_id: entity.to_string(),
                        concept: concept.to_string(),
                        value: state_name(bin, cfg.bins),
                        timestamp: t,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Validity window of a (possibly context-qualified) concept.
pub fn validity_for(
    concept: &str,
    kb: Option<&KnowledgeBase>,
    default: ValidityWindow,
) -> ValidityWindow {
    let base = concept.split('@').next().unwrap_or(concept);
    kb.and_then(|k| k.concept(base))
        .map_or(default, |c| c.validity)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Abstraction {
    pub rows: Vec<IntervalRow>,
    pub cutoffs: Vec<CutoffSet>,
}

/// Full abstraction pass. Pre-learned `cutoffs` (for instance from a
/// training fold) are applied as given; otherwise they are learned from
/// `points`.
pub fn abstract_points(
    points: &[RawPoint],
    cfg: &AbstractionConfig,
    kb: Option<&KnowledgeBase>,
    contexts: &HashMap<String, String>,
    labels: &HashMap<String, String>,
    cutoffs: Option<Vec<CutoffSet>>,
) -> Result<Abstraction> {
    if let Some(p) = points.iter().find(|p| !p.value.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite value for `{}` of entity `{}` at {}",
            p.concept, p.entity_id, p.timestamp
        )));
    }
    let cutoffs = match cutoffs {
        Some(c) => {
            c.iter().try_for_each(CutoffSet::validate)?;
            c
        }
        None => learn_cutoffs(points, labels, cfg)?,
    };
    let states = assign_states(points, cfg, kb, contexts, &cutoffs)?;
    let rows = interpolate(&states, |c| Some(validity_for(c, kb, cfg.window)))?;
    Ok(Abstraction { rows, cutoffs })
}

/// Interns named rows into a database. Labelled entities without rows are
/// kept, since they still count towards support.
pub fn rows_to_database(
    rows: &[IntervalRow],
    labels: &HashMap<String, String>,
) -> Result<IntervalDatabase> {
    let mut b = DatabaseBuilder::new();
    for r in rows {
        b.interval(&r.entity_id, &r.concept, &r.value, r.start, r.end);
    }
    for (e, l) in labels {
        b.label(e, l);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(entity: &str, concept: &str, t: TimeStamp, v: f64) -> RawPoint {
        RawPoint {
            entity_id: entity.into(),
            concept: concept.into(),
            timestamp: t,
            value: v,
        }
    }

    fn bundled(name: &str) -> KnowledgeBase {
        let path = format!("{}/../../data/kb/{name}", env!("CARGO_MANIFEST_DIR"));
        KnowledgeBase::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn kb_pipeline_qualifies_contexts() {
        let kb = bundled("diabetes.json");
        let pts = [
            raw("p1", "CREATININE", 0, 1.1),
            raw("p2", "CREATININE", 0, 1.1),
        ];
        let ctx: HashMap<String, String> =
            [("p1".into(), "Male".into()), ("p2".into(), "Female".into())].into();
        let a = abstract_points(
            &pts,
            &AbstractionConfig::default(),
            Some(&kb),
            &ctx,
            &HashMap::new(),
            None,
        )
        .unwrap();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(
            (
                a.rows[0].concept.as_str(),
                a.rows[0].value.as_str(),
                a.rows[0].start,
                a.rows[0].end
            ),
            ("CREATININE@Male", "Normal", -60, 60)
        );
        assert_eq!(a.rows[1].concept, "CREATININE@Female");
        assert_eq!(a.rows[1].value, "Moderately_High");
        assert!(a.cutoffs.is_empty());
    }

    #[test]
    fn ewd_pipeline_and_reuse() {
        let pts: Vec<RawPoint> = (0..10).map(|i| raw("e", "X", i * 10, i as f64)).collect();
        let cfg = AbstractionConfig::new(Method::Ewd);
        let a = abstract_points(&pts, &cfg, None, &HashMap::new(), &HashMap::new(), None).unwrap();
        assert_eq!(a.cutoffs[0].cutoffs, vec![3.0, 6.0]);
        let values: Vec<&str> = a.rows.iter().map(|r| r.value.as_str()).collect();
        assert_eq!(values.iter().filter(|v| **v == "Low").count(), 3);
        assert_eq!(values.iter().filter(|v| **v == "High").count(), 4);

        // applying held-out cutoffs skips learning
        let held = [raw("f", "X", 0, 100.0)];
        let b = abstract_points(
            &held,
            &cfg,
            None,
            &HashMap::new(),
            &HashMap::new(),
            Some(a.cutoffs),
        )
        .unwrap();
        assert_eq!(b.rows[0].value, "High");
        let unknown = [raw("f", "Y", 0, 1.0)];
        let err = abstract_points(
            &unknown,
            &cfg,
            None,
            &HashMap::new(),
            &HashMap::new(),
            Some(vec![]),
        );
        assert!(matches!(err, Err(Error::UnknownConcept(c)) if c == "Y"));
    }

    #[test]
    fn td4c_pipeline_needs_labels() {
        let mut pts = Vec::new();
        let mut labels = HashMap::new();
        for (i, e) in ["a", "b", "c", "d"].iter().enumerate() {
            labels.insert(e.to_string(), if i < 2 { "neg" } else { "pos" }.to_string());
            for t in 0..5 {
                pts.push(raw(e, "X", t * 5, (i * 10 + t as usize) as f64));
            }
        }
        let cfg = AbstractionConfig::new(Method::Td4cKl).with_bins(2);
        let a = abstract_points(&pts, &cfg, None, &HashMap::new(), &labels, None).unwrap();
        let c = a.cutoffs[0].cutoffs[0];
        assert!(c > 14.0 && c <= 20.0, "cutoff {c}");
        assert!(abstract_points(&pts, &cfg, None, &HashMap::new(), &HashMap::new(), None).is_err());
    }

    #[test]
    fn sax_pipeline_per_entity() {
        let pts = [
            raw("e", "X", 0, 0.0),
            raw("e", "X", 10, 0.0),
            raw("e", "X", 20, 100.0),
            raw("f", "X", 0, 5.0),
            raw("f", "X", 10, 5.0),
        ];
        let cfg = AbstractionConfig::new(Method::Sax);
        let a = abstract_points(&pts, &cfg, None, &HashMap::new(), &HashMap::new(), None).unwrap();
        let e: Vec<(&str, TimeStamp, TimeStamp)> = a
            .rows
            .iter()
            .filter(|r| r.entity_id == "e")
            .map(|r| (r.value.as_str(), r.start, r.end))
            .collect();
        assert_eq!(e, vec![("Low", -1, 1), ("Low", 9, 11), ("High", 19, 21)]);
        assert!(a
            .rows
            .iter()
            .filter(|r| r.entity_id == "f")
            .all(|r| r.value == "Medium"));
    }

    #[test]
    fn rejects_non_finite_values_and_missing_kb() {
        let pts = [raw("e", "X", 0, f64::NAN)];
        let cfg = AbstractionConfig::new(Method::Ewd);
        assert!(abstract_points(&pts, &cfg, None, &HashMap::new(), &HashMap::new(), None).is_err());
        let pts = [raw("e", "X", 0, 1.0)];
        let kb_cfg = AbstractionConfig::default();
        assert!(
            abstract_points(&pts, &kb_cfg, None, &HashMap::new(), &HashMap::new(), None).is_err()
        );
    }

    #[test]
    fn labelled_entities_without_rows_are_kept() {
        let rows = [IntervalRow {
            entity_id: "a".into(),
            concept: "X".into(),
            value: "Low".into(),
            start: 0,
            end: 1,
        }];
        let labels: HashMap<String, String> =
            [("a".into(), "1".into()), ("b".into(), "0".into())].into();
        let db = rows_to_database(&rows, &labels).unwrap();
        assert_eq!(db.len(), 2);
        assert!(db.entity("b").unwrap().intervals.is_empty());
        assert_eq!(state_name(4, 7), "S4");
    }
}

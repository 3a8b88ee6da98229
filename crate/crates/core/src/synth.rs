//! Seeded synthetic data: interval databases with planted patterns and
//! injected contradictions, and raw measurement series with a planted
//! class-discriminative episode.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abstraction::{state_name, RawPoint};
use crate::error::{Error, Result};
use crate::model::{DatabaseBuilder, IntervalDatabase, TimeStamp};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub entities: usize,
    pub concepts: usize,
    pub values_per_concept: usize,
    /// Number of distinct planted patterns.
    pub planted: usize,
    /// Intervals per planted pattern.
    pub pattern_size: usize,
    /// Probability that an entity carries a given planted pattern.
    pub plant_rate: f64,
    /// Random background intervals per entity.
    pub noise_intervals: usize,
    /// Fraction of planted before-gaps that receive an intruder of the
    /// semantic type of one of the gap's endpoints.
    pub contradiction_rate: f64,
    pub horizon: TimeStamp,
    pub max_duration: TimeStamp,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            entities: 40,
            concepts: 4,
            values_per_concept: 3,
            planted: 2,
            pattern_size: 3,
            plant_rate: 0.5,
            noise_intervals: 6,
            contradiction_rate: 0.0,
            horizon: 100,
            max_duration: 8,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.concepts == 0 || self.values_per_concept < 2 {
            return bad("need at least one concept and two values per concept");
        }
        if self.pattern_size < 2 {
            return bad("planted patterns need at least two intervals");
        }
        if !(0.0..=1.0).contains(&self.plant_rate)
            || !(0.0..=1.0).contains(&self.contradiction_rate)
        {
            return bad("rates must lie in [0, 1]");
        }
        if self.horizon < 1 || self.max_duration < 1 {
            return bad("horizon and max_duration must be positive");
        }
        Ok(())
    }
}

/// One interval of a planted template, relative to the instance start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateInterval {
    pub concept: String,
    pub value: String,
    pub start: TimeStamp,
    pub end: TimeStamp,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub db: IntervalDatabase,
    pub labels: HashMap<String, String>,
    pub templates: Vec<Vec<TemplateInterval>>,
    /// Intruders actually injected.
    pub contradictions: usize,
}

fn concept_name(c: usize) -> String {
    format!("C{c}")
}

fn entity_name(i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("E{i:0width$}")
}

fn template(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig) -> Vec<TemplateInterval> {
    let mut out: Vec<TemplateInterval> = Vec::with_capacity(cfg.pattern_size);
    let mut start = 0;
    for m in 0..cfg.pattern_size {
        let len = rng.gen_range(2..=cfg.max_duration.max(2));
        if m > 0 {
            let prev = &out[m - 1];
            start = match rng.gen_range(0..4) {
                // before, with room for an intruder
                0 | 1 => prev.end + rng.gen_range(3..=6),
                // meets
                2 => prev.end,
                // overlaps
                _ => prev.start + 1.max((prev.end - prev.start) / 2),
            };
        }
        let c = rng.gen_range(0..cfg.concepts);
        let v = rng.gen_range(0..cfg.values_per_concept);
        out.push(TemplateInterval {
            concept: concept_name(c),
            value: state_name(v, cfg.values_per_concept),
            start,
            end: start + len,
        });
    }
    out
}

/// Interval database with planted patterns. Entity labels are `1` for
/// carriers of the first planted pattern and `0` otherwise.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let templates: Vec<Vec<TemplateInterval>> =
        (0..cfg.planted).map(|_| template(&mut rng, cfg)).collect();
    let mut b = DatabaseBuilder::new();
    let mut labels = HashMap::new();
    let mut contradictions = 0;
    for i in 0..cfg.entities {
        let id = entity_name(i, cfg.entities);
        b.entity(&id);
        let mut carries_first = false;
        for (p, tpl) in templates.iter().enumerate() {
            if !rng.gen_bool(cfg.plant_rate) {
                continue;
            }
            carries_first |= p == 0;
            let span = tpl.iter().map(|t| t.end).max().unwrap_or(0);
            let shift = rng.gen_range(0..=(cfg.horizon - span).max(0));
            for t in tpl {
                b.interval(&id, &t.concept, &t.value, t.start + shift, t.end + shift);
            }
            for w in tpl.windows(2) {
                let (a, c) = (&w[0], &w[1]);
                if a.end >= c.start || !rng.gen_bool(cfg.contradiction_rate) {
                    continue;
                }
                let intruder = if rng.gen_bool(0.5) { a } else { c };
                let s = rng.gen_range(a.end..c.start);
                let e = rng.gen_range(s + 1..=c.start);
                let value = state_name(
                    rng.gen_range(0..cfg.values_per_concept),
                    cfg.values_per_concept,
                );
                b.interval(&id, &intruder.concept, &value, s + shift, e + shift);
                contradictions += 1;
            }
        }
        for _ in 0..cfg.noise_intervals {
            let s = rng.gen_range(0..cfg.horizon);
            let e = s + rng.gen_range(1..=cfg.max_duration);
            let c = concept_name(rng.gen_range(0..cfg.concepts));
            let v = state_name(
                rng.gen_range(0..cfg.values_per_concept),
                cfg.values_per_concept,
            );
            b.interval(&id, &c, &v, s, e);
        }
        let label = if carries_first { "1" } else { "0" };
        b.label(&id, label);
        labels.insert(id, label.to_string());
    }
    Ok(Generated {
        db: b.build()?,
        labels,
        templates,
        contradictions,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PointGeneratorConfig {
    pub entities: usize,
    pub concepts: usize,
    /// Mean days between measurements of one concept.
    pub sampling_interval: TimeStamp,
    pub horizon: TimeStamp,
    /// Fraction of entities in class `1`, which carry the planted episode.
    pub positive_rate: f64,
    pub seed: u64,
}

impl Default for PointGeneratorConfig {
    fn default() -> Self {
        PointGeneratorConfig {
            entities: 30,
            concepts: 3,
            sampling_interval: 4,
            horizon: 120,
            positive_rate: 0.5,
            seed: 0,
        }
    }
}

/// Raw measurements: a bounded random walk per entity and concept around
/// 10. Class `1` entities get an episode where `C0` runs high and, shortly
/// after, `C1` runs low.
pub fn generate_points(
    cfg: &PointGeneratorConfig,
) -> Result<(Vec<RawPoint>, HashMap<String, String>)> {
    if cfg.concepts < 2 || cfg.sampling_interval < 1 || cfg.horizon < 4 * cfg.sampling_interval {
        return Err(Error::InvalidArgument(
            "need two concepts and a horizon of at least four sampling intervals".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_pos = (cfg.entities as f64 * cfg.positive_rate).round() as usize;
    let mut classes: Vec<bool> = (0..cfg.entities).map(|i| i < n_pos).collect();
    classes.shuffle(&mut rng);
    let mut points = Vec::new();
    let mut labels = HashMap::new();
    for (i, &pos) in classes.iter().enumerate() {
        let id = entity_name(i, cfg.entities);
        let onset = rng.gen_range(cfg.horizon / 4..cfg.horizon / 2);
        for c in 0..cfg.concepts {
            let mut t = rng.gen_range(0..cfg.sampling_interval);
            let mut level: f64 = 10.0;
            while t < cfg.horizon {
                level = (level + rng.gen_range(-1.0..1.0)).clamp(7.0, 13.0);
                let mut v = level;
                if pos && c == 0 && (onset..onset + 20).contains(&t) {
                    v += 8.0;
                }
                if pos && c == 1 && (onset + 25..onset + 45).contains(&t) {
                    v -= 8.0;
                }
                points.push(RawPoint {
                    entity_id: id.clone(),
                    concept: concept_name(c),
                    timestamp: t,
                    value: (v * 100.0).round() / 100.0,
                });
                t += rng.gen_range(1..=2 * cfg.sampling_interval - 1);
            }
        }
        labels.insert(id, if pos { "1" } else { "0" }.to_string());
    }
    Ok((points, labels))
}

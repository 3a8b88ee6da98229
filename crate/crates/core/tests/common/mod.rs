//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tirpmine::karmalego::{EnumerationTree, Instances, SupportStats};
use tirpmine::oracle::brute_force_mine;
use tirpmine::sac::instance_satisfies;
use tirpmine::{
    DatabaseBuilder, IntervalDatabase, MinSupport, MiningConfig, RelationConfig, RelationMode,
    SacMode, Tirp,
};

pub const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
pub const VALUES: [&str; 3] = ["lo", "mid", "hi"];

/// Random database with at most 8 entities of at most 12 intervals over
/// 4 concepts × 3 values. Endpoints live on a small grid so that equal
/// starts and ends, meets and zero-length intervals all occur.
pub fn random_db(seed: u64) -> IntervalDatabase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_entities = rng.gen_range(1..=8);
    let concepts = rng.gen_range(1..=4);
    let values = rng.gen_range(1..=3);
    let mut b = DatabaseBuilder::new();
    for e in 0..n_entities {
        let id = format!("e{e}");
        b.entity(&id);
        for _ in 0..rng.gen_range(0..=12) {
            let s = rng.gen_range(0..20);
            let len = if rng.gen_bool(0.1) {
                0
            } else {
                rng.gen_range(1..8)
            };
            let c = CONCEPTS[rng.gen_range(0..concepts)];
            let v = VALUES[rng.gen_range(0..values)];
            b.interval(&id, c, v, s, s + len);
        }
    }
    b.build().expect("valid random database")
}

/// Tree nodes as (pattern, stats) pairs in canonical order.
pub fn flatten(tree: &EnumerationTree) -> Vec<(Tirp, SupportStats)> {
    tree.patterns()
        .into_iter()
        .map(|n| (n.tirp.clone(), n.stats.clone()))
        .collect()
}

/// First difference between two canonical pattern lists, if any.
pub fn first_difference(
    got: &[(Tirp, SupportStats)],
    want: &[(Tirp, SupportStats)],
) -> Option<String> {
    if got.len() != want.len() {
        let missing = want.iter().find(|w| !got.iter().any(|g| g.0 == w.0));
        let extra = got.iter().find(|g| !want.iter().any(|w| w.0 == g.0));
        return Some(format!(
            "{} patterns vs {} expected; missing {:?}; extra {:?}",
            got.len(),
            want.len(),
            missing.map(|m| &m.0),
            extra.map(|x| &x.0)
        ));
    }
    got.iter().zip(want).find_map(|(g, w)| {
        (g != w).then(|| format!("pattern {:?}: {:?} vs expected {:?}", w.0, g.1, w.1))
    })
}

/// Oracle output at the lowest possible threshold, so filtering can
/// re-threshold.
pub fn every_occurring_pattern(
    db: &IntervalDatabase,
    mode: RelationMode,
    k_max: usize,
) -> Vec<(Tirp, SupportStats)> {
    let cfg = MiningConfig::new(MinSupport::new(1, 1_000_000).unwrap())
        .with_relations(RelationConfig::new(mode))
        .with_sac(SacMode::None);
    brute_force_mine(db, &cfg, k_max).unwrap()
}

/// Post-filters unconstrained instances through the reference predicate of
/// `cfg.sac` and re-applies the threshold.
pub fn filter(
    db: &IntervalDatabase,
    all: &[(Tirp, SupportStats)],
    cfg: &MiningConfig,
) -> Vec<(Tirp, SupportStats)> {
    all.iter()
        .filter_map(|(t, st)| {
            let mut kept = Instances::new(t.size());
            for (e, idx) in st.instances.iter() {
                let ids: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
                if instance_satisfies(cfg.sac, &db.entities()[e as usize], &ids) {
                    kept.push(e, idx);
                }
            }
            let st = SupportStats::from_instances(kept, db.len());
            cfg.min_support
                .is_met(st.supporting, db.len())
                .then(|| (t.clone(), st))
        })
        .collect()
}

/// Standard normal quantile by Simpson integration of the density and
/// bisection on the resulting CDF.
pub fn normal_quantile(p: f64) -> f64 {
    fn cdf(x: f64) -> f64 {
        let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let n = 2000;
        let h = x / n as f64;
        let mut s = pdf(0.0) + pdf(x);
        for i in 1..n {
            s += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + s * h / 3.0
    }
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..100 {
        let mid = (lo + hi) / 2.0;
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

/// Summed symmetric KL divergence between classes, computed from scratch:
/// counts per state by direct comparison against each cutoff interval.
pub fn divergence(samples: &[(f64, usize)], classes: usize, cutoffs: &[f64]) -> f64 {
    let eps = 1e-9;
    let states = cutoffs.len() + 1;
    let state = |v: f64| {
        (0..states)
            .find(|&s| {
                let lo_ok = s == 0 || v >= cutoffs[s - 1];
                let hi_ok = s == states - 1 || v < cutoffs[s];
                lo_ok && hi_ok
            })
            .unwrap()
    };
    let mut p = vec![vec![0.0; states]; classes];
    let mut n = vec![0.0; classes];
    for &(v, c) in samples {
        p[c][state(v)] += 1.0;
        n[c] += 1.0;
    }
    for (row, &total) in p.iter_mut().zip(&n) {
        for cell in row.iter_mut() {
            let f = if total > 0.0 { *cell / total } else { 0.0 };
            *cell = (f + eps) / (1.0 + states as f64 * eps);
        }
    }
    let kl = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * (x / y).ln()).sum::<f64>();
    let mut total = 0.0;
    for a in 0..classes {
        for b in a + 1..classes {
            total += kl(&p[a], &p[b]) + kl(&p[b], &p[a]);
        }
    }
    total
}

/// Random labelled sample: 2–3 classes with shifted value ranges.
pub fn random_labeled(seed: u64) -> (Vec<(f64, usize)>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = rng.gen_range(2..=3);
    let n = rng.gen_range(20..80);
    let samples = (0..n)
        .map(|_| {
            let c = rng.gen_range(0..classes);
            let v = rng.gen_range(0.0..10.0) + c as f64 * rng.gen_range(0.0..4.0);
            ((v * 10.0f64).round() / 10.0, c)
        })
        .collect();
    (samples, classes)
}

//! The fast miner against the exhaustive oracle, plus structural properties
//! of its output.

mod common;

use common::{every_occurring_pattern, filter, first_difference, flatten, random_db};
use proptest::prelude::*;
use tirpmine::detect::detect;
use tirpmine::io::{tirp_records, write_tirp_file, TirpHeader};
use tirpmine::karmalego::{Instances, SupportStats};
use tirpmine::oracle::{brute_force_mine, MAX_PATTERN_SIZE};
use tirpmine::sac::instance_satisfies;
use tirpmine::{
    mine, IntervalDatabase, MinSupport, MiningConfig, RelationConfig, RelationMode, SacMode, Tirp,
};

const SUPPORTS: [(u64, u64); 3] = [(3, 10), (1, 2), (7, 10)];

fn config(min: (u64, u64), mode: RelationMode, sac: SacMode) -> MiningConfig {
    MiningConfig::new(MinSupport::new(min.0, min.1).unwrap())
        .with_relations(RelationConfig::new(mode))
        .with_sac(sac)
        .with_max_size(MAX_PATTERN_SIZE)
}

fn assert_matches_oracle(db: &IntervalDatabase, cfg: &MiningConfig, what: &str) {
    let got = flatten(&mine(db, cfg).unwrap());
    let want = brute_force_mine(db, cfg, MAX_PATTERN_SIZE).unwrap();
    if let Some(d) = first_difference(&got, &want) {
        panic!("{what}: {d}");
    }
}

#[test]
fn unconstrained_mining_equals_oracle() {
    for seed in 0..50 {
        let db = random_db(seed);
        for min in SUPPORTS {
            for mode in [RelationMode::Allen7, RelationMode::Abstract3] {
                let cfg = config(min, mode, SacMode::None);
                assert_matches_oracle(&db, &cfg, &format!("seed {seed} {min:?} {mode}"));
            }
        }
    }
}

#[test]
fn constrained_mining_equals_filtered_oracle() {
    for seed in 0..50 {
        let db = random_db(seed);
        for min in SUPPORTS {
            for mode in [RelationMode::Allen7, RelationMode::Abstract3] {
                let base = every_occurring_pattern(&db, mode, MAX_PATTERN_SIZE);
                for sac in [SacMode::Ssac, SacMode::Csac, SacMode::Lsac] {
                    let cfg = config(min, mode, sac);
                    let got = flatten(&mine(&db, &cfg).unwrap());
                    let want = filter(&db, &base, &cfg);
                    if let Some(d) = first_difference(&got, &want) {
                        panic!("seed {seed} {min:?} {mode} {sac}: {d}");
                    }
                }
            }
        }
    }
}

#[test]
fn tolerance_and_gap_bound_equal_oracle() {
    for seed in 100..130 {
        let db = random_db(seed);
        for (eps, gap) in [(1, None), (0, Some(3)), (2, Some(5))] {
            for sac in [SacMode::None, SacMode::Csac] {
                let cfg =
                    config((1, 2), RelationMode::Allen7, sac).with_relations(RelationConfig {
                        epsilon: eps,
                        max_gap: gap,
                        mode: RelationMode::Allen7,
                    });
                assert_matches_oracle(
                    &db,
                    &cfg,
                    &format!("seed {seed} eps {eps} gap {gap:?} {sac}"),
                );
            }
        }
    }
}

#[test]
fn frequent_sets_nest_across_modes() {
    for seed in 0..50 {
        let db = random_db(seed);
        for min in SUPPORTS {
            let run = |sac| flatten(&mine(&db, &config(min, RelationMode::Allen7, sac)).unwrap());
            let none = run(SacMode::None);
            let ssac = run(SacMode::Ssac);
            let csac = run(SacMode::Csac);
            let lsac = run(SacMode::Lsac);
            let support = |set: &[(Tirp, SupportStats)], t: &Tirp| {
                set.iter().find(|(u, _)| u == t).map(|(_, s)| s.supporting)
            };
            for (t, st) in &csac {
                let l = support(&lsac, t).expect("CSAC pattern missing under LSAC");
                assert!(st.supporting <= l);
            }
            for (t, st) in &lsac {
                let n = support(&none, t).expect("LSAC pattern missing under NONE");
                assert!(st.supporting <= n);
            }
            for (t, st) in &ssac {
                let n = support(&none, t).expect("SSAC pattern missing under NONE");
                assert!(st.supporting <= n);
            }
        }
    }
}

#[test]
fn detection_reproduces_mined_instances() {
    for seed in 0..30 {
        let db = random_db(seed);
        for sac in SacMode::ALL {
            let cfg = config((3, 10), RelationMode::Allen7, sac);
            let tree = mine(&db, &cfg).unwrap();
            for node in &tree.nodes {
                let mut found = Instances::new(node.tirp.size());
                for (e, entity) in db.entities().iter().enumerate() {
                    for inst in detect(&node.tirp, entity, &cfg) {
                        found.push(e as u32, &inst);
                    }
                }
                assert_eq!(found, node.stats.instances, "seed {seed} {sac}");
            }
        }
    }
}

#[test]
fn tree_is_prefix_closed_and_anti_monotone() {
    for seed in 0..30 {
        let db = random_db(seed);
        let cfg = config((3, 10), RelationMode::Allen7, SacMode::None);
        let tree = mine(&db, &cfg).unwrap();
        for (id, node) in tree.nodes.iter().enumerate() {
            assert!(cfg.min_support.is_met(node.stats.supporting, db.len()));
            assert!(node.tirp.is_consistent(), "{:?}", node.tirp);
            match node.parent {
                None => assert!(node.tirp.size() == 1 && tree.roots.contains(&id)),
                Some(p) => {
                    let parent = &tree.nodes[p];
                    if node.tirp.size() > 2 {
                        assert_eq!(parent.tirp, node.tirp.prefix());
                    } else {
                        assert_eq!(parent.tirp.symbols[0], node.tirp.symbols[0]);
                    }
                    assert!(node.stats.supporting <= parent.stats.supporting);
                    assert!(parent.children.contains(&id));
                }
            }
        }
    }
}

fn serialized(db: &IntervalDatabase, cfg: &MiningConfig) -> Vec<u8> {
    let tree = mine(db, cfg).unwrap();
    let header = TirpHeader {
        min_support: cfg.min_support,
        relations: cfg.relations,
        sac: cfg.sac,
        entities: db.len(),
        runtime_ms: 0,
    };
    let mut buf = Vec::new();
    write_tirp_file(&mut buf, &header, &tirp_records(&tree, db)).unwrap();
    buf
}

#[test]
fn output_is_independent_of_thread_count() {
    let pools: Vec<rayon::ThreadPool> = [1, 2, 8]
        .iter()
        .map(|&n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
        })
        .collect();
    for seed in 0..20 {
        let db = random_db(seed);
        for sac in SacMode::ALL {
            let cfg = config((3, 10), RelationMode::Allen7, sac);
            let outs: Vec<Vec<u8>> = pools
                .iter()
                .map(|p| p.install(|| serialized(&db, &cfg)))
                .collect();
            assert!(outs.windows(2).all(|w| w[0] == w[1]), "seed {seed} {sac}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mined_instances_satisfy_their_criterion(seed in 1000u64..100_000, sac_i in 0usize..4) {
        let db = random_db(seed);
        let sac = SacMode::ALL[sac_i];
        let tree = mine(&db, &config((1, 4), RelationMode::Allen7, sac)).unwrap();
        for node in &tree.nodes {
            for (e, idx) in node.stats.instances.iter() {
                let ids: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
                prop_assert!(instance_satisfies(sac, &db.entities()[e as usize], &ids));
            }
        }
    }
}

//! Abstraction pipeline against the bundled knowledge bases and against
//! test-side re-derivations of SAX and TD4C.

mod common;

use std::collections::HashMap;
use std::path::PathBuf;

use common::{divergence, normal_quantile};
use proptest::prelude::*;
use tirpmine::abstraction::discretize::{sax_symbols, td4c_kl_cutoffs, td4c_with_candidates};
use tirpmine::abstraction::kb::KnowledgeBase;
use tirpmine::abstraction::{
    abstract_points, rows_to_database, AbstractionConfig, IntervalRow, Method, RawPoint,
};

fn kb(name: &str) -> KnowledgeBase {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/kb")
        .join(name);
    KnowledgeBase::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn pt(entity: &str, concept: &str, t: i64, v: f64) -> RawPoint {
    RawPoint {
        entity_id: entity.into(),
        concept: concept.into(),
        timestamp: t,
        value: v,
    }
}

fn row(entity: &str, concept: &str, value: &str, start: i64, end: i64) -> IntervalRow {
    IntervalRow {
        entity_id: entity.into(),
        concept: concept.into(),
        value: value.into(),
        start,
        end,
    }
}

#[test]
fn oncology_points_become_merged_intervals() {
    let points = [
        pt("P1", "Hemoglobin", 10, 12.0),
        pt("P1", "Hemoglobin", 12, 13.5),
        pt("P1", "Platelet", 10, 400.0),
        pt("P1", "Platelet", 11, 80.0),
    ];
    let cfg = AbstractionConfig::new(Method::Kb);
    let none = HashMap::new();
    let abs = abstract_points(
        &points,
        &cfg,
        Some(&kb("oncology.json")),
        &none,
        &none,
        None,
    )
    .unwrap();
    assert_eq!(
        abs.rows,
        vec![
            row("P1", "Platelet", "High", 9, 10),
            row("P1", "Hemoglobin", "Normal", 9, 13),
            row("P1", "Platelet", "Moderately_Low", 10, 12),
        ]
    );
    let db = rows_to_database(&abs.rows, &none).unwrap();
    assert_eq!(db.len(), 1);
    assert_eq!(db.entities()[0].intervals.len(), 3);
}

#[test]
fn contexts_select_sex_specific_bins() {
    let points = [pt("M", "CREATININE", 0, 1.1), pt("F", "CREATININE", 0, 1.1)];
    let contexts: HashMap<String, String> = [("M", "Male"), ("F", "Female")]
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .into();
    let cfg = AbstractionConfig::new(Method::Kb);
    let abs = abstract_points(
        &points,
        &cfg,
        Some(&kb("diabetes.json")),
        &contexts,
        &HashMap::new(),
        None,
    )
    .unwrap();
    let states: Vec<(&str, &str, &str)> = abs
        .rows
        .iter()
        .map(|r| (r.entity_id.as_str(), r.concept.as_str(), r.value.as_str()))
        .collect();
    assert_eq!(
        states,
        vec![
            ("F", "CREATININE@Female", "Moderately_High"),
            ("M", "CREATININE@Male", "Normal")
        ]
    );
    // validity of the base concept applies to the qualified one
    assert_eq!((abs.rows[0].start, abs.rows[0].end), (-60, 60));
}

/// SAX re-derived: population z-score, then comparison with quadrature
/// breakpoints.
fn sax_oracle(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let breaks: Vec<f64> = (1..bins)
        .map(|i| normal_quantile(i as f64 / bins as f64))
        .collect();
    values
        .iter()
        .map(|v| {
            if sd < 1e-12 {
                return bins / 2;
            }
            let z = (v - mean) / sd;
            breaks.iter().filter(|&&b| b <= z).count()
        })
        .collect()
}

#[test]
fn sax_small_series() {
    let series = [(0, 0.0), (1, 0.0), (2, 100.0)];
    let got: Vec<usize> = sax_symbols(&series, 3, 1)
        .unwrap()
        .into_iter()
        .map(|p| p.1)
        .collect();
    assert_eq!(got, vec![0, 0, 2]);
    assert_eq!(got, sax_oracle(&[0.0, 0.0, 100.0], 3));
    let flat = sax_symbols(&[(0, 10.0), (5, 10.0), (9, 10.0)], 3, 1).unwrap();
    assert!(flat.iter().all(|p| p.1 == 1));
}

#[test]
fn td4c_separating_example() {
    let samples = [(1.0, 0), (1.0, 0), (4.0, 0), (6.0, 1), (9.0, 1), (9.0, 1)];
    let res = td4c_with_candidates(&samples, 2, &[2.0, 5.0, 8.0], 2).unwrap();
    assert_eq!(res.cutoffs, vec![5.0]);
    let best = [2.0, 5.0, 8.0]
        .into_iter()
        .max_by(|a, b| divergence(&samples, 2, &[*a]).total_cmp(&divergence(&samples, 2, &[*b])))
        .unwrap();
    assert_eq!(best, 5.0);
}

#[test]
fn td4c_ties_and_single_class() {
    let same = [
        (1.0, "a"),
        (2.0, "a"),
        (3.0, "a"),
        (1.0, "b"),
        (2.0, "b"),
        (3.0, "b"),
    ];
    let res = td4c_kl_cutoffs(&same, 2, 5).unwrap();
    assert_eq!(res.cutoffs, vec![1.0]);
    assert!(td4c_kl_cutoffs(&[(1.0, "a"), (2.0, "a")], 2, 5).is_err());
}

proptest! {
    #[test]
    fn sax_matches_oracle(values in prop::collection::vec(-50.0f64..50.0, 2..40), bins in 2usize..7) {
        let series: Vec<(i64, f64)> = values.iter().enumerate().map(|(i, v)| (i as i64, *v)).collect();
        let got: Vec<usize> = sax_symbols(&series, bins, 1).unwrap().into_iter().map(|p| p.1).collect();
        let want = sax_oracle(&values, bins);
        // values within quadrature error of a breakpoint may legitimately differ
        for (g, w) in got.iter().zip(&want) {
            prop_assert!(g.abs_diff(*w) <= 1);
        }
        prop_assert!(got.iter().zip(&want).filter(|(g, w)| g != w).count() <= 1);
    }
}

//! The demo's JSON endpoints, exercised natively.

use tirpmine_wasm::{discretize_json, Explorer};

const THREE_PATIENTS: &str = "entity_id,concept_id,value_id,start,end
1,Med,High,0,10
1,HGB,Low,40,50
2a,Med,High,0,10
2a,HGB,High,20,30
2a,HGB,Low,40,50
2b,Med,High,0,10
2b,Med,Low,20,30
2b,HGB,Low,40,50
";

#[test]
fn mining_reports_counts_for_every_mode() {
    let x = Explorer::from_csv(THREE_PATIENTS).unwrap();
    let v = x.mine_json("1/3", "allen7", "csac", 0).unwrap();
    let counts = &v["counts"];
    for m in ["none", "ssac", "csac", "lsac"] {
        assert!(counts[m].as_u64().is_some(), "{m}");
    }
    assert!(counts["csac"].as_u64() <= counts["none"].as_u64());
    let pair = v["patterns"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["symbols"][0] == "Med=High" && p["symbols"][1] == "HGB=Low")
        .expect("pattern mined under csac");
    assert_eq!(pair["relations"], "<");
    assert_eq!(pair["supporting"], 1);
}

#[test]
fn timeline_marks_blocked_instances() {
    let x = Explorer::from_csv(THREE_PATIENTS).unwrap();
    let v = x.timeline_json("2a", "Med=High,HGB=Low", "<").unwrap();
    assert_eq!(v["intervals"].as_array().unwrap().len(), 3);
    assert_eq!(x.intervals_json("2a").unwrap(), v["intervals"]);
    let inst = &v["instances"][0];
    assert_eq!(inst["verdicts"]["none"], true);
    assert_eq!(inst["verdicts"]["csac"], false);
    assert_eq!(inst["verdicts"]["lsac"], false);
    // HGB=High sits between the two at index 1
    assert_eq!(inst["blockers"], serde_json::json!([1]));
    assert!(x.timeline_json("2a", "Med=High,Nope=Low", "<").is_err());
    assert!(x.timeline_json("2a", "Med=High,HGB=Low", "<<").is_err());
}

#[test]
fn pair_classification_and_admissibility() {
    let x = Explorer::from_csv(THREE_PATIENTS).unwrap();
    let v = x.pair_json("2b", 2, 0, 0).unwrap();
    assert_eq!(
        (v["first"].as_u64(), v["second"].as_u64()),
        (Some(0), Some(2))
    );
    assert_eq!(v["allen7"], "<");
    assert_eq!(v["abstract3"], "B");
    assert_eq!(v["strict_gap"], true);
    assert_eq!(v["admissible"]["none"], true);
    assert_eq!(v["admissible"]["csac"], false);
    assert!(x.pair_json("2b", 0, 0, 0).is_err());
    assert!(x.pair_json("zz", 0, 1, 0).is_err());
}

#[test]
fn synthetic_round_trips_through_csv() {
    let x = Explorer::synthetic(3, 0.5).unwrap();
    let y = Explorer::from_csv(&x.to_csv()).unwrap();
    assert_eq!(x.summary_json(), y.summary_json());
    assert_eq!(x.summary_json()["entities"].as_array().unwrap().len(), 20);
}

#[test]
fn discretization_explorer() {
    let values: Vec<f64> = (0..10).map(f64::from).collect();
    let v = discretize_json(&values, &[], "ewd", 3).unwrap();
    assert_eq!(v["cutoffs"], serde_json::json!([3.0, 6.0]));
    assert_eq!(v["states"], serde_json::json!(["Low", "Medium", "High"]));
    assert_eq!(v["counts"]["all"], serde_json::json!([3, 3, 4]));

    let labels: Vec<String> = ["a", "a", "a", "b", "b", "b"].map(String::from).to_vec();
    let v = discretize_json(&[1.0, 1.0, 4.0, 6.0, 9.0, 9.0], &labels, "td4c-kl", 2).unwrap();
    assert_eq!(v["counts"]["a"], serde_json::json!([3, 0]));
    assert_eq!(v["counts"]["b"], serde_json::json!([0, 3]));

    let v = discretize_json(&[0.0, 0.0, 100.0], &[], "sax", 3).unwrap();
    assert_eq!(v["counts"]["all"], serde_json::json!([2, 0, 1]));
    assert!(discretize_json(&[1.0, 1.0], &[], "sax", 3).is_err());
    assert!(discretize_json(&[1.0, 2.0], &[], "kb", 3).is_err());
}

//! Turns state-labelled points into intervals through per-concept validity
//! windows.

use std::collections::BTreeMap;

use super::{IntervalRow, StatePoint};
use crate::error::{Error, Result};
use crate::model::{TimeStamp, ValidityWindow};
use crate::par;

/// Expands every point to `[t - before, t + after]`, merges same-value
/// intervals that overlap or meet, and on a conflict between values of one
/// concept truncates the earlier interval at the later start ("later
/// measurement wins"). Earlier intervals left without positive length are
/// dropped. Output is sorted by entity, then interval order.
pub fn interpolate<F>(points: &[StatePoint], window: F) -> Result<Vec<IntervalRow>>
where
    F: Fn(&str) -> Option<ValidityWindow> + Sync,
{
    let mut groups: BTreeMap<(&str, &str), Vec<(TimeStamp, &str)>> = BTreeMap::new();
    for p in points {
        groups
            .entry((p.entity_id.as_str(), p.concept.as_str()))
            .or_default()
            .push((p.timestamp, p.value.as_str()));
    }
    let mut windows = BTreeMap::new();
    for &(_, concept) in groups.keys() {
        if windows.contains_key(concept) {
            continue;
        }
        let w = window(concept).ok_or_else(|| Error::UnknownConcept(concept.to_string()))?;
        if w.before < 0 || w.after < 0 || w.before + w.after == 0 {
            return Err(Error::InvalidArgument(format!(
                "validity window of `{concept}` must be non-negative with positive width"
            )));
        }
        windows.insert(concept, w);
    }

    let groups: Vec<_> = groups.into_iter().collect();
    let per_group = par::map_collect(&groups, |_, ((entity, concept), pts)| {
        let mut pts = pts.clone();
        pts.sort_unstable();
        intervals_of(entity, concept, &pts, windows[concept])
    });
    let mut rows: Vec<IntervalRow> = per_group.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (
            a.entity_id.as_str(),
            a.start,
            a.end,
            a.concept.as_str(),
            a.value.as_str(),
        )
            .cmp(&(
                b.entity_id.as_str(),
                b.start,
                b.end,
                b.concept.as_str(),
                b.value.as_str(),
            ))
    });
    Ok(rows)
}

/// One entity's points of one concept, sorted by time then value.
fn intervals_of(
    entity: &str,
    concept: &str,
    points: &[(TimeStamp, &str)],
    w: ValidityWindow,
) -> Vec<IntervalRow> {
    let mut out: Vec<(TimeStamp, TimeStamp, &str)> = Vec::new();
    for &(t, value) in points {
        let (start, end) = (t - w.before, t + w.after);
        loop {
            match out.last_mut() {
                Some(last) if last.2 == value && start <= last.1 => {
                    last.1 = last.1.max(end);
                    break;
                }
                Some(last) if last.2 != value && start < last.1 => {
                    last.1 = start;
                    if last.1 <= last.0 {
                        log::warn!(
                            "{entity}: {concept}={} at [{},{}] dropped by a later value",
                            last.2,
                            last.0,
                            last.1
                        );
                        out.pop();
                        continue;
                    }
                }
                _ => {}
            }
            out.push((start, end, value));
            break;
        }
    }
    out.into_iter()
        .map(|(start, end, value)| IntervalRow {
            entity_id: entity.to_string(),
            concept: concept.to_string(),
            value: value.to_string(),
            start,
            end,
        })
        .collect()
}

use serde::{Deserialize, Serialize};

use crate::model::IntervalDatabase;

use super::instance_span;

/// Instances of one pattern, flattened: entity indices (into the database's
/// entity slice) alongside `width` interval indices per instance. Kept
/// sorted by entity, then indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instances {
    width: usize,
    entities: Vec<u32>,
    indices: Vec<u32>,
}

impl Instances {
    pub fn new(width: usize) -> Self {
        Instances {
            width,
            entities: Vec::new(),
            indices: Vec::new(),
        }
    }

    pub fn push(&mut self, entity: u32, indices: &[u32]) {
        debug_assert_eq!(indices.len(), self.width);
        self.entities.push(entity);
        self.indices.extend_from_slice(indices);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn get(&self, n: usize) -> (u32, &[u32]) {
        let w = self.width;
        (self.entities[n], &self.indices[n * w..(n + 1) * w])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u32])> + '_ {
        (0..self.len()).map(move |n| self.get(n))
    }

    /// Number of distinct entities, assuming entity-sorted storage.
    pub fn entity_count(&self) -> usize {
        let mut count = 0;
        let mut last = None;
        for &e in &self.entities {
            if last != Some(e) {
                count += 1;
                last = Some(e);
            }
        }
        count
    }

    /// Distinct supporting entity indices in ascending order.
    pub fn supporting_entities(&self) -> Vec<u32> {
        let mut v = self.entities.clone();
        v.dedup();
        v
    }

    pub fn for_entity(&self, entity: u32) -> impl Iterator<Item = &[u32]> + '_ {
        let lo = self.entities.partition_point(|&e| e < entity);
        let hi = self.entities.partition_point(|&e| e <= entity);
        (lo..hi).map(move |n| self.get(n).1)
    }

    pub fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.get(a).cmp(&self.get(b)));
        let mut out = Instances::new(self.width);
        for n in order {
            let (e, idx) = self.get(n);
            out.push(e, idx);
        }
        *self = out;
    }
}

/// Vertical support with exact counts plus every supporting instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportStats {
    pub supporting: usize,
    pub total: usize,
    pub instances: Instances,
}

impl SupportStats {
    pub fn from_instances(instances: Instances, total: usize) -> Self {
        SupportStats {
            supporting: instances.entity_count(),
            total,
            instances,
        }
    }

    pub fn vertical_support(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.supporting as f64 / self.total as f64
        }
    }

    /// Instances of the pattern in one entity.
    pub fn horizontal_support(&self, entity: u32) -> usize {
        self.instances.for_entity(entity).count()
    }

    /// Mean instance span in one entity; zero when it has no instance.
    pub fn mean_duration(&self, db: &IntervalDatabase, entity: u32) -> f64 {
        let (n, total) = self
            .instances
            .for_entity(entity)
            .fold((0usize, 0i64), |(n, t), idx| {
                let rec = &db.entities()[entity as usize];
                (n + 1, t + instance_span(rec, idx))
            });
        if n == 0 {
            0.0
        } else {
            total as f64 / n as f64
        }
    }

    /// Horizontal support averaged over supporting entities.
    pub fn mean_horizontal_support(&self) -> f64 {
        if self.supporting == 0 {
            0.0
        } else {
            self.instances.len() as f64 / self.supporting as f64
        }
    }

    /// Per-entity mean duration averaged over supporting entities.
    pub fn mean_of_mean_durations(&self, db: &IntervalDatabase) -> f64 {
        let ents = self.instances.supporting_entities();
        if ents.is_empty() {
            return 0.0;
        }
        ents.iter().map(|&e| self.mean_duration(db, e)).sum::<f64>() / ents.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DatabaseBuilder;

    #[test]
    fn horizontal_support_and_duration() {
        let db = DatabaseBuilder::new()
            .interval("e", "A", "x", 0, 3)
            .interval("e", "B", "x", 4, 5)
            .interval("e", "A", "x", 10, 12)
            .interval("e", "B", "x", 15, 17)
            .interval("f", "A", "x", 0, 10)
            .interval("f", "B", "x", 2, 4)
            .build()
            .unwrap();
        let mut inst = Instances::new(2);
        // spans 5 and 7
        inst.push(0, &[0, 1]);
        inst.push(0, &[2, 3]);
        // A[0,10] contains B[2,4]: span runs to the max end
        inst.push(1, &[0, 1]);
        let stats = SupportStats::from_instances(inst, 3);
        assert_eq!(stats.supporting, 2);
        assert_eq!(stats.horizontal_support(0), 2);
        assert_eq!(stats.mean_duration(&db, 0), 6.0);
        assert_eq!(stats.mean_duration(&db, 1), 10.0);
        assert_eq!(stats.horizontal_support(2), 0);
        assert_eq!(stats.mean_duration(&db, 2), 0.0);
        assert_eq!(stats.mean_horizontal_support(), 1.5);
        assert!((stats.vertical_support() - 2.0 / 3.0).abs() < 1e-12);
    }
}

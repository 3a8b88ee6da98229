//! Core temporal entities: symbols, symbolic intervals, entity records and
//! the interval database they live in.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time in integer base units fixed at ingestion (days, hours, ...).
pub type TimeStamp = i64;

/// Identifier of a (context- and abstraction-qualified) concept. Ids are
/// assigned in name order, so comparing ids compares names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConceptId(pub u32);

/// Identifier of a discrete value, interned across all concepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValueId(pub u32);

/// A concept/value pair holding over an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub concept: ConceptId,
    pub value: ValueId,
}

impl Symbol {
    pub fn new(concept: ConceptId, value: ValueId) -> Self {
        Symbol { concept, value }
    }

    /// Two symbols share a semantic type iff they assign values to the same
    /// concept.
    #[inline]
    pub fn sem_type(&self) -> ConceptId {
        self.concept
    }
}

/// `⟨start, end, symbol⟩`. Field order gives the lexicographic ordering when
/// deriving `Ord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolicInterval {
    pub start: TimeStamp,
    pub end: TimeStamp,
    pub symbol: Symbol,
}

impl SymbolicInterval {
    pub fn new(start: TimeStamp, end: TimeStamp, symbol: Symbol) -> Result<Self> {
        if start > end {
            return Err(Error::InvertedInterval { start, end });
        }
        Ok(SymbolicInterval { start, end, symbol })
    }

    pub fn duration(&self) -> TimeStamp {
        self.end - self.start
    }

    #[inline]
    pub fn sem_type(&self) -> ConceptId {
        self.symbol.concept
    }
}

/// Start, then end, then concept, then value.
pub fn lex_compare(a: &SymbolicInterval, b: &SymbolicInterval) -> Ordering {
    a.cmp(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub id: String,
    pub intervals: Vec<SymbolicInterval>,
    pub label: Option<String>,
}

impl EntityRecord {
    pub fn new(id: impl Into<String>, intervals: Vec<SymbolicInterval>) -> Self {
        EntityRecord {
            id: id.into(),
            intervals,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.intervals.windows(2).all(|w| w[0] < w[1])
            && self.intervals.iter().all(|iv| iv.start <= iv.end)
    }
}

/// Sorts intervals lexicographically and removes exact duplicates.
pub fn normalize_entity(mut record: EntityRecord) -> Result<EntityRecord> {
    if let Some(bad) = record.intervals.iter().find(|iv| iv.start > iv.end) {
        return Err(Error::InvertedInterval {
            start: bad.start,
            end: bad.end,
        });
    }
    record.intervals.sort_unstable();
    record.intervals.dedup();
    Ok(record)
}

/// Interpolation validity of a single measurement, in base time units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityWindow {
    pub before: TimeStamp,
    pub after: TimeStamp,
}

impl ValidityWindow {
    pub fn symmetric(width: TimeStamp) -> Self {
        ValidityWindow {
            before: width,
            after: width,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConceptMeta {
    pub name: String,
    pub values: BTreeSet<ValueId>,
    pub validity: Option<ValidityWindow>,
}

/// Concept registry plus interned value names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    concepts: Vec<ConceptMeta>,
    values: Vec<String>,
    concept_index: HashMap<String, ConceptId>,
    value_index: HashMap<String, ValueId>,
}

impl SymbolTable {
    /// Builds a table whose ids follow name order.
    pub fn from_names<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut by_concept: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        let mut all_values: BTreeSet<&str> = BTreeSet::new();
        for (c, v) in pairs {
            by_concept.entry(c).or_default().insert(v);
            all_values.insert(v);
        }
        let values: Vec<String> = all_values.iter().map(|v| v.to_string()).collect();
        let value_index: HashMap<String, ValueId> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), ValueId(i as u32)))
            .collect();
        let mut concepts = Vec::with_capacity(by_concept.len());
        let mut concept_index = HashMap::new();
        for (i, (name, vals)) in by_concept.into_iter().enumerate() {
            concept_index.insert(name.to_string(), ConceptId(i as u32));
            concepts.push(ConceptMeta {
                name: name.to_string(),
                values: vals.iter().map(|v| value_index[*v]).collect(),
                validity: None,
            });
        }
        SymbolTable {
            concepts,
            values,
            concept_index,
            value_index,
        }
    }

    pub fn concept_id(&self, name: &str) -> Option<ConceptId> {
        self.concept_index.get(name).copied()
    }

    pub fn value_id(&self, name: &str) -> Option<ValueId> {
        self.value_index.get(name).copied()
    }

    pub fn symbol(&self, concept: &str, value: &str) -> Option<Symbol> {
        let c = self.concept_id(concept)?;
        let v = self.value_id(value)?;
        if self.concepts[c.0 as usize].values.contains(&v) {
            Some(Symbol::new(c, v))
        } else {
            None
        }
    }

    pub fn concept(&self, id: ConceptId) -> &ConceptMeta {
        &self.concepts[id.0 as usize]
    }

    pub fn concepts(&self) -> impl Iterator<Item = (ConceptId, &ConceptMeta)> {
        self.concepts
            .iter()
            .enumerate()
            .map(|(i, m)| (ConceptId(i as u32), m))
    }

    pub fn concept_name(&self, id: ConceptId) -> &str {
        &self.concepts[id.0 as usize].name
    }

    pub fn value_name(&self, id: ValueId) -> &str {
        &self.values[id.0 as usize]
    }

    pub fn set_validity(&mut self, id: ConceptId, window: ValidityWindow) {
        self.concepts[id.0 as usize].validity = Some(window);
    }

    pub fn display(&self, sym: Symbol) -> SymbolDisplay<'_> {
        SymbolDisplay { table: self, sym }
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }
}

/// Renders a symbol as `concept=value`.
pub struct SymbolDisplay<'a> {
    table: &'a SymbolTable,
    sym: Symbol,
}

impl fmt::Display for SymbolDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}={}",
            self.table.concept_name(self.sym.concept),
            self.table.value_name(self.sym.value)
        )
    }
}

/// Splits `concept=value` at the last `=`.
pub fn split_symbol_text(text: &str) -> Option<(&str, &str)> {
    let pos = text.rfind('=')?;
    Some((&text[..pos], &text[pos + 1..]))
}

/// A set of entities sharing one symbol table. Immutable once built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalDatabase {
    entities: Vec<EntityRecord>,
    symbols: SymbolTable,
}

impl IntervalDatabase {
    /// Validates and normalizes every entity. Entity ids must be unique and
    /// every symbol must be registered.
    pub fn new(entities: Vec<EntityRecord>, symbols: SymbolTable) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(entities.len());
        for e in entities {
            if !seen.insert(e.id.clone()) {
                return Err(Error::DuplicateEntity(e.id));
            }
            for iv in &e.intervals {
                let c = iv.symbol.concept.0 as usize;
                if c >= symbols.concepts.len()
                    || !symbols.concepts[c].values.contains(&iv.symbol.value)
                {
                    return Err(Error::UnknownConcept(format!("{:?}", iv.symbol)));
                }
            }
            normalized.push(normalize_entity(e)?);
        }
        normalized.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(IntervalDatabase {
            entities: normalized,
            symbols,
        })
    }

    pub fn empty() -> Self {
        IntervalDatabase::default()
    }

    pub fn entities(&self) -> &[EntityRecord] {
        &self.entities
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entity(&self, id: &str) -> Option<&EntityRecord> {
        self.entities
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.entities[i])
    }

    /// Restricts the database to the given entity ids, keeping the table.
    pub fn subset(&self, keep: &BTreeSet<String>) -> IntervalDatabase {
        IntervalDatabase {
            entities: self
                .entities
                .iter()
                .filter(|e| keep.contains(&e.id))
                .cloned()
                .collect(),
            symbols: self.symbols.clone(),
        }
    }

    pub fn set_labels(&mut self, labels: &HashMap<String, String>) {
        for e in &mut self.entities {
            if let Some(l) = labels.get(&e.id) {
                e.label = Some(l.clone());
            }
        }
    }
}

/// Collects named rows and interns them into an [`IntervalDatabase`].
#[derive(Clone, Debug, Default)]
pub struct DatabaseBuilder {
    rows: BTreeMap<String, Vec<(String, String, TimeStamp, TimeStamp)>>,
    labels: HashMap<String, String>,
    validity: HashMap<String, ValidityWindow>,
    extra_symbols: BTreeSet<(String, String)>,
}

impl DatabaseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an entity that may end up without intervals.
    pub fn entity(&mut self, entity: &str) -> &mut Self {
        self.rows.entry(entity.to_string()).or_default();
        self
    }

    pub fn interval(
        &mut self,
        entity: &str,
        concept: &str,
        value: &str,
        start: TimeStamp,
        end: TimeStamp,
    ) -> &mut Self {
        self.rows.entry(entity.to_string()).or_default().push((
            concept.to_string(),
            value.to_string(),
            start,
            end,
        ));
        self
    }

    pub fn label(&mut self, entity: &str, label: &str) -> &mut Self {
        self.rows.entry(entity.to_string()).or_default();
        self.labels.insert(entity.to_string(), label.to_string());
        self
    }

    /// Registers a symbol that may not occur in any interval, e.g. one named
    /// by a pattern that is to be detected.
    pub fn symbol(&mut self, concept: &str, value: &str) -> &mut Self {
        self.extra_symbols
            .insert((concept.to_string(), value.to_string()));
        self
    }

    pub fn validity(&mut self, concept: &str, window: ValidityWindow) -> &mut Self {
        self.validity.insert(concept.to_string(), window);
        self
    }

    pub fn build(&self) -> Result<IntervalDatabase> {
        let mut table = SymbolTable::from_names(
            self.rows
                .values()
                .flatten()
                .map(|(c, v, _, _)| (c.as_str(), v.as_str()))
                .chain(
                    self.extra_symbols
                        .iter()
                        .map(|(c, v)| (c.as_str(), v.as_str())),
                ),
        );
        for (name, w) in &self.validity {
            if let Some(id) = table.concept_id(name) {
                table.set_validity(id, *w);
            }
        }
        let mut entities = Vec::with_capacity(self.rows.len());
        for (id, rows) in &self.rows {
            let mut intervals = Vec::with_capacity(rows.len());
            for (c, v, s, e) in rows {
                let sym = table.symbol(c, v).expect("interned above");
                intervals.push(SymbolicInterval::new(*s, *e, sym)?);
            }
            let mut rec = EntityRecord::new(id.clone(), intervals);
            rec.label = self.labels.get(id).cloned();
            entities.push(rec);
        }
        IntervalDatabase::new(entities, table)
    }
}

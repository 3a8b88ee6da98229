//! File formats: raw points, intervals, labels, contexts, cutoffs, pattern
//! files, instance dumps, feature matrices and fold maps.
//!
//! Readers take any `Read` plus a source name used in diagnostics, so the
//! same code parses files and in-memory text. Every parse error carries the
//! 1-based line number of the offending row.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::abstraction::{CutoffSet, IntervalRow, Method, RawPoint};
use crate::detect::FeatureMatrix;
use crate::error::{Error, Result};
use crate::folds::FoldAssignment;
use crate::karmalego::{EnumerationTree, MinSupport, Tirp};
use crate::model::{split_symbol_text, DatabaseBuilder, IntervalDatabase, SymbolTable, TimeStamp};
use crate::relations::{Relation, RelationConfig, RelationMode};
use crate::sac::SacMode;

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<File>> {
    File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(r)
}

/// Header-driven CSV access with column aliases.
struct Table<R: Read> {
    reader: csv::Reader<R>,
    source: String,
    columns: Vec<usize>,
}

impl<R: Read> Table<R> {
    /// `wanted` lists, per logical column, the accepted header names.
    fn new(r: R, source: &str, wanted: &[&[&str]]) -> Result<Self> {
        let mut reader = csv_reader(r);
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(source, 1, e.to_string()))?
            .clone();
        let lower: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        let mut columns = Vec::with_capacity(wanted.len());
        for names in wanted {
            let pos = lower
                .iter()
                .position(|h| names.contains(&h.as_str()))
                .ok_or_else(|| Error::parse(source, 1, format!("missing column `{}`", names[0])))?;
            columns.push(pos);
        }
        Ok(Table {
            reader,
            source: source.to_string(),
            columns,
        })
    }

    /// Calls `f` with the line number and the wanted fields of each row.
    fn for_each(&mut self, mut f: impl FnMut(u64, &[&str]) -> Result<()>) -> Result<()> {
        let mut rec = csv::StringRecord::new();
        loop {
            let more = self.reader.read_record(&mut rec).map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::parse(&self.source, line, e.to_string())
            })?;
            if !more {
                return Ok(());
            }
            let line = rec.position().map_or(0, |p| p.line());
            let fields = self
                .columns
                .iter()
                .map(|&c| rec.get(c))
                .collect::<Option<Vec<&str>>>()
                .ok_or_else(|| {
                    Error::parse(
                        &self.source,
                        line,
                        format!("too few fields ({})", rec.len()),
                    )
                })?;
            f(line, &fields)?;
        }
    }
}

fn parse_num<T: std::str::FromStr>(source: &str, line: u64, what: &str, text: &str) -> Result<T> {
    text.parse()
        .map_err(|_| Error::parse(source, line, format!("invalid {what} `{text}`")))
}

const ENTITY: &[&str] = &["entity_id", "entity", "id", "patient", "patient_id"];

/// Raw points: `entity_id,concept_id,timestamp,value`. Rows with an empty
/// value are skipped as missing measurements.
pub fn read_points<R: Read>(r: R, source: &str) -> Result<Vec<RawPoint>> {
    let mut t = Table::new(
        r,
        source,
        &[
            ENTITY,
            &["concept_id", "concept", "variable", "test"],
            &["timestamp", "time", "t", "day"],
            &["value", "val", "result"],
        ],
    )?;
    let mut out = Vec::new();
    t.for_each(|line, f| {
        if f[3].is_empty() {
            return Ok(());
        }
        let value: f64 = parse_num(source, line, "value", f[3])?;
        if !value.is_finite() {
            return Err(Error::parse(
                source,
                line,
                format!("non-finite value `{}`", f[3]),
            ));
        }
        if f[0].is_empty() || f[1].is_empty() {
            return Err(Error::parse(source, line, "empty entity or concept"));
        }
        out.push(RawPoint {
            entity_id: f[0].to_string(),
            concept: f[1].to_string(),
            timestamp: parse_num(source, line, "timestamp", f[2])?,
            value,
        });
        Ok(())
    })?;
    Ok(out)
}

/// Writes points in canonical order: entity, concept, timestamp, value.
pub fn write_points<W: Write>(w: W, points: &[RawPoint]) -> Result<()> {
    let mut sorted: Vec<&RawPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        (a.entity_id.as_str(), a.concept.as_str(), a.timestamp)
            .cmp(&(b.entity_id.as_str(), b.concept.as_str(), b.timestamp))
            .then(a.value.total_cmp(&b.value))
    });
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["entity_id", "concept_id", "timestamp", "value"])
        .map_err(csv_write)?;
    for p in sorted {
        out.write_record([
            p.entity_id.as_str(),
            p.concept.as_str(),
            &p.timestamp.to_string(),
            &p.value.to_string(),
        ])
        .map_err(csv_write)?;
    }
    out.flush().map_err(write_err)
}

fn csv_write(e: csv::Error) -> Error {
    Error::io("<output>", std::io::Error::other(e.to_string()))
}

/// Intervals: `entity_id,concept_id,value_id,start,end`.
pub fn read_interval_rows<R: Read>(r: R, source: &str) -> Result<Vec<IntervalRow>> {
    let mut t = Table::new(
        r,
        source,
        &[
            ENTITY,
            &["concept_id", "concept"],
            &["value_id", "value", "state"],
            &["start"],
            &["end"],
        ],
    )?;
    let mut out = Vec::new();
    t.for_each(|line, f| {
        let start: TimeStamp = parse_num(source, line, "start", f[3])?;
        let end: TimeStamp = parse_num(source, line, "end", f[4])?;
        if start > end {
            return Err(Error::parse(
                source,
                line,
                format!("start {start} after end {end}"),
            ));
        }
        if f[0].is_empty() || f[1].is_empty() || f[2].is_empty() {
            return Err(Error::parse(source, line, "empty entity, concept or value"));
        }
        out.push(IntervalRow {
            entity_id: f[0].to_string(),
            concept: f[1].to_string(),
            value: f[2].to_string(),
            start,
            end,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_interval_rows<W: Write>(w: W, rows: &[IntervalRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["entity_id", "concept_id", "value_id", "start", "end"])
        .map_err(csv_write)?;
    for r in rows {
        out.write_record([
            r.entity_id.as_str(),
            r.concept.as_str(),
            r.value.as_str(),
            &r.start.to_string(),
            &r.end.to_string(),
        ])
        .map_err(csv_write)?;
    }
    out.flush().map_err(write_err)
}

/// Named rows of a database, in entity then interval order.
pub fn database_rows(db: &IntervalDatabase) -> Vec<IntervalRow> {
    let t = db.symbols();
    db.entities()
        .iter()
        .flat_map(|e| {
            e.intervals.iter().map(move |iv| IntervalRow {
                entity_id: e.id.clone(),
                concept: t.concept_name(iv.symbol.concept).to_string(),
                value: t.value_name(iv.symbol.value).to_string(),
                start: iv.start,
                end: iv.end,
            })
        })
        .collect()
}

/// Two-column map such as labels (`entity_id,label`) or contexts
/// (`entity_id,context`).
pub fn read_entity_map<R: Read>(
    r: R,
    source: &str,
    value_column: &[&str],
) -> Result<HashMap<String, String>> {
    let mut t = Table::new(r, source, &[ENTITY, value_column])?;
    let mut out = HashMap::new();
    t.for_each(|line, f| {
        if f[0].is_empty() {
            return Err(Error::parse(source, line, "empty entity id"));
        }
        if f[1].is_empty() {
            return Ok(());
        }
        if let Some(prev) = out.insert(f[0].to_string(), f[1].to_string()) {
            if prev != f[1] {
                return Err(Error::parse(
                    source,
                    line,
                    format!("entity `{}` listed twice with different values", f[0]),
                ));
            }
        }
        Ok(())
    })?;
    Ok(out)
}

pub const LABEL_COLUMN: &[&str] = &["label", "class", "outcome"];
pub const CONTEXT_COLUMN: &[&str] = &["context", "selector", "gender", "sex"];

pub fn read_labels<R: Read>(r: R, source: &str) -> Result<HashMap<String, String>> {
    read_entity_map(r, source, LABEL_COLUMN)
}

pub fn read_contexts<R: Read>(r: R, source: &str) -> Result<HashMap<String, String>> {
    read_entity_map(r, source, CONTEXT_COLUMN)
}

/// Labels CSV `entity_id,label`, sorted by entity.
pub fn write_labels<W: Write>(w: W, labels: &HashMap<String, String>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["entity_id", "label"])
        .map_err(csv_write)?;
    let sorted: BTreeMap<&String, &String> = labels.iter().collect();
    for (id, label) in sorted {
        out.write_record([id, label]).map_err(csv_write)?;
    }
    out.flush().map_err(write_err)
}

/// Interns rows into a database. Labelled entities without rows are kept,
/// and `extra` symbols are registered even if no interval uses them.
pub fn build_database<'a>(
    rows: &[IntervalRow],
    labels: &HashMap<String, String>,
    extra: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<IntervalDatabase> {
    let mut b = DatabaseBuilder::new();
    for r in rows {
        b.interval(&r.entity_id, &r.concept, &r.value, r.start, r.end);
    }
    for (e, l) in labels {
        b.label(e, l);
    }
    for (c, v) in extra {
        b.symbol(c, v);
    }
    b.build()
}

/// Cutoffs: `concept_id,method,cutoff_index,cutoff_value`.
pub fn read_cutoffs<R: Read>(r: R, source: &str) -> Result<Vec<CutoffSet>> {
    let mut t = Table::new(
        r,
        source,
        &[
            &["concept_id", "concept"],
            &["method"],
            &["cutoff_index"],
            &["cutoff_value"],
        ],
    )?;
    let mut sets: BTreeMap<String, (Method, BTreeMap<usize, f64>)> = BTreeMap::new();
    t.for_each(|line, f| {
        let method: Method = f[1]
            .parse()
            .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
        let idx: usize = parse_num(source, line, "cutoff index", f[2])?;
        let v: f64 = parse_num(source, line, "cutoff value", f[3])?;
        let entry = sets
            .entry(f[0].to_string())
            .or_insert((method, BTreeMap::new()));
        if entry.0 != method {
            return Err(Error::parse(
                source,
                line,
                format!("mixed methods for `{}`", f[0]),
            ));
        }
        if entry.1.insert(idx, v).is_some() {
            return Err(Error::parse(
                source,
                line,
                format!("duplicate cutoff index {idx}"),
            ));
        }
        Ok(())
    })?;
    sets.into_iter()
        .map(|(concept, (method, cuts))| {
            if cuts.keys().copied().ne(0..cuts.len()) {
                return Err(Error::Discretization(format!(
                    "cutoff indices of `{concept}` are not 0..{}",
                    cuts.len()
                )));
            }
            let set = CutoffSet {
                concept,
                method,
                cutoffs: cuts.into_values().collect(),
            };
            set.validate()?;
            Ok(set)
        })
        .collect()
}

pub fn write_cutoffs<W: Write>(w: W, sets: &[CutoffSet]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["concept_id", "method", "cutoff_index", "cutoff_value"])
        .map_err(csv_write)?;
    for s in sets {
        for (i, c) in s.cutoffs.iter().enumerate() {
            out.write_record([
                s.concept.as_str(),
                s.method.as_str(),
                &i.to_string(),
                &c.to_string(),
            ])
            .map_err(csv_write)?;
        }
    }
    out.flush().map_err(write_err)
}

/// Run parameters recorded at the top of a pattern file.
#[derive(Clone, Debug, PartialEq)]
pub struct TirpHeader {
    pub min_support: MinSupport,
    pub relations: RelationConfig,
    pub sac: SacMode,
    pub entities: usize,
    pub runtime_ms: u128,
}

/// One line of a pattern file, with symbols in `concept=value` text form.
#[derive(Clone, Debug, PartialEq)]
pub struct TirpRecord {
    pub symbols: Vec<String>,
    pub relations: Vec<Relation>,
    pub supporting: usize,
    pub total: usize,
    pub mean_hor_sup: f64,
    pub mean_duration: f64,
}

impl TirpRecord {
    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn relation_codes(&self) -> String {
        self.relations.iter().map(|r| r.code()).collect()
    }

    /// Resolves the symbols against `table`; `None` if one is unknown there.
    pub fn to_tirp(&self, table: &SymbolTable) -> Option<Tirp> {
        let symbols = self
            .symbols
            .iter()
            .map(|s| split_symbol_text(s).and_then(|(c, v)| table.symbol(c, v)))
            .collect::<Option<Vec<_>>>()?;
        Some(Tirp {
            symbols,
            relations: self.relations.clone(),
        })
    }

    /// Concept/value pairs named by the record.
    pub fn symbol_names(&self) -> impl Iterator<Item = (&str, &str)> {
        self.symbols.iter().filter_map(|s| split_symbol_text(s))
    }
}

/// Pattern records of a mined tree in canonical order.
pub fn tirp_records(tree: &EnumerationTree, db: &IntervalDatabase) -> Vec<TirpRecord> {
    let t = db.symbols();
    tree.patterns()
        .into_iter()
        .map(|n| TirpRecord {
            symbols: n
                .tirp
                .symbols
                .iter()
                .map(|s| t.display(*s).to_string())
                .collect(),
            relations: n.tirp.relations.clone(),
            supporting: n.stats.supporting,
            total: n.stats.total,
            mean_hor_sup: n.stats.mean_horizontal_support(),
            mean_duration: n.stats.mean_of_mean_durations(db),
        })
        .collect()
}

pub fn write_tirp_file<W: Write>(
    mut w: W,
    header: &TirpHeader,
    records: &[TirpRecord],
) -> Result<()> {
    writeln!(
        w,
        "# min_vs={}, relations={}, sac={}, entities={}, runtime_ms={}",
        header.min_support, header.relations.mode, header.sac, header.entities, header.runtime_ms
    )
    .map_err(write_err)?;
    writeln!(
        w,
        "# epsilon={}, max_gap={}",
        header.relations.epsilon,
        header
            .relations
            .max_gap
            .map_or_else(|| "none".to_string(), |g| g.to_string())
    )
    .map_err(write_err)?;
    for r in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}/{}\t{:.6}\t{:.6}",
            r.size(),
            r.symbols.join(","),
            r.relation_codes(),
            r.supporting,
            r.total,
            r.mean_hor_sup,
            r.mean_duration
        )
        .map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

fn parse_header_fields(
    text: &str,
    source: &str,
    line: u64,
    header: &mut Option<TirpHeader>,
) -> Result<()> {
    let h = header.get_or_insert_with(|| TirpHeader {
        min_support: MinSupport::new(1, 1).expect("valid"),
        relations: RelationConfig::default(),
        sac: SacMode::None,
        entities: 0,
        runtime_ms: 0,
    });
    for field in text.split(',') {
        let Some((k, v)) = field.split_once('=') else {
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        let bad = |e: Error| Error::parse(source, line, e.to_string());
        match k {
            "min_vs" => h.min_support = v.parse().map_err(bad)?,
            "relations" => h.relations.mode = v.parse::<RelationMode>().map_err(bad)?,
            "sac" => h.sac = v.parse().map_err(bad)?,
            "entities" => h.entities = parse_num(source, line, "entity count", v)?,
            "runtime_ms" => h.runtime_ms = parse_num(source, line, "runtime", v)?,
            "epsilon" => h.relations.epsilon = parse_num(source, line, "epsilon", v)?,
            "max_gap" => {
                h.relations.max_gap = match v {
                    "none" => None,
                    _ => Some(parse_num(source, line, "max_gap", v)?),
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Parses a pattern file. Records are numbered from 1 in file order; comment
/// lines do not count.
pub fn read_tirp_file<R: Read>(
    r: R,
    source: &str,
) -> Result<(Option<TirpHeader>, Vec<TirpRecord>)> {
    let mut header = None;
    let mut records = Vec::new();
    for (n, line) in BufReader::new(r).lines().enumerate() {
        let line_no = n as u64 + 1;
        let line = line.map_err(|e| Error::io(source, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            parse_header_fields(rest, source, line_no, &mut header)?;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(Error::parse(
                source,
                line_no,
                format!("expected 6 tab-separated fields, found {}", cols.len()),
            ));
        }
        let k: usize = parse_num(source, line_no, "size", cols[0])?;
        let symbols: Vec<String> = cols[1].split(',').map(str::to_string).collect();
        if k == 0 || symbols.len() != k || symbols.iter().any(|s| split_symbol_text(s).is_none()) {
            return Err(Error::parse(
                source,
                line_no,
                "symbol list does not match size",
            ));
        }
        let relations = cols[2]
            .chars()
            .map(Relation::from_code)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                Error::parse(source, line_no, format!("bad relation codes `{}`", cols[2]))
            })?;
        if relations.len() != k * (k - 1) / 2 {
            return Err(Error::parse(
                source,
                line_no,
                "relation count does not match size",
            ));
        }
        let (num, den) = cols[3]
            .split_once('/')
            .ok_or_else(|| Error::parse(source, line_no, "support must be `num/den`"))?;
        records.push(TirpRecord {
            symbols,
            relations,
            supporting: parse_num(source, line_no, "support numerator", num)?,
            total: parse_num(source, line_no, "support denominator", den)?,
            mean_hor_sup: parse_num(source, line_no, "mean horizontal support", cols[4])?,
            mean_duration: parse_num(source, line_no, "mean duration", cols[5])?,
        });
    }
    Ok((header, records))
}

/// Instance dump: `entity_id TAB record_no TAB idx,…` with record numbers
/// starting at 1.
pub fn write_instances<W: Write>(
    mut w: W,
    rows: impl IntoIterator<Item = (String, usize, Vec<u32>)>,
) -> Result<()> {
    for (entity, record, idx) in rows {
        let idx: Vec<String> = idx.iter().map(u32::to_string).collect();
        writeln!(w, "{entity}\t{record}\t{}", idx.join(",")).map_err(write_err)?;
    }
    w.flush().map_err(write_err)
}

/// Feature matrix CSV: a `# source=` line, then `entity_id,label,T1,…`.
pub fn write_feature_csv<W: Write>(mut w: W, m: &FeatureMatrix, source: &str) -> Result<()> {
    writeln!(w, "# source={source}").map_err(write_err)?;
    writeln!(w, "# representation={}", m.representation).map_err(write_err)?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["entity_id".to_string(), "label".to_string()];
    header.extend((1..=m.columns).map(|i| format!("T{i}")));
    out.write_record(&header).map_err(csv_write)?;
    for r in 0..m.rows() {
        let mut row = vec![
            m.entity_ids[r].clone(),
            m.labels[r].clone().unwrap_or_default(),
        ];
        row.extend(m.row(r).iter().map(|v| v.to_string()));
        out.write_record(&row).map_err(csv_write)?;
    }
    out.flush().map_err(write_err)
}

/// Fold map CSV: `entity_id,label,mining_fold,cv_fold`.
pub fn write_folds<W: Write>(
    w: W,
    folds: &BTreeMap<String, FoldAssignment>,
    labels: &HashMap<String, String>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["entity_id", "label", "mining_fold", "cv_fold"])
        .map_err(csv_write)?;
    for (id, f) in folds {
        out.write_record([
            id.as_str(),
            labels.get(id).map_or("", String::as_str),
            &f.mining_fold.to_string(),
            &f.cv_fold.to_string(),
        ])
        .map_err(csv_write)?;
    }
    out.flush().map_err(write_err)
}

pub fn read_folds<R: Read>(r: R, source: &str) -> Result<BTreeMap<String, FoldAssignment>> {
    let mut t = Table::new(r, source, &[ENTITY, &["mining_fold"], &["cv_fold"]])?;
    let mut out = BTreeMap::new();
    t.for_each(|line, f| {
        let a = FoldAssignment {
            mining_fold: parse_num(source, line, "mining fold", f[1])?,
            cv_fold: parse_num(source, line, "cv fold", f[2])?,
        };
        if out.insert(f[0].to_string(), a).is_some() {
            return Err(Error::parse(
                source,
                line,
                format!("entity `{}` listed twice", f[0]),
            ));
        }
        Ok(())
    })?;
    Ok(out)
}

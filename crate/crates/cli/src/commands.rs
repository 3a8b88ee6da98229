use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use tirpmine::abstraction::kb::KnowledgeBase;
use tirpmine::abstraction::{abstract_points, learn_cutoffs, AbstractionConfig, Method, RawPoint};
use tirpmine::bench::{run_grid, write_bench_csv, BenchGrid};
use tirpmine::detect::{detect, feature_matrix, Representation};
use tirpmine::folds::{assign_folds_for, FoldSpec};
use tirpmine::io::{
    build_database, create, database_rows, open, read_contexts, read_cutoffs, read_folds,
    read_interval_rows, read_labels, read_points, read_tirp_file, tirp_records, write_cutoffs,
    write_feature_csv, write_folds, write_instances, write_interval_rows, write_labels,
    write_points, write_tirp_file, TirpHeader, TirpRecord,
};
use tirpmine::model::split_symbol_text;
use tirpmine::synth::{generate, generate_points, GeneratorConfig, PointGeneratorConfig};
use tirpmine::{mine, IntervalDatabase, MinSupport, MiningConfig, RelationConfig, ValidityWindow};

use crate::config::{need, pick, RunConfig};
use crate::{
    AbstractArgs, BenchArgs, Cli, CliError, Command, DetectArgs, FeaturesArgs, FoldsArgs, GenArgs,
    GenKind, IngestArgs, MineArgs, MiningFlags,
};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = pick(cli.threads, cfg.threads) {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Ingest(a) => ingest(a, cfg),
        Command::Abstract(a) => abstract_cmd(a, cfg),
        Command::Mine(a) => mine_cmd(a, cfg),
        Command::Detect(a) => detect_cmd(a, cfg),
        Command::Features(a) => features(a, cfg),
        Command::Folds(a) => folds(a, cfg),
        Command::Bench(a) => bench(a, cfg),
        Command::Gen(a) => gen(a, cfg),
    }
}

fn name(p: &Path) -> String {
    p.display().to_string()
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn points_from(path: &Path) -> Result<Vec<RawPoint>> {
    Ok(read_points(open(path)?, &name(path))?)
}

fn labels_from(path: Option<&Path>) -> Result<HashMap<String, String>> {
    match path {
        Some(p) => Ok(read_labels(open(p)?, &name(p))?),
        None => Ok(HashMap::new()),
    }
}

fn contexts_from(path: Option<&Path>) -> Result<HashMap<String, String>> {
    match path {
        Some(p) => Ok(read_contexts(open(p)?, &name(p))?),
        None => Ok(HashMap::new()),
    }
}

fn kb_from(path: Option<&Path>) -> Result<Option<KnowledgeBase>> {
    let Some(p) = path else { return Ok(None) };
    let text = std::fs::read_to_string(p).map_err(|e| tirpmine::Error::io(name(p), e))?;
    Ok(Some(KnowledgeBase::from_json(&text)?))
}

/// Entities of the fold map outside mining fold `holdout`.
fn training_entities(
    folds: Option<&Path>,
    holdout: Option<usize>,
) -> Result<Option<BTreeSet<String>>> {
    match (folds, holdout) {
        (None, None) => Ok(None),
        (Some(p), Some(k)) => {
            let map = read_folds(open(p)?, &name(p))?;
            if !map.values().any(|f| f.mining_fold == k) {
                return Err(CliError::Usage(format!(
                    "mining fold {k} does not occur in {}",
                    name(p)
                )));
            }
            Ok(Some(
                map.into_iter()
                    .filter(|(_, f)| f.mining_fold != k)
                    .map(|(id, _)| id)
                    .collect(),
            ))
        }
        _ => Err(CliError::Usage("--folds and --holdout go together".into())),
    }
}

fn ingest(a: IngestArgs, cfg: RunConfig) -> Result<()> {
    let raw = need(a.raw, cfg.raw, "raw")?;
    let points = points_from(&raw)?;
    let entities: BTreeSet<&str> = points.iter().map(|p| p.entity_id.as_str()).collect();
    log::info!("{} points over {} entities", points.len(), entities.len());
    write_points(output(pick(a.output, cfg.output).as_deref())?, &points)?;
    Ok(())
}

struct AbstractionSetup {
    cfg: AbstractionConfig,
    kb: Option<KnowledgeBase>,
    contexts: HashMap<String, String>,
}

fn abstraction_setup(
    method: Option<Method>,
    bins: Option<usize>,
    kb: Option<PathBuf>,
    contexts: Option<PathBuf>,
    paa_window: Option<usize>,
    percentile_step: Option<u32>,
    window: Option<i64>,
) -> Result<AbstractionSetup> {
    let kb = kb_from(kb.as_deref())?;
    let method = match (method, &kb) {
        (Some(m), _) => m,
        (None, Some(_)) => Method::Kb,
        (None, None) => return Err(CliError::Usage("missing --method".into())),
    };
    let mut cfg = AbstractionConfig::new(method);
    if let Some(b) = bins {
        cfg.bins = b;
    }
    if let Some(w) = paa_window {
        cfg.paa_window = w;
    }
    if let Some(s) = percentile_step {
        cfg.percentile_step = s;
    }
    if let Some(w) = window {
        if w < 0 {
            return Err(CliError::Usage("--window must not be negative".into()));
        }
        cfg.window = ValidityWindow::symmetric(w);
    }
    Ok(AbstractionSetup {
        cfg,
        kb,
        contexts: contexts_from(contexts.as_deref())?,
    })
}

fn abstract_cmd(a: AbstractArgs, cfg: RunConfig) -> Result<()> {
    let points_path = need(a.points, cfg.points, "points")?;
    let f = a.abstraction;
    let setup = abstraction_setup(
        pick(f.method, cfg.method),
        pick(f.bins, cfg.bins),
        pick(f.kb, cfg.kb),
        pick(f.contexts, cfg.contexts),
        pick(f.paa_window, cfg.paa_window),
        pick(f.percentile_step, cfg.percentile_step),
        pick(f.window, cfg.window),
    )?;
    let points = points_from(&points_path)?;
    let labels = labels_from(pick(a.labels, cfg.labels).as_deref())?;
    let training = training_entities(
        pick(a.folds, cfg.folds).as_deref(),
        pick(a.holdout, cfg.holdout),
    )?;
    let cutoffs = match (a.cutoffs.or(cfg.cutoffs), training) {
        (Some(p), _) => Some(read_cutoffs(open(&p)?, &name(&p))?),
        (None, Some(keep)) => {
            let train: Vec<RawPoint> = points
                .iter()
                .filter(|p| keep.contains(&p.entity_id))
                .cloned()
                .collect();
            Some(learn_cutoffs(&train, &labels, &setup.cfg)?)
        }
        (None, None) => None,
    };
    let abs = abstract_points(
        &points,
        &setup.cfg,
        setup.kb.as_ref(),
        &setup.contexts,
        &labels,
        cutoffs,
    )?;
    log::info!("{} intervals from {} points", abs.rows.len(), points.len());
    if let Some(p) = a.cutoffs_out {
        write_cutoffs(create(&p)?, &abs.cutoffs)?;
    }
    write_interval_rows(output(pick(a.output, cfg.output).as_deref())?, &abs.rows)?;
    Ok(())
}

fn database(
    intervals: &Path,
    labels: &HashMap<String, String>,
    records: &[TirpRecord],
) -> Result<IntervalDatabase> {
    let rows = read_interval_rows(open(intervals)?, &name(intervals))?;
    let extra: Vec<(&str, &str)> = records
        .iter()
        .flat_map(|r| r.symbols.iter().filter_map(|s| split_symbol_text(s)))
        .collect();
    Ok(build_database(&rows, labels, extra)?)
}

/// Flags over config over `base` (the pattern file header, when there is
/// one).
fn mining_config(
    m: &MiningFlags,
    cfg: &RunConfig,
    base: Option<&TirpHeader>,
) -> Result<MiningConfig> {
    let default_relations = base.map(|h| h.relations).unwrap_or_default();
    let min: MinSupport = match pick(m.min_vs, cfg.min_vs).or(base.map(|h| h.min_support)) {
        Some(s) => s,
        None => return Err(CliError::Usage("missing --min-vs".into())),
    };
    let relations = RelationConfig {
        mode: pick(m.relations, cfg.relations).unwrap_or(default_relations.mode),
        epsilon: pick(m.epsilon, cfg.epsilon).unwrap_or(default_relations.epsilon),
        max_gap: pick(m.max_gap, cfg.max_gap).or(default_relations.max_gap),
    };
    let sac = pick(m.sac, cfg.sac)
        .or(base.map(|h| h.sac))
        .unwrap_or_default();
    let mut out = MiningConfig::new(min)
        .with_relations(relations)
        .with_sac(sac);
    out.max_size = pick(m.max_size, cfg.max_size);
    out.validate()?;
    Ok(out)
}

fn mine_cmd(a: MineArgs, cfg: RunConfig) -> Result<()> {
    let intervals = need(a.intervals, cfg.intervals.clone(), "intervals")?;
    let mcfg = mining_config(&a.mining, &cfg, None)?;
    let labels = labels_from(pick(a.labels, cfg.labels.clone()).as_deref())?;
    let mut db = database(&intervals, &labels, &[])?;
    if let Some(keep) = training_entities(
        pick(a.folds, cfg.folds.clone()).as_deref(),
        pick(a.holdout, cfg.holdout),
    )? {
        db = db.subset(&keep);
    }
    let t0 = Instant::now();
    let tree = mine(&db, &mcfg)?;
    let elapsed = t0.elapsed();
    let header = TirpHeader {
        min_support: mcfg.min_support,
        relations: mcfg.relations,
        sac: mcfg.sac,
        entities: db.len(),
        runtime_ms: elapsed.as_millis(),
    };
    write_tirp_file(
        output(pick(a.output, cfg.output).as_deref())?,
        &header,
        &tirp_records(&tree, &db),
    )?;
    eprintln!(
        "mined {} TIRPs over {} entities in {:.1} ms (sac={}, relations={}, min_vs={}, peak candidates {})",
        tree.len(),
        db.len(),
        elapsed.as_secs_f64() * 1e3,
        mcfg.sac,
        mcfg.relations.mode,
        mcfg.min_support,
        tree.stats.peak_candidates()
    );
    Ok(())
}

struct Detection {
    db: IntervalDatabase,
    records: Vec<TirpRecord>,
    tirps: Vec<tirpmine::Tirp>,
    cfg: MiningConfig,
}

fn load_detection(
    tirps: Option<PathBuf>,
    intervals: Option<PathBuf>,
    labels: Option<PathBuf>,
    m: &MiningFlags,
    cfg: &RunConfig,
) -> Result<Detection> {
    let tirp_path = need(tirps, cfg.tirps.clone(), "tirps")?;
    let intervals = need(intervals, cfg.intervals.clone(), "intervals")?;
    let (header, records) = read_tirp_file(open(&tirp_path)?, &name(&tirp_path))?;
    let mut mcfg = mining_config(
        &MiningFlags {
            min_vs: Some(m.min_vs.or(cfg.min_vs).unwrap_or(MinSupport::new(1, 1)?)),
            ..*m
        },
        cfg,
        header.as_ref(),
    )?;
    mcfg.max_size = None;
    let labels = labels_from(pick(labels, cfg.labels.clone()).as_deref())?;
    let db = database(&intervals, &labels, &records)?;
    let tirps = records
        .iter()
        .map(|r| {
            r.to_tirp(db.symbols())
                .expect("pattern symbols are registered")
        })
        .collect();
    Ok(Detection {
        db,
        records,
        tirps,
        cfg: mcfg,
    })
}

fn detect_cmd(a: DetectArgs, cfg: RunConfig) -> Result<()> {
    let d = load_detection(a.tirps, a.intervals, a.labels, &a.mining, &cfg)?;
    let per_record: Vec<Vec<(String, usize, Vec<u32>)>> = d
        .tirps
        .par_iter()
        .enumerate()
        .map(|(n, t)| {
            d.db.entities()
                .iter()
                .flat_map(|e| {
                    detect(t, e, &d.cfg)
                        .into_iter()
                        .map(move |idx| (e.id.clone(), n + 1, idx))
                })
                .collect()
        })
        .collect();
    let total: usize = per_record.iter().map(Vec::len).sum();
    write_instances(
        output(pick(a.output, cfg.output).as_deref())?,
        per_record.into_iter().flatten(),
    )?;
    log::info!("{total} instances of {} patterns", d.records.len());
    Ok(())
}

fn features(a: FeaturesArgs, cfg: RunConfig) -> Result<()> {
    let source = need(a.tirps.clone(), cfg.tirps.clone(), "tirps")?;
    let rep = pick(a.rep, cfg.rep).unwrap_or(Representation::Binary);
    let d = load_detection(a.tirps, a.intervals, a.labels, &a.mining, &cfg)?;
    let m = feature_matrix(&d.tirps, &d.db, rep, &d.cfg);
    write_feature_csv(
        output(pick(a.output, cfg.output).as_deref())?,
        &m,
        &name(&source),
    )?;
    Ok(())
}

fn folds(a: FoldsArgs, cfg: RunConfig) -> Result<()> {
    let labels = labels_from(pick(a.labels, cfg.labels.clone()).as_deref())?;
    let mut ids: BTreeSet<String> = labels.keys().cloned().collect();
    if let Some(p) = pick(a.intervals, cfg.intervals.clone()) {
        ids.extend(
            read_interval_rows(open(&p)?, &name(&p))?
                .into_iter()
                .map(|r| r.entity_id),
        );
    }
    if ids.is_empty() {
        return Err(CliError::Usage("folds need --intervals or --labels".into()));
    }
    let defaults = FoldSpec::default();
    let spec = FoldSpec {
        mining_folds: pick(a.mining_folds, cfg.mining_folds).unwrap_or(defaults.mining_folds),
        cv_folds: pick(a.cv_folds, cfg.cv_folds).unwrap_or(defaults.cv_folds),
        seed: pick(a.seed, cfg.seed).unwrap_or(defaults.seed),
    };
    let entries: Vec<(String, Option<String>)> = ids
        .into_iter()
        .map(|id| {
            let l = labels.get(&id).cloned();
            (id, l)
        })
        .collect();
    let map = assign_folds_for(&entries, &spec)?;
    write_folds(
        output(pick(a.output, cfg.output).as_deref())?,
        &map,
        &labels,
    )?;
    Ok(())
}

fn bench(a: BenchArgs, cfg: RunConfig) -> Result<()> {
    let labels = labels_from(pick(a.labels, cfg.labels.clone()).as_deref())?;
    let mut dbs: Vec<(String, IntervalDatabase)> = Vec::new();
    let mut interval_files = a.intervals.clone();
    if interval_files.is_empty() && a.points.is_none() && cfg.points.is_none() {
        interval_files.extend(cfg.intervals.iter().map(|p| name(p)));
    }
    for spec in &interval_files {
        let (label, path) = match spec.split_once('=') {
            Some((n, p)) => (n.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(spec);
                let stem = p
                    .file_stem()
                    .map_or(spec.clone(), |s| s.to_string_lossy().into_owned());
                (stem, p)
            }
        };
        dbs.push((label, database(&path, &labels, &[])?));
    }
    if let Some(points_path) = pick(a.points, cfg.points.clone()) {
        let points = points_from(&points_path)?;
        let methods = if a.method.is_empty() {
            cfg.method.map_or_else(Vec::new, |m| vec![m])
        } else {
            a.method.clone()
        };
        let kb = pick(a.kb.clone(), cfg.kb.clone());
        let methods = if methods.is_empty() && kb.is_some() {
            vec![Method::Kb]
        } else {
            methods
        };
        if methods.is_empty() {
            return Err(CliError::Usage("bench over points needs --method".into()));
        }
        for m in methods {
            let setup = abstraction_setup(
                Some(m),
                pick(a.bins, cfg.bins),
                kb.clone(),
                pick(a.contexts.clone(), cfg.contexts.clone()),
                cfg.paa_window,
                cfg.percentile_step,
                pick(a.window, cfg.window),
            )?;
            let abs = abstract_points(
                &points,
                &setup.cfg,
                setup.kb.as_ref(),
                &setup.contexts,
                &labels,
                None,
            )?;
            dbs.push((m.to_string(), build_database(&abs.rows, &labels, [])?));
        }
    }
    if dbs.is_empty() {
        return Err(CliError::Usage(
            "bench needs --intervals or --points".into(),
        ));
    }
    let defaults = BenchGrid::default();
    let grid = BenchGrid {
        relations: list(a.relations, cfg.relations, defaults.relations),
        sac: list(a.sac, cfg.sac, defaults.sac),
        min_vs: list(a.min_vs, cfg.min_vs, defaults.min_vs),
        epsilon: pick(a.epsilon, cfg.epsilon).unwrap_or(0),
        max_gap: pick(a.max_gap, cfg.max_gap),
        max_size: pick(a.max_size, cfg.max_size),
    };
    let rows = run_grid(&dbs, &grid)?;
    write_bench_csv(output(pick(a.output, cfg.output).as_deref())?, &rows)?;
    Ok(())
}

/// Flag list, else the single config value, else the default list.
fn list<T>(flags: Vec<T>, file: Option<T>, default: Vec<T>) -> Vec<T> {
    if !flags.is_empty() {
        flags
    } else if let Some(v) = file {
        vec![v]
    } else {
        default
    }
}

fn gen(a: GenArgs, cfg: RunConfig) -> Result<()> {
    let out = output(pick(a.output, cfg.output).as_deref())?;
    let seed = pick(a.seed, cfg.seed).unwrap_or(0);
    let labels = match a.kind {
        GenKind::Intervals => {
            let d = GeneratorConfig::default();
            let g = generate(&GeneratorConfig {
                entities: a.entities.unwrap_or(d.entities),
                concepts: a.concepts.unwrap_or(d.concepts),
                values_per_concept: a.values.unwrap_or(d.values_per_concept),
                planted: a.planted.unwrap_or(d.planted),
                pattern_size: a.pattern_size.unwrap_or(d.pattern_size),
                plant_rate: a.plant_rate.unwrap_or(d.plant_rate),
                noise_intervals: a.noise.unwrap_or(d.noise_intervals),
                contradiction_rate: a.contradiction_rate.unwrap_or(d.contradiction_rate),
                horizon: a.horizon.unwrap_or(d.horizon),
                seed,
                ..d
            })?;
            log::info!("{} contradictions injected", g.contradictions);
            write_interval_rows(out, &database_rows(&g.db))?;
            g.labels
        }
        GenKind::Points => {
            let d = PointGeneratorConfig::default();
            let (points, labels) = generate_points(&PointGeneratorConfig {
                entities: a.entities.unwrap_or(d.entities),
                concepts: a.concepts.unwrap_or(d.concepts),
                sampling_interval: a.sampling_interval.unwrap_or(d.sampling_interval),
                horizon: a.horizon.unwrap_or(d.horizon),
                positive_rate: a.plant_rate.unwrap_or(d.positive_rate),
                seed,
            })?;
            write_points(out, &points)?;
            labels
        }
    };
    if let Some(p) = a.labels_out {
        write_labels(create(&p)?, &labels)?;
    }
    Ok(())
}

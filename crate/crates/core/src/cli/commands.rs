use std::collections::HashMap;
use std::fmt::Display;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use super::config::Config;
use super::spec::FeatureSpec;
use super::{CliError, EvaluateArgs, ExtractArgs, FitStatsArgs, ForestArgs, PairArgs, RankArgs};
use crate::corpus_io::{load_corpus, load_lexicon, read_manifest, ArticleMeta, Level};
use crate::datasets::{
    balance_threshold, build_aligned_pairs, build_threshold_pairs, read_dataset, write_dataset,
    PairDataset,
};
use crate::discourse_stats::{EventKind, ProbabilityModel};
use crate::features::{
    extract_all, format_sig, read_features, write_features, ExtractionContext, FeatureVector,
    FEATURE_CODES, FEATURE_NAMES,
};
use crate::learn::{
    cross_validate, rank_information_gain, train_forest, welch_t_test, CVResult, ForestParams,
};

pub const FEATURES_FILE: &str = "features.csv";
pub const PAIRS_FILE: &str = "pairs.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const RANKING_FILE: &str = "ranking.csv";
pub const FOREST_FILE: &str = "forest_all.json";

pub fn model_file_name(kind: EventKind) -> String {
    format!("stats_{}.json", kind.as_str())
}

pub struct Context {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub config: Config,
}

impl Context {
    fn out_path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn require_seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage(format!("{what} samples randomly and needs `--seed`")))
    }
}

fn data_err<E: Display>(path: &Path) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(data_err(path))
}

fn write_file(
    path: &Path,
    write: impl FnOnce(&mut Vec<u8>) -> Result<(), String>,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(data_err(dir))?;
    }
    std::fs::write(path, buf).map_err(data_err(path))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Data(format!("writing output: {e}"))
}

pub fn cmd_fit_stats(
    ctx: &Context,
    args: FitStatsArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let manifest: PathBuf = ctx.config.require("manifest", args.manifest)?;
    let alpha = ctx.config.resolve_or("alpha", args.alpha, 1.0)?;
    let articles = load_corpus(&manifest).map_err(data_err(&manifest))?;
    for kind in EventKind::ALL {
        let model = ProbabilityModel::fit(&articles, kind, alpha).map_err(|e| match e {
            crate::discourse_stats::StatsError::NonPositiveAlpha(_) => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Data(format!("{}: {e}", manifest.display())),
        })?;
        let path = ctx.out_path(&model_file_name(kind));
        let text = model.to_json_string();
        write_file(&path, |buf| {
            buf.extend_from_slice(text.as_bytes());
            Ok(())
        })?;
        writeln!(
            stdout,
            "{kind}: {} events, {} distinct, {} articles -> {}",
            model.event_total(),
            model.event_counts().len(),
            model.n_total(),
            path.display()
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn cmd_extract(
    ctx: &Context,
    args: ExtractArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let manifest: PathBuf = ctx.config.require("manifest", args.manifest)?;
    let models_dir = ctx
        .config
        .resolve_or("models", args.models, ctx.out.clone())?;
    let synonyms: PathBuf = ctx.config.require("synonyms", args.synonyms)?;
    let frequencies: PathBuf = ctx.config.require("frequencies", args.frequencies)?;

    let mut models = Vec::new();
    for kind in EventKind::ALL {
        let path = models_dir.join(model_file_name(kind));
        let text = std::fs::read_to_string(&path).map_err(data_err(&path))?;
        let model = ProbabilityModel::from_json_str(&text).map_err(data_err(&path))?;
        if model.kind() != kind {
            return Err(CliError::Data(format!(
                "{}: holds a {} model",
                path.display(),
                model.kind()
            )));
        }
        models.push(model);
    }
    let models: [ProbabilityModel; 3] = models.try_into().expect("three kinds");
    let synonyms_lex = load_lexicon(&synonyms).map_err(data_err(&synonyms))?;
    let frequencies_lex = load_lexicon(&frequencies).map_err(data_err(&frequencies))?;
    let extraction = ExtractionContext::new(models, synonyms_lex, frequencies_lex)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let articles = load_corpus(&manifest).map_err(data_err(&manifest))?;
    let vectors = extract_all(&articles, &extraction).map_err(data_err(&manifest))?;
    let path = ctx.out_path(FEATURES_FILE);
    write_file(&path, |buf| {
        write_features(buf, &vectors).map_err(|e| e.to_string())
    })?;
    writeln!(
        stdout,
        "extracted {} articles -> {}",
        vectors.len(),
        path.display()
    )
    .map_err(io)?;
    Ok(())
}

fn read_alignment(path: &Path) -> Result<Vec<(usize, String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(data_err(path))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [complex, simple] = fields[..] else {
            return Err(CliError::Data(format!(
                "{}:{line_no}: expected `complex_id<TAB>simple_id`",
                path.display()
            )));
        };
        rows.push((line_no, complex.to_string(), simple.to_string()));
    }
    Ok(rows)
}

pub fn cmd_pair(ctx: &Context, args: PairArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let manifest: PathBuf = ctx.config.require("manifest", args.manifest)?;
    let table = ctx.config.resolve_or(
        "feature_table",
        args.feature_table,
        ctx.out_path(FEATURES_FILE),
    )?;
    let mode: String = ctx
        .config
        .resolve_or("mode", args.mode, "threshold".to_string())?;

    let rows = read_manifest(&manifest).map_err(data_err(&manifest))?;
    let vectors = read_features(open(&table)?).map_err(data_err(&table))?;
    let by_id: HashMap<&str, &FeatureVector> =
        vectors.iter().map(|v| (v.article_id.as_str(), v)).collect();
    let vector_of = |id: &str| {
        by_id.get(id).copied().ok_or_else(|| {
            CliError::Data(format!(
                "{}: no features for article `{id}`",
                table.display()
            ))
        })
    };

    let ds = match mode.as_str() {
        "threshold" => {
            let mut scored = Vec::with_capacity(rows.len());
            for row in &rows {
                let ArticleMeta::Score(score) = row.meta else {
                    return Err(CliError::Data(format!(
                        "{}:{}: article `{}` has no complexity score (MissingScores)",
                        manifest.display(),
                        row.line,
                        row.id
                    )));
                };
                scored.push((vector_of(&row.id)?, score));
            }
            let threshold: String =
                ctx.config
                    .resolve_or("threshold", args.threshold, "0.7".to_string())?;
            let threshold = if threshold == "auto" {
                let scores: Vec<f64> = scored.iter().map(|s| s.1).collect();
                let t = balance_threshold(&scores).map_err(data_err(&manifest))?;
                writeln!(stdout, "chosen threshold: {}", format_sig(t)).map_err(io)?;
                t
            } else {
                threshold
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad threshold `{threshold}`")))?
            };
            build_threshold_pairs(&scored, threshold).map_err(|e| match e {
                crate::datasets::DatasetError::NonPositiveThreshold(_) => {
                    CliError::Usage(e.to_string())
                }
                e => CliError::Data(format!("{}: {e}", manifest.display())),
            })?
        }
        "aligned" => {
            let alignment: PathBuf = ctx
                .config
                .resolve("alignment", args.alignment)?
                .ok_or_else(|| {
                    CliError::Usage("aligned mode needs `--alignment` (MissingAlignment)".into())
                })?;
            let pairs_per_class: usize = ctx
                .config
                .require("pairs_per_class", args.pairs_per_class)?;
            let seed = ctx.require_seed("aligned pairing")?;
            let levels: HashMap<&str, ArticleMeta> =
                rows.iter().map(|r| (r.id.as_str(), r.meta)).collect();
            let mut aligned = Vec::new();
            for (line, complex, simple) in read_alignment(&alignment)? {
                for (id, want) in [(&complex, Level::Complex), (&simple, Level::Simple)] {
                    if levels.get(id.as_str()) != Some(&ArticleMeta::Level(want)) {
                        return Err(CliError::Data(format!(
                            "{}:{line}: article `{id}` is not a {want} article of {}",
                            alignment.display(),
                            manifest.display()
                        )));
                    }
                }
                aligned.push((vector_of(&complex)?, vector_of(&simple)?));
            }
            build_aligned_pairs(&aligned, pairs_per_class, seed).map_err(data_err(&alignment))?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown pairing mode `{other}` (threshold or aligned)"
            )))
        }
    };

    let path = ctx.out_path(PAIRS_FILE);
    write_file(&path, |buf| {
        write_dataset(buf, &ds).map_err(|e| e.to_string())
    })?;
    let [same, different] = ds.label_counts();
    writeln!(stdout, "# of pairs of articles   {:>6}", ds.len()).map_err(io)?;
    writeln!(stdout, "# of positive (same)     {same:>6}").map_err(io)?;
    writeln!(stdout, "# of negative (different){different:>6}").map_err(io)?;
    writeln!(stdout, "dataset -> {}", path.display()).map_err(io)?;
    Ok(())
}

fn forest_params(ctx: &Context, args: &ForestArgs, seed: u64) -> Result<ForestParams, CliError> {
    let d = ForestParams::default();
    let cfg = &ctx.config;
    let params = ForestParams {
        n_trees: cfg.resolve_or("n_trees", args.n_trees, d.n_trees)?,
        max_depth: cfg.resolve("max_depth", args.max_depth)?,
        min_leaf: cfg.resolve_or("min_leaf", args.min_leaf, d.min_leaf)?,
        features_per_split: cfg.resolve_or(
            "features_per_split",
            args.features_per_split,
            d.features_per_split,
        )?,
        seed,
    };
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

fn load_dataset(ctx: &Context, flag: Option<PathBuf>) -> Result<(PathBuf, PairDataset), CliError> {
    let path = ctx
        .config
        .resolve_or("dataset", flag, ctx.out_path(PAIRS_FILE))?;
    let ds = read_dataset(open(&path)?).map_err(data_err(&path))?;
    if ds.is_empty() {
        return Err(CliError::Data(format!(
            "{}: dataset is empty",
            path.display()
        )));
    }
    Ok((path, ds))
}

/// One line of the ablation report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub config: String,
    /// `None` for the baseline.
    pub n_features: Option<usize>,
    pub mean_acc: f64,
    pub fold_accuracies: Vec<f64>,
    /// `None` for the baseline and for `all` itself.
    pub p_value: Option<f64>,
    pub significant_decrease: Option<bool>,
}

impl ReportRow {
    pub fn verdict(&self) -> &'static str {
        match self.significant_decrease {
            Some(true) => "⇓",
            Some(false) => "=",
            None => "N/A",
        }
    }

    fn n_features_str(&self) -> String {
        self.n_features.map_or("N/A".into(), |n| n.to_string())
    }

    fn p_value_str(&self) -> String {
        self.p_value.map_or("N/A".into(), |p| format!("{p:.4}"))
    }
}

fn expand_specs(raw: &[String]) -> Result<Vec<FeatureSpec>, CliError> {
    let mut specs = Vec::new();
    let items: Vec<String> = if raw.is_empty() {
        vec!["grid".into()]
    } else {
        raw.iter()
            .flat_map(|r| r.split(',').map(|s| s.trim().to_string()))
            .collect()
    };
    for item in items {
        let expanded = if item.eq_ignore_ascii_case("grid") {
            FeatureSpec::ablation_grid()
        } else {
            vec![item.parse::<FeatureSpec>().map_err(CliError::Usage)?]
        };
        for spec in expanded {
            if !specs.contains(&spec) {
                specs.push(spec);
            }
        }
    }
    if !specs.contains(&FeatureSpec::All) {
        specs.insert(0, FeatureSpec::All);
    }
    Ok(specs)
}

pub fn cmd_evaluate(
    ctx: &Context,
    args: EvaluateArgs,
    stdout: &mut dyn Write,
) -> Result<Vec<ReportRow>, CliError> {
    let specs = expand_specs(&args.features)?;
    let seed = ctx.require_seed("evaluate")?;
    let params = forest_params(ctx, &args.forest, seed)?;
    let k: usize = ctx.config.resolve_or("k_folds", args.k_folds, 10)?;
    let (path, ds) = load_dataset(ctx, args.dataset)?;

    let run = |spec: FeatureSpec| -> Result<CVResult, CliError> {
        cross_validate(&ds, &params, &spec.indices(), k).map_err(data_err(&path))
    };
    let all = run(FeatureSpec::All)?;
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let cv = if spec == FeatureSpec::All {
            all.clone()
        } else {
            run(spec)?
        };
        let test = match spec {
            FeatureSpec::All | FeatureSpec::Baseline => None,
            _ => Some(
                welch_t_test(&cv.fold_accuracies, &all.fold_accuracies).map_err(data_err(&path))?,
            ),
        };
        rows.push(ReportRow {
            config: spec.to_string(),
            n_features: (spec != FeatureSpec::Baseline).then_some(cv.feature_subset.len()),
            mean_acc: cv.mean,
            fold_accuracies: cv.fold_accuracies,
            p_value: test.map(|t| t.p_value),
            significant_decrease: test.map(|t| t.significant_decrease),
        });
    }

    let report = ctx.out_path(REPORT_FILE);
    write_file(&report, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut put = |r: &[String]| w.write_record(r).map_err(|e| e.to_string());
        put(&["config", "n_features", "mean_acc", "p_value", "verdict"].map(String::from))?;
        for r in &rows {
            put(&[
                r.config.clone(),
                r.n_features_str(),
                format!("{:.2}", 100.0 * r.mean_acc),
                r.p_value_str(),
                r.verdict().to_string(),
            ])?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;

    let forest =
        train_forest(&ds, &params, &FeatureSpec::All.indices()).map_err(data_err(&path))?;
    let forest_path = ctx.out_path(FOREST_FILE);
    let text = forest.to_json_string();
    write_file(&forest_path, |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })?;

    let [same, different] = ds.label_counts();
    writeln!(
        stdout,
        "{} pairs ({same} same / {different} different), {k}-fold CV, {} trees, seed {seed}",
        ds.len(),
        params.n_trees
    )
    .map_err(io)?;
    writeln!(
        stdout,
        "{:<22} {:>12} {:>10} {:>8} {:>10}",
        "Feature set", "No. features", "Accuracy", "p-value", "Stat. Sign"
    )
    .map_err(io)?;
    for r in &rows {
        writeln!(
            stdout,
            "{:<22} {:>12} {:>9.2}% {:>8} {:>10}",
            r.config,
            r.n_features_str(),
            100.0 * r.mean_acc,
            r.p_value_str(),
            r.verdict()
        )
        .map_err(io)?;
    }
    writeln!(stdout, "report -> {}", report.display()).map_err(io)?;
    writeln!(stdout, "forest (all features) -> {}", forest_path.display()).map_err(io)?;
    Ok(rows)
}

pub fn cmd_rank(ctx: &Context, args: RankArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (path, ds) = load_dataset(ctx, args.dataset)?;
    let ranked = rank_information_gain(&ds).map_err(data_err(&path))?;

    let out = ctx.out_path(RANKING_FILE);
    write_file(&out, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut put = |r: &[String]| w.write_record(r).map_err(|e| e.to_string());
        put(&["rank", "feature", "name", "gain"].map(String::from))?;
        for (rank, &(f, gain)) in ranked.iter().enumerate() {
            put(&[
                (rank + 1).to_string(),
                FEATURE_CODES[f].to_uppercase(),
                FEATURE_NAMES[f].to_string(),
                format_sig(gain),
            ])?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;

    writeln!(
        stdout,
        "{:>4}  {:<4} {:<64} {:>8}",
        "Rank", "Idx", "Feature", "IG"
    )
    .map_err(io)?;
    for (rank, &(f, gain)) in ranked.iter().enumerate() {
        writeln!(
            stdout,
            "{:>4}  {:<4} {:<64} {:>8.4}",
            rank + 1,
            FEATURE_CODES[f].to_uppercase(),
            FEATURE_NAMES[f],
            gain
        )
        .map_err(io)?;
    }
    writeln!(stdout, "ranking -> {}", out.display()).map_err(io)?;
    Ok(())
}

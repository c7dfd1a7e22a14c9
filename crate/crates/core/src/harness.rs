//! Seeded multi-realization experiment orchestration and CSV report emission.
//!
//! One realization = one train/test split, a training-graph build, ranking
//! scores for every eligible test entry and diversity metrics at each
//! configured list length. Realizations run in parallel but aggregate in
//! index order, so parallel and sequential executions produce identical
//! reports.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::diffusion::{diffuse, recommend, Algorithm, DiffusionError, RecommendationList};
use crate::graph::{build_graph, DegreeKind, TripartiteGraph};
use crate::ingest::{self, Dataset, DatasetStats};
use crate::metrics::{
    self, DegreeDistribution, EntropyKind, MetricCurve, RankingOutcome,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("dataset error: {0}")]
    Ingest(#[from] ingest::IngestError),
    #[error("dataset is empty after purification")]
    EmptyAfterPurify,
    #[error("realization {index}: training set is empty")]
    EmptyTrainingSet { index: u32 },
    #[error("all {0} realizations failed")]
    AllRealizationsFailed(u32),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Configuration of a full experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub ratio: f64,
    pub realizations: u32,
    pub master_seed: u64,
    /// List lengths for the diversity sweeps; may be empty.
    pub lengths: Vec<usize>,
    /// Cold-start partition threshold on the training object degree.
    pub threshold: u32,
    pub output_dir: PathBuf,
    /// Worker cap; None = available parallelism.
    pub jobs: Option<usize>,
    /// Compute dataset-level metrics (overlap, entropy, degree
    /// distributions) on the first realization's training split instead of
    /// the full purified dataset.
    pub dataset_metrics_on_train: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: PathBuf::new(),
            algorithms: Algorithm::ALL.to_vec(),
            ratio: 0.9,
            realizations: 50,
            master_seed: 0,
            lengths: vec![10, 20, 50],
            threshold: 10,
            output_dir: PathBuf::from("report"),
            jobs: None,
            dataset_metrics_on_train: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(HarnessError::InvalidConfig(format!(
                "ratio {} out of range (0, 1]",
                self.ratio
            )));
        }
        if self.realizations < 1 {
            return Err(HarnessError::InvalidConfig(
                "realizations must be >= 1".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::InvalidConfig(
                "at least one algorithm required".into(),
            ));
        }
        if self.lengths.iter().any(|&l| l < 2) {
            return Err(HarnessError::InvalidConfig(
                "list lengths must be >= 2".into(),
            ));
        }
        if self.threshold < 1 {
            return Err(HarnessError::InvalidConfig("threshold must be >= 1".into()));
        }
        Ok(())
    }
}

/// Counter-based child-seed derivation (splitmix64 finalizer over master
/// seed and realization index). Changing the realization count never
/// reshuffles earlier realizations.
pub fn child_seed(master_seed: u64, index: u32) -> u64 {
    let mut z = master_seed ^ (index as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Diversity statistics at one list length within one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityPoint {
    pub len: usize,
    pub value: Option<f64>,
    /// Users excluded because they had fewer than `len` uncollected objects.
    pub excluded_users: usize,
}

/// Per-algorithm results of one realization.
#[derive(Debug, Clone)]
pub struct AlgorithmRealization {
    pub algorithm: Algorithm,
    pub outcome_count: u64,
    pub rs_mean: Option<f64>,
    pub rs_low: Option<f64>,
    pub rs_high: Option<f64>,
    /// (sum of rs, count) per training object degree k_o.
    pub rs_degree: BTreeMap<u32, (f64, u64)>,
    pub inter_diversity: Vec<DiversityPoint>,
    pub inner_diversity: Vec<DiversityPoint>,
    /// Target-user objects skipped for missing tags (user-object-tag route).
    pub zero_tag_warnings: u64,
    /// Users skipped because their tag profile is empty in the training
    /// graph (user-tag-object route).
    pub empty_profile_users: u64,
}

#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub index: u32,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    /// Test entries whose user or object is absent from the training graph.
    pub skipped_test_entries: u64,
    pub per_algorithm: Vec<AlgorithmRealization>,
}

/// Across-realization mean and standard deviation of one scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    /// Population standard deviation over the realizations that defined the
    /// value.
    pub std: f64,
    pub samples: u64,
}

fn aggregate(values: impl Iterator<Item = f64>) -> Option<Aggregate> {
    let values: Vec<f64> = values.collect();
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some(Aggregate {
        mean,
        std: var.sqrt(),
        samples: values.len() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub rs: Option<Aggregate>,
    pub rs_low: Option<Aggregate>,
    pub rs_high: Option<Aggregate>,
    /// Pooled mean rs per k_o over all realizations.
    pub rs_by_degree: MetricCurve,
    pub inter_diversity: Vec<(usize, Option<Aggregate>, f64)>,
    pub inner_diversity: Vec<(usize, Option<Aggregate>, f64)>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub stats: DatasetStats,
    pub algorithms: Vec<AlgorithmSummary>,
    /// Raw per-realization values; every aggregate above is recomputable
    /// from these.
    pub realizations: Vec<RealizationResult>,
    pub failed_realizations: Vec<(u32, String)>,
    pub or_tags: MetricCurve,
    pub or_objects: MetricCurve,
    pub entropy_user: MetricCurve,
    pub entropy_object: MetricCurve,
    pub degree_distributions: Vec<(DegreeKind, DegreeDistribution)>,
}

/// Run one seeded realization: split, build the training graph, rank every
/// eligible test entry and compute diversity at each configured length.
pub fn run_realization(
    d: &Dataset,
    cfg: &ExperimentConfig,
    index: u32,
) -> Result<RealizationResult, HarnessError> {
    cfg.validate()?;
    let seed = child_seed(cfg.master_seed, index);
    let pair = ingest::split(d, cfg.ratio, seed)?;
    if pair.train.is_empty() {
        return Err(HarnessError::EmptyTrainingSet { index });
    }
    let g = build_graph(&pair.train).expect("non-empty training set");

    // test entries with both endpoints in the training graph
    let mut skipped = 0u64;
    let mut test_by_user: HashMap<u32, Vec<u32>> = HashMap::new();
    for a in &pair.test.assignments {
        match (g.user_id(&a.user), g.object_id(&a.object)) {
            (Ok(u), Ok(o)) => test_by_user.entry(u).or_default().push(o),
            _ => skipped += 1,
        }
    }

    let max_len = cfg.lengths.iter().copied().max().unwrap_or(0);
    let per_algorithm = cfg
        .algorithms
        .iter()
        .map(|&alg| {
            run_algorithm(&g, alg, &test_by_user, &cfg.lengths, max_len, cfg.threshold)
        })
        .collect();

    Ok(RealizationResult {
        index,
        seed,
        train_size: pair.train.len(),
        test_size: pair.test.len(),
        skipped_test_entries: skipped,
        per_algorithm,
    })
}

fn run_algorithm(
    g: &TripartiteGraph,
    algorithm: Algorithm,
    test_by_user: &HashMap<u32, Vec<u32>>,
    lengths: &[usize],
    max_len: usize,
    threshold: u32,
) -> AlgorithmRealization {
    struct UserResult {
        outcomes: Vec<RankingOutcome>,
        list: Option<RecommendationList>,
        zero_tag: u64,
        empty_profile: bool,
    }
    let empty: Vec<u32> = Vec::new();
    let per_user: Vec<UserResult> = (0..g.n() as u32)
        .into_par_iter()
        .map(|u| {
            let tests = test_by_user.get(&u).unwrap_or(&empty);
            if tests.is_empty() && max_len == 0 {
                return UserResult {
                    outcomes: Vec::new(),
                    list: None,
                    zero_tag: 0,
                    empty_profile: false,
                };
            }
            let scores = match diffuse(g, algorithm, u) {
                Ok(s) => s,
                Err(DiffusionError::EmptyTagProfile(_)) => {
                    return UserResult {
                        outcomes: Vec::new(),
                        list: None,
                        zero_tag: 0,
                        empty_profile: true,
                    }
                }
                Err(DiffusionError::UnknownUser(_)) => unreachable!("ids are in range"),
            };
            let outcomes = if tests.is_empty() {
                Vec::new()
            } else {
                // split entries are valid and uncollected by construction
                metrics::ranking_scores_for_user(g, &scores, tests).unwrap_or_default()
            };
            let list = if max_len > 0 {
                Some(recommend(g, &scores, max_len))
            } else {
                None
            };
            UserResult {
                outcomes,
                list,
                zero_tag: scores.zero_tag_objects as u64,
                empty_profile: false,
            }
        })
        .collect();

    let mut outcomes: Vec<RankingOutcome> = Vec::new();
    let mut lists: Vec<RecommendationList> = Vec::new();
    let mut zero_tag_warnings = 0u64;
    let mut empty_profile_users = 0u64;
    for r in per_user {
        outcomes.extend(r.outcomes);
        if let Some(l) = r.list {
            lists.push(l);
        }
        zero_tag_warnings += r.zero_tag;
        empty_profile_users += r.empty_profile as u64;
    }

    let mut rs_degree: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for o in &outcomes {
        let e = rs_degree.entry(o.object_training_degree).or_default();
        e.0 += o.rs;
        e.1 += 1;
    }
    let (rs_low, rs_high) = metrics::rs_degree_buckets(&outcomes, threshold);
    let inter = lengths
        .iter()
        .map(|&len| match metrics::inter_diversity(&lists, len) {
            Ok((v, excluded)) => DiversityPoint {
                len,
                value: Some(v),
                excluded_users: excluded,
            },
            Err(_) => DiversityPoint {
                len,
                value: None,
                excluded_users: lists.len(),
            },
        })
        .collect();
    let inner = lengths
        .iter()
        .map(|&len| match metrics::inner_diversity(&lists, g, len) {
            Ok((v, excluded)) => DiversityPoint {
                len,
                value: Some(v),
                excluded_users: excluded,
            },
            Err(_) => DiversityPoint {
                len,
                value: None,
                excluded_users: lists.len(),
            },
        })
        .collect();

    AlgorithmRealization {
        algorithm,
        outcome_count: outcomes.len() as u64,
        rs_mean: metrics::mean_rs(&outcomes).ok(),
        rs_low,
        rs_high,
        rs_degree,
        inter_diversity: inter,
        inner_diversity: inner,
        zero_tag_warnings,
        empty_profile_users,
    }
}

/// Run a full experiment on an already-purified dataset.
pub fn run_experiment_on(
    purified: &Dataset,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    if purified.is_empty() {
        return Err(HarnessError::EmptyAfterPurify);
    }
    let stats = ingest::summarize(purified);

    let results: Vec<Result<RealizationResult, HarnessError>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|i| run_realization(purified, cfg, i))
        .collect();
    let mut realizations = Vec::new();
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(r) => realizations.push(r),
            Err(e) => failed.push((i as u32, e.to_string())),
        }
    }
    if realizations.is_empty() {
        return Err(HarnessError::AllRealizationsFailed(cfg.realizations));
    }

    let algorithms = cfg
        .algorithms
        .iter()
        .enumerate()
        .map(|(ai, &alg)| summarize_algorithm(alg, ai, &realizations, &cfg.lengths))
        .collect();

    // dataset-level metrics
    let metric_source: Dataset = if cfg.dataset_metrics_on_train {
        ingest::split(purified, cfg.ratio, realizations[0].seed)?.train
    } else {
        purified.clone()
    };
    let mg = build_graph(&metric_source).expect("non-empty dataset");
    let degree_distributions = [
        DegreeKind::UserObjects,
        DegreeKind::ObjectUsers,
        DegreeKind::ObjectTags,
        DegreeKind::TagObjects,
    ]
    .iter()
    .map(|&k| (k, metrics::degree_distribution(&mg, k)))
    .collect();

    Ok(ExperimentReport {
        config: cfg.clone(),
        stats,
        algorithms,
        realizations,
        failed_realizations: failed,
        or_tags: metrics::overlap_ratio_tags(&metric_source),
        or_objects: metrics::overlap_ratio_objects(&metric_source),
        entropy_user: metrics::entropy_by_degree(&mg, EntropyKind::User),
        entropy_object: metrics::entropy_by_degree(&mg, EntropyKind::Object),
        degree_distributions,
    })
}

/// Parse, purify and run: the full pipeline behind `tagrec evaluate`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let raw = std::fs::read_to_string(&cfg.dataset).map_err(|source| HarnessError::Io {
        path: cfg.dataset.display().to_string(),
        source,
    })?;
    let parsed = ingest::parse_records(&raw)?;
    let purified = ingest::purify(&parsed);
    if purified.is_empty() {
        return Err(HarnessError::EmptyAfterPurify);
    }
    run_experiment_on(&purified, cfg)
}

fn summarize_algorithm(
    algorithm: Algorithm,
    index: usize,
    realizations: &[RealizationResult],
    lengths: &[usize],
) -> AlgorithmSummary {
    let rows: Vec<&AlgorithmRealization> = realizations
        .iter()
        .map(|r| &r.per_algorithm[index])
        .collect();
    let mut rs_degree: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for row in &rows {
        for (&k, &(sum, count)) in &row.rs_degree {
            let e = rs_degree.entry(k).or_default();
            e.0 += sum;
            e.1 += count;
        }
    }
    let mut curve = MetricCurve::default();
    for (k, (sum, count)) in rs_degree {
        curve.x.push(k);
        curve.y.push(sum / count as f64);
        curve.counts.push(count);
    }
    let diversity = |pick: fn(&AlgorithmRealization) -> &Vec<DiversityPoint>| {
        lengths
            .iter()
            .enumerate()
            .map(|(li, &len)| {
                let agg = aggregate(rows.iter().filter_map(|r| pick(r)[li].value));
                let excluded_mean = rows
                    .iter()
                    .map(|r| pick(r)[li].excluded_users as f64)
                    .sum::<f64>()
                    / rows.len() as f64;
                (len, agg, excluded_mean)
            })
            .collect()
    };
    AlgorithmSummary {
        algorithm,
        rs: aggregate(rows.iter().filter_map(|r| r.rs_mean)),
        rs_low: aggregate(rows.iter().filter_map(|r| r.rs_low)),
        rs_high: aggregate(rows.iter().filter_map(|r| r.rs_high)),
        rs_by_degree: curve,
        inter_diversity: diversity(|r| &r.inter_diversity),
        inner_diversity: diversity(|r| &r.inner_diversity),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v}"),
        None => "nan".to_string(),
    }
}

/// Write the report as eight CSV files plus a manifest. Re-emitting the same
/// report produces byte-identical files (the manifest carries no timestamp).
pub fn emit_report(rep: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut write = |name: &str, content: String| -> Result<(), HarnessError> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(path);
        Ok(())
    };

    let s = &rep.stats;
    write(
        "stats.csv",
        format!(
            "n,m,r,k_mean,k_prime_mean,k_dprime_mean\n{},{},{},{},{},{}\n",
            s.n, s.m, s.r, s.mean_objects_per_user, s.mean_tags_per_object, s.mean_tags_per_user
        ),
    )?;

    let mut accuracy =
        String::from("algorithm,rs_mean,rs_std,rs_low_mean,rs_low_std,rs_high_mean,rs_high_std\n");
    for a in &rep.algorithms {
        let cell = |agg: &Option<Aggregate>| {
            (
                fmt_opt(agg.map(|a| a.mean)),
                fmt_opt(agg.map(|a| a.std)),
            )
        };
        let (rs_m, rs_s) = cell(&a.rs);
        let (lo_m, lo_s) = cell(&a.rs_low);
        let (hi_m, hi_s) = cell(&a.rs_high);
        accuracy.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.algorithm, rs_m, rs_s, lo_m, lo_s, hi_m, hi_s
        ));
    }
    write("accuracy.csv", accuracy)?;

    let mut rs_deg = String::from("algorithm,k_o,rs_mean,count\n");
    for a in &rep.algorithms {
        for i in 0..a.rs_by_degree.x.len() {
            rs_deg.push_str(&format!(
                "{},{},{},{}\n",
                a.algorithm, a.rs_by_degree.x[i], a.rs_by_degree.y[i], a.rs_by_degree.counts[i]
            ));
        }
    }
    write("rs_vs_degree.csv", rs_deg)?;

    let diversity_csv = |pick: fn(&AlgorithmSummary) -> &Vec<(usize, Option<Aggregate>, f64)>| {
        let mut out = String::from("algorithm,L,mean,std,excluded_users_mean\n");
        for a in &rep.algorithms {
            for (len, agg, excluded) in pick(a) {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    a.algorithm,
                    len,
                    fmt_opt(agg.map(|x| x.mean)),
                    fmt_opt(agg.map(|x| x.std)),
                    excluded
                ));
            }
        }
        out
    };
    write("interd_vs_L.csv", diversity_csv(|a| &a.inter_diversity))?;
    write("innerd_vs_L.csv", diversity_csv(|a| &a.inner_diversity))?;

    let mut or_csv = String::from("variant,g,or_mean,pairs\n");
    for (variant, curve) in [("tags", &rep.or_tags), ("objects", &rep.or_objects)] {
        for i in 0..curve.x.len() {
            or_csv.push_str(&format!(
                "{},{},{},{}\n",
                variant, curve.x[i], curve.y[i], curve.counts[i]
            ));
        }
    }
    write("or_vs_g.csv", or_csv)?;

    let mut ent = String::from("kind,degree,entropy_mean,count\n");
    for (kind, curve) in [("user", &rep.entropy_user), ("object", &rep.entropy_object)] {
        for i in 0..curve.x.len() {
            ent.push_str(&format!(
                "{},{},{},{}\n",
                kind, curve.x[i], curve.y[i], curve.counts[i]
            ));
        }
    }
    write("entropy_vs_degree.csv", ent)?;

    let mut deg = String::from("kind,k,p,ccdf,count\n");
    for (kind, dist) in &rep.degree_distributions {
        let name = match kind {
            DegreeKind::UserObjects => "user_objects",
            DegreeKind::ObjectUsers => "object_users",
            DegreeKind::ObjectTags => "object_tags",
            DegreeKind::TagObjects => "tag_objects",
        };
        for i in 0..dist.k.len() {
            deg.push_str(&format!(
                "{},{},{},{},{}\n",
                name, dist.k[i], dist.pdf[i], dist.ccdf[i], dist.counts[i]
            ));
        }
    }
    write("degree_dist.csv", deg)?;

    let cfg = &rep.config;
    let mut manifest = String::new();
    manifest.push_str(&format!("version={}\n", env!("CARGO_PKG_VERSION")));
    manifest.push_str(&format!("dataset={}\n", cfg.dataset.display()));
    manifest.push_str(&format!(
        "algorithms={}\n",
        cfg.algorithms
            .iter()
            .map(|a| a.code())
            .collect::<Vec<_>>()
            .join(",")
    ));
    manifest.push_str(&format!("ratio={}\n", cfg.ratio));
    manifest.push_str(&format!("realizations={}\n", cfg.realizations));
    manifest.push_str(&format!("seed={}\n", cfg.master_seed));
    manifest.push_str(&format!(
        "lengths={}\n",
        cfg.lengths
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    ));
    manifest.push_str(&format!("threshold={}\n", cfg.threshold));
    manifest.push_str(&format!(
        "dataset_metrics_on_train={}\n",
        cfg.dataset_metrics_on_train
    ));
    for r in &rep.realizations {
        manifest.push_str(&format!(
            "realization_{}_seed={}\nrealization_{}_skipped={}\n",
            r.index, r.seed, r.index, r.skipped_test_entries
        ));
    }
    for (i, e) in &rep.failed_realizations {
        manifest.push_str(&format!("realization_{i}_failed={e}\n"));
    }
    write("manifest.txt", manifest)?;

    Ok(written)
}

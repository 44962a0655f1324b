use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EvalMode, RunConfig};
use super::CliError;
use crate::features::{normalize_per_subject, read_feature_table, write_feature_table, EpochFeatures, Feature};
use crate::ingest::{read_recording, score_answers, write_recording, SessionManifest};
use crate::learner::{fit_boosted, kfold_cv, loso_cv, CvReport, Dataset, ForestModel};
use crate::metrics::{anova_by_level, group_summary, kde_2d, render_kde_csv, AnovaResult, GroupSummary, DEFAULT_GRID};
use crate::pipeline::trial_features;
use crate::synth::synthesize_cohort;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportKind {
    Confusion,
    Importance,
    Kde,
    Anova,
    Summary,
}

/// Cross-validation output as written by `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config_sha256: String,
    pub feature_names: Vec<String>,
    #[serde(flatten)]
    pub report: CvReport,
}

#[derive(Debug, Serialize)]
struct ConfusionReport<'a> {
    config_sha256: String,
    mode: &'static str,
    classes: &'a [u8],
    confusion: &'a [Vec<usize>],
    mean_confusion: &'a [Vec<f64>],
    per_class_accuracy: &'a [f64],
    overall_accuracy: f64,
}

#[derive(Debug, Serialize)]
struct ImportanceEntry {
    feature: &'static str,
    category: String,
    importance: f64,
}

#[derive(Debug, Serialize)]
struct ImportanceReport {
    config_sha256: String,
    importances: Vec<ImportanceEntry>,
}

#[derive(Debug, Serialize)]
struct FeatureAnova {
    feature: &'static str,
    #[serde(flatten)]
    result: Option<AnovaResult>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct AnovaReport {
    config_sha256: String,
    features: Vec<FeatureAnova>,
}

#[derive(Debug, Serialize)]
struct FeatureSummary {
    feature: &'static str,
    groups: Vec<GroupSummary>,
}

#[derive(Debug, Serialize)]
struct SummaryReport {
    config_sha256: String,
    features: Vec<FeatureSummary>,
}

#[derive(Debug, Serialize)]
struct KdeEntry {
    nback_level: u8,
    file: String,
    points: usize,
    bandwidths: [f64; 2],
    peak_density: f64,
}

#[derive(Debug, Serialize)]
struct KdeReport {
    config_sha256: String,
    x_feature: &'static str,
    y_feature: &'static str,
    grids: Vec<KdeEntry>,
}

/// `<subject>_L<level>`, shared by a recording and its manifest.
pub fn trial_stem(subject: &str, level: u8) -> String {
    format!("{subject}_L{level}")
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_text(path, &text)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::from_io(path, e))
}

fn feature_names() -> Vec<String> {
    Feature::ALL.iter().map(|f| f.name().to_string()).collect()
}

pub fn cmd_generate(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let trials = synthesize_cohort(&config.generator.cohort_params()).map_err(|e| CliError::Other(e.to_string()))?;
    let (rec_dir, man_dir) = (config.paths.recordings_dir(), config.paths.manifests_dir());
    create_dir(&rec_dir)?;
    create_dir(&man_dir)?;
    let mut written = Vec::with_capacity(2 * trials.len());
    for t in &trials {
        let stem = trial_stem(&t.manifest.subject_id, t.manifest.nback_level);
        let rec = rec_dir.join(format!("{stem}.csv"));
        let man = man_dir.join(format!("{stem}.json"));
        write_recording(&rec, &t.record)?;
        t.manifest.write(&man)?;
        written.push(rec);
        written.push(man);
    }
    Ok(written)
}

fn recording_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::from_io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::MissingInput(format!("no recordings in {}", dir.display())));
    }
    Ok(files)
}

/// Features for every recording, in file-name order. Any failing file
/// aborts the whole extraction after all files have been tried.
pub fn extract_features(config: &RunConfig) -> Result<Vec<EpochFeatures>, CliError> {
    let files = recording_files(&config.paths.recordings_dir())?;
    let man_dir = config.paths.manifests_dir();
    let results: Vec<Result<Vec<EpochFeatures>, String>> = files
        .par_iter()
        .map(|rec| {
            let stem = rec.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let man = man_dir.join(format!("{stem}.json"));
            if !man.exists() {
                return Err(format!("{}: no manifest at {}", rec.display(), man.display()));
            }
            let record = read_recording(rec).map_err(|e| format!("{}: {e}", rec.display()))?;
            let manifest = SessionManifest::read(&man).map_err(|e| format!("{}: {e}", man.display()))?;
            trial_features(&record, &manifest).map_err(|e| format!("{}: {e}", rec.display()))
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    if !failures.is_empty() {
        for f in &failures {
            log::error!("{f}");
        }
        return Err(CliError::Other(format!(
            "{} of {} recordings failed; no features written",
            failures.len(),
            files.len()
        )));
    }
    Ok(results.into_iter().flat_map(Result::unwrap).collect())
}

pub fn cmd_extract(config: &RunConfig) -> Result<(PathBuf, usize), CliError> {
    let rows = extract_features(config)?;
    create_dir(&config.paths.output)?;
    let path = config.paths.features_file();
    write_feature_table(&path, &rows).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok((path, rows.len()))
}

fn load_features(config: &RunConfig) -> Result<Vec<EpochFeatures>, CliError> {
    let path = config.paths.features_file();
    read_feature_table(&path).map_err(|e| CliError::from_io(&path, e))
}

fn normalized(config: &RunConfig) -> Result<Vec<EpochFeatures>, CliError> {
    normalize_per_subject(&load_features(config)?).map_err(|e| CliError::Other(e.to_string()))
}

/// Per-subject normalized dataset restricted to the configured levels.
pub fn load_dataset(config: &RunConfig) -> Result<Dataset, CliError> {
    let data = Dataset::from_epochs(&normalized(config)?);
    if config.evaluate.levels.is_empty() {
        Ok(data)
    } else {
        Ok(data.restrict_levels(&config.evaluate.levels))
    }
}

pub fn cmd_train(config: &RunConfig) -> Result<PathBuf, CliError> {
    let model = fit_boosted(&load_dataset(config)?, &config.forest)?;
    let path = config.paths.model_file();
    write_text(&path, &model.to_json())?;
    Ok(path)
}

pub fn cv_report_file(config: &RunConfig, mode: EvalMode) -> PathBuf {
    config.paths.output.join(format!("cv_{}.json", mode.name()))
}

pub fn cmd_evaluate(config: &RunConfig, mode: EvalMode) -> Result<(PathBuf, EvaluationReport), CliError> {
    let data = load_dataset(config)?;
    let report = match mode {
        EvalMode::Kfold10 => kfold_cv(&data, 10, &config.forest, config.evaluate.shuffle_seed)?,
        EvalMode::Loso => loso_cv(&data, &config.forest)?,
    };
    let out = EvaluationReport { config_sha256: config.hash(), feature_names: feature_names(), report };
    let path = cv_report_file(config, mode);
    write_json(&path, &out)?;
    Ok((path, out))
}

pub fn cmd_report(config: &RunConfig, kind: ReportKind, mode: EvalMode) -> Result<Vec<PathBuf>, CliError> {
    let out = &config.paths.output;
    let hash = config.hash();
    match kind {
        ReportKind::Confusion => {
            let source = cv_report_file(config, mode);
            let cv: EvaluationReport = serde_json::from_str(&read_text(&source)?)
                .map_err(|e| CliError::Other(format!("{}: {e}", source.display())))?;
            let r = &cv.report;
            let path = out.join(format!("confusion_{}.json", mode.name()));
            write_json(
                &path,
                &ConfusionReport {
                    config_sha256: hash,
                    mode: mode.name(),
                    classes: &r.classes,
                    confusion: &r.confusion,
                    mean_confusion: &r.mean_confusion,
                    per_class_accuracy: &r.per_class_accuracy,
                    overall_accuracy: r.overall_accuracy,
                },
            )?;
            Ok(vec![path])
        }
        ReportKind::Importance => {
            let source = config.paths.model_file();
            let model = ForestModel::from_json(&read_text(&source)?)?;
            let mut importances: Vec<ImportanceEntry> = Feature::ALL
                .iter()
                .zip(&model.importances)
                .map(|(f, &importance)| ImportanceEntry {
                    feature: f.name(),
                    category: format!("{:?}", f.category()),
                    importance,
                })
                .collect();
            importances.sort_by(|a, b| b.importance.total_cmp(&a.importance));
            let path = out.join("importance.json");
            write_json(&path, &ImportanceReport { config_sha256: hash, importances })?;
            Ok(vec![path])
        }
        ReportKind::Anova => {
            let rows = normalized(config)?;
            let features = Feature::ALL
                .iter()
                .map(|&f| match anova_by_level(&rows, f) {
                    Ok(r) => FeatureAnova { feature: f.name(), result: Some(r), error: None },
                    Err(e) => FeatureAnova { feature: f.name(), result: None, error: Some(e.to_string()) },
                })
                .collect();
            let path = out.join("anova.json");
            write_json(&path, &AnovaReport { config_sha256: hash, features })?;
            Ok(vec![path])
        }
        ReportKind::Summary => {
            let rows = normalized(config)?;
            let features = Feature::ALL
                .iter()
                .map(|&f| FeatureSummary { feature: f.name(), groups: group_summary(&rows, f) })
                .collect();
            let path = out.join("summary.json");
            write_json(&path, &SummaryReport { config_sha256: hash, features })?;
            Ok(vec![path])
        }
        ReportKind::Kde => {
            let (xf, yf) = (Feature::Spo2Mean, Feature::CalibratedSpo2Mean);
            let rows = normalized(config)?;
            let raw = load_features(config)?;
            let mut levels: Vec<u8> = rows.iter().map(|e| e.nback_level).collect();
            levels.sort_unstable();
            levels.dedup();
            let mut written = Vec::new();
            let mut grids = Vec::new();
            for level in levels {
                // normalized SpO₂ against the raw change from calibration
                let points: Vec<(f64, f64)> = rows
                    .iter()
                    .zip(&raw)
                    .filter(|(e, _)| e.nback_level == level)
                    .map(|(n, r)| (n.get(xf), r.get(yf)))
                    .collect();
                let grid = kde_2d(&points, DEFAULT_GRID, None).map_err(|e| CliError::Other(e.to_string()))?;
                let name = format!("kde_{level}back.csv");
                let path = out.join(&name);
                write_text(&path, &render_kde_csv(&grid))?;
                written.push(path);
                grids.push(KdeEntry {
                    nback_level: level,
                    file: name,
                    points: points.len(),
                    bandwidths: grid.bandwidths,
                    peak_density: grid.peak_density,
                });
            }
            let index = out.join("kde.json");
            write_json(&index, &KdeReport { config_sha256: hash, x_feature: xf.name(), y_feature: yf.name(), grids })?;
            written.push(index);
            Ok(written)
        }
    }
}

pub fn cmd_score_session(manifest: &Path) -> Result<(SessionManifest, f64), CliError> {
    let m = SessionManifest::read(manifest)?;
    let rate = score_answers(&m)?;
    Ok((m, rate))
}

//! Record plus manifest to analysis epochs.

use rayon::prelude::*;
use thiserror::Error;

use crate::features::{apply_calibration, extract_trial, CalibrationBaseline, EpochFeatures, FeatureError};
use crate::ingest::{epoch_align, IngestError, SessionManifest};
use crate::record::PpgRecord;
use crate::vitals::{extract_vitals, VitalsError, VitalsSeries};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Vitals(#[from] VitalsError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error("manifest is for {manifest}, recording for {record}")]
    Mismatch { manifest: String, record: String },
}

/// Vitals and the raw trial epochs, for callers wanting intermediate series.
pub struct TrialAnalysis {
    pub vitals: VitalsSeries,
    pub epochs: Vec<EpochFeatures>,
}

pub fn analyse_trial(record: &PpgRecord, manifest: &SessionManifest) -> Result<TrialAnalysis, PipelineError> {
    let level_ok = record.nback_level.is_none_or(|l| l == manifest.nback_level);
    let subject_ok = record.subject_id.is_empty() || record.subject_id == manifest.subject_id;
    if !level_ok || !subject_ok {
        return Err(PipelineError::Mismatch {
            manifest: format!("{} level {}", manifest.subject_id, manifest.nback_level),
            record: format!("{} level {:?}", record.subject_id, record.nback_level),
        });
    }
    let slices = epoch_align(record, manifest)?;
    let vitals = extract_vitals(record)?;
    let raw = extract_trial(&vitals, &slices)?;
    let baseline = CalibrationBaseline::from_trial(&raw)?;
    let epochs = apply_calibration(&raw, &baseline, &manifest.subject_id, manifest.nback_level);
    Ok(TrialAnalysis { vitals, epochs })
}

pub fn trial_features(record: &PpgRecord, manifest: &SessionManifest) -> Result<Vec<EpochFeatures>, PipelineError> {
    analyse_trial(record, manifest).map(|t| t.epochs)
}

/// Processes trials in parallel; output keeps input order.
pub fn cohort_features<'a, I>(trials: I) -> Result<Vec<EpochFeatures>, PipelineError>
where
    I: IntoParallelIterator<Item = (&'a PpgRecord, &'a SessionManifest)>,
{
    let per_trial: Vec<Vec<EpochFeatures>> =
        trials.into_par_iter().map(|(r, m)| trial_features(r, m)).collect::<Result<_, _>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

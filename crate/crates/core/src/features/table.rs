use std::path::Path;

use super::{EpochFeatures, Feature, FeatureError, FEATURE_COUNT};

fn header() -> Vec<String> {
    let mut h = vec!["subject_id".to_string(), "nback_level".into(), "epoch_index".into()];
    h.extend(Feature::ALL.iter().map(|f| f.name().to_string()));
    h.push("quality_flags".into());
    h
}

fn table_err(line: u64, msg: impl Into<String>) -> FeatureError {
    FeatureError::Table { line, msg: msg.into() }
}

pub fn render_feature_table(rows: &[EpochFeatures]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header()).expect("in-memory write");
    for r in rows {
        let mut rec = vec![r.subject_id.clone(), r.nback_level.to_string(), r.epoch_index.to_string()];
        rec.extend(r.values.iter().map(|v| v.to_string()));
        rec.push(r.quality_flags.to_string());
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn parse_feature_table(text: &str) -> Result<Vec<EpochFeatures>, FeatureError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let expected = header();
    let got = reader.headers().map_err(|e| table_err(1, e.to_string()))?;
    if got.iter().ne(expected.iter().map(String::as_str)) {
        return Err(table_err(1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| table_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |k: usize| table_err(line, format!("bad {} `{}`", expected[k], field(k)));
        let mut values = [0.0; FEATURE_COUNT];
        for (k, slot) in values.iter_mut().enumerate() {
            *slot = field(3 + k).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| bad(3 + k))?;
        }
        let nback_level: u8 = field(1).parse().ok().filter(|&l: &u8| l <= 3).ok_or_else(|| bad(1))?;
        rows.push(EpochFeatures {
            subject_id: field(0).to_string(),
            nback_level,
            epoch_index: field(2).parse().map_err(|_| bad(2))?,
            values,
            quality_flags: field(3 + FEATURE_COUNT).parse().map_err(|_| bad(3 + FEATURE_COUNT))?,
        });
    }
    Ok(rows)
}

pub fn write_feature_table(path: &Path, rows: &[EpochFeatures]) -> std::io::Result<()> {
    std::fs::write(path, render_feature_table(rows))
}

pub fn read_feature_table(path: &Path) -> Result<Vec<EpochFeatures>, std::io::Error> {
    let text = std::fs::read_to_string(path)?;
    parse_feature_table(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

//! Recording CSV: optional `# key: value` metadata lines, then
//! `t,red,ir,green,sync` and one row per sample.

use std::fmt::Write as _;
use std::path::Path;

use super::{IngestError, FORMAT_VERSION};
use crate::record::PpgRecord;

const HEADER: [&str; 5] = ["t", "red", "ir", "green", "sync"];

/// Renders a record. Sample values use the shortest round-tripping decimal
/// form, so parsing the output reproduces the arrays bit for bit.
pub fn render_recording(record: &PpgRecord) -> String {
    let mut out = String::with_capacity(record.len() * 48 + 128);
    let _ = writeln!(out, "# format_version: {FORMAT_VERSION}");
    let _ = writeln!(out, "# subject_id: {}", record.subject_id);
    if let Some(level) = record.nback_level {
        let _ = writeln!(out, "# nback_level: {level}");
    }
    let _ = writeln!(out, "# sample_rate: {}", record.sample_rate);
    out.push_str(&HEADER.join(","));
    out.push('\n');
    let mut markers = record.sync_markers.iter().peekable();
    for i in 0..record.len() {
        let sync = if markers.peek() == Some(&&i) {
            markers.next();
            1
        } else {
            0
        };
        let t = i as f64 / record.sample_rate;
        let _ = writeln!(out, "{t:.6},{},{},{},{sync}", record.red[i], record.ir[i], record.green[i]);
    }
    out
}

pub fn write_recording(path: &Path, record: &PpgRecord) -> Result<(), IngestError> {
    std::fs::write(path, render_recording(record)).map_err(|source| IngestError::Io { path: path.into(), source })
}

pub fn read_recording(path: &Path) -> Result<PpgRecord, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    parse_recording(&text)
}

fn parse_err(line: usize, msg: impl Into<String>) -> IngestError {
    IngestError::Parse { line, msg: msg.into() }
}

/// Parses recording CSV text. Sync markers are the rising edges of the
/// `sync` column. Without a `sample_rate` line the rate is inferred from `t`.
pub fn parse_recording(text: &str) -> Result<PpgRecord, IngestError> {
    let mut subject_id = String::new();
    let mut nback_level = None;
    let mut sample_rate = None;
    let mut header_seen = false;

    let mut t = Vec::new();
    let mut red = Vec::new();
    let mut ir = Vec::new();
    let mut green = Vec::new();
    let mut sync_markers = Vec::new();
    let mut prev_sync = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        if let Some(meta) = row.strip_prefix('#') {
            if header_seen {
                return Err(parse_err(line, "metadata after header"));
            }
            let Some((key, value)) = meta.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "format_version" => {
                    let v: u32 = value.parse().map_err(|_| parse_err(line, "bad format_version"))?;
                    if v != FORMAT_VERSION {
                        return Err(parse_err(line, format!("unsupported format_version {v}")));
                    }
                }
                "subject_id" => subject_id = value.to_string(),
                "nback_level" => nback_level = Some(value.parse().map_err(|_| parse_err(line, "bad nback_level"))?),
                "sample_rate" => {
                    sample_rate = Some(value.parse::<f64>().map_err(|_| parse_err(line, "bad sample_rate"))?)
                }
                _ => {}
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = row.split(',').map(str::trim).collect();
            if cols != HEADER {
                return Err(parse_err(line, format!("expected header `{}`", HEADER.join(","))));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != HEADER.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", HEADER.len(), fields.len())));
        }
        let num = |k: usize| {
            fields[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("bad {} value `{}`", HEADER[k], fields[k])))
        };
        let time = num(0)?;
        if t.last().is_some_and(|&last| time <= last) {
            return Err(IngestError::Format { line, msg: format!("timestamp {time} is not increasing") });
        }
        let sync = match fields[4] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("sync must be 0 or 1, found `{other}`"))),
        };
        if sync && !prev_sync {
            sync_markers.push(t.len());
        }
        prev_sync = sync;
        t.push(time);
        red.push(num(1)?);
        ir.push(num(2)?);
        green.push(num(3)?);
    }
    if !header_seen {
        return Err(parse_err(text.lines().count().max(1), "missing header"));
    }

    let sample_rate = match sample_rate {
        Some(fs) => fs,
        None if t.len() >= 2 => (t.len() - 1) as f64 / (t[t.len() - 1] - t[0]),
        None => return Err(parse_err(1, "sample_rate absent and fewer than 2 samples")),
    };
    let record = PpgRecord { sample_rate, red, ir, green, sync_markers, subject_id, nback_level };
    record.validate()?;
    Ok(record)
}

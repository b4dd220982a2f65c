//! The corpus manifest: one CSV row per recording with its reference and
//! hypothesis locations plus stratification metadata.

use std::collections::BTreeSet;

use weralign_core::{CorpusManifest, ManifestRow};

use super::FormatError;

pub const MANIFEST_HEADER: &str =
    "file_id,ref_path,hyp_path,sector,sample_rate_hz,duration_s,quarter,num_speakers";

pub fn parse_manifest(bytes: &[u8]) -> Result<CorpusManifest, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);

    let mut records = reader.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec,
        Some(Err(e)) => return Err(FormatError::at(1, format!("unreadable header: {e}"))),
        None => return Err(FormatError::at(1, "empty manifest")),
    };
    let expected: Vec<&str> = MANIFEST_HEADER.split(',').collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(FormatError::at(
            1,
            format!("malformed header, expected {MANIFEST_HEADER:?}"),
        ));
    }

    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, record) in records.enumerate() {
        let line_no = i + 2;
        let record = record.map_err(|e| FormatError::at(line_no, format!("bad row: {e}")))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 8 {
            return Err(FormatError::at(
                line_no,
                format!("expected 8 columns, found {}", record.len()),
            ));
        }
        let file_id = record[0].to_string();
        if file_id.is_empty() {
            return Err(FormatError::at(line_no, "empty file_id"));
        }
        if !seen.insert(file_id.clone()) {
            return Err(FormatError::at(
                line_no,
                format!("duplicate file_id {file_id:?}"),
            ));
        }
        let sample_rate_hz: u32 = record[4].parse().map_err(|_| {
            FormatError::at(line_no, format!("invalid sample_rate_hz {:?}", &record[4]))
        })?;
        if sample_rate_hz == 0 {
            return Err(FormatError::at(line_no, "sample_rate_hz must be positive"));
        }
        let duration_s: f64 = record[5].parse().map_err(|_| {
            FormatError::at(line_no, format!("invalid duration_s {:?}", &record[5]))
        })?;
        if !(duration_s > 0.0) || !duration_s.is_finite() {
            return Err(FormatError::at(line_no, "duration_s must be positive"));
        }
        let num_speakers: u32 = record[7].parse().map_err(|_| {
            FormatError::at(line_no, format!("invalid num_speakers {:?}", &record[7]))
        })?;
        if num_speakers == 0 {
            return Err(FormatError::at(line_no, "num_speakers must be positive"));
        }
        rows.push(ManifestRow {
            file_id,
            ref_path: record[1].to_string(),
            hyp_path: record[2].to_string(),
            sector: record[3].to_string(),
            sample_rate_hz,
            duration_s,
            quarter: record[6].to_string(),
            num_speakers,
        });
    }
    let manifest = CorpusManifest { rows };
    manifest
        .validate()
        .map_err(|e| FormatError::whole(e.to_string()))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_header(rows: &str) -> Vec<u8> {
        format!("{MANIFEST_HEADER}\n{rows}").into_bytes()
    }

    #[test]
    fn well_formed_row_parses() {
        let m = parse_manifest(&with_header(
            "4320211,refs/a.nlp,hyps/a.txt,Technology,44100,3240.5,Q2 2020,5\n",
        ))
        .unwrap();
        assert_eq!(m.rows.len(), 1);
        let row = &m.rows[0];
        assert_eq!(row.sector, "Technology");
        assert_eq!(row.sample_rate_hz, 44_100);
        assert_eq!(row.duration_s, 3240.5);
        assert_eq!(row.quarter, "Q2 2020");
    }

    #[test]
    fn duplicate_file_id_rejected() {
        let err = parse_manifest(&with_header(
            "a,r,h,Technology,44100,10,Q1,2\na,r,h,Financial,16000,10,Q1,2\n",
        ))
        .unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn zero_sample_rate_rejected() {
        let err =
            parse_manifest(&with_header("a,r,h,Technology,0,10,Q1,2\n")).unwrap_err();
        assert!(err.to_string().contains("sample_rate_hz"), "{err}");
    }

    #[test]
    fn zero_duration_rejected() {
        let err =
            parse_manifest(&with_header("a,r,h,Technology,44100,0,Q1,2\n")).unwrap_err();
        assert!(err.to_string().contains("duration_s"), "{err}");
    }

    #[test]
    fn wrong_header_rejected() {
        let err = parse_manifest(b"id,path\n").unwrap_err();
        assert_eq!(err.line(), Some(1));
    }

    #[test]
    fn quoted_fields_are_supported() {
        let m = parse_manifest(&with_header(
            "a,refs/a.nlp,hyps/a.txt,\"Industrial Goods\",16000,100,\"Q1, 2020\",3\n",
        ))
        .unwrap();
        assert_eq!(m.rows[0].quarter, "Q1, 2020");
        assert_eq!(m.rows[0].sector, "Industrial Goods");
    }
}

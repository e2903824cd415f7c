//! PSM table serialization: tab-separated, one header row, UTF-8, LF line
//! endings, floats at six decimal places, `NA` for absent values.

use super::{PsmRecord, PsmSource};
use crate::chem::Peptide;
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

pub const PSM_HEADER: &str =
    "spectrum_id\tsequence\tscore\trank\tsource\tis_decoy\tq_value\tper_position_scores";

/// Write PSMs as TSV. Returns the number of data rows written.
pub fn write_psms<W: Write>(records: &[PsmRecord], mut w: W) -> Result<usize> {
    writeln!(w, "{PSM_HEADER}")?;
    for r in records {
        let q = match r.q_value {
            Some(q) => format!("{q:.6}"),
            None => "NA".to_string(),
        };
        let per_position = if r.per_position_scores.is_empty() {
            "NA".to_string()
        } else {
            r.per_position_scores
                .iter()
                .map(|s| format!("{s:.6}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(
            w,
            "{}\t{}\t{:.6}\t{}\t{}\t{}\t{}\t{}",
            r.spectrum_id, r.peptide, r.score, r.rank, r.source, r.is_decoy, q, per_position
        )?;
    }
    Ok(records.len())
}

/// Read a PSM TSV written by [`write_psms`].
pub fn read_psms<R: BufRead>(reader: R) -> Result<Vec<PsmRecord>> {
    let mut out = Vec::new();
    let mut lines = reader.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse { line: 1, message: "empty PSM table".into() })?;
    if header.trim_end() != PSM_HEADER {
        return Err(Error::Parse { line: 1, message: format!("unexpected header '{header}'") });
    }
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 8 columns, got {}", fields.len()),
            });
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad {what} '{s}'"),
            })
        };
        let peptide = Peptide::parse(fields[1]).map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad sequence '{}': {e}", fields[1]),
        })?;
        let score = parse_f64(fields[2], "score")?;
        let rank = fields[3].parse::<u32>().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad rank '{}'", fields[3]),
        })?;
        let source: PsmSource = fields[4].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad source '{}'", fields[4]),
        })?;
        let is_decoy = match fields[5] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("bad is_decoy '{other}'"),
                })
            }
        };
        let q_value = match fields[6] {
            "NA" => None,
            s => Some(parse_f64(s, "q_value")?),
        };
        let per_position_scores = match fields[7] {
            "NA" => Vec::new(),
            s => s
                .split(',')
                .map(|v| parse_f64(v, "per_position score"))
                .collect::<Result<Vec<_>>>()?,
        };
        out.push(PsmRecord {
            spectrum_id: fields[0].to_string(),
            peptide,
            score,
            rank,
            is_decoy,
            q_value,
            source,
            per_position_scores,
        });
    }
    Ok(out)
}

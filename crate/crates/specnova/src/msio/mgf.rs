//! MGF (Mascot Generic Format) reading and writing.
//!
//! Reads `BEGIN IONS` / `END IONS` blocks with `TITLE=`, `PEPMASS=`,
//! `CHARGE=`, `RTINSECONDS=` headers and `<mz> <intensity>` peak lines.
//! Unknown header keys are ignored. A malformed block is reported as an
//! [`Issue`] and the parser continues with the next block.

use super::{Issue, SpectrumRecord};
use crate::error::Result;
use std::io::{BufRead, Write};

/// Result of parsing one MGF stream.
#[derive(Debug, Default)]
pub struct MgfParse {
    pub spectra: Vec<SpectrumRecord>,
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

#[derive(Default)]
struct Block {
    start_line: usize,
    title: Option<String>,
    pepmass: Option<f64>,
    charge: Option<u32>,
    retention_seconds: Option<f64>,
    peaks: Vec<(f64, f64)>,
    broken: Option<Issue>,
}

/// Parse an MGF stream into spectra plus per-block issues.
pub fn parse_mgf<R: BufRead>(reader: R) -> Result<MgfParse> {
    let mut out = MgfParse::default();
    let mut block: Option<Block> = None;
    let mut ordinal = 0usize;
    let mut line_no = 0usize;

    for line in reader.lines() {
        line_no += 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }

        if line == "BEGIN IONS" {
            if let Some(b) = block.take() {
                out.errors.push(Issue {
                    line: b.start_line,
                    message: "unterminated block (next BEGIN IONS reached)".into(),
                });
            }
            block = Some(Block { start_line: line_no, ..Block::default() });
            continue;
        }

        if line == "END IONS" {
            match block.take() {
                Some(b) => {
                    ordinal += 1;
                    finish_block(b, ordinal, &mut out);
                }
                None => out.errors.push(Issue {
                    line: line_no,
                    message: "END IONS without BEGIN IONS".into(),
                }),
            }
            continue;
        }

        let Some(b) = block.as_mut() else {
            // Content outside any block is ignored (MGF allows bare comments).
            continue;
        };
        if b.broken.is_some() {
            continue;
        }

        if let Some((key, value)) = line.split_once('=') {
            match key.trim().to_ascii_uppercase().as_str() {
                "TITLE" => b.title = Some(value.trim().to_string()),
                "PEPMASS" => {
                    // May carry an intensity after the m/z; second field ignored.
                    let first = value.split_whitespace().next().unwrap_or("");
                    match first.parse::<f64>() {
                        Ok(mz) => b.pepmass = Some(mz),
                        Err(_) => {
                            b.broken = Some(Issue {
                                line: line_no,
                                message: format!("bad PEPMASS '{value}'"),
                            })
                        }
                    }
                }
                "CHARGE" => match parse_charge(value.trim()) {
                    Some(z) => b.charge = Some(z),
                    None => {
                        b.broken = Some(Issue {
                            line: line_no,
                            message: format!("bad CHARGE '{value}'"),
                        })
                    }
                },
                "RTINSECONDS" => b.retention_seconds = value.trim().parse::<f64>().ok(),
                _ => {} // unknown header keys ignored
            }
            continue;
        }

        // Peak line: first two whitespace-separated numbers.
        let mut fields = line.split_whitespace();
        let mz = fields.next().and_then(|f| f.parse::<f64>().ok());
        let intensity = fields.next().and_then(|f| f.parse::<f64>().ok());
        match (mz, intensity) {
            (Some(mz), Some(intensity)) => b.peaks.push((mz, intensity)),
            _ => {
                b.broken = Some(Issue {
                    line: line_no,
                    message: format!("non-numeric peak line '{line}'"),
                })
            }
        }
    }

    if let Some(b) = block.take() {
        out.errors.push(Issue {
            line: b.start_line,
            message: "unterminated block at end of stream".into(),
        });
    }
    Ok(out)
}

fn finish_block(b: Block, ordinal: usize, out: &mut MgfParse) {
    if let Some(issue) = b.broken {
        out.errors.push(issue);
        return;
    }
    let Some(pepmass) = b.pepmass else {
        out.errors.push(Issue { line: b.start_line, message: "missing PEPMASS".into() });
        return;
    };
    if b.peaks.is_empty() {
        out.errors.push(Issue { line: b.start_line, message: "block has no peaks".into() });
        return;
    }
    let id = b.title.unwrap_or_else(|| ordinal.to_string());
    let charge = match b.charge {
        Some(z) => z,
        None => {
            out.warnings.push(Issue {
                line: b.start_line,
                message: format!("spectrum '{id}': no CHARGE, assuming 2+"),
            });
            2
        }
    };
    match SpectrumRecord::new(id, pepmass, charge, b.retention_seconds, b.peaks) {
        Ok(s) => out.spectra.push(s),
        Err(e) => out.errors.push(Issue { line: b.start_line, message: e.to_string() }),
    }
}

fn parse_charge(s: &str) -> Option<u32> {
    // Accept "2", "2+", "+2"; reject negative-mode charges.
    let s = s.trim();
    if s.ends_with('-') || s.starts_with('-') {
        return None;
    }
    let digits = s.trim_start_matches('+').trim_end_matches('+');
    digits.parse::<u32>().ok().filter(|&z| z >= 1)
}

/// Write spectra in MGF form. Inverse of [`parse_mgf`] for valid records.
pub fn write_mgf<W: Write>(spectra: &[SpectrumRecord], mut w: W) -> Result<()> {
    for s in spectra {
        writeln!(w, "BEGIN IONS")?;
        writeln!(w, "TITLE={}", s.id)?;
        writeln!(w, "PEPMASS={}", s.precursor_mz)?;
        writeln!(w, "CHARGE={}+", s.charge)?;
        if let Some(rt) = s.retention_seconds {
            writeln!(w, "RTINSECONDS={rt}")?;
        }
        for &(mz, intensity) in &s.peaks {
            writeln!(w, "{mz} {intensity}")?;
        }
        writeln!(w, "END IONS")?;
    }
    Ok(())
}

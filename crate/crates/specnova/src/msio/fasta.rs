//! FASTA protein parsing. Accession is the first whitespace-delimited
//! token of the header; multi-line sequences are concatenated and
//! uppercased. Records with empty or illegal sequences become [`Issue`]s.

use super::{is_wildcard_residue, Issue, ProteinRecord};
use crate::error::Result;
use std::io::BufRead;

#[derive(Debug, Default)]
pub struct FastaParse {
    pub proteins: Vec<ProteinRecord>,
    pub errors: Vec<Issue>,
}

pub fn parse_fasta<R: BufRead>(reader: R) -> Result<FastaParse> {
    let mut out = FastaParse::default();
    let mut current: Option<(String, String, String, usize)> = None; // accession, description, sequence, header line
    let mut line_no = 0usize;

    for line in reader.lines() {
        line_no += 1;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some(rec) = current.take() {
                flush(rec, &mut out);
            }
            let mut fields = header.split_whitespace();
            let accession = fields.next().unwrap_or("").to_string();
            let description = fields.collect::<Vec<_>>().join(" ");
            current = Some((accession, description, String::new(), line_no));
        } else {
            match current.as_mut() {
                Some((_, _, seq, _)) => seq.push_str(line.trim()),
                None => out.errors.push(Issue {
                    line: line_no,
                    message: "sequence line before any header".into(),
                }),
            }
        }
    }
    if let Some(rec) = current.take() {
        flush(rec, &mut out);
    }
    Ok(out)
}

fn flush((accession, description, sequence, line): (String, String, String, usize), out: &mut FastaParse) {
    let sequence = sequence.to_ascii_uppercase();
    if accession.is_empty() {
        out.errors.push(Issue { line, message: "header without accession".into() });
        return;
    }
    if sequence.is_empty() {
        out.errors.push(Issue {
            line,
            message: format!("record '{accession}' has an empty sequence"),
        });
        return;
    }
    if let Some(bad) = sequence.bytes().find(|&c| !is_legal_residue(c)) {
        out.errors.push(Issue {
            line,
            message: format!("record '{accession}' has illegal residue '{}'", bad as char),
        });
        return;
    }
    out.proteins.push(ProteinRecord { accession, description, sequence });
}

/// Standard residue letters plus the tolerated wildcard set.
fn is_legal_residue(c: u8) -> bool {
    crate::chem::constants::STANDARD_RESIDUES.iter().any(|&(s, _)| s == c)
        || is_wildcard_residue(c)
}

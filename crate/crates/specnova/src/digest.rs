//! In silico enzymatic digestion of proteins into candidate peptides, plus
//! pseudo-reversal decoy generation for target-decoy FDR.

use crate::error::{Error, Result};
use crate::msio::{is_wildcard_residue, ProteinRecord, WildcardPolicy};

/// A cleavage rule: cut C-terminal to any residue in `cleave_after`,
/// optionally suppressed when the next residue is proline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnzymeRule {
    pub name: String,
    pub cleave_after: Vec<u8>,
    pub proline_exception: bool,
}

impl EnzymeRule {
    pub fn new(name: &str, cleave_after: &[u8], proline_exception: bool) -> Result<Self> {
        if cleave_after.is_empty() {
            return Err(Error::InvalidInput("enzyme must cleave after at least one residue".into()));
        }
        Ok(EnzymeRule {
            name: name.to_string(),
            cleave_after: cleave_after.to_vec(),
            proline_exception,
        })
    }

    /// Trypsin: cuts after K and R. The proline exception is off by default;
    /// common tools differ on it, so it stays configurable.
    pub fn trypsin() -> Self {
        EnzymeRule { name: "trypsin".into(), cleave_after: vec![b'K', b'R'], proline_exception: false }
    }

    /// Look up a built-in enzyme by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "trypsin" => Ok(EnzymeRule::trypsin()),
            "trypsin/p" | "trypsin_p" => {
                let mut e = EnzymeRule::trypsin();
                e.name = name.to_ascii_lowercase();
                e.proline_exception = true;
                Ok(e)
            }
            "lys-c" | "lysc" => EnzymeRule::new("lys-c", b"K", false),
            other => Err(Error::InvalidInput(format!("unknown enzyme '{other}'"))),
        }
    }

    fn cleaves_after(&self, residue: u8, next: Option<u8>) -> bool {
        self.cleave_after.contains(&residue)
            && !(self.proline_exception && next == Some(b'P'))
    }
}

/// Digestion bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigestConfig {
    pub max_missed_cleavages: u32,
    pub min_length: usize,
    pub max_length: usize,
}

impl Default for DigestConfig {
    fn default() -> Self {
        DigestConfig { max_missed_cleavages: 2, min_length: 6, max_length: 50 }
    }
}

impl DigestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_length > self.max_length {
            return Err(Error::InvalidInput(format!(
                "min_length {} > max_length {}",
                self.min_length, self.max_length
            )));
        }
        Ok(())
    }
}

/// One digested fragment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigestedPeptide {
    pub sequence: String,
    pub missed_cleavages: u32,
    pub accession: String,
}

/// 1-based positions i where the bond between residues i and i+1 is cut.
/// The position after the final residue is never a site.
pub fn cleavage_sites(sequence: &str, rule: &EnzymeRule) -> Vec<usize> {
    let bytes = sequence.as_bytes();
    let mut sites = Vec::new();
    for i in 0..bytes.len().saturating_sub(1) {
        if rule.cleaves_after(bytes[i], Some(bytes[i + 1])) {
            sites.push(i + 1);
        }
    }
    sites
}

/// Digest one protein into peptides with up to `max_missed_cleavages`
/// retained internal sites, filtered by the length bounds. Wildcard
/// residues split the protein (or drop it, per policy); no peptide ever
/// spans a wildcard.
pub fn digest(
    protein: &ProteinRecord,
    rule: &EnzymeRule,
    cfg: &DigestConfig,
    policy: WildcardPolicy,
) -> Vec<DigestedPeptide> {
    let seq = protein.sequence.as_bytes();
    let has_wildcard = seq.iter().copied().any(is_wildcard_residue);
    if has_wildcard && policy == WildcardPolicy::SkipProtein {
        log::warn!("skipping protein {} (wildcard residues)", protein.accession);
        return Vec::new();
    }

    let mut out = Vec::new();
    for segment in protein
        .sequence
        .split(|c: char| is_wildcard_residue(c as u8))
        .filter(|s| !s.is_empty())
    {
        digest_segment(segment, &protein.accession, rule, cfg, &mut out);
    }
    out
}

fn digest_segment(
    segment: &str,
    accession: &str,
    rule: &EnzymeRule,
    cfg: &DigestConfig,
    out: &mut Vec<DigestedPeptide>,
) {
    let mut boundaries = vec![0usize];
    boundaries.extend(cleavage_sites(segment, rule));
    boundaries.push(segment.len());

    for i in 0..boundaries.len() - 1 {
        let last = (i + 1 + cfg.max_missed_cleavages as usize).min(boundaries.len() - 1);
        for j in i + 1..=last {
            let fragment = &segment[boundaries[i]..boundaries[j]];
            if fragment.len() < cfg.min_length || fragment.len() > cfg.max_length {
                continue;
            }
            out.push(DigestedPeptide {
                sequence: fragment.to_string(),
                missed_cleavages: (j - i - 1) as u32,
                accession: accession.to_string(),
            });
        }
    }
}

/// Pseudo-reversal decoy: reverse all residues except the final one. This
/// preserves the tryptic C-terminal residue, so decoys share the mass and
/// terminal statistics of their targets. A decoy identical to its target
/// (e.g. length <= 2) is flagged for exclusion at index build.
pub fn decoy_peptide(peptide: &str) -> String {
    let mut chars: Vec<char> = peptide.chars().collect();
    let n = chars.len();
    if n > 2 {
        chars[..n - 1].reverse();
    } else if n == 2 {
        // Reversing one residue is the identity; keep as-is (self-decoy).
    }
    chars.into_iter().collect()
}

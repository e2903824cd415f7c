//! Data ingestion and emission: MGF spectra, FASTA proteins, PSM tables,
//! and the optional UniProt proteome fetch.
//!
//! Parsers are streaming and single-consumer per stream; parsed records are
//! immutable. Malformed blocks/records are collected as [`Issue`]s with line
//! numbers instead of aborting the whole stream.

pub mod fasta;
pub mod mgf;
pub mod tsv;
pub mod uniprot;

use crate::chem::Peptide;
use crate::error::{Error, Result};
use std::fmt;

pub use fasta::{parse_fasta, FastaParse};
pub use mgf::{parse_mgf, write_mgf, MgfParse};
pub use tsv::{read_psms, write_psms};
pub use uniprot::{HttpTransport, Transport, UniprotClient};

/// A non-fatal problem found while parsing a stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// One MS/MS spectrum: precursor coordinates plus a centroided peak list.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRecord {
    pub id: String,
    pub precursor_mz: f64,
    pub charge: u32,
    pub retention_seconds: Option<f64>,
    /// (m/z, intensity) pairs, strictly ascending by m/z.
    pub peaks: Vec<(f64, f64)>,
}

impl SpectrumRecord {
    /// Validating constructor: sorts peaks, merges duplicate m/z values
    /// (keeping the larger intensity), and checks the record invariants.
    ///
    /// An empty peak list is representable (the synthetic harness can
    /// produce one under full dropout, and scorers must handle it as a
    /// declared uniform fallback); the MGF parser rejects peak-less blocks
    /// before records are built.
    pub fn new(
        id: String,
        precursor_mz: f64,
        charge: u32,
        retention_seconds: Option<f64>,
        mut peaks: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if !(precursor_mz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "precursor m/z must be positive, got {precursor_mz}"
            )));
        }
        if charge == 0 {
            return Err(Error::InvalidInput("charge must be >= 1".into()));
        }
        for &(mz, intensity) in &peaks {
            if !mz.is_finite() || mz <= 0.0 || !intensity.is_finite() || intensity < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "invalid peak ({mz}, {intensity})"
                )));
            }
        }
        peaks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        peaks.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 = kept.1.max(next.1);
                true
            } else {
                false
            }
        });
        Ok(SpectrumRecord { id, precursor_mz, charge, retention_seconds, peaks })
    }

    /// Neutral (uncharged) precursor mass of this spectrum.
    pub fn neutral_mass(&self) -> f64 {
        precursor_neutral_mass(self.precursor_mz, self.charge)
            .expect("charge validated at construction")
    }

    pub fn max_intensity(&self) -> f64 {
        self.peaks.iter().map(|&(_, i)| i).fold(0.0, f64::max)
    }
}

/// Neutral mass from a measured precursor m/z and charge:
/// `mz * z - z * proton`.
pub fn precursor_neutral_mass(precursor_mz: f64, charge: u32) -> Result<f64> {
    if charge == 0 {
        return Err(Error::InvalidInput("charge must be >= 1".into()));
    }
    let z = charge as f64;
    Ok(precursor_mz * z - z * crate::chem::constants::PROTON)
}

/// One protein sequence from a FASTA database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProteinRecord {
    pub accession: String,
    pub description: String,
    pub sequence: String,
}

/// Residue letters tolerated in protein sequences beyond the standard 20.
/// Peptides spanning these are never generated (see [`crate::digest`]).
pub const WILDCARD_RESIDUES: &[u8] = b"BJOUXZ";

pub fn is_wildcard_residue(c: u8) -> bool {
    WILDCARD_RESIDUES.contains(&c)
}

/// How to treat proteins containing wildcard residues during digestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WildcardPolicy {
    /// Split the protein at wildcard positions; peptides never span one.
    #[default]
    Split,
    /// Drop the whole protein.
    SkipProtein,
}

/// Engine that produced a peptide-spectrum match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsmSource {
    Db,
    Denovo,
    Hybrid,
}

impl fmt::Display for PsmSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsmSource::Db => write!(f, "db"),
            PsmSource::Denovo => write!(f, "denovo"),
            PsmSource::Hybrid => write!(f, "hybrid"),
        }
    }
}

impl std::str::FromStr for PsmSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "db" => Ok(PsmSource::Db),
            "denovo" => Ok(PsmSource::Denovo),
            "hybrid" => Ok(PsmSource::Hybrid),
            other => Err(Error::InvalidInput(format!("unknown PSM source '{other}'"))),
        }
    }
}

/// A peptide-spectrum match.
#[derive(Debug, Clone, PartialEq)]
pub struct PsmRecord {
    pub spectrum_id: String,
    pub peptide: Peptide,
    /// Bidirectional, length-normalized log-probability score.
    pub score: f64,
    pub rank: u32,
    pub is_decoy: bool,
    /// Present only after FDR estimation.
    pub q_value: Option<f64>,
    pub source: PsmSource,
    /// One combined (forward + backward) log-probability per residue.
    pub per_position_scores: Vec<f64>,
}

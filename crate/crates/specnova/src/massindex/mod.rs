//! Mass-sorted peptide store supporting ppm-window precursor queries: the
//! candidate-filtering stage of database search.
//!
//! The index is a flat array sorted by neutral mass. Binary search on both
//! window bounds gives O(log n) queries; after build the index is immutable
//! and freely shareable across threads.

mod cache;

use crate::chem::{expand_modifications, ModSpec, Peptide, Tolerance};
use crate::digest::{decoy_peptide, digest, DigestConfig, EnzymeRule};
use crate::error::Result;
use crate::msio::{ProteinRecord, WildcardPolicy};
use rayon::prelude::*;

/// Modification setup for index building.
#[derive(Debug, Clone, Default)]
pub struct ModSet {
    pub fixed: Vec<ModSpec>,
    pub variable: Vec<ModSpec>,
    pub max_var: usize,
}

/// One modification-expanded peptide with its origins.
#[derive(Debug, Clone, PartialEq)]
pub struct PeptideEntry {
    pub peptide: Peptide,
    pub neutral_mass: f64,
    /// (accession, is_decoy) pairs, deduplicated and sorted.
    pub origin: Vec<(String, bool)>,
    /// Canonical token string; the dedupe and tie-break key.
    pub sequence_key: String,
}

impl PeptideEntry {
    pub fn new(peptide: Peptide, origin: Vec<(String, bool)>) -> Self {
        let neutral_mass = peptide.neutral_mass();
        let sequence_key = peptide.sequence_key();
        PeptideEntry { peptide, neutral_mass, origin, sequence_key }
    }

    /// A sequence occurring in both target and decoy space is counted as
    /// target (standard competition rule), so an entry is a decoy only when
    /// every origin is.
    pub fn is_decoy(&self) -> bool {
        self.origin.iter().all(|&(_, d)| d)
    }
}

/// Summary counters for an index.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IndexStats {
    pub n_entries: usize,
    pub n_targets: usize,
    pub n_decoys: usize,
    pub n_proteins: usize,
    pub min_mass: f64,
    pub max_mass: f64,
}

/// Digested, decoy-augmented, modification-expanded peptides sorted by
/// neutral mass.
#[derive(Debug)]
pub struct MassIndex {
    entries: Vec<PeptideEntry>,
    n_proteins: usize,
}

impl MassIndex {
    /// Digest proteins, optionally generate decoys, expand modifications,
    /// dedupe by sequence, and sort by mass. Deterministic for fixed input.
    pub fn build(
        proteins: &[ProteinRecord],
        rule: &EnzymeRule,
        cfg: &DigestConfig,
        mods: &ModSet,
        with_decoys: bool,
        policy: WildcardPolicy,
    ) -> Result<MassIndex> {
        cfg.validate()?;
        if proteins.is_empty() {
            log::warn!("building index from zero proteins");
        }

        // Digest in parallel, keeping protein order for determinism.
        let digested: Vec<_> = proteins
            .par_iter()
            .map(|p| digest(p, rule, cfg, policy))
            .collect();

        let mut raw: Vec<(String, bool, String)> = Vec::new(); // sequence, is_decoy, accession
        for per_protein in digested {
            for d in per_protein {
                if with_decoys {
                    raw.push((decoy_peptide(&d.sequence), true, d.accession.clone()));
                }
                raw.push((d.sequence, false, d.accession));
            }
        }

        let expanded: Vec<PeptideEntry> = raw
            .par_iter()
            .map(|(seq, is_decoy, accession)| -> Result<Vec<PeptideEntry>> {
                let base = Peptide::parse(seq)?;
                let variants = expand_modifications(&base, &mods.fixed, &mods.variable, mods.max_var)?;
                Ok(variants
                    .into_iter()
                    .map(|p| PeptideEntry::new(p, vec![(accession.clone(), *is_decoy)]))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        Ok(MassIndex::from_entries_with_proteins(expanded, proteins.len()))
    }

    /// Build directly from entries: sorts by mass, merges entries sharing a
    /// sequence key, and dedupes origins.
    pub fn from_entries(entries: Vec<PeptideEntry>) -> MassIndex {
        MassIndex::from_entries_with_proteins(entries, 0)
    }

    fn from_entries_with_proteins(mut entries: Vec<PeptideEntry>, n_proteins: usize) -> MassIndex {
        entries.par_sort_unstable_by(|a, b| {
            a.neutral_mass
                .total_cmp(&b.neutral_mass)
                .then_with(|| a.sequence_key.cmp(&b.sequence_key))
        });
        entries.dedup_by(|next, kept| {
            if next.sequence_key == kept.sequence_key {
                kept.origin.append(&mut next.origin);
                true
            } else {
                false
            }
        });
        for e in entries.iter_mut() {
            e.origin.sort();
            e.origin.dedup();
        }
        MassIndex { entries, n_proteins }
    }

    pub fn entries(&self) -> &[PeptideEntry] {
        &self.entries
    }

    /// All entries whose neutral mass falls in the tolerance window around
    /// `neutral_mass`, ascending by mass.
    pub fn query(&self, neutral_mass: f64, tol: Tolerance) -> Result<&[PeptideEntry]> {
        let (lo, hi) = tol.window(neutral_mass)?;
        let start = self.entries.partition_point(|e| e.neutral_mass < lo);
        let end = self.entries.partition_point(|e| e.neutral_mass <= hi);
        Ok(&self.entries[start..end])
    }

    pub fn stats(&self) -> IndexStats {
        let n_decoys = self.entries.iter().filter(|e| e.is_decoy()).count();
        IndexStats {
            n_entries: self.entries.len(),
            n_targets: self.entries.len() - n_decoys,
            n_decoys,
            n_proteins: self.n_proteins,
            min_mass: self.entries.first().map_or(0.0, |e| e.neutral_mass),
            max_mass: self.entries.last().map_or(0.0, |e| e.neutral_mass),
        }
    }

    /// Serialize to the versioned binary cache format.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        cache::save(self, path)
    }

    /// Load a cache written by [`MassIndex::save`]. Refuses files whose
    /// constants-table hash does not match this build.
    pub fn load(path: &std::path::Path) -> Result<MassIndex> {
        cache::load(path)
    }

    pub(crate) fn parts(&self) -> (&[PeptideEntry], usize) {
        (&self.entries, self.n_proteins)
    }

    pub(crate) fn from_parts(entries: Vec<PeptideEntry>, n_proteins: usize) -> MassIndex {
        MassIndex { entries, n_proteins }
    }
}

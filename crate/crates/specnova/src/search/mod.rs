//! The identification engines: database search, de novo beam search, and
//! hybrid arbitration, plus target-decoy FDR control.
//!
//! Per-spectrum searches are independent; the mass index and knapsack table
//! are immutable shared inputs, so spectra run concurrently without locks.

mod beam;
mod fdr;
mod knapsack;

pub use beam::denovo_beam_search;
pub use fdr::{estimate_fdr, filter_at_fdr};
pub use knapsack::{build_knapsack, KnapsackTable, FINE_GRID, MAX_TABLE_MASS};

use crate::chem::Tolerance;
use crate::error::{Error, Result};
use crate::massindex::MassIndex;
use crate::msio::{PsmRecord, PsmSource, SpectrumRecord};
use crate::scorer::{bidirectional_score, StepScorer};

/// Search-stage settings.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub precursor_tolerance: Tolerance,
    pub beam_width: usize,
    pub max_length: usize,
    pub knapsack_resolution: f64,
    pub fdr_threshold: f64,
    /// How many ranked candidates database search reports per spectrum
    /// (best + runner-up by default).
    pub report_top_k: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            precursor_tolerance: Tolerance::ppm(20.0).expect("static"),
            beam_width: 10,
            max_length: 50,
            knapsack_resolution: 0.0005,
            fdr_threshold: 0.01,
            report_top_k: 2,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beam_width < 1 {
            return Err(Error::InvalidInput("beam width must be >= 1".into()));
        }
        if self.max_length < 1 {
            return Err(Error::InvalidInput("max peptide length must be >= 1".into()));
        }
        if !(self.fdr_threshold >= 0.0) {
            return Err(Error::InvalidInput("FDR threshold must be >= 0".into()));
        }
        Ok(())
    }
}

/// Search one spectrum against the mass index: query the precursor window,
/// score every candidate bidirectionally, and return the top-k ranked
/// matches (rank 1 first). Ties break on the canonical sequence key.
pub fn db_search(
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    index: &MassIndex,
    scorer: &dyn StepScorer,
    cfg: &SearchConfig,
) -> Result<Vec<PsmRecord>> {
    cfg.validate()?;
    if !(precursor_neutral_mass > 0.0) {
        log::debug!(
            "spectrum {}: non-positive precursor neutral mass, empty candidate set",
            spectrum.id
        );
        return Ok(Vec::new());
    }
    let candidates = index.query(precursor_neutral_mass, cfg.precursor_tolerance)?;
    if candidates.is_empty() {
        log::debug!(
            "spectrum {}: empty candidate window at {precursor_neutral_mass:.4}",
            spectrum.id
        );
        return Ok(Vec::new());
    }

    let mut scored = Vec::with_capacity(candidates.len());
    for entry in candidates {
        let bi = bidirectional_score(scorer, spectrum, precursor_neutral_mass, &entry.peptide)?;
        scored.push((bi.total, entry, bi.combined_per_position()));
    }
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| a.1.sequence_key.cmp(&b.1.sequence_key))
    });
    scored.truncate(cfg.report_top_k);

    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, entry, per_position))| PsmRecord {
            spectrum_id: spectrum.id.clone(),
            peptide: entry.peptide.clone(),
            score,
            rank: (i + 1) as u32,
            is_decoy: entry.is_decoy(),
            q_value: None,
            source: PsmSource::Db,
            per_position_scores: per_position,
        })
        .collect())
}

/// Which engine a hybrid decision chose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chosen {
    Db,
    Denovo,
    None,
}

/// Outcome of running both engines on one spectrum.
#[derive(Debug, Clone)]
pub struct HybridDecision {
    pub db_best: Option<PsmRecord>,
    pub denovo_best: Option<PsmRecord>,
    pub chosen: Chosen,
    /// `denovo score - db score` when both engines produced a candidate,
    /// otherwise 0.
    pub margin: f64,
}

impl HybridDecision {
    /// The winning record, if any.
    pub fn winner(&self) -> Option<&PsmRecord> {
        match self.chosen {
            Chosen::Db => self.db_best.as_ref(),
            Chosen::Denovo => self.denovo_best.as_ref(),
            Chosen::None => None,
        }
    }
}

/// Run database search and de novo sequencing with the same scorer and
/// arbitrate: de novo wins only with a strictly better score (or when the
/// database window is empty); ties go to the database.
pub fn hybrid_identify(
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    index: &MassIndex,
    scorer: &dyn StepScorer,
    knapsack: &KnapsackTable,
    cfg: &SearchConfig,
) -> Result<HybridDecision> {
    let db_best = db_search(spectrum, precursor_neutral_mass, index, scorer, cfg)?
        .into_iter()
        .next();
    let denovo_best =
        denovo_beam_search(spectrum, precursor_neutral_mass, scorer, knapsack, cfg)?
            .into_iter()
            .next();

    let (chosen, margin) = match (&db_best, &denovo_best) {
        (Some(db), Some(dn)) => {
            let margin = dn.score - db.score;
            if dn.score > db.score {
                (Chosen::Denovo, margin)
            } else {
                (Chosen::Db, margin)
            }
        }
        (Some(_), None) => (Chosen::Db, 0.0),
        (None, Some(_)) => (Chosen::Denovo, 0.0),
        (None, None) => (Chosen::None, 0.0),
    };
    Ok(HybridDecision { db_best, denovo_best, chosen, margin })
}

//! De novo sequencing by beam search with knapsack mass pruning.
//!
//! Both directions run independently from an empty prefix: each iteration
//! expands every live state over the residue vocabulary, prunes extensions
//! whose remaining mass no suffix can realize, moves mass-complete states
//! to the finished pool, and keeps the `beam_width` best live states.
//! Finished candidates from both passes are rescored with the
//! bidirectional score and ranked. The result is a heuristic: with a
//! narrow beam it is not guaranteed to be the global optimum.

use super::knapsack::KnapsackTable;
use super::SearchConfig;
use crate::chem::{Peptide, ResidueTable, ResidueToken};
use crate::error::Result;
use crate::msio::{PsmRecord, PsmSource, SpectrumRecord};
use crate::scorer::{bidirectional_score, Direction, StepScorer, Vocabulary};

/// One live beam hypothesis.
#[derive(Debug, Clone)]
struct BeamState {
    prefix: Vec<ResidueToken>,
    /// Canonical token string of the prefix; the deterministic tie-break key.
    key: String,
    acc_logprob: f64,
    prefix_mass: f64,
}

/// Sequence a spectrum without a database. Returns up to `beam_width`
/// ranked candidates (rank 1 first), or an empty list when nothing
/// completes within the precursor tolerance.
pub fn denovo_beam_search(
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    scorer: &dyn StepScorer,
    knapsack: &KnapsackTable,
    cfg: &SearchConfig,
) -> Result<Vec<PsmRecord>> {
    cfg.validate()?;
    if !(precursor_neutral_mass > 0.0) {
        log::debug!(
            "spectrum {}: non-positive precursor neutral mass {precursor_neutral_mass}, nothing to sequence",
            spectrum.id
        );
        return Ok(Vec::new());
    }
    if precursor_neutral_mass > knapsack.max_mass() {
        log::debug!(
            "spectrum {}: precursor {precursor_neutral_mass:.3} beyond knapsack table ({:.1})",
            spectrum.id,
            knapsack.max_mass()
        );
        return Ok(Vec::new());
    }

    let mut completed: Vec<Peptide> = Vec::new();
    for direction in [Direction::Forward, Direction::Backward] {
        for tokens in beam_pass(spectrum, precursor_neutral_mass, scorer, knapsack, cfg, direction)? {
            let peptide = match direction {
                Direction::Forward => Peptide::new(tokens)?,
                Direction::Backward => {
                    // Backward prefixes grow from the C-terminus; flip to
                    // N-terminal order before rescoring.
                    let mut t = tokens;
                    t.reverse();
                    Peptide::new(t)?
                }
            };
            completed.push(peptide);
        }
    }

    if completed.is_empty() {
        log::debug!("spectrum {}: no de novo completion", spectrum.id);
        return Ok(Vec::new());
    }

    // Deduplicate candidates found by both passes.
    completed.sort_by_cached_key(|p| p.sequence_key());
    completed.dedup();

    let mut scored: Vec<(f64, Peptide, Vec<f64>)> = Vec::with_capacity(completed.len());
    let half_width = cfg.precursor_tolerance.half_width(precursor_neutral_mass);
    for peptide in completed {
        // Mass match is a hard output constraint.
        if (peptide.neutral_mass() - precursor_neutral_mass).abs() > half_width {
            log::warn!(
                "spectrum {}: dropping off-mass candidate {}",
                spectrum.id,
                peptide
            );
            continue;
        }
        let bi = bidirectional_score(scorer, spectrum, precursor_neutral_mass, &peptide)?;
        scored.push((bi.total, peptide, bi.combined_per_position()));
    }
    scored.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| a.1.sequence_key().cmp(&b.1.sequence_key()))
    });
    scored.truncate(cfg.beam_width);

    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, peptide, per_position))| PsmRecord {
            spectrum_id: spectrum.id.clone(),
            peptide,
            score,
            rank: (i + 1) as u32,
            is_decoy: false,
            q_value: None,
            source: PsmSource::Denovo,
            per_position_scores: per_position,
        })
        .collect())
}

/// One directional pass; returns finished prefixes in expansion order.
fn beam_pass(
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    scorer: &dyn StepScorer,
    knapsack: &KnapsackTable,
    cfg: &SearchConfig,
    direction: Direction,
) -> Result<Vec<Vec<ResidueToken>>> {
    let table = ResidueTable::standard();
    let vocab = Vocabulary::standard();
    let band = cfg.precursor_tolerance.half_width(precursor_neutral_mass);
    let target_residue_mass = precursor_neutral_mass - table.water_mass;

    let mut live = vec![BeamState {
        prefix: Vec::new(),
        key: String::new(),
        acc_logprob: 0.0,
        prefix_mass: 0.0,
    }];
    let mut finished: Vec<Vec<ResidueToken>> = Vec::new();

    for _ in 0..cfg.max_length {
        let mut expansions: Vec<BeamState> = Vec::with_capacity(live.len() * 25);
        for state in &live {
            let dist =
                scorer.step(spectrum, precursor_neutral_mass, &state.prefix, direction)?;

            // Mass-complete states take END and move to the finished pool.
            if !state.prefix.is_empty()
                && (state.prefix_mass - target_residue_mass).abs() <= band
            {
                finished.push(state.prefix.clone());
            }

            for (i, &token) in vocab.residues().iter().enumerate() {
                let new_mass = state.prefix_mass + table.residue_mass(token);
                let remaining = target_residue_mass - new_mass;
                if !knapsack.feasible_in_band(remaining, band) {
                    continue;
                }
                let mut prefix = state.prefix.clone();
                prefix.push(token);
                let mut key = state.key.clone();
                key.push_str(&token.to_string());
                expansions.push(BeamState {
                    prefix,
                    key,
                    acc_logprob: state.acc_logprob + dist.log_prob(i),
                    prefix_mass: new_mass,
                });
            }
        }
        if expansions.is_empty() {
            break;
        }
        expansions.sort_by(|a, b| {
            b.acc_logprob.total_cmp(&a.acc_logprob).then_with(|| a.key.cmp(&b.key))
        });
        expansions.truncate(cfg.beam_width);
        live = expansions;
    }

    // States still live at max length may themselves be mass-complete.
    for state in &live {
        if !state.prefix.is_empty() && (state.prefix_mass - target_residue_mass).abs() <= band {
            finished.push(state.prefix.clone());
        }
    }

    Ok(finished)
}

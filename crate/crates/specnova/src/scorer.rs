//! Step-conditional scoring: the probability of a peptide given its
//! spectrum factorizes into one conditional per residue plus a final END
//! step, and a sequence score is the sum of the step log-probabilities
//! normalized by residue count. Candidates are scored in both directions
//! and the two totals are added.
//!
//! The [`StepScorer`] trait is the seam where any model honoring this
//! contract plugs in; [`IonEvidenceScorer`] is the built-in deterministic
//! reference implementation driven by b/y fragment-ion evidence.

use crate::chem::{residue_vocabulary, Peptide, ResidueTable, ResidueToken, Tolerance};
use crate::error::{Error, Result};
use crate::msio::SpectrumRecord;
use std::sync::OnceLock;

/// Number of classes a step distribution ranges over: 24 residue tokens
/// plus END.
pub const VOCAB_SIZE: usize = 25;

/// Index of the END class.
pub const END_INDEX: usize = 24;

/// The fixed scoring vocabulary: 24 residue tokens in stable order, END last.
pub struct Vocabulary {
    residues: Vec<ResidueToken>,
}

impl Vocabulary {
    pub fn standard() -> &'static Vocabulary {
        static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
        VOCAB.get_or_init(|| Vocabulary { residues: residue_vocabulary() })
    }

    /// The residue tokens, in index order (END is implicit at [`END_INDEX`]).
    pub fn residues(&self) -> &[ResidueToken] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        VOCAB_SIZE
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, token: ResidueToken) -> Option<usize> {
        self.residues.iter().position(|&t| t == token)
    }
}

/// Log-probabilities over the vocabulary for one sequencing step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    log_probs: [f64; VOCAB_SIZE],
    /// Set when the scorer had no usable evidence and fell back to the
    /// uniform distribution (declared, not silent).
    pub uniform_fallback: bool,
}

impl StepDistribution {
    /// Normalize non-negative evidence with epsilon smoothing:
    /// `P(t) = (e(t) + eps) / sum(e + eps)`.
    pub fn from_evidence(evidence: &[f64; VOCAB_SIZE], epsilon: f64) -> StepDistribution {
        let total: f64 = evidence.iter().map(|e| e + epsilon).sum();
        let mut log_probs = [0.0; VOCAB_SIZE];
        for (lp, e) in log_probs.iter_mut().zip(evidence) {
            *lp = ((e + epsilon) / total).ln();
        }
        StepDistribution { log_probs, uniform_fallback: false }
    }

    pub fn uniform() -> StepDistribution {
        StepDistribution {
            log_probs: [(1.0 / VOCAB_SIZE as f64).ln(); VOCAB_SIZE],
            uniform_fallback: true,
        }
    }

    pub fn log_probs(&self) -> &[f64; VOCAB_SIZE] {
        &self.log_probs
    }

    pub fn log_prob(&self, index: usize) -> f64 {
        self.log_probs[index]
    }

    pub fn log_prob_end(&self) -> f64 {
        self.log_probs[END_INDEX]
    }

    /// Index of the most probable class, ties to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..VOCAB_SIZE {
            if self.log_probs[i] > self.log_probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Which terminus the prefix grows from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Prefix grows from the N-terminus.
    Forward,
    /// Prefix grows from the C-terminus.
    Backward,
}

/// A step-conditional scorer: given a spectrum, the precursor neutral mass,
/// and the residues predicted so far, produce a distribution over the next
/// class. Implementations must be deterministic for fixed inputs and
/// direction-aware.
pub trait StepScorer: Send + Sync {
    fn step(
        &self,
        spectrum: &SpectrumRecord,
        precursor_neutral_mass: f64,
        prefix: &[ResidueToken],
        direction: Direction,
    ) -> Result<StepDistribution>;
}

/// Parameters of the ion-evidence reference scorer.
#[derive(Debug, Clone, Copy)]
pub struct IonEvidenceParams {
    pub fragment_tolerance: Tolerance,
    pub smoothing_epsilon: f64,
    pub b_weight: f64,
    pub y_weight: f64,
    /// Window for the END (mass-complete) decision; by convention the
    /// precursor tolerance.
    pub end_mass_tolerance: Tolerance,
}

impl Default for IonEvidenceParams {
    fn default() -> Self {
        IonEvidenceParams {
            fragment_tolerance: Tolerance::da(0.5).expect("static"),
            smoothing_epsilon: 0.01,
            b_weight: 1.0,
            y_weight: 1.0,
            end_mass_tolerance: Tolerance::ppm(20.0).expect("static"),
        }
    }
}

impl IonEvidenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.smoothing_epsilon > 0.0) {
            return Err(Error::InvalidInput("smoothing epsilon must be > 0".into()));
        }
        if self.b_weight < 0.0 || self.y_weight < 0.0 {
            return Err(Error::InvalidInput("ion weights must be >= 0".into()));
        }
        if self.b_weight == 0.0 && self.y_weight == 0.0 {
            return Err(Error::InvalidInput("at least one ion weight must be positive".into()));
        }
        Ok(())
    }
}

/// Deterministic scorer: the evidence for appending residue `r` is the best
/// normalized peak intensity near its prefix-anchored ion and near the
/// complementary ion, `e(r) = b_weight * I_b + y_weight * I_y`. END gets
/// evidence 1 exactly when the prefix mass plus water completes the
/// precursor within tolerance. Probabilities are epsilon-smoothed, so a
/// missing ion costs heavily but never yields -inf.
pub struct IonEvidenceScorer {
    params: IonEvidenceParams,
    table: &'static ResidueTable,
}

impl IonEvidenceScorer {
    pub fn new(params: IonEvidenceParams) -> Result<Self> {
        params.validate()?;
        Ok(IonEvidenceScorer { params, table: ResidueTable::standard() })
    }

    pub fn params(&self) -> &IonEvidenceParams {
        &self.params
    }

    /// Max normalized intensity among peaks within the fragment tolerance
    /// of `probe`, or 0 when no peak matches.
    fn best_match(&self, spectrum: &SpectrumRecord, max_intensity: f64, probe: f64) -> f64 {
        let w = self.params.fragment_tolerance.half_width(probe);
        let lo = probe - w;
        let hi = probe + w;
        let start = spectrum.peaks.partition_point(|&(mz, _)| mz < lo);
        let mut best = 0.0f64;
        for &(mz, intensity) in &spectrum.peaks[start..] {
            if mz > hi {
                break;
            }
            best = best.max(intensity / max_intensity);
        }
        best
    }
}

impl StepScorer for IonEvidenceScorer {
    fn step(
        &self,
        spectrum: &SpectrumRecord,
        precursor_neutral_mass: f64,
        prefix: &[ResidueToken],
        direction: Direction,
    ) -> Result<StepDistribution> {
        let max_intensity = spectrum.max_intensity();
        if spectrum.peaks.is_empty() || max_intensity <= 0.0 {
            return Ok(StepDistribution::uniform());
        }

        let table = self.table;
        let proton = table.proton_mass;
        let water = table.water_mass;
        let prefix_sum = table.residue_sum(prefix);

        let mut evidence = [0.0f64; VOCAB_SIZE];
        for (i, &token) in Vocabulary::standard().residues().iter().enumerate() {
            let extended = prefix_sum + table.residue_mass(token);
            // The prefix-anchored series is b when growing from the
            // N-terminus and y when growing from the C-terminus; the
            // complementary probe covers the rest of the precursor.
            let (prefix_probe, complement_probe) = match direction {
                Direction::Forward => (
                    extended + proton,
                    precursor_neutral_mass - extended + proton,
                ),
                Direction::Backward => (
                    extended + water + proton,
                    precursor_neutral_mass - water - extended + proton,
                ),
            };
            let (i_b, i_y) = match direction {
                Direction::Forward => (
                    self.best_match(spectrum, max_intensity, prefix_probe),
                    self.best_match(spectrum, max_intensity, complement_probe),
                ),
                Direction::Backward => (
                    self.best_match(spectrum, max_intensity, complement_probe),
                    self.best_match(spectrum, max_intensity, prefix_probe),
                ),
            };
            evidence[i] = self.params.b_weight * i_b + self.params.y_weight * i_y;
        }

        let end_error = (prefix_sum + water - precursor_neutral_mass).abs();
        if end_error <= self.params.end_mass_tolerance.half_width(precursor_neutral_mass) {
            evidence[END_INDEX] = 1.0;
        }

        Ok(StepDistribution::from_evidence(&evidence, self.params.smoothing_epsilon))
    }
}

/// Build a scorer by configured name. `ion_evidence` is the built-in.
pub fn scorer_by_name(name: &str, params: IonEvidenceParams) -> Result<Box<dyn StepScorer>> {
    match name {
        "ion_evidence" => Ok(Box::new(IonEvidenceScorer::new(params)?)),
        other => Err(Error::Config(format!("unknown scorer '{other}'"))),
    }
}

/// Score of one peptide in one direction: per-residue step log-probs plus a
/// final END step, normalized by residue count.
///
/// `per_position[i] = log P(token_i | tokens_<i, spectrum)`, and
/// `total = (sum(per_position) + log P(END | tokens, spectrum)) / len`.
pub fn sequence_score(
    scorer: &dyn StepScorer,
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    peptide: &Peptide,
    direction: Direction,
) -> Result<(f64, Vec<f64>)> {
    let vocab = Vocabulary::standard();
    let tokens = peptide.tokens();
    let mut per_position = Vec::with_capacity(tokens.len());
    for (i, &token) in tokens.iter().enumerate() {
        let dist = scorer
            .step(spectrum, precursor_neutral_mass, &tokens[..i], direction)
            .map_err(|e| Error::Scorer { position: i, source: Box::new(e) })?;
        let idx = vocab
            .index_of(token)
            .ok_or_else(|| Error::InvalidResidue(token.to_string()))?;
        per_position.push(dist.log_prob(idx));
    }
    let end = scorer
        .step(spectrum, precursor_neutral_mass, tokens, direction)
        .map_err(|e| Error::Scorer { position: tokens.len(), source: Box::new(e) })?;
    let total = (per_position.iter().sum::<f64>() + end.log_prob_end()) / tokens.len() as f64;
    Ok((total, per_position))
}

/// Forward plus backward sequence scores. The backward pass scores the
/// reversed peptide with a C-terminus-anchored prefix, so both directions
/// see the same ions through opposite series.
#[derive(Debug, Clone, PartialEq)]
pub struct BidirectionalScore {
    pub total: f64,
    /// Forward per-position logs, N-terminal order.
    pub forward: Vec<f64>,
    /// Backward per-position logs, C-terminal order (index 0 is the
    /// C-terminal residue).
    pub backward: Vec<f64>,
}

impl BidirectionalScore {
    /// One combined log-probability per residue position (N-terminal
    /// order): forward score plus the aligned backward score.
    pub fn combined_per_position(&self) -> Vec<f64> {
        let n = self.forward.len();
        (0..n).map(|i| self.forward[i] + self.backward[n - 1 - i]).collect()
    }
}

pub fn bidirectional_score(
    scorer: &dyn StepScorer,
    spectrum: &SpectrumRecord,
    precursor_neutral_mass: f64,
    peptide: &Peptide,
) -> Result<BidirectionalScore> {
    let (f_total, forward) =
        sequence_score(scorer, spectrum, precursor_neutral_mass, peptide, Direction::Forward)?;
    let reversed = peptide.reversed();
    let (b_total, backward) =
        sequence_score(scorer, spectrum, precursor_neutral_mass, &reversed, Direction::Backward)?;
    Ok(BidirectionalScore { total: f_total + b_total, forward, backward })
}

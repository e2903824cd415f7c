//! Accuracy metrics: mass-based per-position matching between target and
//! predicted peptides, and recall reports at the amino acid and peptide
//! level.

use crate::chem::{Peptide, ResidueTable, Tolerance};
use crate::error::Result;
use std::collections::BTreeMap;
use std::io::Write;

/// Residue masses must agree this tightly for two positions to match.
const RESIDUE_MASS_TOL: f64 = 1e-4;

/// Count matched positions between target and prediction.
///
/// Position j of the prediction matches position i of the target when the
/// residue masses are equal (1e-4 Da) and the prefix masses before them
/// differ by at most `fragment_tol`. A two-pointer sweep over the two
/// prefix-mass arrays pairs positions greedily; isobaric substitutions
/// (I/L) therefore count as matches, while shifted segments do not.
pub fn match_positions(target: &Peptide, predicted: &Peptide, fragment_tol: Tolerance) -> usize {
    let table = ResidueTable::standard();
    let masses = |p: &Peptide| -> (Vec<f64>, Vec<f64>) {
        let mut prefix = Vec::with_capacity(p.len());
        let mut masses = Vec::with_capacity(p.len());
        let mut acc = 0.0;
        for &t in p.tokens() {
            prefix.push(acc);
            let m = table.residue_mass(t);
            masses.push(m);
            acc += m;
        }
        (prefix, masses)
    };
    let (prefix_t, mass_t) = masses(target);
    let (prefix_p, mass_p) = masses(predicted);

    let mut matched = 0;
    let mut i = 0;
    let mut j = 0;
    while i < mass_t.len() && j < mass_p.len() {
        let tol = fragment_tol.half_width(prefix_t[i].max(1.0));
        if (prefix_t[i] - prefix_p[j]).abs() <= tol
            && (mass_t[i] - mass_p[j]).abs() <= RESIDUE_MASS_TOL
        {
            matched += 1;
            i += 1;
            j += 1;
        } else if prefix_t[i] <= prefix_p[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    matched
}

/// Recall for one target-length bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBreakdown {
    pub length: usize,
    pub n_pairs: usize,
    pub aa_recall: f64,
    pub peptide_recall: f64,
}

/// Aggregate recall over a set of (target, prediction) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub aa_recall: f64,
    pub peptide_recall: f64,
    pub n_spectra: usize,
    pub n_predicted: usize,
    pub matched_aa: usize,
    pub total_target_aa: usize,
    pub per_length: Vec<LengthBreakdown>,
    /// False when there were no pairs (zero denominators).
    pub valid: bool,
}

/// Compute recalls over pairs; a missing prediction contributes zero
/// matches. Amino acid recall is total matched positions over total target
/// length; peptide recall is the fraction of targets matched end to end.
pub fn evaluate(pairs: &[(Peptide, Option<Peptide>)], fragment_tol: Tolerance) -> EvalReport {
    let mut matched_aa = 0usize;
    let mut total_target_aa = 0usize;
    let mut full = 0usize;
    let mut n_predicted = 0usize;
    let mut buckets: BTreeMap<usize, (usize, usize, usize, usize)> = BTreeMap::new();

    for (target, predicted) in pairs {
        let len = target.len();
        total_target_aa += len;
        let m = match predicted {
            Some(p) => {
                n_predicted += 1;
                match_positions(target, p, fragment_tol)
            }
            None => 0,
        };
        matched_aa += m;
        let is_full = m == len;
        full += is_full as usize;
        let b = buckets.entry(len).or_insert((0, 0, 0, 0));
        b.0 += 1;
        b.1 += len;
        b.2 += m;
        b.3 += is_full as usize;
    }

    let valid = !pairs.is_empty();
    EvalReport {
        aa_recall: if total_target_aa > 0 { matched_aa as f64 / total_target_aa as f64 } else { 0.0 },
        peptide_recall: if valid { full as f64 / pairs.len() as f64 } else { 0.0 },
        n_spectra: pairs.len(),
        n_predicted,
        matched_aa,
        total_target_aa,
        per_length: buckets
            .into_iter()
            .map(|(length, (n, aa_total, aa_match, full))| LengthBreakdown {
                length,
                n_pairs: n,
                aa_recall: if aa_total > 0 { aa_match as f64 / aa_total as f64 } else { 0.0 },
                peptide_recall: full as f64 / n as f64,
            })
            .collect(),
        valid,
    }
}

/// Write a report as TSV: one `all` row plus one row per target length.
pub fn write_eval_tsv<W: Write>(report: &EvalReport, mut w: W) -> Result<()> {
    writeln!(w, "scope\tn_pairs\tn_predicted\tmatched_aa\ttarget_aa\taa_recall\tpeptide_recall")?;
    writeln!(
        w,
        "all\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
        report.n_spectra,
        report.n_predicted,
        report.matched_aa,
        report.total_target_aa,
        report.aa_recall,
        report.peptide_recall
    )?;
    for b in &report.per_length {
        writeln!(
            w,
            "len={}\t{}\t\t\t\t{:.6}\t{:.6}",
            b.length, b.n_pairs, b.aa_recall, b.peptide_recall
        )?;
    }
    Ok(())
}

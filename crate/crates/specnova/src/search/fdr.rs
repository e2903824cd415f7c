//! Target-decoy false discovery rate estimation and q-value assignment.

use crate::msio::PsmRecord;

/// Assign q-values by target-decoy competition.
///
/// At each score threshold t, `FDR(t) = #decoys >= t / max(1, #targets >= t)`;
/// a PSM's q-value is the minimum FDR over all thresholds at or below its
/// score. Expects one best (rank-1) PSM per spectrum. Decoys receive
/// q-values too; [`filter_at_fdr`] excludes them from accepted output.
/// Input order is preserved.
pub fn estimate_fdr(mut psms: Vec<PsmRecord>) -> Vec<PsmRecord> {
    if psms.is_empty() {
        return psms;
    }

    let mut order: Vec<usize> = (0..psms.len()).collect();
    order.sort_by(|&a, &b| psms[b].score.total_cmp(&psms[a].score));

    // Walk descending score groups (ties share one threshold), computing
    // the raw FDR after including the whole group.
    let mut raw_fdr = vec![0.0f64; psms.len()];
    let mut targets = 0usize;
    let mut decoys = 0usize;
    let mut g = 0;
    while g < order.len() {
        let mut h = g;
        while h < order.len() && psms[order[h]].score == psms[order[g]].score {
            if psms[order[h]].is_decoy {
                decoys += 1;
            } else {
                targets += 1;
            }
            h += 1;
        }
        let fdr = decoys as f64 / targets.max(1) as f64;
        for &idx in &order[g..h] {
            raw_fdr[idx] = fdr;
        }
        g = h;
    }

    // q-value: running minimum from the bottom of the sorted list.
    let mut q_min = f64::INFINITY;
    for &idx in order.iter().rev() {
        q_min = q_min.min(raw_fdr[idx]);
        psms[idx].q_value = Some(q_min);
    }
    psms
}

/// Accepted identifications: target PSMs with `q <= threshold`, input
/// order preserved.
pub fn filter_at_fdr(psms: &[PsmRecord], threshold: f64) -> Vec<PsmRecord> {
    psms.iter()
        .filter(|p| !p.is_decoy && p.q_value.is_some_and(|q| q <= threshold))
        .cloned()
        .collect()
}

//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its elapsed time (run with `--nocapture` to see them). Every
//! expected value is either hand-derived, computed by an independent
//! oracle implemented in this file, or a closed form.

use specnova::chem::{
    residue_vocabulary, IonKind, Peptide, ResidueTable, ResidueToken, Tolerance,
};
use specnova::digest::{cleavage_sites, decoy_peptide, digest, DigestConfig, EnzymeRule};
use specnova::eval::evaluate;
use specnova::massindex::{MassIndex, PeptideEntry};
use specnova::msio::{ProteinRecord, PsmRecord, PsmSource, SpectrumRecord, WildcardPolicy};
use specnova::scorer::{
    bidirectional_score, sequence_score, Direction, IonEvidenceParams, IonEvidenceScorer,
    StepDistribution, StepScorer, Vocabulary,
};
use specnova::search::{
    build_knapsack, db_search, denovo_beam_search, estimate_fdr, filter_at_fdr, hybrid_identify,
    Chosen, KnapsackTable, SearchConfig,
};
use specnova::synth::{synth_spectrum, DropoutSpec, NoiseSpec};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn table() -> &'static ResidueTable {
    ResidueTable::standard()
}

fn pass(criterion: u32, what: &str, t: Instant) {
    eprintln!("criterion {criterion:2} PASS — {what} ({:.2}s)", t.elapsed().as_secs_f64());
}

/// Perfect singly-charged b/y spectrum of a peptide, intensity 1.
fn perfect_spectrum(peptide: &Peptide, charge: u32) -> SpectrumRecord {
    let mut s = synth_spectrum(
        peptide,
        charge,
        &[IonKind::B, IonKind::Y],
        Default::default(),
        None,
        None,
    )
    .unwrap();
    s.id = peptide.to_string();
    s
}

/// The scorer used by the synthetic end-to-end criteria: 0.01 Da fragment
/// tolerance, defaults otherwise.
fn tight_scorer() -> IonEvidenceScorer {
    IonEvidenceScorer::new(IonEvidenceParams {
        fragment_tolerance: Tolerance::da(0.01).unwrap(),
        ..Default::default()
    })
    .unwrap()
}

fn vocabulary_masses() -> Vec<f64> {
    residue_vocabulary().iter().map(|&t| table().residue_mass(t)).collect()
}

fn standard_knapsack(max_mass: f64) -> KnapsackTable {
    build_knapsack(&vocabulary_masses(), max_mass, 0.0005).unwrap()
}

/// Random tryptic peptide: interior residues avoid K/R, the terminus is K
/// or R.
fn random_tryptic(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Peptide {
    const INTERIOR: &[u8] = b"ACDEFGHILMNPQSTVWY";
    let len = rng.gen_range(min_len..=max_len);
    let mut seq: Vec<u8> = (0..len - 1).map(|_| *INTERIOR.choose(rng).unwrap()).collect();
    seq.push(if rng.gen_bool(0.5) { b'K' } else { b'R' });
    Peptide::parse(std::str::from_utf8(&seq).unwrap()).unwrap()
}

// ---------------------------------------------------------------------
// Criterion 1: mass arithmetic
// ---------------------------------------------------------------------

#[test]
fn criterion_01_mass_arithmetic() {
    let t0 = Instant::now();

    let p = Peptide::parse("PEPTIDE").unwrap();
    assert!((table().peptide_mass(&p) - 799.35995).abs() <= 1e-4);

    // b/y complementarity for 1,000 random peptides to 1e-6 Da.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let vocab = residue_vocabulary();
    for _ in 0..1000 {
        let len = rng.gen_range(2..=30);
        let tokens: Vec<ResidueToken> =
            (0..len).map(|_| *vocab.choose(&mut rng).unwrap()).collect();
        let p = Peptide::new(tokens).unwrap();
        let neutral = table().peptide_mass(&p);
        let ions = table().fragment_mzs(&p, &[IonKind::B, IonKind::Y], 1).unwrap();
        for i in 1..p.len() {
            let b = ions.iter().find(|x| x.kind == IonKind::B && x.index == i).unwrap();
            let y = ions.iter().find(|x| x.kind == IonKind::Y && x.index == p.len() - i).unwrap();
            assert!(
                (b.mz + y.mz - (neutral + 2.0 * table().proton_mass)).abs() < 1e-6,
                "complementarity failed for {p} at cut {i}"
            );
        }
    }

    assert!(t0.elapsed().as_secs_f64() < 1.0, "criterion 1 must run in < 1 s");
    pass(1, "peptide mass and b/y complementarity", t0);
}

// ---------------------------------------------------------------------
// Criterion 2: digestion vs brute-force boundary oracle
// ---------------------------------------------------------------------

/// Independent digestion oracle: enumerate all substrings and keep those
/// whose boundaries are cleavage sites or (segment) termini, that span no
/// wildcard, and that hold at most `max_missed` internal sites.
fn digest_oracle(
    protein: &ProteinRecord,
    rule: &EnzymeRule,
    cfg: &DigestConfig,
) -> Vec<(String, u32)> {
    let seq = protein.sequence.as_bytes();
    let n = seq.len();
    let sites: std::collections::HashSet<usize> =
        cleavage_sites(&protein.sequence, rule).into_iter().collect();
    let wildcard =
        |i: usize| -> bool { specnova::msio::is_wildcard_residue(seq[i]) };

    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..=n {
            let left_ok = a == 0 || sites.contains(&a) || wildcard(a - 1);
            let right_ok = b == n || sites.contains(&b) || wildcard(b);
            if !left_ok || !right_ok {
                continue;
            }
            if (a..b).any(wildcard) {
                continue;
            }
            let len = b - a;
            if len < cfg.min_length || len > cfg.max_length {
                continue;
            }
            let internal = (a + 1..b).filter(|p| sites.contains(p)).count() as u32;
            if internal > cfg.max_missed_cleavages {
                continue;
            }
            out.push((protein.sequence[a..b].to_string(), internal));
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_02_digestion_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    const LETTERS: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";
    const WILDCARDS: &[u8] = b"BJOUXZ";
    let rule = EnzymeRule::trypsin();

    for case in 0..500 {
        let len = rng.gen_range(1..=200);
        let mut seq: Vec<u8> = (0..len).map(|_| *LETTERS.choose(&mut rng).unwrap()).collect();
        if rng.gen_bool(0.1) {
            for _ in 0..rng.gen_range(1..=3usize) {
                let pos = rng.gen_range(0..seq.len());
                seq[pos] = *WILDCARDS.choose(&mut rng).unwrap();
            }
        }
        let protein = ProteinRecord {
            accession: format!("P{case}"),
            description: String::new(),
            sequence: String::from_utf8(seq).unwrap(),
        };
        for missed in 0..=2 {
            let cfg = DigestConfig {
                max_missed_cleavages: missed,
                min_length: if case % 2 == 0 { 1 } else { 4 },
                max_length: if case % 3 == 0 { 30 } else { 200 },
            };
            let mut got: Vec<(String, u32)> = digest(&protein, &rule, &cfg, WildcardPolicy::Split)
                .into_iter()
                .map(|d| (d.sequence, d.missed_cleavages))
                .collect();
            got.sort();
            let expect = digest_oracle(&protein, &rule, &cfg);
            assert_eq!(got, expect, "digest mismatch on {} missed={missed}", protein.accession);
        }
    }

    assert!(t0.elapsed().as_secs_f64() < 10.0, "criterion 2 must run in < 10 s");
    pass(2, "digest equals brute-force boundary oracle, 500 proteins x 3 settings", t0);
}

// ---------------------------------------------------------------------
// Criterion 3: index query vs linear scan
// ---------------------------------------------------------------------

#[test]
fn criterion_03_index_query_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let vocab = residue_vocabulary();

    let entries: Vec<PeptideEntry> = (0..100_000)
        .map(|i| {
            let len = rng.gen_range(6..=25);
            let tokens: Vec<ResidueToken> =
                (0..len).map(|_| *vocab.choose(&mut rng).unwrap()).collect();
            PeptideEntry::new(Peptide::new(tokens).unwrap(), vec![(format!("P{i}"), false)])
        })
        .collect();
    // Keep an independent copy for the linear-scan oracle.
    let oracle_pool: Vec<(f64, String)> =
        entries.iter().map(|e| (e.neutral_mass, e.sequence_key.clone())).collect();
    let index = MassIndex::from_entries(entries);

    let mut mismatches = 0;
    for probe in 0..1000 {
        let mass = rng.gen_range(300.0..3500.0);
        let (tol, lo, hi) = if probe % 2 == 0 {
            let ppm = rng.gen_range(0.0..50.0);
            // The window definition, written out.
            (Tolerance::ppm(ppm).unwrap(), mass - mass * ppm * 1e-6, mass + mass * ppm * 1e-6)
        } else {
            let da = rng.gen_range(0.0..2.0);
            (Tolerance::da(da).unwrap(), mass - da, mass + da)
        };

        let mut got: Vec<&str> =
            index.query(mass, tol).unwrap().iter().map(|e| e.sequence_key.as_str()).collect();
        got.sort_unstable();
        let mut expect: Vec<&str> = oracle_pool
            .iter()
            .filter(|(m, _)| *m >= lo && *m <= hi)
            .map(|(_, k)| k.as_str())
            .collect();
        expect.sort_unstable();
        if got != expect {
            mismatches += 1;
        }
        // Window-membership guarantee on every returned candidate.
        for e in index.query(mass, tol).unwrap() {
            assert!((e.neutral_mass - mass).abs() <= tol.half_width(mass) + 1e-12);
        }
    }
    assert_eq!(mismatches, 0, "query must equal linear scan on all 1000 probes");

    assert!(t0.elapsed().as_secs_f64() < 10.0, "criterion 3 must run in < 10 s");
    pass(3, "index query equals linear scan, 1000 probes over 1e5 entries", t0);
}

// ---------------------------------------------------------------------
// Criterion 4: knapsack vs exhaustive multiset enumeration
// ---------------------------------------------------------------------

/// Exhaustive oracle: enumerate every multiset of residue masses with sum
/// <= 600 Da + resolution and mark all bins within one resolution unit of
/// each sum, in exact integer microdaltons.
fn knapsack_oracle(masses_uda: &[i64], res_uda: i64, n_bins: usize) -> Vec<bool> {
    let mut feasible = vec![false; n_bins];
    let limit = (n_bins as i64 - 1) * res_uda + res_uda;
    let mut sorted = masses_uda.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    fn mark(feasible: &mut [bool], sum: i64, res: i64) {
        let k_lo = ((sum + res - 1) / res - 1).max(0);
        let k_hi = sum / res + 1;
        for k in k_lo..=k_hi.min(feasible.len() as i64 - 1) {
            feasible[k as usize] = true;
        }
    }

    fn dfs(masses: &[i64], start: usize, sum: i64, limit: i64, res: i64, feasible: &mut [bool]) {
        for i in start..masses.len() {
            let next = sum + masses[i];
            if next > limit {
                break; // masses sorted ascending
            }
            mark(feasible, next, res);
            dfs(masses, i, next, limit, res, feasible);
        }
    }

    mark(&mut feasible, 0, res_uda);
    dfs(&sorted, 0, 0, limit, res_uda, &mut feasible);
    feasible
}

#[test]
fn criterion_04_knapsack_oracle() {
    let t0 = Instant::now();
    let resolution: f64 = 0.0005;
    let max_mass = 600.0;
    let knapsack = standard_knapsack(max_mass);

    let masses_uda: Vec<i64> =
        vocabulary_masses().iter().map(|m| (m * 1e6).round() as i64).collect();
    let res_uda = (resolution * 1e6).round() as i64;
    let n_bins = (max_mass / resolution).round() as usize + 1;
    let oracle = knapsack_oracle(&masses_uda, res_uda, n_bins);

    let mut mismatches = 0usize;
    for (k, &expect) in oracle.iter().enumerate() {
        if knapsack.is_feasible_bin(k) != expect {
            mismatches += 1;
            if mismatches < 5 {
                eprintln!(
                    "bin {k} ({:.4} Da): table={} oracle={expect}",
                    k as f64 * resolution,
                    knapsack.is_feasible_bin(k)
                );
            }
        }
    }
    assert_eq!(mismatches, 0, "knapsack table disagrees with enumeration on {mismatches} bins");
    assert_eq!(n_bins, knapsack.n_bins());

    assert!(t0.elapsed().as_secs_f64() < 60.0, "criterion 4 must run in < 60 s");
    pass(4, "knapsack equals exhaustive multiset enumeration over all bins <= 600 Da", t0);
}

// ---------------------------------------------------------------------
// Criterion 5: scorer normalization and uniform closed form
// ---------------------------------------------------------------------

#[test]
fn criterion_05_scorer_normalization() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let scorer = IonEvidenceScorer::new(IonEvidenceParams::default()).unwrap();
    let vocab = Vocabulary::standard();

    for _ in 0..10_000 {
        let n_peaks = rng.gen_range(1..80);
        let peaks: Vec<(f64, f64)> = (0..n_peaks)
            .map(|_| (rng.gen_range(100.0..2000.0), rng.gen_range(0.0..1e6)))
            .collect();
        let spectrum =
            SpectrumRecord::new("r".into(), rng.gen_range(300.0..1200.0), 2, None, peaks).unwrap();
        let prefix: Vec<ResidueToken> = (0..rng.gen_range(0..6))
            .map(|_| vocab.residues()[rng.gen_range(0..24)])
            .collect();
        let direction = if rng.gen_bool(0.5) { Direction::Forward } else { Direction::Backward };
        let dist: StepDistribution =
            scorer.step(&spectrum, spectrum.neutral_mass(), &prefix, direction).unwrap();
        let sum: f64 = dist.log_probs().iter().map(|lp| lp.exp()).sum();
        assert!((sum - 1.0).abs() < 1e-6, "normalization off: {sum}");
    }

    // Uniform-scorer closed form: total = log(1/25) * (n+1)/n, to 1e-12.
    struct UniformScorer;
    impl StepScorer for UniformScorer {
        fn step(
            &self,
            _: &SpectrumRecord,
            _: f64,
            _: &[ResidueToken],
            _: Direction,
        ) -> specnova::Result<StepDistribution> {
            Ok(StepDistribution::uniform())
        }
    }
    let vocab_tokens = residue_vocabulary();
    for n in 1..=30 {
        let tokens: Vec<ResidueToken> = (0..n).map(|i| vocab_tokens[i % 24]).collect();
        let p = Peptide::new(tokens).unwrap();
        let spectrum = perfect_spectrum(&p, 1);
        let (total, _) = sequence_score(
            &UniformScorer,
            &spectrum,
            table().peptide_mass(&p),
            &p,
            Direction::Forward,
        )
        .unwrap();
        let closed = (1.0f64 / 25.0).ln() * (n as f64 + 1.0) / n as f64;
        assert!((total - closed).abs() < 1e-12, "closed form off at n={n}: {total} vs {closed}");
    }

    pass(5, "10k step distributions normalize; uniform closed form to 1e-12", t0);
}

// ---------------------------------------------------------------------
// Criterion 6: beam search equals exhaustive search at covering width
// ---------------------------------------------------------------------

/// Exhaustive oracle: every token sequence up to `max_len` whose neutral
/// mass lies within the precursor window, scored bidirectionally; argmax
/// with the lexicographic tie-break.
fn exhaustive_argmax(
    spectrum: &SpectrumRecord,
    neutral: f64,
    scorer: &dyn StepScorer,
    tol: Tolerance,
    max_len: usize,
) -> Option<(String, f64)> {
    let vocab = residue_vocabulary();
    let half = tol.half_width(neutral);
    let target_sum = neutral - table().water_mass;
    let mut best: Option<(f64, String)> = None;

    fn dfs(
        vocab: &[ResidueToken],
        prefix: &mut Vec<ResidueToken>,
        prefix_sum: f64,
        target_sum: f64,
        half: f64,
        max_len: usize,
        spectrum: &SpectrumRecord,
        neutral: f64,
        scorer: &dyn StepScorer,
        best: &mut Option<(f64, String)>,
    ) {
        if prefix.len() >= max_len {
            return;
        }
        for &t in vocab {
            let sum = prefix_sum + ResidueTable::standard().residue_mass(t);
            if sum > target_sum + half {
                continue;
            }
            prefix.push(t);
            if (sum - target_sum).abs() <= half {
                let p = Peptide::new(prefix.clone()).unwrap();
                let total = bidirectional_score(scorer, spectrum, neutral, &p).unwrap().total;
                let key = p.sequence_key();
                let better = match best {
                    None => true,
                    Some((bs, bk)) => total > *bs || (total == *bs && key < *bk),
                };
                if better {
                    *best = Some((total, key));
                }
            }
            dfs(vocab, prefix, sum, target_sum, half, max_len, spectrum, neutral, scorer, best);
            prefix.pop();
        }
    }

    let mut prefix = Vec::new();
    dfs(
        &vocab,
        &mut prefix,
        0.0,
        target_sum,
        half,
        max_len,
        spectrum,
        neutral,
        scorer,
        &mut best,
    );
    best.map(|(s, k)| (k, s))
}

#[test]
fn criterion_06_beam_equals_exhaustive() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    const ALPHABET: &[u8] = b"GASV";
    let scorer = tight_scorer();
    let knapsack = standard_knapsack(500.0);
    let cfg = SearchConfig {
        beam_width: 20_000, // covers the whole frontier at depth <= 6
        max_length: 6,
        ..Default::default()
    };

    let mut agreements = 0;
    for _ in 0..100 {
        let len = rng.gen_range(1..=3);
        let seq: String =
            (0..len).map(|_| *ALPHABET.choose(&mut rng).unwrap() as char).collect();
        let target = Peptide::parse(&seq).unwrap();
        let spectrum = perfect_spectrum(&target, 1);
        let neutral = table().peptide_mass(&target);

        let oracle = exhaustive_argmax(&spectrum, neutral, &scorer, cfg.precursor_tolerance, 6)
            .expect("oracle found no mass-matched sequence");
        let beam = denovo_beam_search(&spectrum, neutral, &scorer, &knapsack, &cfg).unwrap();
        let top = beam.first().expect("beam found no completion");
        assert_eq!(
            top.peptide.sequence_key(),
            oracle.0,
            "beam/exhaustive disagree for target {seq}"
        );
        agreements += 1;
    }
    assert_eq!(agreements, 100);

    pass(6, "beam with frontier-covering width equals exhaustive argmax, 100/100", t0);
}

// ---------------------------------------------------------------------
// Criterion 7: synthetic self-identification through database search
// ---------------------------------------------------------------------

fn hundred_tryptic_peptides(seed: u64) -> Vec<Peptide> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Peptide> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    while out.len() < 100 {
        let p = random_tryptic(&mut rng, 7, 20);
        if seen.insert(p.sequence_key()) {
            out.push(p);
        }
    }
    out
}

fn index_with_decoys(targets: &[Peptide]) -> MassIndex {
    let mut entries = Vec::with_capacity(targets.len() * 2);
    for (i, t) in targets.iter().enumerate() {
        entries.push(PeptideEntry::new(t.clone(), vec![(format!("P{i}"), false)]));
        let decoy = Peptide::parse(&decoy_peptide(&t.to_string())).unwrap();
        entries.push(PeptideEntry::new(decoy, vec![(format!("P{i}"), true)]));
    }
    MassIndex::from_entries(entries)
}

#[test]
fn criterion_07_db_self_identification() {
    let t0 = Instant::now();
    let targets = hundred_tryptic_peptides(707);
    let index = index_with_decoys(&targets);
    let scorer = tight_scorer();
    let cfg = SearchConfig::default();

    let mut rank1 = Vec::with_capacity(targets.len());
    let mut correct = 0;
    for target in &targets {
        let spectrum = perfect_spectrum(target, 2);
        let neutral = table().peptide_mass(target);
        let hits = db_search(&spectrum, neutral, &index, &scorer, &cfg).unwrap();
        let top = hits.first().expect("no candidates in the precursor window");
        if top.peptide == *target && !top.is_decoy {
            correct += 1;
        }
        rank1.push(top.clone());
    }
    assert_eq!(correct, 100, "rank-1 target identification must be 100/100");

    let with_q = estimate_fdr(rank1);
    let accepted = filter_at_fdr(&with_q, 0.01);
    assert!(accepted.len() >= 99, "FDR filter accepted only {}", accepted.len());

    assert!(t0.elapsed().as_secs_f64() < 60.0, "criterion 7 must run in < 60 s");
    pass(7, "db search: 100/100 rank-1 targets, >= 99 accepted at 1% FDR", t0);
}

// ---------------------------------------------------------------------
// Criterion 8: synthetic self-identification de novo, clean and noisy
// ---------------------------------------------------------------------

#[test]
fn criterion_08_denovo_self_identification() {
    let t0 = Instant::now();
    let targets = hundred_tryptic_peptides(707); // same spectra as criterion 7
    let scorer = tight_scorer();
    let max_neutral =
        targets.iter().map(|p| table().peptide_mass(p)).fold(0.0f64, f64::max);
    let knapsack = standard_knapsack(max_neutral + 5.0);
    let cfg = SearchConfig { beam_width: 20, ..Default::default() };

    // Clean spectra: exact recovery after I/L canonicalization.
    let mut exact = 0;
    for target in &targets {
        let spectrum = perfect_spectrum(target, 2);
        let neutral = table().peptide_mass(target);
        let hits = denovo_beam_search(&spectrum, neutral, &scorer, &knapsack, &cfg).unwrap();
        if let Some(top) = hits.first() {
            if specnova::assembly::canonicalize(&top.peptide.to_string())
                == specnova::assembly::canonicalize(&target.to_string())
            {
                exact += 1;
            }
        }
    }
    assert!(exact >= 95, "clean de novo exact recovery was {exact}/100, need >= 95");

    // Noisy spectra: 20% dropout, 30 noise peaks, seeded.
    let noisy: Vec<SpectrumRecord> = targets
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut s = synth_spectrum(
                p,
                2,
                &[IonKind::B, IonKind::Y],
                Default::default(),
                Some(NoiseSpec { n_peaks: 30, seed: 808 + 2 * i as u64 }),
                Some(DropoutSpec { fraction: 0.2, seed: 809 + 2 * i as u64 }),
            )
            .unwrap();
            s.id = format!("noisy_{i:03}");
            s
        })
        .collect();

    let denovo_pairs: Vec<(Peptide, Option<Peptide>)> = targets
        .iter()
        .zip(&noisy)
        .map(|(target, spectrum)| {
            let neutral = table().peptide_mass(target);
            let hits =
                denovo_beam_search(spectrum, neutral, &scorer, &knapsack, &cfg).unwrap();
            (target.clone(), hits.into_iter().next().map(|h| h.peptide))
        })
        .collect();
    let denovo_report = evaluate(&denovo_pairs, Tolerance::da(0.5).unwrap());
    assert!(
        denovo_report.aa_recall >= 0.80,
        "noisy de novo aa recall was {:.3}, need >= 0.80",
        denovo_report.aa_recall
    );

    // Directional echo: database search on the same noisy spectra stays at
    // least as accurate as de novo.
    let index = index_with_decoys(&targets);
    let db_cfg = SearchConfig::default();
    let db_pairs: Vec<(Peptide, Option<Peptide>)> = targets
        .iter()
        .zip(&noisy)
        .map(|(target, spectrum)| {
            let neutral = table().peptide_mass(target);
            let hits = db_search(spectrum, neutral, &index, &scorer, &db_cfg).unwrap();
            (target.clone(), hits.into_iter().next().map(|h| h.peptide))
        })
        .collect();
    let db_report = evaluate(&db_pairs, Tolerance::da(0.5).unwrap());
    assert!(
        db_report.aa_recall >= denovo_report.aa_recall,
        "expected db recall ({:.3}) >= de novo recall ({:.3})",
        db_report.aa_recall,
        denovo_report.aa_recall
    );

    eprintln!(
        "criterion  8 detail — clean exact {exact}/100, noisy de novo aa recall {:.3}, db aa recall {:.3}",
        denovo_report.aa_recall, db_report.aa_recall
    );
    pass(8, "de novo self-identification, clean and noisy", t0);
}

// ---------------------------------------------------------------------
// Criterion 9: hybrid arbitration
// ---------------------------------------------------------------------

/// Swap two adjacent, distinct interior residues: an isobaric homolog.
fn transposed_homolog(p: &Peptide, rng: &mut ChaCha8Rng) -> Option<Peptide> {
    let tokens = p.tokens();
    let mut positions: Vec<usize> = (0..tokens.len() - 2).collect();
    positions.shuffle(rng);
    for i in positions {
        if tokens[i] != tokens[i + 1] {
            let mut t = tokens.to_vec();
            t.swap(i, i + 1);
            return Some(Peptide::new(t).unwrap());
        }
    }
    None
}

#[test]
fn criterion_09_hybrid_arbitration() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let scorer = tight_scorer();
    let cfg = SearchConfig { beam_width: 20, ..Default::default() };

    let mut novel_targets = Vec::new();
    while novel_targets.len() < 20 {
        let p = random_tryptic(&mut rng, 8, 14);
        if transposed_homolog(&p, &mut rng).is_some() {
            novel_targets.push(p);
        }
    }
    let homologs: Vec<Peptide> = novel_targets
        .iter()
        .map(|p| transposed_homolog(p, &mut rng).unwrap())
        .collect();
    let homolog_index = MassIndex::from_entries(
        homologs
            .iter()
            .enumerate()
            .map(|(i, h)| PeptideEntry::new(h.clone(), vec![(format!("H{i}"), false)]))
            .collect(),
    );

    let max_neutral =
        novel_targets.iter().map(|p| table().peptide_mass(p)).fold(0.0f64, f64::max);
    let knapsack = standard_knapsack(max_neutral + 5.0);

    // Novel peptides against the homolog-only index: de novo must win.
    let mut denovo_wins = 0;
    for target in &novel_targets {
        let spectrum = perfect_spectrum(target, 2);
        let neutral = table().peptide_mass(target);
        let d = hybrid_identify(&spectrum, neutral, &homolog_index, &scorer, &knapsack, &cfg)
            .unwrap();
        if d.chosen == Chosen::Denovo {
            denovo_wins += 1;
        }
    }
    assert!(denovo_wins >= 19, "de novo won only {denovo_wins}/20 novel cases");

    // In-index peptides: the tie rule sends all 20 to the database.
    let known_targets = &novel_targets;
    let known_index = MassIndex::from_entries(
        known_targets
            .iter()
            .enumerate()
            .map(|(i, p)| PeptideEntry::new(p.clone(), vec![(format!("T{i}"), false)]))
            .collect(),
    );
    let mut db_wins = 0;
    for target in known_targets {
        let spectrum = perfect_spectrum(target, 2);
        let neutral = table().peptide_mass(target);
        let d =
            hybrid_identify(&spectrum, neutral, &known_index, &scorer, &knapsack, &cfg).unwrap();
        if d.chosen == Chosen::Db {
            db_wins += 1;
        }
    }
    assert_eq!(db_wins, 20, "db must win all 20 in-index cases");

    pass(9, "hybrid: de novo >= 19/20 on novel, db 20/20 on in-index", t0);
}

// ---------------------------------------------------------------------
// Criterion 10: FDR hand example and monotonicity
// ---------------------------------------------------------------------

#[test]
fn criterion_10_fdr() {
    let t0 = Instant::now();
    let psm = |id: &str, score: f64, decoy: bool| PsmRecord {
        spectrum_id: id.into(),
        peptide: Peptide::parse("GAK").unwrap(),
        score,
        rank: 1,
        is_decoy: decoy,
        q_value: None,
        source: PsmSource::Db,
        per_position_scores: vec![0.0; 3],
    };

    // Hand-counted: targets {10,9,8,7}, decoys {8.5,6} -> q-values
    // 0, 0, 0.25, 0.25 (targets) and 0.25, 0.5 (decoys).
    let out = estimate_fdr(vec![
        psm("t10", 10.0, false),
        psm("t9", 9.0, false),
        psm("t8", 8.0, false),
        psm("t7", 7.0, false),
        psm("d85", 8.5, true),
        psm("d6", 6.0, true),
    ]);
    let q = |id: &str| out.iter().find(|p| p.spectrum_id == id).unwrap().q_value.unwrap();
    assert_eq!(q("t10"), 0.0);
    assert_eq!(q("t9"), 0.0);
    assert_eq!(q("t8"), 0.25);
    assert_eq!(q("t7"), 0.25);
    assert_eq!(q("d85"), 0.25);
    assert_eq!(q("d6"), 0.5);
    let accepted = filter_at_fdr(&out, 0.01);
    assert_eq!(accepted.len(), 2);

    // Monotonicity on 1,000 random score sets.
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for _ in 0..1000 {
        let n = rng.gen_range(1..60);
        let psms: Vec<PsmRecord> = (0..n)
            .map(|i| {
                psm(&format!("s{i}"), (rng.gen_range(0..300) as f64) / 10.0, rng.gen_bool(0.35))
            })
            .collect();
        let mut scored = estimate_fdr(psms);
        scored.sort_by(|a, b| b.score.total_cmp(&a.score));
        for w in scored.windows(2) {
            assert!(
                w[0].q_value.unwrap() <= w[1].q_value.unwrap(),
                "q-values must be monotone non-decreasing down the ranking"
            );
        }
    }

    pass(10, "FDR hand example exact; q monotone on 1000 random sets", t0);
}

// ---------------------------------------------------------------------
// Criterion 11: assembly reconstruction
// ---------------------------------------------------------------------

#[test]
fn criterion_11_assembly_reconstruction() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    const LETTERS: &[u8] = b"ACDEFGHKLMNPQRSTVWY"; // I excluded: canonical alphabet
    let k = 6;

    let mut successes = 0;
    for _case in 0..50 {
        // Repeat-free protein: all (k-1)-mers distinct.
        let protein: String = loop {
            let candidate: String =
                (0..100).map(|_| *LETTERS.choose(&mut rng).unwrap() as char).collect();
            let mut seen = std::collections::HashSet::new();
            if (0..=candidate.len() - (k - 1))
                .all(|i| seen.insert(candidate[i..i + k - 1].to_string()))
            {
                break candidate;
            }
        };

        // Tile with length-10 windows at stride 4, forcing the tail window.
        let mut peptides: Vec<(String, f64)> = Vec::new();
        let mut start = 0;
        while start + 10 <= protein.len() {
            peptides.push((protein[start..start + 10].to_string(), 0.9));
            start += 4;
        }
        if (protein.len() - 10) % 4 != 0 {
            peptides.push((protein[protein.len() - 10..].to_string(), 0.9));
        }

        let graph = specnova::assembly::build_graph(&peptides, k).unwrap();
        let contigs = specnova::assembly::extract_contigs(&graph, 0.0);
        if contigs.len() == 1 && contigs[0].sequence == specnova::assembly::canonicalize(&protein)
        {
            successes += 1;
        }
    }
    assert_eq!(successes, 50, "all 50 tilings must reassemble to one exact contig");

    pass(11, "assembly reconstructs 50/50 tiled repeat-free proteins", t0);
}

// ---------------------------------------------------------------------
// Criterion 12: end-to-end pipeline determinism across runs and threads
// ---------------------------------------------------------------------

#[test]
fn criterion_12_pipeline_determinism() {
    use std::process::Command;
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_specnova");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);

    // Twenty tryptic peptides and a FASTA whose digestion yields them.
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let peptides: Vec<Peptide> = (0..20).map(|_| random_tryptic(&mut rng, 7, 14)).collect();
    let list = peptides.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n");
    std::fs::write(path("peptides.txt"), format!("{list}\n")).unwrap();
    let fasta: String = peptides
        .chunks(2)
        .enumerate()
        .map(|(i, chunk)| {
            let joined: String = chunk.iter().map(|p| p.to_string()).collect();
            format!(">prot{i} synthetic\n{joined}\n")
        })
        .collect();
    std::fs::write(path("proteins.fasta"), fasta).unwrap();

    let run = |args: &[&str]| {
        let output = Command::new(bin).args(args).output().expect("spawn specnova");
        assert!(
            output.status.success(),
            "specnova {args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };

    let pipeline = |tag: &str, threads: &str| -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let mgf = path(&format!("spectra_{tag}.mgf"));
        let psms = path(&format!("psms_{tag}.tsv"));
        let contigs = path(&format!("contigs_{tag}.fasta"));
        run(&[
            "synth",
            "--peptides",
            path("peptides.txt").to_str().unwrap(),
            "--noise-peaks",
            "15",
            "--dropout",
            "0.1",
            "--seed",
            "42",
            "--output",
            mgf.to_str().unwrap(),
        ]);
        run(&[
            "dbsearch",
            "--mgf",
            mgf.to_str().unwrap(),
            "--fasta",
            path("proteins.fasta").to_str().unwrap(),
            "--fragment-tol-da",
            "0.01",
            "--fixed-mods",
            "none",
            "--var-mods",
            "none",
            "--threads",
            threads,
            "--output",
            psms.to_str().unwrap(),
        ]);
        run(&[
            "assemble",
            "--psms",
            psms.to_str().unwrap(),
            "--kmer",
            "4",
            "--threads",
            threads,
            "--output",
            contigs.to_str().unwrap(),
        ]);
        (
            std::fs::read(&mgf).unwrap(),
            std::fs::read(&psms).unwrap(),
            std::fs::read(&contigs).unwrap(),
        )
    };

    let a = pipeline("a", "1");
    let b = pipeline("b", "1");
    let c = pipeline("c", "4");
    assert_eq!(a.0, b.0, "synth output must be identical across runs");
    assert_eq!(a.1, b.1, "dbsearch output must be identical across runs");
    assert_eq!(a.2, b.2, "assemble output must be identical across runs");
    assert_eq!(a.1, c.1, "dbsearch output must be identical across thread counts");
    assert_eq!(a.2, c.2, "assemble output must be identical across thread counts");

    // The searched PSMs must actually contain identifications.
    let text = String::from_utf8(a.1).unwrap();
    assert!(text.lines().count() > 20, "expected rank-1 rows for all 20 spectra");

    pass(12, "synth -> dbsearch -> fdr -> assemble byte-identical across runs and threads", t0);
}

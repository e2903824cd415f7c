//! Batch pipelines behind the CLI subcommands. Each function consumes a
//! [`RunConfig`], streams its inputs, fans independent per-spectrum work
//! out to a rayon pool, and writes deterministic output regardless of
//! thread count (results are gathered and sorted before writing).

use crate::assembly::{build_graph, confidence_from_score, extract_contigs, write_contigs_fasta};
use crate::chem::{IonKind, Peptide};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{evaluate, write_eval_tsv};
use crate::massindex::MassIndex;
use crate::msio::{
    parse_fasta, parse_mgf, read_psms, write_mgf, write_psms, ProteinRecord, PsmRecord,
    PsmSource, SpectrumRecord, UniprotClient,
};
use crate::search::{
    build_knapsack, db_search, denovo_beam_search, estimate_fdr, filter_at_fdr, hybrid_identify,
    Chosen, KnapsackTable, MAX_TABLE_MASS,
};
use crate::synth::{synth_spectrum, DropoutSpec, NoiseSpec};
use rayon::prelude::*;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

/// Digest a FASTA into a peptide TSV.
pub fn run_digest(cfg: &RunConfig) -> Result<()> {
    let proteins = load_proteins(cfg)?;
    let rule = cfg.enzyme_rule()?;
    let digest_cfg = cfg.digest_config();
    digest_cfg.validate()?;

    let mut w = output_writer(cfg)?;
    writeln!(w, "sequence\tmissed_cleavages\taccession\tneutral_mass")?;
    let mut count = 0usize;
    for protein in &proteins {
        for d in crate::digest::digest(protein, &rule, &digest_cfg, cfg.wildcard_policy) {
            let mass = Peptide::parse(&d.sequence)?.neutral_mass();
            writeln!(w, "{}\t{}\t{}\t{mass:.6}", d.sequence, d.missed_cleavages, d.accession)?;
            count += 1;
        }
    }
    w.flush()?;
    eprintln!("digested {} proteins into {count} peptides", proteins.len());
    Ok(())
}

/// Build the mass index and cache it to disk.
pub fn run_index(cfg: &RunConfig) -> Result<()> {
    let proteins = load_proteins(cfg)?;
    let index = build_index(cfg, &proteins)?;
    let out = cfg
        .output
        .as_ref()
        .ok_or_else(|| Error::Config("index needs --output for the cache file".into()))?;
    index.save(out)?;
    let stats = index.stats();
    eprintln!(
        "index: {} entries ({} targets, {} decoys) from {} proteins, mass {:.2}..{:.2}, cached to {}",
        stats.n_entries,
        stats.n_targets,
        stats.n_decoys,
        stats.n_proteins,
        stats.min_mass,
        stats.max_mass,
        out.display()
    );
    Ok(())
}

/// Database search: MGF + index -> PSM TSV with q-values on rank-1 rows.
pub fn run_dbsearch(cfg: &RunConfig) -> Result<()> {
    let index = load_index(cfg)?;
    let spectra = load_spectra(cfg)?;
    let scorer = cfg.build_scorer()?;
    let search_cfg = cfg.search_config()?;
    let pool = thread_pool(cfg.threads)?;

    let per_spectrum: Vec<Vec<PsmRecord>> = pool.install(|| {
        spectra
            .par_iter()
            .map(|s| db_search(s, s.neutral_mass(), &index, scorer.as_ref(), &search_cfg))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rank1 = Vec::new();
    let mut rest = Vec::new();
    for psm in per_spectrum.into_iter().flatten() {
        if psm.rank == 1 {
            rank1.push(psm);
        } else {
            rest.push(psm);
        }
    }
    let rank1 = estimate_fdr(rank1);
    let accepted = filter_at_fdr(&rank1, cfg.fdr).len();

    let mut all = rank1;
    all.extend(rest);
    sort_psms(&mut all);
    let written = write_psms(&all, output_writer(cfg)?)?;
    eprintln!(
        "dbsearch: {} spectra, {written} PSMs written, {accepted} targets accepted at {:.1}% FDR",
        spectra.len(),
        cfg.fdr * 100.0
    );
    Ok(())
}

/// De novo sequencing: MGF -> PSM TSV (no decoy model, so no q-values).
pub fn run_denovo(cfg: &RunConfig) -> Result<()> {
    let spectra = load_spectra(cfg)?;
    let scorer = cfg.build_scorer()?;
    let search_cfg = cfg.search_config()?;
    let pool = thread_pool(cfg.threads)?;

    let mut all: Vec<PsmRecord> = Vec::new();
    if !spectra.is_empty() {
        let knapsack = knapsack_for(&spectra, cfg)?;
        let per_spectrum: Vec<Vec<PsmRecord>> = pool.install(|| {
            spectra
                .par_iter()
                .map(|s| {
                    denovo_beam_search(s, s.neutral_mass(), scorer.as_ref(), &knapsack, &search_cfg)
                })
                .collect::<Result<Vec<_>>>()
        })?;
        all = per_spectrum.into_iter().flatten().collect();
    }

    sort_psms(&mut all);
    let identified = all.iter().filter(|p| p.rank == 1).count();
    let written = write_psms(&all, output_writer(cfg)?)?;
    eprintln!(
        "denovo: {} spectra, {identified} sequenced, {written} candidate rows written",
        spectra.len()
    );
    Ok(())
}

/// Hybrid identification: both engines, arbitration per spectrum. Rows
/// chosen from the database side carry q-values; de novo rows have no
/// decoy model and stay unassigned.
pub fn run_hybrid(cfg: &RunConfig) -> Result<()> {
    let index = load_index(cfg)?;
    let spectra = load_spectra(cfg)?;
    let scorer = cfg.build_scorer()?;
    let search_cfg = cfg.search_config()?;
    let pool = thread_pool(cfg.threads)?;

    let mut db_rows: Vec<PsmRecord> = Vec::new();
    let mut denovo_rows: Vec<PsmRecord> = Vec::new();
    let mut none = 0usize;
    if !spectra.is_empty() {
        let knapsack = knapsack_for(&spectra, cfg)?;
        let decisions = pool.install(|| {
            spectra
                .par_iter()
                .map(|s| {
                    hybrid_identify(
                        s,
                        s.neutral_mass(),
                        &index,
                        scorer.as_ref(),
                        &knapsack,
                        &search_cfg,
                    )
                })
                .collect::<Result<Vec<_>>>()
        })?;
        for d in decisions {
            match d.chosen {
                Chosen::Db => {
                    let mut r = d.db_best.expect("chosen db implies a db candidate");
                    r.source = PsmSource::Hybrid;
                    r.rank = 1;
                    db_rows.push(r);
                }
                Chosen::Denovo => {
                    let mut r = d.denovo_best.expect("chosen denovo implies a candidate");
                    r.source = PsmSource::Hybrid;
                    r.rank = 1;
                    denovo_rows.push(r);
                }
                Chosen::None => none += 1,
            }
        }
    }

    let n_db = db_rows.len();
    let n_denovo = denovo_rows.len();
    let mut all = estimate_fdr(db_rows);
    all.extend(denovo_rows);
    sort_psms(&mut all);
    write_psms(&all, output_writer(cfg)?)?;
    eprintln!(
        "hybrid: {} spectra, {n_db} chose database, {n_denovo} chose de novo, {none} unidentified",
        spectra.len()
    );
    Ok(())
}

/// Assemble accepted PSMs into contigs.
pub fn run_assemble(cfg: &RunConfig) -> Result<()> {
    let path = cfg
        .psms
        .as_ref()
        .ok_or_else(|| Error::Config("assemble needs --psms with a PSM TSV".into()))?;
    let psms = read_psms(open_reader(path)?)?;

    // Rank-1 targets, FDR-filtered where q-values exist (de novo rows
    // carry none and pass on their scores alone).
    let peptides: Vec<(String, f64)> = psms
        .iter()
        .filter(|p| p.rank == 1 && !p.is_decoy && p.q_value.map_or(true, |q| q <= cfg.fdr))
        .map(|p| (p.peptide.to_string(), confidence_from_score(p.score)))
        .collect();

    let graph = build_graph(&peptides, cfg.kmer)?;
    let contigs = extract_contigs(&graph, cfg.min_edge_weight);
    write_contigs_fasta(&contigs, output_writer(cfg)?)?;
    eprintln!(
        "assemble: {} accepted peptides, {} graph edges, {} contigs",
        peptides.len(),
        graph.n_edges(),
        contigs.len()
    );
    Ok(())
}

/// Compare predictions against ground truth.
pub fn run_eval(cfg: &RunConfig) -> Result<()> {
    let truth_path = cfg
        .truth
        .as_ref()
        .ok_or_else(|| Error::Config("eval needs --truth with the target PSM TSV".into()))?;
    let pred_path = cfg
        .predictions
        .as_ref()
        .ok_or_else(|| Error::Config("eval needs --predictions with the predicted PSM TSV".into()))?;

    let truth = read_psms(open_reader(truth_path)?)?;
    let predictions = read_psms(open_reader(pred_path)?)?;
    let mut by_id: std::collections::HashMap<&str, &PsmRecord> = std::collections::HashMap::new();
    for p in predictions.iter().filter(|p| p.rank == 1) {
        by_id.entry(p.spectrum_id.as_str()).or_insert(p);
    }

    let pairs: Vec<(Peptide, Option<Peptide>)> = truth
        .iter()
        .filter(|t| t.rank == 1)
        .map(|t| {
            (t.peptide.clone(), by_id.get(t.spectrum_id.as_str()).map(|p| p.peptide.clone()))
        })
        .collect();

    let report = evaluate(&pairs, cfg.fragment_tolerance()?);
    if !report.valid {
        return Err(Error::InvalidInput("no truth rows to evaluate".into()));
    }
    write_eval_tsv(&report, output_writer(cfg)?)?;
    eprintln!(
        "eval: {} pairs, amino acid recall {:.1}%, peptide recall {:.1}%",
        report.n_spectra,
        report.aa_recall * 100.0,
        report.peptide_recall * 100.0
    );
    Ok(())
}

/// Generate synthetic spectra (and optionally a ground-truth table) from a
/// peptide list.
pub fn run_synth(cfg: &RunConfig) -> Result<()> {
    let list = cfg
        .peptides
        .as_ref()
        .ok_or_else(|| Error::Config("synth needs --peptides with one sequence per line".into()))?;
    let text = std::fs::read_to_string(list)?;
    let peptides: Vec<Peptide> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Peptide::parse)
        .collect::<Result<Vec<_>>>()?;

    let mut spectra = Vec::with_capacity(peptides.len());
    let mut truth = Vec::with_capacity(peptides.len());
    for (i, peptide) in peptides.iter().enumerate() {
        let noise = (cfg.noise_peaks > 0).then_some(NoiseSpec {
            n_peaks: cfg.noise_peaks,
            seed: cfg.seed.wrapping_add(2 * i as u64 + 1),
        });
        let dropout = (cfg.dropout > 0.0).then_some(DropoutSpec {
            fraction: cfg.dropout,
            seed: cfg.seed.wrapping_add(2 * i as u64 + 2),
        });
        let mut s = synth_spectrum(
            peptide,
            cfg.charge,
            &[IonKind::B, IonKind::Y],
            Default::default(),
            noise,
            dropout,
        )?;
        s.id = format!("synth_{i:06}");
        truth.push(PsmRecord {
            spectrum_id: s.id.clone(),
            peptide: peptide.clone(),
            score: 0.0,
            rank: 1,
            is_decoy: false,
            q_value: None,
            source: PsmSource::Db,
            per_position_scores: Vec::new(),
        });
        spectra.push(s);
    }

    write_mgf(&spectra, output_writer(cfg)?)?;
    if let Some(truth_path) = &cfg.truth {
        write_psms(&truth, BufWriter::new(std::fs::File::create(truth_path)?))?;
    }
    eprintln!("synth: {} spectra written", spectra.len());
    Ok(())
}

fn sort_psms(psms: &mut [PsmRecord]) {
    psms.sort_by(|a, b| a.spectrum_id.cmp(&b.spectrum_id).then(a.rank.cmp(&b.rank)));
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads) // 0 means the rayon default (available parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn open_reader(path: &Path) -> Result<BufReader<std::fs::File>> {
    Ok(BufReader::new(std::fs::File::open(path).map_err(|e| {
        Error::InvalidInput(format!("cannot open {}: {e}", path.display()))
    })?))
}

fn output_writer(cfg: &RunConfig) -> Result<Box<dyn Write>> {
    match &cfg.output {
        Some(path) => Ok(Box::new(BufWriter::new(std::fs::File::create(path)?))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn load_spectra(cfg: &RunConfig) -> Result<Vec<SpectrumRecord>> {
    let path = cfg
        .mgf
        .as_ref()
        .ok_or_else(|| Error::Config("this mode needs --mgf with an MGF file".into()))?;
    let parse = parse_mgf(open_reader(path)?)?;
    for w in &parse.warnings {
        log::warn!("{}: {w}", path.display());
    }
    for e in &parse.errors {
        log::warn!("{}: skipped block: {e}", path.display());
    }
    if !parse.errors.is_empty() {
        eprintln!(
            "{}: {} block(s) skipped with errors, {} spectra parsed",
            path.display(),
            parse.errors.len(),
            parse.spectra.len()
        );
    }
    Ok(parse.spectra)
}

fn load_proteins(cfg: &RunConfig) -> Result<Vec<ProteinRecord>> {
    match (&cfg.fasta, cfg.taxonomy) {
        (Some(_), Some(_)) => Err(Error::Config(
            "give exactly one of --fasta or --taxonomy, not both".into(),
        )),
        (None, None) => Err(Error::Config("this mode needs --fasta or --taxonomy".into())),
        (Some(path), None) => {
            let parse = parse_fasta(open_reader(path)?)?;
            for e in &parse.errors {
                log::warn!("{}: skipped record: {e}", path.display());
            }
            Ok(parse.proteins)
        }
        (None, Some(tax)) => {
            let client = UniprotClient::new(&cfg.cache_dir);
            let parse = client.fetch_proteome(tax, true)?;
            for e in &parse.errors {
                log::warn!("taxonomy {tax}: skipped record: {e}");
            }
            Ok(parse.proteins)
        }
    }
}

fn build_index(cfg: &RunConfig, proteins: &[ProteinRecord]) -> Result<MassIndex> {
    MassIndex::build(
        proteins,
        &cfg.enzyme_rule()?,
        &cfg.digest_config(),
        &cfg.mod_set(),
        cfg.decoys,
        cfg.wildcard_policy,
    )
}

fn load_index(cfg: &RunConfig) -> Result<MassIndex> {
    if let Some(path) = &cfg.index {
        if !path.exists() {
            return Err(Error::InvalidInput(format!(
                "index cache {} not found (build it with `specnova index`)",
                path.display()
            )));
        }
        return MassIndex::load(path);
    }
    let proteins = load_proteins(cfg)?;
    build_index(cfg, &proteins)
}

/// One knapsack table covering every precursor in the batch.
fn knapsack_for(spectra: &[SpectrumRecord], cfg: &RunConfig) -> Result<KnapsackTable> {
    let table = crate::chem::ResidueTable::standard();
    let masses: Vec<f64> = crate::chem::residue_vocabulary()
        .iter()
        .map(|&t| table.residue_mass(t))
        .collect();
    let max_neutral = spectra.iter().map(|s| s.neutral_mass()).fold(0.0f64, f64::max);
    let max_mass = (max_neutral + 5.0).clamp(100.0, MAX_TABLE_MASS);
    if max_neutral + 5.0 > MAX_TABLE_MASS {
        log::warn!(
            "precursors beyond {MAX_TABLE_MASS} Da exceed the knapsack table and will not be sequenced"
        );
    }
    build_knapsack(&masses, max_mass, cfg.knapsack_resolution)
}

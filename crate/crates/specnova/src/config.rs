//! Run configuration: defaults, a flat sectioned key-value config file,
//! and command-line overrides (flags win over the file).

use crate::chem::{ModSpec, Tolerance};
use crate::digest::{DigestConfig, EnzymeRule};
use crate::error::{Error, Result};
use crate::massindex::ModSet;
use crate::msio::WildcardPolicy;
use crate::scorer::{scorer_by_name, IonEvidenceParams, StepScorer};
use crate::search::SearchConfig;
use std::io::BufRead;
use std::path::PathBuf;

/// Everything a pipeline run needs. Defaults mirror the usual HCD/tryptic
/// setup: 20 ppm precursor, 0.5 Da fragment, two missed cleavages, fixed
/// carbamidomethyl C, variable oxidation M and deamidation NQ, 1% FDR.
#[derive(Debug, Clone)]
pub struct RunConfig {
    // Inputs
    pub mgf: Option<PathBuf>,
    pub fasta: Option<PathBuf>,
    pub taxonomy: Option<u32>,
    pub index: Option<PathBuf>,
    pub peptides: Option<PathBuf>,
    pub psms: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub cache_dir: PathBuf,

    // Digestion
    pub enzyme: String,
    pub missed_cleavages: u32,
    pub min_length: usize,
    pub max_length: usize,
    pub decoys: bool,
    pub wildcard_policy: WildcardPolicy,

    // Modifications
    pub fixed_mods: Vec<ModSpec>,
    pub var_mods: Vec<ModSpec>,
    pub max_var_mods: usize,

    // Tolerances and scorer
    pub precursor_ppm: f64,
    pub fragment_tol_da: f64,
    pub scorer: String,
    pub epsilon: f64,
    pub b_weight: f64,
    pub y_weight: f64,

    // Search
    pub beam: usize,
    pub fdr: f64,
    pub knapsack_resolution: f64,

    // Assembly
    pub kmer: usize,
    pub min_edge_weight: f64,

    // Synthetic harness
    pub charge: u32,
    pub noise_peaks: usize,
    pub dropout: f64,
    pub seed: u64,

    // Execution
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mgf: None,
            fasta: None,
            taxonomy: None,
            index: None,
            peptides: None,
            psms: None,
            truth: None,
            predictions: None,
            cache_dir: PathBuf::from("uniprot_cache"),
            enzyme: "trypsin".into(),
            missed_cleavages: 2,
            min_length: 6,
            max_length: 50,
            decoys: true,
            wildcard_policy: WildcardPolicy::Split,
            fixed_mods: vec![ModSpec::parse("Carbamidomethyl(C)").expect("static")],
            var_mods: vec![
                ModSpec::parse("Oxidation(M)").expect("static"),
                ModSpec::parse("Deamidation(NQ)").expect("static"),
            ],
            max_var_mods: 3,
            precursor_ppm: 20.0,
            fragment_tol_da: 0.5,
            scorer: "ion_evidence".into(),
            epsilon: 0.01,
            b_weight: 1.0,
            y_weight: 1.0,
            beam: 10,
            fdr: 0.01,
            knapsack_resolution: 0.0005,
            kmer: 6,
            min_edge_weight: 0.0,
            charge: 2,
            noise_peaks: 0,
            dropout: 0.0,
            seed: 0,
            threads: 0,
            output: None,
        }
    }
}

impl RunConfig {
    /// Apply a config file: `key = value` lines, `[section]` headers for
    /// grouping, `#`/`;` comments. Keys are flat (sections are cosmetic).
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::open(path).map_err(|e| {
            Error::Config(format!("cannot open config file {}: {e}", path.display()))
        })?;
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value', got '{line}'", i + 1))
            })?;
            self.apply_kv(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Set one configuration key from its string form.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad value '{value}' for key '{key}'")))
        }
        match key {
            "mgf" => self.mgf = Some(value.into()),
            "fasta" => self.fasta = Some(value.into()),
            "taxonomy" => self.taxonomy = Some(num(key, value)?),
            "index" => self.index = Some(value.into()),
            "peptides" => self.peptides = Some(value.into()),
            "psms" => self.psms = Some(value.into()),
            "truth" => self.truth = Some(value.into()),
            "predictions" => self.predictions = Some(value.into()),
            "cache_dir" => self.cache_dir = value.into(),
            "enzyme" => self.enzyme = value.into(),
            "missed_cleavages" => self.missed_cleavages = num(key, value)?,
            "min_length" => self.min_length = num(key, value)?,
            "max_length" => self.max_length = num(key, value)?,
            "decoys" => self.decoys = num(key, value)?,
            "wildcard_policy" => {
                self.wildcard_policy = match value {
                    "split" => WildcardPolicy::Split,
                    "skip_protein" => WildcardPolicy::SkipProtein,
                    other => {
                        return Err(Error::Config(format!(
                            "bad value '{other}' for key 'wildcard_policy' (split | skip_protein)"
                        )))
                    }
                }
            }
            "fixed_mods" => self.fixed_mods = parse_mod_list(value)?,
            "var_mods" => self.var_mods = parse_mod_list(value)?,
            "max_var_mods" => self.max_var_mods = num(key, value)?,
            "precursor_ppm" => self.precursor_ppm = num(key, value)?,
            "fragment_tol_da" => self.fragment_tol_da = num(key, value)?,
            "scorer" => self.scorer = value.into(),
            "epsilon" => self.epsilon = num(key, value)?,
            "b_weight" => self.b_weight = num(key, value)?,
            "y_weight" => self.y_weight = num(key, value)?,
            "beam" => self.beam = num(key, value)?,
            "fdr" => self.fdr = num(key, value)?,
            "knapsack_resolution" => self.knapsack_resolution = num(key, value)?,
            "kmer" => self.kmer = num(key, value)?,
            "min_edge_weight" => self.min_edge_weight = num(key, value)?,
            "charge" => self.charge = num(key, value)?,
            "noise_peaks" => self.noise_peaks = num(key, value)?,
            "dropout" => self.dropout = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "threads" => self.threads = num(key, value)?,
            "output" => self.output = Some(value.into()),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn enzyme_rule(&self) -> Result<EnzymeRule> {
        EnzymeRule::by_name(&self.enzyme)
    }

    pub fn digest_config(&self) -> DigestConfig {
        DigestConfig {
            max_missed_cleavages: self.missed_cleavages,
            min_length: self.min_length,
            max_length: self.max_length,
        }
    }

    pub fn mod_set(&self) -> ModSet {
        ModSet {
            fixed: self.fixed_mods.clone(),
            variable: self.var_mods.clone(),
            max_var: self.max_var_mods,
        }
    }

    pub fn precursor_tolerance(&self) -> Result<Tolerance> {
        Tolerance::ppm(self.precursor_ppm)
    }

    pub fn fragment_tolerance(&self) -> Result<Tolerance> {
        Tolerance::da(self.fragment_tol_da)
    }

    pub fn search_config(&self) -> Result<SearchConfig> {
        let cfg = SearchConfig {
            precursor_tolerance: self.precursor_tolerance()?,
            beam_width: self.beam,
            max_length: self.max_length,
            knapsack_resolution: self.knapsack_resolution,
            fdr_threshold: self.fdr,
            report_top_k: 2,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scorer_params(&self) -> Result<IonEvidenceParams> {
        Ok(IonEvidenceParams {
            fragment_tolerance: self.fragment_tolerance()?,
            smoothing_epsilon: self.epsilon,
            b_weight: self.b_weight,
            y_weight: self.y_weight,
            end_mass_tolerance: self.precursor_tolerance()?,
        })
    }

    pub fn build_scorer(&self) -> Result<Box<dyn StepScorer>> {
        scorer_by_name(&self.scorer, self.scorer_params()?)
    }
}

fn parse_mod_list(value: &str) -> Result<Vec<ModSpec>> {
    let value = value.trim();
    if value.is_empty() || value.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| ModSpec::parse(s.trim())).collect()
}

#[cfg(test)]
mod test {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_the_standard_setup() {
        let c = RunConfig::default();
        assert_eq!(c.precursor_ppm, 20.0);
        assert_eq!(c.fragment_tol_da, 0.5);
        assert_eq!(c.missed_cleavages, 2);
        assert_eq!(c.fdr, 0.01);
        assert_eq!(c.fixed_mods.len(), 1);
        assert_eq!(c.var_mods.len(), 2);
        assert_eq!(c.enzyme, "trypsin");
    }

    #[test]
    fn file_then_flags_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# test config").unwrap();
        writeln!(f, "[search]").unwrap();
        writeln!(f, "precursor_ppm = 10").unwrap();
        writeln!(f, "beam = 25").unwrap();
        writeln!(f, "[mods]").unwrap();
        writeln!(f, "var_mods = Oxidation(M)").unwrap();
        drop(f);

        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!(c.precursor_ppm, 10.0);
        assert_eq!(c.beam, 25);
        assert_eq!(c.var_mods.len(), 1);

        // Flags win over the file.
        c.apply_kv("precursor_ppm", "5").unwrap();
        assert_eq!(c.precursor_ppm, 5.0);
    }

    #[test]
    fn unknown_key_is_named_in_the_error() {
        let mut c = RunConfig::default();
        match c.apply_kv("no_such_key", "1") {
            Err(Error::Config(msg)) => assert!(msg.contains("no_such_key")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_value_is_rejected() {
        let mut c = RunConfig::default();
        assert!(c.apply_kv("beam", "many").is_err());
        assert!(c.apply_kv("fixed_mods", "Oxidation(A)").is_err());
        assert!(c.apply_kv("wildcard_policy", "whatever").is_err());
    }

    #[test]
    fn none_clears_mods() {
        let mut c = RunConfig::default();
        c.apply_kv("fixed_mods", "none").unwrap();
        c.apply_kv("var_mods", "").unwrap();
        assert!(c.fixed_mods.is_empty());
        assert!(c.var_mods.is_empty());
    }

    #[test]
    fn derived_configs() {
        let c = RunConfig::default();
        assert!(c.enzyme_rule().is_ok());
        assert!(c.search_config().is_ok());
        assert!(c.build_scorer().is_ok());
        let d = c.digest_config();
        assert_eq!(d.max_missed_cleavages, 2);
        assert_eq!(d.min_length, 6);
    }
}

use clap::{Args, Parser, Subcommand};
use specnova::config::RunConfig;
use specnova::error::Error;
use specnova::driver;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "specnova",
    version,
    about = "Peptide identification from tandem mass spectra: database search, de novo sequencing, hybrid arbitration, FDR control, and protein assembly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Digest a protein FASTA into a peptide TSV
    Digest(CommonArgs),
    /// Build the peptide mass index and cache it to disk
    Index(CommonArgs),
    /// Search spectra against a mass index
    Dbsearch(CommonArgs),
    /// Sequence spectra de novo, without a database
    Denovo(CommonArgs),
    /// Run both engines and arbitrate per spectrum
    Hybrid(CommonArgs),
    /// Assemble accepted PSMs into protein contigs
    Assemble(CommonArgs),
    /// Compare predicted PSMs against ground truth
    Eval(CommonArgs),
    /// Generate synthetic spectra from a peptide list
    Synth(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Config file (key = value lines; flags override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// MGF spectrum file
    #[arg(long)]
    mgf: Option<PathBuf>,
    /// Protein FASTA file
    #[arg(long)]
    fasta: Option<PathBuf>,
    /// UniProt taxonomy id (reviewed entries; alternative to --fasta)
    #[arg(long)]
    taxonomy: Option<u32>,
    /// Index cache file written by `specnova index`
    #[arg(long)]
    index: Option<PathBuf>,
    /// PSM TSV input (assemble)
    #[arg(long)]
    psms: Option<PathBuf>,
    /// Peptide list input (synth), one sequence per line
    #[arg(long)]
    peptides: Option<PathBuf>,
    /// Ground-truth PSM TSV (eval input, synth output)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Predicted PSM TSV (eval)
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Digestion enzyme (trypsin, trypsin/p, lys-c)
    #[arg(long)]
    enzyme: Option<String>,
    #[arg(long)]
    missed_cleavages: Option<u32>,
    #[arg(long)]
    min_length: Option<usize>,
    #[arg(long)]
    max_length: Option<usize>,
    /// Generate decoys at index build (true/false)
    #[arg(long)]
    decoys: Option<bool>,
    /// Precursor tolerance, ppm
    #[arg(long)]
    precursor_ppm: Option<f64>,
    /// Fragment tolerance, Da
    #[arg(long)]
    fragment_tol_da: Option<f64>,
    /// Fixed modifications, e.g. "Carbamidomethyl(C)" or "none"
    #[arg(long)]
    fixed_mods: Option<String>,
    /// Variable modifications, e.g. "Oxidation(M),Deamidation(NQ)"
    #[arg(long)]
    var_mods: Option<String>,
    #[arg(long)]
    max_var_mods: Option<usize>,
    /// Scorer name (built-in: ion_evidence)
    #[arg(long)]
    scorer: Option<String>,
    /// Scorer smoothing epsilon
    #[arg(long)]
    epsilon: Option<f64>,
    /// Beam width for de novo search
    #[arg(long)]
    beam: Option<usize>,
    /// FDR threshold for accepted output
    #[arg(long)]
    fdr: Option<f64>,
    /// Knapsack bin resolution, Da
    #[arg(long)]
    knapsack_resolution: Option<f64>,
    /// Assembly k-mer length
    #[arg(long)]
    kmer: Option<usize>,
    /// Minimum edge weight kept at contig extraction
    #[arg(long)]
    min_edge_weight: Option<f64>,
    /// Precursor charge for synthetic spectra
    #[arg(long)]
    charge: Option<u32>,
    /// Number of random noise peaks per synthetic spectrum
    #[arg(long)]
    noise_peaks: Option<usize>,
    /// True-peak dropout fraction for synthetic spectra
    #[arg(long)]
    dropout: Option<f64>,
    /// Seed for all randomized harness operations
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Output path (defaults to stdout)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Cache directory for UniProt downloads
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Wildcard residue policy: split | skip_protein
    #[arg(long)]
    wildcard_policy: Option<String>,
}

impl CommonArgs {
    fn into_config(self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        // Flags win over the file.
        cfg.mgf = self.mgf.or(cfg.mgf);
        cfg.fasta = self.fasta.or(cfg.fasta);
        cfg.taxonomy = self.taxonomy.or(cfg.taxonomy);
        cfg.index = self.index.or(cfg.index);
        cfg.psms = self.psms.or(cfg.psms);
        cfg.peptides = self.peptides.or(cfg.peptides);
        cfg.truth = self.truth.or(cfg.truth);
        cfg.predictions = self.predictions.or(cfg.predictions);
        cfg.output = self.output.or(cfg.output);
        if let Some(v) = self.cache_dir {
            cfg.cache_dir = v;
        }
        if let Some(v) = self.enzyme {
            cfg.enzyme = v;
        }
        if let Some(v) = self.missed_cleavages {
            cfg.missed_cleavages = v;
        }
        if let Some(v) = self.min_length {
            cfg.min_length = v;
        }
        if let Some(v) = self.max_length {
            cfg.max_length = v;
        }
        if let Some(v) = self.decoys {
            cfg.decoys = v;
        }
        if let Some(v) = self.precursor_ppm {
            cfg.precursor_ppm = v;
        }
        if let Some(v) = self.fragment_tol_da {
            cfg.fragment_tol_da = v;
        }
        if let Some(v) = &self.fixed_mods {
            cfg.apply_kv("fixed_mods", v)?;
        }
        if let Some(v) = &self.var_mods {
            cfg.apply_kv("var_mods", v)?;
        }
        if let Some(v) = self.max_var_mods {
            cfg.max_var_mods = v;
        }
        if let Some(v) = self.scorer {
            cfg.scorer = v;
        }
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = self.beam {
            cfg.beam = v;
        }
        if let Some(v) = self.fdr {
            cfg.fdr = v;
        }
        if let Some(v) = self.knapsack_resolution {
            cfg.knapsack_resolution = v;
        }
        if let Some(v) = self.kmer {
            cfg.kmer = v;
        }
        if let Some(v) = self.min_edge_weight {
            cfg.min_edge_weight = v;
        }
        if let Some(v) = self.charge {
            cfg.charge = v;
        }
        if let Some(v) = self.noise_peaks {
            cfg.noise_peaks = v;
        }
        if let Some(v) = self.dropout {
            cfg.dropout = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = &self.wildcard_policy {
            cfg.apply_kv("wildcard_policy", v)?;
        }
        Ok(cfg)
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Digest(args) => driver::run_digest(&args.into_config()?),
        Command::Index(args) => driver::run_index(&args.into_config()?),
        Command::Dbsearch(args) => driver::run_dbsearch(&args.into_config()?),
        Command::Denovo(args) => driver::run_denovo(&args.into_config()?),
        Command::Hybrid(args) => driver::run_hybrid(&args.into_config()?),
        Command::Assemble(args) => driver::run_assemble(&args.into_config()?),
        Command::Eval(args) => driver::run_eval(&args.into_config()?),
        Command::Synth(args) => driver::run_synth(&args.into_config()?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // Internal failures; everything else is a fixable input problem.
                Error::Scorer { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

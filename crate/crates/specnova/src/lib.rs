//! specnova: peptide and protein identification from tandem mass spectra.
//!
//! One step-conditional scoring function drives every engine in the
//! crate: database search over a mass-indexed digest, de novo beam search
//! under a dynamic-programming mass-feasibility constraint, and a hybrid
//! mode that arbitrates between the two. Identifications are controlled by
//! target-decoy FDR and assembled into protein contigs over a
//! confidence-weighted de Bruijn graph.
//!
//! The modules mirror the pipeline:
//!
//! * [`chem`] — residue masses, modifications, fragment ions, tolerances
//! * [`msio`] — MGF / FASTA / PSM-TSV parsing and the UniProt client
//! * [`digest`] — enzymatic digestion and decoy generation
//! * [`massindex`] — the mass-sorted peptide store behind database search
//! * [`scorer`] — the step-conditional scoring contract and the built-in
//!   ion-evidence scorer
//! * [`search`] — database search, de novo beam search, hybrid
//!   arbitration, FDR
//! * [`assembly`] — peptides to contigs
//! * [`eval`], [`synth`] — accuracy metrics and the synthetic-spectrum
//!   harness
//! * [`config`], [`driver`] — configuration and the CLI pipelines
//!
//! The book under `book/` walks through each stage with runnable
//! examples; its code blocks double as this crate's doctests.

pub mod assembly;
pub mod chem;
pub mod config;
pub mod digest;
pub mod driver;
pub mod error;
pub mod eval;
pub mod massindex;
pub mod msio;
pub mod scorer;
pub mod search;
pub mod synth;

pub use error::{Error, Result};

// Run every code snippet in the book as a doctest, so the guide can never
// drift from the API.
#[cfg(doctest)]
mod booktest {
    macro_rules! booktest {
        ($name:ident, $path:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $path))]
            mod $name {}
        };
    }
    booktest!(ch01_overview, "ch01_overview.md");
    booktest!(ch02_masses, "ch02_masses.md");
    booktest!(ch03_io, "ch03_spectra_and_sequences.md");
    booktest!(ch04_digestion, "ch04_digestion_and_decoys.md");
    booktest!(ch05_index, "ch05_mass_index.md");
    booktest!(ch06_scoring, "ch06_scoring.md");
    booktest!(ch07_denovo, "ch07_de_novo.md");
    booktest!(ch08_search_fdr, "ch08_database_search_and_fdr.md");
    booktest!(ch09_assembly, "ch09_assembly.md");
    booktest!(ch10_cli, "ch10_command_line.md");
}

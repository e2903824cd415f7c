//! Synthetic spectrum harness: theoretical b/y peaks with optional seeded
//! noise and dropout. Every randomized element is reproducible from its
//! seed, so end-to-end tests are byte-stable.

use crate::chem::{IonKind, Peptide, ResidueTable};
use crate::error::Result;
use crate::msio::SpectrumRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Intensity assigned to each theoretical peak.
#[derive(Debug, Clone, Copy)]
pub enum IntensityModel {
    Constant(f64),
}

impl Default for IntensityModel {
    fn default() -> Self {
        IntensityModel::Constant(1.0)
    }
}

impl IntensityModel {
    fn intensity(&self) -> f64 {
        match *self {
            IntensityModel::Constant(v) => v,
        }
    }
}

/// Uniform-random noise peaks in [100, precursor m/z].
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub n_peaks: usize,
    pub seed: u64,
}

/// Random removal of true peaks.
#[derive(Debug, Clone, Copy)]
pub struct DropoutSpec {
    /// Probability that each true peak is dropped.
    pub fraction: f64,
    pub seed: u64,
}

/// Generate a synthetic spectrum for a peptide: peaks at all requested
/// theoretical fragment m/z values (singly charged), precursor fields from
/// the peptide mass and charge. The record id is the peptide string;
/// callers may overwrite it.
pub fn synth_spectrum(
    peptide: &Peptide,
    charge: u32,
    kinds: &[IonKind],
    intensity: IntensityModel,
    noise: Option<NoiseSpec>,
    dropout: Option<DropoutSpec>,
) -> Result<SpectrumRecord> {
    let table = ResidueTable::standard();
    let neutral = table.peptide_mass(peptide);
    let precursor_mz = (neutral + charge as f64 * table.proton_mass) / charge as f64;

    let mut peaks: Vec<(f64, f64)> = table
        .fragment_mzs(peptide, kinds, 1)?
        .into_iter()
        .map(|ion| (ion.mz, intensity.intensity()))
        .collect();

    if let Some(d) = dropout {
        let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
        peaks.retain(|_| !rng.gen_bool(d.fraction.clamp(0.0, 1.0)));
    }

    if let Some(n) = noise {
        let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
        for _ in 0..n.n_peaks {
            let mz = rng.gen_range(100.0..precursor_mz.max(101.0));
            let intensity = rng.gen_range(0.1..=1.0);
            peaks.push((mz, intensity));
        }
    }

    SpectrumRecord::new(peptide.to_string(), precursor_mz, charge, None, peaks)
}

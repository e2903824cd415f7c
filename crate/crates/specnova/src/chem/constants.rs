//! Versioned monoisotopic mass constants.
//!
//! All masses are in Daltons, monoisotopic, taken from the standard published
//! residue table at five decimal places. Residue masses are *residue* masses
//! (amino acid minus water); a neutral peptide is the sum of its residue
//! masses plus one water.
//!
//! The table is versioned: [`table_hash`] folds every constant below into a
//! single fingerprint that guards serialized artifacts (e.g. the peptide
//! index cache) against silent mass-table drift. Bump [`TABLE_VERSION`]
//! whenever any constant changes.

/// Version of the constants table. Serialized into index caches.
pub const TABLE_VERSION: u32 = 1;

/// Monoisotopic mass of water (H2O), Da.
pub const WATER: f64 = 18.010565;

/// Mass of a proton, Da.
pub const PROTON: f64 = 1.007276;

/// Carbamidomethylation delta (+C2H3NO), applies to C.
pub const DELTA_CARBAMIDOMETHYL: f64 = 57.02146;

/// Oxidation delta (+O), applies to M.
pub const DELTA_OXIDATION: f64 = 15.99491;

/// Deamidation delta (−NH +OH), applies to N and Q.
pub const DELTA_DEAMIDATION: f64 = 0.98402;

/// The 20 standard residues and their monoisotopic residue masses, Da.
///
/// Note the two deliberate near-degeneracies that shape everything
/// downstream: I and L are exactly isobaric, and N(deam)/Q(deam) land
/// within 1e-5 Da of D/E respectively.
pub const STANDARD_RESIDUES: [(u8, f64); 20] = [
    (b'A', 71.03711),
    (b'C', 103.00919),
    (b'D', 115.02694),
    (b'E', 129.04259),
    (b'F', 147.06841),
    (b'G', 57.02146),
    (b'H', 137.05891),
    (b'I', 113.08406),
    (b'K', 128.09496),
    (b'L', 113.08406),
    (b'M', 131.04049),
    (b'N', 114.04293),
    (b'P', 97.05276),
    (b'Q', 128.05858),
    (b'R', 156.10111),
    (b'S', 87.03203),
    (b'T', 101.04768),
    (b'V', 99.06841),
    (b'W', 186.07931),
    (b'Y', 163.06333),
];

/// FNV-1a fingerprint of the full constants table (version, residues,
/// modification deltas, water, proton). Two builds agree on this value
/// iff they agree on every mass above.
pub fn table_hash() -> u64 {
    let mut h = Fnv1a::new();
    h.write_u32(TABLE_VERSION);
    for &(sym, mass) in &STANDARD_RESIDUES {
        h.write_u8(sym);
        h.write_f64(mass);
    }
    h.write_f64(DELTA_CARBAMIDOMETHYL);
    h.write_f64(DELTA_OXIDATION);
    h.write_f64(DELTA_DEAMIDATION);
    h.write_f64(WATER);
    h.write_f64(PROTON);
    h.finish()
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
    fn write_u8(&mut self, b: u8) {
        self.0 ^= b as u64;
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }
    fn write_u32(&mut self, v: u32) {
        for b in v.to_le_bytes() {
            self.write_u8(b);
        }
    }
    fn write_f64(&mut self, v: f64) {
        for b in v.to_bits().to_le_bytes() {
            self.write_u8(b);
        }
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

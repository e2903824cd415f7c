//! Mass arithmetic: residue masses, modifications, peptide neutral mass,
//! theoretical fragment ions, and tolerance windows.
//!
//! Everything here is pure and immutable after construction; the rest of the
//! crate treats this module as ground truth for masses.

pub mod constants;

use crate::error::{Error, Result};
use std::fmt;
use std::sync::OnceLock;

/// A post-translational modification supported by the engine.
///
/// Each modification is only valid on its host residue(s):
/// carbamidomethyl on C, oxidation on M, deamidation on N or Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modification {
    Carbamidomethyl,
    Oxidation,
    Deamidation,
}

impl Modification {
    /// Monoisotopic mass delta added to the host residue.
    pub fn delta(self) -> f64 {
        match self {
            Modification::Carbamidomethyl => constants::DELTA_CARBAMIDOMETHYL,
            Modification::Oxidation => constants::DELTA_OXIDATION,
            Modification::Deamidation => constants::DELTA_DEAMIDATION,
        }
    }

    /// Short tag used in sequence strings, e.g. `M(ox)`.
    pub fn tag(self) -> &'static str {
        match self {
            Modification::Carbamidomethyl => "cam",
            Modification::Oxidation => "ox",
            Modification::Deamidation => "deam",
        }
    }

    /// Residues this modification may sit on.
    pub fn hosts(self) -> &'static [u8] {
        match self {
            Modification::Carbamidomethyl => b"C",
            Modification::Oxidation => b"M",
            Modification::Deamidation => b"NQ",
        }
    }

    /// Parse a tag or full name, case-insensitive: `cam`/`carbamidomethyl`,
    /// `ox`/`oxidation`, `deam`/`deamidation`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cam" | "carbamidomethyl" | "carbamidomethylation" => Ok(Modification::Carbamidomethyl),
            "ox" | "oxidation" => Ok(Modification::Oxidation),
            "deam" | "deamidation" => Ok(Modification::Deamidation),
            other => Err(Error::InvalidInput(format!("unknown modification '{other}'"))),
        }
    }
}

/// One residue position: a standard amino acid letter plus an optional
/// modification. Construction validates the (symbol, modification) pair, so
/// an existing token always has a well-defined mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueToken {
    symbol: u8,
    modification: Option<Modification>,
}

impl ResidueToken {
    pub fn new(symbol: u8, modification: Option<Modification>) -> Result<Self> {
        let symbol = symbol.to_ascii_uppercase();
        if !is_standard_residue(symbol) {
            return Err(Error::InvalidResidue(format!("{}", symbol as char)));
        }
        if let Some(m) = modification {
            if !m.hosts().contains(&symbol) {
                return Err(Error::InvalidResidue(format!(
                    "{}({})",
                    symbol as char,
                    m.tag()
                )));
            }
        }
        Ok(ResidueToken { symbol, modification })
    }

    pub fn bare(symbol: u8) -> Result<Self> {
        ResidueToken::new(symbol, None)
    }

    pub fn symbol(&self) -> u8 {
        self.symbol
    }

    pub fn modification(&self) -> Option<Modification> {
        self.modification
    }
}

impl fmt::Display for ResidueToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.modification {
            None => write!(f, "{}", self.symbol as char),
            Some(m) => write!(f, "{}({})", self.symbol as char, m.tag()),
        }
    }
}

fn is_standard_residue(symbol: u8) -> bool {
    constants::STANDARD_RESIDUES.iter().any(|&(s, _)| s == symbol)
}

/// The 24 residue tokens with defined masses: 20 standard plus C(cam),
/// M(ox), N(deam), Q(deam), in stable order (standard residues
/// alphabetically, then the modified forms).
pub fn residue_vocabulary() -> Vec<ResidueToken> {
    let mut v: Vec<ResidueToken> = constants::STANDARD_RESIDUES
        .iter()
        .map(|&(s, _)| ResidueToken { symbol: s, modification: None })
        .collect();
    v.push(ResidueToken { symbol: b'C', modification: Some(Modification::Carbamidomethyl) });
    v.push(ResidueToken { symbol: b'M', modification: Some(Modification::Oxidation) });
    v.push(ResidueToken { symbol: b'N', modification: Some(Modification::Deamidation) });
    v.push(ResidueToken { symbol: b'Q', modification: Some(Modification::Deamidation) });
    v
}

/// Immutable monoisotopic mass table over the residue vocabulary.
#[derive(Debug)]
pub struct ResidueTable {
    base: [f64; 26],
    pub water_mass: f64,
    pub proton_mass: f64,
}

impl ResidueTable {
    /// The standard table, shared process-wide.
    pub fn standard() -> &'static ResidueTable {
        static TABLE: OnceLock<ResidueTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let mut base = [f64::NAN; 26];
            for &(sym, mass) in &constants::STANDARD_RESIDUES {
                base[(sym - b'A') as usize] = mass;
            }
            ResidueTable {
                base,
                water_mass: constants::WATER,
                proton_mass: constants::PROTON,
            }
        })
    }

    /// Monoisotopic mass of one residue token (base mass + modification delta).
    pub fn residue_mass(&self, token: ResidueToken) -> f64 {
        let base = self.base[(token.symbol - b'A') as usize];
        base + token.modification.map_or(0.0, Modification::delta)
    }

    /// Neutral (uncharged) mass of a peptide: sum of residue masses + water.
    pub fn peptide_mass(&self, peptide: &Peptide) -> f64 {
        self.residue_sum(peptide.tokens()) + self.water_mass
    }

    /// Sum of residue masses, without termini.
    pub fn residue_sum(&self, tokens: &[ResidueToken]) -> f64 {
        tokens.iter().map(|&t| self.residue_mass(t)).sum()
    }

    /// Theoretical b/y fragment m/z values for the interior cuts of a
    /// peptide (indices 1..n−1; the full-length b_n/y_n are excluded).
    /// Output is sorted by (kind, index).
    pub fn fragment_mzs(
        &self,
        peptide: &Peptide,
        kinds: &[IonKind],
        charge: u32,
    ) -> Result<Vec<FragmentIon>> {
        if charge == 0 {
            return Err(Error::InvalidInput("fragment charge must be >= 1".into()));
        }
        let tokens = peptide.tokens();
        let n = tokens.len();
        let z = charge as f64;
        let mut out = Vec::with_capacity(kinds.len() * n.saturating_sub(1));
        let mut sorted_kinds = kinds.to_vec();
        sorted_kinds.sort();
        sorted_kinds.dedup();
        for kind in sorted_kinds {
            match kind {
                IonKind::B => {
                    let mut prefix = 0.0;
                    for (i, &t) in tokens.iter().take(n - 1).enumerate() {
                        prefix += self.residue_mass(t);
                        out.push(FragmentIon {
                            kind: IonKind::B,
                            index: i + 1,
                            charge,
                            mz: (prefix + z * self.proton_mass) / z,
                        });
                    }
                }
                IonKind::Y => {
                    let mut suffix = 0.0;
                    for (j, &t) in tokens.iter().rev().take(n - 1).enumerate() {
                        suffix += self.residue_mass(t);
                        out.push(FragmentIon {
                            kind: IonKind::Y,
                            index: j + 1,
                            charge,
                            mz: (suffix + self.water_mass + z * self.proton_mass) / z,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Fragment ion series kind. Only the b and y series are modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IonKind {
    B,
    Y,
}

impl fmt::Display for IonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IonKind::B => write!(f, "b"),
            IonKind::Y => write!(f, "y"),
        }
    }
}

/// One theoretical fragment ion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FragmentIon {
    pub kind: IonKind,
    /// 1-based ordinal within the series.
    pub index: usize,
    pub charge: u32,
    pub mz: f64,
}

/// An ordered, non-empty sequence of residue tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Peptide {
    tokens: Vec<ResidueToken>,
}

impl Peptide {
    pub fn new(tokens: Vec<ResidueToken>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyPeptide);
        }
        Ok(Peptide { tokens })
    }

    /// Parse a sequence string with optional modification suffixes, e.g.
    /// `AC(cam)M(ox)K`.
    pub fn parse(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let sym = bytes[i];
            i += 1;
            let modification = if i < bytes.len() && bytes[i] == b'(' {
                let close = s[i..]
                    .find(')')
                    .ok_or_else(|| Error::InvalidResidue(format!("unclosed '(' in '{s}'")))?;
                let tag = &s[i + 1..i + close];
                i += close + 1;
                Some(Modification::parse(tag)?)
            } else {
                None
            };
            tokens.push(ResidueToken::new(sym, modification)?);
        }
        Peptide::new(tokens)
    }

    pub fn tokens(&self) -> &[ResidueToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The peptide with its residue order reversed.
    pub fn reversed(&self) -> Peptide {
        let mut tokens = self.tokens.clone();
        tokens.reverse();
        Peptide { tokens }
    }

    /// Canonical token string; the deterministic tie-break key used
    /// throughout ranking.
    pub fn sequence_key(&self) -> String {
        self.to_string()
    }

    /// Neutral mass under the standard table.
    pub fn neutral_mass(&self) -> f64 {
        ResidueTable::standard().peptide_mass(self)
    }
}

impl fmt::Display for Peptide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Peptide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Peptide::parse(s)
    }
}

/// A mass tolerance, either proportional (ppm) or absolute (Da).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    value: f64,
    unit: ToleranceUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceUnit {
    Ppm,
    Da,
}

impl Tolerance {
    pub fn ppm(value: f64) -> Result<Self> {
        Tolerance::checked(value, ToleranceUnit::Ppm)
    }

    pub fn da(value: f64) -> Result<Self> {
        Tolerance::checked(value, ToleranceUnit::Da)
    }

    fn checked(value: f64, unit: ToleranceUnit) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidInput(format!(
                "tolerance must be finite and >= 0, got {value}"
            )));
        }
        Ok(Tolerance { value, unit })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn unit(&self) -> ToleranceUnit {
        self.unit
    }

    /// The (lo, hi) window around a positive reference mass.
    pub fn window(&self, mass: f64) -> Result<(f64, f64)> {
        if !(mass > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance window needs a positive mass, got {mass}"
            )));
        }
        let w = self.half_width(mass);
        Ok((mass - w, mass + w))
    }

    /// Half-width of the window at a reference mass. A ppm tolerance scales
    /// with the reference, a Da tolerance does not.
    pub fn half_width(&self, reference: f64) -> f64 {
        match self.unit {
            ToleranceUnit::Ppm => reference.abs() * self.value * 1e-6,
            ToleranceUnit::Da => self.value,
        }
    }

    /// Does `observed` fall within the window around `expected`?
    pub fn contains(&self, expected: f64, observed: f64) -> bool {
        (observed - expected).abs() <= self.half_width(expected)
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            ToleranceUnit::Ppm => write!(f, "{} ppm", self.value),
            ToleranceUnit::Da => write!(f, "{} Da", self.value),
        }
    }
}

/// A modification rule for search: which modification, restricted to which
/// host residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModSpec {
    pub modification: Modification,
    pub residues: Vec<u8>,
}

impl ModSpec {
    pub fn new(modification: Modification, residues: &[u8]) -> Result<Self> {
        let mut out = Vec::new();
        for &r in residues {
            let r = r.to_ascii_uppercase();
            if !modification.hosts().contains(&r) {
                return Err(Error::InvalidInput(format!(
                    "modification {} cannot sit on {}",
                    modification.tag(),
                    r as char
                )));
            }
            if !out.contains(&r) {
                out.push(r);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("modification spec without residues".into()));
        }
        Ok(ModSpec { modification, residues: out })
    }

    /// Parse `Name(RESIDUES)`, e.g. `Oxidation(M)` or `Deamidation(NQ)`.
    pub fn parse(s: &str) -> Result<Self> {
        let open = s
            .find('(')
            .ok_or_else(|| Error::InvalidInput(format!("mod spec '{s}' missing '(residues)'")))?;
        let close = s
            .rfind(')')
            .filter(|&c| c > open)
            .ok_or_else(|| Error::InvalidInput(format!("mod spec '{s}' missing ')'")))?;
        let modification = Modification::parse(s[..open].trim())?;
        ModSpec::new(modification, s[open + 1..close].trim().as_bytes())
    }

    fn applies_to(&self, token: ResidueToken) -> bool {
        token.modification().is_none() && self.residues.contains(&token.symbol())
    }
}

impl fmt::Display for ModSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let residues: String = self.residues.iter().map(|&r| r as char).collect();
        match self.modification {
            Modification::Carbamidomethyl => write!(f, "Carbamidomethyl({residues})"),
            Modification::Oxidation => write!(f, "Oxidation({residues})"),
            Modification::Deamidation => write!(f, "Deamidation({residues})"),
        }
    }
}

/// Enumerate modified variants of a peptide.
///
/// Fixed modifications are applied to every eligible site unconditionally.
/// Variable modifications are enumerated over all subsets of eligible sites
/// carrying at most `max_var` variable modifications in total; the
/// zero-variable-modification form is always included. Output order is
/// deterministic (site positions left to right, unmodified before modified).
pub fn expand_modifications(
    peptide: &Peptide,
    fixed: &[ModSpec],
    variable: &[ModSpec],
    max_var: usize,
) -> Result<Vec<Peptide>> {
    let mut base: Vec<ResidueToken> = peptide.tokens().to_vec();
    for spec in fixed {
        for t in base.iter_mut() {
            if spec.applies_to(*t) {
                *t = ResidueToken::new(t.symbol(), Some(spec.modification))?;
            }
        }
    }

    // Eligible variable sites: (position, candidate modifications in spec order).
    let mut sites: Vec<(usize, Vec<Modification>)> = Vec::new();
    for (i, &t) in base.iter().enumerate() {
        let mods: Vec<Modification> = variable
            .iter()
            .filter(|spec| spec.applies_to(t))
            .map(|spec| spec.modification)
            .collect();
        if !mods.is_empty() {
            sites.push((i, mods));
        }
    }

    let mut out = Vec::new();
    let mut current = base.clone();
    expand_rec(&base, &sites, 0, max_var, &mut current, &mut out);
    out.dedup();
    out.into_iter().map(Peptide::new).collect()
}

fn expand_rec(
    base: &[ResidueToken],
    sites: &[(usize, Vec<Modification>)],
    site_idx: usize,
    budget: usize,
    current: &mut Vec<ResidueToken>,
    out: &mut Vec<Vec<ResidueToken>>,
) {
    if site_idx == sites.len() {
        out.push(current.clone());
        return;
    }
    let (pos, ref mods) = sites[site_idx];
    // Leave the site unmodified.
    expand_rec(base, sites, site_idx + 1, budget, current, out);
    if budget == 0 {
        return;
    }
    for &m in mods {
        // Sites are pre-validated, reconstruct without re-checking.
        current[pos] = ResidueToken { symbol: base[pos].symbol(), modification: Some(m) };
        expand_rec(base, sites, site_idx + 1, budget - 1, current, out);
        current[pos] = base[pos];
    }
}

//! Binary cache for a built [`MassIndex`].
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            8 bytes  b"SNVIDX01"
//! format version   u32      currently 1
//! constants hash   u64      chem::constants::table_hash()
//! n_proteins       u64
//! n_accessions     u32
//!   per accession: u16 length + UTF-8 bytes
//! n_entries        u64
//!   per entry:     u16 token count
//!                  per token: u8 symbol, u8 modification code
//!                  f64 neutral mass
//!                  u16 origin count
//!                  per origin: u32 accession id, u8 is_decoy
//! ```
//!
//! Loading refuses any file whose magic, version, or constants hash does
//! not match this build, so an index can never silently carry masses from
//! a different table.

use super::{MassIndex, PeptideEntry};
use crate::chem::{constants, Modification, Peptide, ResidueToken};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"SNVIDX01";
const FORMAT_VERSION: u32 = 1;

fn mod_code(m: Option<Modification>) -> u8 {
    match m {
        None => 0,
        Some(Modification::Carbamidomethyl) => 1,
        Some(Modification::Oxidation) => 2,
        Some(Modification::Deamidation) => 3,
    }
}

fn mod_from_code(code: u8) -> Result<Option<Modification>> {
    match code {
        0 => Ok(None),
        1 => Ok(Some(Modification::Carbamidomethyl)),
        2 => Ok(Some(Modification::Oxidation)),
        3 => Ok(Some(Modification::Deamidation)),
        other => Err(Error::CacheFormat(format!("unknown modification code {other}"))),
    }
}

pub fn save(index: &MassIndex, path: &Path) -> Result<()> {
    let (entries, n_proteins) = index.parts();
    let mut w = BufWriter::new(std::fs::File::create(path)?);

    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&constants::table_hash().to_le_bytes())?;
    w.write_all(&(n_proteins as u64).to_le_bytes())?;

    // Accession table in first-appearance order over the sorted entries,
    // so identical indexes serialize to identical bytes.
    let mut accession_ids: HashMap<&str, u32> = HashMap::new();
    let mut accessions: Vec<&str> = Vec::new();
    for e in entries {
        for (acc, _) in &e.origin {
            accession_ids.entry(acc).or_insert_with(|| {
                accessions.push(acc);
                (accessions.len() - 1) as u32
            });
        }
    }
    w.write_all(&(accessions.len() as u32).to_le_bytes())?;
    for acc in &accessions {
        let bytes = acc.as_bytes();
        w.write_all(&(bytes.len() as u16).to_le_bytes())?;
        w.write_all(bytes)?;
    }

    w.write_all(&(entries.len() as u64).to_le_bytes())?;
    for e in entries {
        let tokens = e.peptide.tokens();
        w.write_all(&(tokens.len() as u16).to_le_bytes())?;
        for t in tokens {
            w.write_all(&[t.symbol(), mod_code(t.modification())])?;
        }
        w.write_all(&e.neutral_mass.to_le_bytes())?;
        w.write_all(&(e.origin.len() as u16).to_le_bytes())?;
        for (acc, is_decoy) in &e.origin {
            w.write_all(&accession_ids[acc.as_str()].to_le_bytes())?;
            w.write_all(&[*is_decoy as u8])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<MassIndex> {
    let mut r = BufReader::new(std::fs::File::open(path)?);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat("bad magic bytes (not an index cache)".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "format version {version}, this build reads {FORMAT_VERSION}"
        )));
    }
    let hash = read_u64(&mut r)?;
    if hash != constants::table_hash() {
        return Err(Error::CacheFormat(
            "constants-table hash mismatch; rebuild the index with this binary".into(),
        ));
    }
    let n_proteins = read_u64(&mut r)? as usize;

    let n_accessions = read_u32(&mut r)? as usize;
    let mut accessions = Vec::with_capacity(n_accessions);
    for _ in 0..n_accessions {
        let len = read_u16(&mut r)? as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf)?;
        accessions.push(String::from_utf8(buf).map_err(|e| Error::CacheFormat(e.to_string()))?);
    }

    let n_entries = read_u64(&mut r)? as usize;
    let mut entries = Vec::with_capacity(n_entries);
    for _ in 0..n_entries {
        let n_tokens = read_u16(&mut r)? as usize;
        let mut tokens = Vec::with_capacity(n_tokens);
        for _ in 0..n_tokens {
            let mut pair = [0u8; 2];
            r.read_exact(&mut pair)?;
            let modification = mod_from_code(pair[1])?;
            tokens.push(
                ResidueToken::new(pair[0], modification)
                    .map_err(|e| Error::CacheFormat(e.to_string()))?,
            );
        }
        let peptide = Peptide::new(tokens).map_err(|e| Error::CacheFormat(e.to_string()))?;
        let neutral_mass = f64::from_le_bytes(read_array(&mut r)?);
        let n_origins = read_u16(&mut r)? as usize;
        let mut origin = Vec::with_capacity(n_origins);
        for _ in 0..n_origins {
            let id = read_u32(&mut r)? as usize;
            let acc = accessions
                .get(id)
                .ok_or_else(|| Error::CacheFormat(format!("accession id {id} out of range")))?
                .clone();
            let mut d = [0u8; 1];
            r.read_exact(&mut d)?;
            origin.push((acc, d[0] != 0));
        }
        let sequence_key = peptide.sequence_key();
        entries.push(PeptideEntry { peptide, neutral_mass, origin, sequence_key });
    }

    Ok(MassIndex::from_parts(entries, n_proteins))
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    Ok(u16::from_le_bytes(read_array(r)?))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(r)?))
}

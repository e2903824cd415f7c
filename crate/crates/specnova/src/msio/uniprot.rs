//! Optional UniProt proteome download with a local FASTA cache.
//!
//! The transport is injectable so nothing in the test suite touches the
//! network; every pipeline also accepts a local FASTA path instead.

use super::fasta::{parse_fasta, FastaParse};
use crate::error::{Error, Result};
use std::io::BufReader;
use std::path::{Path, PathBuf};

pub const DEFAULT_ENDPOINT: &str = "https://rest.uniprot.org/uniprotkb/stream";

/// Minimal HTTP GET abstraction.
pub trait Transport {
    /// Fetch a URL, returning the body on a successful status.
    fn get(&self, url: &str) -> Result<String>;
}

/// [`Transport`] backed by a real HTTPS client.
#[derive(Default)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String> {
        let response = ureq::get(url)
            .timeout(std::time::Duration::from_secs(120))
            .call()
            .map_err(|e| Error::Fetch(e.to_string()))?;
        response
            .into_string()
            .map_err(|e| Error::Fetch(format!("reading response body: {e}")))
    }
}

/// Client for fetching reviewed (Swiss-Prot) or full proteomes by taxonomy.
pub struct UniprotClient {
    endpoint: String,
    cache_dir: PathBuf,
    transport: Box<dyn Transport>,
}

impl UniprotClient {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        UniprotClient {
            endpoint: DEFAULT_ENDPOINT.to_string(),
            cache_dir: cache_dir.into(),
            transport: Box::new(HttpTransport),
        }
    }

    pub fn with_transport(mut self, transport: Box<dyn Transport>) -> Self {
        self.transport = transport;
        self
    }

    pub fn with_endpoint(mut self, endpoint: impl Into<String>) -> Self {
        self.endpoint = endpoint.into();
        self
    }

    fn cache_path(&self, taxonomy_id: u32, reviewed_only: bool) -> PathBuf {
        let date = chrono::Utc::now().format("%Y%m%d");
        let scope = if reviewed_only { "reviewed" } else { "all" };
        self.cache_dir.join(format!("uniprot_tax{taxonomy_id}_{scope}_{date}.fasta"))
    }

    /// Fetch the FASTA for a taxon and parse it. A cache hit performs zero
    /// network operations. An HTTP failure leaves no partial cache behind.
    pub fn fetch_proteome(&self, taxonomy_id: u32, reviewed_only: bool) -> Result<FastaParse> {
        if taxonomy_id == 0 {
            return Err(Error::InvalidInput("taxonomy id must be > 0".into()));
        }
        let path = self.cache_path(taxonomy_id, reviewed_only);
        if path.exists() {
            log::debug!("uniprot cache hit: {}", path.display());
            return parse_cached(&path);
        }

        let mut query = format!("taxonomy_id:{taxonomy_id}");
        if reviewed_only {
            query.push_str(" AND reviewed:true");
        }
        let url = format!(
            "{}?query={}&format=fasta",
            self.endpoint,
            percent_encode(&query)
        );
        log::info!("fetching proteome: {url}");
        let body = self.transport.get(&url)?;
        if body.trim().is_empty() {
            log::warn!("taxonomy {taxonomy_id} returned no sequences");
            return Ok(FastaParse::default());
        }

        std::fs::create_dir_all(&self.cache_dir)?;
        let tmp = path.with_extension("fasta.partial");
        std::fs::write(&tmp, &body)?;
        std::fs::rename(&tmp, &path)?;
        parse_cached(&path)
    }
}

fn parse_cached(path: &Path) -> Result<FastaParse> {
    let file = std::fs::File::open(path)?;
    parse_fasta(BufReader::new(file))
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'_' | b'-' | b'.' | b':' => {
                out.push(b as char)
            }
            b' ' => out.push_str("%20"),
            other => out.push_str(&format!("%{other:02X}")),
        }
    }
    out
}

//! Confidence-weighted de Bruijn assembly of accepted peptides into
//! protein contigs.
//!
//! Peptide sequences are canonicalized first (I collapsed to L,
//! modifications stripped) because mass evidence cannot distinguish those
//! forms, so graph identity must not either. Every k-mer of a canonical
//! peptide becomes an edge weighted by the peptide's confidence; contigs
//! are maximal non-branching paths of the weight-filtered graph.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;

/// Map a peptide string onto the assembly alphabet: strip modification
/// tags, replace I with L. Idempotent.
pub fn canonicalize(peptide: &str) -> String {
    let mut out = String::with_capacity(peptide.len());
    let mut in_tag = false;
    for c in peptide.chars() {
        match c {
            '(' => in_tag = true,
            ')' => in_tag = false,
            _ if in_tag => {}
            'I' => out.push('L'),
            c => out.push(c),
        }
    }
    out
}

/// Turn a bidirectional length-normalized log score into a positive
/// additive edge weight in (0, 1].
pub fn confidence_from_score(score: f64) -> f64 {
    score.exp().clamp(f64::MIN_POSITIVE, 1.0)
}

#[derive(Debug, Clone, Default)]
struct EdgeData {
    weight: f64,
    /// Distinct contributing peptide ids, insertion order.
    peptides: Vec<usize>,
}

/// De Bruijn graph over canonical residue k-mers.
#[derive(Debug)]
pub struct DBGraph {
    k: usize,
    edges: HashMap<String, EdgeData>,
    /// Ids of peptides shorter than k, recorded but not in the graph.
    pub skipped: Vec<usize>,
}

impl DBGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_weight(&self, kmer: &str) -> Option<f64> {
        self.edges.get(kmer).map(|e| e.weight)
    }

    pub fn edge_support(&self, kmer: &str) -> Option<usize> {
        self.edges.get(kmer).map(|e| e.peptides.len())
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> f64 {
        self.edges.values().map(|e| e.weight).sum()
    }
}

/// Build the graph from `(sequence, confidence)` pairs. Peptide ids are
/// list positions. Peptides shorter than k are skipped with a warning.
pub fn build_graph(peptides: &[(String, f64)], k: usize) -> Result<DBGraph> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("assembly k must be >= 3, got {k}")));
    }
    let mut graph = DBGraph { k, edges: HashMap::new(), skipped: Vec::new() };
    for (id, (sequence, confidence)) in peptides.iter().enumerate() {
        if !(confidence > &0.0) {
            return Err(Error::InvalidInput(format!(
                "peptide {id} has non-positive confidence {confidence}"
            )));
        }
        let canonical = canonicalize(sequence);
        if canonical.len() < k {
            log::warn!("peptide {id} ('{canonical}') shorter than k={k}, excluded from assembly");
            graph.skipped.push(id);
            continue;
        }
        for start in 0..=canonical.len() - k {
            let kmer = &canonical[start..start + k];
            let edge = graph.edges.entry(kmer.to_string()).or_default();
            edge.weight += confidence;
            if edge.peptides.last() != Some(&id) {
                edge.peptides.push(id);
            }
        }
    }
    Ok(graph)
}

/// One assembled contig.
#[derive(Debug, Clone, PartialEq)]
pub struct Contig {
    pub sequence: String,
    /// Sorted ids of peptides supporting any edge of the contig.
    pub support: Vec<usize>,
    pub mean_weight: f64,
    pub is_cycle: bool,
}

/// Drop edges below `min_weight` and emit the maximal non-branching paths
/// of what remains (every interior node has in-degree 1 and out-degree 1).
/// Isolated cycles are emitted once, cut at their lexicographically
/// smallest node and flagged. Output is sorted by sequence.
pub fn extract_contigs(graph: &DBGraph, min_weight: f64) -> Vec<Contig> {
    let k = graph.k;
    let mut out_adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut in_deg: HashMap<&str, usize> = HashMap::new();
    let mut out_deg: HashMap<&str, usize> = HashMap::new();

    for (kmer, data) in &graph.edges {
        if data.weight < min_weight {
            continue;
        }
        let prefix = &kmer[..k - 1];
        let suffix = &kmer[1..];
        out_adj.entry(prefix).or_default().push(kmer);
        *out_deg.entry(prefix).or_default() += 1;
        *in_deg.entry(suffix).or_default() += 1;
        in_deg.entry(prefix).or_default();
        out_deg.entry(suffix).or_default();
    }
    for targets in out_adj.values_mut() {
        targets.sort_unstable();
    }
    let interior = |node: &str| -> bool {
        in_deg.get(node).copied().unwrap_or(0) == 1 && out_deg.get(node).copied().unwrap_or(0) == 1
    };

    let mut visited: HashSet<&str> = HashSet::new();
    let mut contigs: Vec<Contig> = Vec::new();

    // Linear unitigs: walk from every edge leaving a non-interior node.
    for (&node, targets) in &out_adj {
        if interior(node) {
            continue;
        }
        for &first in targets {
            if visited.contains(first) {
                continue;
            }
            let mut path = vec![first];
            visited.insert(first);
            let mut cursor = &first[1..];
            while interior(cursor) {
                let next = out_adj[cursor][0];
                if visited.contains(next) {
                    break;
                }
                visited.insert(next);
                path.push(next);
                cursor = &next[1..];
            }
            contigs.push(spell(graph, &path, false));
        }
    }

    // Whatever is left sits on cycles where every node is interior. Cut
    // each at its lexicographically smallest node.
    loop {
        let Some(start_edge) = out_adj
            .iter()
            .flat_map(|(_, targets)| targets.iter())
            .find(|e| !visited.contains(*e))
        else {
            break;
        };
        // Find the smallest node on this cycle.
        let mut cycle_nodes = vec![&start_edge[..k - 1]];
        let mut cursor = &start_edge[1..];
        while cursor != cycle_nodes[0] {
            cycle_nodes.push(cursor);
            cursor = &out_adj[cursor][0][1..];
        }
        let smallest = *cycle_nodes.iter().min().unwrap();

        let mut path = Vec::with_capacity(cycle_nodes.len());
        let mut cursor = smallest;
        loop {
            let edge = out_adj[cursor][0];
            visited.insert(edge);
            path.push(edge);
            cursor = &edge[1..];
            if cursor == smallest {
                break;
            }
        }
        contigs.push(spell(graph, &path, true));
    }

    contigs.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    contigs
}

fn spell(graph: &DBGraph, path: &[&str], is_cycle: bool) -> Contig {
    let mut sequence = path[0].to_string();
    for edge in &path[1..] {
        sequence.push(edge.as_bytes()[graph.k - 1] as char);
    }
    let mut support: Vec<usize> = Vec::new();
    let mut weight_sum = 0.0;
    for edge in path {
        let data = &graph.edges[*edge];
        weight_sum += data.weight;
        support.extend(&data.peptides);
    }
    support.sort_unstable();
    support.dedup();
    Contig { sequence, support, mean_weight: weight_sum / path.len() as f64, is_cycle }
}

/// Write contigs as FASTA: `>contig_<n> len=<L> mean_weight=<w> support=<m>`.
pub fn write_contigs_fasta<W: Write>(contigs: &[Contig], mut w: W) -> Result<()> {
    for (i, c) in contigs.iter().enumerate() {
        writeln!(
            w,
            ">contig_{} len={} mean_weight={:.6} support={}{}",
            i + 1,
            c.sequence.len(),
            c.mean_weight,
            c.support.len(),
            if c.is_cycle { " cycle=true" } else { "" }
        )?;
        writeln!(w, "{}", c.sequence)?;
    }
    Ok(())
}

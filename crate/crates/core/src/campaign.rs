//! Batch verification: for every member graph in a stream, decompose, check
//! the structural properties, color within the budget, optionally compare
//! against the exact oracle, and aggregate the outcomes. Per-graph records
//! are deterministic and sorted by graph hash, so reports are byte-identical
//! across runs and thread counts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::coloring::{color_decomposed, ColorBudget};
use crate::decompose::{check_properties, decompose, Decomposition};
use crate::formats::write_graph6;
use crate::graph::Graph;
use crate::oracle::{chromatic_number, clique_number, NodeBudget, OracleError};
use crate::patterns::{class_violation, Witness};

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    /// Run the exact chromatic oracle on members with at most
    /// `oracle_verify_max_n` vertices.
    pub oracle_verify: bool,
    pub oracle_verify_max_n: usize,
    pub node_budget: NodeBudget,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// Retain per-graph records in the report. Large exhaustive campaigns
    /// can drop them and keep only the totals.
    pub keep_records: bool,
}

impl Default for CampaignOptions {
    fn default() -> Self {
        CampaignOptions {
            oracle_verify: false,
            oracle_verify_max_n: 40,
            node_budget: NodeBudget::UNLIMITED,
            jobs: None,
            keep_records: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Ok,
    SkippedNonMember,
    Violation,
}

/// One graph's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct GraphRecord {
    pub hash: String,
    pub n: usize,
    pub m: usize,
    pub status: RecordStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colors_used: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_chi: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CampaignTotals {
    pub graphs: u64,
    pub members: u64,
    pub skipped_non_members: u64,
    pub graphs_with_violations: u64,
    pub violations: u64,
    pub by_branch: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub records: Vec<GraphRecord>,
    pub totals: CampaignTotals,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.totals.graphs_with_violations == 0
    }
}

/// Short stable identifier: prefix of the SHA-256 of the graph6 encoding.
pub fn graph_hash(g: &Graph) -> String {
    let g6 = write_graph6(g).expect("graph within graph6 bounds");
    let digest = Sha256::digest(g6.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn process_graph(g: &Graph, opts: &CampaignOptions) -> GraphRecord {
    let mut record = GraphRecord {
        hash: graph_hash(g),
        n: g.n(),
        m: g.edge_count(),
        status: RecordStatus::Ok,
        omega: None,
        k: None,
        branch: None,
        colors_used: None,
        budget: None,
        oracle_chi: None,
        witness: None,
        violations: Vec::new(),
    };

    if let Some(witness) = class_violation(g) {
        record.status = RecordStatus::SkippedNonMember;
        record.witness = Some(witness);
        return record;
    }

    let decomposition = match decompose(g) {
        Ok(d) => d,
        Err(e) => {
            record.status = RecordStatus::Violation;
            record.violations.push(format!("decomposition: {e}"));
            return record;
        }
    };
    record.omega = Some(decomposition.omega());
    record.k = decomposition.k();
    record.budget = Some(ColorBudget::for_omega(decomposition.omega()).budget);

    if let Decomposition::Full {
        cover_a,
        cover_b,
        partition,
        ..
    } = &decomposition
    {
        let report = check_properties(g, cover_a, cover_b, partition);
        for violation in report.violations() {
            record.violations.push(format!(
                "property {}: witness {:?}",
                serde_json::to_string(&violation.id).expect("serializable id"),
                violation.witness
            ));
        }
    }

    match color_decomposed(g, &decomposition, opts.node_budget) {
        Ok((coloring, trace)) => {
            record.branch = Some(trace.branch.label().to_string());
            record.colors_used = Some(coloring.colors_used());
        }
        Err(e) => {
            record.violations.push(format!("coloring: {e}"));
        }
    }

    if opts.oracle_verify && g.n() <= opts.oracle_verify_max_n {
        match chromatic_number(g, opts.node_budget) {
            Ok((chi, _)) => {
                record.oracle_chi = Some(chi);
                let (omega, _) = clique_number(g);
                if (omega as u32) > chi {
                    record
                        .violations
                        .push(format!("oracle: omega {omega} exceeds chi {chi}"));
                }
                if let Some(used) = record.colors_used {
                    if chi > used {
                        record.violations.push(format!(
                            "oracle: chi {chi} exceeds the constructive count {used}"
                        ));
                    }
                }
                if let Some(budget) = record.budget {
                    if chi > budget {
                        record
                            .violations
                            .push(format!("oracle: chi {chi} exceeds the budget {budget}"));
                    }
                }
            }
            Err(OracleError::BudgetExceeded { .. }) => {
                // oracle result simply unavailable at this budget
            }
            Err(e) => {
                record.violations.push(format!("oracle: {e}"));
            }
        }
    }

    if !record.violations.is_empty() {
        record.status = RecordStatus::Violation;
    }
    record
}

/// Runs the campaign over a graph stream, holding only a bounded window of
/// graphs in memory at a time.
pub fn run_campaign(
    graphs: impl Iterator<Item = Graph>,
    opts: &CampaignOptions,
) -> CampaignReport {
    const CHUNK: usize = 4096;
    let mut records: Vec<GraphRecord> = Vec::new();
    let mut totals = CampaignTotals::default();

    let pool = opts.jobs.map(|j| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
    });
    let mut process_chunk = |chunk: &[Graph]| {
        let chunk_records: Vec<GraphRecord> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().map(|g| process_graph(g, opts)).collect()),
            None => chunk.par_iter().map(|g| process_graph(g, opts)).collect(),
        };
        for r in &chunk_records {
            totals.graphs += 1;
            match r.status {
                RecordStatus::SkippedNonMember => totals.skipped_non_members += 1,
                _ => totals.members += 1,
            }
            if r.status == RecordStatus::Violation {
                totals.graphs_with_violations += 1;
            }
            totals.violations += r.violations.len() as u64;
            if let Some(branch) = &r.branch {
                *totals.by_branch.entry(branch.clone()).or_insert(0) += 1;
            }
        }
        if opts.keep_records {
            records.extend(chunk_records);
        }
    };

    let mut window: Vec<Graph> = Vec::with_capacity(CHUNK);
    for g in graphs {
        window.push(g);
        if window.len() == CHUNK {
            process_chunk(&window);
            window.clear();
        }
    }
    if !window.is_empty() {
        process_chunk(&window);
    }
    drop(window);

    records.sort_by(|a, b| a.hash.cmp(&b.hash));
    CampaignReport { records, totals }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{enumerate_all_graphs, sample_class_member};

    #[test]
    fn campaign_over_n4_enumeration_is_clean() {
        let opts = CampaignOptions {
            oracle_verify: true,
            ..Default::default()
        };
        let report = run_campaign(enumerate_all_graphs(4).unwrap(), &opts);
        assert_eq!(report.totals.graphs, 64);
        assert_eq!(report.totals.members, 64);
        assert_eq!(report.totals.graphs_with_violations, 0);
        assert!(report.passed());
    }

    #[test]
    fn campaign_flags_non_members() {
        let mut b = Graph::complete(5).to_builder();
        b.remove_edge(0, 1).unwrap();
        b.remove_edge(0, 2).unwrap();
        let hvn = b.build();
        let report = run_campaign(
            vec![hvn, Graph::cycle(5)].into_iter(),
            &CampaignOptions::default(),
        );
        assert_eq!(report.totals.skipped_non_members, 1);
        assert_eq!(report.totals.members, 1);
        assert!(report.passed(), "non-members are skipped, not violations");
        let skipped = report
            .records
            .iter()
            .find(|r| r.status == RecordStatus::SkippedNonMember)
            .unwrap();
        assert_eq!(skipped.witness.as_ref().unwrap().pattern(), "HVN");
    }

    #[test]
    fn reports_are_deterministic_across_thread_counts() {
        let graphs: Vec<Graph> = (0..40u64)
            .map(|seed| sample_class_member(12, 0.6, seed))
            .collect();
        let serial = run_campaign(
            graphs.clone().into_iter(),
            &CampaignOptions {
                jobs: Some(1),
                oracle_verify: true,
                ..Default::default()
            },
        );
        let parallel = run_campaign(
            graphs.into_iter(),
            &CampaignOptions {
                jobs: Some(2),
                oracle_verify: true,
                ..Default::default()
            },
        );
        let a = serde_json::to_string(&serial).unwrap();
        let b = serde_json::to_string(&parallel).unwrap();
        assert_eq!(a, b);
    }
}

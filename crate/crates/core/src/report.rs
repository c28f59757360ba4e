//! Assemble analysis outputs into a draft meeting agenda, ranked-pair
//! tables, evaluation reports, and chart-ready data files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{ClusterModel, DistributionData, Projection2D};
use crate::config::RunConfig;
use crate::ingest::SourceFormat;
use crate::similarity::{pearson, PairScore, RankedPairs, SimilarityError};
use crate::summarize::SummaryRecord;
use crate::textproc::MarkerCounts;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("thresholds must satisfy 0 <= tau_lo < tau_hi <= 1, got tau_lo={tau_lo} tau_hi={tau_hi}")]
    BadThresholds { tau_lo: f64, tau_hi: f64 },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown pair id: {0}")]
    UnknownPairId(String),
    #[error(transparent)]
    Correlation(#[from] SimilarityError),
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("malformed csv {path}: {message}")]
    BadCsv { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketKind {
    Agreed,
    NeedsDiscussion,
    Disputed,
}

/// Raw threshold classification of pairs. Exhaustive and mutually exclusive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Buckets {
    pub agreed: Vec<PairScore>,
    pub needs_discussion: Vec<PairScore>,
    pub disputed: Vec<PairScore>,
}

/// combined >= tau_hi is agreed, combined <= tau_lo is disputed, the middle
/// band needs discussion.
pub fn bucket_pairs(
    pairs: &[PairScore],
    tau_hi: f64,
    tau_lo: f64,
) -> Result<Buckets, ReportError> {
    if !(0.0 <= tau_lo && tau_lo < tau_hi && tau_hi <= 1.0) {
        return Err(ReportError::BadThresholds { tau_lo, tau_hi });
    }
    let mut buckets = Buckets::default();
    for pair in pairs {
        if pair.combined >= tau_hi {
            buckets.agreed.push(pair.clone());
        } else if pair.combined <= tau_lo {
            buckets.disputed.push(pair.clone());
        } else {
            buckets.needs_discussion.push(pair.clone());
        }
    }
    Ok(buckets)
}

/// A group of same-topic pairs inside one agenda bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgendaEntry {
    pub cluster: usize,
    pub topic_label: String,
    pub companies: Vec<String>,
    pub representative_summary: String,
    pub pairs: Vec<PairScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgendaBucket {
    pub kind: BucketKind,
    pub entries: Vec<AgendaEntry>,
}

/// Document identity as carried inside the bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocMeta {
    pub id: String,
    pub company: String,
    pub title: String,
    pub source_format: SourceFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    /// Chair-flagged documents are listed but not analyzed.
    pub analyzed: bool,
}

/// One analyzed leaf section; index-aligned with cluster assignments and
/// projection coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionMeta {
    pub doc_id: String,
    pub path: String,
    pub heading: String,
    pub company: String,
    pub markers: MarkerCounts,
    pub image_count: usize,
}

impl SectionMeta {
    pub fn key(&self) -> (String, String) {
        (self.doc_id.clone(), self.path.clone())
    }
}

/// Everything one analysis run produced. `config` plus the same inputs and
/// seed reproduce the run byte-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub manifest_digest: String,
    pub documents: Vec<DocMeta>,
    pub sections: Vec<SectionMeta>,
    pub summaries: Vec<SummaryRecord>,
    pub section_pairs: Vec<PairScore>,
    pub document_pairs: Vec<PairScore>,
    pub ranked_sections: Option<RankedPairs>,
    pub ranked_documents: Option<RankedPairs>,
    pub cluster_model: ClusterModel,
    pub projection: Projection2D,
    pub distributions: Vec<DistributionData>,
    pub agenda: Vec<AgendaBucket>,
    pub warnings: Vec<String>,
    pub config: RunConfig,
}

impl AnalysisBundle {
    /// Check that every cross-reference resolves inside the bundle.
    pub fn validate_references(&self) -> Result<(), String> {
        let section_keys: BTreeSet<(String, String)> =
            self.sections.iter().map(|s| s.key()).collect();
        let doc_ids: BTreeSet<&str> = self.documents.iter().map(|d| d.id.as_str()).collect();

        for pair in &self.section_pairs {
            for r in [&pair.a, &pair.b] {
                let path = r.section_path.clone().unwrap_or_default();
                if !section_keys.contains(&(r.doc_id.clone(), path)) {
                    return Err(format!("section pair references unknown section {r}"));
                }
            }
        }
        for pair in &self.document_pairs {
            for r in [&pair.a, &pair.b] {
                if !doc_ids.contains(r.doc_id.as_str()) {
                    return Err(format!("document pair references unknown document {r}"));
                }
            }
        }
        for summary in &self.summaries {
            let path = summary.section_ref.section_path.clone().unwrap_or_default();
            if !section_keys.contains(&(summary.section_ref.doc_id.clone(), path)) {
                return Err(format!(
                    "summary references unknown section {}",
                    summary.section_ref
                ));
            }
        }
        if self.cluster_model.assignments.len() != self.sections.len() {
            return Err("cluster assignments do not align with sections".into());
        }
        if self.projection.coords.len() != self.sections.len() {
            return Err("projection coordinates do not align with sections".into());
        }
        Ok(())
    }

    fn company_of_doc<'a>(&'a self, doc_id: &'a str) -> &'a str {
        self.documents
            .iter()
            .find(|d| d.id == doc_id)
            .map(|d| d.company.as_str())
            .unwrap_or(doc_id)
    }

    fn summary_text(&self, doc_id: &str, path: &str) -> Option<&str> {
        self.summaries
            .iter()
            .find(|s| {
                s.section_ref.doc_id == doc_id
                    && s.section_ref.section_path.as_deref() == Some(path)
            })
            .map(|s| s.summary_text.as_str())
    }

    /// Clusters ordered by member count (descending), then id.
    pub fn clusters_by_size(&self) -> Vec<(usize, usize)> {
        let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
        for &a in &self.cluster_model.assignments {
            *sizes.entry(a).or_insert(0) += 1;
        }
        let mut ordered: Vec<(usize, usize)> = sizes.into_iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ordered
    }

    pub fn cluster_label(&self, cluster: usize) -> String {
        self.cluster_model
            .labels
            .get(&cluster)
            .map(|terms| terms.join(" "))
            .filter(|l| !l.is_empty())
            .unwrap_or_else(|| format!("cluster {cluster}"))
    }
}

/// Group bucketed pairs by topic cluster into agenda entries. A pair's topic
/// is the cluster of its first section; entries follow cluster-size order.
pub fn build_agenda(
    bundle_sections: &[SectionMeta],
    assignments: &[usize],
    labels: &BTreeMap<usize, Vec<String>>,
    summaries: &[SummaryRecord],
    buckets: &Buckets,
    doc_companies: &BTreeMap<String, String>,
) -> Vec<AgendaBucket> {
    let cluster_of: BTreeMap<(String, String), usize> = bundle_sections
        .iter()
        .zip(assignments)
        .map(|(s, &a)| (s.key(), a))
        .collect();
    let summary_of: BTreeMap<(String, String), &str> = summaries
        .iter()
        .filter_map(|s| {
            s.section_ref.section_path.as_ref().map(|p| {
                (
                    (s.section_ref.doc_id.clone(), p.clone()),
                    s.summary_text.as_str(),
                )
            })
        })
        .collect();

    let mut cluster_sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for &a in assignments {
        *cluster_sizes.entry(a).or_insert(0) += 1;
    }
    let mut cluster_order: Vec<usize> = cluster_sizes.keys().copied().collect();
    cluster_order.sort_by(|a, b| {
        cluster_sizes[b]
            .cmp(&cluster_sizes[a])
            .then(a.cmp(b))
    });

    let build = |kind: BucketKind, pairs: &[PairScore]| -> AgendaBucket {
        let mut per_cluster: BTreeMap<usize, Vec<PairScore>> = BTreeMap::new();
        for pair in pairs {
            let key = (
                pair.a.doc_id.clone(),
                pair.a.section_path.clone().unwrap_or_default(),
            );
            if let Some(&cluster) = cluster_of.get(&key) {
                per_cluster.entry(cluster).or_default().push(pair.clone());
            }
        }
        let mut entries = Vec::new();
        for &cluster in &cluster_order {
            let Some(mut pairs) = per_cluster.remove(&cluster) else {
                continue;
            };
            // Strongest signal first: highest scores for agreed items,
            // lowest for disputed ones.
            pairs.sort_by(|x, y| {
                let order = x.combined.partial_cmp(&y.combined).expect("finite scores");
                match kind {
                    BucketKind::Disputed => order,
                    _ => order.reverse(),
                }
                .then_with(|| x.pair_id().cmp(&y.pair_id()))
            });
            let mut companies: BTreeSet<String> = BTreeSet::new();
            for pair in &pairs {
                for r in [&pair.a, &pair.b] {
                    if let Some(c) = doc_companies.get(&r.doc_id) {
                        companies.insert(c.clone());
                    }
                }
            }
            let lead = &pairs[0];
            let lead_key = (
                lead.a.doc_id.clone(),
                lead.a.section_path.clone().unwrap_or_default(),
            );
            let representative_summary = summary_of
                .get(&lead_key)
                .map(|s| s.to_string())
                .unwrap_or_default();
            let topic_label = labels
                .get(&cluster)
                .map(|terms| terms.join(" "))
                .filter(|l| !l.is_empty())
                .unwrap_or_else(|| format!("cluster {cluster}"));
            entries.push(AgendaEntry {
                cluster,
                topic_label,
                companies: companies.into_iter().collect(),
                representative_summary,
                pairs,
            });
        }
        AgendaBucket { kind, entries }
    };

    vec![
        build(BucketKind::Agreed, &buckets.agreed),
        build(BucketKind::NeedsDiscussion, &buckets.needs_discussion),
        build(BucketKind::Disputed, &buckets.disputed),
    ]
}

/// Pairs listed per agenda entry before pointing at the full CSV.
const AGENDA_PAIRS_PER_ENTRY: usize = 8;

/// Render the draft agenda as markdown. Pure function of the bundle.
pub fn generate_agenda(bundle: &AnalysisBundle) -> String {
    let mut out = String::new();
    out.push_str("# Draft meeting agenda\n\n");

    if bundle.sections.is_empty() {
        out.push_str("No contributions were available for analysis.\n");
        return out;
    }

    let analyzed: Vec<&DocMeta> = bundle.documents.iter().filter(|d| d.analyzed).collect();
    let companies: BTreeSet<&str> = analyzed.iter().map(|d| d.company.as_str()).collect();
    let _ = writeln!(
        out,
        "{} contributions from {} companies; {} section pairs scored.\n",
        analyzed.len(),
        companies.len(),
        bundle.section_pairs.len()
    );

    for (cluster, size) in bundle.clusters_by_size() {
        let _ = writeln!(
            out,
            "## Topic: {} ({} sections)\n",
            bundle.cluster_label(cluster),
            size
        );

        // Marker tallies per company over the topic's member sections;
        // companies without any marker statements stay silent.
        let mut tallies: BTreeMap<&str, MarkerCounts> = BTreeMap::new();
        for (section, &assigned) in bundle
            .sections
            .iter()
            .zip(&bundle.cluster_model.assignments)
        {
            if assigned == cluster {
                tallies
                    .entry(section.company.as_str())
                    .or_default()
                    .add(section.markers);
            }
        }
        let mut wrote_tally = false;
        for (company, counts) in &tallies {
            if counts.total() == 0 {
                continue;
            }
            let _ = writeln!(
                out,
                "- {}: Proposals: {}, Observations: {}, Scenarios: {}",
                company, counts.proposals, counts.observations, counts.scenarios
            );
            wrote_tally = true;
        }
        if wrote_tally {
            out.push('\n');
        }

        for bucket in &bundle.agenda {
            let Some(entry) = bucket.entries.iter().find(|e| e.cluster == cluster) else {
                continue;
            };
            let heading = match bucket.kind {
                BucketKind::Agreed => "Agreed",
                BucketKind::NeedsDiscussion => "Needs discussion",
                BucketKind::Disputed => "Disputed",
            };
            let _ = writeln!(out, "### {heading} ({})\n", entry.companies.join(", "));
            let shown = entry.pairs.iter().take(AGENDA_PAIRS_PER_ENTRY);
            match bucket.kind {
                BucketKind::Agreed => {
                    if !entry.representative_summary.is_empty() {
                        let _ = writeln!(out, "> {}\n", entry.representative_summary);
                    }
                    for pair in shown {
                        let _ = writeln!(
                            out,
                            "- {} vs {} (combined {:.3})",
                            describe_ref(bundle, &pair.a),
                            describe_ref(bundle, &pair.b),
                            pair.combined
                        );
                    }
                }
                _ => {
                    for pair in shown {
                        let _ = writeln!(
                            out,
                            "- {} vs {} (combined {:.3})",
                            describe_ref(bundle, &pair.a),
                            describe_ref(bundle, &pair.b),
                            pair.combined
                        );
                        for r in [&pair.a, &pair.b] {
                            if let Some(path) = &r.section_path {
                                if let Some(summary) = bundle.summary_text(&r.doc_id, path) {
                                    let _ = writeln!(
                                        out,
                                        "  - {}: {}",
                                        bundle.company_of_doc(&r.doc_id),
                                        summary
                                    );
                                }
                            }
                        }
                    }
                }
            }
            if entry.pairs.len() > AGENDA_PAIRS_PER_ENTRY {
                let _ = writeln!(
                    out,
                    "- plus {} more pairs (see pairs_sections.csv)",
                    entry.pairs.len() - AGENDA_PAIRS_PER_ENTRY
                );
            }
            out.push('\n');
        }
    }
    out
}

fn describe_ref(bundle: &AnalysisBundle, r: &crate::similarity::PairRef) -> String {
    let company = bundle.company_of_doc(&r.doc_id);
    match &r.section_path {
        Some(path) => {
            let heading = bundle
                .sections
                .iter()
                .find(|s| s.doc_id == r.doc_id && &s.path == path)
                .map(|s| s.heading.as_str())
                .unwrap_or("");
            if heading.is_empty() {
                format!("{company} [{r}]")
            } else {
                format!("{company} \"{heading}\"")
            }
        }
        None => company.to_string(),
    }
}

/// One exported scatter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub cluster: usize,
    pub label: String,
    pub doc_id: String,
    pub section_path: String,
}

fn scatter_points(bundle: &AnalysisBundle) -> Vec<ScatterPoint> {
    bundle
        .sections
        .iter()
        .enumerate()
        .map(|(i, section)| {
            let cluster = bundle.cluster_model.assignments[i];
            ScatterPoint {
                x: bundle.projection.coords[i][0],
                y: bundle.projection.coords[i][1],
                cluster,
                label: bundle.cluster_label(cluster),
                doc_id: section.doc_id.clone(),
                section_path: section.path.clone(),
            }
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    std::fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn pairs_csv(bundle: &AnalysisBundle, pairs: &[PairScore]) -> String {
    let mut sorted: Vec<&PairScore> = pairs.iter().collect();
    sorted.sort_by(|x, y| {
        y.combined
            .partial_cmp(&x.combined)
            .expect("finite scores")
            .then_with(|| x.pair_id().cmp(&y.pair_id()))
    });
    let mut out = String::from("pair_id,company_a,company_b,heading_sim,content_sim,combined\n");
    for pair in sorted {
        let heading = pair
            .heading_sim
            .map(|h| h.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            pair.pair_id(),
            bundle.company_of_doc(&pair.a.doc_id),
            bundle.company_of_doc(&pair.b.doc_id),
            heading,
            pair.content_sim,
            pair.combined
        );
    }
    out
}

/// Write all chart and report files into `out_dir`; returns the paths.
/// Output is byte-deterministic for a fixed bundle.
pub fn emit_chart_data(bundle: &AnalysisBundle, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(out_dir).map_err(|source| ReportError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let mut written = Vec::new();
    let mut emit = |name: &str, contents: String| -> Result<(), ReportError> {
        let path = out_dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };

    emit("pairs_sections.csv", pairs_csv(bundle, &bundle.section_pairs))?;
    emit("pairs_documents.csv", pairs_csv(bundle, &bundle.document_pairs))?;
    emit(
        "scatter.json",
        serde_json::to_string_pretty(&scatter_points(bundle))?,
    )?;
    emit(
        "distributions.json",
        serde_json::to_string_pretty(&bundle.distributions)?,
    )?;
    emit("agenda.md", generate_agenda(bundle))?;
    emit("bundle.json", serde_json::to_string_pretty(bundle)?)?;
    Ok(written)
}

/// A human score joined against the algorithm's score for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub pair_id: String,
    pub algorithm: f64,
    pub human: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub r: f64,
    pub n_used: usize,
    pub n_dropped: usize,
    pub rows: Vec<EvalRow>,
}

/// Join human ratings against algorithm scores by pair id and correlate with
/// pairwise deletion. Every rated pair must exist on the algorithm side.
pub fn evaluation_report(
    algorithm: &[(String, f64)],
    human: &[(String, Option<f64>)],
) -> Result<EvalReport, ReportError> {
    let by_id: BTreeMap<&str, f64> = algorithm
        .iter()
        .map(|(id, score)| (id.as_str(), *score))
        .collect();

    let mut rows = Vec::with_capacity(human.len());
    for (pair_id, rating) in human {
        let algorithm = *by_id
            .get(pair_id.as_str())
            .ok_or_else(|| ReportError::UnknownPairId(pair_id.clone()))?;
        rows.push(EvalRow {
            pair_id: pair_id.clone(),
            algorithm,
            human: *rating,
        });
    }

    let xs: Vec<Option<f64>> = rows.iter().map(|r| Some(r.algorithm)).collect();
    let ys: Vec<Option<f64>> = rows.iter().map(|r| r.human).collect();
    let r = pearson(&xs, &ys)?;
    let n_dropped = rows.iter().filter(|r| r.human.is_none()).count();
    Ok(EvalReport {
        r,
        n_used: rows.len() - n_dropped,
        n_dropped,
        rows,
    })
}

/// Read a `pair_id,score` CSV where score is a real or the literal NA.
pub fn read_score_csv(path: &Path) -> Result<Vec<(String, Option<f64>)>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ReportError::BadCsv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| ReportError::BadCsv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?
        .clone();
    let id_col = headers
        .iter()
        .position(|h| h == "pair_id")
        .ok_or_else(|| ReportError::BadCsv {
            path: path.to_path_buf(),
            message: "missing pair_id column".into(),
        })?;
    let score_col = headers
        .iter()
        .position(|h| h == "score" || h == "combined")
        .ok_or_else(|| ReportError::BadCsv {
            path: path.to_path_buf(),
            message: "missing score (or combined) column".into(),
        })?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ReportError::BadCsv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let id = record.get(id_col).unwrap_or_default().to_string();
        let raw = record.get(score_col).unwrap_or_default();
        let score = if raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("n/a") {
            None
        } else {
            Some(raw.parse::<f64>().map_err(|_| ReportError::BadCsv {
                path: path.to_path_buf(),
                message: format!("bad score value for {id}: {raw:?}"),
            })?)
        };
        rows.push((id, score));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{PairLevel, PairRef};

    fn pair(a: &str, b: &str, combined: f64) -> PairScore {
        PairScore {
            a: PairRef::section(a, "0"),
            b: PairRef::section(b, "0"),
            heading_sim: Some(combined),
            content_sim: combined,
            combined,
            level: PairLevel::Section,
        }
    }

    #[test]
    fn bucket_boundaries_match_thresholds() {
        let pairs = vec![pair("a", "b", 0.92), pair("a", "c", 0.11), pair("b", "c", 0.55)];
        let buckets = bucket_pairs(&pairs, 0.8, 0.3).unwrap();
        assert_eq!(buckets.agreed.len(), 1);
        assert_eq!(buckets.agreed[0].combined, 0.92);
        assert_eq!(buckets.disputed.len(), 1);
        assert_eq!(buckets.disputed[0].combined, 0.11);
        assert_eq!(buckets.needs_discussion.len(), 1);
        assert_eq!(buckets.needs_discussion[0].combined, 0.55);
    }

    #[test]
    fn bucketing_is_exhaustive_and_exclusive() {
        let pairs: Vec<PairScore> = (0..101)
            .map(|i| pair(&format!("a{i}"), &format!("b{i}"), i as f64 / 100.0))
            .collect();
        let buckets = bucket_pairs(&pairs, 0.8, 0.3).unwrap();
        let total = buckets.agreed.len() + buckets.needs_discussion.len() + buckets.disputed.len();
        assert_eq!(total, pairs.len());
        let mut ids: Vec<String> = buckets
            .agreed
            .iter()
            .chain(&buckets.needs_discussion)
            .chain(&buckets.disputed)
            .map(|p| p.pair_id())
            .collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), pairs.len());
    }

    #[test]
    fn boundary_values_are_inclusive() {
        let buckets = bucket_pairs(&[pair("a", "b", 0.8), pair("a", "c", 0.3)], 0.8, 0.3).unwrap();
        assert_eq!(buckets.agreed.len(), 1);
        assert_eq!(buckets.disputed.len(), 1);
        assert!(buckets.needs_discussion.is_empty());
    }

    #[test]
    fn bad_thresholds_rejected() {
        assert!(matches!(
            bucket_pairs(&[], 0.3, 0.8),
            Err(ReportError::BadThresholds { .. })
        ));
        assert!(matches!(
            bucket_pairs(&[], 1.2, 0.3),
            Err(ReportError::BadThresholds { .. })
        ));
    }

    #[test]
    fn evaluation_joins_and_correlates() {
        let algorithm: Vec<(String, f64)> = [
            ("PA-1", 0.92),
            ("PA-2", 0.91),
            ("PA-3", 0.91),
            ("PA-4", 0.91),
            ("PA-5", 0.90),
            ("NA-1", 0.11),
            ("NA-2", 0.12),
            ("NA-3", 0.12),
            ("NA-4", 0.12),
            ("NA-5", 0.13),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect();
        let human: Vec<(String, Option<f64>)> = [
            ("PA-1", Some(0.9)),
            ("PA-2", Some(0.8)),
            ("PA-3", Some(0.7)),
            ("PA-4", Some(0.7)),
            ("PA-5", Some(0.8)),
            ("NA-1", Some(0.2)),
            ("NA-2", Some(0.1)),
            ("NA-3", Some(0.2)),
            ("NA-4", Some(0.1)),
            ("NA-5", Some(0.2)),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect();
        let report = evaluation_report(&algorithm, &human).unwrap();
        assert!((report.r - 0.98).abs() <= 0.005, "r = {}", report.r);
        assert_eq!(report.n_used, 10);
        assert_eq!(report.n_dropped, 0);
    }

    #[test]
    fn evaluation_drops_na_rows() {
        let algorithm: Vec<(String, f64)> = [
            ("PC-1", 0.6),
            ("PC-2", 0.58),
            ("PC-3", 0.57),
            ("PC-4", 0.57),
            ("PC-5", 0.57),
            ("NC-1", 0.34),
            ("NC-2", 0.32),
            ("NC-3", 0.32),
            ("NC-4", 0.3),
            ("NC-5", 0.28),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect();
        let human: Vec<(String, Option<f64>)> = [
            ("PC-1", Some(0.15)),
            ("PC-2", Some(0.3)),
            ("PC-3", Some(0.3)),
            ("PC-4", Some(0.2)),
            ("PC-5", Some(0.2)),
            ("NC-1", Some(0.0)),
            ("NC-2", None),
            ("NC-3", None),
            ("NC-4", Some(0.15)),
            ("NC-5", None),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect();
        let report = evaluation_report(&algorithm, &human).unwrap();
        assert!((report.r - 0.66).abs() <= 0.01, "r = {}", report.r);
        assert_eq!(report.n_dropped, 3);
        assert_eq!(report.n_used, 7);
    }

    #[test]
    fn unknown_pair_id_is_named() {
        let algorithm = vec![("PA-1".to_string(), 0.9)];
        let human = vec![("PA-9".to_string(), Some(0.5))];
        match evaluation_report(&algorithm, &human) {
            Err(ReportError::UnknownPairId(id)) => assert_eq!(id, "PA-9"),
            other => panic!("expected UnknownPairId, got {other:?}"),
        }
    }
}

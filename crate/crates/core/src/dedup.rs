//! Cross-source duplicate elimination with date blocking.
//!
//! Each source's result list is split into blocks keyed by publication year.
//! Candidate pairs are only formed between records of *different* sources
//! sharing a key, and a pair is a duplicate iff canonical title and venue
//! match exactly. Exact repeats inside one source are collapsed by hashing
//! before any pairs are formed.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::record::PublicationRecord;
use crate::text::canonicalize;

/// Block key. Dateless records share the `Unknown` block, which sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DateKey {
    Year(i32),
    Unknown,
}

impl DateKey {
    pub fn of(record: &PublicationRecord) -> Self {
        record.date.map_or(DateKey::Unknown, DateKey::Year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub key: DateKey,
    pub records: Vec<PublicationRecord>,
}

pub fn partition_by_date(records: &[PublicationRecord]) -> BTreeMap<DateKey, Block> {
    let mut blocks: BTreeMap<DateKey, Block> = BTreeMap::new();
    for r in records {
        let key = DateKey::of(r);
        blocks
            .entry(key)
            .or_insert_with(|| Block {
                key,
                records: Vec::new(),
            })
            .records
            .push(r.clone());
    }
    blocks
}

/// What two records must share to count as the same publication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchKey {
    pub title: String,
    pub venue: String,
}

impl MatchKey {
    pub fn of(record: &PublicationRecord) -> Self {
        let venue = match &record.venue_norm {
            Some(v) => v.acronym.clone(),
            None => canonicalize(&record.venue_raw),
        };
        MatchKey {
            title: canonicalize(&record.title),
            venue,
        }
    }
}

pub fn is_duplicate(a: &PublicationRecord, b: &PublicationRecord) -> bool {
    MatchKey::of(a) == MatchKey::of(b)
}

/// Results of one source, in configured priority order when passed as a list.
pub type SourceResults = (String, Vec<PublicationRecord>);

#[derive(Debug, Clone, PartialEq)]
pub struct DedupOutcome {
    pub records: Vec<PublicationRecord>,
    /// Pairwise checks made, in total and per block key.
    pub comparisons: usize,
    pub comparisons_by_key: BTreeMap<DateKey, usize>,
    pub removed: usize,
}

pub fn deduplicate(per_source: &[SourceResults]) -> Vec<PublicationRecord> {
    deduplicate_with(per_source, Execution::default()).records
}

#[derive(Debug, Clone)]
struct Candidate {
    priority: usize,
    rank: usize,
    seq: usize,
    key: MatchKey,
}

/// Blocking dedup. The survivor of a duplicate set is the record from the
/// highest-priority source (earliest in `per_source`), then lowest
/// `source_rank`. Output is ordered by (priority, source_rank).
pub fn deduplicate_with(per_source: &[SourceResults], exec: Execution) -> DedupOutcome {
    let total: usize = per_source.iter().map(|(_, rs)| rs.len()).sum();

    // blocks[key][priority] = candidates of that source in rank order
    let mut blocks: BTreeMap<DateKey, Vec<Vec<Candidate>>> = BTreeMap::new();
    for (priority, (_, records)) in per_source.iter().enumerate() {
        let mut order: Vec<usize> = (0..records.len()).collect();
        order.sort_by_key(|&i| (records[i].source_rank, i));
        let mut seen: HashSet<(DateKey, MatchKey)> = HashSet::new();
        for seq in order {
            let record = &records[seq];
            let date = DateKey::of(record);
            let key = MatchKey::of(record);
            if !seen.insert((date, key.clone())) {
                continue;
            }
            let per_priority = blocks.entry(date).or_insert_with(|| vec![Vec::new(); per_source.len()]);
            per_priority[priority].push(Candidate {
                priority,
                rank: record.source_rank,
                seq,
                key,
            });
        }
    }

    let keyed: Vec<(DateKey, Vec<Vec<Candidate>>)> = blocks.into_iter().collect();
    let resolved = exec.map(&keyed, |(date, by_source)| {
        let (survivors, comparisons) = resolve_block(by_source);
        (*date, survivors, comparisons)
    });

    let mut comparisons_by_key = BTreeMap::new();
    let mut kept: Vec<(usize, usize, usize)> = Vec::new();
    for (date, survivors, comparisons) in resolved {
        comparisons_by_key.insert(date, comparisons);
        kept.extend(survivors.iter().map(|c| (c.priority, c.rank, c.seq)));
    }
    kept.sort_unstable();

    let records: Vec<PublicationRecord> = kept
        .into_iter()
        .map(|(priority, _, seq)| per_source[priority].1[seq].clone())
        .collect();
    DedupOutcome {
        removed: total - records.len(),
        comparisons: comparisons_by_key.values().sum(),
        comparisons_by_key,
        records,
    }
}

/// Compare each source's block against the survivors of higher-priority
/// sources only.
fn resolve_block(by_source: &[Vec<Candidate>]) -> (Vec<Candidate>, usize) {
    let mut survivors: Vec<Candidate> = Vec::new();
    let mut comparisons = 0;
    for block in by_source {
        let mut fresh = Vec::new();
        for candidate in block {
            let mut duplicate = false;
            for earlier in &survivors {
                comparisons += 1;
                if earlier.key == candidate.key {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                fresh.push(candidate.clone());
            }
        }
        survivors.extend(fresh);
    }
    (survivors, comparisons)
}

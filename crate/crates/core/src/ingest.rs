//! Parsing, purification and train/test splitting of tag-assignment records.
//!
//! Input format: one record per line, `<user>\t<object>\t<tag1>[,<tag2>...]`.
//! Lines starting with `#` are comments; blank lines are ignored. Labels are
//! case-sensitive opaque UTF-8 strings.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected at least 3 tab-separated fields, found {found}")]
    TooFewFields { line: usize, found: usize },
    #[error("line {line}: empty {what} label")]
    EmptyLabel { line: usize, what: &'static str },
    #[error("line {line}: empty tag list")]
    EmptyTags { line: usize },
    #[error("split ratio {0} out of range (0, 1]")]
    BadRatio(f64),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One record: a user annotating one object with a non-empty tag set.
///
/// Tags keep first-appearance order and contain no duplicates. The
/// (user, object) pair is unique within a [`Dataset`]; duplicate pairs are
/// merged by tag-set union at parse time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub user: String,
    pub object: String,
    pub tags: Vec<String>,
}

impl Assignment {
    pub fn new(
        user: impl Into<String>,
        object: impl Into<String>,
        tags: &[&str],
    ) -> Assignment {
        Assignment {
            user: user.into(),
            object: object.into(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
        }
    }
}

/// A list of assignments plus provenance (source path and applied filters).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    pub assignments: Vec<Assignment>,
    pub source: String,
    pub filter_log: Vec<String>,
}

impl Dataset {
    pub fn new(assignments: Vec<Assignment>) -> Dataset {
        Dataset {
            assignments,
            source: String::new(),
            filter_log: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Result of a seeded train/test division at assignment granularity.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub seed: u64,
    pub ratio: f64,
}

/// Table-1 style summary statistics of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    /// Number of users.
    pub n: usize,
    /// Number of objects.
    pub m: usize,
    /// Number of tags.
    pub r: usize,
    /// Mean objects per user.
    pub mean_objects_per_user: f64,
    /// Mean distinct tags per object.
    pub mean_tags_per_object: f64,
    /// Mean distinct tags per user.
    pub mean_tags_per_user: f64,
}

/// Parse line-oriented records into a dataset.
///
/// Duplicate (user, object) lines are merged by tag union; otherwise line
/// order is preserved. An empty stream yields an empty dataset.
pub fn parse_records(input: &str) -> Result<Dataset, IngestError> {
    let mut assignments: Vec<Assignment> = Vec::new();
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            return Err(IngestError::TooFewFields {
                line: lineno + 1,
                found: fields.len(),
            });
        }
        let user = fields[0];
        let object = fields[1];
        if user.is_empty() {
            return Err(IngestError::EmptyLabel {
                line: lineno + 1,
                what: "user",
            });
        }
        if object.is_empty() {
            return Err(IngestError::EmptyLabel {
                line: lineno + 1,
                what: "object",
            });
        }
        let tags: Vec<&str> = fields[2..]
            .iter()
            .flat_map(|f| f.split(','))
            .filter(|t| !t.is_empty())
            .collect();
        if tags.is_empty() {
            return Err(IngestError::EmptyTags { line: lineno + 1 });
        }
        let key = (user.to_string(), object.to_string());
        match index.get(&key) {
            Some(&i) => {
                let existing = &mut assignments[i];
                for t in tags {
                    if !existing.tags.iter().any(|x| x == t) {
                        existing.tags.push(t.to_string());
                    }
                }
            }
            None => {
                let mut seen = HashSet::new();
                let tags: Vec<String> = tags
                    .into_iter()
                    .filter(|t| seen.insert(t.to_string()))
                    .map(|t| t.to_string())
                    .collect();
                index.insert(key, assignments.len());
                assignments.push(Assignment {
                    user: user.to_string(),
                    object: object.to_string(),
                    tags,
                });
            }
        }
    }
    Ok(Dataset::new(assignments))
}

/// Serialize a dataset back to the line format accepted by [`parse_records`].
pub fn serialize_records(d: &Dataset) -> String {
    let mut out = String::new();
    for a in &d.assignments {
        let _ = writeln!(out, "{}\t{}\t{}", a.user, a.object, a.tags.join(","));
    }
    out
}

/// Remove assignments and tags until the five purification constraints hold
/// simultaneously:
///
/// (a) every user has at least one object;
/// (b) every object is collected by at least two distinct users;
/// (c) every object carries at least two distinct tags;
/// (d) every tag is used by at least two distinct users;
/// (e) every adjacent (user, tag) pair has usage count at least two.
///
/// Deletion and re-checking loop to a fixpoint, so the result does not depend
/// on constraint order. Assignments whose tag set empties out are dropped.
pub fn purify(d: &Dataset) -> Dataset {
    let mut assignments = d.assignments.clone();
    let mut log = d.filter_log.clone();
    loop {
        let before_assign = assignments.len();
        let before_tags: usize = assignments.iter().map(|a| a.tags.len()).sum();

        // (b) object collected by >= 2 distinct users
        let mut object_users: HashMap<&str, HashSet<&str>> = HashMap::new();
        for a in &assignments {
            object_users
                .entry(&a.object)
                .or_default()
                .insert(&a.user);
        }
        let bad_objects: HashSet<String> = object_users
            .iter()
            .filter(|(_, us)| us.len() < 2)
            .map(|(o, _)| o.to_string())
            .collect();

        // (c) object carries >= 2 distinct tags (union over its assignments)
        let mut object_tags: HashMap<&str, HashSet<&str>> = HashMap::new();
        for a in &assignments {
            let e = object_tags.entry(&a.object).or_default();
            for t in &a.tags {
                e.insert(t);
            }
        }
        let bad_objects: HashSet<String> = bad_objects
            .into_iter()
            .chain(
                object_tags
                    .iter()
                    .filter(|(_, ts)| ts.len() < 2)
                    .map(|(o, _)| o.to_string()),
            )
            .collect();

        // (d) tag used by >= 2 distinct users
        let mut tag_users: HashMap<&str, HashSet<&str>> = HashMap::new();
        for a in &assignments {
            for t in &a.tags {
                tag_users.entry(t).or_default().insert(&a.user);
            }
        }
        let bad_tags: HashSet<String> = tag_users
            .iter()
            .filter(|(_, us)| us.len() < 2)
            .map(|(t, _)| t.to_string())
            .collect();

        // (e) (user, tag) usage count >= 2, one use per assignment
        let mut pair_counts: HashMap<(&str, &str), u32> = HashMap::new();
        for a in &assignments {
            for t in &a.tags {
                *pair_counts.entry((&a.user, t)).or_default() += 1;
            }
        }
        let bad_pairs: HashSet<(String, String)> = pair_counts
            .iter()
            .filter(|(_, &c)| c < 2)
            .map(|((u, t), _)| (u.to_string(), t.to_string()))
            .collect();

        assignments.retain(|a| !bad_objects.contains(&a.object));
        for a in &mut assignments {
            let user = a.user.clone();
            a.tags.retain(|t| {
                !bad_tags.contains(t) && !bad_pairs.contains(&(user.clone(), t.clone()))
            });
        }
        assignments.retain(|a| !a.tags.is_empty());

        let after_assign = assignments.len();
        let after_tags: usize = assignments.iter().map(|a| a.tags.len()).sum();
        if after_assign == before_assign && after_tags == before_tags {
            break;
        }
        log.push(format!(
            "purify pass: assignments {} -> {}, tag uses {} -> {}",
            before_assign, after_assign, before_tags, after_tags
        ));
    }
    Dataset {
        assignments,
        source: d.source.clone(),
        filter_log: log,
    }
}

/// Deterministic seeded partition at assignment granularity.
///
/// `|train| = round(ratio * |d|)`; the same (dataset, ratio, seed) always
/// yields the identical split. Original record order is preserved within
/// each half.
pub fn split(d: &Dataset, ratio: f64, seed: u64) -> Result<SplitPair, IngestError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(IngestError::BadRatio(ratio));
    }
    let n = d.assignments.len();
    let n_train = (ratio * n as f64).round() as usize;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut train_idx: Vec<usize> = indices[..n_train].to_vec();
    let mut test_idx: Vec<usize> = indices[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize]| -> Dataset {
        Dataset {
            assignments: idx.iter().map(|&i| d.assignments[i].clone()).collect(),
            source: d.source.clone(),
            filter_log: d.filter_log.clone(),
        }
    };
    Ok(SplitPair {
        train: pick(&train_idx),
        test: pick(&test_idx),
        seed,
        ratio,
    })
}

/// Compute Table-1 style statistics: entity counts and the three mean degrees.
pub fn summarize(d: &Dataset) -> DatasetStats {
    let mut user_objects: HashMap<&str, HashSet<&str>> = HashMap::new();
    let mut object_tags: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    let mut user_tags: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    let mut tags: HashSet<&str> = HashSet::new();
    for a in &d.assignments {
        user_objects.entry(&a.user).or_default().insert(&a.object);
        for t in &a.tags {
            tags.insert(t);
            object_tags.entry(&a.object).or_default().insert(t);
            user_tags.entry(&a.user).or_default().insert(t);
        }
    }
    let n = user_objects.len();
    // every assignment carries >= 1 tag, so object_tags covers all objects
    let m = object_tags.len();
    let mean = |total: usize, count: usize| {
        if count == 0 {
            0.0
        } else {
            total as f64 / count as f64
        }
    };
    DatasetStats {
        n,
        m,
        r: tags.len(),
        mean_objects_per_user: mean(user_objects.values().map(|s| s.len()).sum(), n),
        mean_tags_per_object: mean(object_tags.values().map(|s| s.len()).sum(), m),
        mean_tags_per_user: mean(user_tags.values().map(|s| s.len()).sum(), n),
    }
}

/// Write a split as two record files plus a key=value sidecar with seed,
/// ratio and counts.
pub fn write_split(
    pair: &SplitPair,
    train_path: &std::path::Path,
    test_path: &std::path::Path,
    meta_path: &std::path::Path,
) -> Result<(), IngestError> {
    let io_err = |path: &std::path::Path| {
        let p = path.display().to_string();
        move |source| IngestError::Io { path: p, source }
    };
    std::fs::write(train_path, serialize_records(&pair.train)).map_err(io_err(train_path))?;
    std::fs::write(test_path, serialize_records(&pair.test)).map_err(io_err(test_path))?;
    let meta = format!(
        "seed={}\nratio={}\ntrain_count={}\ntest_count={}\n",
        pair.seed,
        pair.ratio,
        pair.train.len(),
        pair.test.len()
    );
    std::fs::write(meta_path, meta).map_err(io_err(meta_path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(records: &[(&str, &str, &[&str])]) -> Dataset {
        Dataset::new(
            records
                .iter()
                .map(|(u, o, ts)| Assignment::new(*u, *o, ts))
                .collect(),
        )
    }

    #[test]
    fn parse_single_record() {
        let d = parse_records("u1\to1\tt1,t2").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.assignments[0].tags, vec!["t1", "t2"]);
    }

    #[test]
    fn parse_merges_duplicate_pairs() {
        let d = parse_records("u1\to1\tt1\nu1\to1\tt2").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.assignments[0].tags, vec!["t1", "t2"]);
    }

    #[test]
    fn parse_rejects_short_line() {
        let err = parse_records("u1\to1").unwrap_err();
        match err {
            IngestError::TooFewFields { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_empty_tags() {
        assert!(matches!(
            parse_records("u1\to1\t").unwrap_err(),
            IngestError::EmptyTags { line: 1 }
        ));
    }

    #[test]
    fn parse_skips_comments_and_blank_lines() {
        let d = parse_records("# header\n\nu1\to1\tt1\n").unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn parse_empty_stream_is_empty_dataset() {
        assert!(parse_records("").unwrap().is_empty());
    }

    #[test]
    fn purify_cascades_single_user_object() {
        let d = ds(&[("u1", "o1", &["t1", "t2"])]);
        assert!(purify(&d).is_empty());
    }

    #[test]
    fn purify_empty_is_empty() {
        assert!(purify(&Dataset::default()).is_empty());
    }

    /// 4 users, 2 objects, 2 tags; every constraint satisfied with slack, so
    /// purify must be the identity.
    fn satisfying_fixture() -> Dataset {
        ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u1", "o2", &["t1", "t2"]),
            ("u2", "o1", &["t1", "t2"]),
            ("u2", "o2", &["t1", "t2"]),
            ("u3", "o1", &["t1", "t2"]),
            ("u3", "o2", &["t1", "t2"]),
            ("u4", "o1", &["t1", "t2"]),
            ("u4", "o2", &["t1", "t2"]),
        ])
    }

    #[test]
    fn purify_identity_on_satisfying_instance() {
        let d = satisfying_fixture();
        assert_eq!(purify(&d).assignments, d.assignments);
    }

    #[test]
    fn purify_is_idempotent() {
        let d = ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u2", "o1", &["t1", "t2"]),
            ("u1", "o2", &["t1", "t3"]),
            ("u2", "o2", &["t2", "t3"]),
            ("u3", "o3", &["t4"]),
        ]);
        let once = purify(&d);
        let twice = purify(&once);
        assert_eq!(once.assignments, twice.assignments);
    }

    #[test]
    fn split_degenerate_ratio_one() {
        let d = satisfying_fixture();
        let pair = split(&d, 1.0, 7).unwrap();
        assert_eq!(pair.train.assignments, d.assignments);
        assert!(pair.test.is_empty());
    }

    #[test]
    fn split_ninety_ten() {
        let mut records = Vec::new();
        for i in 0..10 {
            records.push(Assignment::new(format!("u{i}"), "o", &["t"]));
        }
        let d = Dataset::new(records);
        let pair = split(&d, 0.9, 1).unwrap();
        assert_eq!(pair.train.len(), 9);
        assert_eq!(pair.test.len(), 1);
    }

    #[test]
    fn split_is_deterministic() {
        let d = satisfying_fixture();
        let a = split(&d, 0.5, 42).unwrap();
        let b = split(&d, 0.5, 42).unwrap();
        assert_eq!(a.train.assignments, b.train.assignments);
        assert_eq!(a.test.assignments, b.test.assignments);
    }

    #[test]
    fn split_rejects_bad_ratio() {
        let d = satisfying_fixture();
        assert!(split(&d, 0.0, 1).is_err());
        assert!(split(&d, 1.5, 1).is_err());
    }

    #[test]
    fn summarize_single_assignment() {
        let s = summarize(&ds(&[("u1", "o1", &["t1", "t2"])]));
        assert_eq!((s.n, s.m, s.r), (1, 1, 2));
        assert_eq!(s.mean_objects_per_user, 1.0);
        assert_eq!(s.mean_tags_per_object, 2.0);
        assert_eq!(s.mean_tags_per_user, 2.0);
    }

    #[test]
    fn summarize_two_users_two_objects() {
        // 2 users each collecting the same 2 objects with disjoint tag pairs.
        let s = summarize(&ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u1", "o2", &["t1", "t2"]),
            ("u2", "o1", &["t3", "t4"]),
            ("u2", "o2", &["t3", "t4"]),
        ]));
        assert_eq!((s.n, s.m, s.r), (2, 2, 4));
        assert_eq!(s.mean_objects_per_user, 2.0);
        assert_eq!(s.mean_tags_per_object, 4.0);
        assert_eq!(s.mean_tags_per_user, 2.0);
    }

    fn purify_constraints_hold(d: &Dataset) -> bool {
        let mut object_users: HashMap<&str, HashSet<&str>> = HashMap::new();
        let mut object_tags: HashMap<&str, HashSet<&str>> = HashMap::new();
        let mut tag_users: HashMap<&str, HashSet<&str>> = HashMap::new();
        let mut pair_counts: HashMap<(&str, &str), u32> = HashMap::new();
        for a in &d.assignments {
            if a.tags.is_empty() {
                return false;
            }
            object_users.entry(&a.object).or_default().insert(&a.user);
            for t in &a.tags {
                object_tags.entry(&a.object).or_default().insert(t);
                tag_users.entry(t).or_default().insert(&a.user);
                *pair_counts.entry((&a.user, t)).or_default() += 1;
            }
        }
        object_users.values().all(|s| s.len() >= 2)
            && object_tags.values().all(|s| s.len() >= 2)
            && tag_users.values().all(|s| s.len() >= 2)
            && pair_counts.values().all(|&c| c >= 2)
    }

    proptest! {
        #[test]
        fn prop_split_partitions(len in 0usize..200, ratio in 0.01f64..1.0, seed in any::<u64>()) {
            let d = Dataset::new(
                (0..len)
                    .map(|i| Assignment::new(format!("u{}", i % 7), format!("o{i}"), &["t"]))
                    .collect(),
            );
            let pair = split(&d, ratio, seed).unwrap();
            prop_assert_eq!(pair.train.len(), (ratio * len as f64).round() as usize);
            prop_assert_eq!(pair.train.len() + pair.test.len(), len);
            let mut merged: Vec<&Assignment> =
                pair.train.assignments.iter().chain(&pair.test.assignments).collect();
            merged.sort_by(|a, b| (&a.user, &a.object).cmp(&(&b.user, &b.object)));
            let mut original: Vec<&Assignment> = d.assignments.iter().collect();
            original.sort_by(|a, b| (&a.user, &a.object).cmp(&(&b.user, &b.object)));
            prop_assert_eq!(merged, original);
        }

        #[test]
        fn prop_parse_serialize_roundtrip(records in proptest::collection::vec(
            (0usize..20, 0usize..20, proptest::collection::btree_set(0usize..15, 1..5)),
            0..40,
        )) {
            let mut d = Dataset::default();
            let mut seen = HashSet::new();
            for (u, o, ts) in records {
                if seen.insert((u, o)) {
                    d.assignments.push(Assignment {
                        user: format!("u{u}"),
                        object: format!("o{o}"),
                        tags: ts.into_iter().map(|t| format!("t{t}")).collect(),
                    });
                }
            }
            let parsed = parse_records(&serialize_records(&d)).unwrap();
            prop_assert_eq!(parsed.assignments, d.assignments);
        }

        #[test]
        fn prop_purify_fixpoint_and_subset(records in proptest::collection::vec(
            (0usize..8, 0usize..8, proptest::collection::btree_set(0usize..6, 1..4)),
            0..60,
        )) {
            let mut d = Dataset::default();
            let mut seen = HashSet::new();
            for (u, o, ts) in records {
                if seen.insert((u, o)) {
                    d.assignments.push(Assignment {
                        user: format!("u{u}"),
                        object: format!("o{o}"),
                        tags: ts.into_iter().map(|t| format!("t{t}")).collect(),
                    });
                }
            }
            let p = purify(&d);
            prop_assert!(purify_constraints_hold(&p));
            prop_assert_eq!(purify(&p).assignments, p.assignments.clone());
            // output is a subset: every purified assignment stems from an input
            // assignment with a superset tag-set
            for a in &p.assignments {
                let orig = d.assignments.iter()
                    .find(|b| b.user == a.user && b.object == a.object)
                    .expect("purify invented an assignment");
                for t in &a.tags {
                    prop_assert!(orig.tags.contains(t));
                }
            }
        }
    }
}

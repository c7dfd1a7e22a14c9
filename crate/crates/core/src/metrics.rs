//! Evaluation quantities: ranking score (overall and degree-conditional),
//! inter/inner list diversity, overlap-ratio curves, tag-usage entropy and
//! degree distributions.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::diffusion::{RecommendationList, ScoreVector};
use crate::graph::{DegreeKind, TripartiteGraph};
use crate::ingest::Dataset;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("test object {object} already collected by user {user} in training")]
    ObjectAlreadyCollected { user: u32, object: u32 },
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u32 },
    #[error("user {user} has no uncollected objects")]
    NoUncollected { user: u32 },
    #[error("{0}")]
    Undefined(&'static str),
}

/// Ranking score for one withheld (user, object) test entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingOutcome {
    pub user: u32,
    pub object: u32,
    /// Object degree k_o in the training graph.
    pub object_training_degree: u32,
    /// Average rank divided by number of uncollected objects, in (0, 1].
    pub rs: f64,
}

/// A metric as a function of an integer abscissa (k_o, L, g or degree k).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricCurve {
    pub x: Vec<u32>,
    pub y: Vec<f64>,
    pub counts: Vec<u64>,
}

impl MetricCurve {
    fn from_groups(groups: BTreeMap<u32, (f64, u64)>) -> MetricCurve {
        let mut c = MetricCurve::default();
        for (x, (sum, count)) in groups {
            c.x.push(x);
            c.y.push(sum / count as f64);
            c.counts.push(count);
        }
        c
    }

    pub fn get(&self, x: u32) -> Option<f64> {
        self.x.iter().position(|&v| v == x).map(|i| self.y[i])
    }
}

/// Probability and complementary cumulative distribution of one degree family.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DegreeDistribution {
    pub k: Vec<u32>,
    pub pdf: Vec<f64>,
    /// P(degree >= k).
    pub ccdf: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Rank of the test object among the target user's uncollected objects,
/// divided by the number of uncollected objects. Tied scores receive the
/// mean of their positions.
pub fn ranking_score(
    g: &TripartiteGraph,
    scores: &ScoreVector,
    test_object: u32,
) -> Result<RankingOutcome, MetricError> {
    let mut outcomes = ranking_scores_for_user(g, scores, &[test_object])?;
    Ok(outcomes.pop().expect("one outcome per test object"))
}

/// Batched variant of [`ranking_score`]: evaluates all withheld objects of
/// one user against a single score vector, building the collected-object
/// mask only once.
pub fn ranking_scores_for_user(
    g: &TripartiteGraph,
    scores: &ScoreVector,
    test_objects: &[u32],
) -> Result<Vec<RankingOutcome>, MetricError> {
    let user = scores.target_user;
    if user as usize >= g.n() {
        return Err(MetricError::UnknownId {
            kind: "user",
            id: user,
        });
    }
    let mut collected = vec![false; g.m()];
    for &o in g.user_objects(user) {
        collected[o as usize] = true;
    }
    let uncollected = (g.m() - g.user_objects(user).len()) as u64;
    for &to in test_objects {
        if to as usize >= g.m() {
            return Err(MetricError::UnknownId {
                kind: "object",
                id: to,
            });
        }
        if collected[to as usize] {
            return Err(MetricError::ObjectAlreadyCollected { user, object: to });
        }
    }
    if uncollected == 0 {
        return Err(MetricError::NoUncollected { user });
    }
    Ok(test_objects
        .iter()
        .map(|&to| {
            let target_score = scores.scores[to as usize];
            let mut higher = 0u64;
            let mut tied = 0u64; // includes the test object itself
            for (o, &s) in scores.scores.iter().enumerate() {
                if collected[o] {
                    continue;
                }
                if s > target_score {
                    higher += 1;
                } else if s == target_score {
                    tied += 1;
                }
            }
            let rank = higher as f64 + (tied as f64 + 1.0) / 2.0;
            RankingOutcome {
                user,
                object: to,
                object_training_degree: g.object_users(to).len() as u32,
                rs: rank / uncollected as f64,
            }
        })
        .collect())
}

pub fn mean_rs(outcomes: &[RankingOutcome]) -> Result<f64, MetricError> {
    if outcomes.is_empty() {
        return Err(MetricError::Undefined("mean over zero ranking outcomes"));
    }
    Ok(outcomes.iter().map(|o| o.rs).sum::<f64>() / outcomes.len() as f64)
}

/// Mean ranking score grouped by training object degree k_o.
pub fn rs_by_object_degree(outcomes: &[RankingOutcome]) -> MetricCurve {
    let mut groups: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for o in outcomes {
        let e = groups.entry(o.object_training_degree).or_default();
        e.0 += o.rs;
        e.1 += 1;
    }
    MetricCurve::from_groups(groups)
}

/// The two-bucket partition (mean rs for k_o <= threshold, mean rs for
/// k_o > threshold). Either side is None when its bucket is empty.
pub fn rs_degree_buckets(
    outcomes: &[RankingOutcome],
    threshold: u32,
) -> (Option<f64>, Option<f64>) {
    let mut low = (0.0, 0u64);
    let mut high = (0.0, 0u64);
    for o in outcomes {
        let b = if o.object_training_degree <= threshold {
            &mut low
        } else {
            &mut high
        };
        b.0 += o.rs;
        b.1 += 1;
    }
    let avg = |(sum, count): (f64, u64)| {
        if count == 0 {
            None
        } else {
            Some(sum / count as f64)
        }
    };
    (avg(low), avg(high))
}

/// Mean pairwise dissimilarity of users' length-L recommendation lists.
/// Lists shorter than L are excluded; the number excluded is returned.
pub fn inter_diversity(
    lists: &[RecommendationList],
    len: usize,
) -> Result<(f64, usize), MetricError> {
    let eligible: Vec<Vec<u32>> = lists
        .iter()
        .filter(|l| l.objects.len() >= len)
        .map(|l| {
            let mut v = l.objects[..len].to_vec();
            v.sort_unstable();
            v
        })
        .collect();
    let excluded = lists.len() - eligible.len();
    let n = eligible.len();
    if n < 2 {
        return Err(MetricError::Undefined(
            "inter diversity needs at least two full-length lists",
        ));
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let common = sorted_intersection_len(&eligible[i], &eligible[j]);
            total += 1.0 - common as f64 / len as f64;
        }
    }
    Ok((total / (n * (n - 1) / 2) as f64, excluded))
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// One minus the mean pairwise cosine similarity of objects inside each
/// user's list, where object neighborhoods are the training collector sets.
pub fn inner_diversity(
    lists: &[RecommendationList],
    g: &TripartiteGraph,
    len: usize,
) -> Result<(f64, usize), MetricError> {
    if len < 2 {
        return Err(MetricError::Undefined("inner diversity needs L >= 2"));
    }
    let eligible: Vec<&RecommendationList> =
        lists.iter().filter(|l| l.objects.len() >= len).collect();
    let excluded = lists.len() - eligible.len();
    if eligible.is_empty() {
        return Err(MetricError::Undefined(
            "inner diversity needs at least one full-length list",
        ));
    }
    let mut total = 0.0;
    for list in &eligible {
        let objs = &list.objects[..len];
        for i in 0..len {
            for j in (i + 1)..len {
                let gi = g.object_users(objs[i]);
                let gj = g.object_users(objs[j]);
                let common = sorted_intersection_len(gi, gj);
                total += common as f64 / ((gi.len() * gj.len()) as f64).sqrt();
            }
        }
    }
    let pairs = (eligible.len() * len * (len - 1) / 2) as f64;
    Ok((1.0 - total / pairs, excluded))
}

fn user_object_tag_maps(
    d: &Dataset,
) -> Vec<(String, HashMap<&str, HashSet<&str>>)> {
    let mut order: Vec<String> = Vec::new();
    let mut maps: HashMap<&str, HashMap<&str, HashSet<&str>>> = HashMap::new();
    for a in &d.assignments {
        if !maps.contains_key(a.user.as_str()) {
            order.push(a.user.clone());
        }
        let objects = maps.entry(&a.user).or_default();
        let tags = objects.entry(&a.object).or_default();
        for t in &a.tags {
            tags.insert(t);
        }
    }
    order
        .into_iter()
        .map(|u| {
            let m = maps.remove(u.as_str()).unwrap_or_default();
            (u, m)
        })
        .collect()
}

/// Tag-agreement overlap curve: user pairs are grouped by their number of
/// common objects g; the value is the mean count of (common object, shared
/// tag on that object) agreements.
pub fn overlap_ratio_tags(d: &Dataset) -> MetricCurve {
    let users = user_object_tag_maps(d);
    let mut groups: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for i in 0..users.len() {
        for j in (i + 1)..users.len() {
            let (a, b) = (&users[i].1, &users[j].1);
            let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
            let mut common_objects = 0u32;
            let mut agreements = 0u64;
            for (o, tags_a) in small {
                if let Some(tags_b) = large.get(o) {
                    common_objects += 1;
                    agreements += tags_a.intersection(tags_b).count() as u64;
                }
            }
            if common_objects >= 1 {
                let e = groups.entry(common_objects).or_default();
                e.0 += agreements as f64;
                e.1 += 1;
            }
        }
    }
    MetricCurve::from_groups(groups)
}

/// Dual overlap curve: user pairs are grouped by their number of common tags
/// (over their whole vocabularies); the value is the mean count of common
/// objects.
pub fn overlap_ratio_objects(d: &Dataset) -> MetricCurve {
    let users = user_object_tag_maps(d);
    let profiles: Vec<(HashSet<&str>, HashSet<&str>)> = users
        .iter()
        .map(|(_, objects)| {
            let objs: HashSet<&str> = objects.keys().copied().collect();
            let tags: HashSet<&str> = objects
                .values()
                .flat_map(|ts| ts.iter().copied())
                .collect();
            (objs, tags)
        })
        .collect();
    let mut groups: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for i in 0..profiles.len() {
        for j in (i + 1)..profiles.len() {
            let common_tags = profiles[i].1.intersection(&profiles[j].1).count() as u32;
            if common_tags == 0 {
                continue;
            }
            let common_objects = profiles[i].0.intersection(&profiles[j].0).count() as u64;
            let e = groups.entry(common_tags).or_default();
            e.0 += common_objects as f64;
            e.1 += 1;
        }
    }
    MetricCurve::from_groups(groups)
}

fn shannon_entropy(counts: impl Iterator<Item = f64>) -> f64 {
    let counts: Vec<f64> = counts.collect();
    let total: f64 = counts.iter().sum();
    let mut e = 0.0;
    for c in counts {
        if c > 0.0 {
            let p = c / total;
            e -= p * p.ln();
        }
    }
    e
}

/// Shannon entropy (natural log) of a user's tag-usage frequencies.
pub fn user_entropy(g: &TripartiteGraph, user: u32) -> Result<f64, MetricError> {
    if user as usize >= g.n() {
        return Err(MetricError::UnknownId {
            kind: "user",
            id: user,
        });
    }
    let weights = g.user_tag_weights(user);
    if weights.is_empty() {
        return Err(MetricError::Undefined("user has no tags"));
    }
    Ok(shannon_entropy(weights.iter().map(|&(_, c)| c as f64)))
}

/// Shannon entropy of the per-object tag distribution, where a tag's count
/// is the number of adjacent users who assigned it.
pub fn object_entropy(g: &TripartiteGraph, object: u32) -> Result<f64, MetricError> {
    if object as usize >= g.m() {
        return Err(MetricError::UnknownId {
            kind: "object",
            id: object,
        });
    }
    let weights = g.object_tag_weights(object);
    if weights.is_empty() {
        return Err(MetricError::Undefined("object has no tags"));
    }
    Ok(shannon_entropy(weights.iter().map(|&(_, c)| c as f64)))
}

/// Which entity family an entropy curve is grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyKind {
    User,
    Object,
}

/// Mean entropy grouped by degree: users by k(U), objects by k(O).
pub fn entropy_by_degree(g: &TripartiteGraph, kind: EntropyKind) -> MetricCurve {
    let mut groups: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    match kind {
        EntropyKind::User => {
            for u in 0..g.n() as u32 {
                if let Ok(e) = user_entropy(g, u) {
                    let entry = groups
                        .entry(g.user_objects(u).len() as u32)
                        .or_default();
                    entry.0 += e;
                    entry.1 += 1;
                }
            }
        }
        EntropyKind::Object => {
            for o in 0..g.m() as u32 {
                if let Ok(e) = object_entropy(g, o) {
                    let entry = groups
                        .entry(g.object_users(o).len() as u32)
                        .or_default();
                    entry.0 += e;
                    entry.1 += 1;
                }
            }
        }
    }
    MetricCurve::from_groups(groups)
}

/// Probability and complementary cumulative distribution of one degree
/// family.
pub fn degree_distribution(g: &TripartiteGraph, kind: DegreeKind) -> DegreeDistribution {
    let count = match kind {
        DegreeKind::UserObjects => g.n(),
        DegreeKind::ObjectUsers | DegreeKind::ObjectTags => g.m(),
        DegreeKind::TagObjects => g.r(),
    };
    let mut groups: BTreeMap<u32, u64> = BTreeMap::new();
    for id in 0..count as u32 {
        let k = g.degree(kind, id).expect("id in range") as u32;
        *groups.entry(k).or_default() += 1;
    }
    let total = count as f64;
    let mut dist = DegreeDistribution::default();
    for (&k, &c) in &groups {
        dist.k.push(k);
        dist.pdf.push(c as f64 / total);
        dist.counts.push(c);
    }
    let mut tail = 1.0;
    for i in 0..dist.k.len() {
        dist.ccdf.push(tail);
        tail -= dist.pdf[i];
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::Algorithm;
    use crate::graph::build_graph;
    use crate::ingest::{Assignment, Dataset};

    fn ds(records: &[(&str, &str, &[&str])]) -> Dataset {
        Dataset::new(
            records
                .iter()
                .map(|(u, o, ts)| Assignment::new(*u, *o, ts))
                .collect(),
        )
    }

    fn score_vec(user: u32, scores: Vec<f64>) -> ScoreVector {
        ScoreVector {
            target_user: user,
            algorithm: Algorithm::UserObject,
            scores,
            zero_tag_objects: 0,
        }
    }

    /// u1 collects o0; o1..o4 are the four uncollected candidates.
    fn five_object_graph() -> TripartiteGraph {
        build_graph(&ds(&[
            ("u1", "o0", &["t1"]),
            ("u2", "o1", &["t1"]),
            ("u2", "o2", &["t1"]),
            ("u2", "o3", &["t1"]),
            ("u2", "o4", &["t1"]),
        ]))
        .unwrap()
    }

    #[test]
    fn rs_top_ranked_of_four() {
        let g = five_object_graph();
        let f = score_vec(0, vec![0.0, 9.0, 1.0, 2.0, 3.0]);
        let out = ranking_score(&g, &f, 1).unwrap();
        assert_eq!(out.rs, 0.25);
        assert_eq!(out.object_training_degree, 1);
    }

    #[test]
    fn rs_all_tied_of_four() {
        let g = five_object_graph();
        let f = score_vec(0, vec![0.0, 1.0, 1.0, 1.0, 1.0]);
        let out = ranking_score(&g, &f, 2).unwrap();
        // rank = mean of positions 1..4 = 2.5; rs = 2.5 / 4
        assert_eq!(out.rs, 0.625);
    }

    #[test]
    fn rs_single_uncollected() {
        let g = build_graph(&ds(&[
            ("u1", "o0", &["t1"]),
            ("u2", "o1", &["t1"]),
        ]))
        .unwrap();
        let f = score_vec(0, vec![0.0, 0.3]);
        assert_eq!(ranking_score(&g, &f, 1).unwrap().rs, 1.0);
    }

    #[test]
    fn rs_rejects_collected_object() {
        let g = five_object_graph();
        let f = score_vec(0, vec![0.0; 5]);
        assert!(matches!(
            ranking_score(&g, &f, 0),
            Err(MetricError::ObjectAlreadyCollected { .. })
        ));
    }

    #[test]
    fn mean_rs_basics() {
        let mk = |rs| RankingOutcome {
            user: 0,
            object: 0,
            object_training_degree: 1,
            rs,
        };
        assert_eq!(mean_rs(&[mk(0.2), mk(0.4)]).unwrap(), 0.30000000000000004);
        assert!(mean_rs(&[]).is_err());
    }

    #[test]
    fn rs_by_degree_groups_and_buckets() {
        let mk = |k, rs| RankingOutcome {
            user: 0,
            object: 0,
            object_training_degree: k,
            rs,
        };
        let outcomes = [mk(1, 0.4), mk(1, 0.6), mk(12, 0.1)];
        let curve = rs_by_object_degree(&outcomes);
        assert_eq!(curve.x, vec![1, 12]);
        assert_eq!(curve.y, vec![0.5, 0.1]);
        assert_eq!(curve.counts, vec![2, 1]);
        let (low, high) = rs_degree_buckets(&outcomes, 10);
        assert_eq!(low.unwrap(), 0.5);
        assert_eq!(high.unwrap(), 0.1);
    }

    fn list(user: u32, objects: Vec<u32>) -> RecommendationList {
        let requested_len = objects.len();
        RecommendationList {
            target_user: user,
            objects,
            requested_len,
        }
    }

    #[test]
    fn interd_identical_lists_is_zero() {
        let (v, _) = inter_diversity(&[list(0, vec![1, 2]), list(1, vec![1, 2])], 2).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn interd_disjoint_lists_is_one() {
        let (v, _) = inter_diversity(&[list(0, vec![1, 2]), list(1, vec![3, 4])], 2).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn interd_half_overlap() {
        // {a,b} vs {b,c} at L=2
        let (v, _) = inter_diversity(&[list(0, vec![1, 2]), list(1, vec![2, 3])], 2).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn interd_excludes_short_lists() {
        let lists = [list(0, vec![1, 2]), list(1, vec![2, 3]), list(2, vec![4])];
        let (v, excluded) = inter_diversity(&lists, 2).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(excluded, 1);
        assert!(inter_diversity(&lists[2..], 2).is_err());
    }

    #[test]
    fn innerd_disjoint_neighborhoods_is_one() {
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u2", "o2", &["t1"]),
            ("u3", "o3", &["t1"]),
        ]))
        .unwrap();
        let lists = [list(0, vec![1, 2])];
        let (v, _) = inner_diversity(&lists, &g, 2).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn innerd_identical_neighborhoods_is_zero() {
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u2", "o1", &["t1"]),
            ("u2", "o2", &["t1"]),
        ]))
        .unwrap();
        let lists = [list(0, vec![0, 1]), list(1, vec![0, 1])];
        let (v, _) = inner_diversity(&lists, &g, 2).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn innerd_hand_fixture() {
        // list (O1,O2,O3) with collector sets {U1,U2}, {U1}, {U3}:
        // S12 = 1/sqrt(2), S13 = 0, S23 = 0; mean over the three pairs is
        // 1/(3 sqrt(2)), so InnerD = 1 - sqrt(2)/6.
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u2", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u3", "o3", &["t1"]),
        ]))
        .unwrap();
        let o = |l: &str| g.object_id(l).unwrap();
        let lists = [list(0, vec![o("o1"), o("o2"), o("o3")])];
        let (v, _) = inner_diversity(&lists, &g, 3).unwrap();
        let expected = 1.0 - 2.0f64.sqrt() / 6.0;
        assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
    }

    #[test]
    fn innerd_requires_len_two() {
        let g = five_object_graph();
        assert!(inner_diversity(&[list(0, vec![1])], &g, 1).is_err());
    }

    #[test]
    fn or_tags_single_shared_object() {
        // two users share one object, tag-sets {t1,t2} and {t2,t3}
        let d = ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u2", "o1", &["t2", "t3"]),
        ]);
        let c = overlap_ratio_tags(&d);
        assert_eq!(c.x, vec![1]);
        assert_eq!(c.y, vec![1.0]);
    }

    #[test]
    fn or_tags_no_common_objects_excluded() {
        let d = ds(&[("u1", "o1", &["t1"]), ("u2", "o2", &["t1"])]);
        assert!(overlap_ratio_tags(&d).x.is_empty());
    }

    #[test]
    fn or_tags_identical_users_two_objects() {
        // 2 common objects, 2 shared tags on each -> (g=2, OR=4)
        let d = ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u1", "o2", &["t1", "t2"]),
            ("u2", "o1", &["t1", "t2"]),
            ("u2", "o2", &["t1", "t2"]),
        ]);
        let c = overlap_ratio_tags(&d);
        assert_eq!(c.x, vec![2]);
        assert_eq!(c.y, vec![4.0]);
    }

    #[test]
    fn or_objects_variants() {
        // users sharing 1 tag and 1 object -> (g=1, OR=1)
        let d = ds(&[("u1", "o1", &["t1"]), ("u2", "o1", &["t1"])]);
        let c = overlap_ratio_objects(&d);
        assert_eq!((c.x.clone(), c.y.clone()), (vec![1], vec![1.0]));
        // users sharing 2 tags, 0 common objects -> (g=2, OR=0)
        let d = ds(&[
            ("u1", "o1", &["t1", "t2"]),
            ("u2", "o2", &["t1", "t2"]),
        ]);
        let c = overlap_ratio_objects(&d);
        assert_eq!((c.x.clone(), c.y.clone()), (vec![2], vec![0.0]));
        // disjoint vocabularies -> excluded
        let d = ds(&[("u1", "o1", &["t1"]), ("u2", "o2", &["t2"])]);
        assert!(overlap_ratio_objects(&d).x.is_empty());
    }

    #[test]
    fn entropy_values() {
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u2", "o1", &["t2"]),
            ("u2", "o2", &["t3"]),
        ]))
        .unwrap();
        // u1: single tag -> 0
        assert_eq!(user_entropy(&g, 0).unwrap(), 0.0);
        // u2: two tags used once each -> ln 2
        assert!((user_entropy(&g, 1).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_counts_three_one() {
        // counts (3,1): E = -(3/4)ln(3/4) - (1/4)ln(1/4)
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u1", "o3", &["t1", "t2"]),
        ]))
        .unwrap();
        let expected = -(0.75f64.ln() * 0.75 + 0.25f64.ln() * 0.25);
        assert!((user_entropy(&g, 0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn entropy_by_degree_means() {
        // two users at k=2: one single-tag (E=0), one two-tag (E=ln2)
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u2", "o1", &["t2"]),
            ("u2", "o2", &["t3"]),
        ]))
        .unwrap();
        let c = entropy_by_degree(&g, EntropyKind::User);
        assert_eq!(c.x, vec![2]);
        assert!((c.y[0] - 2f64.ln() / 2.0).abs() < 1e-12);
        assert_eq!(c.counts, vec![2]);
    }

    #[test]
    fn degree_distribution_hand_count() {
        // object-user degrees {1,1,2}
        let g = build_graph(&ds(&[
            ("u1", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u2", "o2", &["t1"]),
            ("u2", "o3", &["t1"]),
        ]))
        .unwrap();
        let d = degree_distribution(&g, DegreeKind::ObjectUsers);
        assert_eq!(d.k, vec![1, 2]);
        assert!((d.pdf[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.pdf[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.ccdf[0], 1.0);
        assert!((d.ccdf[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((d.pdf.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degree_distribution_all_equal() {
        let d = ds(&[
            ("u1", "o1", &["t1"]),
            ("u2", "o1", &["t1"]),
            ("u1", "o2", &["t1"]),
            ("u2", "o2", &["t1"]),
        ]);
        let g = build_graph(&d).unwrap();
        let dist = degree_distribution(&g, DegreeKind::ObjectUsers);
        assert_eq!(dist.k, vec![2]);
        assert_eq!(dist.pdf, vec![1.0]);
    }
}

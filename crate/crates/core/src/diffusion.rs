//! The three diffusion score kernels and top-L list assembly.
//!
//! All kernels are pure functions of (graph, target user). Mass is spread
//! in fixed ascending-neighbor-id order so results are bit-reproducible.

use thiserror::Error;

use crate::graph::TripartiteGraph;

#[derive(Debug, Error)]
pub enum DiffusionError {
    #[error("unknown user id {0}")]
    UnknownUser(u32),
    #[error("user {0} has no tags in the training graph")]
    EmptyTagProfile(u32),
}

/// Which diffusion route produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Two-step user-object diffusion (objects -> users -> objects).
    UserObject,
    /// Two-step user-object-tag diffusion (objects -> tags -> objects).
    UserObjectTag,
    /// One-step user-tag-object diffusion (weighted tags -> objects).
    UserTagObject,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::UserObject,
        Algorithm::UserObjectTag,
        Algorithm::UserTagObject,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Algorithm::UserObject => "uo",
            Algorithm::UserObjectTag => "uot",
            Algorithm::UserTagObject => "uto",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s.to_ascii_lowercase().as_str() {
            "uo" | "i" | "1" => Some(Algorithm::UserObject),
            "uot" | "ii" | "2" => Some(Algorithm::UserObjectTag),
            "uto" | "iii" | "3" => Some(Algorithm::UserTagObject),
            _ => None,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Per-object diffusion result for one target user.
#[derive(Debug, Clone)]
pub struct ScoreVector {
    pub target_user: u32,
    pub algorithm: Algorithm,
    pub scores: Vec<f64>,
    /// Objects of the target user skipped because they carry no tags in the
    /// training graph (user-object-tag route only).
    pub zero_tag_objects: u32,
}

/// Top-L uncollected objects in descending score order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationList {
    pub target_user: u32,
    pub objects: Vec<u32>,
    pub requested_len: usize,
}

fn check_user(g: &TripartiteGraph, user: u32) -> Result<(), DiffusionError> {
    if (user as usize) < g.n() {
        Ok(())
    } else {
        Err(DiffusionError::UnknownUser(user))
    }
}

/// User-object diffusion: each collected object sends 1/k(O) to its users,
/// each user then sends the accumulated mass /k(U) back to its objects.
pub fn diffuse_uo(g: &TripartiteGraph, user: u32) -> Result<ScoreVector, DiffusionError> {
    check_user(g, user)?;
    let mut user_mass = vec![0.0f64; g.n()];
    for &o in g.user_objects(user) {
        let users = g.object_users(o);
        let share = 1.0 / users.len() as f64;
        for &l in users {
            user_mass[l as usize] += share;
        }
    }
    let mut scores = vec![0.0f64; g.m()];
    for (l, &mass) in user_mass.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let objects = g.user_objects(l as u32);
        let share = mass / objects.len() as f64;
        for &j in objects {
            scores[j as usize] += share;
        }
    }
    Ok(ScoreVector {
        target_user: user,
        algorithm: Algorithm::UserObject,
        scores,
        zero_tag_objects: 0,
    })
}

/// User-object-tag diffusion: each collected object sends 1/k'(O) to its
/// tags, each tag then sends the accumulated mass /k'(T) to its objects.
/// Collected objects without tags are skipped and counted.
pub fn diffuse_uot(g: &TripartiteGraph, user: u32) -> Result<ScoreVector, DiffusionError> {
    check_user(g, user)?;
    let mut tag_mass = vec![0.0f64; g.r()];
    let mut zero_tag_objects = 0u32;
    for &o in g.user_objects(user) {
        let tags = g.object_tags(o);
        if tags.is_empty() {
            zero_tag_objects += 1;
            continue;
        }
        let share = 1.0 / tags.len() as f64;
        for &t in tags {
            tag_mass[t as usize] += share;
        }
    }
    let mut scores = vec![0.0f64; g.m()];
    for (t, &mass) in tag_mass.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let objects = g.tag_objects(t as u32);
        let share = mass / objects.len() as f64;
        for &j in objects {
            scores[j as usize] += share;
        }
    }
    Ok(ScoreVector {
        target_user: user,
        algorithm: Algorithm::UserObjectTag,
        scores,
        zero_tag_objects,
    })
}

/// User-tag-object diffusion: tag l starts with the user's use count a''_il
/// and spreads it equally over its k'(T_l) objects. One step.
pub fn diffuse_uto(g: &TripartiteGraph, user: u32) -> Result<ScoreVector, DiffusionError> {
    check_user(g, user)?;
    let weights = g.user_tag_weights(user);
    if weights.is_empty() {
        return Err(DiffusionError::EmptyTagProfile(user));
    }
    let mut scores = vec![0.0f64; g.m()];
    for &(t, count) in weights {
        let objects = g.tag_objects(t);
        let share = count as f64 / objects.len() as f64;
        for &j in objects {
            scores[j as usize] += share;
        }
    }
    Ok(ScoreVector {
        target_user: user,
        algorithm: Algorithm::UserTagObject,
        scores,
        zero_tag_objects: 0,
    })
}

pub fn diffuse(
    g: &TripartiteGraph,
    algorithm: Algorithm,
    user: u32,
) -> Result<ScoreVector, DiffusionError> {
    match algorithm {
        Algorithm::UserObject => diffuse_uo(g, user),
        Algorithm::UserObjectTag => diffuse_uot(g, user),
        Algorithm::UserTagObject => diffuse_uto(g, user),
    }
}

/// Rank the target user's uncollected objects by score descending, ties by
/// ascending object id, truncated to L.
pub fn recommend(g: &TripartiteGraph, scores: &ScoreVector, len: usize) -> RecommendationList {
    let mut collected = vec![false; g.m()];
    for &o in g.user_objects(scores.target_user) {
        collected[o as usize] = true;
    }
    let mut candidates: Vec<u32> = (0..g.m() as u32)
        .filter(|&o| !collected[o as usize])
        .collect();
    let order = |&a: &u32, &b: &u32| {
        scores.scores[b as usize]
            .partial_cmp(&scores.scores[a as usize])
            .unwrap()
            .then(a.cmp(&b))
    };
    // the comparator is a total order (ids break score ties), so selecting
    // the top-len prefix and sorting it equals a full sort then truncate
    if len < candidates.len() {
        candidates.select_nth_unstable_by(len, order);
        candidates.truncate(len);
    }
    candidates.sort_unstable_by(order);
    RecommendationList {
        target_user: scores.target_user,
        objects: candidates,
        requested_len: len,
    }
}

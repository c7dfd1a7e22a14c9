//! Immutable sparse tripartite graph over users, objects and tags.
//!
//! Stores the user-object adjacency, the object-tag adjacency and the
//! weighted user-tag matrix as sorted id lists, together with the label
//! to dense-id bijections. Ids are assigned in first-appearance order over
//! the dataset, so downstream tie-breaking is deterministic.

use std::collections::HashMap;

use thiserror::Error;

use crate::ingest::Dataset;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot build a graph from an empty dataset")]
    EmptyDataset,
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u32 },
    #[error("unknown {kind} label '{label}'")]
    UnknownLabel { kind: &'static str, label: String },
    #[error("malformed graph text at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// The four degree families of the tripartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    /// k(U): objects collected by a user.
    UserObjects,
    /// k(O): users collecting an object.
    ObjectUsers,
    /// k'(O): distinct tags on an object.
    ObjectTags,
    /// k'(T): objects carrying a tag.
    TagObjects,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripartiteGraph {
    user_labels: Vec<String>,
    object_labels: Vec<String>,
    tag_labels: Vec<String>,
    user_ids: HashMap<String, u32>,
    object_ids: HashMap<String, u32>,
    tag_ids: HashMap<String, u32>,
    /// Rows of A: per-user sorted object ids.
    user_objects: Vec<Vec<u32>>,
    /// Columns of A: per-object sorted user ids.
    object_users: Vec<Vec<u32>>,
    /// Rows of A': per-object sorted tag ids.
    object_tags: Vec<Vec<u32>>,
    /// Columns of A': per-tag sorted object ids.
    tag_objects: Vec<Vec<u32>>,
    /// Rows of A'': per-user sorted (tag id, use count) pairs, counts >= 1.
    user_tag_weights: Vec<Vec<(u32, u32)>>,
    /// Per-object sorted (tag id, number of adjacent users assigning it).
    object_tag_weights: Vec<Vec<(u32, u32)>>,
}

/// Build the three adjacency structures from a dataset.
///
/// `a_ij = 1` iff user i collected object j; `a'_jk = 1` iff some assignment
/// annotates object j with tag k; `a''_ik` counts the assignments of user i
/// whose tag set contains tag k.
pub fn build_graph(d: &Dataset) -> Result<TripartiteGraph, GraphError> {
    if d.is_empty() {
        return Err(GraphError::EmptyDataset);
    }
    let mut g = TripartiteGraph {
        user_labels: Vec::new(),
        object_labels: Vec::new(),
        tag_labels: Vec::new(),
        user_ids: HashMap::new(),
        object_ids: HashMap::new(),
        tag_ids: HashMap::new(),
        user_objects: Vec::new(),
        object_users: Vec::new(),
        object_tags: Vec::new(),
        tag_objects: Vec::new(),
        user_tag_weights: Vec::new(),
        object_tag_weights: Vec::new(),
    };
    fn intern(
        label: &str,
        ids: &mut HashMap<String, u32>,
        labels: &mut Vec<String>,
    ) -> u32 {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len() as u32;
        labels.push(label.to_string());
        ids.insert(label.to_string(), id);
        id
    }
    let mut uo_edges: Vec<(u32, u32)> = Vec::new();
    let mut ot_pairs: HashMap<(u32, u32), u32> = HashMap::new();
    let mut ut_counts: HashMap<(u32, u32), u32> = HashMap::new();
    for a in &d.assignments {
        let u = intern(&a.user, &mut g.user_ids, &mut g.user_labels);
        let o = intern(&a.object, &mut g.object_ids, &mut g.object_labels);
        uo_edges.push((u, o));
        for t in &a.tags {
            let t = intern(t, &mut g.tag_ids, &mut g.tag_labels);
            *ot_pairs.entry((o, t)).or_default() += 1;
            *ut_counts.entry((u, t)).or_default() += 1;
        }
    }
    let n = g.user_labels.len();
    let m = g.object_labels.len();
    let r = g.tag_labels.len();
    g.user_objects = vec![Vec::new(); n];
    g.object_users = vec![Vec::new(); m];
    g.object_tags = vec![Vec::new(); m];
    g.tag_objects = vec![Vec::new(); r];
    g.user_tag_weights = vec![Vec::new(); n];
    g.object_tag_weights = vec![Vec::new(); m];
    for (u, o) in uo_edges {
        g.user_objects[u as usize].push(o);
        g.object_users[o as usize].push(u);
    }
    for (&(o, t), &users) in &ot_pairs {
        g.object_tags[o as usize].push(t);
        g.tag_objects[t as usize].push(o);
        g.object_tag_weights[o as usize].push((t, users));
    }
    for (&(u, t), &c) in &ut_counts {
        g.user_tag_weights[u as usize].push((t, c));
    }
    for list in g.user_objects.iter_mut().chain(&mut g.object_users) {
        list.sort_unstable();
        list.dedup();
    }
    for list in g.object_tags.iter_mut().chain(&mut g.tag_objects) {
        list.sort_unstable();
    }
    for list in g
        .user_tag_weights
        .iter_mut()
        .chain(&mut g.object_tag_weights)
    {
        list.sort_unstable();
    }
    Ok(g)
}

impl TripartiteGraph {
    pub fn n(&self) -> usize {
        self.user_labels.len()
    }

    pub fn m(&self) -> usize {
        self.object_labels.len()
    }

    pub fn r(&self) -> usize {
        self.tag_labels.len()
    }

    pub fn degree(&self, kind: DegreeKind, id: u32) -> Result<usize, GraphError> {
        let (len, name) = match kind {
            DegreeKind::UserObjects => (self.user_objects.get(id as usize).map(Vec::len), "user"),
            DegreeKind::ObjectUsers => (self.object_users.get(id as usize).map(Vec::len), "object"),
            DegreeKind::ObjectTags => (self.object_tags.get(id as usize).map(Vec::len), "object"),
            DegreeKind::TagObjects => (self.tag_objects.get(id as usize).map(Vec::len), "tag"),
        };
        len.ok_or(GraphError::UnknownId { kind: name, id })
    }

    pub fn user_objects(&self, user: u32) -> &[u32] {
        &self.user_objects[user as usize]
    }

    pub fn object_users(&self, object: u32) -> &[u32] {
        &self.object_users[object as usize]
    }

    pub fn object_tags(&self, object: u32) -> &[u32] {
        &self.object_tags[object as usize]
    }

    pub fn tag_objects(&self, tag: u32) -> &[u32] {
        &self.tag_objects[tag as usize]
    }

    pub fn user_tag_weights(&self, user: u32) -> &[(u32, u32)] {
        &self.user_tag_weights[user as usize]
    }

    pub fn object_tag_weights(&self, object: u32) -> &[(u32, u32)] {
        &self.object_tag_weights[object as usize]
    }

    pub fn user_id(&self, label: &str) -> Result<u32, GraphError> {
        self.user_ids
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownLabel {
                kind: "user",
                label: label.to_string(),
            })
    }

    pub fn object_id(&self, label: &str) -> Result<u32, GraphError> {
        self.object_ids
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownLabel {
                kind: "object",
                label: label.to_string(),
            })
    }

    pub fn tag_id(&self, label: &str) -> Result<u32, GraphError> {
        self.tag_ids
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownLabel {
                kind: "tag",
                label: label.to_string(),
            })
    }

    pub fn user_label(&self, id: u32) -> &str {
        &self.user_labels[id as usize]
    }

    pub fn object_label(&self, id: u32) -> &str {
        &self.object_labels[id as usize]
    }

    pub fn tag_label(&self, id: u32) -> &str {
        &self.tag_labels[id as usize]
    }

    pub fn has_collected(&self, user: u32, object: u32) -> bool {
        self.user_objects[user as usize].binary_search(&object).is_ok()
    }

    /// Text serialization: label tables plus three edge-list sections.
    ///
    /// Layout (tab-separated, one record per line):
    /// ```text
    /// tripartite-graph v1
    /// counts <n> <m> <r>
    /// user <label>          (n lines, id = line order)
    /// object <label>        (m lines)
    /// tag <label>           (r lines)
    /// uo <user id> <object id>
    /// ot <object id> <tag id> <user count>
    /// ut <user id> <tag id> <use count>
    /// ```
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "tripartite-graph v1");
        let _ = writeln!(out, "counts\t{}\t{}\t{}", self.n(), self.m(), self.r());
        for l in &self.user_labels {
            let _ = writeln!(out, "user\t{l}");
        }
        for l in &self.object_labels {
            let _ = writeln!(out, "object\t{l}");
        }
        for l in &self.tag_labels {
            let _ = writeln!(out, "tag\t{l}");
        }
        for (u, objects) in self.user_objects.iter().enumerate() {
            for o in objects {
                let _ = writeln!(out, "uo\t{u}\t{o}");
            }
        }
        for (o, tags) in self.object_tag_weights.iter().enumerate() {
            for (t, users) in tags {
                let _ = writeln!(out, "ot\t{o}\t{t}\t{users}");
            }
        }
        for (u, tags) in self.user_tag_weights.iter().enumerate() {
            for (t, c) in tags {
                let _ = writeln!(out, "ut\t{u}\t{t}\t{c}");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TripartiteGraph, GraphError> {
        let malformed = |line: usize, reason: &str| GraphError::Malformed {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| malformed(1, "empty input"))?;
        if header != "tripartite-graph v1" {
            return Err(malformed(1, "bad header"));
        }
        let mut g = TripartiteGraph {
            user_labels: Vec::new(),
            object_labels: Vec::new(),
            tag_labels: Vec::new(),
            user_ids: HashMap::new(),
            object_ids: HashMap::new(),
            tag_ids: HashMap::new(),
            user_objects: Vec::new(),
            object_users: Vec::new(),
            object_tags: Vec::new(),
            tag_objects: Vec::new(),
            user_tag_weights: Vec::new(),
            object_tag_weights: Vec::new(),
        };
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split('\t').collect();
            let parse_id = |s: &str| -> Result<usize, GraphError> {
                s.parse().map_err(|_| malformed(lineno, "bad integer"))
            };
            match fields[0] {
                "counts" => {
                    if fields.len() != 4 {
                        return Err(malformed(lineno, "counts needs 3 fields"));
                    }
                    let (n, m, r) = (
                        parse_id(fields[1])?,
                        parse_id(fields[2])?,
                        parse_id(fields[3])?,
                    );
                    g.user_objects = vec![Vec::new(); n];
                    g.object_users = vec![Vec::new(); m];
                    g.object_tags = vec![Vec::new(); m];
                    g.tag_objects = vec![Vec::new(); r];
                    g.user_tag_weights = vec![Vec::new(); n];
                    g.object_tag_weights = vec![Vec::new(); m];
                }
                "user" | "object" | "tag" => {
                    if fields.len() != 2 {
                        return Err(malformed(lineno, "label line needs 1 field"));
                    }
                    let (labels, ids) = match fields[0] {
                        "user" => (&mut g.user_labels, &mut g.user_ids),
                        "object" => (&mut g.object_labels, &mut g.object_ids),
                        _ => (&mut g.tag_labels, &mut g.tag_ids),
                    };
                    ids.insert(fields[1].to_string(), labels.len() as u32);
                    labels.push(fields[1].to_string());
                }
                "uo" => {
                    if fields.len() != 3 {
                        return Err(malformed(lineno, "uo needs 2 fields"));
                    }
                    let (u, o) = (parse_id(fields[1])?, parse_id(fields[2])?);
                    if u >= g.user_objects.len() || o >= g.object_users.len() {
                        return Err(malformed(lineno, "edge id out of range"));
                    }
                    g.user_objects[u].push(o as u32);
                    g.object_users[o].push(u as u32);
                }
                "ot" => {
                    if fields.len() != 4 {
                        return Err(malformed(lineno, "ot needs 3 fields"));
                    }
                    let (o, t, users) = (
                        parse_id(fields[1])?,
                        parse_id(fields[2])?,
                        parse_id(fields[3])?,
                    );
                    if o >= g.object_tags.len() || t >= g.tag_objects.len() {
                        return Err(malformed(lineno, "edge id out of range"));
                    }
                    g.object_tags[o].push(t as u32);
                    g.tag_objects[t].push(o as u32);
                    g.object_tag_weights[o].push((t as u32, users as u32));
                }
                "ut" => {
                    if fields.len() != 4 {
                        return Err(malformed(lineno, "ut needs 3 fields"));
                    }
                    let (u, t, c) = (
                        parse_id(fields[1])?,
                        parse_id(fields[2])?,
                        parse_id(fields[3])?,
                    );
                    if u >= g.user_tag_weights.len() || t >= g.tag_objects.len() {
                        return Err(malformed(lineno, "edge id out of range"));
                    }
                    g.user_tag_weights[u].push((t as u32, c as u32));
                }
                other => return Err(malformed(lineno, &format!("unknown section '{other}'"))),
            }
        }
        for list in g.user_objects.iter_mut().chain(&mut g.object_users) {
            list.sort_unstable();
        }
        for list in g.object_tags.iter_mut().chain(&mut g.tag_objects) {
            list.sort_unstable();
        }
        for list in g
            .user_tag_weights
            .iter_mut()
            .chain(&mut g.object_tag_weights)
        {
            list.sort_unstable();
        }
        Ok(g)
    }
}

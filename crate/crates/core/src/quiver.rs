//! Quivers with length-two monomial relations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cuts::AdmissibleCut;
use crate::error::{Error, Result};
use crate::surface::TriangulatedSurface;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub label: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Arc<Vec<String>>,
    pub arrows: Vec<Arrow>,
}

/// A quiver together with a set of composable arrow pairs `(a, b)`, read "a then b".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverWithRelations {
    pub quiver: Quiver,
    pub relations: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>) -> Self {
        Quiver { vertices: Arc::new(vertices), arrows: Vec::new() }
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn add_arrow(&mut self, label: impl Into<String>, source: usize, target: usize) -> usize {
        self.arrows.push(Arrow { label: label.into(), source, target });
        self.arrows.len() - 1
    }

    pub fn arrow_by_label(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    /// Sorted list of (source, target) pairs.
    pub fn arrow_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.arrows.iter().map(|a| (a.source, a.target)).collect();
        v.sort_unstable();
        v
    }

    /// Same vertices and the same multiset of arrows.
    pub fn same_arrows(&self, other: &Quiver) -> bool {
        self.vertices == other.vertices && self.arrow_pairs() == other.arrow_pairs()
    }

    pub fn named_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<_> = self
            .arrows
            .iter()
            .map(|a| (self.vertices[a.source].clone(), self.vertices[a.target].clone()))
            .collect();
        v.sort();
        v
    }
}

impl QuiverWithRelations {
    pub fn vertices(&self) -> &[String] {
        &self.quiver.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.quiver.arrows
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.quiver.arrows[a]
    }

    pub fn is_relation(&self, a: usize, b: usize) -> bool {
        self.relations.binary_search(&(a, b)).is_ok()
    }

    pub(crate) fn normalize(&mut self) {
        self.relations.sort_unstable();
        self.relations.dedup();
    }

    pub fn out_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.quiver.arrows.iter().enumerate().filter(move |(_, a)| a.source == v).map(|(i, _)| i)
    }

    pub fn in_arrows(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.quiver.arrows.iter().enumerate().filter(move |(_, a)| a.target == v).map(|(i, _)| i)
    }

    /// Keeps only the listed arrows, dropping relations that mention removed ones.
    pub fn restrict(&self, keep: &[bool]) -> QuiverWithRelations {
        let mut new_index = vec![usize::MAX; self.quiver.arrows.len()];
        let mut q = Quiver { vertices: self.quiver.vertices.clone(), arrows: Vec::new() };
        for (i, a) in self.quiver.arrows.iter().enumerate() {
            if keep[i] {
                new_index[i] = q.arrows.len();
                q.arrows.push(a.clone());
            }
        }
        let relations = self
            .relations
            .iter()
            .filter(|(a, b)| keep[*a] && keep[*b])
            .map(|&(a, b)| (new_index[a], new_index[b]))
            .collect();
        let mut out = QuiverWithRelations { quiver: q, relations };
        out.normalize();
        out
    }

    /// Encoding that identifies quivers-with-relations up to relabeling arrows between
    /// the same ordered vertex pair.
    pub fn canonical_key(&self) -> Vec<u32> {
        canonical_key(self)
    }

    /// Relation pairs written with arrow labels.
    pub fn relation_labels(&self) -> Vec<(String, String)> {
        self.relations
            .iter()
            .map(|&(a, b)| (self.arrow(a).label.clone(), self.arrow(b).label.clone()))
            .collect()
    }
}

/// Arrow label for the arrow sitting in corner `position` of triangle `triangle`.
pub fn corner_label(triangle: usize, position: u8) -> String {
    format!("t{triangle}.{position}")
}

/// The quiver Q_T with the Jacobian relations of the internal triangles.
pub fn quiver_of(s: &TriangulatedSurface) -> QuiverWithRelations {
    let mut q = Quiver::new(s.arc_labels().to_vec());
    let mut relations = Vec::new();
    for (t, tri) in s.triangles().iter().enumerate() {
        let mut ids = [usize::MAX; 3];
        for p in 0..3u8 {
            let a = tri[p as usize];
            let b = tri[((p + 1) % 3) as usize];
            if s.is_arc(a) && s.is_arc(b) {
                ids[p as usize] = q.add_arrow(corner_label(t, p), a, b);
            }
        }
        if ids.iter().all(|&i| i != usize::MAX) {
            for p in 0..3 {
                relations.push((ids[p], ids[(p + 1) % 3]));
            }
        }
    }
    let mut out = QuiverWithRelations { quiver: q, relations };
    out.normalize();
    out
}

/// Q_T with the cut arrows removed; each internal triangle keeps the one relation
/// avoiding its cut arrow.
pub fn apply_cut(s: &TriangulatedSurface, cut: &AdmissibleCut) -> QuiverWithRelations {
    let q = quiver_of(s);
    let removed: HashSet<String> = cut.removed_labels().into_iter().collect();
    let keep: Vec<bool> = q.arrows().iter().map(|a| !removed.contains(&a.label)).collect();
    q.restrict(&keep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GentleViolation {
    pub condition: u8,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GentleReport {
    pub pass: bool,
    pub violations: Vec<GentleViolation>,
}

/// Checks the four defining conditions of a gentle quiver with relations.
pub fn is_gentle(q: &QuiverWithRelations) -> GentleReport {
    let mut violations = Vec::new();
    let n = q.vertices().len();
    let arrows = q.arrows();
    let name = |v: usize| q.vertices()[v].as_str();
    let mut outd = vec![0usize; n];
    let mut ind = vec![0usize; n];
    for a in arrows {
        outd[a.source] += 1;
        ind[a.target] += 1;
    }
    for v in 0..n {
        if outd[v] > 2 || ind[v] > 2 {
            violations.push(GentleViolation {
                condition: 1,
                witness: format!("vertex {} has {} outgoing and {} incoming arrows", name(v), outd[v], ind[v]),
            });
        }
    }
    for &(a, b) in &q.relations {
        if arrows[a].target != arrows[b].source {
            violations.push(GentleViolation {
                condition: 3,
                witness: format!("relation ({}, {}) is not composable", arrows[a].label, arrows[b].label),
            });
        }
    }
    for (b, beta) in arrows.iter().enumerate() {
        let mut pre_free = 0;
        let mut pre_rel = 0;
        for (a, alpha) in arrows.iter().enumerate() {
            if alpha.target == beta.source {
                if q.is_relation(a, b) {
                    pre_rel += 1;
                } else {
                    pre_free += 1;
                }
            }
        }
        let mut post_free = 0;
        let mut post_rel = 0;
        for (c, gamma) in arrows.iter().enumerate() {
            if gamma.source == beta.target {
                if q.is_relation(b, c) {
                    post_rel += 1;
                } else {
                    post_free += 1;
                }
            }
        }
        if pre_free > 1 || post_free > 1 {
            violations.push(GentleViolation {
                condition: 2,
                witness: format!(
                    "arrow {} has {pre_free} unrelated predecessors and {post_free} unrelated successors",
                    beta.label
                ),
            });
        }
        if pre_rel > 1 || post_rel > 1 {
            violations.push(GentleViolation {
                condition: 4,
                witness: format!(
                    "arrow {} has {pre_rel} related predecessors and {post_rel} related successors",
                    beta.label
                ),
            });
        }
    }
    GentleReport { pass: violations.is_empty(), violations }
}

/// Fomin–Zelevinsky mutation at `v`.
pub fn mutate(q: &Quiver, v: usize) -> Result<Quiver> {
    if v >= q.vertices.len() {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let mut count: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for a in &q.arrows {
        if a.source == v && a.target == v {
            return Err(Error::Mutation(format!("loop at {}", q.vertices[v])));
        }
        *count.entry((a.source, a.target)).or_default() += 1;
    }
    for (&(i, j), _) in count.iter().filter(|((i, j), _)| *i == v || *j == v) {
        if count.contains_key(&(j, i)) {
            return Err(Error::Mutation(format!(
                "2-cycle between {} and {}",
                q.vertices[i], q.vertices[j]
            )));
        }
    }
    let ins: Vec<(usize, i64)> =
        count.iter().filter(|((_, j), _)| *j == v).map(|(&(i, _), &c)| (i, c)).collect();
    let outs: Vec<(usize, i64)> =
        count.iter().filter(|((i, _), _)| *i == v).map(|(&(_, k), &c)| (k, c)).collect();
    let mut out = Quiver { vertices: q.vertices.clone(), arrows: Vec::new() };
    // Arrows away from v survive unless cancelled; arrows at v are reversed.
    let mut net: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (&(i, j), &c) in &count {
        if i != v && j != v {
            *net.entry((i, j)).or_default() += c;
        }
    }
    for &(i, ci) in &ins {
        for &(k, ck) in &outs {
            *net.entry((i, k)).or_default() += ci * ck;
        }
    }
    let keys: Vec<(usize, usize)> = net.keys().copied().collect();
    for (i, k) in keys {
        if i < k {
            let a = net.get(&(i, k)).copied().unwrap_or(0);
            let b = net.get(&(k, i)).copied().unwrap_or(0);
            let m = a.min(b);
            net.insert((i, k), a - m);
            net.insert((k, i), b - m);
        }
    }
    let mut kept: HashMap<(usize, usize), i64> = net.into_iter().collect();
    for a in &q.arrows {
        if a.source == v || a.target == v {
            out.arrows.push(Arrow { label: a.label.clone(), source: a.target, target: a.source });
        } else if let Some(left) = kept.get_mut(&(a.source, a.target)) {
            if *left > 0 {
                *left -= 1;
                out.arrows.push(a.clone());
            }
        }
    }
    let mut extra: Vec<((usize, usize), i64)> = kept.into_iter().filter(|(_, c)| *c > 0).collect();
    extra.sort_unstable();
    for ((i, k), c) in extra {
        for n in 0..c {
            let label = format!("[{}{}{}]{}", q.vertices[i], q.vertices[v], q.vertices[k], n);
            out.arrows.push(Arrow { label, source: i, target: k });
        }
    }
    Ok(out)
}

/// True iff the two quivers agree on the shared vertex set: same arrow multiset and
/// relations matched by some endpoint-preserving arrow bijection.
pub fn equal_on_vertices(q1: &QuiverWithRelations, q2: &QuiverWithRelations) -> Result<bool> {
    if q1.vertices() != q2.vertices() {
        return Err(Error::VertexMismatch);
    }
    Ok(q1.canonical_key() == q2.canonical_key())
}

fn canonical_key(q: &QuiverWithRelations) -> Vec<u32> {
    let arrows = q.arrows();
    let mut order: Vec<usize> = (0..arrows.len()).collect();
    order.sort_by_key(|&a| (arrows[a].source, arrows[a].target));
    // Groups of parallel arrows; any permutation inside a group is allowed.
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let key = (arrows[order[i]].source, arrows[order[i]].target);
        let mut j = i + 1;
        while j < order.len() && (arrows[order[j]].source, arrows[order[j]].target) == key {
            j += 1;
        }
        if j - i > 1 {
            groups.push((i, j));
        }
        i = j;
    }
    let mut head: Vec<u32> = Vec::with_capacity(2 * arrows.len() + 2);
    head.push(q.vertices().len() as u32);
    head.push(arrows.len() as u32);
    for &a in &order {
        head.push(arrows[a].source as u32);
        head.push(arrows[a].target as u32);
    }
    let encode = |order: &[usize]| -> Vec<u32> {
        let mut pos = vec![0u32; arrows.len()];
        for (p, &a) in order.iter().enumerate() {
            pos[a] = p as u32;
        }
        let mut rel: Vec<(u32, u32)> = q.relations.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        rel.sort_unstable();
        rel.into_iter().flat_map(|(a, b)| [a, b]).collect()
    };
    let mut best: Option<Vec<u32>> = None;
    if groups.is_empty() || q.relations.is_empty() {
        best = Some(encode(&order));
    } else {
        permute_groups(&mut order, &groups, 0, &mut |o| {
            let e = encode(o);
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        });
    }
    head.push(u32::MAX);
    head.extend(best.unwrap());
    head
}

fn permute_groups(order: &mut Vec<usize>, groups: &[(usize, usize)], g: usize, f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        f(order);
        return;
    }
    let (lo, hi) = groups[g];
    heap_permute(order, lo, hi - lo, groups, g, f);
}

fn heap_permute(
    order: &mut Vec<usize>,
    lo: usize,
    k: usize,
    groups: &[(usize, usize)],
    g: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    if k <= 1 {
        permute_groups(order, groups, g + 1, f);
        return;
    }
    for i in 0..k {
        heap_permute(order, lo, k - 1, groups, g, f);
        if k.is_multiple_of(2) {
            order.swap(lo + i, lo + k - 1);
        } else {
            order.swap(lo, lo + k - 1);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverJson {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowJson>,
    pub relations: Vec<[String; 2]>,
}

impl QuiverWithRelations {
    pub fn to_json(&self) -> QuiverJson {
        let v = self.vertices();
        QuiverJson {
            vertices: v.to_vec(),
            arrows: self
                .arrows()
                .iter()
                .map(|a| ArrowJson { id: a.label.clone(), from: v[a.source].clone(), to: v[a.target].clone() })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|&(a, b)| [self.arrow(a).label.clone(), self.arrow(b).label.clone()])
                .collect(),
        }
    }

    pub fn from_json(j: &QuiverJson) -> Result<Self> {
        let mut q = Quiver::new(j.vertices.clone());
        for a in &j.arrows {
            if q.arrow_by_label(&a.id).is_some() {
                return Err(Error::Parse(format!("duplicate arrow id `{}`", a.id)));
            }
            let s = q.vertex_index(&a.from)?;
            let t = q.vertex_index(&a.to)?;
            q.add_arrow(a.id.clone(), s, t);
        }
        let mut relations = Vec::new();
        for [a, b] in &j.relations {
            let ia = q.arrow_by_label(a).ok_or_else(|| Error::Parse(format!("unknown arrow `{a}`")))?;
            let ib = q.arrow_by_label(b).ok_or_else(|| Error::Parse(format!("unknown arrow `{b}`")))?;
            if q.arrows[ia].target != q.arrows[ib].source {
                return Err(Error::Parse(format!("relation ({a}, {b}) is not composable")));
            }
            relations.push((ia, ib));
        }
        let mut out = QuiverWithRelations { quiver: q, relations };
        out.normalize();
        Ok(out)
    }

    /// Dot rendering; relations are listed in the graph label.
    pub fn to_dot(&self, name: &str) -> String {
        let v = self.vertices();
        let mut s = format!("digraph \"{name}\" {{\n");
        for x in v.iter() {
            s.push_str(&format!("  \"{x}\";\n"));
        }
        for a in self.arrows() {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                v[a.source], v[a.target], a.label
            ));
        }
        if !self.relations.is_empty() {
            let rels: Vec<String> = self
                .relations
                .iter()
                .map(|&(a, b)| format!("{}*{}", self.arrow(a).label, self.arrow(b).label))
                .collect();
            s.push_str(&format!("  label=\"relations: {}\";\n", rels.join(" ")));
        }
        s.push_str("}\n");
        s
    }
}

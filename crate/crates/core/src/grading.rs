//! Gradings induced by cuts, windows of the covering quiver, and the level-labeling
//! decision procedure for graded equivalence via the identity.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::cuts::AdmissibleCut;
use crate::error::{Error, Result};
use crate::quiver::{corner_label, quiver_of, QuiverWithRelations};
use crate::surface::TriangulatedSurface;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedQuiver {
    pub base: QuiverWithRelations,
    /// Indexed by arrow index of `base`.
    pub weight: Vec<i64>,
}

pub fn weight_of_cut(s: &TriangulatedSurface, c: &AdmissibleCut) -> WeightedQuiver {
    let base = quiver_of(s);
    let cut: std::collections::HashSet<String> = c.removed_labels().into_iter().collect();
    let weight = base.arrows().iter().map(|a| i64::from(cut.contains(&a.label))).collect();
    WeightedQuiver { base, weight }
}

impl WeightedQuiver {
    pub fn zero(base: QuiverWithRelations) -> Self {
        let weight = vec![0; base.arrows().len()];
        WeightedQuiver { base, weight }
    }

    /// Degree of each 3-cycle of relations: a relation `(a, b)` closed by the arrow
    /// `c` with `(b, c)` also a relation. Cut weights give degree 1 everywhere.
    pub fn cycle_degrees(&self) -> Vec<((usize, usize), i64)> {
        let q = &self.base;
        q.relations
            .iter()
            .map(|&(a, b)| {
                let closing = q.relations.iter().find(|&&(x, _)| x == b).map(|&(_, c)| c);
                let d = self.weight[a] + self.weight[b] + closing.map_or(0, |c| self.weight[c]);
                ((a, b), d)
            })
            .collect()
    }

    pub fn weight_by_label(&self, label: &str) -> Option<i64> {
        self.base.quiver.arrow_by_label(label).map(|a| self.weight[a])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowArrow {
    pub base: usize,
    pub from: (usize, i64),
    pub to: (usize, i64),
    pub bridge: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringWindow {
    pub lo: i64,
    pub hi: i64,
    pub vertices: Vec<(usize, i64)>,
    pub arrows: Vec<WindowArrow>,
    /// Pairs of indices into `arrows`.
    pub relations: Vec<(usize, usize)>,
    names: Arc<Vec<String>>,
}

pub fn covering_window(wq: &WeightedQuiver, lo: i64, hi: i64) -> Result<CoveringWindow> {
    if lo > hi {
        return Err(Error::Precondition(format!("empty window [{lo}, {hi}]")));
    }
    let n = wq.base.vertices().len();
    let mut vertices = Vec::new();
    for level in lo..=hi {
        for v in 0..n {
            vertices.push((v, level));
        }
    }
    let mut arrows = Vec::new();
    let mut copies: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for level in lo..=hi {
        for (i, a) in wq.base.arrows().iter().enumerate() {
            let to = level + wq.weight[i];
            if (lo..=hi).contains(&to) {
                copies.insert((i, level), arrows.len());
                arrows.push(WindowArrow {
                    base: i,
                    from: (a.source, level),
                    to: (a.target, to),
                    bridge: wq.weight[i] > 0,
                });
            }
        }
    }
    let mut relations = Vec::new();
    for &(a, b) in &wq.base.relations {
        for level in lo..=hi {
            if let Some(&x) = copies.get(&(a, level)) {
                if let Some(&y) = copies.get(&(b, level + wq.weight[a])) {
                    relations.push((x, y));
                }
            }
        }
    }
    relations.sort_unstable();
    Ok(CoveringWindow { lo, hi, vertices, arrows, relations, names: wq.base.quiver.vertices.clone() })
}

impl CoveringWindow {
    /// Bridge arrows as `((source, level), (target, level))` with vertex names.
    pub fn bridges(&self) -> Vec<((String, i64), (String, i64))> {
        let mut v: Vec<_> = self
            .arrows
            .iter()
            .filter(|a| a.bridge)
            .map(|a| ((self.names[a.from.0].clone(), a.from.1), (self.names[a.to.0].clone(), a.to.1)))
            .collect();
        v.sort();
        v
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> Vec<((String, i64), (String, i64), usize)> {
        let mut v: Vec<_> = self
            .arrows
            .iter()
            .filter(|a| a.from.1 >= lo && a.from.1 <= hi && a.to.1 >= lo && a.to.1 <= hi)
            .map(|a| ((self.names[a.from.0].clone(), a.from.1), (self.names[a.to.0].clone(), a.to.1), a.base))
            .collect();
        v.sort();
        v
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph cover {\n  rankdir=LR;\n");
        for level in (self.lo..=self.hi).rev() {
            s.push_str(&format!("  subgraph level_{} {{ rank=same;", level.abs() + if level < 0 { 1000 } else { 0 }));
            for (v, l) in &self.vertices {
                if *l == level {
                    s.push_str(&format!(" \"{}@{}\";", self.names[*v], l));
                }
            }
            s.push_str(" }\n");
        }
        for a in &self.arrows {
            s.push_str(&format!(
                "  \"{}@{}\" -> \"{}@{}\"{};\n",
                self.names[a.from.0],
                a.from.1,
                self.names[a.to.0],
                a.to.1,
                if a.bridge { " [style=bold color=red]" } else { "" }
            ));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLabeling {
    pub vertices: Arc<Vec<String>>,
    pub r: Vec<i64>,
    /// Vertices of equal r joined by arrows of weight 0 under the first grading.
    pub components: Vec<Vec<usize>>,
}

/// `r` by vertex name, and the level classes in increasing order of r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelingJson {
    pub r: BTreeMap<String, i64>,
    pub levels: Vec<Vec<String>>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkStep {
    pub arrow: usize,
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictWitness {
    pub vertices: Arc<Vec<String>>,
    /// Closed walk starting at the source of the conflicting arrow.
    pub cycle: Vec<WalkStep>,
    /// Vertices visited by the walk, in order.
    pub visited: Vec<usize>,
    pub discrepancy: i64,
}

impl ConflictWitness {
    pub fn vertex_names(&self) -> Vec<String> {
        self.visited.iter().map(|&v| self.vertices[v].clone()).collect()
    }
}

/// Sum of `w1 - w2` along a walk, with backward steps counted negatively.
pub fn walk_discrepancy(wq1: &WeightedQuiver, wq2: &WeightedQuiver, walk: &[WalkStep]) -> i64 {
    walk.iter()
        .map(|s| {
            let d = wq1.weight[s.arrow] - wq2.weight[s.arrow];
            if s.forward {
                d
            } else {
                -d
            }
        })
        .sum()
}

/// Solves `r(target) - r(source) = w1 - w2` on every arrow.
///
/// Arrows are taken in index order. Each either joins two labeled pieces of a spanning
/// forest or closes a cycle; the first inconsistent cycle is returned as the witness.
/// On success each connected component is normalized to r = 0 at its smallest vertex.
pub fn solve_levels(wq1: &WeightedQuiver, wq2: &WeightedQuiver) -> Result<std::result::Result<LevelLabeling, ConflictWitness>> {
    if wq1.base.vertices() != wq2.base.vertices() || wq1.base.arrows() != wq2.base.arrows() {
        return Err(Error::Precondition("gradings live on different quivers".into()));
    }
    let q = &wq1.base;
    let n = q.vertices().len();
    let arrows = q.arrows();
    let mut parent: Vec<usize> = (0..n).collect();
    // offset[v] = r(v) - r(parent[v])
    let mut offset = vec![0i64; n];
    fn find(parent: &mut [usize], offset: &mut [i64], v: usize) -> (usize, i64) {
        if parent[v] == v {
            return (v, 0);
        }
        let p = parent[v];
        let (root, off) = find(parent, offset, p);
        parent[v] = root;
        offset[v] += off;
        (root, offset[v])
    }
    let mut forest: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); n];
    for (i, a) in arrows.iter().enumerate() {
        let d = wq1.weight[i] - wq2.weight[i];
        let (ru, ou) = find(&mut parent, &mut offset, a.source);
        let (rv, ov) = find(&mut parent, &mut offset, a.target);
        if ru != rv {
            // r(target) = r(source) + d
            parent[rv] = ru;
            offset[rv] = ou + d - ov;
            forest[a.source].push((a.target, i, true));
            forest[a.target].push((a.source, i, false));
        } else if ov - ou != d {
            let mut cycle = vec![WalkStep { arrow: i, forward: true }];
            let mut visited = vec![a.source, a.target];
            let path = forest_path(&forest, a.target, a.source);
            for &(step, to) in &path {
                cycle.push(step);
                visited.push(to);
            }
            visited.pop();
            let discrepancy = walk_discrepancy(wq1, wq2, &cycle);
            debug_assert_ne!(discrepancy, 0);
            return Ok(Err(ConflictWitness { vertices: q.quiver.vertices.clone(), cycle, visited, discrepancy }));
        }
    }
    let mut r = vec![0i64; n];
    let mut base_of_root: BTreeMap<usize, i64> = BTreeMap::new();
    for v in 0..n {
        let (root, off) = find(&mut parent, &mut offset, v);
        r[v] = off;
        base_of_root.entry(root).or_insert(off);
    }
    for v in 0..n {
        let (root, _) = find(&mut parent, &mut offset, v);
        r[v] -= base_of_root[&root];
    }
    let components = weight_zero_components(wq1, &r);
    Ok(Ok(LevelLabeling { vertices: q.quiver.vertices.clone(), r, components }))
}

fn forest_path(forest: &[Vec<(usize, usize, bool)>], from: usize, to: usize) -> Vec<(WalkStep, usize)> {
    let n = forest.len();
    let mut prev: Vec<Option<(usize, WalkStep)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, arrow, forward) in &forest[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, WalkStep { arrow, forward }));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, step) = prev[cur].expect("tree path exists inside a component");
        path.push((step, cur));
        cur = p;
    }
    path.reverse();
    path
}

fn weight_zero_components(wq1: &WeightedQuiver, r: &[i64]) -> Vec<Vec<usize>> {
    let n = r.len();
    let mut adj = vec![Vec::new(); n];
    for (i, a) in wq1.base.arrows().iter().enumerate() {
        if wq1.weight[i] == 0 && r[a.source] == r[a.target] {
            adj[a.source].push(a.target);
            adj[a.target].push(a.source);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            k += 1;
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

impl LevelLabeling {
    pub fn value(&self, vertex: &str) -> Option<i64> {
        self.vertices.iter().position(|v| v == vertex).map(|i| self.r[i])
    }

    pub fn distinct_values(&self) -> Vec<i64> {
        let mut v = self.r.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Vertices grouped by r value, smallest value first.
    pub fn classes(&self) -> Vec<(i64, Vec<String>)> {
        let mut m: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for (i, &x) in self.r.iter().enumerate() {
            m.entry(x).or_default().push(self.vertices[i].clone());
        }
        m.into_iter().collect()
    }

    pub fn to_json(&self) -> LabelingJson {
        let r = self.vertices.iter().cloned().zip(self.r.iter().copied()).collect();
        let levels = self.classes().into_iter().map(|(_, names)| names).collect();
        LabelingJson { r, levels }
    }

    pub fn negated(&self) -> Vec<i64> {
        self.r.iter().map(|x| -x).collect()
    }

    /// Checks the per-arrow constraint for the given gradings.
    pub fn satisfies(&self, wq1: &WeightedQuiver, wq2: &WeightedQuiver) -> bool {
        wq1.base.arrows().iter().enumerate().all(|(i, a)| {
            self.r[a.target] - self.r[a.source] == wq1.weight[i] - wq2.weight[i]
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub level: i64,
    pub vertices: Vec<String>,
    pub triangles: Vec<usize>,
    /// Arcs on the region's frontier: sides of its triangles whose other triangle lies
    /// in another region, or the vertex itself when the region has no triangles.
    pub frontier: Vec<String>,
}

/// Regions of the surface covered by the constant-r components of the labeling.
pub fn level_partitions(
    s: &TriangulatedSurface,
    labeling: &LevelLabeling,
    c1: &AdmissibleCut,
) -> Vec<Region> {
    let wq1 = weight_of_cut(s, c1);
    let comps = &labeling.components;
    let mut comp_of = vec![usize::MAX; labeling.r.len()];
    for (k, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = k;
        }
    }
    let q = &wq1.base;
    let mut tri_region = vec![usize::MAX; s.triangles().len()];
    for (t, tri) in s.triangles().iter().enumerate() {
        let mut region = usize::MAX;
        for p in 0..3u8 {
            if let Some(a) = q.quiver.arrow_by_label(&corner_label(t, p)) {
                let arrow = q.arrow(a);
                if wq1.weight[a] == 0 && labeling.r[arrow.source] == labeling.r[arrow.target] {
                    region = comp_of[arrow.source];
                    break;
                }
            }
        }
        if region == usize::MAX {
            if let Some(&e) = tri.iter().find(|&&e| s.is_arc(e)) {
                region = comp_of[e];
            }
        }
        tri_region[t] = region;
    }
    comps
        .iter()
        .enumerate()
        .map(|(k, members)| {
            let triangles: Vec<usize> = (0..tri_region.len()).filter(|&t| tri_region[t] == k).collect();
            let mut frontier = Vec::new();
            for &t in &triangles {
                for &e in &s.triangles()[t] {
                    if s.is_arc(e) && s.slots(e).iter().any(|&(t2, _)| tri_region[t2] != k) {
                        frontier.push(s.label(e).to_string());
                    }
                }
            }
            if triangles.is_empty() {
                frontier.extend(members.iter().map(|&v| labeling.vertices[v].clone()));
            }
            frontier.sort();
            frontier.dedup();
            Region {
                level: labeling.r[members[0]],
                vertices: members.iter().map(|&v| labeling.vertices[v].clone()).collect(),
                triangles,
                frontier,
            }
        })
        .collect()
}

/// The exponents r_i of the tilting object, keyed by vertex.
pub fn tilting_data(labeling: &LevelLabeling) -> Vec<(String, i64)> {
    labeling.vertices.iter().cloned().zip(labeling.r.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::{cut_from_entries, enumerate_cuts, CutEntry};
    use crate::fixtures::{pair_cut, surface};

    fn pants_cuts(s: &TriangulatedSurface) -> (AdmissibleCut, AdmissibleCut) {
        let c1 = pair_cut(s, &[("9", "8"), ("4", "2"), ("11", "2"), ("12", "1"), ("5", "7"), ("13", "3"), ("12", "14"), ("16", "17")]).unwrap();
        let c2 = pair_cut(s, &[("9", "8"), ("4", "2"), ("2", "1"), ("3", "12"), ("5", "7"), ("6", "13"), ("12", "14"), ("17", "18")]).unwrap();
        (c1, c2)
    }

    #[test]
    fn figure1_weights_and_window() {
        let s = surface("figure1");
        let c = pair_cut(&s, &[("2", "6"), ("7", "5")]).unwrap();
        let wq = weight_of_cut(&s, &c);
        let heavy: Vec<_> = wq
            .base
            .arrows()
            .iter()
            .enumerate()
            .filter(|(i, _)| wq.weight[*i] == 1)
            .map(|(_, a)| (wq.base.vertices()[a.source].as_str(), wq.base.vertices()[a.target].as_str()))
            .collect();
        assert_eq!(heavy, vec![("2", "6"), ("7", "5")]);
        let w = covering_window(&wq, 0, 1).unwrap();
        let b: Vec<_> = w.bridges();
        assert_eq!(
            b,
            vec![(("2".into(), 0), ("6".into(), 1)), (("7".into(), 0), ("5".into(), 1))]
        );
    }

    #[test]
    fn every_cut_gives_degree_one_cycles() {
        let s = surface("figure1");
        for c in enumerate_cuts(&s).unwrap() {
            let wq = weight_of_cut(&s, &c);
            let d = wq.cycle_degrees();
            assert_eq!(d.len(), 6);
            assert!(d.iter().all(|(_, x)| *x == 1));
        }
    }

    #[test]
    fn zero_window_is_base_copy() {
        let s = surface("figure1");
        let wq = WeightedQuiver::zero(quiver_of(&s));
        let w = covering_window(&wq, 0, 0).unwrap();
        assert_eq!(w.arrows.len(), wq.base.arrows().len());
        assert_eq!(w.relations.len(), wq.base.relations.len());
        assert!(w.bridges().is_empty());
    }

    #[test]
    fn pants_levels() {
        let s = surface("pants");
        let (c1, c2) = pants_cuts(&s);
        let l = solve_levels(&weight_of_cut(&s, &c1), &weight_of_cut(&s, &c2)).unwrap().unwrap();
        assert_eq!(l.distinct_values(), vec![-1, 0, 1]);
        let classes = l.classes();
        assert_eq!(classes[0].1, vec!["12", "13", "14", "15"]);
        // circled vertices of the covering figure
        for v in ["17", "4", "8", "9", "10", "2"] {
            assert_eq!(l.value(v), Some(1), "{v}");
        }
        for v in ["16", "18", "5", "7", "6", "3", "1", "11"] {
            assert_eq!(l.value(v), Some(0), "{v}");
        }
        let regions = level_partitions(&s, &l, &c1);
        let sliding: Vec<String> = crate::cuts::sliding_edges(&s, &c1, &c2).into_iter().map(|x| x.0).collect();
        for r in &regions {
            for e in &r.frontier {
                assert!(sliding.contains(e), "frontier arc {e} is not sliding");
            }
        }
    }

    #[test]
    fn pants_window_bridges() {
        let s = surface("pants");
        let (c1, _) = pants_cuts(&s);
        let w = covering_window(&weight_of_cut(&s, &c1), -1, 1).unwrap();
        let pairs = [("9", "8"), ("16", "17"), ("4", "2"), ("5", "7"), ("11", "2"), ("12", "1"), ("12", "14"), ("13", "3")];
        let mut expect = Vec::new();
        for l in [-1, 0] {
            for (a, b) in pairs {
                expect.push(((a.to_string(), l), (b.to_string(), l + 1)));
            }
        }
        expect.sort();
        assert_eq!(w.bridges(), expect);
    }

    #[test]
    fn torus_conflict() {
        let s = surface("torus");
        let c1 = pair_cut(&s, &[("1", "2"), ("3", "4")]).unwrap();
        let c2 = cut_from_entries(
            &s,
            &[CutEntry::Pair(["1".into(), "2".into()]), CutEntry::Corner { triangle: 1, corner: 1 }],
        )
        .unwrap();
        let (w1, w2) = (weight_of_cut(&s, &c1), weight_of_cut(&s, &c2));
        let wit = solve_levels(&w1, &w2).unwrap().unwrap_err();
        let mut names = wit.vertex_names();
        names.sort();
        assert_eq!(names, vec!["1", "2", "4"]);
        assert_ne!(wit.discrepancy, 0);
        assert_eq!(walk_discrepancy(&w1, &w2, &wit.cycle), wit.discrepancy);
    }

    #[test]
    fn identical_cuts_zero_labeling() {
        let s = surface("pants");
        let (c1, _) = pants_cuts(&s);
        let w = weight_of_cut(&s, &c1);
        let l = solve_levels(&w, &w).unwrap().unwrap();
        assert!(l.r.iter().all(|&x| x == 0));
        let regions = level_partitions(&s, &l, &c1);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].triangles.len(), s.triangles().len());
    }
}

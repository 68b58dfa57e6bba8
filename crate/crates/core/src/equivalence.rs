//! Quiver automorphisms, their action on cuts and on the surface, and derived
//! equivalence certificates built from them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cuts::{distribution, equidistributed, AdmissibleCut, CutDistribution};
use crate::error::{Error, Result};
use crate::grading::{solve_levels, tilting_data, weight_of_cut, LevelLabeling};
use crate::quiver::{corner_label, quiver_of, QuiverWithRelations};
use crate::surface::{Corner, TriangulatedSurface};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuiverAutomorphism {
    pub vertex_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl QuiverAutomorphism {
    pub fn identity(q: &QuiverWithRelations) -> Self {
        QuiverAutomorphism {
            vertex_map: (0..q.vertices().len()).collect(),
            arrow_map: (0..q.arrows().len()).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &j)| i == j)
            && self.arrow_map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &QuiverAutomorphism) -> QuiverAutomorphism {
        QuiverAutomorphism {
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            arrow_map: other.arrow_map.iter().map(|&a| self.arrow_map[a]).collect(),
        }
    }

    pub fn inverse(&self) -> QuiverAutomorphism {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (i, &j) in self.vertex_map.iter().enumerate() {
            vertex_map[j] = i;
        }
        let mut arrow_map = vec![0; self.arrow_map.len()];
        for (i, &j) in self.arrow_map.iter().enumerate() {
            arrow_map[j] = i;
        }
        QuiverAutomorphism { vertex_map, arrow_map }
    }

    /// Checks that the maps are bijections preserving endpoints and relations.
    pub fn is_valid_for(&self, q: &QuiverWithRelations) -> bool {
        is_isomorphism(q, q, self)
    }

    /// Non-fixed vertices as `(from, to)` names.
    pub fn describe(&self, q: &QuiverWithRelations) -> Vec<(String, String)> {
        self.vertex_map
            .iter()
            .enumerate()
            .filter(|(i, j)| i != *j)
            .map(|(i, &j)| (q.vertices()[i].clone(), q.vertices()[j].clone()))
            .collect()
    }
}

fn is_isomorphism(q1: &QuiverWithRelations, q2: &QuiverWithRelations, f: &QuiverAutomorphism) -> bool {
    let n = q1.vertices().len();
    let m = q1.arrows().len();
    if q2.vertices().len() != n || q2.arrows().len() != m || f.vertex_map.len() != n || f.arrow_map.len() != m {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in &f.vertex_map {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    let mut seen = vec![false; m];
    for &a in &f.arrow_map {
        if a >= m || std::mem::replace(&mut seen[a], true) {
            return false;
        }
    }
    for (i, a) in q1.arrows().iter().enumerate() {
        let b = q2.arrow(f.arrow_map[i]);
        if b.source != f.vertex_map[a.source] || b.target != f.vertex_map[a.target] {
            return false;
        }
    }
    q1.relations.len() == q2.relations.len()
        && q1.relations.iter().all(|&(a, b)| q2.is_relation(f.arrow_map[a], f.arrow_map[b]))
}

type Invariant = (usize, usize, usize, usize, usize, usize);

fn invariants(q: &QuiverWithRelations) -> Vec<Invariant> {
    let n = q.vertices().len();
    let mut inv = vec![(0, 0, 0, 0, 0, 0); n];
    for a in q.arrows() {
        inv[a.source].0 += 1;
        inv[a.target].1 += 1;
        if a.source == a.target {
            inv[a.source].5 += 1;
        }
    }
    for &(a, b) in &q.relations {
        inv[q.arrow(a).source].2 += 1;
        inv[q.arrow(a).target].3 += 1;
        inv[q.arrow(b).target].4 += 1;
    }
    inv
}

fn multiplicities(q: &QuiverWithRelations) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for a in q.arrows() {
        *m.entry((a.source, a.target)).or_default() += 1;
    }
    m
}

/// All isomorphisms `q1 → q2` of quivers with relations, sorted, optionally stopping after `limit`.
pub fn isomorphisms(q1: &QuiverWithRelations, q2: &QuiverWithRelations, limit: Option<usize>) -> Vec<QuiverAutomorphism> {
    let n = q1.vertices().len();
    if q2.vertices().len() != n || q1.arrows().len() != q2.arrows().len() || q1.relations.len() != q2.relations.len() {
        return Vec::new();
    }
    let inv1 = invariants(q1);
    let inv2 = invariants(q2);
    let mut a = inv1.clone();
    let mut b = inv2.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Vec::new();
    }
    let mult1 = multiplicities(q1);
    let mult2 = multiplicities(q2);
    let mut nbr1 = vec![Vec::new(); n];
    let mut nbr2 = vec![Vec::new(); n];
    for &(u, v) in mult1.keys() {
        nbr1[u].push(v);
        nbr1[v].push(u);
    }
    for &(u, v) in mult2.keys() {
        nbr2[u].push(v);
        nbr2[v].push(u);
    }
    for l in nbr2.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    // BFS order so later vertices have an already placed neighbor.
    let mut order = Vec::with_capacity(n);
    let mut anchor = vec![None; n];
    let mut placed = vec![false; n];
    for start in 0..n {
        if placed[start] {
            continue;
        }
        placed[start] = true;
        order.push(start);
        let mut k = order.len() - 1;
        while k < order.len() {
            let v = order[k];
            k += 1;
            let mut ns = nbr1[v].clone();
            ns.sort_unstable();
            for w in ns {
                if !placed[w] {
                    placed[w] = true;
                    anchor[w] = Some(v);
                    order.push(w);
                }
            }
        }
    }

    struct Search<'a> {
        q1: &'a QuiverWithRelations,
        q2: &'a QuiverWithRelations,
        inv1: Vec<Invariant>,
        inv2: Vec<Invariant>,
        mult1: BTreeMap<(usize, usize), usize>,
        mult2: BTreeMap<(usize, usize), usize>,
        nbr2: Vec<Vec<usize>>,
        order: Vec<usize>,
        anchor: Vec<Option<usize>>,
        map: Vec<usize>,
        used: Vec<bool>,
        out: Vec<QuiverAutomorphism>,
        limit: Option<usize>,
    }

    impl Search<'_> {
        fn full(&self) -> bool {
            self.limit.is_some_and(|l| self.out.len() >= l)
        }

        fn vertices(&mut self, k: usize) {
            if self.full() {
                return;
            }
            if k == self.order.len() {
                self.arrows();
                return;
            }
            let v = self.order[k];
            let candidates: Vec<usize> = match self.anchor[v] {
                Some(u) => self.nbr2[self.map[u]].clone(),
                None => (0..self.map.len()).collect(),
            };
            for w in candidates {
                if self.used[w] || self.inv1[v] != self.inv2[w] {
                    continue;
                }
                let ok = self.order[..k].iter().chain(std::iter::once(&v)).all(|&u| {
                    let fu = if u == v { w } else { self.map[u] };
                    self.mult1.get(&(u, v)).unwrap_or(&0) == self.mult2.get(&(fu, w)).unwrap_or(&0)
                        && self.mult1.get(&(v, u)).unwrap_or(&0) == self.mult2.get(&(w, fu)).unwrap_or(&0)
                });
                if !ok {
                    continue;
                }
                self.map[v] = w;
                self.used[w] = true;
                self.vertices(k + 1);
                self.used[w] = false;
                self.map[v] = usize::MAX;
            }
        }

        fn arrows(&mut self) {
            let m = self.q1.arrows().len();
            let mut amap = vec![usize::MAX; m];
            let mut used = vec![false; m];
            self.arrow_step(0, &mut amap, &mut used);
        }

        fn arrow_step(&mut self, i: usize, amap: &mut Vec<usize>, used: &mut Vec<bool>) {
            if self.full() {
                return;
            }
            let m = amap.len();
            if i == m {
                let f = QuiverAutomorphism { vertex_map: self.map.clone(), arrow_map: amap.clone() };
                if is_isomorphism(self.q1, self.q2, &f) {
                    self.out.push(f);
                }
                return;
            }
            let a = self.q1.arrow(i);
            let (s, t) = (self.map[a.source], self.map[a.target]);
            for j in 0..m {
                if used[j] {
                    continue;
                }
                let b = self.q2.arrow(j);
                if b.source != s || b.target != t {
                    continue;
                }
                amap[i] = j;
                let consistent = self.q1.relations.iter().all(|&(x, y)| {
                    if x > i || y > i {
                        return true;
                    }
                    self.q2.is_relation(amap[x], amap[y])
                });
                if consistent {
                    used[j] = true;
                    self.arrow_step(i + 1, amap, used);
                    used[j] = false;
                }
                amap[i] = usize::MAX;
            }
        }
    }

    let mut search = Search {
        q1,
        q2,
        inv1,
        inv2,
        mult1,
        mult2,
        nbr2,
        order,
        anchor,
        map: vec![usize::MAX; n],
        used: vec![false; n],
        out: Vec::new(),
        limit,
    };
    search.vertices(0);
    let mut out = search.out;
    out.sort();
    out
}

/// All relation-preserving automorphisms, identity first and the rest sorted.
pub fn quiver_automorphisms(q: &QuiverWithRelations) -> Vec<QuiverAutomorphism> {
    let mut all = isomorphisms(q, q, None);
    let id = QuiverAutomorphism::identity(q);
    all.retain(|f| *f != id);
    all.insert(0, id);
    all
}

/// Image of a cut under an automorphism of Q_T.
pub fn act_on_cut(s: &TriangulatedSurface, f: &QuiverAutomorphism, c: &AdmissibleCut) -> Result<AdmissibleCut> {
    let q = quiver_of(s);
    if !f.is_valid_for(&q) {
        return Err(Error::Precondition("map is not an automorphism of the surface quiver".into()));
    }
    let mut choices = Vec::new();
    for label in c.removed_labels() {
        let a = q
            .quiver
            .arrow_by_label(&label)
            .ok_or_else(|| Error::Inconsistent(format!("cut arrow {label} missing from Q_T")))?;
        let image = &q.arrow(f.arrow_map[a]).label;
        choices.push(parse_corner_label(image)?);
    }
    AdmissibleCut::new(s, choices).map_err(|e| Error::InvalidCut(format!("image of cut is not admissible: {e}")))
}

fn parse_corner_label(label: &str) -> Result<(usize, u8)> {
    let rest = label.strip_prefix('t').ok_or_else(|| Error::Inconsistent(format!("arrow label {label}")))?;
    let (t, p) = rest.split_once('.').ok_or_else(|| Error::Inconsistent(format!("arrow label {label}")))?;
    let t = t.parse().map_err(|_| Error::Inconsistent(format!("arrow label {label}")))?;
    let p = p.parse().map_err(|_| Error::Inconsistent(format!("arrow label {label}")))?;
    Ok((t, p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceMap {
    pub triangle_map: Vec<usize>,
    /// Per triangle, the image of corner position p is `(p + rotation) % 3`.
    pub rotation: Vec<u8>,
    pub edge_map: Vec<usize>,
    pub boundary_component_map: Vec<usize>,
    pub vertex_orbit_map: Vec<usize>,
}

impl SurfaceMap {
    pub fn map_corner(&self, c: Corner) -> Corner {
        Corner {
            triangle: self.triangle_map[c.triangle],
            position: (c.position + self.rotation[c.triangle]) % 3,
        }
    }
}

/// Extends a quiver automorphism to triangles, boundary segments and marked points.
pub fn induced_surface_map(s: &TriangulatedSurface, f: &QuiverAutomorphism) -> Result<SurfaceMap> {
    let q = quiver_of(s);
    if !f.is_valid_for(&q) {
        return Err(Error::Precondition("map is not an automorphism of the surface quiver".into()));
    }
    let nt = s.triangles().len();
    let mut triangle_map = vec![usize::MAX; nt];
    let mut rotation = vec![0u8; nt];
    let bad = |why: String| Error::Inconsistent(format!("automorphism does not extend to the surface: {why}"));
    for (a, arrow) in q.arrows().iter().enumerate() {
        let (t, p) = parse_corner_label(&arrow.label)?;
        let (t2, p2) = parse_corner_label(&q.arrow(f.arrow_map[a]).label)?;
        let rot = (p2 + 3 - p) % 3;
        if triangle_map[t] == usize::MAX {
            triangle_map[t] = t2;
            rotation[t] = rot;
        } else if triangle_map[t] != t2 || rotation[t] != rot {
            return Err(bad(format!("arrows of triangle {t} split")));
        }
    }
    let taken: Vec<bool> = {
        let mut v = vec![false; nt];
        for &t in triangle_map.iter().filter(|&&t| t != usize::MAX) {
            v[t] = true;
        }
        v
    };
    let mut taken = taken;
    // Triangles without arrows carry exactly one arc.
    for t in 0..nt {
        if triangle_map[t] != usize::MAX {
            continue;
        }
        let tri = s.triangles()[t];
        let arcs: Vec<usize> = (0..3).filter(|&p| s.is_arc(tri[p])).collect();
        let [p] = arcs[..] else {
            return Err(bad(format!("triangle {t} has no arrows and {} arcs", arcs.len())));
        };
        let e = tri[p];
        let fe = f.vertex_map[e];
        let slot = s
            .slots(fe)
            .iter()
            .copied()
            .find(|&(t2, _)| !taken[t2] && s.triangles()[t2].iter().filter(|&&x| s.is_arc(x)).count() == 1)
            .ok_or_else(|| bad(format!("no free corner triangle at arc {}", s.label(fe))))?;
        triangle_map[t] = slot.0;
        rotation[t] = (slot.1 + 3 - p as u8) % 3;
        taken[slot.0] = true;
    }
    let ne = s.edge_count();
    let mut edge_map = vec![usize::MAX; ne];
    for t in 0..nt {
        for p in 0..3u8 {
            let e = s.triangles()[t][p as usize];
            let img = s.triangles()[triangle_map[t]][((p + rotation[t]) % 3) as usize];
            if s.is_arc(e) {
                if img != f.vertex_map[e] {
                    return Err(bad(format!("arc {} lands on {}", s.label(e), s.label(img))));
                }
            } else if s.is_arc(img) {
                return Err(bad(format!("segment {} lands on arc {}", s.label(e), s.label(img))));
            }
            if edge_map[e] != usize::MAX && edge_map[e] != img {
                return Err(bad(format!("edge {} has two images", s.label(e))));
            }
            edge_map[e] = img;
        }
    }
    if !is_permutation(&triangle_map) || !is_permutation(&edge_map) {
        return Err(bad("not a bijection".into()));
    }
    let mut map = SurfaceMap {
        triangle_map,
        rotation,
        edge_map,
        boundary_component_map: vec![usize::MAX; s.boundaries().len()],
        vertex_orbit_map: vec![usize::MAX; s.orbits().len()],
    };
    for t in 0..nt {
        for p in 0..3u8 {
            let c = Corner { triangle: t, position: p };
            let img = map.map_corner(c);
            let (o, o2) = (s.orbit_of(c), s.orbit_of(img));
            if map.vertex_orbit_map[o] != usize::MAX && map.vertex_orbit_map[o] != o2 {
                return Err(bad(format!("marked point {o} has two images")));
            }
            map.vertex_orbit_map[o] = o2;
            let (b, b2) = (s.boundary_of(c), s.boundary_of(img));
            if map.boundary_component_map[b] != usize::MAX && map.boundary_component_map[b] != b2 {
                return Err(bad(format!("boundary component {b} has two images")));
            }
            map.boundary_component_map[b] = b2;
        }
    }
    if !is_permutation(&map.vertex_orbit_map) || !is_permutation(&map.boundary_component_map) {
        return Err(bad("marked points or boundary components not permuted".into()));
    }
    // Boundary successor structure.
    for b in s.boundaries() {
        let segs = &b.segments;
        for k in 0..segs.len() {
            let (x, y) = (segs[k], segs[(k + 1) % segs.len()]);
            let img_b = &s.boundaries()[map.boundary_component_map[b.id]].segments;
            let pos = img_b.iter().position(|&z| z == map.edge_map[x]);
            let ok = pos.is_some_and(|i| img_b[(i + 1) % img_b.len()] == map.edge_map[y]);
            if !ok {
                return Err(bad(format!("boundary order broken at segment {}", s.label(x))));
            }
        }
    }
    Ok(map)
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&x| x < v.len() && !std::mem::replace(&mut seen[x], true))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// (χ1, χ2) themselves.
    Identity,
    /// (f(χ1), χ2).
    ImageOfFirst,
    /// (χ1, f(χ2)).
    ImageOfSecond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub automorphism: QuiverAutomorphism,
    pub direction: Direction,
    /// The equi-distributed pair actually certified.
    pub pair: (AdmissibleCut, AdmissibleCut),
    pub labeling: LevelLabeling,
    pub tilting: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriedAutomorphism {
    pub vertex_map: Vec<String>,
    pub image_of_first: Option<Vec<usize>>,
    pub image_of_second: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NotFound {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub tried: Vec<TriedAutomorphism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateOutcome {
    Found(Box<EquivalenceCertificate>),
    NotFound(NotFound),
}

impl CertificateOutcome {
    pub fn certificate(&self) -> Option<&EquivalenceCertificate> {
        match self {
            CertificateOutcome::Found(c) => Some(c),
            CertificateOutcome::NotFound(_) => None,
        }
    }
}

fn certify(
    s: &TriangulatedSurface,
    a: &AdmissibleCut,
    b: &AdmissibleCut,
) -> Result<Option<LevelLabeling>> {
    if !equidistributed(s, a, b) {
        return Ok(None);
    }
    Ok(solve_levels(&weight_of_cut(s, a), &weight_of_cut(s, b))?.ok())
}

/// Looks for an automorphism f with (f(χ1), χ2) or (χ1, f(χ2)) equi-distributed.
/// Genus 0 only.
pub fn derived_equivalence_certificate(
    s: &TriangulatedSurface,
    c1: &AdmissibleCut,
    c2: &AdmissibleCut,
) -> Result<CertificateOutcome> {
    if s.genus() != 0 {
        return Err(Error::Unsupported(format!("genus {} surface; certificates need genus 0", s.genus())));
    }
    let q = quiver_of(s);
    let internal = s.internal_triangles();
    for c in [c1, c2] {
        if c.len() != internal.len() || c.corners().any(|k| !internal.contains(&k.triangle)) {
            return Err(Error::InvalidCut("cut does not belong to this surface".into()));
        }
    }
    let autos = quiver_automorphisms(&q);
    let mut tried = Vec::new();
    for f in &autos {
        let make = |direction, pair: (AdmissibleCut, AdmissibleCut), labeling: LevelLabeling| {
            let tilting = tilting_data(&labeling);
            CertificateOutcome::Found(Box::new(EquivalenceCertificate {
                automorphism: f.clone(),
                direction,
                pair,
                labeling,
                tilting,
            }))
        };
        if f.is_identity() {
            if let Some(l) = certify(s, c1, c2)? {
                return Ok(make(Direction::Identity, (c1.clone(), c2.clone()), l));
            }
            continue;
        }
        let fc1 = act_on_cut(s, f, c1)?;
        if let Some(l) = certify(s, &fc1, c2)? {
            return Ok(make(Direction::ImageOfFirst, (fc1, c2.clone()), l));
        }
        let fc2 = act_on_cut(s, f, c2)?;
        if let Some(l) = certify(s, c1, &fc2)? {
            return Ok(make(Direction::ImageOfSecond, (c1.clone(), fc2), l));
        }
        tried.push(TriedAutomorphism {
            vertex_map: f.vertex_map.iter().map(|&v| q.vertices()[v].clone()).collect(),
            image_of_first: Some(distribution(s, &fc1).counts),
            image_of_second: Some(distribution(s, &fc2).counts),
        });
    }
    Ok(CertificateOutcome::NotFound(NotFound {
        first: distribution(s, c1).counts,
        second: distribution(s, c2).counts,
        tried,
    }))
}

impl EquivalenceCertificate {
    /// Re-checks equi-distribution of the recorded pair and the labeling constraints.
    pub fn verify(&self, s: &TriangulatedSurface) -> bool {
        let (a, b) = &self.pair;
        let q = quiver_of(s);
        self.automorphism.is_valid_for(&q)
            && equidistributed(s, a, b)
            && self.labeling.satisfies(&weight_of_cut(s, a), &weight_of_cut(s, b))
    }

    pub fn distribution_pair(&self, s: &TriangulatedSurface) -> (CutDistribution, CutDistribution) {
        (distribution(s, &self.pair.0), distribution(s, &self.pair.1))
    }
}

/// Arrow label of the image of corner arrow `(t, p)` under `f`, when that arrow exists.
pub fn image_label(q: &QuiverWithRelations, f: &QuiverAutomorphism, t: usize, p: u8) -> Option<String> {
    q.quiver.arrow_by_label(&corner_label(t, p)).map(|a| q.arrow(f.arrow_map[a]).label.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pair_cut, surface};

    fn brute_force(q: &QuiverWithRelations) -> Vec<Vec<usize>> {
        // Only for quivers without parallel arrows.
        let n = q.vertices().len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut out = Vec::new();
        loop {
            let mut amap = Vec::new();
            let ok = q.arrows().iter().all(|a| {
                let hit = q
                    .arrows()
                    .iter()
                    .position(|b| b.source == perm[a.source] && b.target == perm[a.target]);
                hit.map(|h| amap.push(h)).is_some()
            });
            if ok && is_isomorphism(q, q, &QuiverAutomorphism { vertex_map: perm.clone(), arrow_map: amap }) {
                out.push(perm.clone());
            }
            // next permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        out.sort();
        out
    }

    #[test]
    fn figure1_matches_brute_force() {
        let q = quiver_of(&surface("figure1"));
        let mut found: Vec<Vec<usize>> = quiver_automorphisms(&q).into_iter().map(|f| f.vertex_map).collect();
        found.sort();
        assert_eq!(found, brute_force(&q));
    }

    #[test]
    fn annulus_rotation() {
        let s = surface("annulus42");
        let q = quiver_of(&s);
        let autos = quiver_automorphisms(&q);
        assert!(autos[0].is_identity());
        let rot = autos
            .iter()
            .find(|f| {
                let d: Vec<(String, String)> = f.describe(&q);
                let want = [("2", "8"), ("3", "7"), ("4", "6"), ("6", "4"), ("7", "3"), ("8", "2")];
                d.len() == 6 && want.iter().all(|(a, b)| d.contains(&(a.to_string(), b.to_string())))
            })
            .expect("rotation present");
        let m = induced_surface_map(&s, rot).unwrap();
        assert_eq!(m.boundary_component_map, vec![1, 0]);
        let c1 = pair_cut(&s, &[("1", "2"), ("7", "1")]).unwrap();
        let c2 = pair_cut(&s, &[("8", "7"), ("3", "1")]).unwrap();
        let mut d1 = distribution(&s, &c1).counts;
        d1.sort();
        assert_eq!(d1, vec![0, 2]);
        assert_eq!(distribution(&s, &act_on_cut(&s, rot, &c1).unwrap()), distribution(&s, &c2));
        let out = derived_equivalence_certificate(&s, &c1, &c2).unwrap();
        let cert = out.certificate().expect("certificate");
        assert!(!cert.automorphism.is_identity());
        assert_eq!(cert.direction, Direction::ImageOfFirst);
        assert!(cert.verify(&s));
        assert!(!equidistributed(&s, &c1, &c2));
    }

    #[test]
    fn identity_maps() {
        for name in ["figure1", "pants", "annulus42", "torus", "octagon"] {
            let s = surface(name);
            let q = quiver_of(&s);
            let id = QuiverAutomorphism::identity(&q);
            let m = induced_surface_map(&s, &id).unwrap();
            assert!(m.triangle_map.iter().enumerate().all(|(i, &j)| i == j), "{name}");
            assert!(m.rotation.iter().all(|&r| r == 0));
        }
    }

    #[test]
    fn pants_certificate_via_identity() {
        let s = surface("pants");
        let c1 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("11", "2"), ("12", "1"), ("5", "7"), ("13", "3"), ("12", "14"), ("16", "17")]).unwrap();
        let c2 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("2", "1"), ("3", "12"), ("5", "7"), ("6", "13"), ("12", "14"), ("17", "18")]).unwrap();
        let out = derived_equivalence_certificate(&s, &c1, &c2).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.direction, Direction::Identity);
        let same = derived_equivalence_certificate(&s, &c1, &c1).unwrap();
        assert!(same.certificate().unwrap().tilting.iter().all(|(_, r)| *r == 0));
    }

    #[test]
    fn torus_refused() {
        let s = surface("torus");
        let c = crate::cuts::enumerate_cuts(&s).unwrap().remove(0);
        assert!(matches!(derived_equivalence_certificate(&s, &c, &c), Err(Error::Unsupported(_))));
    }
}

//! Reflections and coreflections of gentle quivers with relations, and their
//! realization by mutation plus a new admissible cut.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cuts::AdmissibleCut;
use crate::equivalence::isomorphisms;
use crate::error::{Error, Result};
use crate::quiver::{apply_cut, is_gentle, mutate, quiver_of, Arrow, Quiver, QuiverWithRelations};
use crate::surface::TriangulatedSurface;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Reflect,
    Coreflect,
}

impl MoveKind {
    pub fn inverse(self) -> MoveKind {
        match self {
            MoveKind::Reflect => MoveKind::Coreflect,
            MoveKind::Coreflect => MoveKind::Reflect,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ReflectionMove {
    pub vertex: usize,
    pub kind: MoveKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionCheck {
    pub defined: bool,
    pub reason: Option<String>,
    /// Some relation αβ has s(α) = i.
    pub source_of_relation: bool,
    /// Some relation αβ has t(β) = i.
    pub target_of_relation: bool,
}

fn require_gentle(q: &QuiverWithRelations) -> Result<()> {
    let g = is_gentle(q);
    if g.pass {
        return Ok(());
    }
    let v = &g.violations[0];
    Err(Error::Precondition(format!("quiver is not gentle (condition {}: {})", v.condition, v.witness)))
}

fn relation_flags(q: &QuiverWithRelations, i: usize) -> (bool, bool) {
    let src = q.relations.iter().any(|&(a, _)| q.arrow(a).source == i);
    let tgt = q.relations.iter().any(|&(_, b)| q.arrow(b).target == i);
    (src, tgt)
}

/// The arrow β with t(β) = i and βα ∉ I, for each α starting at i.
fn predecessors(q: &QuiverWithRelations, i: usize) -> std::result::Result<BTreeMap<usize, usize>, String> {
    let mut out = BTreeMap::new();
    for a in q.out_arrows(i) {
        let found: Vec<usize> = q.in_arrows(i).filter(|&b| !q.is_relation(b, a)).collect();
        match found.as_slice() {
            [b] => {
                out.insert(a, *b);
            }
            [] => return Err(format!("arrow {} has no predecessor outside I", q.arrow(a).label)),
            _ => return Err(format!("arrow {} has several predecessors outside I", q.arrow(a).label)),
        }
    }
    Ok(out)
}

/// The arrow β with s(β) = i and αβ ∉ I, for each α ending at i.
fn successors(q: &QuiverWithRelations, i: usize) -> std::result::Result<BTreeMap<usize, usize>, String> {
    let mut out = BTreeMap::new();
    for a in q.in_arrows(i) {
        let found: Vec<usize> = q.out_arrows(i).filter(|&b| !q.is_relation(a, b)).collect();
        match found.as_slice() {
            [b] => {
                out.insert(a, *b);
            }
            [] => return Err(format!("arrow {} has no successor outside I", q.arrow(a).label)),
            _ => return Err(format!("arrow {} has several successors outside I", q.arrow(a).label)),
        }
    }
    Ok(out)
}

fn check(q: &QuiverWithRelations, i: usize, kind: MoveKind) -> Result<ReflectionCheck> {
    if i >= q.vertices().len() {
        return Err(Error::UnknownVertex(i.to_string()));
    }
    require_gentle(q)?;
    let (source_of_relation, target_of_relation) = relation_flags(q, i);
    let mut reason = None;
    if q.arrows().iter().any(|a| a.source == i && a.target == i) {
        reason = Some("loop at the vertex".to_string());
    } else {
        let r = match kind {
            MoveKind::Reflect => predecessors(q, i),
            MoveKind::Coreflect => successors(q, i),
        };
        if let Err(e) = r {
            reason = Some(e);
        }
    }
    Ok(ReflectionCheck { defined: reason.is_none(), reason, source_of_relation, target_of_relation })
}

pub fn reflection_defined(q: &QuiverWithRelations, i: usize) -> Result<ReflectionCheck> {
    check(q, i, MoveKind::Reflect)
}

pub fn coreflection_defined(q: &QuiverWithRelations, i: usize) -> Result<ReflectionCheck> {
    check(q, i, MoveKind::Coreflect)
}

pub fn move_defined(q: &QuiverWithRelations, m: ReflectionMove) -> Result<ReflectionCheck> {
    check(q, m.vertex, m.kind)
}

fn rebuild(q: &QuiverWithRelations, ends: Vec<(usize, usize)>, relations: Vec<(usize, usize)>) -> Result<QuiverWithRelations> {
    let arrows = q
        .arrows()
        .iter()
        .zip(ends)
        .map(|(a, (source, target))| Arrow { label: a.label.clone(), source, target })
        .collect();
    let mut out = QuiverWithRelations { quiver: Quiver { vertices: q.quiver.vertices.clone(), arrows }, relations };
    out.normalize();
    for &(a, b) in &out.relations {
        if out.arrow(a).target != out.arrow(b).source {
            return Err(Error::Inconsistent(format!(
                "relation ({}, {}) is not composable after the move",
                out.arrow(a).label,
                out.arrow(b).label
            )));
        }
    }
    Ok(out)
}

/// R_i: arrows keep their ids, only endpoints and relations change.
pub fn reflect(q: &QuiverWithRelations, i: usize) -> Result<QuiverWithRelations> {
    let c = reflection_defined(q, i)?;
    if let Some(r) = c.reason {
        return Err(Error::Precondition(format!("reflection at {} undefined: {r}", q.vertices()[i])));
    }
    reflect_core(q, i)
}

fn has_loop(q: &QuiverWithRelations, i: usize) -> Result<()> {
    if q.arrows().iter().any(|a| a.source == i && a.target == i) {
        return Err(Error::Precondition(format!("loop at {}", q.vertices()[i])));
    }
    Ok(())
}

fn reflect_core(q: &QuiverWithRelations, i: usize) -> Result<QuiverWithRelations> {
    has_loop(q, i)?;
    let beta = predecessors(q, i).map_err(Error::Precondition)?;
    let arrows = q.arrows();
    let ends = (0..arrows.len())
        .map(|a| {
            let x = &arrows[a];
            let s = if x.target == i {
                i
            } else if x.source == i {
                arrows[beta[&a]].source
            } else {
                x.source
            };
            let t = if x.target == i {
                x.source
            } else if q.relations.iter().any(|&(p, b)| p == a && arrows[b].target == i) {
                i
            } else {
                x.target
            };
            (s, t)
        })
        .collect();
    let mut rel = Vec::new();
    // I1
    for a in q.in_arrows(i) {
        for &(b, g) in &q.relations {
            if g != a && arrows[g].target == i {
                rel.push((b, a));
            }
        }
    }
    // I2
    rel.extend(q.relations.iter().copied().filter(|&(_, b)| arrows[b].target != i && arrows[b].source != i));
    // I3
    rel.extend(beta.iter().map(|(&a, &b)| (b, a)));
    rebuild(q, ends, rel)
}

/// R_i⁻, the dual of [`reflect`].
pub fn coreflect(q: &QuiverWithRelations, i: usize) -> Result<QuiverWithRelations> {
    let c = coreflection_defined(q, i)?;
    if let Some(r) = c.reason {
        return Err(Error::Precondition(format!("coreflection at {} undefined: {r}", q.vertices()[i])));
    }
    coreflect_core(q, i)
}

fn coreflect_core(q: &QuiverWithRelations, i: usize) -> Result<QuiverWithRelations> {
    has_loop(q, i)?;
    let beta = successors(q, i).map_err(Error::Precondition)?;
    let arrows = q.arrows();
    let ends = (0..arrows.len())
        .map(|a| {
            let x = &arrows[a];
            let s = if x.source == i {
                x.target
            } else if q.relations.iter().any(|&(b, p)| p == a && arrows[b].source == i) {
                i
            } else {
                x.source
            };
            let t = if x.source == i {
                i
            } else if x.target == i {
                arrows[beta[&a]].target
            } else {
                x.target
            };
            (s, t)
        })
        .collect();
    let mut rel = Vec::new();
    // I1
    for a in q.out_arrows(i) {
        for &(g, b) in &q.relations {
            if g != a && arrows[g].source == i {
                rel.push((a, b));
            }
        }
    }
    // I2, dual form: relations whose first arrow avoids i.
    rel.extend(q.relations.iter().copied().filter(|&(a, _)| arrows[a].source != i && arrows[a].target != i));
    // I3
    rel.extend(beta.iter().map(|(&a, &b)| (a, b)));
    rebuild(q, ends, rel)
}

pub fn apply_move(q: &QuiverWithRelations, m: ReflectionMove) -> Result<QuiverWithRelations> {
    match m.kind {
        MoveKind::Reflect => reflect(q, m.vertex),
        MoveKind::Coreflect => coreflect(q, m.vertex),
    }
}

#[derive(Clone, Debug)]
pub struct DictWitness {
    /// μ_i of Q_T, which equals the quiver of the flipped triangulation.
    pub mutated_base: Quiver,
    pub flipped: TriangulatedSurface,
    pub cut: AdmissibleCut,
    pub matched: QuiverWithRelations,
}

#[derive(Clone, Debug)]
pub enum DictOutcome {
    Witness(Box<DictWitness>),
    CounterExample { reflected: QuiverWithRelations, cuts_examined: usize },
}

impl DictOutcome {
    pub fn witness(&self) -> Option<&DictWitness> {
        match self {
            DictOutcome::Witness(w) => Some(w),
            DictOutcome::CounterExample { .. } => None,
        }
    }
}

/// Shape of a quiver near i, read in the direction of the move: for a coreflection
/// arrows and relations are reversed first, so both kinds share one table.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocalConfiguration {
    pub ins: usize,
    pub outs: usize,
    /// Relations αβ with t(α) = i.
    pub through: usize,
    /// Relations αβ with t(β) = i.
    pub ending: usize,
    /// Two arrows at i share their other endpoint.
    pub double_arrow: bool,
}

impl LocalConfiguration {
    /// The ten shapes at which the dictionary theorem applies: the three with i a
    /// source of arrows and no relation ending at i, the two relation-free sinks, the
    /// three sinks ending a relation, and the two remaining mixed ones.
    pub const DICTIONARY: [(usize, usize, usize, usize); 10] = [
        (2, 2, 2, 0),
        (2, 1, 1, 0),
        (1, 1, 0, 0),
        (1, 0, 0, 0),
        (2, 0, 0, 0),
        (1, 0, 0, 1),
        (2, 0, 0, 1),
        (2, 0, 0, 2),
        (1, 1, 0, 1),
        (2, 1, 1, 1),
    ];

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.ins, self.outs, self.through, self.ending)
    }
}

pub fn local_configuration(q: &QuiverWithRelations, i: usize, kind: MoveKind) -> LocalConfiguration {
    let arrows = q.arrows();
    // (tail, head) of each arrow and each relation, reversed for coreflections
    let forward = kind == MoveKind::Reflect;
    let end = |a: usize| if forward { (arrows[a].source, arrows[a].target) } else { (arrows[a].target, arrows[a].source) };
    let rels: Vec<(usize, usize)> = q.relations.iter().map(|&(a, b)| if forward { (a, b) } else { (b, a) }).collect();
    let ins = (0..arrows.len()).filter(|&a| end(a).1 == i).count();
    let outs = (0..arrows.len()).filter(|&a| end(a).0 == i).count();
    let through = rels.iter().filter(|&&(a, _)| end(a).1 == i).count();
    let ending = rels.iter().filter(|&&(_, b)| end(b).1 == i).count();
    let mut others: Vec<usize> = arrows
        .iter()
        .filter(|a| a.source == i || a.target == i)
        .map(|a| if a.source == i { a.target } else { a.source })
        .collect();
    let n = others.len();
    others.sort_unstable();
    others.dedup();
    LocalConfiguration { ins, outs, through, ending, double_arrow: others.len() < n }
}

/// Whether the dictionary theorem applies to (c, i, kind).
pub fn dict_eligible(s: &TriangulatedSurface, c: &AdmissibleCut, i: usize, kind: MoveKind) -> Result<bool> {
    let q = apply_cut(s, c);
    let chk = check(&q, i, kind)?;
    let blocked = match kind {
        MoveKind::Reflect => chk.source_of_relation,
        MoveKind::Coreflect => chk.target_of_relation,
    };
    Ok(chk.defined && !blocked)
}

/// Flips arc i and looks for an admissible cut of the flipped triangulation whose cut
/// quiver equals R_i (or R_i⁻) of the cut quiver of c.
pub fn dict_check(
    s: &TriangulatedSurface,
    c: &AdmissibleCut,
    i: usize,
    kind: MoveKind,
    relaxed_iso: bool,
) -> Result<DictOutcome> {
    let q = apply_cut(s, c);
    let chk = check(&q, i, kind)?;
    if let Some(r) = chk.reason {
        return Err(Error::Precondition(r));
    }
    match kind {
        MoveKind::Reflect if chk.source_of_relation => {
            return Err(Error::Precondition(format!("{} is the source of a relation", q.vertices()[i])))
        }
        MoveKind::Coreflect if chk.target_of_relation => {
            return Err(Error::Precondition(format!("{} is the target of a relation", q.vertices()[i])))
        }
        _ => {}
    }
    let reflected = apply_move(&q, ReflectionMove { vertex: i, kind })?;
    let flipped = s.flip(s.label(i))?;
    let mutated_base = mutate(&quiver_of(s).quiver, i)?;
    let base = quiver_of(&flipped);
    if !base.quiver.same_arrows(&mutated_base) {
        return Err(Error::Inconsistent("flip does not realize mutation".into()));
    }
    let internal = flipped.internal_triangles();
    let mut candidates: Vec<Vec<u8>> = Vec::with_capacity(internal.len());
    if relaxed_iso {
        candidates = vec![vec![0, 1, 2]; internal.len()];
    } else {
        // Removed arrows must make up the multiset difference base − reflected.
        let mut surplus: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for a in base.arrows() {
            *surplus.entry((a.source, a.target)).or_default() += 1;
        }
        for a in reflected.arrows() {
            *surplus.entry((a.source, a.target)).or_default() -= 1;
        }
        if surplus.values().any(|&v| v < 0) || surplus.values().sum::<i64>() != internal.len() as i64 {
            return Ok(DictOutcome::CounterExample { reflected, cuts_examined: 0 });
        }
        for &t in &internal {
            let tri = flipped.triangles()[t];
            let opts: Vec<u8> = (0..3u8)
                .filter(|&p| surplus.get(&(tri[p as usize], tri[((p + 1) % 3) as usize])).is_some_and(|&v| v > 0))
                .collect();
            candidates.push(opts);
        }
    }
    let mut examined = 0;
    let mut choice = vec![0usize; internal.len()];
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(DictOutcome::CounterExample { reflected, cuts_examined: 0 });
    }
    let reflected_key = reflected.canonical_key();
    loop {
        let cut = AdmissibleCut::new(&flipped, internal.iter().zip(&choice).map(|(&t, &k)| (t, candidates_at(&candidates, t, &internal, k))))?;
        examined += 1;
        let cq = apply_cut(&flipped, &cut);
        let hit = if relaxed_iso {
            !isomorphisms(&cq, &reflected, Some(1)).is_empty()
        } else {
            cq.canonical_key() == reflected_key
        };
        if hit {
            return Ok(DictOutcome::Witness(Box::new(DictWitness { mutated_base, flipped, cut, matched: cq })));
        }
        // odometer, last triangle fastest
        let mut k = internal.len();
        loop {
            if k == 0 {
                return Ok(DictOutcome::CounterExample { reflected, cuts_examined: examined });
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn candidates_at(candidates: &[Vec<u8>], t: usize, internal: &[usize], k: usize) -> u8 {
    let idx = internal.iter().position(|&x| x == t).unwrap();
    candidates[idx][k]
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistDirection {
    Cw,
    Ccw,
}

impl TwistDirection {
    pub fn kind(self) -> MoveKind {
        match self {
            TwistDirection::Cw => MoveKind::Reflect,
            TwistDirection::Ccw => MoveKind::Coreflect,
        }
    }
}

/// Flips `arc` and carries the cut along, so that the new cut quiver is the
/// (co)reflection of the old one.
///
/// With the quadrilateral P S Q R (counterclockwise, the arc running from P to Q), the
/// new triangles are (y, z, e) with corners P S R and (w, x, e) with corners Q R S. A
/// cut at P or Q stays there when its new triangle is internal; otherwise the new
/// internal triangle is cut at the point the twist moves the arc's endpoint to
/// (P↦R, Q↦S clockwise, P↦S, Q↦R counterclockwise).
pub fn twist(
    s: &TriangulatedSurface,
    c: &AdmissibleCut,
    arc: &str,
    direction: TwistDirection,
) -> Result<(TriangulatedSurface, AdmissibleCut)> {
    let i = s.arc_index(arc)?;
    if !dict_eligible(s, c, i, direction.kind())? {
        return Err(Error::Precondition(format!(
            "{:?} at {arc} is not a dictionary move for this cut",
            direction.kind()
        )));
    }
    let flipped = s.flip(arc)?;
    let (t1, p1) = s.slots(i)[0];
    let (t2, p2) = s.slots(i)[1];
    // rotated corner k of t1 is Q, R, P; of t2 is P, S, Q
    let rot1 = c.corner_in(t1).map(|p| (p + 3 - p1) % 3);
    let rot2 = c.corner_in(t2).map(|p| (p + 3 - p2) % 3);
    let at_p = rot1 == Some(2) || rot2 == Some(0);
    let at_q = rot1 == Some(0) || rot2 == Some(2);
    let default = match direction {
        TwistDirection::Cw => 1,
        TwistDirection::Ccw => 2,
    };
    let mut choices: Vec<(usize, u8)> = c.corners().filter(|k| k.triangle != t1 && k.triangle != t2).map(|k| (k.triangle, k.position)).collect();
    let internal = flipped.internal_triangles();
    if internal.contains(&t1) {
        choices.push((t1, if at_p { 0 } else { default }));
    }
    if internal.contains(&t2) {
        choices.push((t2, if at_q { 0 } else { default }));
    }
    let cut = AdmissibleCut::new(&flipped, choices)?;
    Ok((flipped, cut))
}

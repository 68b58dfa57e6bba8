//! Reflection plans between equi-distributed cuts of an annulus.

mod compact;

use rustc_hash::FxHashMap as HashMap;

use compact::State;

use serde::Serialize;

use crate::cuts::{equidistributed, AdmissibleCut};
use crate::error::{Error, Result};
use crate::moves::{apply_move, move_defined, MoveKind, ReflectionMove};
use crate::quiver::{apply_cut, QuiverWithRelations};
use crate::surface::TriangulatedSurface;

pub fn is_annulus(s: &TriangulatedSurface) -> bool {
    s.genus() == 0 && s.boundaries().len() == 2
}

fn require_annulus(s: &TriangulatedSurface) -> Result<()> {
    if is_annulus(s) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "not an annulus (genus {}, {} boundary components)",
            s.genus(),
            s.boundaries().len()
        )))
    }
}

/// Internal triangles whose local cuts sit on different boundary components.
pub fn diff_set(s: &TriangulatedSurface, c1: &AdmissibleCut, c2: &AdmissibleCut) -> Result<Vec<usize>> {
    require_annulus(s)?;
    let mut out = Vec::new();
    for a in c1.corners() {
        let p = c2
            .corner_in(a.triangle)
            .ok_or_else(|| Error::InvalidCut(format!("triangle {} missing from second cut", a.triangle)))?;
        let b = crate::surface::Corner { triangle: a.triangle, position: p };
        if s.boundary_of(a) != s.boundary_of(b) {
            out.push(a.triangle);
        }
    }
    Ok(out)
}

pub fn default_depth(diff: usize) -> usize {
    4 * diff + 8
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub depth_limit: usize,
    pub forward_states: usize,
    pub backward_states: usize,
    /// Moves whose result failed the gentle conditions (never expected).
    pub non_gentle: usize,
    pub budget_exhausted: bool,
    /// Legs of the intermediate-cut chain when the direct search was abandoned.
    pub legs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionPlan {
    pub moves: Vec<ReflectionMove>,
    pub diff: Vec<usize>,
    pub certified_end: QuiverWithRelations,
    pub stats: SearchStats,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanOutcome {
    Plan(ReflectionPlan),
    NotFound(SearchStats),
}

impl PlanOutcome {
    pub fn plan(&self) -> Option<&ReflectionPlan> {
        match self {
            PlanOutcome::Plan(p) => Some(p),
            PlanOutcome::NotFound(_) => None,
        }
    }
}

struct Node {
    state: State,
    parent: usize,
    via: Option<ReflectionMove>,
    depth: usize,
}

struct Side {
    nodes: Vec<Node>,
    index: HashMap<Vec<u16>, usize>,
    frontier: Vec<usize>,
}

impl Side {
    fn new(root: State) -> Side {
        let mut index = HashMap::default();
        index.insert(root.key(), 0);
        Side { nodes: vec![Node { state: root, parent: usize::MAX, via: None, depth: 0 }], index, frontier: vec![0] }
    }

    /// Moves from the root to node `k`.
    fn path(&self, mut k: usize) -> Vec<ReflectionMove> {
        let mut out = Vec::new();
        while let Some(m) = self.nodes[k].via {
            out.push(m);
            k = self.nodes[k].parent;
        }
        out.reverse();
        out
    }
}

fn all_moves(n: usize) -> Vec<ReflectionMove> {
    (0..n)
        .flat_map(|v| [MoveKind::Reflect, MoveKind::Coreflect].map(|kind| ReflectionMove { vertex: v, kind }))
        .collect()
}

fn gentle(r: &State, stats: &mut SearchStats) -> bool {
    let ok = r.is_gentle();
    if !ok {
        stats.non_gentle += 1;
    }
    ok
}

/// Bidirectional breadth-first search over (co)reflections. The backward side applies
/// inverse moves to the target and keeps an edge only when the forward move replays it.
pub fn search(
    start: &QuiverWithRelations,
    target: &QuiverWithRelations,
    depth_limit: usize,
    max_states: usize,
) -> (Option<Vec<ReflectionMove>>, SearchStats) {
    search_at(start, target, depth_limit, max_states, &all_moves(start.vertices().len()))
}

/// [`search`] restricted to the given moves.
pub fn search_at(
    start: &QuiverWithRelations,
    target: &QuiverWithRelations,
    depth_limit: usize,
    max_states: usize,
    moves: &[ReflectionMove],
) -> (Option<Vec<ReflectionMove>>, SearchStats) {
    let mut stats = SearchStats { depth_limit, ..Default::default() };
    let mut fwd = Side::new(State::of(start));
    let mut bwd = Side::new(State::of(target));
    if fwd.nodes[0].state.key() == bwd.nodes[0].state.key() {
        return (Some(Vec::new()), stats);
    }
    let (mut df, mut db) = (0usize, 0usize);
    while df + db < depth_limit && !(fwd.frontier.is_empty() && bwd.frontier.is_empty()) {
        let forward = !fwd.frontier.is_empty() && (bwd.frontier.is_empty() || fwd.frontier.len() <= bwd.frontier.len());
        let mut best: Option<Vec<ReflectionMove>> = None;
        let mut consider = |plan: Vec<ReflectionMove>| {
            if best.as_ref().is_none_or(|b| (plan.len(), &plan) < (b.len(), b)) {
                best = Some(plan);
            }
        };
        if forward {
            let frontier = std::mem::take(&mut fwd.frontier);
            for k in frontier {
                for &m in moves {
                    let Some(r) = fwd.nodes[k].state.apply(m) else { continue };
                    let key = r.key();
                    // states on the other side already passed the gentle check
                    if let Some(&b) = bwd.index.get(&key) {
                        let mut plan = fwd.path(k);
                        plan.push(m);
                        plan.extend(bwd.path(b).into_iter().rev());
                        consider(plan);
                    }
                    if fwd.nodes.len() + bwd.nodes.len() > max_states {
                        stats.budget_exhausted = true;
                        break;
                    }
                    if !fwd.index.contains_key(&key) && gentle(&r, &mut stats) {
                        let d = fwd.nodes[k].depth + 1;
                        fwd.index.insert(key, fwd.nodes.len());
                        fwd.frontier.push(fwd.nodes.len());
                        fwd.nodes.push(Node { state: r, parent: k, via: Some(m), depth: d });
                    }
                }
            }
            df += 1;
        } else {
            let frontier = std::mem::take(&mut bwd.frontier);
            for k in frontier {
                let here = bwd.nodes[k].state.clone();
                let here_key = here.key();
                for &m in moves {
                    let back = ReflectionMove { vertex: m.vertex, kind: m.kind.inverse() };
                    let Some(prev) = here.apply(back) else { continue };
                    match prev.apply(m) {
                        Some(again) if again.key() == here_key => {}
                        _ => continue,
                    }
                    let key = prev.key();
                    if let Some(&f) = fwd.index.get(&key) {
                        let mut plan = fwd.path(f);
                        plan.push(m);
                        plan.extend(bwd.path(k).into_iter().rev());
                        consider(plan);
                    }
                    if fwd.nodes.len() + bwd.nodes.len() > max_states {
                        stats.budget_exhausted = true;
                        break;
                    }
                    if !bwd.index.contains_key(&key) && gentle(&prev, &mut stats) {
                        let d = bwd.nodes[k].depth + 1;
                        bwd.index.insert(key, bwd.nodes.len());
                        bwd.frontier.push(bwd.nodes.len());
                        bwd.nodes.push(Node { state: prev, parent: k, via: Some(m), depth: d });
                    }
                }
            }
            db += 1;
        }
        stats.forward_states = fwd.nodes.len();
        stats.backward_states = bwd.nodes.len();
        if let Some(plan) = best {
            return (Some(plan), stats);
        }
        if stats.budget_exhausted {
            break;
        }
    }
    (None, stats)
}

/// State budget for the direct search before falling back to a chain of intermediate cuts.
pub const DIRECT_BUDGET: usize = 100_000;

/// Plans a sequence of (co)reflections from the cut quiver of c1 to that of c2.
/// `depth_limit = None` uses 4·|D| + 8 and retries once at twice that depth.
///
/// A direct bidirectional search runs first. When it exhausts its state budget, the
/// plan is assembled from legs between intermediate cuts of the same triangulation,
/// each leg changing one triangle on the same boundary or swapping one pair of D.
pub fn plan_reflections(
    s: &TriangulatedSurface,
    c1: &AdmissibleCut,
    c2: &AdmissibleCut,
    depth_limit: Option<usize>,
) -> Result<PlanOutcome> {
    require_annulus(s)?;
    if !equidistributed(s, c1, c2) {
        return Err(Error::Precondition("cuts are not equi-distributed".into()));
    }
    let diff = diff_set(s, c1, c2)?;
    let start = apply_cut(s, c1);
    let target = apply_cut(s, c2);
    let mut warnings = Vec::new();
    let mut limits = vec![depth_limit.unwrap_or_else(|| default_depth(diff.len()))];
    if depth_limit.is_none() {
        limits.push(2 * limits[0]);
    }
    let mut last = SearchStats::default();
    let mut chained: Option<(Vec<ReflectionMove>, SearchStats)> = None;
    let mut exhausted = false;
    for (attempt, &limit) in limits.iter().enumerate() {
        if attempt > 0 {
            warnings.push(format!("no plan within depth {}; retrying at depth {limit}", limits[0]));
        }
        // a larger depth cannot help a search that already ran out of states
        let (mut found, mut stats) = if exhausted {
            (None, SearchStats { depth_limit: limit, budget_exhausted: true, ..last.clone() })
        } else {
            search(&start, &target, limit, DIRECT_BUDGET)
        };
        if found.is_none() && stats.budget_exhausted {
            exhausted = true;
            let fresh = chained.is_none();
            if fresh {
                chained = Some(chain(s, c1, c2)?);
            }
            let (moves, cstats) = chained.as_ref().unwrap();
            if !moves.is_empty() && moves.len() <= limit {
                found = Some(moves.clone());
            }
            if fresh {
                stats.legs = cstats.legs;
                stats.forward_states += cstats.forward_states;
                stats.backward_states += cstats.backward_states;
            }
        }
        stats.depth_limit = limit;
        if let Some(moves) = found {
            let certified_end = replay(&start, &moves)?;
            if certified_end.canonical_key() != target.canonical_key() {
                return Err(Error::Inconsistent("plan replay does not reach the target".into()));
            }
            return Ok(PlanOutcome::Plan(ReflectionPlan { moves, diff, certified_end, stats, warnings }));
        }
        last = stats;
    }
    Ok(PlanOutcome::NotFound(last))
}

/// Breadth-first parents over the dual graph, from triangle `from`.
fn dual_tree(s: &TriangulatedSurface, from: usize) -> Vec<usize> {
    let nt = s.triangles().len();
    let mut parent = vec![usize::MAX; nt];
    parent[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        for &e in &s.triangles()[t] {
            for &(u, _) in s.slots(e) {
                if parent[u] == usize::MAX {
                    parent[u] = t;
                    queue.push_back(u);
                }
            }
        }
    }
    parent
}

/// Triangles on a shortest dual path between `a` and `b`, inclusive.
fn dual_path(s: &TriangulatedSurface, a: usize, b: usize) -> Vec<usize> {
    let parent = dual_tree(s, a);
    let mut out = vec![b];
    let mut t = b;
    while t != a {
        t = parent[t];
        out.push(t);
    }
    out
}

/// Where a leg's search may move.
#[derive(Clone, Copy, Debug)]
enum Reach {
    /// The leg's triangles grown by this many rings of adjacent triangles.
    Ring(usize),
    /// Every triangle with a corner on the boundary the leg works on.
    Boundary,
    All,
}

/// Moves at the arcs of the triangles a leg may touch.
fn local_moves(s: &TriangulatedSurface, region: &[usize], boundary: usize, reach: Reach) -> Vec<ReflectionMove> {
    let nt = s.triangles().len();
    let mut inside = vec![false; nt];
    for &t in region {
        inside[t] = true;
    }
    match reach {
        Reach::Ring(radius) => {
            for _ in 0..radius {
                let ring: Vec<usize> = (0..nt)
                    .filter(|&t| inside[t])
                    .flat_map(|t| s.triangles()[t].iter().flat_map(|&e| s.slots(e).iter().map(|&(u, _)| u)))
                    .collect();
                for u in ring {
                    inside[u] = true;
                }
            }
        }
        Reach::Boundary => {
            for (t, slot) in inside.iter_mut().enumerate() {
                if (0..3u8).any(|p| s.boundary_of(crate::surface::Corner { triangle: t, position: p }) == boundary) {
                    *slot = true;
                }
            }
        }
        Reach::All => inside.iter_mut().for_each(|x| *x = true),
    }
    let mut arcs = vec![false; s.n_arcs()];
    for (t, tri) in s.triangles().iter().enumerate() {
        if inside[t] {
            for &e in tri {
                if s.is_arc(e) {
                    arcs[e] = true;
                }
            }
        }
    }
    all_moves(s.n_arcs()).into_iter().filter(|m| arcs[m.vertex]).collect()
}

/// Search reach and state budget tried for each leg, cheapest first.
const LEG_SCHEDULE: [(Reach, usize); 5] = [
    (Reach::Ring(0), 20_000),
    (Reach::Ring(1), 20_000),
    (Reach::Boundary, 100_000),
    (Reach::Ring(2), 200_000),
    (Reach::All, 400_000),
];

/// Greedy chain of intermediate cuts from c1 to c2. Each leg changes one triangle
/// within its boundary component or moves one pair of cuts across, and is solved by a
/// search restricted to arcs near the triangles involved. A far pair is brought
/// together through internal triangles on a dual path between them.
/// Returns an empty move list when some leg cannot be solved.
fn chain(s: &TriangulatedSurface, c1: &AdmissibleCut, c2: &AdmissibleCut) -> Result<(Vec<ReflectionMove>, SearchStats)> {
    let mut stats = SearchStats::default();
    let mut cur = c1.clone();
    let mut moves = Vec::new();
    let target_key = apply_cut(s, c2).canonical_key();
    let corner = |t: usize, p: u8| crate::surface::Corner { triangle: t, position: p };
    let bnd = |t: usize, p: u8| s.boundary_of(corner(t, p));
    let internal: Vec<bool> = (0..s.triangles().len()).map(|t| s.triangles()[t].iter().all(|&e| s.is_arc(e))).collect();
    while apply_cut(s, &cur).canonical_key() != target_key {
        let at = |t: usize| cur.corner_in(t).unwrap();
        let goal = |t: usize| c2.corner_in(t).unwrap();
        // corners of t on boundary b, the goal corner first
        let landing = |t: usize, b: usize| -> Vec<u8> {
            let mut ps: Vec<u8> = (0..3u8).filter(|&p| bnd(t, p) == b).collect();
            ps.sort_by_key(|&p| p != goal(t));
            ps
        };
        let mut candidates: Vec<(Vec<usize>, usize, AdmissibleCut)> = Vec::new();
        let mut swaps: Vec<usize> = Vec::new();
        for k in cur.corners() {
            let t = k.triangle;
            if goal(t) == k.position {
                continue;
            }
            if bnd(t, k.position) == bnd(t, goal(t)) {
                candidates.push((vec![t], bnd(t, goal(t)), cur.with_corner(t, goal(t))));
            } else {
                swaps.push(t);
            }
        }
        let mut pairs: Vec<(Vec<usize>, usize, usize)> = Vec::new();
        for (k, &t) in swaps.iter().enumerate() {
            for &u in &swaps[k + 1..] {
                if bnd(t, at(t)) != bnd(u, at(u)) {
                    pairs.push((dual_path(s, t, u), t, u));
                }
            }
        }
        pairs.sort_by_key(|(path, _, _)| path.len());
        for (path, t, u) in &pairs {
            for &pt in &landing(*t, bnd(*t, goal(*t))) {
                for &pu in &landing(*u, bnd(*u, goal(*u))) {
                    candidates.push((path.clone(), usize::MAX, cur.with_corner(*t, pt).with_corner(*u, pu)));
                }
            }
        }
        // carriers between the closest pair: hand one end's cut to an internal
        // triangle on the path that already sits on the other boundary
        if let Some((path, t, u)) = pairs.first() {
            for (end, path) in [(*u, path.clone()), (*t, path.iter().rev().copied().collect::<Vec<_>>())] {
                // path runs from `end` toward the other end
                let from_b = bnd(end, at(end));
                for (k, &w) in path.iter().enumerate().skip(1).take(path.len().saturating_sub(2)) {
                    if !internal[w] || bnd(w, at(w)) == from_b {
                        continue;
                    }
                    for &pe in &landing(end, bnd(end, goal(end))) {
                        for &pw in &landing(w, from_b) {
                            candidates.push((path[..=k].to_vec(), usize::MAX, cur.with_corner(end, pe).with_corner(w, pw)));
                        }
                    }
                }
            }
        }
        candidates.sort_by_key(|(r, _, _)| r.len());
        let from = apply_cut(s, &cur);
        let mut advanced = false;
        'schedule: for (reach, budget) in LEG_SCHEDULE {
            for (region, boundary, next) in &candidates {
                if matches!(reach, Reach::Boundary) && *boundary == usize::MAX {
                    continue;
                }
                let local = local_moves(s, region, *boundary, reach);
                let (found, st) = search_at(&from, &apply_cut(s, next), usize::MAX, budget, &local);
                stats.forward_states += st.forward_states;
                stats.backward_states += st.backward_states;
                if let Some(leg) = found {
                    moves.extend(leg);
                    stats.legs += 1;
                    cur = next.clone();
                    advanced = true;
                    break 'schedule;
                }
            }
        }
        if !advanced {
            return Ok((Vec::new(), stats));
        }
    }
    stats.legs = stats.legs.max(1);
    let moves = shorten(&apply_cut(s, c1), moves, &mut stats);
    Ok((moves, stats))
}

/// States explored from each point of a chained plan by [`shorten`].
const PEEPHOLE_BUDGET: usize = 3_000;

/// Shortcuts a plan: from each intermediate state a bounded breadth-first search looks
/// for a later state of the plan that it reaches in fewer moves.
fn shorten(start: &QuiverWithRelations, mut moves: Vec<ReflectionMove>, stats: &mut SearchStats) -> Vec<ReflectionMove> {
    let universe = all_moves(start.vertices().len());
    let mut i = 0;
    while i + 2 <= moves.len() {
        let mut states = vec![State::of(start)];
        for &m in &moves {
            let next = states.last().unwrap().apply(m).expect("chained moves replay");
            states.push(next);
        }
        let later: HashMap<Vec<u16>, usize> =
            states.iter().enumerate().skip(i + 2).map(|(j, q)| (q.key(), j)).collect();
        let mut side = Side::new(states[i].clone());
        // best (saving, j, node)
        let mut best: Option<(usize, usize, usize)> = None;
        let mut head = 0;
        while head < side.nodes.len() && side.nodes.len() < PEEPHOLE_BUDGET {
            let k = head;
            head += 1;
            let d = side.nodes[k].depth + 1;
            if d + 1 >= moves.len() - i {
                break;
            }
            for &m in &universe {
                let Some(r) = side.nodes[k].state.apply(m) else { continue };
                let key = r.key();
                if side.index.contains_key(&key) || !gentle(&r, stats) {
                    continue;
                }
                if let Some(&j) = later.get(&key) {
                    if j - i > d && best.is_none_or(|(sv, _, _)| j - i - d > sv) {
                        best = Some((j - i - d, j, side.nodes.len()));
                    }
                }
                side.index.insert(key, side.nodes.len());
                side.nodes.push(Node { state: r, parent: k, via: Some(m), depth: d });
            }
        }
        stats.forward_states += side.nodes.len();
        match best {
            Some((_, j, node)) => {
                moves.splice(i..j, side.path(node));
            }
            None => i += 1,
        }
    }
    moves
}

fn replay(start: &QuiverWithRelations, moves: &[ReflectionMove]) -> Result<QuiverWithRelations> {
    let mut q = start.clone();
    for (k, &m) in moves.iter().enumerate() {
        let chk = move_defined(&q, m)?;
        if let Some(r) = chk.reason {
            return Err(Error::Precondition(format!("move {k} ({:?} at {}) illegal: {r}", m.kind, q.vertices()[m.vertex])));
        }
        q = apply_move(&q, m)?;
    }
    Ok(q)
}

/// Replays a plan from the cut quiver of c1.
pub fn apply_plan(s: &TriangulatedSurface, c1: &AdmissibleCut, moves: &[ReflectionMove]) -> Result<QuiverWithRelations> {
    replay(&apply_cut(s, c1), moves)
}

/// Short digest of a quiver with relations, for move logs.
pub fn digest(q: &QuiverWithRelations) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for x in q.canonical_key() {
        for b in x.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

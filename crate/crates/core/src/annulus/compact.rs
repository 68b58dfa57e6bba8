//! Label-free quiver states for the planner's search. Arrows keep their indices from
//! the starting quiver, so a move sequence found here replays on the full quiver.

use crate::moves::{MoveKind, ReflectionMove};
use crate::quiver::QuiverWithRelations;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct State {
    n: u16,
    src: Vec<u16>,
    tgt: Vec<u16>,
    /// Sorted, deduplicated pairs (a, b) read "a then b".
    rel: Vec<(u16, u16)>,
}

impl State {
    pub(crate) fn of(q: &QuiverWithRelations) -> State {
        let mut rel: Vec<(u16, u16)> = q.relations.iter().map(|&(a, b)| (a as u16, b as u16)).collect();
        rel.sort_unstable();
        rel.dedup();
        State {
            n: q.vertices().len() as u16,
            src: q.arrows().iter().map(|a| a.source as u16).collect(),
            tgt: q.arrows().iter().map(|a| a.target as u16).collect(),
            rel,
        }
    }

    fn has_rel(&self, a: u16, b: u16) -> bool {
        self.rel.binary_search(&(a, b)).is_ok()
    }

    fn arrows(&self) -> std::ops::Range<u16> {
        0..self.src.len() as u16
    }

    pub(crate) fn apply(&self, m: ReflectionMove) -> Option<State> {
        let i = m.vertex as u16;
        if i >= self.n || self.arrows().any(|a| self.src[a as usize] == i && self.tgt[a as usize] == i) {
            return None;
        }
        match m.kind {
            MoveKind::Reflect => self.reflect(i),
            MoveKind::Coreflect => self.coreflect(i),
        }
    }

    fn reflect(&self, i: u16) -> Option<State> {
        let (src, tgt) = (&self.src, &self.tgt);
        let na = src.len();
        // beta[a] for arrows a leaving i
        let mut beta = vec![u16::MAX; na];
        for a in self.arrows().filter(|&a| src[a as usize] == i) {
            let mut found = None;
            for b in self.arrows().filter(|&b| tgt[b as usize] == i && !self.has_rel(b, a)) {
                if found.replace(b).is_some() {
                    return None;
                }
            }
            beta[a as usize] = found?;
        }
        let mut ns = Vec::with_capacity(na);
        let mut nt = Vec::with_capacity(na);
        for a in 0..na {
            let s = if tgt[a] == i {
                i
            } else if src[a] == i {
                src[beta[a] as usize]
            } else {
                src[a]
            };
            let t = if tgt[a] == i {
                src[a]
            } else if self.rel.iter().any(|&(p, b)| p as usize == a && tgt[b as usize] == i) {
                i
            } else {
                tgt[a]
            };
            ns.push(s);
            nt.push(t);
        }
        let mut rel = Vec::with_capacity(self.rel.len() + 4);
        for a in self.arrows().filter(|&a| tgt[a as usize] == i) {
            for &(b, g) in &self.rel {
                if g != a && tgt[g as usize] == i {
                    rel.push((b, a));
                }
            }
        }
        rel.extend(self.rel.iter().copied().filter(|&(_, b)| tgt[b as usize] != i && src[b as usize] != i));
        rel.extend((0..na).filter(|&a| beta[a] != u16::MAX).map(|a| (beta[a], a as u16)));
        State::rebuild(self.n, ns, nt, rel)
    }

    fn coreflect(&self, i: u16) -> Option<State> {
        let (src, tgt) = (&self.src, &self.tgt);
        let na = src.len();
        let mut beta = vec![u16::MAX; na];
        for a in self.arrows().filter(|&a| tgt[a as usize] == i) {
            let mut found = None;
            for b in self.arrows().filter(|&b| src[b as usize] == i && !self.has_rel(a, b)) {
                if found.replace(b).is_some() {
                    return None;
                }
            }
            beta[a as usize] = found?;
        }
        let mut ns = Vec::with_capacity(na);
        let mut nt = Vec::with_capacity(na);
        for a in 0..na {
            let s = if src[a] == i {
                tgt[a]
            } else if self.rel.iter().any(|&(b, p)| p as usize == a && src[b as usize] == i) {
                i
            } else {
                src[a]
            };
            let t = if src[a] == i {
                i
            } else if tgt[a] == i {
                tgt[beta[a] as usize]
            } else {
                tgt[a]
            };
            ns.push(s);
            nt.push(t);
        }
        let mut rel = Vec::with_capacity(self.rel.len() + 4);
        for a in self.arrows().filter(|&a| src[a as usize] == i) {
            for &(g, b) in &self.rel {
                if g != a && src[g as usize] == i {
                    rel.push((a, b));
                }
            }
        }
        rel.extend(self.rel.iter().copied().filter(|&(a, _)| src[a as usize] != i && tgt[a as usize] != i));
        rel.extend((0..na).filter(|&a| beta[a] != u16::MAX).map(|a| (a as u16, beta[a])));
        State::rebuild(self.n, ns, nt, rel)
    }

    fn rebuild(n: u16, src: Vec<u16>, tgt: Vec<u16>, mut rel: Vec<(u16, u16)>) -> Option<State> {
        rel.sort_unstable();
        rel.dedup();
        if rel.iter().any(|&(a, b)| tgt[a as usize] != src[b as usize]) {
            return None;
        }
        Some(State { n, src, tgt, rel })
    }

    pub(crate) fn is_gentle(&self) -> bool {
        const NONE: u16 = u16::MAX;
        let n = self.n as usize;
        // up to two arrows into and out of each vertex
        let mut ins = vec![[NONE; 2]; n];
        let mut outs = vec![[NONE; 2]; n];
        for a in self.arrows() {
            for (list, v) in [(&mut outs, self.src[a as usize]), (&mut ins, self.tgt[a as usize])] {
                let slot = &mut list[v as usize];
                if slot[0] == NONE {
                    slot[0] = a;
                } else if slot[1] == NONE {
                    slot[1] = a;
                } else {
                    return false;
                }
            }
        }
        for b in self.arrows() {
            let (mut pre_free, mut pre_rel, mut post_free, mut post_rel) = (0, 0, 0, 0);
            for &a in ins[self.src[b as usize] as usize].iter().filter(|&&a| a != NONE) {
                if self.has_rel(a, b) {
                    pre_rel += 1;
                } else {
                    pre_free += 1;
                }
            }
            for &c in outs[self.tgt[b as usize] as usize].iter().filter(|&&c| c != NONE) {
                if self.has_rel(b, c) {
                    post_rel += 1;
                } else {
                    post_free += 1;
                }
            }
            if pre_free > 1 || post_free > 1 || pre_rel > 1 || post_rel > 1 {
                return false;
            }
        }
        true
    }

    /// Key identifying the state up to permuting parallel arrows; agrees with
    /// `QuiverWithRelations::canonical_key` on equality.
    pub(crate) fn key(&self) -> Vec<u16> {
        let na = self.src.len();
        let mut order: Vec<usize> = (0..na).collect();
        order.sort_unstable_by_key(|&a| (u32::from(self.src[a]) << 16) | u32::from(self.tgt[a]));
        let mut key: Vec<u16> = Vec::with_capacity(2 * na + 2 * self.rel.len() + 1);
        for &a in &order {
            key.push(self.src[a]);
            key.push(self.tgt[a]);
        }
        key.push(u16::MAX);
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut lo = 0;
        while lo < na {
            let mut hi = lo + 1;
            while hi < na && (self.src[order[hi]], self.tgt[order[hi]]) == (self.src[order[lo]], self.tgt[order[lo]]) {
                hi += 1;
            }
            if hi - lo > 1 {
                groups.push((lo, hi));
            }
            lo = hi;
        }
        let encode = |order: &[usize]| -> Vec<u16> {
            let mut pos = vec![0u16; na];
            for (p, &a) in order.iter().enumerate() {
                pos[a] = p as u16;
            }
            let mut rel: Vec<(u16, u16)> = self.rel.iter().map(|&(a, b)| (pos[a as usize], pos[b as usize])).collect();
            rel.sort_unstable();
            rel.into_iter().flat_map(|(a, b)| [a, b]).collect()
        };
        if groups.is_empty() || self.rel.is_empty() {
            key.extend(encode(&order));
            return key;
        }
        let mut best: Option<Vec<u16>> = None;
        permute(&mut order, &groups, 0, &mut |o| {
            let e = encode(o);
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        });
        key.extend(best.unwrap());
        key
    }
}

/// Calls `f` on every ordering obtained by permuting each group independently.
fn permute(order: &mut Vec<usize>, groups: &[(usize, usize)], g: usize, f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        f(order);
        return;
    }
    let (lo, hi) = groups[g];
    // groups hold at most two parallel arrows in a gentle quiver, but stay general
    let mut idx: Vec<usize> = (lo..hi).collect();
    let orig: Vec<usize> = order[lo..hi].to_vec();
    loop {
        for (k, &p) in idx.iter().enumerate() {
            order[lo + k] = orig[p - lo];
        }
        permute(order, groups, g + 1, f);
        if !next_permutation(&mut idx) {
            break;
        }
    }
    order[lo..hi].copy_from_slice(&orig);
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

//! Randomized property checks shared by the property tests and the acceptance suite.
//! Each check builds its instance from a single seed.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sak_core::annulus::diff_set;
use sak_core::corpus;
use sak_core::cuts::distribution;
use sak_core::equivalence::{act_on_cut, induced_surface_map, quiver_automorphisms, QuiverAutomorphism};
use sak_core::grading::{covering_window, solve_levels, weight_of_cut};
use sak_core::quiver::quiver_of;
use sak_core::TriangulatedSurface;

pub type Check = Result<(), String>;

struct Entry {
    surface: TriangulatedSurface,
    autos: Vec<QuiverAutomorphism>,
}

fn pool() -> &'static [Entry] {
    static POOL: OnceLock<Vec<Entry>> = OnceLock::new();
    POOL.get_or_init(|| {
        corpus::surfaces(corpus::DEFAULT_SEED, 40)
            .into_iter()
            .map(|surface| {
                let autos = quiver_automorphisms(&quiver_of(&surface));
                Entry { surface, autos }
            })
            .collect()
    })
}

fn pick(seed: u64) -> (&'static Entry, ChaCha8Rng) {
    let mut r = corpus::rng(seed);
    let e = &pool()[r.gen_range(0..pool().len())];
    (e, r)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn distribution_totals(seed: u64) -> Check {
    let (e, mut r) = pick(seed);
    let s = &e.surface;
    let c = corpus::random_cut(s, &mut r);
    let d = distribution(s, &c);
    ensure(d.counts.len() == s.boundaries().len(), || format!("{}: {} counts", s.name(), d.counts.len()))?;
    let total: usize = d.counts.iter().sum();
    ensure(total == s.internal_triangles().len(), || {
        format!("{}: {total} local cuts for {} internal triangles", s.name(), s.internal_triangles().len())
    })
}

pub fn diff_set_parity(seed: u64) -> Check {
    let mut r = corpus::rng(seed);
    let (s, c1, c2) = corpus::annulus_pair(&mut r, 8);
    let d = diff_set(&s, &c1, &c2).map_err(|e| e.to_string())?;
    ensure(d.len() % 2 == 0, || format!("odd difference set {d:?} for {} / {}", c1.describe(&s), c2.describe(&s)))
}

pub fn group_closure(seed: u64) -> Check {
    let (e, mut r) = pick(seed);
    let q = quiver_of(&e.surface);
    let a = &e.autos;
    ensure(a.iter().any(|f| f.is_identity()), || format!("{}: identity missing", e.surface.name()))?;
    let f = a.choose(&mut r).unwrap();
    let g = a.choose(&mut r).unwrap();
    ensure(a.contains(&f.compose(g)), || format!("{}: not closed", e.surface.name()))?;
    ensure(a.contains(&f.inverse()), || format!("{}: inverse missing", e.surface.name()))?;
    ensure(f.compose(&f.inverse()).is_identity(), || "f ∘ f⁻¹ is not the identity".into())?;
    ensure(a.iter().all(|h| h.is_valid_for(&q)), || "invalid automorphism".into())
}

pub fn action_law(seed: u64) -> Check {
    // the action is only defined relative to the internal 3-cycles, which any valid
    // automorphism preserves
    let (e, mut r) = pick(seed);
    let s = &e.surface;
    let c = corpus::random_cut(s, &mut r);
    let f = e.autos.choose(&mut r).unwrap();
    let g = e.autos.choose(&mut r).unwrap();
    let err = |x: sak_core::Error| x.to_string();
    let one = act_on_cut(s, &f.compose(g), &c).map_err(err)?;
    let two = act_on_cut(s, f, &act_on_cut(s, g, &c).map_err(err)?).map_err(err)?;
    ensure(one == two, || format!("{}: (f∘g)·c ≠ f·(g·c)", s.name()))?;
    let id = act_on_cut(s, &QuiverAutomorphism::identity(&quiver_of(s)), &c).map_err(err)?;
    ensure(id == c, || "identity moves the cut".into())?;
    let m = induced_surface_map(s, f).map_err(err)?;
    let (before, after) = (distribution(s, &c), distribution(s, &act_on_cut(s, f, &c).map_err(err)?));
    ensure(
        before.counts.iter().enumerate().all(|(b, &n)| after.counts[m.boundary_component_map[b]] == n),
        || format!("{}: distribution not carried along", s.name()),
    )
}

pub fn labeling_shift(seed: u64) -> Check {
    let (e, mut r) = pick(seed);
    let s = &e.surface;
    let (c1, c2) = (corpus::random_cut(s, &mut r), corpus::random_cut(s, &mut r));
    let (w1, w2) = (weight_of_cut(s, &c1), weight_of_cut(s, &c2));
    let err = |x: sak_core::Error| x.to_string();
    let there = solve_levels(&w1, &w2).map_err(err)?;
    let back = solve_levels(&w2, &w1).map_err(err)?;
    match (there, back) {
        (Ok(l), Ok(m)) => {
            ensure(l.satisfies(&w1, &w2), || "labeling violates a constraint".into())?;
            ensure(m.r == l.negated(), || format!("{}: reversed labeling is not −r", s.name()))?;
            let k = r.gen_range(-5..=5);
            let mut shifted = l.clone();
            shifted.r.iter_mut().for_each(|x| *x += k);
            ensure(shifted.satisfies(&w1, &w2), || format!("shift by {k} breaks the labeling"))
        }
        (Err(_), Err(_)) => Ok(()),
        _ => Err(format!("{}: solvable in one direction only", s.name())),
    }
}

pub fn window_coherence(seed: u64) -> Check {
    let (e, mut r) = pick(seed);
    let s = &e.surface;
    let w = weight_of_cut(s, &corpus::random_cut(s, &mut r));
    let lo = r.gen_range(-3..=0);
    let hi = r.gen_range(0..=3);
    let lo2 = r.gen_range(lo..=hi);
    let hi2 = r.gen_range(lo2..=hi);
    let err = |x: sak_core::Error| x.to_string();
    let big = covering_window(&w, lo, hi).map_err(err)?;
    let small = covering_window(&w, lo2, hi2).map_err(err)?;
    ensure(big.restrict(lo2, hi2) == small.restrict(lo2, hi2), || {
        format!("{}: [{lo},{hi}] restricted to [{lo2},{hi2}] differs", s.name())
    })?;
    ensure(small.vertices.len() == s.n_arcs() * (hi2 - lo2 + 1) as usize, || "vertex count".into())
}

pub const ALL: [(&str, fn(u64) -> Check); 6] = [
    ("cut distribution totals", distribution_totals),
    ("diff_set parity on annuli", diff_set_parity),
    ("automorphism group closure", group_closure),
    ("act_on_cut action law", action_law),
    ("labeling shift and negation", labeling_shift),
    ("covering window coherence", window_coherence),
];

//! Seeded generators for test surfaces and cuts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cuts::AdmissibleCut;
use crate::fixtures;
use crate::surface::{SurfaceFile, TriangulatedSurface};

pub const DEFAULT_SEED: u64 = 0x5a4b_2013;

/// Seed from `SAK_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("SAK_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fan triangulation of an m-gon from its first vertex.
pub fn disc_fan(m: usize) -> TriangulatedSurface {
    assert!(m >= 4, "fan needs at least 4 vertices");
    let seg = |a: usize, b: usize| format!("b{a}_{b}");
    let boundary: Vec<String> = (1..=m).map(|k| seg(k, k % m + 1)).collect();
    // arc k joins vertex 1 and vertex k + 2
    let arcs: Vec<String> = (1..=m - 3).map(|k| k.to_string()).collect();
    let side = |a: usize, b: usize| -> String {
        match (a.min(b), a.max(b)) {
            (1, 2) => seg(1, 2),
            (1, x) if x == m => seg(m, 1),
            (1, x) => (x - 2).to_string(),
            (x, _) => seg(x, x + 1),
        }
    };
    let triangles = (2..m).map(|k| [side(1, k), side(k, k + 1), side(k + 1, 1)]).collect();
    let file = SurfaceFile { name: format!("fan{m}"), arcs, boundary, triangles };
    TriangulatedSurface::from_file(&file).expect("fan triangulation is valid")
}

/// Annulus triangulated only by bridging arcs. `steps[t]` is true when step t advances
/// along the outer boundary.
pub fn annulus_zigzag(steps: &[bool]) -> TriangulatedSurface {
    let p = steps.iter().filter(|&&x| x).count();
    let q = steps.len() - p;
    assert!(p >= 1 && q >= 1, "both boundaries need a marked point");
    let n = steps.len();
    let arcs: Vec<String> = (1..=n).map(|k| k.to_string()).collect();
    let mut boundary = Vec::new();
    let mut triangles = Vec::new();
    let (mut k, mut j) = (0usize, 0usize);
    for (t, &outer) in steps.iter().enumerate() {
        let cur = arcs[t].clone();
        let next = arcs[(t + 1) % n].clone();
        if outer {
            let s = format!("o{}_{}", k, (k + 1) % p);
            triangles.push([cur, next, s.clone()]);
            boundary.push(s);
            k = (k + 1) % p;
        } else {
            let s = format!("i{}_{}", j, (j + 1) % q);
            triangles.push([s.clone(), next, cur]);
            boundary.push(s);
            j = (j + 1) % q;
        }
    }
    let file = SurfaceFile { name: format!("zigzag{p}x{q}"), arcs, boundary, triangles };
    TriangulatedSurface::from_file(&file).expect("zigzag triangulation is valid")
}

pub fn random_annulus(rng: &mut impl Rng, p: usize, q: usize, flips: usize) -> TriangulatedSurface {
    let mut steps = vec![true; p];
    steps.extend(vec![false; q]);
    steps[1..].shuffle(rng);
    random_flips(&annulus_zigzag(&steps), flips, rng)
}

pub fn random_disc(rng: &mut impl Rng, m: usize, flips: usize) -> TriangulatedSurface {
    random_flips(&disc_fan(m), flips, rng)
}

/// Applies `k` flips at uniformly chosen arcs, skipping degenerate quadrilaterals.
pub fn random_flips(s: &TriangulatedSurface, k: usize, rng: &mut impl Rng) -> TriangulatedSurface {
    let mut cur = s.clone();
    for _ in 0..k {
        if cur.n_arcs() == 0 {
            break;
        }
        let e = rng.gen_range(0..cur.n_arcs());
        if let Ok(next) = cur.flip(cur.label(e)) {
            cur = next;
        }
    }
    cur
}

pub fn random_cut(s: &TriangulatedSurface, rng: &mut impl Rng) -> AdmissibleCut {
    let choices: Vec<(usize, u8)> = s.internal_triangles().into_iter().map(|t| (t, rng.gen_range(0..3u8))).collect();
    AdmissibleCut::new(s, choices).expect("one corner per internal triangle")
}

/// A random annulus with between 1 and `max_internal` internal triangles and two
/// equi-distributed cuts of it (the second found by rejection sampling).
pub fn annulus_pair(rng: &mut impl Rng, max_internal: usize) -> (TriangulatedSurface, AdmissibleCut, AdmissibleCut) {
    loop {
        let p = rng.gen_range(1..=8);
        let q = rng.gen_range(1..=8);
        let s = random_annulus(rng, p, q, 60);
        let k = s.internal_triangles().len();
        if k == 0 || k > max_internal {
            continue;
        }
        let c1 = random_cut(&s, rng);
        for _ in 0..200 {
            let c2 = random_cut(&s, rng);
            if crate::cuts::equidistributed(&s, &c1, &c2) {
                return (s, c1, c2);
            }
        }
    }
}

/// Bundled fixtures plus seeded fans and annuli.
pub fn surfaces(seed: u64, extra: usize) -> Vec<TriangulatedSurface> {
    let mut out: Vec<TriangulatedSurface> = fixtures::NAMES.iter().map(|n| fixtures::surface(n)).collect();
    let mut r = rng(seed);
    for k in 0..extra {
        let s = if k % 2 == 0 {
            let m = r.gen_range(5..=9);
            random_disc(&mut r, m, 12)
        } else {
            let p = r.gen_range(1..=4);
            let q = r.gen_range(1..=4);
            random_annulus(&mut r, p, q, 12)
        };
        out.push(s);
    }
    out
}

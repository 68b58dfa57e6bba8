//! The acceptance criteria, run in order. Each prints one PASS/FAIL line with its
//! timing; the test fails if any criterion does. Run with `--nocapture` to see the
//! lines when everything passes.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::Rng;

use sak_core::annulus::{apply_plan, default_depth, diff_set, plan_reflections, PlanOutcome};
use sak_core::corpus;
use sak_core::cuts::{enumerate_cuts, equidistributed};
use sak_core::equivalence::{derived_equivalence_certificate, Direction};
use sak_core::fixtures::{self, pair_cut, surface};
use sak_core::grading::{covering_window, solve_levels, weight_of_cut};
use sak_core::moves::{apply_move, dict_check, dict_eligible, local_configuration, LocalConfiguration, MoveKind};
use sak_core::quiver::{apply_cut, is_gentle, mutate, quiver_of};
use sak_core::{AdmissibleCut, TriangulatedSurface};

#[allow(dead_code)]
#[path = "common/props.rs"]
mod props;

type Outcome = Result<String, String>;

fn names(v: &[(&str, &str)]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    out.sort();
    out
}

fn expect(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Cuts to examine on s: all of them when there are few, otherwise a seeded sample.
fn cuts_of(s: &TriangulatedSurface, rng: &mut impl rand::Rng, sample: usize) -> Vec<AdmissibleCut> {
    if s.internal_triangles().len() <= 4 {
        enumerate_cuts(s).unwrap()
    } else {
        (0..sample).map(|_| corpus::random_cut(s, rng)).collect()
    }
}

fn figure1() -> Outcome {
    let s = surface("figure1");
    let q = quiver_of(&s);
    let printed = names(&[
        ("1", "2"), ("1", "8"), ("2", "6"), ("2", "3"), ("6", "1"), ("6", "5"),
        ("5", "4"), ("4", "7"), ("4", "3"), ("7", "5"), ("7", "8"),
    ]);
    expect(q.quiver.named_pairs() == printed, || format!("arrows {:?}", q.quiver.named_pairs()))?;
    let mut cycles: Vec<BTreeSet<String>> = s
        .internal_triangles()
        .into_iter()
        .map(|t| s.triangles()[t].iter().map(|&e| s.label(e).to_string()).collect())
        .collect();
    cycles.sort();
    let want: Vec<BTreeSet<String>> = vec![
        ["1", "2", "6"].iter().map(|x| x.to_string()).collect(),
        ["4", "5", "7"].iter().map(|x| x.to_string()).collect(),
    ];
    expect(cycles == want, || format!("3-cycles {cycles:?}"))?;
    expect(q.relations.len() == 6, || format!("{} relations", q.relations.len()))?;
    Ok("11 arrows, 3-cycles {1,2,6} {4,7,5}".into())
}

fn example_cut() -> Outcome {
    let s = surface("figure1");
    let c = pair_cut(&s, &[("2", "6"), ("7", "5")]).map_err(e2s)?;
    let q = apply_cut(&s, &c);
    let printed = names(&[
        ("1", "2"), ("1", "8"), ("2", "3"), ("6", "1"), ("6", "5"), ("5", "4"), ("4", "7"), ("4", "3"), ("7", "8"),
    ]);
    expect(q.quiver.named_pairs() == printed, || format!("arrows {:?}", q.quiver.named_pairs()))?;
    Ok(format!("9 arrows, {} relations", q.relations.len()))
}

fn pants() -> Outcome {
    let s = surface("pants");
    let c1 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("11", "2"), ("12", "1"), ("5", "7"), ("13", "3"), ("12", "14"), ("16", "17")])
        .map_err(e2s)?;
    let c2 = pair_cut(&s, &[("9", "8"), ("4", "2"), ("2", "1"), ("3", "12"), ("5", "7"), ("6", "13"), ("12", "14"), ("17", "18")])
        .map_err(e2s)?;
    expect(equidistributed(&s, &c1, &c2), || "not equi-distributed".into())?;
    let w1 = weight_of_cut(&s, &c1);
    let l = solve_levels(&w1, &weight_of_cut(&s, &c2)).map_err(e2s)?.map_err(|w| format!("conflict {:?}", w.vertex_names()))?;
    expect(l.distinct_values().len() == 3, || format!("values {:?}", l.distinct_values()))?;
    let classes = l.classes();
    let extreme = [classes.first().unwrap(), classes.last().unwrap()];
    let with12 = extreme.iter().find(|(_, v)| v.contains(&"12".to_string())).ok_or("12 not in an extreme class")?;
    expect(with12.1 == ["12", "13", "14", "15"], || format!("class of 12: {:?}", with12.1))?;
    // bridge arrows of the covering figure: one copy of each cut arrow per level step
    let pairs = [("9", "8"), ("16", "17"), ("4", "2"), ("5", "7"), ("11", "2"), ("12", "1"), ("12", "14"), ("13", "3")];
    let mut want = Vec::new();
    for lvl in [-1, 0] {
        for (a, b) in pairs {
            want.push(((a.to_string(), lvl), (b.to_string(), lvl + 1)));
        }
    }
    want.sort();
    let got = covering_window(&w1, -1, 1).map_err(e2s)?.bridges();
    expect(got == want, || format!("bridges {got:?}"))?;
    Ok(format!("r ∈ {:?}, {} bridges", l.distinct_values(), got.len()))
}

fn torus() -> Outcome {
    let s = surface("torus");
    let c1 = pair_cut(&s, &[("1", "2"), ("3", "4")]).map_err(e2s)?;
    // 4 -> 1 is a double arrow; take the copy in the triangle not cut at 1 -> 2
    let first = c1.local_cuts(&s).into_iter().find(|l| l.source_arc == "1").ok_or("no χ12")?.triangle;
    let (i4, i1) = (s.arc_index("4").map_err(e2s)?, s.arc_index("1").map_err(e2s)?);
    let other = s.internal_triangles().into_iter().find(|&t| t != first).ok_or("one internal triangle")?;
    let tri = s.triangles()[other];
    let p = (0..3u8).find(|&p| tri[p as usize] == i4 && tri[(p as usize + 1) % 3] == i1).ok_or("no 4 -> 1 corner")?;
    let c2 = AdmissibleCut::new(&s, [(first, c1.corner_in(first).unwrap()), (other, p)]).map_err(e2s)?;
    let w = solve_levels(&weight_of_cut(&s, &c1), &weight_of_cut(&s, &c2)).map_err(e2s)?;
    let wit = w.err().ok_or("labeling found")?;
    let got: BTreeSet<String> = wit.vertex_names().into_iter().collect();
    let want: BTreeSet<String> = ["1", "2", "4"].iter().map(|x| x.to_string()).collect();
    expect(got == want, || format!("cycle through {got:?}"))?;
    Ok(format!("conflict through {{1,2,4}}, discrepancy {}", wit.discrepancy))
}

fn annulus_example() -> Outcome {
    let s = surface("annulus42");
    let c1 = pair_cut(&s, &[("1", "2"), ("7", "1")]).map_err(e2s)?;
    let c2 = pair_cut(&s, &[("8", "7"), ("3", "1")]).map_err(e2s)?;
    expect(!equidistributed(&s, &c1, &c2), || "identity direction is equi-distributed".into())?;
    let direct = solve_levels(&weight_of_cut(&s, &c1), &weight_of_cut(&s, &c2)).map_err(e2s)?;
    expect(direct.is_err(), || "labeling found via the identity".into())?;
    let out = derived_equivalence_certificate(&s, &c1, &c2).map_err(e2s)?;
    let cert = out.certificate().ok_or("no certificate")?;
    expect(!cert.automorphism.is_identity(), || "identity certificate".into())?;
    expect(cert.direction == Direction::ImageOfFirst, || format!("direction {:?}", cert.direction))?;
    expect(equidistributed(&s, &cert.pair.0, &cert.pair.1), || "certificate pair not equi-distributed".into())?;
    expect(cert.verify(&s), || "certificate does not verify".into())?;
    Ok("rotation certificate, (f(χ1), χ2) equi-distributed".into())
}

fn levels_iff_equidistributed() -> Outcome {
    let mut pairs = 0usize;
    let mut tested = Vec::new();
    let mut discs_and_annuli = 0;
    let mut pool = corpus::surfaces(corpus::seed_from_env(), 60);
    // the small corpus rarely has 3 or 4 internal triangles, so add some that do
    let mut r = corpus::rng(corpus::seed_from_env() ^ 6);
    let mut big = 0;
    while big < 12 {
        let (m, q) = (r.gen_range(3..=7), r.gen_range(3..=7));
        let s = if big % 2 == 0 { corpus::random_disc(&mut r, m + 6, 80) } else { corpus::random_annulus(&mut r, m, q, 80) };
        if (3..=4).contains(&s.internal_triangles().len()) {
            pool.push(s);
            big += 1;
        }
    }
    for s in pool {
        if s.genus() != 0 || s.internal_triangles().len() > 4 {
            continue;
        }
        let name = s.name().to_string();
        if !fixtures::NAMES.contains(&name.as_str()) {
            discs_and_annuli += 1;
        }
        let cuts = enumerate_cuts(&s).map_err(e2s)?;
        let weights: Vec<_> = cuts.iter().map(|c| weight_of_cut(&s, c)).collect();
        for (a, ca) in cuts.iter().enumerate() {
            for (b, cb) in cuts.iter().enumerate() {
                let solved = solve_levels(&weights[a], &weights[b]).map_err(e2s)?.is_ok();
                if solved != equidistributed(&s, ca, cb) {
                    return Err(format!("{name}: {} vs {}", ca.describe(&s), cb.describe(&s)));
                }
                pairs += 1;
            }
        }
        if fixtures::NAMES.contains(&name.as_str()) {
            tested.push(name);
        }
    }
    Ok(format!("{pairs} pairs on {} and {discs_and_annuli} seeded surfaces, 0 discrepancies", tested.join(" ")))
}

fn dictionary() -> Outcome {
    let mut r = corpus::rng(corpus::seed_from_env());
    let mut checks = 0usize;
    let mut shapes: BTreeMap<(MoveKind, (usize, usize, usize, usize)), (usize, usize)> = BTreeMap::new();
    for s in corpus::surfaces(corpus::seed_from_env(), 60) {
        for c in cuts_of(&s, &mut r, 30) {
            let q = apply_cut(&s, &c);
            for i in 0..s.n_arcs() {
                for kind in [MoveKind::Reflect, MoveKind::Coreflect] {
                    if !dict_eligible(&s, &c, i, kind).map_err(e2s)? {
                        continue;
                    }
                    let w = dict_check(&s, &c, i, kind, false).map_err(e2s)?;
                    if w.witness().is_none() {
                        return Err(format!("counterexample: {} {} at {} ({kind:?})", s.name(), c.describe(&s), s.label(i)));
                    }
                    let lc = local_configuration(&q, i, kind);
                    let e = shapes.entry((kind, lc.shape())).or_default();
                    if lc.double_arrow {
                        e.1 += 1;
                    } else {
                        e.0 += 1;
                    }
                    checks += 1;
                }
            }
        }
    }
    for kind in [MoveKind::Reflect, MoveKind::Coreflect] {
        for shape in LocalConfiguration::DICTIONARY {
            let (plain, double) = shapes.get(&(kind, shape)).copied().unwrap_or_default();
            expect(plain > 0, || format!("{kind:?} configuration {shape:?} never instantiated"))?;
            // shapes with two arrows into i are the ones with white vertices to identify
            expect(shape.0 < 2 || double > 0, || format!("{kind:?} configuration {shape:?} has no double-arrow instance"))?;
        }
        let extra: Vec<_> = shapes.keys().filter(|(k, sh)| *k == kind && !LocalConfiguration::DICTIONARY.contains(sh)).collect();
        expect(extra.is_empty(), || format!("eligible shapes outside the dictionary: {extra:?}"))?;
    }
    Ok(format!("{checks} witnesses, all 10 configurations and their double-arrow forms for both kinds"))
}

struct PlannerRun {
    fixtures_ok: Result<(), String>,
    solved: usize,
    over_default: Vec<(usize, usize, usize)>,
    failures: Vec<String>,
    states_checked: usize,
    non_gentle: usize,
    elapsed: Duration,
}

fn run_planner() -> PlannerRun {
    let t = Instant::now();
    let mut run = PlannerRun {
        fixtures_ok: Ok(()),
        solved: 0,
        over_default: Vec::new(),
        failures: Vec::new(),
        states_checked: 0,
        non_gentle: 0,
        elapsed: Duration::ZERO,
    };
    let fixed: [(&str, [(&str, &str); 2], [(&str, &str); 2], usize); 5] = [
        ("annulus42", [("1", "2"), ("1", "8")], [("3", "1"), ("7", "1")], 2),
        ("lem1a", [("i", "m"), ("j", "l")], [("a", "i"), ("c", "j")], 4),
        ("lem1b", [("i", "m"), ("j", "c")], [("a", "i"), ("n", "j")], 4),
        ("lem1c", [("i", "a"), ("j", "c")], [("m", "i"), ("n", "j")], 4),
        ("lem1d", [("j", "a"), ("i", "n")], [("m", "j"), ("c", "i")], 4),
    ];
    for (name, a, b, len) in fixed {
        let s = surface(name);
        let (c1, c2) = (pair_cut(&s, &a).unwrap(), pair_cut(&s, &b).unwrap());
        match plan_reflections(&s, &c1, &c2, None).unwrap().plan() {
            Some(p) if p.moves.len() == len => {}
            Some(p) => run.fixtures_ok = Err(format!("{name}: plan of length {}", p.moves.len())),
            None => run.fixtures_ok = Err(format!("{name}: no plan")),
        }
    }
    let mut r = corpus::rng(corpus::seed_from_env());
    for k in 0..100 {
        let (s, c1, c2) = corpus::annulus_pair(&mut r, 8);
        let d = diff_set(&s, &c1, &c2).unwrap().len();
        let want = apply_cut(&s, &c2).canonical_key();
        match plan_reflections(&s, &c1, &c2, None).unwrap() {
            PlanOutcome::Plan(p) => {
                let mut q = apply_cut(&s, &c1);
                for &m in &p.moves {
                    q = apply_move(&q, m).unwrap();
                    run.states_checked += 1;
                    if !is_gentle(&q).pass {
                        run.non_gentle += 1;
                    }
                }
                run.non_gentle += p.stats.non_gentle;
                let end = apply_plan(&s, &c1, &p.moves).unwrap();
                if end.canonical_key() != want || q.canonical_key() != want {
                    run.failures.push(format!("pair {k}: plan does not reach the target"));
                    continue;
                }
                run.solved += 1;
                if p.moves.len() > default_depth(d) {
                    run.over_default.push((k, d, p.moves.len()));
                }
            }
            PlanOutcome::NotFound(st) => run.failures.push(format!(
                "pair {k} (|D| = {d}, {} internal): not found, {} + {} states",
                s.internal_triangles().len(),
                st.forward_states,
                st.backward_states
            )),
        }
    }
    run.elapsed = t.elapsed();
    run
}

fn gentleness(planner: &PlannerRun) -> Outcome {
    let mut r = corpus::rng(corpus::seed_from_env());
    let mut count = 0usize;
    for s in corpus::surfaces(corpus::seed_from_env(), 60) {
        let base = quiver_of(&s);
        expect(is_gentle(&base).pass, || format!("Q_T of {} is not gentle", s.name()))?;
        for c in cuts_of(&s, &mut r, 30) {
            let q = apply_cut(&s, &c);
            expect(is_gentle(&q).pass, || format!("{} cut {} is not gentle", s.name(), c.describe(&s)))?;
            count += 1;
        }
    }
    expect(planner.non_gentle == 0, || format!("{} planner states not gentle", planner.non_gentle))?;
    Ok(format!("{count} cut quivers, {} planner states", planner.states_checked))
}

fn involutions() -> Outcome {
    let mut checks = 0;
    for s in corpus::surfaces(corpus::seed_from_env(), 60) {
        let q = quiver_of(&s).quiver;
        for v in 0..s.n_arcs() {
            let twice = mutate(&mutate(&q, v).map_err(e2s)?, v).map_err(e2s)?;
            expect(twice.same_arrows(&q), || format!("{}: μ² ≠ id at {}", s.name(), s.label(v)))?;
            let back = s.flip(s.label(v)).and_then(|t| t.flip(s.label(v))).map_err(e2s)?;
            expect(back.canonical_triangles() == s.canonical_triangles(), || format!("{}: flip² ≠ id at {}", s.name(), s.label(v)))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} arcs"))
}

fn planner(run: &PlannerRun) -> Outcome {
    run.fixtures_ok.clone()?;
    let mut msg = format!(
        "{}/100 solved and verified; {} plans longer than the default depth",
        run.solved,
        run.over_default.len()
    );
    if let Some(&(k, d, len)) = run.over_default.iter().max_by_key(|x| x.2 as isize - default_depth(x.1) as isize) {
        msg += &format!(" (worst: pair {k}, |D| = {d}, length {len} > {})", default_depth(d));
    }
    if !run.failures.is_empty() {
        return Err(format!("{msg}; {}", run.failures.join("; ")));
    }
    if !run.over_default.is_empty() {
        return Err(msg);
    }
    Ok(msg)
}

fn properties() -> Outcome {
    let mut summary = Vec::new();
    for (name, check) in props::ALL {
        for k in 0..500u64 {
            check(corpus::DEFAULT_SEED.wrapping_add(k)).map_err(|e| format!("{name}, instance {k}: {e}"))?;
        }
        summary.push(name);
    }
    Ok(format!("500 instances each: {}", summary.join(", ")))
}

fn timed(n: usize, title: &str, limit: Duration, failed: &mut Vec<usize>, f: impl FnOnce() -> Outcome) {
    let t = Instant::now();
    let out = f();
    report_line(n, title, limit, t.elapsed(), out, failed);
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    let sec = Duration::from_secs;
    timed(1, "figure1 quiver", sec(1), &mut failed, figure1);
    timed(2, "example cut", sec(1), &mut failed, example_cut);
    timed(3, "pants example", sec(1), &mut failed, pants);
    timed(4, "torus conflict", sec(1), &mut failed, torus);
    timed(5, "annulus automorphism certificate", sec(1), &mut failed, annulus_example);
    timed(6, "levels iff equi-distributed", sec(60), &mut failed, levels_iff_equidistributed);
    timed(7, "reflection dictionary", sec(60), &mut failed, dictionary);
    // one planner run feeds both 8 and 10; its time is charged to 10
    let run = run_planner();
    timed(8, "gentleness", sec(30), &mut failed, || gentleness(&run));
    timed(9, "involution laws", sec(10), &mut failed, involutions);
    report_line(10, "annulus planner", sec(120), run.elapsed, planner(&run), &mut failed);
    timed(11, "property suite", sec(120), &mut failed, properties);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn report_line(n: usize, title: &str, limit: Duration, el: Duration, out: Outcome, failed: &mut Vec<usize>) {
    let out = match out {
        Ok(m) if el > limit => Err(format!("{m}; took {el:.2?}, limit {limit:?}")),
        o => o,
    };
    match out {
        Ok(m) => println!("PASS {n:>2} {title} ({el:.2?}): {m}"),
        Err(m) => {
            println!("FAIL {n:>2} {title} ({el:.2?}): {m}");
            failed.push(n);
        }
    }
}

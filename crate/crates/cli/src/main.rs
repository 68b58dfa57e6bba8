use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use sak_core::annulus::{digest, plan_reflections, PlanOutcome};
use sak_core::cuts::{distribution, enumerate_cuts, equidistributed, parse_cut};
use sak_core::equivalence::{derived_equivalence_certificate, quiver_automorphisms, CertificateOutcome};
use sak_core::grading::{covering_window, solve_levels, weight_of_cut};
use sak_core::moves::{apply_move, dict_check, dict_eligible, move_defined, DictOutcome, MoveKind, ReflectionMove};
use sak_core::quiver::{apply_cut, mutate, quiver_of};
use sak_core::surface::{parse_surface, validate};
use sak_core::{AdmissibleCut, Error, QuiverWithRelations, TriangulatedSurface};

#[derive(Parser)]
#[command(name = "sak", version, about = "Surface algebras of cut triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a dot rendering to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a surface file and report genus, boundary components and marked points.
    Validate { surface: PathBuf },
    /// The quiver Q_T with its Jacobian relations.
    Quiver { surface: PathBuf },
    /// Enumerate all admissible cuts.
    Cuts { surface: PathBuf },
    /// The cut quiver of one admissible cut.
    CutApply { surface: PathBuf, cut: PathBuf },
    /// Number of local cuts on each boundary component.
    Distribution { surface: PathBuf, cut: PathBuf },
    /// Whether two cuts are equi-distributed (exit 3 if not).
    Equidist { surface: PathBuf, first: PathBuf, second: PathBuf },
    /// Solve for the level function relating two gradings (exit 3 on a conflict).
    Levels { surface: PathBuf, first: PathBuf, second: PathBuf },
    /// A window of the covering quiver of the grading by a cut.
    Covering {
        surface: PathBuf,
        cut: PathBuf,
        #[arg(long, value_name = "LO..HI", default_value = "0..1")]
        levels: String,
    },
    /// Automorphisms of Q_T.
    Autos { surface: PathBuf },
    /// Look for a derived-equivalence certificate (exit 3 if none).
    DerivedEquiv { surface: PathBuf, first: PathBuf, second: PathBuf },
    /// Flip an arc; prints the new surface file.
    Flip { surface: PathBuf, arc: String },
    /// Mutate Q_T at a vertex.
    Mutate { surface: PathBuf, vertex: String },
    /// Reflect (or coreflect with --co) the cut quiver at a vertex (exit 3 if undefined).
    Reflect {
        surface: PathBuf,
        cut: PathBuf,
        vertex: String,
        #[arg(long)]
        co: bool,
    },
    /// Match a (co)reflection with a flip and a cut of the flipped triangulation.
    DictCheck {
        surface: PathBuf,
        cut: PathBuf,
        vertex: String,
        #[arg(long)]
        co: bool,
        /// Compare up to isomorphism and try every corner of every triangle.
        #[arg(long)]
        relaxed_iso: bool,
    },
    /// Plan (co)reflections between equi-distributed cuts of an annulus (exit 3 if none found).
    AnnulusPlan {
        surface: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// A finished command: the verdict plus what to print.
struct Report {
    affirmative: bool,
    json: Value,
    text: String,
    dot: Option<String>,
}

impl Report {
    fn yes(json: Value, text: String) -> Report {
        Report { affirmative: true, json, text, dot: None }
    }

    fn no(json: Value, text: String) -> Report {
        Report { affirmative: false, json, text, dot: None }
    }

    fn with_dot(mut self, dot: String) -> Report {
        self.dot = Some(dot);
        self
    }
}

#[derive(Debug)]
enum Failure {
    Io(PathBuf, std::io::Error),
    Core(Error),
    Usage(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_surface(path: &Path) -> Res<TriangulatedSurface> {
    Ok(TriangulatedSurface::parse(&read(path)?)?)
}

fn load_cut(s: &TriangulatedSurface, path: &Path) -> Res<AdmissibleCut> {
    Ok(parse_cut(s, &read(path)?)?)
}

fn quiver_json(q: &QuiverWithRelations) -> Value {
    serde_json::to_value(q.to_json()).expect("quiver json")
}

fn quiver_text(q: &QuiverWithRelations) -> String {
    let mut out = String::new();
    let v = q.vertices();
    let _ = writeln!(out, "vertices: {}", v.join(" "));
    let _ = writeln!(out, "arrows ({}):", q.arrows().len());
    for a in q.arrows() {
        let _ = writeln!(out, "  {:<8} {} -> {}", a.label, v[a.source], v[a.target]);
    }
    let _ = writeln!(out, "relations ({}):", q.relations.len());
    for (a, b) in q.relation_labels() {
        let _ = writeln!(out, "  {a} * {b}");
    }
    out
}

fn cut_json(s: &TriangulatedSurface, c: &AdmissibleCut) -> Value {
    let locals = c.local_cuts(s);
    json!({
        "pairs": locals.iter().map(|l| [l.source_arc.clone(), l.target_arc.clone()]).collect::<Vec<_>>(),
        "corners": locals.iter().map(|l| json!({"triangle": l.triangle, "corner": l.corner.position})).collect::<Vec<_>>(),
    })
}

fn vertex(s: &TriangulatedSurface, name: &str) -> Res<usize> {
    Ok(s.arc_index(name)?)
}

fn parse_window(text: &str) -> Res<(i64, i64)> {
    let bad = || Failure::Usage(format!("--levels expects LO..HI, got `{text}`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn kind_name(k: MoveKind) -> &'static str {
    match k {
        MoveKind::Reflect => "reflect",
        MoveKind::Coreflect => "coreflect",
    }
}

fn run(cli: &Cli) -> Res<Report> {
    match &cli.command {
        Command::Validate { surface } => {
            let file = parse_surface(&read(surface)?)?;
            let rep = validate(&file);
            let genus = rep.genus.map_or("?".to_string(), |g| g.to_string());
            let mut text = format!(
                "{} g={} b={} m={} arcs={} triangles={} chi={}\n",
                if rep.pass { "valid" } else { "invalid" },
                genus,
                rep.boundary_components,
                rep.marked_points,
                rep.arcs,
                rep.triangles,
                rep.euler_characteristic
            );
            for f in &rep.failures {
                let _ = writeln!(text, "  {f}");
            }
            let json = serde_json::to_value(&rep).expect("report json");
            if !rep.pass {
                return Ok(Report::no(json, text));
            }
            let dot = TriangulatedSurface::from_file(&file)?.to_dot();
            Ok(Report::yes(json, text).with_dot(dot))
        }
        Command::Quiver { surface } => {
            let s = load_surface(surface)?;
            let q = quiver_of(&s);
            Ok(Report::yes(quiver_json(&q), quiver_text(&q)).with_dot(q.to_dot(s.name())))
        }
        Command::Cuts { surface } => {
            let s = load_surface(surface)?;
            let cuts = enumerate_cuts(&s)?;
            let mut text = format!("{} admissible cuts\n", cuts.len());
            for (k, c) in cuts.iter().enumerate() {
                let _ = writeln!(text, "{k:>5}  {}", c.describe(&s));
            }
            let json = Value::Array(cuts.iter().map(|c| cut_json(&s, c)).collect());
            Ok(Report::yes(json, text))
        }
        Command::CutApply { surface, cut } => {
            let s = load_surface(surface)?;
            let c = load_cut(&s, cut)?;
            let q = apply_cut(&s, &c);
            Ok(Report::yes(quiver_json(&q), quiver_text(&q)).with_dot(q.to_dot(s.name())))
        }
        Command::Distribution { surface, cut } => {
            let s = load_surface(surface)?;
            let c = load_cut(&s, cut)?;
            let d = distribution(&s, &c);
            let mut text = String::from("boundary  cuts\n");
            for (b, n) in d.counts.iter().enumerate() {
                let _ = writeln!(text, "{b:>8}  {n}");
            }
            Ok(Report::yes(json!({ "counts": d.counts }), text))
        }
        Command::Equidist { surface, first, second } => {
            let s = load_surface(surface)?;
            let (c1, c2) = (load_cut(&s, first)?, load_cut(&s, second)?);
            let (d1, d2) = (distribution(&s, &c1), distribution(&s, &c2));
            let eq = equidistributed(&s, &c1, &c2);
            let json = json!({ "equidistributed": eq, "first": d1.counts, "second": d2.counts });
            let text = format!("{} {:?} {:?}\n", if eq { "equi-distributed" } else { "not equi-distributed" }, d1.counts, d2.counts);
            Ok(if eq { Report::yes(json, text) } else { Report::no(json, text) })
        }
        Command::Levels { surface, first, second } => {
            let s = load_surface(surface)?;
            let (c1, c2) = (load_cut(&s, first)?, load_cut(&s, second)?);
            match solve_levels(&weight_of_cut(&s, &c1), &weight_of_cut(&s, &c2))? {
                Ok(lab) => {
                    let mut text = String::new();
                    for (level, names) in lab.classes() {
                        let _ = writeln!(text, "r = {level:>3}: {}", names.join(" "));
                    }
                    Ok(Report::yes(serde_json::to_value(lab.to_json()).expect("labeling json"), text))
                }
                Err(w) => {
                    let base = quiver_of(&s);
                    let steps: Vec<Value> = w
                        .cycle
                        .iter()
                        .map(|st| json!({ "arrow": base.arrow(st.arrow).label, "forward": st.forward }))
                        .collect();
                    let names = w.vertex_names();
                    let text = format!("conflict: cycle through {} has discrepancy {}\n", names.join(" -> "), w.discrepancy);
                    let json = json!({ "conflict": { "vertices": names, "cycle": steps, "discrepancy": w.discrepancy } });
                    Ok(Report::no(json, text))
                }
            }
        }
        Command::Covering { surface, cut, levels } => {
            let s = load_surface(surface)?;
            let c = load_cut(&s, cut)?;
            let (lo, hi) = parse_window(levels)?;
            let w = covering_window(&weight_of_cut(&s, &c), lo, hi)?;
            let arrows = w.restrict(lo, hi);
            let mut text = format!("levels {lo}..{hi}: {} vertices, {} arrows\n", w.vertices.len(), arrows.len());
            for ((a, la), (b, lb), _) in &arrows {
                let _ = writeln!(text, "  ({a},{la}) -> ({b},{lb})");
            }
            let json = json!({
                "levels": [lo, hi],
                "arrows": arrows.iter().map(|((a, la), (b, lb), _)| json!({"from": [a, la], "to": [b, lb]})).collect::<Vec<_>>(),
                "bridges": w.bridges().iter().map(|((a, la), (b, lb))| json!({"from": [a, la], "to": [b, lb]})).collect::<Vec<_>>(),
            });
            Ok(Report::yes(json, text).with_dot(w.to_dot()))
        }
        Command::Autos { surface } => {
            let s = load_surface(surface)?;
            let q = quiver_of(&s);
            let autos = quiver_automorphisms(&q);
            let mut text = format!("{} automorphisms\n", autos.len());
            let mut maps = Vec::new();
            for f in &autos {
                let pairs = f.describe(&q);
                let moved: Vec<String> = pairs.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("{a}->{b}")).collect();
                let _ = writeln!(text, "  {}", if moved.is_empty() { "identity".to_string() } else { moved.join(" ") });
                maps.push(Value::Object(pairs.into_iter().map(|(a, b)| (a, Value::String(b))).collect()));
            }
            Ok(Report::yes(json!({ "count": autos.len(), "vertex_maps": maps }), text))
        }
        Command::DerivedEquiv { surface, first, second } => {
            let s = load_surface(surface)?;
            let (c1, c2) = (load_cut(&s, first)?, load_cut(&s, second)?);
            match derived_equivalence_certificate(&s, &c1, &c2)? {
                CertificateOutcome::Found(cert) => {
                    let q = quiver_of(&s);
                    let vm: serde_json::Map<String, Value> =
                        cert.automorphism.describe(&q).into_iter().map(|(a, b)| (a, Value::String(b))).collect();
                    let lab = cert.labeling.to_json();
                    let identity = cert.automorphism.is_identity();
                    let direction = serde_json::to_value(cert.direction).expect("direction");
                    let mut text = format!(
                        "certificate: {} automorphism, direction {}\n",
                        if identity { "identity" } else { "non-identity" },
                        direction.as_str().unwrap_or("?")
                    );
                    let _ = writeln!(text, "pair: {} | {}", cert.pair.0.describe(&s), cert.pair.1.describe(&s));
                    for (level, names) in cert.labeling.classes() {
                        let _ = writeln!(text, "r = {level:>3}: {}", names.join(" "));
                    }
                    let json = json!({
                        "vertex_map": vm,
                        "identity": identity,
                        "direction": direction,
                        "pair": [cut_json(&s, &cert.pair.0), cut_json(&s, &cert.pair.1)],
                        "r": lab.r,
                        "levels": lab.levels,
                        "tilting": cert.tilting.iter().map(|(v, k)| json!([v, k])).collect::<Vec<_>>(),
                    });
                    Ok(Report::yes(json, text))
                }
                CertificateOutcome::NotFound(nf) => {
                    let text = format!(
                        "no certificate: distributions {:?} and {:?}, {} automorphisms tried\n",
                        nf.first,
                        nf.second,
                        nf.tried.len()
                    );
                    Ok(Report::no(serde_json::to_value(&nf).expect("not found json"), text))
                }
            }
        }
        Command::Flip { surface, arc } => {
            let s = load_surface(surface)?;
            let t = s.flip(arc)?;
            let file = t.to_file();
            let text = serde_json::to_string_pretty(&file).expect("surface json") + "\n";
            Ok(Report::yes(serde_json::to_value(&file).expect("surface json"), text).with_dot(t.to_dot()))
        }
        Command::Mutate { surface, vertex: v } => {
            let s = load_surface(surface)?;
            let q = quiver_of(&s);
            let m = mutate(&q.quiver, vertex(&s, v)?)?;
            let out = QuiverWithRelations { quiver: m, relations: Vec::new() };
            Ok(Report::yes(quiver_json(&out), quiver_text(&out)).with_dot(out.to_dot(s.name())))
        }
        Command::Reflect { surface, cut, vertex: v, co } => {
            let s = load_surface(surface)?;
            let c = load_cut(&s, cut)?;
            let q = apply_cut(&s, &c);
            let kind = if *co { MoveKind::Coreflect } else { MoveKind::Reflect };
            let m = ReflectionMove { vertex: vertex(&s, v)?, kind };
            let chk = move_defined(&q, m)?;
            if let Some(reason) = chk.reason {
                let text = format!("{} at {v} is not defined: {reason}\n", kind_name(kind));
                return Ok(Report::no(json!({ "defined": false, "reason": reason }), text));
            }
            let r = apply_move(&q, m)?;
            let json = json!({
                "defined": true,
                "moves": [{ "vertex": v, "kind": kind_name(kind) }],
                "quiver": quiver_json(&r),
            });
            Ok(Report::yes(json, quiver_text(&r)).with_dot(r.to_dot(s.name())))
        }
        Command::DictCheck { surface, cut, vertex: v, co, relaxed_iso } => {
            let s = load_surface(surface)?;
            let c = load_cut(&s, cut)?;
            let kind = if *co { MoveKind::Coreflect } else { MoveKind::Reflect };
            let i = vertex(&s, v)?;
            if !dict_eligible(&s, &c, i, kind)? {
                let text = format!("{} at {v} is outside the dictionary's hypotheses\n", kind_name(kind));
                return Ok(Report::no(json!({ "eligible": false }), text));
            }
            match dict_check(&s, &c, i, kind, *relaxed_iso)? {
                DictOutcome::Witness(w) => {
                    let text = format!(
                        "witness: flip {v}, cut {}\n{}",
                        w.cut.describe(&w.flipped),
                        quiver_text(&w.matched)
                    );
                    let json = json!({
                        "eligible": true,
                        "witness": {
                            "surface": serde_json::to_value(w.flipped.to_file()).expect("surface json"),
                            "cut": cut_json(&w.flipped, &w.cut),
                            "quiver": quiver_json(&w.matched),
                        }
                    });
                    Ok(Report::yes(json, text))
                }
                DictOutcome::CounterExample { reflected, cuts_examined } => {
                    let text = format!("no cut of the flipped triangulation matches ({cuts_examined} examined)\n");
                    let json = json!({ "eligible": true, "counterexample": { "reflected": quiver_json(&reflected), "cuts_examined": cuts_examined } });
                    Ok(Report::no(json, text))
                }
            }
        }
        Command::AnnulusPlan { surface, first, second, depth } => {
            let s = load_surface(surface)?;
            let (c1, c2) = (load_cut(&s, first)?, load_cut(&s, second)?);
            match plan_reflections(&s, &c1, &c2, *depth)? {
                PlanOutcome::Plan(p) => {
                    let mut q = apply_cut(&s, &c1);
                    let mut steps = Vec::new();
                    let mut text = format!("start  {}\n", digest(&q));
                    for (k, &m) in p.moves.iter().enumerate() {
                        q = apply_move(&q, m)?;
                        let name = s.label(m.vertex);
                        let d = digest(&q);
                        let _ = writeln!(text, "{:>5}  {}{name:<6} {d}", k + 1, if m.kind == MoveKind::Reflect { "R " } else { "R-" });
                        steps.push(json!({ "vertex": name, "kind": kind_name(m.kind), "digest": d }));
                    }
                    for w in &p.warnings {
                        let _ = writeln!(text, "warning: {w}");
                    }
                    let diff: Vec<usize> = p.diff.clone();
                    let json = json!({
                        "moves": steps,
                        "length": p.moves.len(),
                        "diff": diff,
                        "start_digest": digest(&apply_cut(&s, &c1)),
                        "target_digest": digest(&apply_cut(&s, &c2)),
                        "depth_limit": p.stats.depth_limit,
                        "warnings": p.warnings,
                    });
                    Ok(Report::yes(json, text))
                }
                PlanOutcome::NotFound(st) => {
                    let text = format!(
                        "no plan within depth {} ({} + {} states explored)\n",
                        st.depth_limit, st.forward_states, st.backward_states
                    );
                    Ok(Report::no(json!({ "found": false, "stats": st }), text))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let (Some(path), Some(dot)) = (&cli.dot, &report.dot) {
                if let Err(e) = std::fs::write(path, dot) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let mut out = std::io::stdout().lock();
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json output"))
            } else {
                out.write_all(report.text.as_bytes())
            };
            ExitCode::from(if report.affirmative { 0 } else { 3 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

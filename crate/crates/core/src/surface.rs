//! Triangulated unpunctured oriented surfaces with marked points on the boundary.
//!
//! A surface is given purely combinatorially: a list of triangles, each a triple of
//! edge labels in counterclockwise order. Every side is a directed half-edge in the
//! ccw direction of its triangle, and the two half-edges of an arc are glued
//! head-to-tail. Marked points, boundary components and the genus are derived from
//! that gluing.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders labels numerically when both are integers, lexicographically otherwise.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

/// The on-disk form of a surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub name: String,
    pub arcs: Vec<String>,
    pub boundary: Vec<String>,
    pub triangles: Vec<[String; 3]>,
}

/// Parses a surface file and checks that every triangle side is declared.
pub fn parse_surface(text: &str) -> Result<SurfaceFile> {
    let file: SurfaceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.triangles.is_empty() {
        return Err(Error::Parse("triangle list is empty".into()));
    }
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for label in file.arcs.iter().chain(&file.boundary) {
        if label.is_empty() {
            return Err(Error::Parse("empty edge label".into()));
        }
        if seen.insert(label, ()).is_some() {
            return Err(Error::Parse(format!("duplicate edge label `{label}`")));
        }
    }
    for tri in &file.triangles {
        for side in tri {
            if !seen.contains_key(side.as_str()) {
                return Err(Error::UnknownEdge(side.clone()));
            }
        }
    }
    Ok(file)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub triangle: usize,
    /// The vertex between `side[position]` and `side[position + 1 mod 3]`.
    pub position: u8,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleType {
    Internal,
    Basic,
    Corner,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrbit {
    pub id: usize,
    /// Corners in rotation order, from the incoming boundary segment to the outgoing one.
    pub corners: Vec<Corner>,
    pub boundary: usize,
    pub incoming_segment: usize,
    pub outgoing_segment: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub id: usize,
    /// Edge indices, in the order met walking with the surface on the left.
    pub segments: Vec<usize>,
    /// `marked_points[k]` is the head of `segments[k]`.
    pub marked_points: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub failures: Vec<String>,
    pub arcs: usize,
    pub boundary_segments: usize,
    pub triangles: usize,
    pub connected: bool,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub genus: Option<i64>,
    pub boundary_components: usize,
    pub marked_points: usize,
    pub arc_count_identity: bool,
    /// A disc with fewer than five marked points; cut operations refuse these.
    pub small_disc: bool,
}

#[derive(Clone, Debug)]
pub struct TriangulatedSurface {
    name: String,
    labels: Vec<String>,
    n_arcs: usize,
    triangles: Vec<[usize; 3]>,
    slots: Vec<Vec<(usize, u8)>>,
    corner_orbit: Vec<[usize; 3]>,
    orbits: Vec<VertexOrbit>,
    boundaries: Vec<BoundaryComponent>,
    genus: i64,
}

struct Topology {
    corner_orbit: Vec<[usize; 3]>,
    orbits: Vec<VertexOrbit>,
    boundaries: Vec<BoundaryComponent>,
}

struct Indexed {
    labels: Vec<String>,
    n_arcs: usize,
    triangles: Vec<[usize; 3]>,
    slots: Vec<Vec<(usize, u8)>>,
}

fn index_file(file: &SurfaceFile) -> Result<Indexed> {
    let mut arcs = file.arcs.clone();
    let mut boundary = file.boundary.clone();
    arcs.sort_by(|a, b| natural_cmp(a, b));
    boundary.sort_by(|a, b| natural_cmp(a, b));
    let n_arcs = arcs.len();
    let labels: Vec<String> = arcs.into_iter().chain(boundary).collect();
    let index: HashMap<&str, usize> =
        labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut triangles = Vec::with_capacity(file.triangles.len());
    let mut slots = vec![Vec::new(); labels.len()];
    for (t, tri) in file.triangles.iter().enumerate() {
        let mut sides = [0usize; 3];
        for (p, label) in tri.iter().enumerate() {
            let e = *index
                .get(label.as_str())
                .ok_or_else(|| Error::UnknownEdge(label.clone()))?;
            sides[p] = e;
            slots[e].push((t, p as u8));
        }
        triangles.push(sides);
    }
    Ok(Indexed { labels, n_arcs, triangles, slots })
}

fn glue(ix: &Indexed) -> std::result::Result<Topology, String> {
    let nt = ix.triangles.len();
    let is_arc = |e: usize| e < ix.n_arcs;
    let other_slot = |e: usize, here: (usize, u8)| -> (usize, u8) {
        let s = &ix.slots[e];
        if s[0] == here {
            s[1]
        } else {
            s[0]
        }
    };
    // Rotating around a vertex: leave corner (t, p) through its outgoing side p+1.
    let next = |c: Corner| -> Option<Corner> {
        let q = (c.position + 1) % 3;
        let e = ix.triangles[c.triangle][q as usize];
        if !is_arc(e) {
            return None;
        }
        let (t2, p2) = other_slot(e, (c.triangle, q));
        Some(Corner { triangle: t2, position: p2 })
    };

    let mut corner_orbit = vec![[usize::MAX; 3]; nt];
    let mut starts: Vec<(usize, Corner)> = Vec::new();
    for e in ix.n_arcs..ix.labels.len() {
        let (t, p) = ix.slots[e][0];
        // Corner p is the head of side p, so the boundary segment enters it.
        starts.push((e, Corner { triangle: t, position: p }));
    }
    let mut orbits = Vec::new();
    for (incoming, start) in starts {
        let id = orbits.len();
        let mut corners = vec![start];
        let mut cur = start;
        if corner_orbit[cur.triangle][cur.position as usize] != usize::MAX {
            return Err("corner reached twice while walking a vertex".into());
        }
        corner_orbit[cur.triangle][cur.position as usize] = id;
        while let Some(nx) = next(cur) {
            if corner_orbit[nx.triangle][nx.position as usize] != usize::MAX {
                return Err("corner reached twice while walking a vertex".into());
            }
            corner_orbit[nx.triangle][nx.position as usize] = id;
            corners.push(nx);
            cur = nx;
        }
        let outgoing = ix.triangles[cur.triangle][((cur.position + 1) % 3) as usize];
        orbits.push(VertexOrbit {
            id,
            corners,
            boundary: usize::MAX,
            incoming_segment: incoming,
            outgoing_segment: outgoing,
        });
    }
    if corner_orbit.iter().flatten().any(|&o| o == usize::MAX) {
        return Err("some vertex is not on the boundary (punctured surfaces are not supported)".into());
    }

    // Walk the boundary: the segment following s leaves the head of s.
    let nb = ix.labels.len() - ix.n_arcs;
    let mut succ = vec![usize::MAX; nb];
    let mut head_orbit = vec![usize::MAX; nb];
    for o in &orbits {
        succ[o.incoming_segment - ix.n_arcs] = o.outgoing_segment;
        head_orbit[o.incoming_segment - ix.n_arcs] = o.id;
    }
    let mut seg_comp = vec![usize::MAX; nb];
    let mut boundaries = Vec::new();
    for s0 in 0..nb {
        if seg_comp[s0] != usize::MAX {
            continue;
        }
        let id = boundaries.len();
        let mut segments = Vec::new();
        let mut marked = Vec::new();
        let mut s = s0;
        loop {
            seg_comp[s] = id;
            segments.push(s + ix.n_arcs);
            marked.push(head_orbit[s]);
            s = succ[s] - ix.n_arcs;
            if s == s0 {
                break;
            }
            if seg_comp[s] != usize::MAX {
                return Err("boundary walk does not close up".into());
            }
        }
        boundaries.push(BoundaryComponent { id, segments, marked_points: marked });
    }
    for o in orbits.iter_mut() {
        o.boundary = seg_comp[o.incoming_segment - ix.n_arcs];
    }
    Ok(Topology { corner_orbit, orbits, boundaries })
}

fn connected(ix: &Indexed) -> bool {
    let nt = ix.triangles.len();
    if nt == 0 {
        return false;
    }
    let mut seen = vec![false; nt];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(t) = queue.pop_front() {
        for &e in &ix.triangles[t] {
            for &(t2, _) in &ix.slots[e] {
                if !seen[t2] {
                    seen[t2] = true;
                    queue.push_back(t2);
                }
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Checks every structural invariant of a triangulated surface and reports the derived data.
pub fn validate(file: &SurfaceFile) -> ValidationReport {
    let mut rep = ValidationReport {
        arcs: file.arcs.len(),
        boundary_segments: file.boundary.len(),
        triangles: file.triangles.len(),
        ..Default::default()
    };
    let ix = match index_file(file) {
        Ok(ix) => ix,
        Err(e) => {
            rep.failures.push(e.to_string());
            return rep;
        }
    };
    if ix.triangles.is_empty() {
        rep.failures.push("no triangles".into());
    }
    for (t, tri) in ix.triangles.iter().enumerate() {
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            rep.failures.push(format!("triangle {t} repeats a side (self-folded)"));
        }
    }
    for (e, s) in ix.slots.iter().enumerate() {
        let want = if e < ix.n_arcs { 2 } else { 1 };
        if s.len() != want {
            let kind = if e < ix.n_arcs { "arc" } else { "boundary segment" };
            rep.failures.push(format!(
                "{kind} `{}` appears in {} triangle slots, expected {want}",
                ix.labels[e],
                s.len()
            ));
        }
    }
    if !rep.failures.is_empty() {
        return rep;
    }
    rep.connected = connected(&ix);
    if !rep.connected {
        rep.failures.push("triangle adjacency graph is disconnected".into());
    }
    let topo = match glue(&ix) {
        Ok(t) => t,
        Err(msg) => {
            rep.failures.push(msg);
            return rep;
        }
    };
    rep.vertices = topo.orbits.len();
    rep.edges = ix.labels.len();
    rep.faces = ix.triangles.len();
    rep.euler_characteristic = rep.vertices as i64 - rep.edges as i64 + rep.faces as i64;
    rep.boundary_components = topo.boundaries.len();
    rep.marked_points = topo.orbits.len();
    let twice_g = 2 - rep.boundary_components as i64 - rep.euler_characteristic;
    if twice_g < 0 || twice_g % 2 != 0 {
        rep.failures.push(format!("Euler characteristic {} gives no integer genus", rep.euler_characteristic));
    } else {
        rep.genus = Some(twice_g / 2);
    }
    if topo.boundaries.iter().any(|b| b.marked_points.is_empty()) {
        rep.failures.push("boundary component without marked points".into());
    }
    if let Some(g) = rep.genus {
        let expected = 6 * g + 3 * rep.boundary_components as i64 + rep.marked_points as i64 - 6;
        rep.arc_count_identity = expected == ix.n_arcs as i64;
        if !rep.arc_count_identity {
            rep.failures.push(format!("{} arcs but 6g+3b+m-6 = {expected}", ix.n_arcs));
        }
        rep.small_disc = g == 0 && rep.boundary_components == 1 && rep.marked_points < 5;
    }
    rep.pass = rep.failures.is_empty();
    rep
}

impl TriangulatedSurface {
    /// Builds and validates a surface; fails with the report's first failure.
    pub fn from_file(file: &SurfaceFile) -> Result<Self> {
        let rep = validate(file);
        if !rep.pass {
            return Err(Error::InvalidSurface(rep.failures.join("; ")));
        }
        let ix = index_file(file)?;
        let topo = glue(&ix).map_err(Error::InvalidSurface)?;
        Ok(TriangulatedSurface {
            name: file.name.clone(),
            labels: ix.labels,
            n_arcs: ix.n_arcs,
            triangles: ix.triangles,
            slots: ix.slots,
            corner_orbit: topo.corner_orbit,
            orbits: topo.orbits,
            boundaries: topo.boundaries,
            genus: rep.genus.unwrap_or(0),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(&parse_surface(text)?)
    }

    pub fn to_file(&self) -> SurfaceFile {
        SurfaceFile {
            name: self.name.clone(),
            arcs: self.labels[..self.n_arcs].to_vec(),
            boundary: self.labels[self.n_arcs..].to_vec(),
            triangles: self
                .triangles
                .iter()
                .map(|t| t.map(|e| self.labels[e].clone()))
                .collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_arcs(&self) -> usize {
        self.n_arcs
    }

    /// Arc labels in natural order; index `i` is quiver vertex `i`.
    pub fn arc_labels(&self) -> &[String] {
        &self.labels[..self.n_arcs]
    }

    pub fn label(&self, edge: usize) -> &str {
        &self.labels[edge]
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn arc_index(&self, label: &str) -> Result<usize> {
        match self.edge_index(label) {
            Some(e) if e < self.n_arcs => Ok(e),
            _ => Err(Error::UnknownEdge(label.to_string())),
        }
    }

    pub fn is_arc(&self, edge: usize) -> bool {
        edge < self.n_arcs
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> Result<[usize; 3]> {
        self.triangles.get(t).copied().ok_or(Error::UnknownTriangle(t))
    }

    /// The two (arc) or one (boundary) triangle slots holding an edge.
    pub fn slots(&self, edge: usize) -> &[(usize, u8)] {
        &self.slots[edge]
    }

    pub fn triangle_type(&self, t: usize) -> Result<TriangleType> {
        let tri = self.triangle(t)?;
        Ok(match tri.iter().filter(|&&e| !self.is_arc(e)).count() {
            0 => TriangleType::Internal,
            1 => TriangleType::Basic,
            _ => TriangleType::Corner,
        })
    }

    pub fn internal_triangles(&self) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|&t| self.triangles[t].iter().all(|&e| self.is_arc(e)))
            .collect()
    }

    pub fn orbit_of(&self, c: Corner) -> usize {
        self.corner_orbit[c.triangle][c.position as usize]
    }

    pub fn boundary_of(&self, c: Corner) -> usize {
        self.orbits[self.orbit_of(c)].boundary
    }

    pub fn orbits(&self) -> &[VertexOrbit] {
        &self.orbits
    }

    pub fn boundaries(&self) -> &[BoundaryComponent] {
        &self.boundaries
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn marked_points(&self) -> usize {
        self.orbits.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.orbits.len() as i64 - self.labels.len() as i64 + self.triangles.len() as i64
    }

    pub fn is_small_disc(&self) -> bool {
        self.genus == 0 && self.boundaries.len() == 1 && self.orbits.len() < 5
    }

    /// Flips an arc to the other diagonal of its quadrilateral. The new diagonal keeps
    /// the label and the two triangles keep their ids.
    pub fn flip(&self, arc: &str) -> Result<TriangulatedSurface> {
        let e = match self.edge_index(arc) {
            Some(e) if self.is_arc(e) => e,
            Some(_) => return Err(Error::Flip(format!("`{arc}` is a boundary segment"))),
            None => return Err(Error::UnknownEdge(arc.to_string())),
        };
        let (t1, p1) = self.slots[e][0];
        let (t2, p2) = self.slots[e][1];
        if t1 == t2 {
            return Err(Error::Flip(format!("`{arc}` is glued to itself")));
        }
        let rot = |t: usize, p: u8| {
            let s = self.triangles[t];
            [s[p as usize], s[((p + 1) % 3) as usize], s[((p + 2) % 3) as usize]]
        };
        let [_, x, y] = rot(t1, p1);
        let [_, z, w] = rot(t2, p2);
        if y == z || w == x {
            return Err(Error::Flip(format!("the quadrilateral around `{arc}` is degenerate")));
        }
        let mut file = self.to_file();
        let l = |i: usize| self.labels[i].clone();
        file.triangles[t1] = [l(y), l(z), l(e)];
        file.triangles[t2] = [l(w), l(x), l(e)];
        TriangulatedSurface::from_file(&file)
    }

    /// Canonical form for comparison up to rotation of sides and triangle order.
    pub fn canonical_triangles(&self) -> Vec<[String; 3]> {
        let mut out: Vec<[String; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let labels = t.map(|e| self.labels[e].clone());
                (0..3)
                    .map(|r| [labels[r].clone(), labels[(r + 1) % 3].clone(), labels[(r + 2) % 3].clone()])
                    .min()
                    .unwrap()
            })
            .collect();
        out.sort();
        out
    }

    /// Dot rendering of the triangle adjacency graph.
    pub fn to_dot(&self) -> String {
        let mut s = format!("graph \"{}\" {{\n", self.name);
        for (t, tri) in self.triangles.iter().enumerate() {
            let ty = self.triangle_type(t).unwrap();
            let names: Vec<&str> = tri.iter().map(|&e| self.label(e)).collect();
            s.push_str(&format!(
                "  t{t} [label=\"{t}: {}\" shape={}];\n",
                names.join(","),
                match ty {
                    TriangleType::Internal => "triangle",
                    TriangleType::Basic => "box",
                    TriangleType::Corner => "ellipse",
                }
            ));
        }
        for e in 0..self.n_arcs {
            let (a, _) = self.slots[e][0];
            let (b, _) = self.slots[e][1];
            s.push_str(&format!("  t{a} -- t{b} [label=\"{}\"];\n", self.labels[e]));
        }
        s.push_str("}\n");
        s
    }
}

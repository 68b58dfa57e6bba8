//! Admissible cuts: one corner chosen in every internal triangle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::corner_label;
use crate::surface::{Corner, TriangulatedSurface};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleCut {
    locals: BTreeMap<usize, u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCut {
    pub triangle: usize,
    pub corner: Corner,
    pub removed_arrow: String,
    pub marked_point: usize,
    pub source_arc: String,
    pub target_arc: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutDistribution {
    /// Indexed by boundary component id.
    pub counts: Vec<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sliding {
    One,
    Two,
}

fn refuse_small_disc(s: &TriangulatedSurface) -> Result<()> {
    if s.is_small_disc() {
        return Err(Error::Unsupported(format!(
            "disc with {} marked points has no surface algebras to cut",
            s.marked_points()
        )));
    }
    Ok(())
}

impl AdmissibleCut {
    /// Builds a cut from (triangle, corner) choices; every internal triangle must be chosen once.
    pub fn new(s: &TriangulatedSurface, choices: impl IntoIterator<Item = (usize, u8)>) -> Result<Self> {
        refuse_small_disc(s)?;
        let mut locals = BTreeMap::new();
        for (t, p) in choices {
            s.triangle(t)?;
            if p > 2 {
                return Err(Error::InvalidCut(format!("corner {p} out of range")));
            }
            if !s.internal_triangles().contains(&t) {
                return Err(Error::InvalidCut(format!("triangle {t} is not internal")));
            }
            if locals.insert(t, p).is_some() {
                return Err(Error::InvalidCut(format!("triangle {t} is cut twice")));
            }
        }
        for t in s.internal_triangles() {
            if !locals.contains_key(&t) {
                return Err(Error::InvalidCut(format!("internal triangle {t} has no local cut")));
            }
        }
        Ok(AdmissibleCut { locals })
    }

    /// Same cut with the corner in triangle `t` replaced.
    pub fn with_corner(&self, t: usize, p: u8) -> Self {
        let mut locals = self.locals.clone();
        locals.insert(t, p);
        AdmissibleCut { locals }
    }

    pub fn corners(&self) -> impl Iterator<Item = Corner> + '_ {
        self.locals.iter().map(|(&t, &p)| Corner { triangle: t, position: p })
    }

    pub fn corner_in(&self, triangle: usize) -> Option<u8> {
        self.locals.get(&triangle).copied()
    }

    pub fn len(&self) -> usize {
        self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locals.is_empty()
    }

    /// Labels of the removed arrows of Q_T.
    pub fn removed_labels(&self) -> Vec<String> {
        self.corners().map(|c| corner_label(c.triangle, c.position)).collect()
    }

    pub fn local_cuts(&self, s: &TriangulatedSurface) -> Vec<LocalCut> {
        self.corners()
            .map(|c| {
                let tri = s.triangles()[c.triangle];
                LocalCut {
                    triangle: c.triangle,
                    corner: c,
                    removed_arrow: corner_label(c.triangle, c.position),
                    marked_point: s.orbit_of(c),
                    source_arc: s.label(tri[c.position as usize]).to_string(),
                    target_arc: s.label(tri[((c.position + 1) % 3) as usize]).to_string(),
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> CutFile {
        CutFile {
            cuts: self
                .corners()
                .map(|c| CutEntry::Corner { triangle: c.triangle, corner: c.position })
                .collect(),
        }
    }

    /// The arrow-pair form, e.g. `χ_{2,6} χ_{7,5}`.
    pub fn describe(&self, s: &TriangulatedSurface) -> String {
        self.local_cuts(s)
            .iter()
            .map(|l| format!("χ[{},{}]", l.source_arc, l.target_arc))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All 3^k cuts, triangles in id order and corners in position order (last triangle fastest).
pub fn enumerate_cuts(s: &TriangulatedSurface) -> Result<Vec<AdmissibleCut>> {
    refuse_small_disc(s)?;
    let internal = s.internal_triangles();
    let total = 3usize.pow(internal.len() as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut choice = vec![0u8; internal.len()];
        for slot in choice.iter_mut().rev() {
            *slot = (code % 3) as u8;
            code /= 3;
        }
        let locals = internal.iter().copied().zip(choice).collect();
        out.push(AdmissibleCut { locals });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CutEntry {
    Pair([String; 2]),
    Corner { triangle: usize, corner: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutFile {
    pub cuts: Vec<CutEntry>,
}

/// Parses a cut file. Arrow pairs are resolved to the unique internal-triangle corner
/// carrying that arrow.
pub fn parse_cut(s: &TriangulatedSurface, text: &str) -> Result<AdmissibleCut> {
    let file: CutFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cut_from_entries(s, &file.cuts)
}

pub fn cut_from_entries(s: &TriangulatedSurface, entries: &[CutEntry]) -> Result<AdmissibleCut> {
    let internal = s.internal_triangles();
    let mut choices = Vec::new();
    for entry in entries {
        match entry {
            CutEntry::Corner { triangle, corner } => choices.push((*triangle, *corner)),
            CutEntry::Pair([a, b]) => {
                let ia = s.arc_index(a)?;
                let ib = s.arc_index(b)?;
                let mut found = Vec::new();
                for &t in &internal {
                    let tri = s.triangles()[t];
                    for p in 0..3u8 {
                        if tri[p as usize] == ia && tri[((p + 1) % 3) as usize] == ib {
                            found.push((t, p));
                        }
                    }
                }
                match found.len() {
                    0 => {
                        return Err(Error::InvalidCut(format!(
                            "{a}->{b} is not an arrow of an internal 3-cycle"
                        )))
                    }
                    1 => choices.push(found[0]),
                    _ => {
                        return Err(Error::InvalidCut(format!(
                            "{a}->{b} is ambiguous (double arrow); name the triangle and corner"
                        )))
                    }
                }
            }
        }
    }
    AdmissibleCut::new(s, choices)
}

/// Number of local cuts on each boundary component.
pub fn distribution(s: &TriangulatedSurface, c: &AdmissibleCut) -> CutDistribution {
    let mut counts = vec![0; s.boundaries().len()];
    for corner in c.corners() {
        counts[s.boundary_of(corner)] += 1;
    }
    CutDistribution { counts }
}

pub fn equidistributed(s: &TriangulatedSurface, c1: &AdmissibleCut, c2: &AdmissibleCut) -> bool {
    distribution(s, c1) == distribution(s, c2)
}

/// Arcs shared by the two cut corners of a triangle where the cuts differ, with the
/// number of such triangles (one or two).
pub fn sliding_edges(s: &TriangulatedSurface, c1: &AdmissibleCut, c2: &AdmissibleCut) -> Vec<(String, Sliding)> {
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    for (&t, &p) in &c1.locals {
        let Some(q) = c2.corner_in(t) else { continue };
        if p == q {
            continue;
        }
        // Corner p touches sides p and p+1; corner q touches q and q+1.
        let shared = if (p + 1) % 3 == q { (p + 1) % 3 } else { p };
        let e = s.triangles()[t][shared as usize];
        if s.is_arc(e) {
            *hits.entry(e).or_default() += 1;
        }
    }
    hits.into_iter()
        .map(|(e, n)| (s.label(e).to_string(), if n >= 2 { Sliding::Two } else { Sliding::One }))
        .collect()
}

//! Bundled surfaces and cuts.

use crate::cuts::{cut_from_entries, AdmissibleCut, CutEntry};
use crate::error::Result;
use crate::surface::TriangulatedSurface;

pub const NAMES: &[&str] = &[
    "pentagon", "hexagon", "octagon", "figure1", "torus", "pants", "annulus42", "lem1a", "lem1b",
    "lem1c", "lem1d",
];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "pentagon" => include_str!("../fixtures/pentagon.json"),
        "hexagon" => include_str!("../fixtures/hexagon.json"),
        "octagon" => include_str!("../fixtures/octagon.json"),
        "figure1" => include_str!("../fixtures/figure1.json"),
        "torus" => include_str!("../fixtures/torus.json"),
        "pants" => include_str!("../fixtures/pants.json"),
        "annulus42" => include_str!("../fixtures/annulus42.json"),
        "lem1a" => include_str!("../fixtures/lem1a.json"),
        "lem1b" => include_str!("../fixtures/lem1b.json"),
        "lem1c" => include_str!("../fixtures/lem1c.json"),
        "lem1d" => include_str!("../fixtures/lem1d.json"),
        _ => return None,
    })
}

/// Loads a bundled surface; panics on unknown names since these are compiled in.
pub fn surface(name: &str) -> TriangulatedSurface {
    let text = source(name).unwrap_or_else(|| panic!("no bundled surface `{name}`"));
    TriangulatedSurface::parse(text).unwrap_or_else(|e| panic!("bundled surface `{name}`: {e}"))
}

/// A cut written as arrow pairs `(source arc, target arc)`.
pub fn pair_cut(s: &TriangulatedSurface, pairs: &[(&str, &str)]) -> Result<AdmissibleCut> {
    let entries: Vec<CutEntry> =
        pairs.iter().map(|(a, b)| CutEntry::Pair([a.to_string(), b.to_string()])).collect();
    cut_from_entries(s, &entries)
}

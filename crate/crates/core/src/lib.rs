//! Surface algebras of triangulated unpunctured surfaces: quivers with relations from
//! admissible cuts, grading by cuts, equivalence certificates, and reflection moves.

pub mod annulus;
pub mod corpus;
pub mod cuts;
pub mod equivalence;
pub mod error;
pub mod fixtures;
pub mod grading;
pub mod moves;
pub mod quiver;
pub mod surface;

pub use cuts::{AdmissibleCut, CutDistribution, LocalCut, Sliding};
pub use error::{Error, Result};
pub use quiver::{Arrow, GentleReport, Quiver, QuiverWithRelations};
pub use surface::{Corner, SurfaceFile, TriangleType, TriangulatedSurface, ValidationReport};

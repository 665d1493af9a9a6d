//! Visibility graphs of simple polygons and the machinery around them:
//! random and typed polygon generation, graph-preserving augmentation,
//! SDF rasterization with contour recovery, constrained Delaunay
//! triangulation with flip paths, and the evaluation harness used to score
//! reconstructed polygons against target graphs.

pub mod dataset;
pub mod error;
pub mod geom;
pub mod io;
pub mod metrics;
pub mod polygen;
pub mod render;
pub mod sdf;
pub mod triangulate;
pub mod visibility;

pub use error::{Error, Result};
pub use geom::{Point, PointLocation, Polygon};
pub use visibility::{EncodedGraph, HolePolygon, VisGraph};
pub use dataset::{DatasetRecord, PipelineConfig};
pub use metrics::{EdgeConfusion, RecognitionVerdict};
pub use sdf::SdfGrid;
pub use triangulate::{FlipPath, Triangulation};

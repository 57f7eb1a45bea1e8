//! Topological data analysis toolkit: simplicial homology over Z/2,
//! Vietoris-Rips persistent homology, bottleneck distance, mapper graphs,
//! CROCKER matrices and synthetic point-cloud generators.

pub mod cloud;
pub mod crocker;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod mapper;
pub mod persistence;
pub mod rips;
pub mod simplicial;
pub mod union_find;

pub use cloud::{generate, read_cloud, write_cloud, GeneratorSpec, PointCloud, Shape};
pub use crocker::{crocker, crocker_noise_floor, CrockerMatrix};
pub use diagram::{bottleneck_distance, diagram_from_barcode, DiagramPoint, PersistenceDiagram};
pub use error::{Error, Result};
pub use homology::{betti_numbers, rank_z2, BettiVector};
pub use mapper::{
    filter_values, mapper_graph, uniform_cover, Clustering, Cover, FilterKind, FilterValues, MapperGraph,
};
pub use persistence::{betti_curve, persistent_homology, rips_persistence, Barcode, PersistenceFeature};
pub use rips::{euclidean_distances, rips_complex, DistanceMatrix, FilteredCell, FilteredComplex};
pub use simplicial::{BoundaryMatrix, Simplex, SimplicialComplex};

//! Exact homology toolkit for Rips and Čech filtrations under Finsler-type
//! metrics: integer homology through Smith normal form, bad-prime detection,
//! persistence over prime fields and the rationals, and detection of
//! empty-simplex obstructions.

pub mod bigjson;
pub mod cech;
pub mod complex;
pub mod datasets;
pub mod error;
pub mod field;
pub mod homology;
pub mod metric;
pub mod obstruction;
pub mod persistence;
pub mod prime_guard;
pub mod primes;
pub mod snf;

pub use complex::{
    build_cech, build_filtration, build_rips, close_under_faces, Filtration, Flavor, Simplex, SimplicialComplex,
};
pub use error::{Error, Result};
pub use field::FieldSpec;
pub use homology::{betti_numbers, boundary_matrix, field_homology, integer_homology, uct_check, HomologyGroup};
pub use metric::{eval_norm, MetricKind, MetricSpec, PointCloud};
pub use obstruction::{
    capture_obstruction, find_empty_simplices, rips_representability, verify_vanishing, EmptySimplexWitness,
    ObstructionReport, Verdict,
};
pub use persistence::{compare_barcodes, persistent_homology, rank_invariant, Barcode, BarcodeDiff, Interval};
pub use prime_guard::{bad_primes_for_degree, bad_primes_for_filtration, certify_good_prime, PrimeReport};
pub use snf::{cokernel_structure, elementary_divisors_via_minors, smith_normal_form, IntegerMatrix, SnfResult};

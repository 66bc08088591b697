//! Fixed workloads shared by the benchmarks.

use lqcert::certify::PartitionSpec;

/// A slice of the first default strip at `delta = 1/2`: 200 rows of
/// `q` and the full `t` range, about 1.3 million cells.
pub fn strip_slice() -> PartitionSpec {
    PartitionSpec::new((0.0105, 2.0 / 3.0), (0.5, 0.52), 1e-4, 1e-4).expect("valid spec")
}

/// A single row just above the certified range, which forces refinement
/// and a witness search.
pub fn refuting_row() -> PartitionSpec {
    PartitionSpec::new((0.0105, 2.0 / 3.0), (0.9181, 0.9182), 1e-4, 1e-4).expect("valid spec")
}

//! Exact combinatorial linear algebra for bicolored quadriculated disks.
//!
//! The toolkit models disks glued from squares, traces diagonals from
//! corners, performs cut-and-paste surgery along good diagonals, and builds
//! the L·D·U factorization of the black-to-white matrix with every factor
//! entry in {-1, 0, 1}. Determinant, rank, integer solving and Smith normal
//! form oracles cross-check the factorization.

pub mod arith;
pub mod diagonal;
pub mod disk;
pub mod enumerate;
pub mod factor;
pub mod io;
pub mod matrix;
pub mod selftest;
pub mod surgery;

pub use disk::{Bicoloring, Color, DevelopingMap, DiskCounts, DiskError, QuadDisk, SquareId, VertexId};
pub use matrix::{DefectiveIdentity, IntMatrix};

//! Exact symbolic substrate.

pub mod expr;
pub mod gauss;
pub mod multi_index;
pub mod partitions;
pub mod poly;
pub mod rules;

pub use expr::{parse_poly, print_poly, VarPolicy};
pub use gauss::GaussRat;
pub use multi_index::MultiIndex;
pub use partitions::{enumerate_vector_partitions, VectorPartition};
pub use poly::{primitive_many, Poly, Var};
pub use rules::{
    deriv_sqrt_composition, deriv_square_composition, faa_di_bruno_radial, shift_product_rule,
};

#![no_std]
extern crate alloc;

pub mod certify;
pub mod clique;
pub mod cross_ratio;
pub mod digraph;
pub mod error;
pub mod field;
pub mod group;
pub mod matrix;
pub mod obstruction;
pub mod stabilizer;
pub mod tensor;
pub mod witness_table;

pub use error::{Error, Result};
pub use field::{Fp, PrimeModulus};
pub use matrix::Matrix;
pub use tensor::{tensor_apply, ProjPoint, Tensor, VertexSpace};

pub mod algebra;
pub mod construct;
pub mod contfrac;
pub mod galois;
pub mod jacobian_fp;
pub mod json;

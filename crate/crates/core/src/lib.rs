//! Inner functions on the bidisc: transfer-function realizations, Toeplitz
//! certificates of innerness, Agler and de Branges–Rovnyak kernels, and
//! factorization of inner functions into one-variable factors.

pub mod colligation;
pub mod factor;
pub mod fixtures;
pub mod function;
pub mod json;
pub mod kernels;
pub mod numlin;
pub mod toeplitz;

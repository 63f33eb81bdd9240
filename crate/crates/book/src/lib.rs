//! Each chapter of `book/src` becomes the documentation of one module, so
//! `cargo test --doc` compiles and runs every Rust listing in the book.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/polytopes.md")]
pub mod polytopes {}
#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}
#[doc = include_str!("../../../book/src/euler-maclaurin.md")]
pub mod euler_maclaurin {}
#[doc = include_str!("../../../book/src/local.md")]
pub mod local {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}

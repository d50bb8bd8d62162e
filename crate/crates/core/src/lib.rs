pub mod bundle;
pub mod calculus;
pub mod cli;
pub mod connection;
pub mod curvature;
pub mod dtensor;
pub mod error;
pub mod expr;
pub mod instances;
pub mod sample;
pub mod structure;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/bundles.md")]
    mod bundles {}
    #[doc = include_str!("../../../book/src/structures.md")]
    mod structures {}
    #[doc = include_str!("../../../book/src/connection.md")]
    mod connection {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    mod curvature {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

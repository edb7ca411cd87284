pub mod error;
pub mod liouville;
pub mod quadrature;
pub mod measures;
pub mod operator;
pub mod polynomial;
pub mod special_fn;
pub mod sphere;
pub mod symbols;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/operator.md")]
    mod operator {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    mod sphere {}
    #[doc = include_str!("../../../book/src/liouville.md")]
    mod liouville {}
}

//! Runs the book's code blocks as doctests.

#[doc = include_str!("../../../book/src/pell.md")]
pub mod chapter1 {}

#[doc = include_str!("../../../book/src/forms.md")]
pub mod chapter2 {}

#[doc = include_str!("../../../book/src/counting.md")]
pub mod chapter3 {}

#[doc = include_str!("../../../book/src/bianchi.md")]
pub mod chapter4 {}

#[doc = include_str!("../../../book/src/geometry.md")]
pub mod chapter5 {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter6 {}

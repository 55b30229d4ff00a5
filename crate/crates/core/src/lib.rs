//! Reassembly of a sequence from the fragments of two complete shotgun
//! cuttings, with a suffix-array prefix index, data-parallel radix sorting
//! primitives and superstring baselines.

pub mod assembler;
pub mod bench;
pub mod io;
pub mod overlap;
pub mod parallel;
pub mod seqmodel;
pub mod shotgun;
pub mod suffixarray;

pub use seqmodel::{AlphabetMode, Fragment, FragmentId, FragmentSet, Residual, SeqError, Sequence, SEP};

/// Book chapters, compiled as doctests so their snippets stay current.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/fragments.md")]
    pub mod fragments {}
    #[doc = include_str!("../../../book/src/assembly.md")]
    pub mod assembly {}
    #[doc = include_str!("../../../book/src/suffix-arrays.md")]
    pub mod suffix_arrays {}
    #[doc = include_str!("../../../book/src/parallel.md")]
    pub mod parallel {}
    #[doc = include_str!("../../../book/src/superstrings.md")]
    pub mod superstrings {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}

//! Finite-field laboratory for linear minimum-storage regenerating (MSR) codes.
//!
//! The crate models `{n = k + r, k, l}` systematic array codes given by an
//! `r x k` grid of invertible `l x l` encoding matrices, checks their MDS and
//! interference-alignment repair properties, builds the linear-independence
//! certificates behind the systematic-length bounds, evaluates those bounds
//! exactly, and searches tiny parameter spaces for valid codes.
//!
//! ```
//! use msrlab::format::CodeFile;
//! use msrlab::repair::{repair_node, verify_scheme};
//!
//! let text = "msrcode v1\nfield p=5 m=1\nparams n=4 k=2 l=2\n\
//!             C u=1 j=1\n1 0\n0 1\nC u=1 j=2\n1 0\n0 1\n\
//!             C u=2 j=1\n1 1\n0 2\nC u=2 j=2\n3 0\n1 1\n\
//!             S i=1\n1 0\nS i=2\n0 1\n";
//! let (code, scheme) = CodeFile::parse(text)?.into_code()?;
//! let scheme = scheme.unwrap();
//! assert!(code.mds_check().ok);
//! assert!(verify_scheme(&code, &scheme)?.ok);
//!
//! let f = code.field();
//! let data = vec![vec![f.elem(1)?, f.elem(2)?], vec![f.elem(0)?, f.elem(1)?]];
//! let out = repair_node(&code, &scheme, 0, &code.node_contents(&data)?)?;
//! assert_eq!(out.reconstructed, data[0]);
//! assert_eq!(out.downloaded_symbols, 3);
//! # Ok::<(), msrlab::Error>(())
//! ```

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod bounds;
pub mod certificates;
pub mod cli;
pub mod code;
pub mod error;
pub mod format;
pub mod repair;
pub mod search;
pub mod subspace;

pub use algebra::{FieldElement, FieldSpec, Matrix};
pub use code::{Code, CodeParams};
pub use error::{Error, Result};
pub use repair::RepairScheme;
pub use subspace::{Relation, Subspace};

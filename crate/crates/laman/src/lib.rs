//! Exact realization counting for minimally rigid graphs.
//!
//! A Laman graph is a connected simple graph with `|E| = 2|V| - 3` in which
//! every subgraph satisfies `|E'| <= 2|V'| - 3`; these are exactly the
//! graphs that are rigid in the plane for a general assignment of edge
//! lengths. For such a graph the number of complex realizations compatible
//! with a general labeling, counted up to direct isometries, is a finite
//! invariant of the graph. This crate computes that number exactly.
//!
//! The pieces:
//!
//! * [`graph`] — multigraphs and bigraphs with the contraction/deletion
//!   algebra everything else is built on.
//! * [`canon`] — exact isomorphism keys used for memoization and
//!   deduplication.
//! * [`check`] — the pebble-game Laman test and Henneberg construction
//!   sequences.
//! * [`count`] — the recursive engine computing the realization count of a
//!   bigraph.
//! * [`enumerate`] — catalogs of all Laman graphs on `n` vertices and
//!   extremal counts.
//! * [`oracle`] — an independent numeric cross-check that counts solutions
//!   of the defining polynomial system.
//! * [`format`] — edge-list and graph6 readers and writers.
//!
//! ```
//! use laman::graph::MultiGraph;
//! use laman::count::lam_graph;
//!
//! let triangle = MultiGraph::from_edges(&[(0, 1), (1, 2), (0, 2)]);
//! assert_eq!(lam_graph(&triangle).unwrap().get(), 2);
//! ```

pub mod canon;
pub mod check;
pub mod count;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod graph;
pub mod oracle;

pub use error::{Error, Result};

// The user guide's code blocks double as doc-tests so the book cannot
// drift from the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(graphs, "../../../book/src/graphs.md");
    chapter!(laman_graphs, "../../../book/src/laman-graphs.md");
    chapter!(counting, "../../../book/src/counting.md");
    chapter!(enumeration, "../../../book/src/enumeration.md");
    chapter!(oracle, "../../../book/src/oracle.md");
    chapter!(cli, "../../../book/src/cli.md");
}

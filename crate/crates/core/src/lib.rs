//! Tree++ graph kernel: path patterns of truncated BFS trees, enriched with
//! super paths whose vertices carry the signatures of their own BFS trees.
//!
//! ```
//! use treepp::{example_pair, treepp_kernel_matrix, Dataset, TreeppParams};
//!
//! let (g1, g2) = example_pair();
//! let ds = Dataset::unlabeled("pair", vec![g1, g2]);
//! let k = treepp_kernel_matrix(&ds, TreeppParams::new(1, 0, false)).unwrap();
//! assert_eq!(k.get(0, 1), 42.0);
//! ```

pub mod centrality;
pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod tree;

pub use centrality::{default_centrality, eigenvector_centrality, CentralityVector};
pub use error::{Error, Result};
pub use eval::{cross_validate, train_svm, CvConfig, CvResult, SvmModel};
pub use graph::{build_graph, example_pair, graph_stats, Dataset, DatasetStats, Graph, Label};
pub use io::{load_edgelist_graph, load_tu_dataset, write_matrix, MatrixFormat, ParseReport};
pub use kernel::{
    compute_treepp, extract_features, kernel_level, normalize_matrix, oracle_kernel, treepp_kernel_matrix,
    wl_subtree_kernel_matrix, FeatureMap, KernelMatrix, TreeppParams,
};
pub use tree::{build_bfs_tree, canonical_pattern, enumerate_paths, BfsTree, PathPattern, TreeSignature};

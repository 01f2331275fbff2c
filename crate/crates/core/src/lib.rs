//! Verifiers, bound evaluators, and exhaustive search for 2̄-separable,
//! frameproof, and B₂ codes.
//!
//! * [`code`]: codes, the text file format, prefix partitions.
//! * [`predicates`]: exact property checks with counterexample witnesses.
//! * [`phimap`]: the suffix-pair maps and their injectivity on a partition.
//! * [`bounds`]: rate bounds, constrained entropy maxima, proof-chain
//!   verification, CSV curves.
//! * [`search`]: deterministic exhaustive maximum-code search.
//! * [`cli`]: the `sepcodes` command line.

pub mod bounds;
pub mod cli;
pub mod code;
pub mod phimap;
pub mod predicates;
pub mod search;

pub use code::{parse_code, partition_by_prefix, Code, CodeError, CodeParams, Codeword, PrefixPartition};
pub use phimap::PhiVariant;
pub use predicates::{CodeProperty, Violation};
pub use search::{max_code_search, SearchConfig, SearchResult};

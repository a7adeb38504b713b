//! Dense complex linear algebra over multipartite Hilbert spaces.

pub mod json;
pub mod linalg;
pub mod matrix;
pub mod op;
pub mod space;
pub mod state;
pub mod subspace;

pub use linalg::{eigh, eigvalsh, is_psd_exact, min_eigenvalue, top_eigenpair, Eigh};
pub use matrix::{inner, kron_vec, norm_sqr, outer, CMatrix};
pub use op::{contract, HermitianOp};
pub use space::{Bipartition, HilbertSpace};
pub use state::PureState;
pub use subspace::{Subspace, DEFAULT_RANK_TOL};

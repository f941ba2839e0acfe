//! Graphon-based pre/post-intervention network model.
//!
//! Both networks are drawn from the same latent variables `w` and the same
//! pairwise disturbances `eta`; only the kernel differs, and the
//! post-intervention kernel may depend on the treatments of both endpoints.

mod adjacency;
mod disturbance;
mod kernel;
mod latents;
mod sparsity;

pub use adjacency::{generate_network, Adjacency, DENSE_LIMIT};
pub(crate) use adjacency::check_treatments;
pub use disturbance::{sample_disturbances, DisturbanceMatrix};
pub use kernel::{kernel_value, CustomKernel, GraphonSpec, Phase, PreparedKernel};
pub use latents::{sample_latents, LatentDistribution, LatentDraws};
pub use sparsity::SparsityRate;

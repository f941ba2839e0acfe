//! Estimation of direct, indirect and spillover effects of a randomized
//! treatment when the treatment also rewires the network it spills over.
//!
//! The mediator is each unit's share of treated neighbors in the
//! post-intervention network. OLS on it is biased when link formation shares
//! unobservables with the outcome; the shift-share instrument
//! `z_i = sum_j a_ij^pre (T_j - pi)` built on the pre-intervention network
//! restores identification, and projecting out the leading eigenvectors of
//! that network keeps it informative in dense regimes.
//!
//! - [`graph_model`]: graphon kernels, sparsity rates and coupled pre/post networks.
//! - [`mediator`]: treated-neighbor mediators and the `xi` identification diagnostic.
//! - [`outcome`]: outcome models and the population-estimand oracle.
//! - [`estimators`]: OLS and IV fits, instruments, eigenbases and rank selection.
//! - [`variance`]: HC and network-dependence sandwich variances.
//! - [`montecarlo`]: seeded parallel simulation and published-table reproduction.
//! - [`empirical`]: CSV panel loading and the estimator battery on real data.
//! - [`cli`]: the `netiv` command line.

pub mod error;
pub mod graph_model;
pub mod mediator;
pub mod outcome;
pub mod rng;
pub mod stats;
pub mod estimators;
pub mod variance;
pub mod pipeline;
pub mod montecarlo;
pub mod empirical;
pub mod cli;

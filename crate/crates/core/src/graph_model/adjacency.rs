use crate::error::{Error, Result};

use super::disturbance::DisturbanceMatrix;
use super::kernel::{GraphonSpec, Phase};
use super::latents::LatentDraws;
use super::sparsity::SparsityRate;

/// Networks up to this size also keep a dense bit matrix for O(1) lookups.
pub const DENSE_LIMIT: usize = 4096;

/// Undirected, unweighted network without self-links.
///
/// Neighbor lists are always stored (sorted, CSR layout); graphs with at most
/// [`DENSE_LIMIT`] nodes additionally carry a packed bit matrix. Both layouts
/// answer the same queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    dense: Option<DenseBits>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct DenseBits {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl DenseBits {
    fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self { words_per_row, bits: vec![0; words_per_row * n] }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }
}

impl Adjacency {
    /// Builds a graph from sorted, duplicate-free, symmetric neighbor lists.
    fn from_sorted_lists(lists: Vec<Vec<u32>>) -> Self {
        let n = lists.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for l in &lists {
            neighbors.extend_from_slice(l);
            offsets.push(neighbors.len());
        }
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut d = DenseBits::new(n);
            for (i, l) in lists.iter().enumerate() {
                for &j in l {
                    d.set(i, j as usize);
                }
            }
            d
        });
        Self { n, offsets, neighbors, dense }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_lists(vec![Vec::new(); n])
    }

    pub fn complete(n: usize) -> Self {
        Self::from_sorted_lists(
            (0..n).map(|i| (0..n as u32).filter(|&j| j as usize != i).collect()).collect(),
        )
    }

    /// Builds a graph from undirected edges. Each pair may appear in either or
    /// both orientations and repeatedly; self-links are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut lists = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("edge ({i}, {j}) out of range for {n} nodes")));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-link on node {i}")));
            }
            lists[i].push(j as u32);
            lists[j].push(i as u32);
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Self::from_sorted_lists(lists))
    }

    /// Builds a graph from a dense 0/1 matrix, checking symmetry and the diagonal.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let mut lists = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInput(format!("row {i} has {} columns, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 if i == j => return Err(Error::InvalidInput(format!("self-link on node {i}"))),
                    1 if rows[j][i] != 1 => {
                        return Err(Error::InvalidInput(format!("asymmetric entry ({i}, {j})")))
                    }
                    1 => lists[i].push(j as u32),
                    other => return Err(Error::InvalidInput(format!("non-binary entry {other} at ({i}, {j})"))),
                }
            }
        }
        Ok(Self::from_sorted_lists(lists))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        match &self.dense {
            Some(d) => d.get(i, j),
            None => self.neighbors(i).binary_search(&(j as u32)).is_ok(),
        }
    }

    /// Edges with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i).iter().map(|&j| j as usize).filter(move |&j| j > i).map(move |j| (i, j))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.n]; self.n];
        for (i, row) in m.iter_mut().enumerate() {
            for &j in self.neighbors(i) {
                row[j as usize] = 1;
            }
        }
        m
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(i).iter().map(|&j| x[j as usize]).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(x, &mut out);
        out
    }

    /// Subgraph induced by `keep` (indices into this graph), relabelled in
    /// the order given.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut map = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new as u32;
        }
        let lists = keep
            .iter()
            .map(|&old| {
                let mut l: Vec<u32> =
                    self.neighbors(old).iter().map(|&j| map[j as usize]).filter(|&j| j != u32::MAX).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Self::from_sorted_lists(lists)
    }

    /// Same graph with node `i` relabelled to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut lists = vec![Vec::new(); self.n];
        for i in 0..self.n {
            let mut l: Vec<u32> = self.neighbors(i).iter().map(|&j| perm[j as usize] as u32).collect();
            l.sort_unstable();
            lists[perm[i]] = l;
        }
        Self::from_sorted_lists(lists)
    }
}

/// Checks that treatments are a binary vector of the expected length.
pub(crate) fn check_treatments(t: &[u8], n: usize) -> Result<()> {
    if t.len() != n {
        return Err(Error::InvalidInput(format!("treatment vector has length {}, expected {n}", t.len())));
    }
    if let Some(bad) = t.iter().find(|&&x| x > 1) {
        return Err(Error::InvalidInput(format!("treatments must be 0 or 1, found {bad}")));
    }
    Ok(())
}

/// Samples `A_ij = 1{eta_ij <= q(n) g(w_i, w_j, T_i, T_j)}` for all `i < j`.
///
/// Pre and post networks drawn from the same `eta` and latents are coupled
/// through the shared disturbances.
pub fn generate_network(
    spec: &GraphonSpec,
    phase: Phase,
    q: SparsityRate,
    latents: &LatentDraws,
    treatments: Option<&[u8]>,
    eta: &DisturbanceMatrix,
) -> Result<Adjacency> {
    let n = latents.len();
    if eta.n() != n {
        return Err(Error::InvalidInput(format!("disturbances are {}x{0}, latents have length {n}", eta.n())));
    }
    q.validate()?;
    let zeros;
    let t = match (phase, treatments) {
        (_, Some(t)) => {
            check_treatments(t, n)?;
            t
        }
        (Phase::Pre, None) => {
            zeros = vec![0u8; n];
            &zeros
        }
        (Phase::Post, None) => {
            return Err(Error::InvalidInput("post-intervention network requires treatments".into()))
        }
    };
    let scale = q.resolve(n);
    let kernel = spec.prepare(phase, &latents.w);
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        let row = eta.upper_row(i);
        let ti = t[i];
        for (k, &e) in row.iter().enumerate() {
            let j = i + 1 + k;
            let g = kernel.value(i, ti, j, t[j]);
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidConfig(format!(
                    "kernel `{}` returned {g} outside [0, 1] for pair ({i}, {j})",
                    spec.name()
                )));
            }
            if e <= scale * g {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
    }
    Ok(Adjacency::from_sorted_lists(lists))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::kernel::CustomKernel;
    use crate::graph_model::{sample_disturbances, sample_latents, LatentDistribution};

    #[test]
    fn zero_and_one_kernels() {
        let lat = sample_latents(12, 1, LatentDistribution::StandardNormal).unwrap();
        let eta = sample_disturbances(12, 2).unwrap();
        let t = vec![1u8; 12];
        let zero = GraphonSpec::Custom(CustomKernel::constant(0.0));
        let a = generate_network(&zero, Phase::Post, SparsityRate::Constant(1.0), &lat, Some(&t), &eta).unwrap();
        assert_eq!(a.edge_count(), 0);
        let one = GraphonSpec::Custom(CustomKernel::constant(1.0));
        let a = generate_network(&one, Phase::Pre, SparsityRate::Constant(1.0), &lat, None, &eta).unwrap();
        assert_eq!(a, Adjacency::complete(12));
    }

    #[test]
    fn post_requires_treatments() {
        let lat = sample_latents(5, 1, LatentDistribution::StandardNormal).unwrap();
        let eta = sample_disturbances(5, 2).unwrap();
        let r = generate_network(&GraphonSpec::Sbm3, Phase::Post, SparsityRate::Constant(1.0), &lat, None, &eta);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn out_of_range_custom_kernel() {
        let lat = sample_latents(5, 1, LatentDistribution::StandardNormal).unwrap();
        let eta = sample_disturbances(5, 2).unwrap();
        let bad = GraphonSpec::Custom(CustomKernel::constant(1.5));
        let r = generate_network(&bad, Phase::Pre, SparsityRate::Constant(1.0), &lat, None, &eta);
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn dense_and_sparse_layouts_agree() {
        let a = Adjacency::from_edges(5, [(0, 1), (1, 0), (3, 4), (1, 3), (1, 3)]).unwrap();
        assert_eq!(a.edge_count(), 3);
        assert_eq!(a.neighbors(1), &[0, 3]);
        let mut sparse = a.clone();
        sparse.dense = None;
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(a.contains(i, j), sparse.contains(i, j));
            }
        }
        assert_eq!(Adjacency::from_dense(&a.to_dense()).unwrap(), a);
        assert!(Adjacency::from_edges(3, [(1, 1)]).is_err());
        assert!(Adjacency::from_dense(&[vec![0, 1], vec![0, 0]]).is_err());
    }

    #[test]
    fn induced_and_permuted() {
        let a = Adjacency::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let sub = a.induced(&[1, 2, 3]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let p = a.permuted(&[3, 2, 1, 0]);
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3)]);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const QUTRIT_DIM: usize = 3;

/// Level indices of a ladder-type qutrit.
pub const G: usize = 0;
pub const E: usize = 1;
pub const F: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubsystemKind {
    Qutrit,
    Cavity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemSpec {
    kind: SubsystemKind,
    dim: usize,
    label: String,
}

impl SubsystemSpec {
    pub fn qutrit(label: impl Into<String>) -> Self {
        Self { kind: SubsystemKind::Qutrit, dim: QUTRIT_DIM, label: label.into() }
    }

    pub fn cavity(label: impl Into<String>, fock_dim: usize) -> Result<Self> {
        if fock_dim < 2 {
            return Err(Error::InvalidDimension { dim: fock_dim, reason: "cavity Fock truncation must be at least 2" });
        }
        Ok(Self { kind: SubsystemKind::Cavity, dim: fock_dim, label: label.into() })
    }

    pub fn kind(&self) -> SubsystemKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Tensor-product structure of the cavity network.
///
/// Subsystems are flattened as cavity 1, its qutrits `1..m_1`, cavity 2, its
/// qutrits, ..., and finally the coupler qutrits. The leftmost factor is the
/// slowest-varying one in the flattened basis index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkLayout {
    cavities: Vec<SubsystemSpec>,
    groups: Vec<Vec<SubsystemSpec>>,
    couplers: Vec<SubsystemSpec>,
    adjacency: Vec<(usize, usize)>,
    order: Vec<SubsystemSpec>,
    cavity_pos: Vec<usize>,
    qutrit_pos: Vec<Vec<usize>>,
    coupler_pos: Vec<usize>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl NetworkLayout {
    /// Builds a layout with `group_sizes[l]` qutrits hosted in cavity `l`,
    /// `n_couplers` coupler qutrits (coupler `k` bridges cavities `k` and
    /// `k + 1`) and the given crosstalk adjacency.
    pub fn new(
        group_sizes: &[usize],
        fock_dim: usize,
        n_couplers: usize,
        adjacency: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = group_sizes.len();
        if n == 0 {
            return Err(Error::Layout("at least one cavity is required".into()));
        }
        if n_couplers > 0 && n_couplers + 1 > n {
            return Err(Error::Layout(format!("{n_couplers} couplers need at least {} cavities", n_couplers + 1)));
        }
        let mut adjacency: Vec<(usize, usize)> =
            adjacency.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        adjacency.sort_unstable();
        adjacency.dedup();
        for &(a, b) in &adjacency {
            if a == b || b >= n {
                return Err(Error::Layout(format!("adjacency pair ({a}, {b}) is not a pair of distinct cavities")));
            }
        }

        let mut cavities = Vec::with_capacity(n);
        let mut groups = Vec::with_capacity(n);
        let mut order = Vec::new();
        let mut cavity_pos = Vec::with_capacity(n);
        let mut qutrit_pos = Vec::with_capacity(n);
        for (l, &m) in group_sizes.iter().enumerate() {
            let cav = SubsystemSpec::cavity(format!("c{}", l + 1), fock_dim)?;
            cavity_pos.push(order.len());
            order.push(cav.clone());
            cavities.push(cav);
            let mut group = Vec::with_capacity(m);
            let mut pos = Vec::with_capacity(m);
            for j in 0..m {
                let q = SubsystemSpec::qutrit(format!("q_{}_{}", l + 1, j + 1));
                pos.push(order.len());
                order.push(q.clone());
                group.push(q);
            }
            groups.push(group);
            qutrit_pos.push(pos);
        }
        let mut couplers = Vec::with_capacity(n_couplers);
        let mut coupler_pos = Vec::with_capacity(n_couplers);
        for k in 0..n_couplers {
            let q = SubsystemSpec::qutrit(format!("coupler_{}", k + 1));
            coupler_pos.push(order.len());
            order.push(q.clone());
            couplers.push(q);
        }

        let dims: Vec<usize> = order.iter().map(SubsystemSpec::dim).collect();
        let mut total_dim: usize = 1;
        for &d in &dims {
            total_dim = total_dim
                .checked_mul(d)
                .ok_or_else(|| Error::Layout("total Hilbert dimension overflows usize".into()))?;
        }
        let strides = strides_of(&dims);
        Ok(Self { cavities, groups, couplers, adjacency, order, cavity_pos, qutrit_pos, coupler_pos, dims, strides, total_dim })
    }

    /// `n` cavities in a line, each with `m` qutrits, nearest neighbours adjacent.
    pub fn chain(n: usize, m: usize, fock_dim: usize) -> Result<Self> {
        Self::new(&vec![m; n], fock_dim, 0, chain_pairs(n))
    }

    pub fn n_cavities(&self) -> usize {
        self.cavities.len()
    }

    pub fn n_couplers(&self) -> usize {
        self.couplers.len()
    }

    pub fn group_size(&self, cavity: usize) -> usize {
        self.groups[cavity].len()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn fock_dim(&self) -> usize {
        self.cavities[0].dim()
    }

    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.order
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn check_cavity(&self, cavity: usize) -> Result<()> {
        if cavity < self.n_cavities() {
            Ok(())
        } else {
            Err(Error::InvalidCavity { index: cavity, count: self.n_cavities() })
        }
    }

    /// Position of cavity `l` in the flattened subsystem order.
    pub fn cavity_subsystem(&self, cavity: usize) -> usize {
        self.cavity_pos[cavity]
    }

    /// Position of qutrit `j` (0-based) of cavity `l`.
    pub fn qutrit_subsystem(&self, cavity: usize, j: usize) -> usize {
        self.qutrit_pos[cavity][j]
    }

    /// Qutrits `1_l .. (m-1)_l`, which take part in the dispersive step and
    /// the pulse.
    pub fn active_qutrits(&self, cavity: usize) -> &[usize] {
        let pos = &self.qutrit_pos[cavity];
        &pos[..pos.len().saturating_sub(1)]
    }

    /// Qutrit `m_l`, resonantly coupled during step 2.
    pub fn resonant_qutrit(&self, cavity: usize) -> Option<usize> {
        self.qutrit_pos[cavity].last().copied()
    }

    pub fn coupler_subsystem(&self, k: usize) -> usize {
        self.coupler_pos[k]
    }

    /// All qutrit positions (group qutrits and couplers).
    pub fn all_qutrits(&self) -> impl Iterator<Item = usize> + '_ {
        self.qutrit_pos.iter().flatten().copied().chain(self.coupler_pos.iter().copied())
    }

    /// Flattened index of a product basis state given per-subsystem levels.
    pub fn basis_index(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { left: levels.len(), right: self.dims.len() });
        }
        let mut idx = 0;
        for ((&lv, &d), &s) in levels.iter().zip(&self.dims).zip(&self.strides) {
            if lv >= d {
                return Err(Error::InvalidDimension { dim: d, reason: "basis level out of range" });
            }
            idx += lv * s;
        }
        Ok(idx)
    }

    /// Per-subsystem levels of a flattened basis index.
    pub fn basis_levels(&self, index: usize) -> Vec<usize> {
        digits_of(index, &self.dims)
    }
}

pub(crate) fn chain_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|j| (j - 1, j)).collect()
}

pub(crate) fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

pub(crate) fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = index % dims[i];
        index /= dims[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_dimension() {
        let layout = NetworkLayout::new(&[2, 3], 2, 0, vec![(0, 1)]).unwrap();
        let labels: Vec<&str> = layout.subsystems().iter().map(|s| s.label()).collect();
        assert_eq!(labels, ["c1", "q_1_1", "q_1_2", "c2", "q_2_1", "q_2_2", "q_2_3"]);
        assert_eq!(layout.total_dim(), 2 * 9 * 2 * 27);
        assert_eq!(layout.active_qutrits(1), &[4, 5]);
        assert_eq!(layout.resonant_qutrit(1), Some(6));
    }

    #[test]
    fn couplers_are_last() {
        let layout = NetworkLayout::new(&[0, 0, 0, 0], 3, 3, chain_pairs(4)).unwrap();
        assert_eq!(layout.coupler_subsystem(0), 4);
        assert_eq!(layout.total_dim(), 3usize.pow(7));
    }

    #[test]
    fn rejects_bad_adjacency_and_fock() {
        assert!(NetworkLayout::new(&[1, 1], 2, 0, vec![(0, 0)]).is_err());
        assert!(NetworkLayout::new(&[1, 1], 2, 0, vec![(0, 2)]).is_err());
        assert!(matches!(SubsystemSpec::cavity("c", 1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn basis_index_round_trip() {
        let layout = NetworkLayout::chain(2, 2, 3).unwrap();
        for idx in 0..layout.total_dim() {
            let levels = layout.basis_levels(idx);
            assert_eq!(layout.basis_index(&levels).unwrap(), idx);
        }
    }
}

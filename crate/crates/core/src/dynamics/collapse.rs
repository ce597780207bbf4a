use crate::hamiltonian::DeviceParams;
use crate::hilbert::{embed, local_annihilation, local_projector, local_transition, NetworkLayout, OperatorMatrix, E, F, G, QUTRIT_DIM};
use crate::error::Result;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CollapseKind {
    CavityDecay,
    RelaxEG,
    RelaxFE,
    RelaxFG,
    DephE,
    DephF,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseEntry<T: Real> {
    pub op: OperatorMatrix<T>,
    pub rate: f64,
    pub kind: CollapseKind,
    /// Position of the subsystem the operator acts on.
    pub subsystem: usize,
}

/// Collapse operators with their rates. Dephasing enters through the level
/// projectors, `L[σ_ee]ρ = σ_ee ρ σ_ee − σ_ee ρ/2 − ρ σ_ee/2`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CollapseSet<T: Real> {
    entries: Vec<CollapseEntry<T>>,
}

impl<T: Real> CollapseSet<T> {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[CollapseEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with zero rate are dropped.
    pub fn push(&mut self, entry: CollapseEntry<T>) {
        assert!(entry.rate >= 0.0, "collapse rates must be non-negative");
        if entry.rate > 0.0 {
            self.entries.push(entry);
        }
    }

    pub fn max_rate(&self) -> f64 {
        self.entries.iter().map(|e| e.rate).fold(0.0, f64::max)
    }
}

/// One decay channel per cavity and, for every qutrit (couplers included),
/// the three relaxation channels and the two dephasing channels.
pub fn build_collapse_set<T: Real>(layout: &NetworkLayout, params: &DeviceParams) -> Result<CollapseSet<T>> {
    let mut set = CollapseSet::empty();
    let a = local_annihilation::<T>(layout.fock_dim())?;
    for l in 0..layout.n_cavities() {
        let kappa = params.cavity(l)?.kappa;
        if kappa > 0.0 {
            let sub = layout.cavity_subsystem(l);
            set.push(CollapseEntry { op: embed(&a, sub, layout)?, rate: kappa, kind: CollapseKind::CavityDecay, subsystem: sub });
        }
    }
    let r = &params.rates;
    let channels = [
        (CollapseKind::RelaxEG, r.gamma_eg, local_transition::<T>(QUTRIT_DIM, G, E)?),
        (CollapseKind::RelaxFE, r.gamma_fe, local_transition::<T>(QUTRIT_DIM, E, F)?),
        (CollapseKind::RelaxFG, r.gamma_fg, local_transition::<T>(QUTRIT_DIM, G, F)?),
        (CollapseKind::DephE, r.gamma_phi_e, local_projector::<T>(QUTRIT_DIM, E)?),
        (CollapseKind::DephF, r.gamma_phi_f, local_projector::<T>(QUTRIT_DIM, F)?),
    ];
    for q in layout.all_qutrits() {
        for (kind, rate, op) in &channels {
            if *rate > 0.0 {
                set.push(CollapseEntry { op: embed(op, q, layout)?, rate: *rate, kind: *kind, subsystem: q });
            }
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::mhz;

    #[test]
    fn zero_rates_give_empty_set() {
        let layout = NetworkLayout::chain(2, 2, 2).unwrap();
        let p = DeviceParams::transmon(2, mhz(10.0), 0.0).without_decoherence();
        assert!(build_collapse_set::<f64>(&layout, &p).unwrap().is_empty());
    }

    #[test]
    fn channel_count_per_subsystem() {
        let layout = NetworkLayout::chain(2, 2, 2).unwrap();
        let p = DeviceParams::transmon(2, mhz(14.15), 0.1);
        let set = build_collapse_set::<f64>(&layout, &p).unwrap();
        assert_eq!(set.len(), 2 + 4 * 5);
    }

    #[test]
    fn dephasing_uses_projectors_on_single_subsystems() {
        let layout = NetworkLayout::chain(1, 1, 2).unwrap();
        let p = DeviceParams::transmon(1, mhz(10.0), 0.1);
        let set = build_collapse_set::<f64>(&layout, &p).unwrap();
        let deph = set.entries().iter().find(|e| e.kind == CollapseKind::DephE).unwrap();
        assert!(deph.op.is_diagonal());
        assert_eq!(deph.subsystem, 1);
        assert_eq!(deph.op, embed(&local_projector(3, E).unwrap(), 1, &layout).unwrap());
    }

    #[test]
    fn couplers_get_qutrit_channels() {
        let layout = NetworkLayout::new(&[0, 0], 3, 1, vec![]).unwrap();
        let p = DeviceParams::transmon(2, mhz(10.0), 0.1);
        let set = build_collapse_set::<f64>(&layout, &p).unwrap();
        assert_eq!(set.len(), 2 + 5);
    }
}

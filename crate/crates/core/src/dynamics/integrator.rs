use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::collapse::CollapseSet;
use crate::error::{Error, Result};
use crate::hamiltonian::ModulatedHamiltonian;
use crate::hilbert::{vector_norm, DenseMatrix};
use crate::scalar::{cis, czero, Cplx, Real};

/// Drift beyond which a run is rejected as under-resolved.
pub const DRIFT_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryChecks {
    pub trace: bool,
    pub hermiticity: bool,
    pub norm: bool,
    pub positivity: bool,
}

impl Default for BoundaryChecks {
    fn default() -> Self {
        Self { trace: true, hermiticity: true, norm: true, positivity: true }
    }
}

/// Fixed-step RK4 settings. The step is
/// `min(dt, f_ν·2π/max|ν|, f_H/‖H‖, f_γ/max γ)`, shortened so that an integer
/// number of steps spans each segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Optional upper bound on the step (µs).
    pub dt: Option<f64>,
    /// Fraction of the fastest modulation period.
    pub max_step_frequency_factor: f64,
    /// Largest phase `‖H‖·dt` accumulated per step.
    pub norm_step_factor: f64,
    /// Largest `γ·dt` per step.
    pub rate_step_factor: f64,
    pub checks: BoundaryChecks,
    pub vector_cap: usize,
    pub density_cap: usize,
    /// Keep the state after every segment of a schedule.
    pub keep_snapshots: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            dt: None,
            max_step_frequency_factor: 0.02,
            norm_step_factor: 0.005,
            rate_step_factor: 0.02,
            checks: BoundaryChecks::default(),
            vector_cap: 200_000,
            density_cap: 2_000,
            keep_snapshots: true,
        }
    }
}

impl IntegratorConfig {
    /// Same configuration with every step-size factor scaled by `k`.
    pub fn refined(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.dt = out.dt.map(|d| d * k);
        out.max_step_frequency_factor *= k;
        out.norm_step_factor *= k;
        out.rate_step_factor *= k;
        out
    }

    pub fn validate(&self) -> Result<()> {
        let factors = [self.max_step_frequency_factor, self.norm_step_factor, self.rate_step_factor];
        if factors.iter().any(|f| !(*f > 0.0) || !f.is_finite()) || self.dt.is_some_and(|d| !(d > 0.0)) {
            return Err(Error::Config("integrator step factors and dt must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps and step length for a segment of length `duration`.
    pub fn steps_for<T: Real>(&self, h: &ModulatedHamiltonian<T>, collapse: Option<&CollapseSet<T>>, duration: f64) -> (usize, f64) {
        if duration <= 0.0 {
            return (0, 0.0);
        }
        let mut dt = self.dt.unwrap_or(f64::INFINITY).min(duration);
        let nu = h.max_frequency();
        if nu > 0.0 {
            dt = dt.min(self.max_step_frequency_factor * 2.0 * PI / nu);
        }
        let norm = h.norm_bound();
        if norm > 0.0 {
            dt = dt.min(self.norm_step_factor / norm);
        }
        if let Some(c) = collapse {
            let rate = c.entries().iter().map(|e| e.rate * e.op.max_column_sum().powi(2)).fold(0.0, f64::max);
            if rate > 0.0 {
                dt = dt.min(self.rate_step_factor / rate);
            }
        }
        let n = (duration / dt).ceil().max(1.0) as usize;
        (n, duration / n as f64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub steps: usize,
    pub dt: f64,
    /// Largest |‖ψ‖ − 1| or |Tr ρ − 1| seen at any step.
    pub max_trace_error: f64,
    pub final_hermiticity_error: f64,
}

type Entries<T> = Vec<(usize, usize, Cplx<T>)>;

/// Right-hand side `X ↦ K(t) X` (plus jumps for density matrices), with
/// `K = −iH − ½ Σ γ L†L`.
struct Rhs<T: Real> {
    dim: usize,
    static_part: Entries<T>,
    /// Entries multiplied by `e^{iνt}`.
    modulated: Vec<(T, Entries<T>)>,
    /// Static and modulated entries together, sorted by row; the last field
    /// is 0 for static entries and `k + 1` for group `k` of `modulated`.
    by_row: Vec<(usize, usize, Cplx<T>, usize)>,
    /// Jump terms of operators with at most one entry per row and column.
    monomial_jumps: Vec<MonomialJump<T>>,
    /// Other jump operators `(γ, L)`.
    general_jumps: Vec<(T, Entries<T>)>,
    /// `Σ γ d_i conj(d_j)` for diagonal collapse operators, row-major.
    diagonal_weights: Option<Values<T>>,
}

#[derive(Clone, Debug)]
enum Values<T: Real> {
    Real(Vec<T>),
    Complex(Vec<Cplx<T>>),
}

impl<T: Real> Values<T> {
    fn from_complex(v: Vec<Cplx<T>>) -> Self {
        if v.iter().all(|z| z.im == T::zero()) {
            Self::Real(v.into_iter().map(|z| z.re).collect())
        } else {
            Self::Complex(v)
        }
    }

}

/// `√γ L` for an operator with one entry per used row: `L[rows[k], src[k]]`.
/// `runs` lists `(k, len)` blocks in which both indices advance by one.
#[derive(Clone, Debug)]
struct MonomialJump<T: Real> {
    rows: Vec<usize>,
    src: Vec<usize>,
    vals: Values<T>,
    runs: Vec<(usize, usize)>,
}

impl<T: Real> MonomialJump<T> {
    fn new(entries: &[(usize, usize, Cplx<T>)], scale: T) -> Self {
        let rows: Vec<usize> = entries.iter().map(|e| e.0).collect();
        let src: Vec<usize> = entries.iter().map(|e| e.1).collect();
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for k in 0..rows.len() {
            match runs.last_mut() {
                Some((start, len)) if rows[*start] + *len == rows[k] && src[*start] + *len == src[k] => *len += 1,
                _ => runs.push((k, 1)),
            }
        }
        let vals = Values::from_complex(entries.iter().map(|e| e.2 * scale).collect());
        Self { rows, src, vals, runs }
    }

    /// `out[i, j] += Σ l_i conj(l_j) ρ[p(i), p(j)]`.
    fn apply(&self, n: usize, rho: &[Cplx<T>], out: &mut [Cplx<T>]) {
        for (a, (&i, &pi)) in self.rows.iter().zip(&self.src).enumerate() {
            let src = &rho[pi * n..(pi + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for &(k, len) in &self.runs {
                let (j, pj) = (self.rows[k], self.src[k]);
                let d = &mut dst[j..j + len];
                let s = &src[pj..pj + len];
                match &self.vals {
                    Values::Real(v) => {
                        let li = v[a];
                        for ((d, s), lj) in d.iter_mut().zip(s).zip(&v[k..k + len]) {
                            *d += *s * (li * *lj);
                        }
                    }
                    Values::Complex(v) => {
                        let li = v[a];
                        for ((d, s), lj) in d.iter_mut().zip(s).zip(&v[k..k + len]) {
                            *d += *s * (li * lj.conj());
                        }
                    }
                }
            }
        }
    }
}

fn merge(entries: impl IntoIterator<Item = (usize, usize, Cplx<f64>)>) -> BTreeMap<(usize, usize), Cplx<f64>> {
    let mut map = BTreeMap::new();
    for (r, c, v) in entries {
        *map.entry((r, c)).or_insert_with(czero) += v;
    }
    map
}

fn to_entries<T: Real>(map: BTreeMap<(usize, usize), Cplx<f64>>) -> Entries<T> {
    map.into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|((r, c), v)| (r, c, Cplx::new(T::of(v.re), T::of(v.im))))
        .collect()
}

fn lossless<T: Real>(v: Cplx<T>) -> Cplx<f64> {
    Cplx::new(v.re.to_f64_lossy(), v.im.to_f64_lossy())
}

impl<T: Real> Rhs<T> {
    fn new(h: &ModulatedHamiltonian<T>, collapse: Option<&CollapseSet<T>>) -> Self {
        let dim = h.dim();
        let minus_i = Cplx::new(0.0, -1.0);
        let mut static_terms: Vec<(usize, usize, Cplx<f64>)> = Vec::new();
        let mut by_freq: BTreeMap<u64, (f64, Vec<(usize, usize, Cplx<f64>)>)> = BTreeMap::new();
        for term in h.terms() {
            let nu = term.nu.to_f64_lossy();
            let direct = term.op.entries().iter().map(|&(r, c, v)| (r, c, minus_i * lossless(v)));
            let adjoint: Vec<_> = if term.with_adjoint {
                term.op.entries().iter().map(|&(r, c, v)| (c, r, minus_i * lossless(v).conj())).collect()
            } else {
                Vec::new()
            };
            if nu == 0.0 {
                static_terms.extend(direct);
                static_terms.extend(adjoint);
            } else {
                by_freq.entry(nu.to_bits()).or_insert_with(|| (nu, Vec::new())).1.extend(direct);
                by_freq.entry((-nu).to_bits()).or_insert_with(|| (-nu, Vec::new())).1.extend(adjoint);
            }
        }

        let mut monomial_jumps = Vec::new();
        let mut general_jumps = Vec::new();
        let mut diagonal_weights: Option<Vec<Cplx<T>>> = None;
        if let Some(set) = collapse {
            for entry in set.entries() {
                let rate = entry.rate;
                let op = &entry.op;
                // -½ γ L†L
                let ldl = op.adjoint().mul(op).expect("collapse operator dimension matches");
                static_terms.extend(ldl.entries().iter().map(|&(r, c, v)| (r, c, lossless(v) * (-0.5 * rate))));
                if op.is_diagonal() {
                    let w = diagonal_weights.get_or_insert_with(|| vec![czero(); dim * dim]);
                    let mut d = vec![Cplx::new(0.0, 0.0); dim];
                    for &(r, _, v) in op.entries() {
                        d[r] = lossless(v);
                    }
                    let nz: Vec<usize> = (0..dim).filter(|&i| !d[i].is_zero()).collect();
                    for &i in &nz {
                        for &j in &nz {
                            let x = d[i] * d[j].conj() * rate;
                            w[i * dim + j] += Cplx::new(T::of(x.re), T::of(x.im));
                        }
                    }
                } else if is_monomial(op.entries(), dim) {
                    let scale = T::of(rate.sqrt());
                    monomial_jumps.push(MonomialJump::new(op.entries(), scale));
                } else {
                    general_jumps.push((T::of(rate), op.entries().to_vec()));
                }
            }
        }

        let static_part: Entries<T> = to_entries(merge(static_terms));
        let modulated: Vec<(T, Entries<T>)> =
            by_freq.into_values().map(|(nu, e)| (T::of(nu), to_entries(merge(e)))).collect();
        let mut by_row: Vec<_> = static_part.iter().map(|&(r, c, v)| (r, c, v, 0)).collect();
        for (k, (_, entries)) in modulated.iter().enumerate() {
            by_row.extend(entries.iter().map(|&(r, c, v)| (r, c, v, k + 1)));
        }
        by_row.sort_by_key(|&(r, c, _, g)| (r, c, g));
        Self {
            dim,
            static_part,
            modulated,
            by_row,
            monomial_jumps,
            general_jumps,
            diagonal_weights: diagonal_weights.map(Values::from_complex),
        }
    }

    fn has_jumps(&self) -> bool {
        !self.monomial_jumps.is_empty() || !self.general_jumps.is_empty() || self.diagonal_weights.is_some()
    }

    fn coefficients(&self, t: T) -> Vec<Cplx<T>> {
        self.modulated.iter().map(|(nu, _)| cis(*nu * t)).collect()
    }

    /// `out = K(t) psi`.
    fn apply_vector(&self, t: T, psi: &[Cplx<T>], out: &mut [Cplx<T>]) {
        out.iter_mut().for_each(|x| *x = czero());
        for &(r, c, v) in &self.static_part {
            out[r] += v * psi[c];
        }
        for ((_, entries), coef) in self.modulated.iter().zip(self.coefficients(t)) {
            for &(r, c, v) in entries {
                out[r] += coef * v * psi[c];
            }
        }
    }

    /// `out = K ρ + (K ρ)† + jumps(ρ)`.
    fn apply_density(&self, t: T, rho: &[Cplx<T>], out: &mut [Cplx<T>]) {
        let n = self.dim;
        let mut coefs = Vec::with_capacity(self.modulated.len() + 1);
        coefs.push(Cplx::new(T::one(), T::zero()));
        coefs.extend(self.coefficients(t));
        let mut e = 0;
        for r in 0..n {
            let dst = &mut out[r * n..(r + 1) * n];
            dst.iter_mut().for_each(|x| *x = czero());
            while e < self.by_row.len() && self.by_row[e].0 == r {
                let (_, c, v, g) = self.by_row[e];
                let w = v * coefs[g];
                for (d, s) in dst.iter_mut().zip(&rho[c * n..(c + 1) * n]) {
                    *d += w * *s;
                }
                e += 1;
            }
        }
        // out += out†, in tiles
        const TILE: usize = 32;
        for ib in (0..n).step_by(TILE) {
            for jb in (ib..n).step_by(TILE) {
                for i in ib..(ib + TILE).min(n) {
                    let j0 = if ib == jb { i } else { jb };
                    for j in j0..(jb + TILE).min(n) {
                        let (ij, ji) = (i * n + j, j * n + i);
                        if i == j {
                            let d = out[ij];
                            out[ij] = Cplx::new(d.re + d.re, T::zero());
                        } else {
                            let a = out[ij];
                            let b = out[ji];
                            out[ij] = a + b.conj();
                            out[ji] = b + a.conj();
                        }

                    }
                }
            }
        }
        match &self.diagonal_weights {
            Some(Values::Real(w)) => {
                for ((o, r), w) in out.iter_mut().zip(rho).zip(w) {
                    *o += *r * *w;
                }
            }
            Some(Values::Complex(w)) => {
                for ((o, r), w) in out.iter_mut().zip(rho).zip(w) {
                    *o += *r * *w;
                }
            }
            None => {}
        }
        for jump in &self.monomial_jumps {
            jump.apply(n, rho, out);
        }
        if !self.general_jumps.is_empty() {
            self.apply_general_jumps(rho, out);
        }
    }

    fn apply_general_jumps(&self, rho: &[Cplx<T>], out: &mut [Cplx<T>]) {
        let n = self.dim;
        let mut y = vec![czero::<T>(); n * n];
        for (rate, entries) in &self.general_jumps {
            // y = L ρ, out += γ y L†
            y.iter_mut().for_each(|x| *x = czero());
            for &(r, c, v) in entries {
                for j in 0..n {
                    y[r * n + j] += v * rho[c * n + j];
                }
            }
            for i in 0..n {
                for &(j, k, v) in entries {
                    out[i * n + j] += y[i * n + k] * v.conj() * *rate;
                }
            }
        }
    }
}

fn is_monomial<T: Real>(entries: &[(usize, usize, Cplx<T>)], dim: usize) -> bool {
    let mut row_seen = vec![false; dim];
    let mut col_seen = vec![false; dim];
    for &(r, c, _) in entries {
        if row_seen[r] || col_seen[c] {
            return false;
        }
        row_seen[r] = true;
        col_seen[c] = true;
    }
    true
}

fn check_cap(dim: usize, cap: usize, kind: &'static str) -> Result<()> {
    if dim > cap {
        Err(Error::DimensionCap { dim, cap, kind })
    } else {
        Ok(())
    }
}

/// RK4 solution of `dψ/dt = −iH(t)ψ` over `t_span` (times on the
/// Hamiltonian's clock). The norm is checked, never renormalized.
pub fn propagate_vector<T: Real>(
    psi0: &[Cplx<T>],
    h: &ModulatedHamiltonian<T>,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    label: &str,
) -> Result<(Vec<Cplx<T>>, StepStats)> {
    let dim = psi0.len();
    if dim != h.dim() {
        return Err(Error::DimensionMismatch { left: dim, right: h.dim() });
    }
    check_cap(dim, cfg.vector_cap, "state-vector")?;
    let duration = t_span.1 - t_span.0;
    let (steps, dt) = cfg.steps_for(h, None, duration);
    let mut psi = psi0.to_vec();
    let mut stats = StepStats { steps, dt, ..Default::default() };
    if steps == 0 || h.is_empty() {
        return Ok((psi, stats));
    }
    let gen = Rhs::new(h, None);
    let norm0 = vector_norm(psi0);
    let (dtt, half, sixth, third) = (T::of(dt), T::of(dt / 2.0), T::of(dt / 6.0), T::of(dt / 3.0));
    let mut k = vec![czero(); dim];
    let mut tmp = vec![czero(); dim];
    let mut acc = vec![czero(); dim];
    for step in 0..steps {
        let t = T::of(t_span.0 + step as f64 * dt);
        acc.copy_from_slice(&psi);
        gen.apply_vector(t, &psi, &mut k);
        rk_stage(&mut acc, &mut tmp, &psi, &k, sixth, half);
        gen.apply_vector(t + half, &tmp, &mut k);
        rk_stage(&mut acc, &mut tmp, &psi, &k, third, half);
        gen.apply_vector(t + half, &tmp, &mut k);
        rk_stage(&mut acc, &mut tmp, &psi, &k, third, dtt);
        gen.apply_vector(t + dtt, &tmp, &mut k);
        for (a, kk) in acc.iter_mut().zip(&k) {
            *a += *kk * sixth;
        }
        std::mem::swap(&mut psi, &mut acc);
    }
    let drift = (vector_norm(&psi) - norm0).abs();
    stats.max_trace_error = (vector_norm(&psi) - 1.0).abs();
    if cfg.checks.norm && drift > DRIFT_LIMIT {
        return Err(Error::StepSize { segment: label.to_string(), quantity: "norm", drift, dt });
    }
    Ok((psi, stats))
}

#[inline]
fn rk_stage<T: Real>(acc: &mut [Cplx<T>], tmp: &mut [Cplx<T>], base: &[Cplx<T>], k: &[Cplx<T>], weight: T, advance: T) {
    for ((a, t), (b, kk)) in acc.iter_mut().zip(tmp.iter_mut()).zip(base.iter().zip(k)) {
        *a += *kk * weight;
        *t = *b + *kk * advance;
    }
}

/// RK4 solution of the Lindblad master equation
/// `dρ/dt = −i[H(t), ρ] + Σ γ (L ρ L† − L†L ρ/2 − ρ L†L/2)`.
pub fn integrate_master<T: Real>(
    rho0: &DenseMatrix<T>,
    h: &ModulatedHamiltonian<T>,
    collapse: &CollapseSet<T>,
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    label: &str,
) -> Result<(DenseMatrix<T>, StepStats)> {
    let dim = rho0.dim();
    if dim != h.dim() {
        return Err(Error::DimensionMismatch { left: dim, right: h.dim() });
    }
    check_cap(dim, cfg.density_cap, "density-matrix")?;
    let duration = t_span.1 - t_span.0;
    let (steps, dt) = cfg.steps_for(h, Some(collapse), duration);
    let mut stats = StepStats { steps, dt, ..Default::default() };
    let gen = Rhs::new(h, Some(collapse));
    if steps == 0 || (h.is_empty() && !gen.has_jumps()) {
        stats.final_hermiticity_error = rho0.hermiticity_error();
        return Ok((rho0.clone(), stats));
    }
    let trace0 = rho0.trace().re.to_f64_lossy();
    let mut rho = rho0.data().to_vec();
    let (dtt, half, sixth, third) = (T::of(dt), T::of(dt / 2.0), T::of(dt / 6.0), T::of(dt / 3.0));
    let mut k = vec![czero(); dim * dim];
    let mut tmp = vec![czero(); dim * dim];
    let mut acc = vec![czero(); dim * dim];
    let trace_of = |m: &[Cplx<T>]| (0..dim).map(|i| m[i * dim + i].re.to_f64_lossy()).sum::<f64>();
    let mut max_drift: f64 = 0.0;
    for step in 0..steps {
        let t = T::of(t_span.0 + step as f64 * dt);
        acc.copy_from_slice(&rho);
        gen.apply_density(t, &rho, &mut k);
        rk_stage(&mut acc, &mut tmp, &rho, &k, sixth, half);
        gen.apply_density(t + half, &tmp, &mut k);
        rk_stage(&mut acc, &mut tmp, &rho, &k, third, half);
        gen.apply_density(t + half, &tmp, &mut k);
        rk_stage(&mut acc, &mut tmp, &rho, &k, third, dtt);
        gen.apply_density(t + dtt, &tmp, &mut k);
        for (a, kk) in acc.iter_mut().zip(&k) {
            *a += *kk * sixth;
        }
        std::mem::swap(&mut rho, &mut acc);
        let tr = trace_of(&rho);
        max_drift = max_drift.max((tr - trace0).abs());
        stats.max_trace_error = stats.max_trace_error.max((tr - 1.0).abs());
        if cfg.checks.trace && max_drift > DRIFT_LIMIT {
            return Err(Error::StepSize { segment: label.to_string(), quantity: "trace", drift: max_drift, dt });
        }
    }
    let out = DenseMatrix::from_row_major(dim, rho)?;
    stats.final_hermiticity_error = out.hermiticity_error();
    if cfg.checks.hermiticity && stats.final_hermiticity_error > crate::hilbert::HERMITIAN_TOL {
        return Err(Error::InternalConsistency {
            segment: label.to_string(),
            detail: format!("density matrix drifted from Hermitian by {:.3e}", stats.final_hermiticity_error),
        });
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{CollapseEntry, CollapseKind};
    use crate::hilbert::{embed_dims, local_annihilation, local_projector, local_transition, OperatorMatrix, E, G};
    use crate::scalar::c;
    use proptest::prelude::*;

    // cavity (Fock 3) ⊗ qutrit
    const DIMS: [usize; 2] = [3, 3];

    fn idx(n: usize, q: usize) -> usize {
        n * 3 + q
    }

    fn cavity_a() -> OperatorMatrix<f64> {
        embed_dims(&local_annihilation(3).unwrap(), 0, &DIMS).unwrap()
    }

    fn sigma(upper: usize, lower: usize) -> OperatorMatrix<f64> {
        embed_dims(&local_transition(3, upper, lower).unwrap(), 1, &DIMS).unwrap()
    }

    fn basis(i: usize) -> Vec<Cplx<f64>> {
        let mut v = vec![czero(); 9];
        v[i] = c(1.0, 0.0);
        v
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = ModulatedHamiltonian::<f64>::new(9);
        let psi = basis(idx(1, G));
        let (out, _) = propagate_vector(&psi, &h, (0.0, 3.0), &IntegratorConfig::default(), "idle").unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn resonant_swap_at_quarter_period() {
        let g = 2.0 * PI * 10.0;
        let mut h = ModulatedHamiltonian::new(9);
        h.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(g, 0.0)), 0.0);
        let t = PI / (2.0 * g);
        let (out, _) = propagate_vector(&basis(idx(1, G)), &h, (0.0, t), &IntegratorConfig::default(), "swap").unwrap();
        assert!((out[idx(0, E)] - c(0.0, -1.0)).norm() < 1e-9);
        assert!(out[idx(1, G)].norm() < 1e-9);
    }

    #[test]
    fn dispersive_phase_flip() {
        let lambda = 2.0 * PI * 0.9;
        let n = cavity_a().adjoint().mul(&cavity_a()).unwrap();
        let see = embed_dims(&local_projector(3, E).unwrap(), 1, &DIMS).unwrap();
        let mut h = ModulatedHamiltonian::new(9);
        h.push_hermitian(see.mul(&n).unwrap().scale(c(-lambda, 0.0)));
        let (out, _) = propagate_vector(&basis(idx(1, E)), &h, (0.0, PI / lambda), &IntegratorConfig::default(), "d").unwrap();
        assert!((out[idx(1, E)] - c(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn cavity_decay_is_exponential() {
        let kappa = 0.3;
        let mut set = CollapseSet::empty();
        set.push(CollapseEntry { op: cavity_a(), rate: kappa, kind: CollapseKind::CavityDecay, subsystem: 0 });
        let h = ModulatedHamiltonian::new(9);
        let rho0 = DenseMatrix::outer(&basis(idx(1, G)));
        let t = 2.5;
        let (rho, stats) = integrate_master(&rho0, &h, &set, (0.0, t), &IntegratorConfig::default(), "decay").unwrap();
        assert!((rho.get(idx(1, G), idx(1, G)).re - (-kappa * t).exp()).abs() < 1e-6);
        assert!(stats.max_trace_error < 1e-9);
    }

    #[test]
    fn dephasing_halves_the_rate_on_coherences() {
        let gamma = 0.2;
        let mut set = CollapseSet::empty();
        let see = embed_dims(&local_projector(3, E).unwrap(), 1, &DIMS).unwrap();
        set.push(CollapseEntry { op: see, rate: gamma, kind: CollapseKind::DephE, subsystem: 1 });
        let s = 0.5f64.sqrt();
        let mut psi: Vec<Cplx<f64>> = vec![czero(); 9];
        psi[idx(0, G)] = c(s, 0.0);
        psi[idx(0, E)] = c(s, 0.0);
        let t = 4.0;
        let h = ModulatedHamiltonian::new(9);
        let (rho, _) = integrate_master(&DenseMatrix::outer(&psi), &h, &set, (0.0, t), &IntegratorConfig::default(), "deph").unwrap();
        assert!((rho.get(idx(0, G), idx(0, E)).re - 0.5 * (-gamma * t / 2.0).exp()).abs() < 1e-6);
    }

    #[test]
    fn general_jump_path_matches_monomial_path() {
        // a + a† is not monomial; compare against its decomposition into an
        // equivalent dense evaluation of L ρ L†.
        let l = cavity_a().add(&sigma(E, G)).unwrap();
        let mut set = CollapseSet::empty();
        set.push(CollapseEntry { op: l.clone(), rate: 0.7, kind: CollapseKind::CavityDecay, subsystem: 0 });
        let gen = Rhs::new(&ModulatedHamiltonian::new(9), Some(&set));
        assert!(!gen.general_jumps.is_empty());
        let mut psi: Vec<Cplx<f64>> = vec![czero(); 9];
        for (i, x) in psi.iter_mut().enumerate() {
            *x = c(0.1 * i as f64, 0.05 * (9 - i) as f64);
        }
        let rho = DenseMatrix::outer(&psi);
        let mut out = vec![czero(); 81];
        gen.apply_density(0.0, rho.data(), &mut out);
        let ld = l.to_dense();
        let r = rho.data();
        for i in 0..9 {
            for j in 0..9 {
                let mut jump = czero::<f64>();
                let mut anti = czero::<f64>();
                for a in 0..9 {
                    for b in 0..9 {
                        jump += ld[i * 9 + a] * r[a * 9 + b] * ld[j * 9 + b].conj();
                    }
                }
                for a in 0..9 {
                    for b in 0..9 {
                        let ldl_ia = ld[b * 9 + i].conj() * ld[b * 9 + a];
                        let ldl_aj = ld[b * 9 + a].conj() * ld[b * 9 + j];
                        anti += ldl_ia * r[a * 9 + j] + r[i * 9 + a] * ldl_aj;
                    }
                }
                let expected = (jump - anti * 0.5) * 0.7;
                assert!((out[i * 9 + j] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn halving_the_step_changes_little() {
        let g = 2.0 * PI * 10.0;
        let mut h = ModulatedHamiltonian::new(9);
        h.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(g, 0.0)), 2.0 * PI * 3.0);
        let cfg = IntegratorConfig::default();
        let t = (0.0, 0.137);
        let (a, _) = propagate_vector(&basis(idx(1, G)), &h, t, &cfg, "a").unwrap();
        let (b, _) = propagate_vector(&basis(idx(1, G)), &h, t, &cfg.refined(0.5), "b").unwrap();
        let diff: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn caps_are_enforced() {
        let h = ModulatedHamiltonian::<f64>::new(9);
        let cfg = IntegratorConfig { density_cap: 8, ..Default::default() };
        let err = integrate_master(&DenseMatrix::outer(&basis(0)), &h, &CollapseSet::empty(), (0.0, 1.0), &cfg, "x").unwrap_err();
        assert!(matches!(err, Error::DimensionCap { dim: 9, cap: 8, .. }));
    }

    #[test]
    fn coarse_step_is_reported() {
        let g = 2.0 * PI * 10.0;
        let mut h = ModulatedHamiltonian::new(9);
        h.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(g, 0.0)), 0.0);
        let cfg = IntegratorConfig { norm_step_factor: 1.5, ..Default::default() };
        let err = propagate_vector(&basis(idx(1, G)), &h, (0.0, 1.0), &cfg, "coarse").unwrap_err();
        assert!(matches!(err, Error::StepSize { quantity: "norm", .. }));
    }

    #[test]
    fn f32_tracks_f64() {
        let g = 2.0 * PI * 10.0;
        let mut h = ModulatedHamiltonian::new(9);
        h.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(g, 0.0)), 0.0);
        let h32: ModulatedHamiltonian<f32> = {
            let mut out = ModulatedHamiltonian::new(9);
            out.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(g, 0.0)).cast(), 0.0);
            out
        };
        let t = (0.0, PI / (2.0 * g));
        let cfg = IntegratorConfig { checks: BoundaryChecks { norm: false, ..Default::default() }, ..Default::default() };
        let (a, _) = propagate_vector(&basis(idx(1, G)), &h, t, &cfg, "a").unwrap();
        let psi32: Vec<Cplx<f32>> = basis(idx(1, G)).iter().map(|z| Cplx::new(z.re as f32, z.im as f32)).collect();
        let (b, _) = propagate_vector(&psi32, &h32, t, &cfg, "b").unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.re - y.re as f64).abs() < 1e-3 && (x.im - y.im as f64).abs() < 1e-3);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn master_equation_reduces_to_schrodinger(
            re in prop::collection::vec(-1.0f64..1.0, 9),
            im in prop::collection::vec(-1.0f64..1.0, 9),
            nu in -50.0f64..50.0,
        ) {
            let mut psi: Vec<Cplx<f64>> = re.iter().zip(&im).map(|(a, b)| c(*a, *b)).collect();
            let norm = vector_norm(&psi);
            prop_assume!(norm > 1e-3);
            psi.iter_mut().for_each(|x| *x /= norm);
            let mut h = ModulatedHamiltonian::new(9);
            h.push(cavity_a().mul(&sigma(E, G)).unwrap().scale(c(20.0, 0.0)), nu);
            h.push_hermitian(embed_dims(&local_projector(3, E).unwrap(), 1, &DIMS).unwrap().scale(c(7.0, 0.0)));
            let cfg = IntegratorConfig::default();
            let (v, _) = propagate_vector(&psi, &h, (0.1, 0.3), &cfg, "v").unwrap();
            let (rho, _) = integrate_master(&DenseMatrix::outer(&psi), &h, &CollapseSet::empty(), (0.1, 0.3), &cfg, "r").unwrap();
            let expect = DenseMatrix::outer(&v);
            let diff = rho.data().iter().zip(expect.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-9, "{}", diff);
        }
    }
}

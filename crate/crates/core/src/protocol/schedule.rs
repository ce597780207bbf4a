use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{build_collapse_set, run_schedule, CollapseSet, IntegratorConfig, Stage, Trajectory};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_coupler_resonant, build_crosstalk, build_delta_h1_masked, build_delta_h2, build_delta_h3_masked, build_drive,
    build_h1_masked, build_h2, build_h3_masked, build_heff_masked, DeviceParams, ModulatedHamiltonian,
};
use crate::hilbert::{NetworkLayout, QuantumState};
use crate::scalar::Real;

/// Model used for the dispersive step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersiveModel {
    /// Static effective Hamiltonian `−λ S_e a†a`.
    #[default]
    Effective,
    /// Modulated |e>↔|f> coupling, from which the effective form follows.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    Idle,
    Dispersive { model: DispersiveModel, mask: Vec<bool> },
    Resonant { mask: Vec<bool> },
    Pulse { phase: f64, mask: Vec<bool> },
    /// `mu a_cavity |upper><lower|_coupler + h.c.`
    CouplerResonant { coupler: usize, cavity: usize, upper: usize, lower: usize, mu: f64 },
    /// Classical drive on one coupler transition.
    CouplerPump { coupler: usize, upper: usize, lower: usize, rabi: f64, phase: f64 },
}

impl Generator {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Idle => "idle",
            Self::Dispersive { .. } => "dispersive",
            Self::Resonant { .. } => "resonant",
            Self::Pulse { .. } => "pulse",
            Self::CouplerResonant { .. } => "coupler-resonant",
            Self::CouplerPump { .. } => "coupler-pump",
        }
    }

    fn mask(&self) -> Option<&[bool]> {
        match self {
            Self::Dispersive { mask, .. } | Self::Resonant { mask } | Self::Pulse { mask, .. } => Some(mask),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub label: String,
    pub duration: f64,
    /// Hamiltonian clock at the start of the segment; each protocol step
    /// restarts its clock at zero.
    pub clock_origin: f64,
    pub generator: Generator,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
    /// Unwanted couplings, crosstalk and collapse operators are included.
    pub noisy: bool,
}

impl Schedule {
    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    fn push(&mut self, label: impl Into<String>, duration: f64, clock_origin: f64, generator: Generator) {
        self.segments.push(Segment { label: label.into(), duration, clock_origin, generator });
    }

    pub fn validate(&self, layout: &NetworkLayout) -> Result<()> {
        for s in &self.segments {
            if !(s.duration >= 0.0) || !s.duration.is_finite() {
                return Err(Error::Params(format!("segment {} has duration {}", s.label, s.duration)));
            }
            if let Some(mask) = s.generator.mask() {
                if mask.len() != layout.n_cavities() {
                    return Err(Error::Layout(format!("segment {} masks {} of {} cavities", s.label, mask.len(), layout.n_cavities())));
                }
            }
        }
        Ok(())
    }

    /// Hamiltonian of each segment, with the error terms and collapse
    /// operators when the schedule is noisy.
    pub fn stages<T: Real>(&self, layout: &NetworkLayout, params: &DeviceParams) -> Result<Vec<Stage<T>>> {
        self.validate(layout)?;
        let (collapse, crosstalk) = if self.noisy {
            (build_collapse_set::<T>(layout, params)?, build_crosstalk::<T>(layout, params)?)
        } else {
            (CollapseSet::empty(), ModulatedHamiltonian::new(layout.total_dim()))
        };
        let mut out = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let mut h = segment_hamiltonian::<T>(layout, params, &seg.generator)?;
            if self.noisy {
                h.extend(error_hamiltonian::<T>(layout, params, &seg.generator)?);
                if !matches!(seg.generator, Generator::Idle) {
                    h.extend(crosstalk.clone());
                }
            }
            out.push(
                Stage::new(seg.label.clone(), seg.duration, h)
                    .with_clock_origin(seg.clock_origin)
                    .with_collapse(collapse.clone()),
            );
        }
        Ok(out)
    }
}

fn segment_hamiltonian<T: Real>(layout: &NetworkLayout, params: &DeviceParams, gen: &Generator) -> Result<ModulatedHamiltonian<T>> {
    let dim = layout.total_dim();
    match gen {
        Generator::Idle => Ok(ModulatedHamiltonian::new(dim)),
        Generator::Dispersive { model: DispersiveModel::Effective, mask } => build_heff_masked(layout, params, false, Some(mask)),
        Generator::Dispersive { model: DispersiveModel::Full, mask } => build_h1_masked(layout, params, Some(mask)),
        Generator::Resonant { mask } => {
            let mut h = ModulatedHamiltonian::new(dim);
            for l in (0..layout.n_cavities()).filter(|&l| mask[l]) {
                h.extend(build_h2(layout, params, l)?);
            }
            Ok(h)
        }
        Generator::Pulse { phase, mask } => build_h3_masked(layout, params, *phase, Some(mask)),
        &Generator::CouplerResonant { coupler, cavity, upper, lower, mu } => {
            build_coupler_resonant(layout, coupler, cavity, upper, lower, mu)
        }
        &Generator::CouplerPump { coupler, upper, lower, rabi, phase } => {
            check_coupler(layout, coupler)?;
            build_drive(layout, layout.coupler_subsystem(coupler), upper, lower, rabi, phase)
        }
    }
}

fn check_coupler(layout: &NetworkLayout, coupler: usize) -> Result<()> {
    if coupler < layout.n_couplers() {
        Ok(())
    } else {
        Err(Error::Layout(format!("coupler {} does not exist", coupler + 1)))
    }
}

/// Unwanted transitions that accompany each step.
fn error_hamiltonian<T: Real>(layout: &NetworkLayout, params: &DeviceParams, gen: &Generator) -> Result<ModulatedHamiltonian<T>> {
    let dim = layout.total_dim();
    match gen {
        Generator::Dispersive { mask, .. } => build_delta_h1_masked(layout, params, Some(mask)),
        Generator::Resonant { mask } => {
            let mut h = ModulatedHamiltonian::new(dim);
            for l in (0..layout.n_cavities()).filter(|&l| mask[l]) {
                h.extend(build_delta_h2(layout, params, l)?);
            }
            Ok(h)
        }
        Generator::Pulse { phase, mask } => build_delta_h3_masked(layout, params, *phase, Some(mask)),
        _ => Ok(ModulatedHamiltonian::new(dim)),
    }
}

/// Splits `[0, max end)` at the given per-cavity windows `[start, end)` into
/// pieces with a constant set of active cavities.
fn windows_to_pieces(windows: &[(f64, f64)]) -> Vec<(f64, f64, Vec<bool>)> {
    let mut cuts: Vec<f64> = windows.iter().flat_map(|&(a, b)| [a, b]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mask: Vec<bool> = windows.iter().map(|&(s, e)| s <= mid && mid < e).collect();
        if mask.iter().any(|&x| x) {
            out.push((a, b, mask));
        }
    }
    out
}

fn push_windows(schedule: &mut Schedule, step: &str, windows: &[(f64, f64)], make: impl Fn(Vec<bool>) -> Generator) {
    let pieces = windows_to_pieces(windows);
    let single = pieces.len() == 1;
    for (i, (a, b, mask)) in pieces.into_iter().enumerate() {
        let label = if single { step.to_string() } else { format!("{step}.{}", i + 1) };
        schedule.push(label, b - a, a, make(mask));
    }
}

/// Ω_l t = π/4: the pulse duration that maps |+⟩ → |g⟩ and |−⟩ → −|e⟩ at φ = π/2.
pub fn pulse_duration(omega: f64) -> f64 {
    PI / (4.0 * omega)
}

/// τ₂ = π/(2 g_r).
pub fn resonant_duration(g_r: f64) -> f64 {
    PI / (2.0 * g_r)
}

/// τ₁ = π/λ.
pub fn dispersive_duration(lambda: f64) -> f64 {
    PI / lambda
}

fn positive(x: f64, what: &str, l: usize) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::DivisionByZero(format!("{what} of cavity {} must be positive", l + 1)))
    }
}

fn build_schedule(layout: &NetworkLayout, params: &DeviceParams, model: DispersiveModel, staggered: bool) -> Result<Schedule> {
    if params.n_cavities() != layout.n_cavities() {
        return Err(Error::Params(format!(
            "parameters describe {} cavities but the layout has {}",
            params.n_cavities(),
            layout.n_cavities()
        )));
    }
    if (0..layout.n_cavities()).any(|l| layout.group_size(l) == 0) {
        return Err(Error::Layout("every cavity must host at least one qutrit".into()));
    }
    let n = layout.n_cavities();
    let tau_d = params.tau_d;
    let mut s = Schedule::default();
    s.push("adjust-1", tau_d, 0.0, Generator::Idle);

    let t1: Vec<f64> = (0..n)
        .map(|l| Ok(dispersive_duration(positive(params.lambda(l)?, "lambda", l)?)))
        .collect::<Result<_>>()?;
    let t_max = t1.iter().copied().fold(0.0, f64::max);
    let windows: Vec<(f64, f64)> = if staggered {
        t1.iter().map(|&t| (t_max - t, t_max)).collect()
    } else {
        vec![(0.0, t1[0]); n]
    };
    push_windows(&mut s, "dispersive", &windows, |mask| Generator::Dispersive { model, mask });
    s.push("adjust-2", tau_d, 0.0, Generator::Idle);

    let windows: Vec<(f64, f64)> = (0..n)
        .map(|l| Ok((0.0, resonant_duration(positive(params.cavity(l)?.g_r, "g_r", l)?))))
        .collect::<Result<_>>()?;
    push_windows(&mut s, "resonant", &windows, |mask| Generator::Resonant { mask });
    s.push("adjust-3", tau_d, 0.0, Generator::Idle);

    let phase = params.pulse_phase;
    let with_active: Vec<usize> = (0..n).filter(|&l| !layout.active_qutrits(l).is_empty()).collect();
    if !with_active.is_empty() {
        let windows: Vec<(f64, f64)> = (0..n)
            .map(|l| {
                if with_active.contains(&l) {
                    Ok((0.0, pulse_duration(positive(params.cavity(l)?.omega, "Rabi frequency", l)?)))
                } else {
                    Ok((0.0, 0.0))
                }
            })
            .collect::<Result<_>>()?;
        push_windows(&mut s, "pulse", &windows, |mask| Generator::Pulse { phase, mask });
    }
    s.push("adjust-4", tau_d, 0.0, Generator::Idle);
    Ok(s)
}

/// Three-step protocol with a common dispersive window. Requires matched λ.
pub fn main_schedule(layout: &NetworkLayout, params: &DeviceParams, model: DispersiveModel) -> Result<Schedule> {
    let report = params.validate_matching()?;
    if !report.matched {
        return Err(Error::RequiresStaggered { spread: report.spread });
    }
    build_schedule(layout, params, model, false)
}

/// Three-step protocol in which cavity l's dispersive coupling is on for π/λ_l,
/// all windows ending together.
pub fn staggered_schedule(layout: &NetworkLayout, params: &DeviceParams, model: DispersiveModel) -> Result<Schedule> {
    build_schedule(layout, params, model, true)
}

/// Same segments with unwanted couplings, crosstalk and decoherence switched on.
pub fn noisy_variant(schedule: &Schedule) -> Schedule {
    Schedule { segments: schedule.segments.clone(), noisy: true }
}

/// Total operation time of a schedule.
pub fn t_op(schedule: &Schedule) -> f64 {
    schedule.duration()
}

/// Runs a schedule from `state0`.
pub fn execute<T: Real>(
    layout: &NetworkLayout,
    params: &DeviceParams,
    schedule: &Schedule,
    state0: &QuantumState<T>,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<T>> {
    if state0.dim() != layout.total_dim() {
        return Err(Error::DimensionMismatch { left: state0.dim(), right: layout.total_dim() });
    }
    let stages = schedule.stages::<T>(layout, params)?;
    run_schedule(state0, &stages, cfg)
}

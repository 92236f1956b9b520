use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

/// One attracting Gaussian well of the landscape.
#[derive(Debug, Clone, Copy)]
pub struct Well<T = f64> {
    pub center: [T; 2],
    pub depth: T,
    pub width: T,
}

/// Well configuration active from `start_time` until the next phase.
#[derive(Debug, Clone)]
pub struct PotentialPhase<T = f64> {
    pub start_time: T,
    pub wells: Vec<Well<T>>,
}

/// Piecewise-constant-in-time potential: a sum of inverted isotropic
/// Gaussian wells plus an optional quadratic confinement term,
/// `U_t(x) = kappa |x|^2 / 2 - sum_i a_i exp(-|x - c_i|^2 / (2 s_i^2))`.
#[derive(Debug, Clone)]
pub struct PotentialSpec<T = f64> {
    pub phases: Vec<PotentialPhase<T>>,
    pub confinement: T,
}

impl<T: Scalar> PotentialSpec<T> {
    pub fn new(phases: Vec<PotentialPhase<T>>, confinement: T) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidParameter("potential needs at least one phase".into()));
        }
        if phases[0].start_time != T::zero() {
            return Err(Error::InvalidParameter(
                "the first potential phase must start at time 0".into(),
            ));
        }
        for pair in phases.windows(2) {
            if pair[1].start_time <= pair[0].start_time {
                return Err(Error::InvalidParameter(
                    "phase start times must be strictly increasing".into(),
                ));
            }
        }
        if phases.iter().any(|p| p.wells.is_empty()) {
            return Err(Error::InvalidParameter("every phase needs at least one well".into()));
        }
        if phases
            .iter()
            .flat_map(|p| &p.wells)
            .any(|w| w.depth <= T::zero() || w.width <= T::zero())
        {
            return Err(Error::InvalidParameter(
                "well depths and widths must be positive".into(),
            ));
        }
        if confinement < T::zero() {
            return Err(Error::InvalidParameter("confinement must be non-negative".into()));
        }
        Ok(Self { phases, confinement })
    }

    /// Index of the phase active at time `t` (last phase with
    /// `start_time <= t`).
    pub fn phase_at(&self, t: T) -> usize {
        let mut active = 0;
        for (i, phase) in self.phases.iter().enumerate() {
            if phase.start_time <= t {
                active = i;
            } else {
                break;
            }
        }
        active
    }

    pub fn num_phases(&self) -> usize {
        self.phases.len()
    }

    /// Potential value at `(t, x)`; used by tests as the finite-difference
    /// reference for the gradient.
    pub fn value(&self, t: T, x: [T; 2]) -> Result<T> {
        if t < T::zero() {
            return Err(Error::InvalidParameter(format!("time {t} is negative")));
        }
        Ok(self.value_for_phase(self.phase_at(t), x))
    }

    pub fn value_for_phase(&self, phase: usize, x: [T; 2]) -> T {
        let half = cast::<T>(0.5);
        let mut u = self.confinement * half * (x[0] * x[0] + x[1] * x[1]);
        for well in &self.phases[phase].wells {
            let dx = x[0] - well.center[0];
            let dy = x[1] - well.center[1];
            let r2 = dx * dx + dy * dy;
            let s2 = well.width * well.width;
            u -= well.depth * (-r2 / (cast::<T>(2.0) * s2)).exp();
        }
        u
    }

    /// `grad U_t(x)` for the phase active at `t`.
    pub fn gradient(&self, t: T, x: [T; 2]) -> Result<[T; 2]> {
        if t < T::zero() {
            return Err(Error::InvalidParameter(format!("time {t} is negative")));
        }
        Ok(self.gradient_for_phase(self.phase_at(t), x))
    }

    pub fn gradient_for_phase(&self, phase: usize, x: [T; 2]) -> [T; 2] {
        let mut g = [self.confinement * x[0], self.confinement * x[1]];
        for well in &self.phases[phase].wells {
            let dx = x[0] - well.center[0];
            let dy = x[1] - well.center[1];
            let r2 = dx * dx + dy * dy;
            let s2 = well.width * well.width;
            let pull = well.depth / s2 * (-r2 / (cast::<T>(2.0) * s2)).exp();
            g[0] += pull * dx;
            g[1] += pull * dy;
        }
        g
    }
}

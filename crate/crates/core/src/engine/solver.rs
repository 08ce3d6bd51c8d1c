use std::fmt;

use serde::{Deserialize, Serialize};

use super::trajectory::{Coords, History, Trajectory};
use crate::delay::DelaySpec;
use crate::error::{param, Error, Result};

/// A delay system `y'(t) = f(t, y(t), y(h(t)))` the engine can step.
pub trait DelaySystem<const N: usize> {
    fn delay(&self) -> &DelaySpec;

    /// Coordinates the state is integrated in.
    fn coords(&self) -> Coords {
        Coords::Linear
    }

    /// Whether model-coordinate states must stay in the open positive cone.
    fn requires_positive(&self) -> bool {
        false
    }

    /// Hook run at every step start (bound spot checks).
    fn check_time(&self, t: f64) -> Result<()> {
        self.delay().check_at(t)
    }

    /// `y` is in integration coordinates; `delayed` is the model-coordinate
    /// value at `h(t)` (equal to the decoded `y` for undelayed systems).
    fn rhs(&self, t: f64, y: &[f64; N], delayed: &[f64; N]) -> Result<[f64; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityMode {
    /// Integrate `(x, K)` and halt when a state leaves the positive cone.
    OriginalCoords,
    /// Integrate `(ln x, ln K)`; positivity holds by construction.
    LogCoords,
}

impl PositivityMode {
    pub fn coords(self) -> Coords {
        match self {
            PositivityMode::OriginalCoords => Coords::Linear,
            PositivityMode::LogCoords => Coords::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    /// Equal RK4 steps per method-of-steps window of length `tau_min`.
    pub substeps_per_delay: usize,
    pub max_step: f64,
    pub positivity_mode: PositivityMode,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            substeps_per_delay: 64,
            max_step: 0.1,
            positivity_mode: PositivityMode::OriginalCoords,
        }
    }
}

impl IntegratorOptions {
    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn with_mode(mut self, mode: PositivityMode) -> Self {
        self.positivity_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.substeps_per_delay < 4 {
            return Err(param(
                "substeps_per_delay",
                format!("must be >= 4, got {}", self.substeps_per_delay),
            ));
        }
        if !(self.max_step.is_finite() && self.max_step > 0.0) {
            return Err(param(
                "max_step",
                format!("must be > 0, got {}", self.max_step),
            ));
        }
        Ok(())
    }
}

/// Why an integration stopped before reaching `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fault {
    /// A state left the open positive cone; the step is too coarse for the
    /// true, positive solution.
    Positivity { t: f64 },
    /// A state became non-finite.
    Divergence { t: f64 },
}

impl Fault {
    pub fn time(&self) -> f64 {
        match *self {
            Fault::Positivity { t } | Fault::Divergence { t } => t,
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::Positivity { t } => write!(f, "positivity fault at t = {t}"),
            Fault::Divergence { t } => write!(f, "divergence fault at t = {t}"),
        }
    }
}

#[derive(Debug)]
pub enum IntegrateError<const N: usize> {
    /// Inputs rejected before or during stepping.
    Invalid(Error),
    /// Numerical fault; `partial` holds every knot accepted before it.
    Halted {
        fault: Fault,
        partial: Box<Trajectory<N>>,
    },
}

impl<const N: usize> fmt::Display for IntegrateError<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrateError::Invalid(e) => e.fmt(f),
            IntegrateError::Halted { fault, .. } => fault.fmt(f),
        }
    }
}

impl<const N: usize> std::error::Error for IntegrateError<N> {}

impl<const N: usize> From<Error> for IntegrateError<N> {
    fn from(e: Error) -> Self {
        IntegrateError::Invalid(e)
    }
}

impl<const N: usize> IntegrateError<N> {
    pub fn fault(&self) -> Option<Fault> {
        match self {
            IntegrateError::Halted { fault, .. } => Some(*fault),
            IntegrateError::Invalid(_) => None,
        }
    }
}

/// Step boundaries for `[t0, t_end]`.
///
/// Delayed systems: windows of length `tau_min` split into equal steps, so
/// that constant-lag breaking points `t0 + k tau` are knots and every stage
/// of a step looks back no later than the step start. Undelayed systems use
/// one uniform step `min(max_step, (T - t0) / 1000)`.
pub(crate) fn mesh(delay: &DelaySpec, t0: f64, t_end: f64, opts: &IntegratorOptions) -> Vec<f64> {
    let span = t_end - t0;
    let (tau_min, _) = delay.bounds();
    if !delay.is_delayed() {
        let h = opts.max_step.min(span / 1000.0);
        let n = ((span / h) - 1e-9).ceil().max(1.0) as usize;
        return (0..=n)
            .map(|i| {
                if i == n {
                    t_end
                } else {
                    t0 + span * i as f64 / n as f64
                }
            })
            .collect();
    }
    let per_window = opts
        .substeps_per_delay
        .max(((tau_min / opts.max_step) - 1e-9).ceil() as usize);
    let h = tau_min / per_window as f64;
    let full = ((span / h) + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=full).map(|i| t0 + i as f64 * h).collect();
    let last = *times.last().unwrap();
    if t_end - last > 1e-9 * h {
        times.push(t_end);
    } else {
        *times.last_mut().unwrap() = t_end;
    }
    times
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, x: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + a * x[i])
}

fn admissible<const N: usize, S: DelaySystem<N>>(
    system: &S,
    t: f64,
    y: &[f64; N],
) -> std::result::Result<(), Fault> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Fault::Divergence { t });
    }
    // log coordinates are positive by construction, even when exp underflows
    if system.requires_positive()
        && system.coords() == Coords::Linear
        && y.iter().any(|&v| v <= 0.0)
    {
        return Err(Fault::Positivity { t });
    }
    Ok(())
}

struct Stepper<'a, const N: usize, S: DelaySystem<N>> {
    system: &'a S,
    traj: Trajectory<N>,
    lo: f64,
}

enum StageError {
    Fault(Fault),
    Invalid(Error),
}

impl From<Error> for StageError {
    fn from(e: Error) -> Self {
        StageError::Invalid(e)
    }
}

impl<'a, const N: usize, S: DelaySystem<N>> Stepper<'a, N, S> {
    /// Model-coordinate value at a delayed time, from finalized data only.
    fn lookup(&self, td: f64) -> Result<[f64; N]> {
        let t0 = self.traj.t0();
        if td < t0 {
            if td < self.lo {
                return Err(Error::OutOfRange {
                    t: td,
                    lo: self.lo,
                    hi: self.traj.last_time(),
                });
            }
            return Ok(self.traj.history().at(td));
        }
        let finalized = self.traj.last_time();
        if td > finalized + 1e-12 * finalized.abs().max(1.0) {
            return Err(Error::Unfinalized { t: td, finalized });
        }
        Ok(self.system.coords().decode(&self.traj.interpolate(td)))
    }

    fn eval(&self, t: f64, y: &[f64; N]) -> std::result::Result<[f64; N], StageError> {
        admissible(self.system, t, y).map_err(StageError::Fault)?;
        let delayed = match self.system.delay().lag_point(t) {
            Some(td) => self.lookup(td)?,
            None => self.system.coords().decode(y),
        };
        let dy = self.system.rhs(t, y, &delayed)?;
        if dy.iter().any(|v| !v.is_finite()) {
            return Err(StageError::Fault(Fault::Divergence { t }));
        }
        Ok(dy)
    }
}

/// Integrates a delay system over `t_span` by the method of steps with
/// classical RK4 and cubic Hermite dense output.
pub fn solve<const N: usize, S: DelaySystem<N>>(
    system: &S,
    history: History<N>,
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> std::result::Result<Trajectory<N>, IntegrateError<N>> {
    opts.validate()?;
    system.delay().validate()?;
    let (t0, t_end) = t_span;
    if !(t0.is_finite() && t_end.is_finite() && t_end > t0) {
        return Err(Error::Precondition(format!("need finite T > t0, got ({t0}, {t_end})")).into());
    }
    let (_, tau_max) = system.delay().bounds();
    let times = mesh(system.delay(), t0, t_end, opts);
    let coords = system.coords();
    if let Err(fault) = admissible(system, t0, &coords.encode(&history.initial())) {
        return Err(Error::Domain(format!("initial point not admissible ({fault})")).into());
    }
    let mut st = Stepper {
        system,
        traj: Trajectory::start(coords, history, tau_max, t0, times.len()),
        lo: t0 - tau_max * (1.0 + 1e-12) - 1e-12,
    };

    let halt = |mut traj: Trajectory<N>, fault| {
        traj.seal();
        IntegrateError::Halted {
            fault,
            partial: Box::new(traj),
        }
    };

    let mut y = *st.traj.raw().1.last().unwrap();
    for w in times.windows(2) {
        let (t, t_next) = (w[0], w[1]);
        let h = t_next - t;
        system.check_time(t)?;
        let stages = (|| {
            let k1 = st.eval(t, &y)?;
            st.traj.push_slope(k1);
            let k2 = st.eval(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
            let k3 = st.eval(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
            let k4 = st.eval(t_next, &axpy(&y, h, &k3))?;
            Ok::<_, StageError>(std::array::from_fn(|i| {
                y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            }))
        })();
        let y_next = match stages {
            Ok(v) => v,
            Err(StageError::Invalid(e)) => return Err(e.into()),
            Err(StageError::Fault(f)) => return Err(halt(st.traj, f)),
        };
        if let Err(f) = admissible(system, t_next, &y_next) {
            return Err(halt(st.traj, f));
        }
        st.traj.push(t_next, y_next);
        y = y_next;
    }
    match st.eval(t_end, &y) {
        Ok(dy) => st.traj.push_slope(dy),
        Err(StageError::Invalid(e)) => return Err(e.into()),
        Err(StageError::Fault(f)) => return Err(halt(st.traj, f)),
    }
    Ok(st.traj)
}

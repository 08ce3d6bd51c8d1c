use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::State;

/// Coordinates the engine integrates in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coords {
    /// The stored state is the model state.
    Linear,
    /// The stored state is the componentwise logarithm of the model state.
    Log,
}

impl Coords {
    #[inline]
    pub fn decode<const N: usize>(self, y: &[f64; N]) -> [f64; N] {
        match self {
            Coords::Linear => *y,
            Coords::Log => y.map(f64::exp),
        }
    }

    #[inline]
    pub fn encode<const N: usize>(self, y: &[f64; N]) -> [f64; N] {
        match self {
            Coords::Linear => *y,
            Coords::Log => y.map(f64::ln),
        }
    }
}

/// Initial data: `phi(t)` for `t < t0` and the initial point at `t0`.
#[derive(Clone)]
pub struct History<const N: usize> {
    phi: Arc<dyn Fn(f64) -> [f64; N] + Send + Sync>,
    initial: [f64; N],
}

/// History for the two-component tumor/vasculature models.
pub type HistoryFunction = History<2>;

impl<const N: usize> fmt::Debug for History<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("History")
            .field("initial", &self.initial)
            .finish_non_exhaustive()
    }
}

impl<const N: usize> History<N> {
    pub fn new(phi: impl Fn(f64) -> [f64; N] + Send + Sync + 'static, initial: [f64; N]) -> Self {
        Self {
            phi: Arc::new(phi),
            initial,
        }
    }

    /// `phi` constant and equal to the initial point.
    pub fn constant(y: [f64; N]) -> Self {
        Self::new(move |_| y, y)
    }

    #[inline]
    pub fn at(&self, t: f64) -> [f64; N] {
        (self.phi)(t)
    }

    pub fn initial(&self) -> [f64; N] {
        self.initial
    }
}

impl History<2> {
    pub fn constant_state(s: State) -> Self {
        Self::constant(s.to_array())
    }

    pub fn from_states(phi: impl Fn(f64) -> State + Send + Sync + 'static, initial: State) -> Self {
        Self::new(move |t| phi(t).to_array(), initial.to_array())
    }

    /// Nonnegative history with a strictly positive initial point.
    pub fn validate_positive(&self, t0: f64, tau_max: f64) -> Result<()> {
        let [x0, k0] = self.initial;
        if !(x0 > 0.0 && k0 > 0.0 && x0.is_finite() && k0.is_finite()) {
            return Err(Error::Domain(format!(
                "initial point must be strictly positive, got ({x0}, {k0})"
            )));
        }
        let samples = 32;
        for i in 0..=samples {
            let t = t0 - tau_max * i as f64 / samples as f64;
            let [x, k] = self.at(t);
            if !(x >= 0.0 && k >= 0.0 && x.is_finite() && k.is_finite()) {
                return Err(Error::Domain(format!(
                    "history must be nonnegative, got ({x}, {k}) at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Piecewise cubic Hermite solution on `[t0, T]` with its history on
/// `[t0 - tau_max, t0)`.
///
/// Knot values and slopes are stored in integration coordinates; every
/// public accessor returns model coordinates.
#[derive(Clone)]
pub struct Trajectory<const N: usize> {
    coords: Coords,
    history: History<N>,
    tau_max: f64,
    times: Vec<f64>,
    states: Vec<[f64; N]>,
    slopes: Vec<[f64; N]>,
}

impl<const N: usize> fmt::Debug for Trajectory<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Trajectory")
            .field("coords", &self.coords)
            .field("knots", &self.times.len())
            .field("t0", &self.times.first())
            .field("t_end", &self.times.last())
            .finish_non_exhaustive()
    }
}

impl<const N: usize> Trajectory<N> {
    pub(crate) fn start(
        coords: Coords,
        history: History<N>,
        tau_max: f64,
        t0: f64,
        capacity: usize,
    ) -> Self {
        let mut times = Vec::with_capacity(capacity);
        times.push(t0);
        let mut states = Vec::with_capacity(capacity);
        states.push(coords.encode(&history.initial));
        Self {
            coords,
            history,
            tau_max,
            times,
            states,
            slopes: Vec::with_capacity(capacity),
        }
    }

    /// Builds a trajectory from explicit Hermite data (integration coordinates).
    pub fn from_knots(
        coords: Coords,
        history: History<N>,
        tau_max: f64,
        times: Vec<f64>,
        states: Vec<[f64; N]>,
        slopes: Vec<[f64; N]>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() || times.len() != slopes.len() {
            return Err(Error::Precondition(
                "knot times, states and slopes must be nonempty and of equal length".into(),
            ));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::Precondition(
                "knot times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            coords,
            history,
            tau_max,
            times,
            states,
            slopes,
        })
    }

    pub(crate) fn push(&mut self, t: f64, y: [f64; N]) {
        self.times.push(t);
        self.states.push(y);
    }

    pub(crate) fn push_slope(&mut self, dy: [f64; N]) {
        self.slopes.push(dy);
    }

    /// Drops a knot whose slope was never computed (halted runs).
    pub(crate) fn seal(&mut self) {
        self.times.truncate(self.slopes.len().max(1));
        self.states.truncate(self.slopes.len().max(1));
        if self.slopes.len() < self.times.len() {
            // a lone initial knot: interpolation is never needed
            self.slopes.push([0.0; N]);
        }
    }

    pub(crate) fn last_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory always has an initial knot")
    }

    pub fn coords(&self) -> Coords {
        self.coords
    }

    pub fn history(&self) -> &History<N> {
        &self.history
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        self.last_time()
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Knot `i` in model coordinates.
    pub fn knot(&self, i: usize) -> [f64; N] {
        self.coords.decode(&self.states[i])
    }

    /// `(t_i, y_i)` pairs in model coordinates.
    pub fn knots(&self) -> impl Iterator<Item = (f64, [f64; N])> + '_ {
        self.times
            .iter()
            .zip(&self.states)
            .map(move |(&t, y)| (t, self.coords.decode(y)))
    }

    /// Raw Hermite data in integration coordinates.
    pub fn raw(&self) -> (&[f64], &[[f64; N]], &[[f64; N]]) {
        (&self.times, &self.states, &self.slopes)
    }

    /// Solution value at `t`, for any `t` in `[t0 - tau_max, T]`.
    pub fn eval(&self, t: f64) -> Result<[f64; N]> {
        let (lo, hi) = (self.t0() - self.tau_max, self.t_end());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        if t < self.t0() {
            return Ok(self.history.at(t));
        }
        Ok(self.coords.decode(&self.interpolate(t)))
    }

    /// Hermite interpolant in integration coordinates; `t` is clamped to
    /// `[t0, T]`.
    pub(crate) fn interpolate(&self, t: f64) -> [f64; N] {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.states[0];
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1];
        }
        // first knot strictly greater than t
        let j = self.times.partition_point(|&s| s <= t);
        let i = j - 1;
        if t == self.times[i] {
            return self.states[i];
        }
        hermite(
            self.times[i],
            self.times[j],
            &self.states[i],
            &self.states[j],
            &self.slopes[i],
            &self.slopes[j],
            t,
        )
    }
}

impl Trajectory<2> {
    /// Model state at `t`.
    pub fn state(&self, t: f64) -> Result<State> {
        self.eval(t).map(State::from)
    }
}

/// Cubic Hermite interpolation on `[t_a, t_b]`.
#[inline]
pub(crate) fn hermite<const N: usize>(
    ta: f64,
    tb: f64,
    ya: &[f64; N],
    yb: &[f64; N],
    fa: &[f64; N],
    fb: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = tb - ta;
    let s = (t - ta) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    std::array::from_fn(|k| h00 * ya[k] + h10 * h * fa[k] + h01 * yb[k] + h11 * h * fb[k])
}

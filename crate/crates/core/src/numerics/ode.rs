//! Dormand–Prince 5(4) integrator with step-size control and a terminal
//! zero-crossing event.

use super::roots::brent;

/// Right-hand side of `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Writes `f(t, y)` into `dy`. Returns `false` when `y` is outside the
    /// domain of the system; the integrator then retries with a smaller step.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: 1e-3,
            h_min: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

/// Why the integrator gave up.
#[derive(Debug, Clone)]
pub struct OdeFailure {
    pub t: f64,
    pub y: Vec<f64>,
    pub reason: &'static str,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub t: f64,
    pub y: Vec<f64>,
    /// True when integration stopped on the event rather than at `t_end`.
    pub event: bool,
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri5 {
    /// One trial step; returns `(y_new, err_norm)` or `None` if a stage left the domain.
    fn step<S: OdeSystem>(&self, sys: &S, t: f64, y: &[f64], h: f64) -> Option<(Vec<f64>, f64)> {
        let n = y.len();
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        for s in 0..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                tmp[i] = y[i] + h * acc;
            }
            if !sys.rhs(t + C[s] * h, &tmp, &mut k[s]) {
                return None;
            }
        }
        let mut y5 = vec![0.0; n];
        let mut err = 0.0;
        for i in 0..n {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * k[s][i];
                s4 += B4[s] * k[s][i];
            }
            y5[i] = y[i] + h * s5;
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (s5 - s4) / sc;
            err += e * e;
        }
        if y5.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((y5, (err / n as f64).sqrt()))
    }

    /// Integrates from `t0` to `t_end` (`t_end >= t0`). If `event` is given,
    /// integration stops at the first point where it changes sign from
    /// positive to non-positive.
    pub fn solve<S, G>(&self, sys: &S, t0: f64, y0: &[f64], t_end: f64, event: Option<G>) -> Result<OdeSolution, OdeFailure>
    where
        S: OdeSystem,
        G: Fn(&[f64]) -> f64,
    {
        assert_eq!(y0.len(), sys.dim());
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut h = self.h_init.min((t_end - t0).max(0.0));
        let (mut accepted, mut rejected) = (0usize, 0usize);
        if t_end <= t0 {
            return Ok(OdeSolution { t, y, event: false, accepted, rejected });
        }
        let mut g_prev = event.as_ref().map(|g| g(&y));

        while t < t_end {
            if accepted + rejected > self.max_steps {
                return Err(OdeFailure { t, y, reason: "step budget exhausted" });
            }
            let last = t + h >= t_end;
            let h_try = if last { t_end - t } else { h };
            match self.step(sys, t, &y, h_try) {
                None => {
                    rejected += 1;
                    h = h_try * 0.25;
                }
                Some((y_new, err)) if err <= 1.0 => {
                    accepted += 1;
                    if let (Some(g), Some(gp)) = (event.as_ref(), g_prev) {
                        let g_new = g(&y_new);
                        if gp > 0.0 && g_new <= 0.0 {
                            return self.locate_event(sys, t, &y, h_try, g, accepted, rejected);
                        }
                        g_prev = Some(g_new);
                    }
                    t = if last { t_end } else { t + h_try };
                    y = y_new;
                    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    h = h_try * fac;
                }
                Some((_, err)) => {
                    rejected += 1;
                    h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
            }
            if h < self.h_min && t < t_end {
                return Err(OdeFailure { t, y, reason: "step size underflow" });
            }
        }
        Ok(OdeSolution { t, y, event: false, accepted, rejected })
    }

    #[allow(clippy::too_many_arguments)]
    fn locate_event<S, G>(
        &self,
        sys: &S,
        t: f64,
        y: &[f64],
        h: f64,
        g: &G,
        accepted: usize,
        rejected: usize,
    ) -> Result<OdeSolution, OdeFailure>
    where
        S: OdeSystem,
        G: Fn(&[f64]) -> f64,
    {
        let probe = |hh: f64| match self.step(sys, t, y, hh) {
            Some((yy, _)) => g(&yy),
            None => f64::NAN,
        };
        let h_event = brent(probe, 0.0, h, 1e-15 * (1.0 + t.abs()), 200).map_err(|_| OdeFailure {
            t,
            y: y.to_vec(),
            reason: "event location failed",
        })?;
        let (y_event, _) = self.step(sys, t, y, h_event).ok_or_else(|| OdeFailure {
            t,
            y: y.to_vec(),
            reason: "event location left the domain",
        })?;
        Ok(OdeSolution {
            t: t + h_event,
            y: y_event,
            event: true,
            accepted,
            rejected,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
            dy[0] = y[1];
            dy[1] = -y[0];
            true
        }
    }

    struct Decay;
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
            dy[0] = -y[0];
            y[0] > 0.0
        }
    }

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let sol = Dopri5::default()
            .solve(&Oscillator, 0.0, &[1.0, 0.0], 10.0, None::<fn(&[f64]) -> f64>)
            .unwrap();
        assert!((sol.y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((sol.y[1] + 10f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn event_is_located_precisely() {
        let sol = Dopri5::default()
            .solve(&Decay, 0.0, &[1.0], 100.0, Some(|y: &[f64]| y[0] - 1e-3))
            .unwrap();
        assert!(sol.event);
        assert!((sol.t - 1000f64.ln()).abs() < 1e-10, "t = {}", sol.t);
    }
}

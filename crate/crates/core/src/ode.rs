//! Dormand–Prince 5(4) integrator for scalar ODEs `y' = f(x, y)`, with the
//! method's 4th-order continuous extension between accepted steps.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Continuous extension (Hairer, Nørsett & Wanner, DOPRI5 dense output).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 0.0,
            max_steps: 100_000,
        }
    }
}

/// Accepted steps `(x, y, y')` of one integration. `dense[i]` holds the
/// extra interpolation coefficient for the step `x[i] -> x[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    dense: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn last(&self) -> (f64, f64) {
        (*self.x.last().unwrap(), *self.y.last().unwrap())
    }

    /// Dense output between the bracketing accepted steps.
    /// Returns `None` outside the integrated span.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = (self.x[0].min(self.x[self.len() - 1]), self.x[0].max(self.x[self.len() - 1]));
        if !(x >= lo && x <= hi) {
            return None;
        }
        let forward = self.x[self.len() - 1] >= self.x[0];
        let k = if forward {
            self.x.partition_point(|&xi| xi < x)
        } else {
            self.x.partition_point(|&xi| xi > x)
        };
        if k == 0 {
            return Some(self.y[0]);
        }
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let s1 = 1.0 - s;
        let r2 = self.y[k] - self.y[k - 1];
        let r3 = h * self.dy[k - 1] - r2;
        let r4 = r2 - h * self.dy[k] - r3;
        let r5 = self.dense[k - 1];
        Some(self.y[k - 1] + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5))))
    }
}

pub fn integrate(
    f: impl Fn(f64, f64) -> f64,
    x0: f64,
    x_end: f64,
    y0: f64,
    opts: SolverOptions,
) -> Result<Trajectory> {
    let span = x_end - x0;
    if span == 0.0 || !span.is_finite() {
        return Err(Error::domain("integration span must be finite and non-empty"));
    }
    let dir = span.signum();

    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y);
    let mut traj = Trajectory {
        x: vec![x],
        y: vec![y],
        dy: vec![k1],
        dense: Vec::new(),
    };

    let scale0 = opts.atol + opts.rtol * y.abs();
    let mut h = if k1.abs() > 1e-300 && scale0 > 0.0 {
        (0.01 * (scale0 / opts.rtol) / k1.abs()).min(span.abs())
    } else {
        1e-3 * span.abs()
    };
    h = h.max(1e-12 * span.abs()) * dir;

    let min_step = 1e-14 * x0.abs().max(x_end.abs()).max(span.abs());
    let mut steps = 0usize;

    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Convergence(format!("exceeded {} steps at x = {x}", opts.max_steps)));
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }

        let k2 = f(x + C2 * h, y + h * A21 * k1);
        let k3 = f(x + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(x + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(x + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(x + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = f(x + h, y_new);

        let local = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let tol = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let err = if tol > 0.0 { local.abs() / tol } else { f64::INFINITY };
        if !err.is_finite() && !y_new.is_finite() {
            return Err(Error::Convergence(format!("solution became non-finite near x = {x}")));
        }

        if err <= 1.0 {
            traj.dense.push(h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7));
            x = if (x + h - x_end) * dir >= 0.0 { x_end } else { x + h };
            y = y_new;
            k1 = k7;
            traj.x.push(x);
            traj.y.push(y);
            traj.dy.push(k1);
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }

        if h.abs() < min_step {
            return Err(Error::Convergence(format!("step size underflow at x = {x}")));
        }
    }

    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let traj = integrate(|_, y| y, 0.0, 1.0, 1.0, SolverOptions::default()).unwrap();
        let (x, y) = traj.last();
        assert_eq!(x, 1.0);
        assert!((y - 1f64.exp()).abs() / 1f64.exp() < 1e-8);
    }

    #[test]
    fn dense_output_between_steps() {
        let traj = integrate(|x, _| x.cos(), 0.0, 3.0, 0.0, SolverOptions::default()).unwrap();
        for i in 0..=300 {
            let x = i as f64 * 0.01;
            let y = traj.eval(x).unwrap();
            assert!((y - x.sin()).abs() < 1e-6, "x = {x}: {y}");
        }
        assert!(traj.eval(3.1).is_none());
    }

    #[test]
    fn backwards() {
        let traj = integrate(|_, y| -y, 2.0, 0.0, 1.0, SolverOptions::default()).unwrap();
        let (_, y) = traj.last();
        assert!((y - 2f64.exp()).abs() / 2f64.exp() < 1e-8);
        assert!(traj.eval(1.0).is_some());
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y² from y(0) = 1 diverges at x = 1.
        let err = integrate(|_, y| y * y, 0.0, 2.0, 1.0, SolverOptions::default()).unwrap_err();
        assert!(err.is_numerical(), "{err:?}");
    }
}

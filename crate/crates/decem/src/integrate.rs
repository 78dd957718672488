//! Fixed-step classical Runge–Kutta integration with trajectory recording.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("step size must be positive, got {0}")]
    BadStep(f64),
    #[error("end time must be non-negative, got {0}")]
    BadEndTime(f64),
    #[error("non-finite derivative at t = {0}")]
    NonFiniteDerivative(f64),
    #[error("step count {0} exceeds the 1e8 guard")]
    TooManySteps(u64),
}

/// Recorded fixed-step trajectory: strictly increasing times, one state
/// snapshot per time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds at least t0")
    }
}

/// One classical RK4 step. Linear-system exactness is not assumed; the
/// right-hand side may be any state-and-time function.
pub fn rk4_step(
    rhs: &mut impl FnMut(f64, &[f64]) -> Vec<f64>,
    t: f64,
    y: &[f64],
    dt: f64,
) -> Result<Vec<f64>, IntegrateError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(IntegrateError::BadStep(dt));
    }
    let check = |k: &[f64]| {
        if k.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(IntegrateError::NonFiniteDerivative(t))
        }
    };
    let k1 = rhs(t, y);
    check(&k1)?;
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(y, k)| y + 0.5 * dt * k).collect();
    let k2 = rhs(t + 0.5 * dt, &y2);
    check(&k2)?;
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(y, k)| y + 0.5 * dt * k).collect();
    let k3 = rhs(t + 0.5 * dt, &y3);
    check(&k3)?;
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(y, k)| y + dt * k).collect();
    let k4 = rhs(t + dt, &y4);
    check(&k4)?;
    Ok(y
        .iter()
        .enumerate()
        .map(|(i, y)| y + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Integrate from `t = 0` to `t_end` with fixed step `dt`, invoking the
/// observer on every snapshot (the initial state included). The final step
/// is shortened to land on `t_end` exactly, so the observer sees
/// `ceil(t_end/dt) + 1` snapshots; `t_end = 0` records the single initial
/// snapshot.
pub fn integrate_observed(
    rhs: &mut impl FnMut(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    t_end: f64,
    dt: f64,
    mut observer: impl FnMut(f64, &[f64]),
) -> Result<Trajectory, IntegrateError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(IntegrateError::BadStep(dt));
    }
    if t_end.is_nan() || t_end < 0.0 {
        return Err(IntegrateError::BadEndTime(t_end));
    }
    let n_steps = (t_end / dt).ceil() as u64;
    if n_steps > 100_000_000 {
        return Err(IntegrateError::TooManySteps(n_steps));
    }
    let mut times = Vec::with_capacity(n_steps as usize + 1);
    let mut states = Vec::with_capacity(n_steps as usize + 1);
    let mut y = y0.to_vec();
    let mut t = 0.0;
    observer(t, &y);
    times.push(t);
    states.push(y.clone());
    for step in 0..n_steps {
        let remaining = t_end - t;
        let h = dt.min(remaining);
        y = rk4_step(rhs, t, &y, h)?;
        t = if step + 1 == n_steps {
            t_end
        } else {
            (step + 1) as f64 * dt
        };
        observer(t, &y);
        times.push(t);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

/// [`integrate_observed`] without an observer.
pub fn integrate(
    rhs: &mut impl FnMut(f64, &[f64]) -> Vec<f64>,
    y0: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, IntegrateError> {
    integrate_observed(rhs, y0, t_end, dt, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_leaves_state_unchanged() {
        let mut rhs = |_t: f64, y: &[f64]| vec![0.0; y.len()];
        let y = rk4_step(&mut rhs, 0.0, &[1.0, -2.0], 0.25).unwrap();
        assert_eq!(y, vec![1.0, -2.0]);
    }

    #[test]
    fn scalar_exponential_single_step() {
        // x' = x, x(0) = 1, dt = 0.1: RK4 gives the quartic Taylor value
        // 1.1051708333…, within 1e-7 of e^{0.1}.
        let mut rhs = |_t: f64, y: &[f64]| vec![y[0]];
        let y = rk4_step(&mut rhs, 0.0, &[1.0], 0.1).unwrap();
        assert!((y[0] - 1.1051708333333333).abs() < 1e-15);
        assert!((y[0] - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn snapshot_count_and_t_end_zero() {
        let mut rhs = |_t: f64, y: &[f64]| vec![-y[0]];
        let tr = integrate(&mut rhs, &[1.0], 0.0, 0.1).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.times, vec![0.0]);
        let tr = integrate(&mut rhs, &[1.0], 1.0, 0.3).unwrap();
        // ceil(1.0/0.3) = 4 steps, 5 snapshots, last time exactly 1.0
        assert_eq!(tr.len(), 5);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        let mut count = 0;
        integrate_observed(&mut rhs, &[1.0], 1.0, 0.25, |_, _| count += 1).unwrap();
        assert_eq!(count, 5);
    }

    #[test]
    fn fourth_order_convergence_on_exponential() {
        let mut rhs = |_t: f64, y: &[f64]| vec![y[0]];
        let exact = 1.0f64.exp();
        let err = |dt: f64| {
            let tr = integrate(&mut |_t: f64, y: &[f64]| vec![y[0]], &[1.0], 1.0, dt).unwrap();
            (tr.last_state()[0] - exact).abs()
        };
        let _ = &mut rhs;
        let e1 = err(0.05);
        let e2 = err(0.025);
        let ratio = e1 / e2;
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rhs = |_t: f64, y: &[f64]| vec![y[0]];
        assert!(matches!(
            rk4_step(&mut rhs, 0.0, &[1.0], 0.0),
            Err(IntegrateError::BadStep(_))
        ));
        let mut nan_rhs = |_t: f64, _y: &[f64]| vec![f64::NAN];
        assert!(matches!(
            rk4_step(&mut nan_rhs, 0.0, &[1.0], 0.1),
            Err(IntegrateError::NonFiniteDerivative(_))
        ));
        let mut rhs2 = |_t: f64, y: &[f64]| vec![y[0]];
        assert!(matches!(
            integrate(&mut rhs2, &[1.0], 2.0, 1e-9),
            Err(IntegrateError::TooManySteps(_))
        ));
    }
}

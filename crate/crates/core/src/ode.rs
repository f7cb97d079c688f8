//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `h` carries the step-size guess in and the last accepted size out, so
/// consecutive calls over adjacent intervals keep their step history.
/// `on_step` sees every accepted state, including the final one.
pub fn integrate<const N: usize, F, S>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
    h: &mut f64,
    mut on_step: S,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]),
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut step = if *h > 0.0 { h.min(span.abs()) } else { span.abs() * 1e-3 };
    let mut k1 = f(t, &y);
    let mut steps = 0usize;
    loop {
        if steps >= ctl.max_steps {
            return Err(Error::NoConvergence(format!(
                "ODE integration exceeded {} steps at t = {t}",
                ctl.max_steps
            )));
        }
        let remaining = (t1 - t).abs();
        let last = step >= remaining;
        if last {
            step = remaining;
        }
        let hs = dir * step;
        let k2 = f(t + C2 * hs, &axpy(&y, &[(A21, &k1)], hs));
        let k3 = f(t + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = f(t + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = f(t + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = f(t + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        steps += 1;
        if !err.is_finite() {
            step *= 0.2;
            continue;
        }
        if err <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            on_step(t, &y);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                *h = step;
            }
            if last {
                return Ok(y);
            }
            step *= factor;
        } else {
            step *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if step < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::NoConvergence(format!("ODE step size underflow at t = {t}")));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_forward_and_back() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let ctl = StepControl::default();
        let mut h = 0.0;
        let y = integrate(&f, 0.0, [0.0, 1.0], 10.0, &ctl, &mut h, |_, _| {}).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
        assert!((y[1] - 10f64.cos()).abs() < 1e-10);
        let mut h = 0.0;
        let back = integrate(&f, 10.0, y, 0.0, &ctl, &mut h, |_, _| {}).unwrap();
        assert!(back[0].abs() < 1e-9 && (back[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn step_callback_sees_final_state() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let mut last = (0.0, 0.0);
        let mut h = 0.0;
        integrate(&f, 0.0, [1.0], 1.0, &StepControl::default(), &mut h, |t, y| last = (t, y[0])).unwrap();
        assert_eq!(last.0, 1.0);
        assert!((last.1 - std::f64::consts::E).abs() < 1e-11);
    }
}

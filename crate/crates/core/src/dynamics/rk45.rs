//! Dormand–Prince 5(4) with adaptive step size for `dy/dt = f(y)`.

use crate::error::{Error, Result};
use crate::operator::{c64, ZERO};

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
// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
/// Remaining intervals below this fraction of `t_end` are rounding noise.
const ROUNDING: f64 = 1e-13;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// In-place map applied to the state after each accepted step.
pub type Projection<'a> = &'a dyn Fn(&mut [c64]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
}

/// Counters reported after integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Adaptive integrator state, carried across sample points so the step
/// size and the first-same-as-last stage are reused.
pub struct DormandPrince {
    tol: Tolerances,
    h: Option<f64>,
    k: [Vec<c64>; 7],
    y_stage: Vec<c64>,
    y_new: Vec<c64>,
    fsal_valid: bool,
    pub stats: StepStats,
}

impl DormandPrince {
    pub fn new(n: usize, tol: Tolerances) -> Self {
        Self {
            tol,
            h: None,
            k: std::array::from_fn(|_| vec![ZERO; n]),
            y_stage: vec![ZERO; n],
            y_new: vec![ZERO; n],
            fsal_valid: false,
            stats: StepStats::default(),
        }
    }

    /// Marks `y` as modified outside the integrator (e.g. symmetrized), so
    /// the cached derivative is recomputed.
    pub fn invalidate(&mut self) {
        self.fsal_valid = false;
    }

    fn initial_step(&mut self, y: &[c64], f: &mut impl FnMut(&[c64], &mut [c64])) -> f64 {
        // Hairer, Nørsett & Wanner, starting-step heuristic.
        let scale = |v: c64| self.tol.abs + self.tol.rel * v.norm();
        let rms = |v: &[c64], w: &[c64]| -> f64 {
            let s: f64 = v.iter().zip(w).map(|(a, y)| (a.norm() / scale(*y)).powi(2)).sum();
            (s / v.len() as f64).sqrt()
        };
        let d0 = rms(y, y);
        let d1 = rms(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        for (s, (yi, ki)) in self.y_stage.iter_mut().zip(y.iter().zip(&self.k[0])) {
            *s = yi + ki * h0;
        }
        f(&self.y_stage, &mut self.k[1]);
        self.stats.rhs_evals += 1;
        let diff: Vec<c64> = self.k[1].iter().zip(&self.k[0]).map(|(a, b)| a - b).collect();
        let d2 = rms(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(self.tol.max_step)
    }

    /// Advances `y` from `t` to `t_end` in place.
    pub fn advance(&mut self, y: &mut [c64], t: f64, t_end: f64, f: &mut impl FnMut(&[c64], &mut [c64])) -> Result<()> {
        self.advance_projected(y, t, t_end, f, None)
    }

    /// As [`advance`](Self::advance), applying `project` to `y` after every
    /// accepted step.
    pub fn advance_projected(
        &mut self,
        y: &mut [c64],
        t: f64,
        t_end: f64,
        f: &mut impl FnMut(&[c64], &mut [c64]),
        project: Option<Projection<'_>>,
    ) -> Result<()> {
        let mut t = t;
        if t_end - t <= ROUNDING * t_end.abs().max(1.0) {
            return Ok(());
        }
        if !self.fsal_valid {
            f(y, &mut self.k[0]);
            self.stats.rhs_evals += 1;
            self.fsal_valid = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(y, f),
        };

        while t_end - t > ROUNDING * t_end.abs().max(1.0) {
            let remaining = t_end - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Solver(format!(
                    "step size underflow at t = {t:.6e} (h = {step:.3e}); tolerances too tight \
                     or the generator is too stiff"
                )));
            }

            self.stages(y, step, f);
            let err = self.error_norm(y, step);
            if !err.is_finite() {
                return Err(Error::Solver(format!("non-finite state at t = {t:.6e}")));
            }
            if err <= 1.0 {
                t = if last { t_end } else { t + step };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                if let Some(project) = project {
                    project(y);
                    f(y, &mut self.k[0]);
                    self.stats.rhs_evals += 1;
                }
                self.stats.accepted += 1;
                let factor =
                    if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
                // A step shortened to land on t_end says nothing about the
                // natural step size.
                if !last || step >= h {
                    h = (step * factor).min(self.tol.max_step);
                }
            } else {
                self.stats.rejected += 1;
                h = step * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            }
        }
        self.h = Some(h);
        Ok(())
    }

    fn stages(&mut self, y: &[c64], h: f64, f: &mut impl FnMut(&[c64], &mut [c64])) {
        let rows: [&[f64]; 6] = [
            &[A21],
            &[A31, A32],
            &[A41, A42, A43],
            &[A51, A52, A53, A54],
            &[A61, A62, A63, A64, A65],
            &[B1, 0.0, B3, B4, B5, B6],
        ];
        for (s, coeffs) in rows.iter().enumerate() {
            let target = if s == 5 { &mut self.y_new } else { &mut self.y_stage };
            for (idx, out) in target.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (c, k) in coeffs.iter().zip(&self.k) {
                    if *c != 0.0 {
                        acc += k[idx] * *c;
                    }
                }
                *out = y[idx] + acc * h;
            }
            let (_, tail) = self.k.split_at_mut(s + 1);
            let src = if s == 5 { &self.y_new } else { &self.y_stage };
            f(src, &mut tail[0]);
            self.stats.rhs_evals += 1;
        }
    }

    fn error_norm(&self, y: &[c64], h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (idx, yi) in y.iter().enumerate() {
            let e = self.k[0][idx] * E1
                + self.k[2][idx] * E3
                + self.k[3][idx] * E4
                + self.k[4][idx] * E5
                + self.k[5][idx] * E6
                + self.k[6][idx] * E7;
            let sc = self.tol.abs + self.tol.rel * yi.norm().max(self.y_new[idx].norm());
            worst = worst.max((e * h).norm() / sc);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances { rel: 1e-10, abs: 1e-12, max_step: f64::INFINITY }
    }

    #[test]
    fn exponential_decay() {
        let mut y = vec![c64::new(1.0, 0.0)];
        let mut dp = DormandPrince::new(1, tol());
        let mut f = |y: &[c64], out: &mut [c64]| out[0] = -y[0];
        dp.advance(&mut y, 0.0, 1.0, &mut f).unwrap();
        assert!((y[0].re - (-1.0f64).exp()).abs() < 1e-9);
        dp.advance(&mut y, 1.0, 3.0, &mut f).unwrap();
        assert!((y[0].re - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rotation_keeps_modulus() {
        let mut y = vec![c64::new(1.0, 0.0)];
        let mut dp = DormandPrince::new(1, tol());
        let mut f = |y: &[c64], out: &mut [c64]| out[0] = c64::new(0.0, -2.0) * y[0];
        dp.advance(&mut y, 0.0, 10.0, &mut f).unwrap();
        let want = c64::new(20f64.cos(), -(20f64.sin()));
        assert!((y[0] - want).norm() < 1e-8);
        assert!(dp.stats.accepted > 10);
    }

    #[test]
    fn lands_exactly_on_targets() {
        let mut y = vec![c64::new(0.0, 0.0)];
        let mut dp = DormandPrince::new(1, tol());
        let mut f = |_: &[c64], out: &mut [c64]| out[0] = c64::new(1.0, 0.0);
        let mut t = 0.0;
        for k in 1..=7 {
            let next = k as f64 * 0.3;
            dp.advance(&mut y, t, next, &mut f).unwrap();
            t = next;
        }
        assert!((y[0].re - 2.1).abs() < 1e-13);
    }

    #[test]
    fn max_step_is_respected() {
        let mut y = vec![c64::new(1.0, 0.0)];
        let mut dp = DormandPrince::new(1, Tolerances { max_step: 0.01, ..tol() });
        let mut f = |_: &[c64], out: &mut [c64]| out[0] = ZERO;
        dp.advance(&mut y, 0.0, 1.0, &mut f).unwrap();
        assert!(dp.stats.accepted >= 100);
    }
}

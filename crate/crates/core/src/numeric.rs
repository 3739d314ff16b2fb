//! Compensated summation and adaptive quadrature.

/// Neumaier-compensated accumulator. Summing n terms keeps the rounding
/// error of the accumulation at O(eps) instead of O(n·eps), which is what
/// lets million-factor Euler products in log-space hold ~1e-15 relative
/// accuracy. The (sum, compensation) pair carries roughly double the
/// precision of a single f64 through the accumulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Relative tolerance target for all prediction integrals.
pub const QUAD_REL_TOL: f64 = 1e-9;
/// Absolute floor below which refinement stops.
pub const QUAD_ABS_FLOOR: f64 = 1e-12;
/// Bisection depth cap; bounds runtime on pathological integrands.
pub const QUAD_MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Refines until the local Richardson error estimate `(S_left+S_right−S)/15`
/// drops below `max(abs_floor, rel_tol·|whole estimate|)` scaled to the
/// subinterval, or the depth cap is hit.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    integrate_tol(f, a, b, QUAD_REL_TOL, QUAD_ABS_FLOOR)
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, abs_floor: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let tol = (whole.abs() * rel).max(abs_floor);
    adaptive(f, a, b, fa, fm, fb, whole, tol, QUAD_MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        left + right + err / 15.0
    } else {
        let half_tol = 0.5 * tol;
        adaptive(f, a, m, fa, flm, fm, left, half_tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
    }
}

//! Adaptive Simpson quadrature and cached running integrals.

use crate::error::{IsoError, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;
const MAX_EVALS: usize = 5_000_000;

/// `∫_lo^hi f` by adaptive Simpson with absolute tolerance `tol`.
pub fn quad<F: Fn(f64) -> f64 + ?Sized>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    if !(lo.is_finite() && hi.is_finite()) || !(tol > 0.0) {
        return Err(IsoError::InvalidInput(format!(
            "quad on [{lo}, {hi}] with tol {tol}"
        )));
    }
    let (a, b, sign) = if lo < hi {
        (lo, hi, 1.0)
    } else {
        (hi, lo, -1.0)
    };
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut st = State {
        evals: 3,
        failed: false,
    };
    let v = step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut st);
    if st.failed || !v.is_finite() {
        return Err(IsoError::NoConvergence { lo, hi });
    }
    Ok(sign * v)
}

struct State {
    evals: usize,
    failed: bool,
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    st: &mut State,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    st.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 1e-15 * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol || delta.abs() <= floor {
        return left + right + delta / 15.0;
    }
    if depth == 0 || st.evals > MAX_EVALS || !delta.is_finite() {
        st.failed = true;
        return left + right;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, st)
        + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, st)
}

/// `s -> ∫_{base}^s f` with values cached on a knot grid, so that repeated
/// evaluation (for instance inside an outer quadrature) only integrates
/// from the nearest knot.
pub struct CumulativeIntegral<F> {
    f: F,
    knots: Vec<f64>,
    values: Vec<f64>,
    tol: f64,
}

impl<F: Fn(f64) -> f64> CumulativeIntegral<F> {
    /// Caches `∫_{lo}^{knot}` on `n` equal sub-intervals of `[lo, hi]`.
    pub fn new(f: F, lo: f64, hi: f64, n: usize, tol: f64) -> Result<Self> {
        let n = n.max(1);
        let knots: Vec<f64> = (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .collect();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let piece_tol = tol / n as f64;
        for w in knots.windows(2) {
            let prev = *values.last().unwrap();
            values.push(prev + quad(&f, w[0], w[1], piece_tol)?);
        }
        Ok(Self {
            f,
            knots,
            values,
            tol: piece_tol,
        })
    }

    pub fn base(&self) -> f64 {
        self.knots[0]
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let n = self.knots.len() - 1;
        let (lo, hi) = (self.knots[0], self.knots[n]);
        let h = (hi - lo) / n as f64;
        let k = if h == 0.0 {
            0
        } else {
            (((s - lo) / h).round().max(0.0) as usize).min(n)
        };
        Ok(self.values[k] + quad(&self.f, self.knots[k], s, self.tol)?)
    }

    pub fn integrand(&self, s: f64) -> f64 {
        (self.f)(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_examples() {
        assert!((quad(&|_| 1.0, 0.0, 1.0, 1e-10).unwrap() - 1.0).abs() < 1e-12);
        assert!((quad(&|s| s, 0.0, 1.0, 1e-10).unwrap() - 0.5).abs() < 1e-12);
        assert!((quad(&|s: f64| 1.0 / s, 1.0, 2.0, 1e-10).unwrap() - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn quad_orientation_and_empty() {
        let f = |s: f64| s.sin();
        let fwd = quad(&f, 0.0, 2.0, 1e-12).unwrap();
        let back = quad(&f, 2.0, 0.0, 1e-12).unwrap();
        assert_eq!(fwd, -back);
        assert!((fwd - (1.0 - 2f64.cos())).abs() < 1e-11);
        assert_eq!(quad(&f, 1.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn quad_reports_nonconvergence() {
        let r = quad(&|s: f64| 1.0 / s, -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(IsoError::NoConvergence { .. })));
    }

    #[test]
    fn nested_quadrature() {
        // ∫_0^1 ∫_0^v w dw dv = 1/6
        let inner = |v: f64| quad(&|w| w, 0.0, v, 1e-12).unwrap();
        assert!((quad(&inner, 0.0, 1.0, 1e-10).unwrap() - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn cumulative_matches_direct() {
        let c = CumulativeIntegral::new(|s: f64| s.cos() * s, 0.5, 3.0, 32, 1e-11).unwrap();
        for s in [0.5, 0.61, 1.7, 2.999, 3.0] {
            let want = quad(&|w: f64| w.cos() * w, 0.5, s, 1e-12).unwrap();
            assert!((c.eval(s).unwrap() - want).abs() < 1e-10);
        }
    }
}

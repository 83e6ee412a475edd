//! Adaptive Simpson integration for smooth, Gaussian-like integrands.

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simpson {
    /// Absolute error target for the whole interval.
    pub abs_tol: f64,
    /// The interval is first cut into panels no wider than this so that no
    /// narrow peak can hide between the initial sample points.
    pub max_panel: f64,
    pub max_depth: u32,
}

impl Default for Simpson {
    fn default() -> Self {
        Simpson {
            abs_tol: 1e-10,
            max_panel: 0.5,
            max_depth: 40,
        }
    }
}

impl Simpson {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Simpson {
            abs_tol,
            ..Simpson::default()
        }
    }

    /// Integral of `f` over the finite interval `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let panels = ((b - a) / self.max_panel).ceil().max(1.0) as usize;
        let width = (b - a) / panels as f64;
        let panel_tol = self.abs_tol / panels as f64;
        (0..panels)
            .map(|i| {
                let lo = a + i as f64 * width;
                let hi = if i + 1 == panels { b } else { lo + width };
                let mid = 0.5 * (lo + hi);
                let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
                let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
                self.refine(&f, lo, hi, flo, fmid, fhi, whole, panel_tol, self.max_depth)
            })
            .sum()
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: Fn(f64) -> f64>(
        &self,
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
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        self.refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + self.refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::erfc;

    #[test]
    fn polynomial_is_exact() {
        let v = Simpson::default().integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0);
        assert!((v - (20.0 - 8.0 + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail_matches_erfc() {
        let pdf = |x: f64| (-(x - 1.3) * (x - 1.3)).exp() / std::f64::consts::PI.sqrt();
        let v = Simpson::with_tolerance(1e-12).integrate(pdf, 0.0, 1.3 + 8.0);
        assert!((v - 0.5 * erfc(-1.3)).abs() < 1e-11, "{v}");
    }

    #[test]
    fn empty_interval() {
        assert_eq!(Simpson::default().integrate(|_| 1.0, 2.0, 2.0), 0.0);
        assert_eq!(Simpson::default().integrate(|_| 1.0, 3.0, 2.0), 0.0);
    }
}

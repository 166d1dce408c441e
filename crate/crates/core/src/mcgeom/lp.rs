//! Phase-one simplex for convex-hull membership.
//!
//! Decides whether weights `l >= 0` with `sum l = 1` and `sum l_i X_i = q`
//! exist. Rows are sign-normalized so the right-hand side is non-negative,
//! one artificial per row forms the starting basis, and the sum of
//! artificials is minimized with Bland's rule. A positive optimum yields a
//! Farkas certificate: a hyperplane with every `X_i` on one side and `q`
//! strictly on the other.

use crate::{Error, Result};

/// Residual tolerance on the equality constraints.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-12;

/// Affine functional `offset + normal . x` that is `<= 0` on every hull
/// point and positive at the rejected query.
#[derive(Debug, Clone, PartialEq)]
pub struct Separator {
    pub offset: f64,
    pub normal: Vec<f64>,
}

impl Separator {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.offset + self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Inside,
    Outside(Separator),
}

/// Reusable dense tableau.
#[derive(Debug, Default, Clone)]
pub struct FeasibilityLp {
    tab: Vec<f64>,
    basis: Vec<usize>,
    sign: Vec<f64>,
    cols: usize,
}

impl FeasibilityLp {
    pub fn new() -> Self {
        Self::default()
    }

    /// `points` is row-major `n x d`.
    pub fn solve(&mut self, points: &[f64], d: usize, query: &[f64]) -> Result<Verdict> {
        debug_assert_eq!(query.len(), d);
        let n = points.len() / d;
        if n == 0 {
            return Err(Error::domain("membership test on an empty point set"));
        }
        let m = d + 1;
        let width = n + m + 1;
        let rhs = n + m;
        self.tab.clear();
        self.tab.resize((m + 1) * width, 0.0);
        self.basis.clear();
        self.sign.clear();
        self.cols = n;

        let tab = &mut self.tab;
        for r in 0..m {
            let b = if r == 0 { 1.0 } else { query[r - 1] };
            let s = if b < 0.0 { -1.0 } else { 1.0 };
            self.sign.push(s);
            let row = &mut tab[r * width..(r + 1) * width];
            for j in 0..n {
                row[j] = s * if r == 0 { 1.0 } else { points[j * d + r - 1] };
            }
            row[n + r] = 1.0;
            row[rhs] = s * b;
            self.basis.push(n + r);
        }
        // reduced costs of the phase-one objective
        let (body, obj) = tab.split_at_mut(m * width);
        for j in 0..n {
            obj[j] = -(0..m).map(|r| body[r * width + j]).sum::<f64>();
        }
        obj[rhs] = -(0..m).map(|r| body[r * width + rhs]).sum::<f64>();

        let max_pivots = 50 * (n + m) * m + 100;
        for _ in 0..max_pivots {
            let obj = &tab[m * width..];
            let entering = (0..n + m).find(|&j| obj[j] < -COST_EPS && !self.basis.contains(&j));
            let Some(e) = entering else {
                return self.finish(n, m, width);
            };
            // ratio test, ties to the smallest basic index
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = tab[r * width + e];
                if a > PIVOT_EPS {
                    let ratio = tab[r * width + rhs] / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio || (ratio == lratio && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::SolverFailure("phase-one objective unbounded below".into()));
            };
            pivot(tab, width, m + 1, pr, e);
            self.basis[pr] = e;
        }
        Err(Error::SolverFailure(format!("no optimum after {max_pivots} pivots (n = {n}, d = {d})")))
    }

    /// After an `Inside` verdict: the basic point indices, provided no
    /// artificial variable is left in the basis.
    pub fn point_basis(&self) -> Option<&[usize]> {
        self.basis.iter().all(|&j| j < self.cols).then_some(&self.basis[..])
    }

    fn finish(&self, n: usize, m: usize, width: usize) -> Result<Verdict> {
        let obj = &self.tab[m * width..];
        let value = -obj[n + m];
        if !value.is_finite() {
            return Err(Error::SolverFailure(format!("non-finite phase-one objective {value}")));
        }
        if value <= FEASIBILITY_TOL {
            return Ok(Verdict::Inside);
        }
        // duals y_r = 1 - reduced cost of artificial r, mapped back through the row signs
        let u: Vec<f64> = (0..m).map(|r| self.sign[r] * (1.0 - obj[n + r])).collect();
        Ok(Verdict::Outside(Separator { offset: u[0], normal: u[1..].to_vec() }))
    }
}

fn pivot(tab: &mut [f64], width: usize, rows: usize, pr: usize, pc: usize) {
    let inv = 1.0 / tab[pr * width + pc];
    for v in &mut tab[pr * width..(pr + 1) * width] {
        *v *= inv;
    }
    tab[pr * width + pc] = 1.0;
    let (before, rest) = tab.split_at_mut(pr * width);
    let (prow, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [f64]| {
        let f = row[pc];
        if f != 0.0 {
            for (x, p) in row.iter_mut().zip(prow.iter()) {
                *x -= f * p;
            }
            row[pc] = 0.0;
        }
    };
    before.chunks_exact_mut(width).for_each(eliminate);
    after.chunks_exact_mut(width).take(rows - pr - 1).for_each(eliminate);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(points: &[f64], d: usize, q: &[f64]) -> Verdict {
        FeasibilityLp::new().solve(points, d, q).unwrap()
    }

    #[test]
    fn square_membership() {
        let sq = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        assert_eq!(solve(&sq, 2, &[0.5, 0.5]), Verdict::Inside);
        assert_eq!(solve(&sq, 2, &[1.0, 1.0]), Verdict::Inside);
        assert_eq!(solve(&sq, 2, &[0.3, 0.0]), Verdict::Inside);
        let Verdict::Outside(sep) = solve(&sq, 2, &[1.2, 0.5]) else { panic!("expected outside") };
        assert!(sep.eval(&[1.2, 0.5]) > 0.0);
        for p in sq.chunks(2) {
            assert!(sep.eval(p) <= 1e-12);
        }
        assert!(matches!(solve(&sq, 2, &[-0.1, -0.1]), Verdict::Outside(_)));
    }

    #[test]
    fn degenerate_sets() {
        // single point, segment in the plane
        assert_eq!(solve(&[0.3, -0.2], 2, &[0.3, -0.2]), Verdict::Inside);
        assert!(matches!(solve(&[0.3, -0.2], 2, &[0.3, -0.1]), Verdict::Outside(_)));
        let seg = [0.0, 0.0, 1.0, 1.0];
        assert_eq!(solve(&seg, 2, &[0.25, 0.25]), Verdict::Inside);
        assert!(matches!(solve(&seg, 2, &[0.25, 0.3]), Verdict::Outside(_)));
    }

    #[test]
    fn repeated_points_do_not_cycle() {
        let mut pts = Vec::new();
        for _ in 0..6 {
            pts.extend_from_slice(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        }
        assert_eq!(solve(&pts, 3, &[0.2, 0.2, 0.2]), Verdict::Inside);
        assert_eq!(solve(&pts, 3, &[0.0, 0.0, 0.0]), Verdict::Inside);
        assert!(matches!(solve(&pts, 3, &[0.4, 0.4, 0.4]), Verdict::Outside(_)));
    }

    #[test]
    fn empty_set_is_rejected() {
        assert!(FeasibilityLp::new().solve(&[], 2, &[0.0, 0.0]).is_err());
    }
}

use super::lp::{FeasibilityLp, Separator, Verdict, FEASIBILITY_TOL};
use super::PointCloud;
use crate::{Error, Result};

const SEPARATOR_CAP: usize = 1024;
const SIMPLEX_CAP: usize = 1024;

/// True iff `query` lies in the convex hull of the cloud (one feasibility solve).
pub fn contains(cloud: &PointCloud, query: &[f64]) -> Result<bool> {
    if cloud.is_empty() {
        return Err(Error::domain("contains requires a nonempty cloud"));
    }
    if query.len() != cloud.d() {
        return Err(Error::domain(format!("query has dimension {}, cloud has {}", query.len(), cloud.d())));
    }
    Ok(matches!(FeasibilityLp::new().solve(&cloud.points, cloud.d(), query)?, Verdict::Inside))
}

struct CachedSeparator {
    sep: Separator,
    /// `max_j sep(X_j)` plus a rounding margin.
    cutoff: f64,
}

/// Repeated membership queries against one fixed hull.
///
/// Every answer is backed by a certificate: either a feasibility solve, a
/// separating hyperplane learned from an earlier solve, or a simplex of hull
/// points (with its inverse barycentric map) learned from an earlier solve.
pub struct Hull<'a> {
    points: &'a [f64],
    d: usize,
    max_norm_sq: f64,
    lp: FeasibilityLp,
    separators: Vec<CachedSeparator>,
    simplices: Vec<Vec<f64>>,
    pub lp_solves: usize,
}

impl<'a> Hull<'a> {
    pub fn new(points: &'a [f64], d: usize) -> Result<Self> {
        if points.is_empty() || d == 0 || points.len() % d != 0 {
            return Err(Error::domain("hull needs a nonempty row-major point array"));
        }
        let max_norm_sq = points.chunks_exact(d).map(|p| p.iter().map(|x| x * x).sum::<f64>()).fold(0.0, f64::max);
        Ok(Hull {
            points,
            d,
            max_norm_sq,
            lp: FeasibilityLp::new(),
            separators: Vec::new(),
            simplices: Vec::new(),
            lp_solves: 0,
        })
    }

    pub fn contains(&mut self, q: &[f64]) -> Result<bool> {
        let r2 = q.iter().map(|x| x * x).sum::<f64>();
        if r2.sqrt() > self.max_norm_sq.sqrt() + FEASIBILITY_TOL {
            return Ok(false);
        }
        if let Some(i) = self.separators.iter().position(|c| c.sep.eval(q) > c.cutoff) {
            if i > 0 {
                self.separators.swap(i, i - 1);
            }
            return Ok(false);
        }
        if let Some(i) = self.simplices.iter().position(|m| in_simplex(m, q)) {
            if i > 0 {
                self.simplices.swap(i, i - 1);
            }
            return Ok(true);
        }
        self.lp_solves += 1;
        match self.lp.solve(self.points, self.d, q)? {
            Verdict::Inside => {
                if self.simplices.len() < SIMPLEX_CAP {
                    if let Some(inv) = self.lp.point_basis().and_then(|b| barycentric_map(self.points, self.d, b)) {
                        self.simplices.push(inv);
                    }
                }
                Ok(true)
            }
            Verdict::Outside(sep) => {
                if self.separators.len() < SEPARATOR_CAP {
                    let max_on_hull =
                        self.points.chunks_exact(self.d).map(|p| sep.eval(p)).fold(f64::NEG_INFINITY, f64::max);
                    let scale = sep.offset.abs() + sep.normal.iter().map(|x| x.abs()).sum::<f64>();
                    if sep.eval(q) > max_on_hull + FEASIBILITY_TOL * scale {
                        let cutoff = max_on_hull + FEASIBILITY_TOL * scale;
                        self.separators.push(CachedSeparator { sep, cutoff });
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Inverse of the `(d+1) x (d+1)` matrix with columns `(1, X_j)`, `j` in
/// `basis`, row-major; `None` if it is numerically singular.
fn barycentric_map(points: &[f64], d: usize, basis: &[usize]) -> Option<Vec<f64>> {
    let m = d + 1;
    let mut a = vec![0.0; m * 2 * m];
    let w = 2 * m;
    for r in 0..m {
        for (c, &j) in basis.iter().enumerate() {
            a[r * w + c] = if r == 0 { 1.0 } else { points[j * d + r - 1] };
        }
        a[r * w + m + r] = 1.0;
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x * w + col].abs().total_cmp(&a[y * w + col].abs()))?;
        if a[piv * w + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for k in 0..w {
                a.swap(piv * w + k, col * w + k);
            }
        }
        let inv = 1.0 / a[col * w + col];
        for k in 0..w {
            a[col * w + k] *= inv;
        }
        for r in 0..m {
            if r != col {
                let f = a[r * w + col];
                if f != 0.0 {
                    for k in 0..w {
                        a[r * w + k] -= f * a[col * w + k];
                    }
                }
            }
        }
    }
    Some((0..m).flat_map(|r| a[r * w + m..(r + 1) * w].to_vec()).collect())
}

fn in_simplex(inv: &[f64], q: &[f64]) -> bool {
    let m = q.len() + 1;
    inv.chunks_exact(m).all(|row| row[0] + row[1..].iter().zip(q).map(|(a, b)| a * b).sum::<f64>() >= -1e-12)
}

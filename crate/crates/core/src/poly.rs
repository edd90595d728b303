//! Small dense real polynomials in one variable, enough for locating the
//! sign changes of best-response gaps along an exponential ray.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly {
    /// Ascending powers.
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    /// Divides by `(s - 1)`, dropping the remainder.
    pub fn deflate_at_one(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::new(vec![0.0]);
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (1..n).rev() {
            carry += self.coeffs[k];
            q[k - 1] = carry;
        }
        Poly::new(q)
    }

    /// Points in `(lo, hi)` where the polynomial may turn around: the sign
    /// changes of its derivative, found recursively.
    fn turning_points(&self, lo: f64, hi: f64, rel_tol: f64) -> Vec<f64> {
        if self.degree() < 2 {
            return Vec::new();
        }
        let d = self.derivative();
        d.sign_change_roots(lo, hi, 0, rel_tol)
    }

    /// All sign-change roots in `[lo, hi]`, ascending. Brackets on a uniform
    /// grid of `grid` subintervals refined with the turning points, then
    /// bisects each bracket until its width is at most `rel_tol` times its
    /// lower end.
    pub fn sign_change_roots(&self, lo: f64, hi: f64, grid: usize, rel_tol: f64) -> Vec<f64> {
        if self.degree() == 0 || hi <= lo {
            return Vec::new();
        }
        let mut points: Vec<f64> = (0..=grid.max(1))
            .map(|k| lo + (hi - lo) * k as f64 / grid.max(1) as f64)
            .collect();
        points.extend(self.turning_points(lo, hi, rel_tol));
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let mut roots = Vec::new();
        let mut prev = (points[0], self.eval(points[0]));
        if prev.1 == 0.0 {
            roots.push(prev.0);
        }
        for &p in &points[1..] {
            let v = self.eval(p);
            if v == 0.0 {
                roots.push(p);
            } else if prev.1 != 0.0 && prev.1.signum() != v.signum() {
                roots.push(self.bisect(prev.0, p, prev.1, rel_tol));
            }
            prev = (p, v);
        }
        roots.dedup();
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, f_lo: f64, rel_tol: f64) -> f64 {
        let sign_lo = f_lo.signum();
        for _ in 0..2200 {
            if hi - lo <= (lo.abs() * rel_tol).max(f64::MIN_POSITIVE) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return mid;
            }
            if v.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deflation_divides_out_unit_root() {
        // (s - 1)(s - 0.25) = s^2 - 1.25 s + 0.25
        let p = Poly::new(vec![0.25, -1.25, 1.0]);
        let q = p.deflate_at_one();
        assert_eq!(q, Poly::new(vec![-0.25, 1.0]));
    }

    #[test]
    fn finds_close_roots_through_turning_points() {
        // Two roots inside one grid cell: (s - 0.5)(s - 0.5001).
        let p = Poly::new(vec![0.5 * 0.5001, -1.0001, 1.0]);
        let roots = p.sign_change_roots(0.0, 1.0, 4, 1e-14);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.5).abs() < 1e-12);
        assert!((roots[1] - 0.5001).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_not_a_sign_change() {
        let p = Poly::new(vec![0.09, -0.6, 1.0]); // (s - 0.3)^2
        let roots = p.sign_change_roots(0.0, 1.0, 64, 1e-14);
        assert!(roots.iter().all(|r| (r - 0.3).abs() < 1e-12));
    }

    #[test]
    fn roots_near_zero_are_relatively_accurate() {
        let r = 3e-20;
        let p = Poly::new(vec![-r, 1.0]);
        let roots = p.sign_change_roots(0.0, 1.0, 64, 1e-13);
        assert_eq!(roots.len(), 1);
        assert!(((roots[0] - r) / r).abs() < 1e-12);
    }
}

//! Dense Cholesky factorization for the small symmetric positive-definite
//! systems built by the Gaussian process (a few dozen rows at most).

/// Lower-triangular factor `L` with `A + jitter * I = L L^T`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
    jitter: f64,
}

/// Diagonal jitter tried in order until the factorization succeeds.
pub const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

impl Cholesky {
    /// Factorizes the row-major `n x n` matrix `a`, returning `None` if a
    /// pivot is not strictly positive.
    pub fn new(a: &[f64], n: usize, jitter: f64) -> Option<Self> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[i * n + j];
                if i == j {
                    s += jitter;
                }
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !s.is_finite() || s <= 0.0 {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, l, jitter })
    }

    /// Walks [`JITTER_LADDER`] until a factorization succeeds. On failure
    /// returns the last jitter tried.
    pub fn with_jitter(a: &[f64], n: usize) -> Result<Self, f64> {
        for &j in &JITTER_LADDER {
            if let Some(c) = Self::new(a, n, j) {
                return Ok(c);
            }
        }
        Err(*JITTER_LADDER.last().unwrap())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `(max diag / min diag)^2`, a cheap lower bound on the 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        if self.n == 0 {
            return 1.0;
        }
        let diag = (0..self.n).map(|i| self.l[i * self.n + i]);
        let (lo, hi) = diag.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        (hi / lo).powi(2)
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn solve_upper(&self, y: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i] * yk;
            }
            y[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `(L L^T) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_lower(&mut x);
        self.solve_upper(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_solves_a_small_system() {
        let a = [4.0, 2.0, 0.4, 2.0, 2.0, 0.6, 0.4, 0.6, 3.0];
        let c = Cholesky::new(&a, 3, 0.0).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = c.solve(&b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_needs_jitter() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert!(Cholesky::new(&a, 2, 0.0).is_none());
        let c = Cholesky::with_jitter(&a, 2).unwrap();
        assert!(c.jitter() > 0.0);
    }

    #[test]
    fn indefinite_matrix_fails() {
        let a = [1.0, 2.0, 2.0, 1.0];
        assert_eq!(Cholesky::with_jitter(&a, 2), Err(1e-6));
    }

    #[test]
    fn empty_system() {
        let c = Cholesky::new(&[], 0, 0.0).unwrap();
        assert!(c.solve(&[]).is_empty());
        assert_eq!(c.condition_estimate(), 1.0);
    }
}

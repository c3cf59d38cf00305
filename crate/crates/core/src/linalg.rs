//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

pub type Vector = Vec<Rational>;

/// Row-major dense matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vector>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vector {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots, _) = rref(&aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form, pivot columns and rank.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>, usize) {
    let mut r = m.clone();
    let (rows, cols) = (r.rows, r.cols);
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(p) = (pr..rows).find(|&i| !r[(i, c)].is_zero()) else {
            continue;
        };
        if p != pr {
            for j in 0..cols {
                r.data.swap(p * cols + j, pr * cols + j);
            }
        }
        let inv = r[(pr, c)].recip();
        let nz: Vec<usize> = (c..cols).filter(|&j| !r[(pr, j)].is_zero()).collect();
        for &j in &nz {
            r[(pr, j)] *= &inv;
        }
        for i in 0..rows {
            if i == pr || r[(i, c)].is_zero() {
                continue;
            }
            let f = r[(i, c)].clone();
            for &j in &nz {
                let t = &f * &r[(pr, j)];
                r[(i, j)] -= t;
            }
        }
        pivots.push(c);
        pr += 1;
    }
    let rank = pivots.len();
    (r, pivots, rank)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).2
}

/// Rational basis of `{x : M x = 0}`, one vector per free column.
pub fn nullspace(m: &Matrix) -> Vec<Vector> {
    let (r, pivots, _) = rref(m);
    let cols = m.cols;
    let mut is_pivot = vec![None; cols];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..cols)
        .filter(|&f| is_pivot[f].is_none())
        .map(|f| {
            let mut x = vec![Rational::zero(); cols];
            x[f] = Rational::one();
            for (row, &c) in pivots.iter().enumerate() {
                x[c] = -r[(row, f)].clone();
            }
            x
        })
        .collect()
}

/// Some `x` with `M x = b` (free variables zero), or `None` if inconsistent.
pub fn solve_linear(m: &Matrix, b: &[Rational]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows, "right-hand side length");
    let cols = m.cols;
    let mut aug = Matrix::zeros(m.rows, cols + 1);
    for i in 0..m.rows {
        for j in 0..cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, cols)] = b[i].clone();
    }
    let (r, pivots, _) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = r[(row, cols)].clone();
    }
    Some(x)
}

/// Projects `v` onto `span(basis)` along the `ip`-orthogonal complement.
///
/// Returns the coefficients in `basis` and the projected vector. Fails with
/// [`Error::DegenerateGram`] when the Gram matrix of `basis` under `ip` is
/// singular.
pub fn gram_project<F>(basis: &[Vector], v: &[Rational], ip: F) -> Result<(Vector, Vector)>
where
    F: Fn(&[Rational], &[Rational]) -> Rational,
{
    let n = basis.len();
    if n == 0 {
        return Ok((Vec::new(), vec![Rational::zero(); v.len()]));
    }
    let gram = Matrix::from_fn(n, n, |i, j| ip(&basis[i], &basis[j]));
    let rhs: Vector = basis.iter().map(|b| ip(b, v)).collect();
    let inv = gram.inverse().ok_or(Error::DegenerateGram)?;
    let coeffs = inv.mul_vec(&rhs);
    let proj = combine(basis, &coeffs, v.len());
    Ok((coeffs, proj))
}

/// `Σ coeffs_i · basis_i`.
pub fn combine(basis: &[Vector], coeffs: &[Rational], len: usize) -> Vector {
    let mut out = vec![Rational::zero(); len];
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            if !x.is_zero() {
                *o += c * x;
            }
        }
    }
    out
}

/// Accumulates linear constraints and keeps them fully reduced.
///
/// Equivalent to row-reducing the stacked constraint matrix, but never holds
/// more rows than the rank, which matters when thousands of mostly redundant
/// symmetry constraints are generated.
#[derive(Debug, Clone)]
pub struct RowReducer {
    cols: usize,
    // (pivot column, row with 1 at the pivot and 0 at every other pivot column)
    rows: Vec<(usize, Vector)>,
}

impl RowReducer {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a constraint row; returns `true` if it increased the rank.
    pub fn push(&mut self, mut row: Vector) -> bool {
        assert_eq!(row.len(), self.cols);
        for (p, r) in &self.rows {
            if row[*p].is_zero() {
                continue;
            }
            let f = row[*p].clone();
            for (x, y) in row.iter_mut().zip(r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let Some(p) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[p].recip();
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for (_, r) in self.rows.iter_mut() {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(&row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, row));
        true
    }

    /// Basis of the common solution set of all pushed constraints.
    pub fn nullspace(&self) -> Vec<Vector> {
        let mut pivot_row = vec![None; self.cols];
        for (idx, (p, _)) in self.rows.iter().enumerate() {
            pivot_row[*p] = Some(idx);
        }
        (0..self.cols)
            .filter(|&f| pivot_row[f].is_none())
            .map(|f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (p, r) in &self.rows {
                    x[*p] = -r[f].clone();
                }
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let (r, p, k) = rref(&Matrix::identity(2));
        assert_eq!(r, Matrix::identity(2));
        assert_eq!((p, k), (vec![0, 1], 2));

        let (r, _, k) = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(k, 1);

        let (r, _, k) = rref(&m(&[&[0, 1], &[1, 0]]));
        assert_eq!(r, Matrix::identity(2));
        assert_eq!(k, 2);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&Matrix::identity(3)).is_empty());
        assert_eq!(nullspace(&m(&[&[1, 1]])), vec![v(&[-1, 1])]);
        assert_eq!(nullspace(&Matrix::zeros(2, 3)).len(), 3);
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(1, 2), int(-3), int(4)];
        assert_eq!(solve_linear(&Matrix::identity(3), &b), Some(b.clone()));
        assert_eq!(solve_linear(&m(&[&[1], &[1]]), &v(&[0, 1])), None);
        let mm = m(&[&[1, 1]]);
        let x = solve_linear(&mm, &v(&[2])).unwrap();
        assert_eq!(x, v(&[2, 0]));
        assert_eq!(mm.mul_vec(&x), v(&[2]));
    }

    fn dot(a: &[Rational], b: &[Rational]) -> Rational {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn gram_examples() {
        let basis = vec![v(&[1, 0, 1]), v(&[0, 1, 1])];
        let x = v(&[2, -3, -1]);
        let (_, p) = gram_project(&basis, &x, dot).unwrap();
        assert_eq!(p, x);

        let (c, p) = gram_project(&basis, &v(&[1, 1, -1]), dot).unwrap();
        assert_eq!(p, v(&[0, 0, 0]));
        assert_eq!(c, v(&[0, 0]));

        let neutral = |a: &[Rational], b: &[Rational]| &a[0] * &b[0] - &a[1] * &b[1];
        assert_eq!(
            gram_project(&[v(&[1, 1])], &v(&[1, 0]), neutral),
            Err(Error::DegenerateGram)
        );
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn row_reducer_matches_rref() {
        let rows = vec![v(&[1, 2, 3, 4]), v(&[2, 4, 6, 8]), v(&[0, 1, 1, 0]), v(&[1, 3, 4, 4])];
        let mut rr = RowReducer::new(4);
        for r in &rows {
            rr.push(r.clone());
        }
        let full = Matrix::from_rows(rows);
        assert_eq!(rr.rank(), rank(&full));
        assert_eq!(rr.nullspace(), nullspace(&full));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..4, 1i64..3), r * c).prop_map(move |xs| {
                let mut it = xs.into_iter();
                Matrix::from_fn(r, c, |_, _| {
                    let (n, d) = it.next().unwrap();
                    rat(n, d)
                })
            })
        })
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated(a in small_matrix()) {
            let ns = nullspace(&a);
            prop_assert_eq!(rank(&a) + ns.len(), a.cols());
            for x in ns {
                prop_assert!(a.mul_vec(&x).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn solve_reproduces_rhs(a in small_matrix(), seed in proptest::collection::vec(-3i64..4, 6)) {
            let x0: Vector = (0..a.cols()).map(|i| int(seed[i])).collect();
            let b = a.mul_vec(&x0);
            let x = solve_linear(&a, &b).expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&x), b);
        }

        #[test]
        fn gram_projection_is_idempotent(a in small_matrix(), w in proptest::collection::vec(-3i64..4, 6)) {
            // nonzero rows of the echelon form are independent
            let (r, _, k) = rref(&a);
            let basis: Vec<Vector> = (0..k).map(|i| r.row(i).to_vec()).collect();
            let x: Vector = (0..a.cols()).map(|i| int(w[i])).collect();
            if let Ok((c1, p1)) = gram_project(&basis, &x, dot) {
                let (c2, p2) = gram_project(&basis, &p1, dot).unwrap();
                prop_assert_eq!(&p1, &p2);
                prop_assert_eq!(c1, c2);
                for b in &basis {
                    let resid: Vector = x.iter().zip(&p1).map(|(a, b)| a - b).collect();
                    prop_assert!(dot(b, &resid).is_zero());
                }
            }
        }
    }
}

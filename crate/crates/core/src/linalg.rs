//! Exact integer linear algebra: Smith normal form, linear congruences
//! modulo `2^d`, rational nullspaces.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `[self | scale * I]`.
    pub fn augment_scaled_identity(&self, scale: &BigInt) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols + self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            out[(i, self.cols + i)] = scale.clone();
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Rows `(a, b) <- (x*a + y*b, z*a + w*b)`.
    fn combine_rows(&mut self, a: usize, b: usize, [x, y, z, w]: &[BigInt; 4]) {
        for j in 0..self.cols {
            let (p, q) = (self[(a, j)].clone(), self[(b, j)].clone());
            self[(a, j)] = x * &p + y * &q;
            self[(b, j)] = z * &p + w * &q;
        }
    }

    /// Columns `(a, b) <- (x*a + y*b, z*a + w*b)`.
    fn combine_cols(&mut self, a: usize, b: usize, [x, y, z, w]: &[BigInt; 4]) {
        for i in 0..self.rows {
            let (p, q) = (self[(i, a)].clone(), self[(i, b)].clone());
            self[(i, a)] = x * &p + y * &q;
            self[(i, b)] = z * &p + w * &q;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -&self[(a, j)];
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal,
/// nonnegative, each diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }
}

/// Unimodular 2x2 block sending `(p, q)` to `(gcd, 0)`.
fn bezout_block(p: &BigInt, q: &BigInt) -> [BigInt; 4] {
    if q.is_multiple_of(p) {
        return [BigInt::one(), BigInt::zero(), -(q / p), BigInt::one()];
    }
    let e = p.extended_gcd(q);
    let (mut g, mut x, mut y) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        x = -x;
        y = -y;
    }
    [x, y, -(q / &g), p / &g]
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // Smallest nonzero pivot in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = &s[(i, j)];
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let blk = bezout_block(&s[(t, t)], &s[(i, t)]);
                s.combine_rows(t, i, &blk);
                u.combine_rows(t, i, &blk);
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let blk = bezout_block(&s[(t, t)], &s[(t, j)]);
                s.combine_cols(t, j, &blk);
                v.combine_cols(t, j, &blk);
            }
            if (t + 1..m).any(|i| !s[(i, t)].is_zero()) {
                clean = false;
            }
            if clean {
                let p = s[(t, t)].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s[(i, j)].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        let one = [BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::one()];
                        s.combine_rows(t, i, &one);
                        u.combine_rows(t, i, &one);
                    }
                    None => break,
                }
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, s, v)
}

fn finish(u: IntMatrix, s: IntMatrix, v: IntMatrix) -> SnfDecomposition {
    SnfDecomposition { u, s, v }
}

fn modulus(d: u32) -> BigInt {
    BigInt::one() << d
}

/// Some `x` in `[0, 2^d)^n` with `A*x ≡ b (mod 2^d)`, or `None` if the
/// system is unsolvable.
pub fn solve_congruence(a: &IntMatrix, b: &[BigInt], d: u32) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let md = modulus(d);
    let snf = smith_normal_form(a);
    let c: Vec<BigInt> = snf.u.mul_vec(b).iter().map(|x| x.mod_floor(&md)).collect();
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, ci) in c.iter().enumerate() {
        let si = if i < a.cols {
            snf.s[(i, i)].clone()
        } else {
            BigInt::zero()
        };
        let g = si.gcd(&md);
        if !ci.is_multiple_of(&g) {
            return None;
        }
        if si.is_zero() || g == md {
            continue;
        }
        let m = &md / &g;
        let e = (&si / &g).extended_gcd(&m);
        y[i] = ((ci / &g) * e.x).mod_floor(&m);
    }
    Some(snf.v.mul_vec(&y).iter().map(|x| x.mod_floor(&md)).collect())
}

pub type RationalVector = Vec<BigRational>;

/// Basis of `{x : A*x = 0}` over the rationals, one vector per free column.
pub fn rational_nullspace(a: &IntMatrix) -> Vec<RationalVector> {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            // Fraction-free: row_i <- piv*row_i - e*row_r, then strip content.
            let piv = m[(r, c)].clone();
            let e = m[(i, c)].clone();
            let mut content = BigInt::zero();
            for j in 0..cols {
                let val = &piv * &m[(i, j)] - &e * &m[(r, j)];
                content = content.gcd(&val);
                m[(i, j)] = val;
            }
            if content > BigInt::one() {
                for j in 0..cols {
                    m[(i, j)] = &m[(i, j)] / &content;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                x[pc] = BigRational::new(-m[(row, f)].clone(), m[(row, pc)].clone());
            }
            x
        })
        .collect()
}

/// `lcm` of the denominators of `v`.
pub fn denominator_lcm(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Members `lambda0 + lcm(D(s)) * s[..nlambda]` of the shifted solution
/// family, one per nullspace vector `s`, reduced into `[0, 2^d)`.
///
/// `lambda0` itself is always the first member; duplicates are removed.
pub fn shift_solutions(
    lambda0: &[BigInt],
    nullspace: &[RationalVector],
    d: u32,
) -> Vec<Vec<BigInt>> {
    let md = modulus(d);
    let n = lambda0.len();
    let base: Vec<BigInt> = lambda0.iter().map(|x| x.mod_floor(&md)).collect();
    let mut out = vec![base.clone()];
    for s in nullspace {
        assert!(s.len() >= n, "nullspace vector shorter than lambda");
        let l = denominator_lcm(s);
        let member: Vec<BigInt> = base
            .iter()
            .zip(&s[..n])
            .map(|(b, q)| {
                let scaled = q * BigRational::from_integer(l.clone());
                (b + scaled.to_integer()).mod_floor(&md)
            })
            .collect();
        if !out.contains(&member) {
            out.push(member);
        }
    }
    out
}

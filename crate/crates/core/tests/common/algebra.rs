//! Linear-algebra oracles over `Z` and `Z/2^d`, written without the
//! library's matrix or polynomial code.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{mask, RawPoly};

impl RawPoly {
    /// Product by term-wise expansion.
    pub fn mul(&self, other: &RawPoly) -> RawPoly {
        let mut terms = Vec::new();
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((c1.wrapping_mul(*c2), e));
            }
        }
        RawPoly { terms }
    }

    pub fn add(&self, other: &RawPoly) -> RawPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RawPoly { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

fn exponents_up_to(n: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=deg - used).map(move |k| {
                    let mut f = e.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    out
}

fn nu2(x: u64) -> u32 {
    x.trailing_zeros()
}

fn inv_odd(u: u64) -> u64 {
    // Newton iteration on 64-bit words.
    let mut x = u;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// Least 2-adic valuation of a nonzero constant in the `Z/2^d`-span of
/// `{m * h : h in hs, deg m <= mult_deg}`, or `None` if the span holds no
/// nonzero constant.
pub fn min_constant_valuation(hs: &[RawPoly], n: usize, d: u32, mult_deg: u32) -> Option<u32> {
    assert!(d <= 32);
    let m = mask(d);
    let top = mult_deg + hs.iter().map(RawPoly::degree).max().unwrap_or(0);
    let monos = exponents_up_to(n, top);
    let constant = vec![0u32; n];
    let mut cols: Vec<Vec<u32>> = monos.into_iter().filter(|e| *e != constant).collect();
    cols.push(constant);
    let index: HashMap<Vec<u32>, usize> = cols
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for h in hs {
        for mult in exponents_up_to(n, mult_deg) {
            let mut row = vec![0u64; cols.len()];
            for (c, e) in &h.terms {
                let key: Vec<u32> = e.iter().zip(&mult).map(|(a, b)| a + b).collect();
                let j = index[&key];
                row[j] = row[j].wrapping_add(*c as u64) & m;
            }
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        }
    }
    let last = cols.len() - 1;
    for col in 0..last {
        let Some(p) = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .min_by_key(|(_, r)| nu2(r[col]))
            .map(|(i, _)| i)
        else {
            continue;
        };
        let pivot = rows.swap_remove(p);
        let j = nu2(pivot[col]);
        let uinv = inv_odd(pivot[col] >> j);
        for r in rows.iter_mut() {
            if r[col] == 0 {
                continue;
            }
            let factor = (r[col] >> j).wrapping_mul(uinv) & m;
            for (x, y) in r.iter_mut().zip(&pivot) {
                *x = x.wrapping_sub(factor.wrapping_mul(*y)) & m;
            }
            debug_assert_eq!(r[col], 0);
        }
        // Multiples of the pivot that kill its pivot entry.
        let killed: Vec<u64> = pivot.iter().map(|x| (x << (d - j)) & m).collect();
        if killed.iter().any(|&x| x != 0) {
            rows.push(killed);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    rows.iter()
        .filter(|r| r[last] != 0)
        .map(|r| nu2(r[last]))
        .min()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// `A * x mod 2^d`, all residues.
pub fn residues_of_product(a: &[Vec<BigInt>], x: &[BigInt], d: u32) -> Vec<BigInt> {
    let md = BigInt::one() << d;
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(BigInt::zero(), |acc, (c, v)| acc + c * v)
                .mod_floor(&md)
        })
        .collect()
}

pub fn is_nonneg(x: &BigInt) -> bool {
    !x.is_negative()
}

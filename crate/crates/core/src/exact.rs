//! Exact rational scalars and fraction-free integer linear algebra.
//!
//! Every invariant computed by this crate is an exact [`Rational`]. Determinants
//! are computed with Bareiss elimination over [`BigInt`]; lattice bases of
//! integer row spaces are normalised to Hermite normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact fraction; always reduced with a positive denominator.
pub type Rational = BigRational;

/// Integer row vectors, used for coefficient matrices and witnesses.
pub type IntRows = Vec<Vec<i64>>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Parses `p/q`, `p`, or a decimal such as `0.25` / `-1.5e-3` into an exact value.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{whole}{frac}");
    let mut numer: BigInt = all_digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde adapter storing a [`Rational`] as its `p/q` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for sequences of rationals.
pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Rational], ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(values.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries given for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Exact determinant; see [`rational_det`].
    pub fn det(&self) -> Result<Rational> {
        rational_det(self)
    }

    /// Leading principal minors `det(M[..k, ..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Result<Vec<Rational>> {
        if !self.is_square() {
            return Err(Error::Dimension("leading minors need a square matrix".into()));
        }
        (1..=self.rows)
            .map(|k| {
                let sub: Vec<Rational> = (0..k)
                    .flat_map(|i| self.row(i)[..k].iter().cloned())
                    .collect();
                rational_det(&RationalMatrix::new(k, k, sub)?)
            })
            .collect()
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Result<Option<Self>> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse needs a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(None);
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a.get(col, col).recip();
            for j in 0..n {
                let v = a.get(col, j) * &p;
                a.set(col, j, v);
                let w = inv.get(col, j) * &p;
                inv.set(col, j, w);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &f * a.get(col, j);
                    a.set(r, j, v);
                    let w = inv.get(r, j) - &f * inv.get(col, j);
                    inv.set(r, j, w);
                }
            }
        }
        Ok(Some(inv))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Exact determinant of a square rational matrix.
///
/// Rows are cleared of denominators, then Bareiss fraction-free elimination
/// runs over big integers; every intermediate division is exact.
pub fn rational_det(m: &RationalMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let row = m.row(i);
        let d = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        rows.push(
            row.iter()
                .map(|x| x.numer() * (&d / x.denom()))
                .collect::<Vec<BigInt>>(),
        );
        scale *= d;
    }
    Ok(Rational::new(bareiss_det(rows), scale))
}

/// Bareiss determinant of a square big-integer matrix (consumed).
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Bareiss determinant of a small square `i128` matrix stored row-major.
/// Returns `None` on overflow so callers can fall back to big integers.
pub(crate) fn det_i128(a: &mut [i128], n: usize) -> Option<i128> {
    if n == 0 {
        return Some(1);
    }
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n {
        if a[k * n + k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i * n + j].checked_mul(a[k * n + k])?;
                let rhs = a[i * n + k].checked_mul(a[k * n + j])?;
                a[i * n + j] = lhs.checked_sub(rhs)? / prev;
            }
        }
        prev = a[k * n + k];
    }
    let d = a[n * n - 1];
    Some(if negate { -d } else { d })
}

/// Determinant of a small integer matrix, exact regardless of magnitude.
pub(crate) fn det_small(a: &[i128], n: usize) -> BigInt {
    let mut work = a.to_vec();
    match det_i128(&mut work, n) {
        Some(d) => BigInt::from(d),
        None => bareiss_det(
            (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(a[i * n + j])).collect())
                .collect(),
        ),
    }
}

fn to_big_rows(u: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    u.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn to_i64_rows(rows: Vec<Vec<BigInt>>) -> Result<IntRows> {
    rows.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::Domain(format!("integer {x} does not fit in 64 bits")))
                })
                .collect()
        })
        .collect()
}

/// Rank over the rationals of an integer matrix.
pub fn integer_rank(u: &[Vec<i64>]) -> usize {
    let mut a = to_big_rows(u);
    echelonize(&mut a, usize::MAX)
}

/// Unimodular row reduction of `a` to echelon form on its first `limit`
/// columns (all columns when `limit` exceeds the width). Returns the number
/// of pivots. Rows past the pivot count are zero on the reduced columns.
fn echelonize(a: &mut [Vec<BigInt>], limit: usize) -> usize {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len).min(limit);
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == nrows {
            break;
        }
        loop {
            // Smallest nonzero magnitude in this column becomes the pivot.
            let best = (pivot_row..nrows)
                .filter(|&r| !a[r][col].is_zero())
                .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(best) = best else { break };
            a.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..nrows {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = a[r][col].div_floor(&a[pivot_row][col]);
                let (head, tail) = a.split_at_mut(r);
                let prow = &head[pivot_row];
                for (x, p) in tail[0].iter_mut().zip(prow.iter()) {
                    *x -= &q * p;
                }
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !a[pivot_row][col].is_zero() {
            pivot_row += 1;
        }
    }
    pivot_row
}

/// Hermite normal form of the integer row span of `u`: nonzero rows only,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(u: &[Vec<i64>]) -> Result<IntRows> {
    to_i64_rows(hermite_big(to_big_rows(u)))
}

fn hermite_big(mut a: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let rank = echelonize(&mut a, usize::MAX);
    a.truncate(rank);
    let ncols = a.first().map_or(0, Vec::len);
    let mut col = 0;
    for i in 0..rank {
        while col < ncols && a[i][col].is_zero() {
            col += 1;
        }
        if a[i][col].is_negative() {
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
        }
        for k in 0..i {
            let q = a[k][col].div_floor(&a[i][col]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = a.split_at_mut(i);
            for (x, p) in head[k].iter_mut().zip(tail[0].iter()) {
                *x -= &q * p;
            }
        }
        col += 1;
    }
    a
}

/// Basis (as rows) of the integer kernel `{x in Z^n : u x^T = 0}`.
/// The returned basis spans a saturated sublattice of `Z^n`.
pub fn integer_kernel(u: &[Vec<i64>], n: usize) -> Result<IntRows> {
    to_i64_rows(kernel_big(&to_big_rows(u), n))
}

fn kernel_big(u: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let m = u.len();
    // Rows of [U^T | I_n]; unimodular row operations keep the right block unimodular.
    let mut aug: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..m).map(|i| u[i][j].clone()).collect();
            row.extend((0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let rank = echelonize(&mut aug, m);
    let kernel: Vec<Vec<BigInt>> = aug[rank..].iter().map(|r| r[m..].to_vec()).collect();
    hermite_big(kernel)
}

/// Basis of `Z^n ∩ span_Q(rows of u)` in Hermite normal form.
///
/// The quotient of `Z^n`-span by the result is torsion free, and for any Gram
/// form `det(U G U^T) = k^2 det(S G S^T)` with `k` the saturation index.
pub fn saturate_rows(u: &[Vec<i64>]) -> Result<IntRows> {
    let r = u.len();
    let n = u.first().map_or(0, Vec::len);
    if u.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("ragged coefficient matrix".into()));
    }
    let rank = integer_rank(u);
    if rank != r {
        return Err(Error::Rank(format!(
            "saturation needs {r} independent rows, found rank {rank}"
        )));
    }
    let big = to_big_rows(u);
    let kernel = kernel_big(&big, n);
    let sat = if kernel.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    } else {
        kernel_big(&kernel, n)
    };
    to_i64_rows(sat)
}

/// Index `[Z^n ∩ span(U) : rowspan(U)]` of a full-row-rank integer matrix,
/// computed as the gcd of its maximal minors.
pub fn saturation_index(u: &[Vec<i64>]) -> Result<BigInt> {
    let r = u.len();
    let n = u.first().map_or(0, Vec::len);
    let g = maximal_minor_gcd(u, r, n);
    if g.is_zero() {
        return Err(Error::Rank("rank-deficient coefficient matrix has no index".into()));
    }
    Ok(g)
}

pub(crate) fn maximal_minor_gcd(u: &[Vec<i64>], r: usize, n: usize) -> BigInt {
    let mut g = BigInt::zero();
    let mut cols: Vec<usize> = (0..r).collect();
    let mut buf = vec![0i128; r * r];
    if r > n {
        return g;
    }
    loop {
        for i in 0..r {
            for (k, &c) in cols.iter().enumerate() {
                buf[i * r + k] = u[i][c] as i128;
            }
        }
        let d = det_small(&buf, r);
        g = g.gcd(&d);
        if g.is_one() {
            return g;
        }
        if !next_combination(&mut cols, n) {
            return g;
        }
    }
}

/// Advances `c` to the next increasing r-combination of `0..n`.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let r = c.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if c[i] < n - r + i {
            c[i] += 1;
            for j in i + 1..r {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

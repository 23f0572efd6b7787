use std::fmt;
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::{DivExact, DivExactAssign, Gcd, Lcm};
use malachite_base::num::basic::traits::{One as _, Zero as _};
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;
use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let r = Rat::from_str(t).map_err(|_| Error::InvalidInput(format!("not a rational: {s:?}")))?;
    if r.denom().is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator: {s:?}")));
    }
    Ok(r)
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Row-major dense matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Output of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Mat,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::new(rows, cols, vec![Rat::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from explicit rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Mat::new(r, cols, data)
    }

    pub fn from_i64(cols: usize, rows: &[&[i64]]) -> Self {
        Mat::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
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
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat::new(self.rows + other.rows, self.cols, data))
    }

    /// Horizontal concatenation.
    pub fn augment(&self, other: &Mat) -> Result<Mat> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                left: self.rows,
                right: other.rows,
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        Ok(Mat::new(self.rows, cols, data))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_rows(
            self.cols,
            idx.iter().map(|&i| self.row(i).to_vec()).collect(),
        )
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_rows(
            idx.len(),
            (0..self.rows)
                .map(|i| idx.iter().map(|&j| self[(i, j)].clone()).collect())
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat::new(
            self.rows,
            self.cols,
            self.data.iter().map(|x| x * c).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    /// Finds `X` with `X * self == rhs`, if one exists.
    pub fn solve_left(&self, rhs: &Mat) -> Option<Mat> {
        if rhs.cols != self.cols {
            return None;
        }
        // X A = B  <=>  A^T X^T = B^T, one column of X^T per row of B.
        let at = self.transpose();
        let mut rows = Vec::with_capacity(rhs.rows);
        for i in 0..rhs.rows {
            rows.push(solve(&at, rhs.row(i))?);
        }
        Some(Mat::from_rows(self.rows, rows))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(rat_to_f64).collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
            if i + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

fn to_wide(x: &BigInt) -> Integer {
    let (sign, limbs) = x.to_u64_digits();
    Integer::from_sign_and_abs(sign != Sign::Minus, Natural::from_owned_limbs_asc(limbs))
}

fn from_wide(x: &Integer) -> BigInt {
    let digits: Vec<u32> = x
        .unsigned_abs_ref()
        .to_limbs_asc()
        .into_iter()
        .flat_map(|l| [l as u32, (l >> 32) as u32])
        .collect();
    let sign = if *x < 0 { Sign::Minus } else { Sign::Plus };
    BigInt::from_biguint(sign, BigUint::new(digits))
}

/// The row scaled to a primitive integer vector.
fn primitive_row(row: &[Rat]) -> Vec<Integer> {
    let mut lcm = Natural::ONE;
    for x in row {
        let d = Natural::from_owned_limbs_asc(x.denom().to_u64_digits().1);
        if d != 1u32 {
            lcm = (&lcm).lcm(&d);
        }
    }
    let lcm = Integer::from(lcm);
    let mut ints: Vec<Integer> = row
        .iter()
        .map(|x| {
            if x.is_zero() {
                Integer::ZERO
            } else {
                to_wide(x.numer()) * (&lcm).div_exact(to_wide(x.denom()))
            }
        })
        .collect();
    let g = ints
        .iter()
        .fold(Natural::ZERO, |g, x| g.gcd(x.unsigned_abs_ref()));
    if g > 1u32 {
        let g = Integer::from(g);
        for x in &mut ints {
            x.div_exact_assign(&g);
        }
    }
    ints
}

/// `num/den` in lowest terms with a positive denominator.
fn reduced(num: &Integer, den: &Integer) -> Rat {
    let g = Integer::from(num.unsigned_abs_ref().gcd(den.unsigned_abs_ref()));
    let (mut n, mut d) = (num.div_exact(&g), den.div_exact(&g));
    if d < 0 {
        n = -n;
        d = -d;
    }
    Rat::new_raw(from_wide(&n), from_wide(&d))
}

/// Gauss-Jordan elimination to reduced row echelon form.
///
/// Rows are scaled to primitive integer vectors and eliminated fraction-free: each
/// update divides exactly by the previous pivot, every pivot row ends up carrying the
/// last pivot as a common factor, and that factor is divided out once at the end.
/// Pivots are the first nonzero entry at or below the current row.
pub fn rref(m: &Mat) -> Rref {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Integer> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        a.extend(primitive_row(m.row(i)));
    }
    let mut prev = Integer::ONE;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let piv = a[r * cols + c].clone();
        let pivot_row: Vec<Integer> = a[r * cols..(r + 1) * cols].to_vec();
        for i in (0..rows).filter(|&i| i != r) {
            let f = a[i * cols + c].clone();
            for (j, pv) in pivot_row.iter().enumerate() {
                let x = &mut a[i * cols + j];
                let mut y = if *x == 0 { Integer::ZERO } else { &piv * &*x };
                if f != 0 && *pv != 0 {
                    y -= &f * pv;
                }
                if prev != 1 {
                    y.div_exact_assign(&prev);
                }
                *x = y;
            }
        }
        prev = piv;
        pivot_cols.push(c);
        r += 1;
    }
    let data = a
        .iter()
        .enumerate()
        .map(|(k, x)| {
            if k / cols.max(1) < r && *x != 0 {
                reduced(x, &prev)
            } else {
                Rat::zero()
            }
        })
        .collect();
    Rref {
        reduced: Mat::new(rows, cols, data),
        rank: r,
        pivot_cols,
    }
}

/// Particular solution of `A x = b` with all free variables set to zero.
pub fn solve(a: &Mat, b: &[Rat]) -> Option<Vec<Rat>> {
    if b.len() != a.rows {
        return None;
    }
    let rhs = Mat::new(a.rows, 1, b.to_vec());
    let aug = a.augment(&rhs).ok()?;
    let red = rref(&aug);
    if red.pivot_cols.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); a.cols];
    for (i, &c) in red.pivot_cols.iter().enumerate() {
        x[c] = red.reduced[(i, a.cols)].clone();
    }
    Some(x)
}

/// Multiplies a rational vector by the lcm of its denominators, giving a primitive
/// integer vector with the same direction.
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

pub fn is_reduced(r: &Rat) -> bool {
    use num_integer::Integer;
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

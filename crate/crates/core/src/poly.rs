//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rat_to_f64, Mat, Rat};
use crate::wire::PolyJson;

/// Exponent vector ordered graded-lexicographically: lower total degree first, then
/// earlier variables first (`x1` before `x2`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors in `num_vars` variables of total degree at most `max_degree`,
/// in graded-lex order.
pub fn monomials(num_vars: usize, max_degree: u32) -> Vec<Exponent> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if i == cur.len() {
            if left == 0 {
                out.push(Exponent(cur.clone()));
            }
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; num_vars];
    for d in 0..=max_degree {
        if num_vars == 0 {
            if d == 0 {
                out.push(Exponent(vec![]));
            }
            continue;
        }
        rec(0, d, &mut cur, &mut out);
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Rat) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The coordinate function `x_i` (zero-based).
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Rat) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(
        num_vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rat)>,
    ) -> Result<Self> {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    left: num_vars,
                    right: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Linear form `Σ coeffs[j] x_j`.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        assert_eq!(exps.len(), self.num_vars);
        if c.is_zero() {
            return;
        }
        let key = Exponent(exps);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms
            .get(&Exponent(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                *acc.entry(Exponent(e)).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(MultiPoly {
            num_vars: self.num_vars,
            terms: acc,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.num_vars, Rat::one());
        for _ in 0..k {
            out = out.mul(self).expect("same variable count");
        }
        out
    }

    /// `self(images[0], ..., images[n-1])`; every image must share one variable count.
    pub fn substitute(&self, images: &[MultiPoly], target_vars: usize) -> Result<Self> {
        if images.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                left: self.num_vars,
                right: images.len(),
            });
        }
        if let Some(bad) = images.iter().find(|p| p.num_vars != target_vars) {
            return Err(Error::DimensionMismatch {
                left: target_vars,
                right: bad.num_vars,
            });
        }
        // powers[i][k] = images[i]^k, built lazily
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|_| vec![Self::constant(target_vars, Rat::one())])
            .collect();
        let mut out = Self::zero(target_vars);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target_vars, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Pullback `x ↦ self(A x + b)` along an affine map with `A` of shape
    /// `num_vars × m`.
    pub fn substitute_affine(&self, a: &Mat, offset: &[Rat]) -> Result<Self> {
        if a.rows() != self.num_vars || offset.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                left: self.num_vars,
                right: a.rows(),
            });
        }
        let m = a.cols();
        let images: Vec<MultiPoly> = (0..a.rows())
            .map(|i| {
                let mut p = Self::linear(a.row(i));
                p.add_term(vec![0; m], offset[i].clone());
                p
            })
            .collect();
        self.substitute(&images, m)
    }

    /// Coefficients in the given monomial basis. Fails if a term falls outside it.
    pub fn coefficient_vector(&self, basis: &[Exponent]) -> Result<Vec<Rat>> {
        let index: BTreeMap<&Exponent, usize> =
            basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut v = vec![Rat::zero(); basis.len()];
        for (e, c) in &self.terms {
            let i = index.get(e).ok_or_else(|| {
                Error::InvalidInput(format!("monomial {:?} outside the basis", e.0))
            })?;
            v[*i] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coefficients(num_vars: usize, basis: &[Exponent], coeffs: &[Rat]) -> Self {
        let mut p = Self::zero(num_vars);
        for (e, c) in basis.iter().zip(coeffs) {
            p.add_term(e.0.clone(), c.clone());
        }
        p
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(&e.0) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Floating-point evaluator: a flat list of `(coefficient, exponents)` pairs.
    pub fn to_f64_terms(&self) -> F64Poly {
        F64Poly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (rat_to_f64(c), e.0.clone()))
                .collect(),
        }
    }
}

/// `q ∘ π` for a linear map `π` whose row count equals `q.num_vars()`.
pub fn compose(q: &MultiPoly, pi: &Mat) -> Result<MultiPoly> {
    if q.num_vars() != pi.rows() {
        return Err(Error::DimensionMismatch {
            left: q.num_vars(),
            right: pi.rows(),
        });
    }
    let images: Vec<MultiPoly> = (0..pi.rows())
        .map(|i| MultiPoly::linear(pi.row(i)))
        .collect();
    q.substitute(&images, pi.cols())
}

#[derive(Clone, Debug)]
pub struct F64Poly {
    num_vars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl F64Poly {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter().zip(x).fold(
                    *c,
                    |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) },
                )
            })
            .sum()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: Vec<String> =
                    e.0.iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| {
                            if k == 1 {
                                format!("x{}", i + 1)
                            } else {
                                format!("x{}^{k}", i + 1)
                            }
                        })
                        .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else if c.is_one() {
                    vars.join("*")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

//! Degenerate phases: membership of a polynomial in the span of pullbacks `q ∘ π_j`,
//! certificates, and the distance to that span.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, kernel, rat_to_f64, solve, Mat, Rat};
use crate::poly::{compose, monomials, Exponent, MultiPoly};

fn check_maps(m: usize, pis: &[Mat]) -> Result<()> {
    for (j, pi) in pis.iter().enumerate() {
        if pi.cols() != m {
            return Err(Error::DimensionMismatch {
                left: m,
                right: pi.cols(),
            });
        }
        if pi.rows() == 0 || pi.rank() != pi.rows() {
            return Err(Error::NotSurjective(format!(
                "map {j} has rank {} but {} rows",
                pi.rank(),
                pi.rows()
            )));
        }
    }
    Ok(())
}

/// Columns are the coefficient vectors, in `monomials(m, d)`, of `q ∘ π_j` for every
/// monomial `q` of degree at most `d`; map by map, each in graded-lex order.
pub fn degenerate_basis(pis: &[Mat], d: u32) -> Result<Mat> {
    let m = pis
        .first()
        .map(Mat::cols)
        .ok_or_else(|| Error::InvalidInput("no maps given".into()))?;
    check_maps(m, pis)?;
    build_basis(m, pis, d)
}

fn build_basis(m: usize, pis: &[Mat], d: u32) -> Result<Mat> {
    let target = monomials(m, d);
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for pi in pis {
        for e in monomials(pi.rows(), d) {
            let q = MultiPoly::monomial(e.0, Rat::from_integer(1.into()));
            cols.push(compose(&q, pi)?.coefficient_vector(&target)?);
        }
    }
    Ok(Mat::from_rows(target.len(), cols).transpose())
}

/// Precomputed data for one `(maps, D)` pair.
#[derive(Debug)]
pub struct DegeneracyAnalyzer {
    num_vars: usize,
    degree: u32,
    pis: Vec<Mat>,
    basis: Vec<Exponent>,
    spanning: Mat,
    rank: usize,
    /// Orthogonal projector onto the complement of the degenerate span.
    complement: Mat,
}

impl DegeneracyAnalyzer {
    pub fn new(num_vars: usize, pis: &[Mat], degree: u32) -> Result<Self> {
        check_maps(num_vars, pis)?;
        let basis = monomials(num_vars, degree);
        let spanning = build_basis(num_vars, pis, degree)?;
        let rank = spanning.rank();
        let complement = complement_projector(&spanning);
        Ok(DegeneracyAnalyzer {
            num_vars,
            degree,
            pis: pis.to_vec(),
            basis,
            spanning,
            rank,
            complement,
        })
    }

    /// Shared analyzer for `(pis, degree)`, built once per distinct input.
    pub fn cached(num_vars: usize, pis: &[Mat], degree: u32) -> Result<Arc<Self>> {
        type Memo = RwLock<HashMap<(usize, Vec<Mat>, u32), Arc<DegeneracyAnalyzer>>>;
        static MEMO: OnceLock<Memo> = OnceLock::new();
        const MAX_ENTRIES: usize = 512;
        let memo = MEMO.get_or_init(Default::default);
        let key = (num_vars, pis.to_vec(), degree);
        if let Some(a) = memo.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(a.clone());
        }
        let a = Arc::new(Self::new(num_vars, pis, degree)?);
        let mut w = memo.write().unwrap_or_else(|e| e.into_inner());
        if w.len() >= MAX_ENTRIES {
            w.clear();
        }
        Ok(w.entry(key).or_insert(a).clone())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn monomial_basis(&self) -> &[Exponent] {
        &self.basis
    }

    pub fn spanning_matrix(&self) -> &Mat {
        &self.spanning
    }

    /// Dimension of the degenerate subspace.
    pub fn rank(&self) -> usize {
        self.rank
    }

    fn coefficients(&self, p: &MultiPoly) -> Result<Vec<Rat>> {
        if p.num_vars() != self.num_vars {
            return Err(Error::DimensionMismatch {
                left: self.num_vars,
                right: p.num_vars(),
            });
        }
        if p.degree() > self.degree {
            return Err(Error::InvalidInput(format!(
                "degree {} exceeds the bound {}",
                p.degree(),
                self.degree
            )));
        }
        p.coefficient_vector(&self.basis)
    }

    /// Exact component of `p` orthogonal to the degenerate span.
    pub fn residual(&self, p: &MultiPoly) -> Result<Vec<Rat>> {
        let c = self.coefficients(p)?;
        self.complement.mul_vec(&c)
    }

    /// Squared quotient norm, exact.
    pub fn nd_norm_squared(&self, p: &MultiPoly) -> Result<Rat> {
        let c = self.coefficients(p)?;
        let r = self.complement.mul_vec(&c)?;
        Ok(dot(&r, &r))
    }

    pub fn nd_norm(&self, p: &MultiPoly) -> Result<f64> {
        Ok(rat_to_f64(&self.nd_norm_squared(p)?).sqrt())
    }

    /// `Q_j` with `Σ Q_j ∘ π_j = p`, or `None` when `p` is nondegenerate. Free
    /// coordinates of the solve are set to zero.
    pub fn certificate(&self, p: &MultiPoly) -> Result<Option<Vec<MultiPoly>>> {
        let c = self.coefficients(p)?;
        let Some(x) = solve(&self.spanning, &c) else {
            return Ok(None);
        };
        let mut out = Vec::with_capacity(self.pis.len());
        let mut offset = 0;
        for pi in &self.pis {
            let local = monomials(pi.rows(), self.degree);
            out.push(MultiPoly::from_coefficients(
                pi.rows(),
                &local,
                &x[offset..offset + local.len()],
            ));
            offset += local.len();
        }
        let cert_ok = verify_certificate(p, &self.pis, &out)?;
        assert!(
            cert_ok,
            "exact solve produced a certificate that does not reassemble P"
        );
        Ok(Some(out))
    }

    pub fn report(&self, p: &MultiPoly, labels: &[String]) -> Result<DegeneracyReport> {
        if labels.len() != self.pis.len() {
            return Err(Error::DimensionMismatch {
                left: self.pis.len(),
                right: labels.len(),
            });
        }
        let certificate = self.certificate(p)?;
        let is_degenerate = certificate.is_some();
        let residual = self.residual(p)?;
        let quotient_norm = if is_degenerate {
            0.0
        } else {
            rat_to_f64(&dot(&residual, &residual)).sqrt()
        };
        let residual = self
            .basis
            .iter()
            .zip(&residual)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| ResidualTerm {
                exps: e.0.clone(),
                coeff: rat_to_f64(c),
            })
            .collect();
        Ok(DegeneracyReport {
            is_degenerate,
            certificate: certificate.map(|qs| {
                labels
                    .iter()
                    .cloned()
                    .zip(qs)
                    .map(|(label, q)| CertificateTerm { label, q })
                    .collect()
            }),
            quotient_norm,
            residual,
        })
    }
}

/// `Nᵀ (N Nᵀ)⁻¹ N` with the rows of `N` spanning the orthogonal complement of the
/// column space of `b`.
fn complement_projector(b: &Mat) -> Mat {
    let size = b.rows();
    let n = kernel(&b.transpose()).basis().clone();
    if n.rows() == 0 {
        return Mat::zeros(size, size);
    }
    let gram = n.mul(&n.transpose()).expect("shapes agree");
    let inv = gram
        .solve_left(&Mat::identity(gram.rows()))
        .expect("Gram matrix of independent rows is invertible");
    n.transpose()
        .mul(&inv)
        .and_then(|t| t.mul(&n))
        .expect("shapes agree")
}

/// Exact check that `Σ Q_j ∘ π_j` reassembles `p`.
pub fn verify_certificate(p: &MultiPoly, pis: &[Mat], qs: &[MultiPoly]) -> Result<bool> {
    if pis.len() != qs.len() {
        return Err(Error::InvalidCertificate(format!(
            "{} maps but {} certificate polynomials",
            pis.len(),
            qs.len()
        )));
    }
    let mut sum = MultiPoly::zero(p.num_vars());
    for (q, pi) in qs.iter().zip(pis) {
        if pi.cols() != p.num_vars() {
            return Err(Error::DimensionMismatch {
                left: p.num_vars(),
                right: pi.cols(),
            });
        }
        sum = sum.add(&compose(q, pi)?)?;
    }
    Ok(&sum == p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub label: String,
    #[serde(with = "crate::wire::poly_serde")]
    pub q: MultiPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub exps: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub is_degenerate: bool,
    pub certificate: Option<Vec<CertificateTerm>>,
    pub quotient_norm: f64,
    pub residual: Vec<ResidualTerm>,
}

/// Report for `p` against labelled maps, with the degree bound `degree(p)`.
pub fn is_degenerate(p: &MultiPoly, pis: &[(String, Mat)]) -> Result<DegeneracyReport> {
    let (labels, mats): (Vec<String>, Vec<Mat>) = pis.iter().cloned().unzip();
    DegeneracyAnalyzer::cached(p.num_vars(), &mats, p.degree())?.report(p, &labels)
}

/// Coefficient-ℓ² distance from `p` to the degenerate subspace of degree `degree(p)`.
pub fn nd_norm(p: &MultiPoly, pis: &[Mat]) -> Result<f64> {
    DegeneracyAnalyzer::cached(p.num_vars(), pis, p.degree())?.nd_norm(p)
}

/// `Q(v) = P(v) − P(s(π0 v) + z)` where `s` is the section of `π0` through the
/// orthogonal complement of its null space and `z` lies in that null space, given by
/// coordinates in its canonical basis. The subtracted term factors through `π0`.
pub fn slice_subtract(p: &MultiPoly, pi0: &Mat, z: &[Rat]) -> Result<MultiPoly> {
    let m = p.num_vars();
    if pi0.cols() != m {
        return Err(Error::MalformedSplitting(format!(
            "map has {} columns for {m} variables",
            pi0.cols()
        )));
    }
    if pi0.rows() == 0 || pi0.rank() != pi0.rows() {
        return Err(Error::MalformedSplitting("map is not surjective".into()));
    }
    let v0 = kernel(pi0);
    if z.len() != v0.dim() {
        return Err(Error::MalformedSplitting(format!(
            "slice point has {} coordinates, null space has dimension {}",
            z.len(),
            v0.dim()
        )));
    }
    // orthogonal projection onto the row space of π0: π0ᵀ (π0 π0ᵀ)⁻¹ π0
    let pt = pi0.transpose();
    let gram_inv = pi0
        .mul(&pt)?
        .solve_left(&Mat::identity(pi0.rows()))
        .expect("surjective map has invertible Gram matrix");
    let proj = pt.mul(&gram_inv)?.mul(pi0)?;
    let mut offset = vec![Rat::zero(); m];
    for (zi, b) in z.iter().zip(v0.basis_vectors()) {
        for (o, bi) in offset.iter_mut().zip(b) {
            *o += zi * bi;
        }
    }
    p.sub(&p.substitute_affine(&proj, &offset)?)
}

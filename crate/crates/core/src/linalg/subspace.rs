use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mat::{rat, rref, Mat, Rat};
use crate::error::{Error, Result};

/// Draw cap for [`random_subspace`].
pub const MAX_SUBSPACE_DRAWS: usize = 64;

/// A linear subspace of `Q^m`.
///
/// The basis is stored as the nonzero rows of a reduced row echelon matrix, so two
/// `Subspace` values are equal exactly when they describe the same subspace.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

impl Subspace {
    /// Span of the given vectors (they need not be independent).
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<Rat>>) -> Result<Subspace> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    left: ambient_dim,
                    right: v.len(),
                });
            }
        }
        Ok(Self::from_spanning_rows(&Mat::from_rows(
            ambient_dim,
            vectors,
        )))
    }

    /// Span of the rows of `m`.
    pub fn from_spanning_rows(m: &Mat) -> Subspace {
        let r = rref(m);
        let basis = r.reduced.select_rows(&(0..r.rank).collect::<Vec<_>>());
        Subspace {
            ambient_dim: m.cols(),
            basis,
        }
    }

    /// Span of the given vectors, which must be linearly independent.
    pub fn from_independent(ambient_dim: usize, vectors: Vec<Vec<Rat>>) -> Result<Subspace> {
        let k = vectors.len();
        let s = Self::span(ambient_dim, vectors)?;
        if s.dim() != k {
            return Err(Error::InvalidInput(format!(
                "{k} basis vectors span only a {}-dimensional subspace",
                s.dim()
            )));
        }
        Ok(s)
    }

    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Mat::zeros(0, ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Subspace {
        Subspace {
            ambient_dim,
            basis: Mat::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.dim()
    }

    /// Canonical basis as the rows of a reduced row echelon matrix.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        self.basis.row_vecs()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let aug = self
            .basis
            .stack(&Mat::from_rows(self.ambient_dim, vec![v.to_vec()]))
            .expect("same width");
        aug.rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    /// Orthogonal complement under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis)
    }

    /// A full-row-rank matrix whose kernel is exactly this subspace.
    pub fn defining_matrix(&self) -> Mat {
        self.annihilator().basis.clone()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        let eqs = self.defining_matrix().stack(&other.defining_matrix())?;
        Ok(kernel(&eqs))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same_ambient(other)?;
        Ok(Self::from_spanning_rows(&self.basis.stack(&other.basis)?))
    }

    /// Intersection of a nonempty family.
    pub fn intersect_all<'a>(mut it: impl Iterator<Item = &'a Subspace>) -> Result<Subspace> {
        let first = it
            .next()
            .ok_or_else(|| Error::InvalidInput("intersection of an empty family".into()))?;
        let m = first.ambient_dim;
        let mut eqs = first.defining_matrix();
        for s in it {
            first.check_same_ambient(s)?;
            eqs = eqs.stack(&s.defining_matrix())?;
        }
        if eqs.rows() == 0 {
            return Ok(Subspace::full(m));
        }
        Ok(kernel(&eqs))
    }
}

/// Null space of `m` as a subspace of `Q^cols`.
pub fn kernel(m: &Mat) -> Subspace {
    let n = m.cols();
    let r = rref(m);
    let mut is_pivot = vec![false; n];
    for &c in &r.pivot_cols {
        is_pivot[c] = true;
    }
    let mut vectors = Vec::new();
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rat::zero(); n];
        v[f] = Rat::one();
        for (i, &c) in r.pivot_cols.iter().enumerate() {
            v[c] = -r.reduced[(i, f)].clone();
        }
        vectors.push(v);
    }
    Subspace::from_spanning_rows(&Mat::from_rows(n, vectors))
}

/// Uniformly random integer matrix with entries in `[-bound, bound]`.
pub fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> Mat {
    let data = (0..rows * cols)
        .map(|_| rat(rng.gen_range(-bound..=bound)))
        .collect();
    Mat::new(rows, cols, data)
}

/// A `dim`-dimensional subspace of `Q^m` spanned by random integer vectors.
///
/// Draws are resampled until independent, at most [`MAX_SUBSPACE_DRAWS`] times.
pub fn random_subspace(m: usize, dim: usize, seed: u64, coeff_bound: i64) -> Result<Subspace> {
    if dim > m {
        return Err(Error::InvalidInput(format!(
            "cannot draw a {dim}-dimensional subspace of Q^{m}"
        )));
    }
    if coeff_bound < 1 {
        return Err(Error::InvalidInput("coeff_bound must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SUBSPACE_DRAWS {
        let basis = random_int_matrix(&mut rng, dim, m, coeff_bound);
        let s = Subspace::from_spanning_rows(&basis);
        if s.dim() == dim {
            return Ok(s);
        }
    }
    Err(Error::GenericityFailure {
        step: None,
        reason: format!("no independent {dim}-frame in Q^{m} after {MAX_SUBSPACE_DRAWS} draws"),
    })
}

//! Finite labelled families of proper subspaces ("snarls") and the predicates used
//! to reason about splitting them.
//!
//! Codimensions are always recomputed from the stored subspaces; nothing here trusts
//! a caller-supplied codimension.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{clear_denominators, Mat, Subspace};
use crate::wire::SnarlJson;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SnarlJson", into = "SnarlJson")]
pub struct Snarl {
    ambient_dim: usize,
    entries: Vec<(String, Subspace)>,
}

impl Snarl {
    /// Validates that every entry lives in `Q^m`, has codimension in `[1, m-1]`, and
    /// carries a unique label.
    pub fn new(ambient_dim: usize, entries: Vec<(String, Subspace)>) -> Result<Snarl> {
        if ambient_dim < 2 {
            return Err(Error::InvalidSnarl(format!(
                "ambient dimension must be at least 2, got {ambient_dim}"
            )));
        }
        let mut seen = HashSet::new();
        for (label, s) in &entries {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidSnarl(format!("duplicate label `{label}`")));
            }
            if s.ambient_dim() != ambient_dim {
                return Err(Error::InvalidSnarl(format!(
                    "`{label}` lives in Q^{} but the snarl is in Q^{ambient_dim}",
                    s.ambient_dim()
                )));
            }
            let k = s.codim();
            if k < 1 || k > ambient_dim - 1 {
                return Err(Error::InvalidSnarl(format!(
                    "`{label}` has codimension {k}, outside [1, {}]",
                    ambient_dim - 1
                )));
            }
        }
        Ok(Snarl {
            ambient_dim,
            entries,
        })
    }

    /// Snarl of null spaces of the given linear maps.
    pub fn from_maps(maps: &[(String, Mat)]) -> Result<Snarl> {
        let m = maps
            .first()
            .map(|(_, a)| a.cols())
            .ok_or_else(|| Error::InvalidSnarl("no maps given".into()))?;
        let entries = maps
            .iter()
            .map(|(l, a)| (l.clone(), crate::linalg::kernel(a)))
            .collect();
        Snarl::new(m, entries)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn entries(&self) -> &[(String, Subspace)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn get(&self, label: &str) -> Option<&Subspace> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, s)| s)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|(l, _)| l == label)
    }

    fn require(&self, label: &str) -> Result<&Subspace> {
        self.get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn codim_profile(&self) -> Vec<(String, usize)> {
        self.entries
            .iter()
            .map(|(l, s)| (l.clone(), s.codim()))
            .collect()
    }

    fn codims(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(_, s)| s.codim())
    }

    pub fn total_codim(&self) -> usize {
        self.codims().sum()
    }

    pub fn max_codim(&self) -> usize {
        self.codims().max().unwrap_or(0)
    }

    /// `2 max κ + Σ κ <= 2m`.
    pub fn check_strong_hypothesis(&self) -> bool {
        2 * self.max_codim() + self.total_codim() <= 2 * self.ambient_dim
    }

    /// `max κ + Σ κ <= 2m`.
    pub fn check_weak_hypothesis(&self) -> bool {
        self.max_codim() + self.total_codim() <= 2 * self.ambient_dim
    }

    pub fn is_one_dimensional(&self) -> bool {
        self.codims().all(|k| k == 1)
    }

    /// Intersection of the entries named in `labels`.
    pub fn intersect_indexed<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subspace> {
        if labels.is_empty() {
            return Err(Error::InvalidInput(
                "intersection over an empty label set".into(),
            ));
        }
        let subs = labels
            .iter()
            .map(|l| self.require(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Subspace::intersect_all(subs.into_iter())
    }

    /// Copy with the entry `alpha0` removed and `(beta1, w1)`, `(beta2, w2)` appended.
    pub fn replace_with_pair(
        &self,
        alpha0: &str,
        beta1: (String, Subspace),
        beta2: (String, Subspace),
    ) -> Result<Snarl> {
        self.require(alpha0)?;
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .filter(|(l, _)| l != alpha0)
            .cloned()
            .collect();
        entries.push(beta1);
        entries.push(beta2);
        Snarl::new(self.ambient_dim, entries)
    }

    /// Normal directions of one-dimensional entries, as primitive integer vectors.
    pub fn normals(&self) -> Result<Vec<Vec<BigInt>>> {
        self.entries
            .iter()
            .map(|(l, s)| {
                if s.codim() != 1 {
                    return Err(Error::NonOneDimensional {
                        label: l.clone(),
                        codim: s.codim(),
                    });
                }
                let n = s.annihilator();
                Ok(clear_denominators(n.basis().row(0)))
            })
            .collect()
    }

    /// General position for a one-dimensional snarl: every set of at most `m` normals
    /// is linearly independent.
    pub fn is_onedim_general_position(&self) -> Result<bool> {
        let normals = self.normals()?;
        let k = normals.len().min(self.ambient_dim);
        // independence of all k-subsets implies independence of all smaller ones
        Ok(normals
            .iter()
            .combinations(k)
            .all(|subset| integer_vectors_independent(&subset)))
    }
}

const MOD_P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MOD_P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn rank_mod_p(rows: &[Vec<u64>]) -> usize {
    let mut a = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(p, r);
        let inv = powmod(a[r][c], MOD_P - 2);
        for i in (r + 1)..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            let f = mulmod(a[i][c], inv);
            let (top, bottom) = a.split_at_mut(i);
            for (x, &y) in bottom[0][c..].iter_mut().zip(&top[r][c..]) {
                *x = (*x + MOD_P - mulmod(f, y)) % MOD_P;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Rank mod a large prime never exceeds the rational rank, so a full modular rank
/// settles independence; otherwise fall back to exact elimination.
fn integer_vectors_independent(vs: &[&Vec<BigInt>]) -> bool {
    let p = BigInt::from(MOD_P);
    let reduced: Vec<Vec<u64>> = vs
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let mut y = x % &p;
                    if y < BigInt::zero() {
                        y += &p;
                    }
                    y.to_u64().expect("reduced residue fits in u64")
                })
                .collect()
        })
        .collect();
    if rank_mod_p(&reduced) == vs.len() {
        return true;
    }
    let cols = vs.first().map_or(0, |v| v.len());
    let m = Mat::from_rows(
        cols,
        vs.iter()
            .map(|v| {
                v.iter()
                    .map(|x| crate::linalg::Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect(),
    );
    m.rank() == vs.len()
}

/// Names the pieces of a splitting: `alpha0` is replaced by `beta1` and `beta2`, and
/// the remaining parent labels are partitioned with `partition.0` paired to `beta1`
/// and `partition.1` paired to `beta2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWitness {
    pub alpha0: String,
    pub beta1: String,
    pub beta2: String,
    pub partition: (Vec<String>, Vec<String>),
}

impl SplitWitness {
    /// Checks the witness against the parent alone.
    fn validate(&self, parent: &Snarl) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentWitness(msg));
        if parent.get(&self.alpha0).is_none() {
            return bad(format!("alpha0 `{}` is not in the parent", self.alpha0));
        }
        if self.beta1 == self.beta2 {
            return bad(format!("beta labels coincide (`{}`)", self.beta1));
        }
        for b in [&self.beta1, &self.beta2] {
            if parent.get(b).is_some() {
                return bad(format!("beta label `{b}` already occurs in the parent"));
            }
        }
        let (s1, s2) = &self.partition;
        if s1.is_empty() || s2.is_empty() {
            return bad("both sides of the partition must be nonempty".into());
        }
        let left: BTreeSet<&str> = s1.iter().map(String::as_str).collect();
        let right: BTreeSet<&str> = s2.iter().map(String::as_str).collect();
        if left.len() != s1.len() || right.len() != s2.len() || !left.is_disjoint(&right) {
            return bad("partition sides must be disjoint sets".into());
        }
        let cover: BTreeSet<&str> = left.union(&right).copied().collect();
        let rest: BTreeSet<&str> = parent.labels().filter(|l| *l != self.alpha0).collect();
        if cover != rest {
            return bad("partition must cover the parent labels other than alpha0".into());
        }
        Ok(())
    }
}

/// Whether `child` is a splitting of `parent` as described by `w`: one entry replaced
/// by two whose intersection is the original and whose codimensions add up to it.
pub fn is_splitting(parent: &Snarl, child: &Snarl, w: &SplitWitness) -> Result<bool> {
    w.validate(parent)?;
    if parent.ambient_dim() != child.ambient_dim() || child.len() != parent.len() + 1 {
        return Ok(false);
    }
    if child.get(&w.alpha0).is_some() {
        return Ok(false);
    }
    let (Some(w1), Some(w2)) = (child.get(&w.beta1), child.get(&w.beta2)) else {
        return Ok(false);
    };
    for (label, s) in parent.entries() {
        if *label == w.alpha0 {
            continue;
        }
        if child.get(label) != Some(s) {
            return Ok(false);
        }
    }
    let v0 = parent.get(&w.alpha0).expect("validated");
    if w1.codim() + w2.codim() != v0.codim() {
        return Ok(false);
    }
    Ok(&w1.intersect(w2)? == v0)
}

/// Whether the splitting is transverse for the witness partition `(A', A'')`:
/// `W_β' ∩ V_A'` and `W_β'' ∩ V_A''` are nonzero, `W_β' + W_β''` is everything, and
/// `W_β' + V_α0`, `W_β'' + V_α0` are proper.
pub fn is_transverse_splitting(parent: &Snarl, child: &Snarl, w: &SplitWitness) -> Result<bool> {
    if !is_splitting(parent, child, w)? {
        return Ok(false);
    }
    let w1 = child.get(&w.beta1).expect("checked by is_splitting");
    let w2 = child.get(&w.beta2).expect("checked by is_splitting");
    let v0 = parent.get(&w.alpha0).expect("checked by is_splitting");
    let va1 = parent.intersect_indexed(&w.partition.0)?;
    let va2 = parent.intersect_indexed(&w.partition.1)?;
    Ok(!w1.intersect(&va1)?.is_zero()
        && !w2.intersect(&va2)?.is_zero()
        && w1.sum(w2)?.is_full()
        && !w1.sum(v0)?.is_full()
        && !w2.sum(v0)?.is_full())
}

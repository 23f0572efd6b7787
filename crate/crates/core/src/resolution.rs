//! Constructing transverse splittings and chaining them into resolutions that end in
//! a snarl of hyperplanes.
//!
//! Genericity is obtained by drawing random integer subspaces and checking every
//! required condition exactly afterwards; a draw that lands on a bad configuration is
//! discarded and redrawn with a fresh seed.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel, random_subspace, Mat, Subspace};
use crate::snarl::{is_splitting, is_transverse_splitting, Snarl, SplitWitness};
use crate::wire::{subspace_from_json, subspace_to_json, RowsJson, SnarlJson};

/// Entry bound for the random integer subspaces used as generic transversals.
pub const GENERIC_COEFF_BOUND: i64 = 10;
/// Fresh-seed retries per splitting before reporting a genericity failure.
pub const MAX_SPLIT_ATTEMPTS: usize = 32;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `(seed, tag)`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x5EED)))
}

/// Splits the labels other than `excluded` into two nonempty groups whose codimension
/// sums differ by at most the excluded codimension.
///
/// Greedy: labels are visited by decreasing codimension (ties in list order) and each
/// goes to the currently lighter side, the first side on ties. Both sides are returned
/// in list order.
pub fn balance_partition(
    kappas: &[(String, usize)],
    excluded: &str,
) -> Result<(Vec<String>, Vec<String>)> {
    let mut rest: Vec<(usize, &String, usize)> = kappas
        .iter()
        .enumerate()
        .filter(|(_, (l, _))| l != excluded)
        .map(|(i, (l, k))| (i, l, *k))
        .collect();
    if rest.len() < 2 {
        return Err(Error::CannotPartition(rest.len()));
    }
    rest.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let (mut lsum, mut rsum) = (0usize, 0usize);
    for (i, l, k) in rest {
        if lsum <= rsum {
            left.push((i, l.clone()));
            lsum += k;
        } else {
            right.push((i, l.clone()));
            rsum += k;
        }
    }
    left.sort();
    right.sort();
    Ok((
        left.into_iter().map(|x| x.1).collect(),
        right.into_iter().map(|x| x.1).collect(),
    ))
}

/// One transverse splitting together with the data that produced it.
///
/// The child replaces `V_α0` by `V_α0 + W'` (label `beta1`, paired with the first
/// partition side, `W' ⊂ V_S'`) and `V_α0 + W''` (label `beta2`, second side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingStep {
    pub parent: Snarl,
    pub child: Snarl,
    pub witness: SplitWitness,
    pub w_prime: Subspace,
    pub w_double_prime: Subspace,
    pub kappa_prime: usize,
    pub kappa_double_prime: usize,
    pub seeds_used: Vec<u64>,
}

impl SplittingStep {
    /// Exact re-check of the step's own invariants; returns a description of every
    /// violated condition.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let Some(v0) = self.parent.get(&self.witness.alpha0) else {
            return vec![format!(
                "alpha0 `{}` missing from parent",
                self.witness.alpha0
            )];
        };
        let k0 = v0.codim();
        if self.w_prime.dim() != self.kappa_prime {
            bad.push("dim W' != kappa'".into());
        }
        if self.w_double_prime.dim() != self.kappa_double_prime {
            bad.push("dim W'' != kappa''".into());
        }
        if self.kappa_prime + self.kappa_double_prime != k0 {
            bad.push("kappa' + kappa'' != codim V_alpha0".into());
        }
        for k in [self.kappa_prime, self.kappa_double_prime] {
            if k < 1 || k + 1 > k0 {
                bad.push(format!("kappa {k} outside [1, {}]", k0.saturating_sub(1)));
            }
        }
        match self.w_prime.intersect(&self.w_double_prime) {
            Ok(i) if i.is_zero() => {}
            _ => bad.push("W' ∩ W'' != {0}".into()),
        }
        let sum_meets_v0 = self
            .w_prime
            .sum(&self.w_double_prime)
            .and_then(|w| w.intersect(v0))
            .map(|i| i.is_zero());
        if sum_meets_v0 != Ok(true) {
            bad.push("(W' + W'') ∩ V_alpha0 != {0}".into());
        }
        bad
    }
}

fn fresh_label(taken: &HashSet<String>, counter: &mut usize) -> String {
    loop {
        *counter += 1;
        let l = format!("b{counter}");
        if !taken.contains(&l) {
            return l;
        }
    }
}

/// Labels `b1`, `b2`, ... not yet used by `s`.
fn fresh_pair(s: &Snarl, counter: &mut usize) -> (String, String) {
    let taken: HashSet<String> = s.labels().map(str::to_string).collect();
    let a = fresh_label(&taken, counter);
    let b = fresh_label(&taken, counter);
    (a, b)
}

/// Replaces `alpha0` by two subspaces of smaller codimension, forming a transverse
/// splitting. The new labels are the first unused `b<k>`.
pub fn construct_transverse_splitting(s: &Snarl, alpha0: &str, seed: u64) -> Result<SplittingStep> {
    let mut counter = 0;
    let labels = fresh_pair(s, &mut counter);
    construct_with_labels(s, alpha0, seed, labels)
}

/// Chooses `(κ', κ'')` with `κ' + κ'' = κ0`, the larger half going to the side with
/// the smaller codimension sum, then shifted if a side cannot hold its share.
fn choose_kappas(
    k0: usize,
    ks1: usize,
    ks2: usize,
    cap1: usize,
    cap2: usize,
) -> Option<(usize, usize)> {
    let (hi, lo) = (k0.div_ceil(2), k0 / 2);
    let (mut k1, mut k2) = if ks1 <= ks2 { (hi, lo) } else { (lo, hi) };
    if k1 > cap1 {
        k1 = cap1;
        k2 = k0 - k1;
    } else if k2 > cap2 {
        k2 = cap2;
        k1 = k0 - k2;
    }
    let ok = |k: usize| k >= 1 && k < k0;
    (ok(k1) && ok(k2) && k1 <= cap1 && k2 <= cap2).then_some((k1, k2))
}

/// `κ`-dimensional subspace of `target` cut out by a random subspace of complementary
/// dimension, or `None` if the draw is degenerate.
fn generic_slice(target: &Subspace, kappa: usize, seed: u64) -> Result<Option<Subspace>> {
    let m = target.ambient_dim();
    let u = random_subspace(m, m - target.dim() + kappa, seed, GENERIC_COEFF_BOUND)?;
    let cut = u.intersect(target)?;
    if cut.dim() < kappa {
        return Ok(None);
    }
    if cut.dim() == kappa {
        return Ok(Some(cut));
    }
    let first: Vec<usize> = (0..kappa).collect();
    Ok(Some(Subspace::from_spanning_rows(
        &cut.basis().select_rows(&first),
    )))
}

fn construct_with_labels(
    s: &Snarl,
    alpha0: &str,
    seed: u64,
    (beta1, beta2): (String, String),
) -> Result<SplittingStep> {
    let v0 = s
        .get(alpha0)
        .ok_or_else(|| Error::UnknownLabel(alpha0.to_string()))?;
    let k0 = v0.codim();
    if k0 < 2 {
        return Err(Error::NotSplittable(alpha0.to_string()));
    }
    if !s.check_weak_hypothesis() {
        return Err(Error::HypothesisViolated(format!(
            "max codim + sum of codims = {} + {} exceeds 2m = {}",
            s.max_codim(),
            s.total_codim(),
            2 * s.ambient_dim()
        )));
    }
    let profile = s.codim_profile();
    let (side1, side2) = balance_partition(&profile, alpha0)?;
    let ksum = |side: &[String]| -> usize {
        side.iter()
            .map(|l| profile.iter().find(|(x, _)| x == l).map_or(0, |p| p.1))
            .sum()
    };
    let vs1 = s.intersect_indexed(&side1)?;
    let vs2 = s.intersect_indexed(&side2)?;
    let Some((k1, k2)) = choose_kappas(k0, ksum(&side1), ksum(&side2), vs1.dim(), vs2.dim()) else {
        return Err(Error::GenericityFailure {
            step: None,
            reason: format!(
                "no split of codimension {k0} fits intersections of dimensions {} and {}",
                vs1.dim(),
                vs2.dim()
            ),
        });
    };
    let witness = SplitWitness {
        alpha0: alpha0.to_string(),
        beta1,
        beta2,
        partition: (side1, side2),
    };

    let mut seeds_used = Vec::new();
    for attempt in 0..MAX_SPLIT_ATTEMPTS {
        let attempt_seed = derive_seed(seed, attempt as u64);
        seeds_used.push(attempt_seed);
        let (Some(w1), Some(w2)) = (
            generic_slice(&vs1, k1, derive_seed(attempt_seed, 1))?,
            generic_slice(&vs2, k2, derive_seed(attempt_seed, 2))?,
        ) else {
            continue;
        };
        if !w1.intersect(&w2)?.is_zero() || !w1.sum(&w2)?.intersect(v0)?.is_zero() {
            continue;
        }
        let child = s.replace_with_pair(
            alpha0,
            (witness.beta1.clone(), v0.sum(&w1)?),
            (witness.beta2.clone(), v0.sum(&w2)?),
        )?;
        if !is_transverse_splitting(s, &child, &witness)? {
            continue;
        }
        let step = SplittingStep {
            parent: s.clone(),
            child,
            witness,
            w_prime: w1,
            w_double_prime: w2,
            kappa_prime: k1,
            kappa_double_prime: k2,
            seeds_used,
        };
        debug_assert!(step.invariant_violations().is_empty());
        return Ok(step);
    }
    Err(Error::GenericityFailure {
        step: None,
        reason: format!(
            "no transverse splitting of `{alpha0}` found in {MAX_SPLIT_ATTEMPTS} attempts"
        ),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub seed: u64,
    pub chain: Vec<Snarl>,
    pub steps: Vec<SplittingStep>,
    pub terminal_general_position: bool,
}

impl Resolution {
    pub fn terminal(&self) -> &Snarl {
        self.chain
            .last()
            .expect("a resolution chain is never empty")
    }
}

/// Splits the first entry of maximal codimension until every entry is a hyperplane.
pub fn resolve(s: &Snarl, seed: u64) -> Result<Resolution> {
    if !s.check_weak_hypothesis() {
        return Err(Error::HypothesisViolated(format!(
            "max codim + sum of codims <= 2m fails: {} + {} > {}",
            s.max_codim(),
            s.total_codim(),
            2 * s.ambient_dim()
        )));
    }
    let mut chain = vec![s.clone()];
    let mut steps = Vec::new();
    let mut counter = 0;
    let mut used: HashSet<String> = s.labels().map(str::to_string).collect();
    loop {
        let cur = chain.last().unwrap();
        if cur.is_one_dimensional() {
            break;
        }
        let k = cur.max_codim();
        let alpha0 = cur
            .entries()
            .iter()
            .find(|(_, v)| v.codim() == k)
            .map(|(l, _)| l.clone())
            .expect("nonempty snarl");
        let labels = (
            fresh_label(&used, &mut counter),
            fresh_label(&used, &mut counter),
        );
        used.insert(labels.0.clone());
        used.insert(labels.1.clone());
        let index = steps.len();
        let step = construct_with_labels(cur, &alpha0, derive_seed(seed, index as u64), labels)
            .map_err(|e| match e {
                Error::GenericityFailure { reason, .. } => Error::GenericityFailure {
                    step: Some(index),
                    reason,
                },
                other => other,
            })?;
        chain.push(step.child.clone());
        steps.push(step);
    }
    let terminal_general_position = chain.last().unwrap().is_onedim_general_position()?;
    Ok(Resolution {
        seed,
        chain,
        steps,
        terminal_general_position,
    })
}

/// `(π_n, π_{n+1})`: surjections with null spaces `V_α0 + W''` and `V_α0 + W'`, each
/// written as `L ∘ π_α0`.
pub fn derived_projections(step: &SplittingStep, maps: &[(String, Mat)]) -> Result<(Mat, Mat)> {
    let alpha0 = &step.witness.alpha0;
    let pi0 = maps
        .iter()
        .find(|(l, _)| l == alpha0)
        .map(|(_, m)| m)
        .ok_or_else(|| Error::UnknownLabel(alpha0.clone()))?;
    let v0 = step
        .parent
        .get(alpha0)
        .ok_or_else(|| Error::UnknownLabel(alpha0.clone()))?;
    if &kernel(pi0) != v0 {
        return Err(Error::InconsistentKernel(format!(
            "null space of the map for `{alpha0}` differs from the split subspace"
        )));
    }
    let through_pi0 = |target: &Subspace| -> Result<Mat> {
        let rows = target.defining_matrix();
        let l = pi0.solve_left(&rows).ok_or_else(|| {
            Error::InconsistentKernel("target does not contain the null space of π_α0".into())
        })?;
        let out = l.mul(pi0)?;
        if &kernel(&out) != target || out.rank() != out.rows() {
            return Err(Error::InconsistentKernel(
                "derived map has the wrong null space".into(),
            ));
        }
        Ok(out)
    };
    let vn = v0.sum(&step.w_double_prime)?;
    let vn1 = v0.sum(&step.w_prime)?;
    Ok((through_pi0(&vn)?, through_pi0(&vn1)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub index: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub steps: Vec<StepReport>,
    pub terminal_one_dimensional: bool,
    pub terminal_general_position: Option<bool>,
}

/// Re-derives every claim a resolution makes, without trusting stored flags.
pub fn verify_resolution(r: &Resolution) -> VerificationReport {
    let mut steps = Vec::new();
    if r.chain.len() != r.steps.len() + 1 {
        steps.push(StepReport {
            index: 0,
            passed: false,
            failures: vec![format!(
                "chain has {} snarls for {} steps",
                r.chain.len(),
                r.steps.len()
            )],
        });
    }
    for (k, step) in r.steps.iter().enumerate() {
        let mut failures = Vec::new();
        let (Some(parent), Some(child)) = (r.chain.get(k), r.chain.get(k + 1)) else {
            failures.push("step is not linked to the chain".into());
            steps.push(StepReport {
                index: k,
                passed: false,
                failures,
            });
            continue;
        };
        if &step.parent != parent || &step.child != child {
            failures.push("step endpoints differ from the chain".into());
        }
        match is_transverse_splitting(parent, child, &step.witness) {
            Ok(true) => {}
            Ok(false) => {
                let split = is_splitting(parent, child, &step.witness).unwrap_or(false);
                failures.push(if split {
                    "splitting is not transverse".into()
                } else {
                    "not a splitting".into()
                });
            }
            Err(e) => failures.push(format!("witness rejected: {e}")),
        }
        if parent.total_codim() != child.total_codim() {
            failures.push("sum of codimensions changed".into());
        }
        if child.max_codim() > parent.max_codim() {
            failures.push("max codimension increased".into());
        }
        if child.len() != parent.len() + 1 {
            failures.push("entry count did not grow by one".into());
        }
        let child_has = |label: &str, w: &Subspace| -> bool {
            let v0 = parent.get(&step.witness.alpha0);
            match (v0, child.get(label)) {
                (Some(v0), Some(c)) => v0.sum(w).map(|s| &s == c).unwrap_or(false),
                _ => false,
            }
        };
        if !child_has(&step.witness.beta1, &step.w_prime)
            || !child_has(&step.witness.beta2, &step.w_double_prime)
        {
            failures.push("child entries differ from V_alpha0 + W".into());
        }
        let inside = |side: &[String], w: &Subspace| -> bool {
            parent
                .intersect_indexed(side)
                .map(|v| w.is_subspace_of(&v))
                .unwrap_or(false)
        };
        if !inside(&step.witness.partition.0, &step.w_prime)
            || !inside(&step.witness.partition.1, &step.w_double_prime)
        {
            failures.push("W' or W'' not inside its partition intersection".into());
        }
        failures.extend(step.invariant_violations());
        steps.push(StepReport {
            index: k,
            passed: failures.is_empty(),
            failures,
        });
    }
    let terminal = r.chain.last();
    let terminal_one_dimensional = terminal.is_some_and(Snarl::is_one_dimensional);
    let terminal_general_position = terminal.and_then(|t| t.is_onedim_general_position().ok());
    let flag_ok = terminal_general_position == Some(r.terminal_general_position);
    VerificationReport {
        passed: steps.iter().all(|s| s.passed) && terminal_one_dimensional && flag_ok,
        steps,
        terminal_one_dimensional,
        terminal_general_position,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepJson {
    pub alpha0: String,
    pub beta1: String,
    pub beta2: String,
    pub partition: (Vec<String>, Vec<String>),
    pub w_prime: RowsJson,
    pub w_double_prime: RowsJson,
    pub kappa_prime: usize,
    pub kappa_double_prime: usize,
    pub seeds_used: Vec<u64>,
}

/// Replayable form: the chain plus per-step witness data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolutionJson {
    pub seed: u64,
    pub chain: Vec<SnarlJson>,
    pub steps: Vec<StepJson>,
    pub terminal_general_position: bool,
}

impl From<&Resolution> for ResolutionJson {
    fn from(r: &Resolution) -> Self {
        ResolutionJson {
            seed: r.seed,
            chain: r.chain.iter().cloned().map(SnarlJson::from).collect(),
            steps: r
                .steps
                .iter()
                .map(|s| StepJson {
                    alpha0: s.witness.alpha0.clone(),
                    beta1: s.witness.beta1.clone(),
                    beta2: s.witness.beta2.clone(),
                    partition: s.witness.partition.clone(),
                    w_prime: subspace_to_json(&s.w_prime),
                    w_double_prime: subspace_to_json(&s.w_double_prime),
                    kappa_prime: s.kappa_prime,
                    kappa_double_prime: s.kappa_double_prime,
                    seeds_used: s.seeds_used.clone(),
                })
                .collect(),
            terminal_general_position: r.terminal_general_position,
        }
    }
}

impl TryFrom<ResolutionJson> for Resolution {
    type Error = Error;

    fn try_from(j: ResolutionJson) -> Result<Resolution> {
        let chain = j
            .chain
            .into_iter()
            .map(Snarl::try_from)
            .collect::<Result<Vec<_>>>()?;
        if chain.is_empty() || chain.len() != j.steps.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "resolution with {} snarls and {} steps",
                chain.len(),
                j.steps.len()
            )));
        }
        let m = chain[0].ambient_dim();
        let steps = j
            .steps
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                Ok(SplittingStep {
                    parent: chain[k].clone(),
                    child: chain[k + 1].clone(),
                    witness: SplitWitness {
                        alpha0: s.alpha0,
                        beta1: s.beta1,
                        beta2: s.beta2,
                        partition: s.partition,
                    },
                    w_prime: subspace_from_json(m, &s.w_prime)?,
                    w_double_prime: subspace_from_json(m, &s.w_double_prime)?,
                    kappa_prime: s.kappa_prime,
                    kappa_double_prime: s.kappa_double_prime,
                    seeds_used: s.seeds_used,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Resolution {
            seed: j.seed,
            chain,
            steps,
            terminal_general_position: j.terminal_general_position,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_int_matrix, rat};
    use rand::SeedableRng;

    fn map(rows: &[&[i64]]) -> Mat {
        Mat::from_i64(rows[0].len(), rows)
    }

    fn example_maps() -> Vec<(String, Mat)> {
        vec![
            ("pi0".into(), map(&[&[1, 0, 0, 0], &[0, 0, 1, 0]])),
            ("pi1".into(), map(&[&[0, 1, 0, 0], &[0, 0, 0, 1]])),
            ("pi2".into(), map(&[&[1, 1, 0, 0], &[0, 0, 1, 1]])),
        ]
    }

    fn example_snarl() -> Snarl {
        Snarl::from_maps(&example_maps()).unwrap()
    }

    fn generic(m: usize, ks: &[usize], seed: u64) -> Snarl {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Snarl::new(
            m,
            ks.iter()
                .enumerate()
                .map(|(i, &k)| {
                    (
                        format!("v{i}"),
                        kernel(&random_int_matrix(&mut rng, k, m, 6)),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    fn labelled(ks: &[(&str, usize)]) -> Vec<(String, usize)> {
        ks.iter().map(|(l, k)| (l.to_string(), *k)).collect()
    }

    #[test]
    fn balance_example_triple() {
        let (a, b) =
            balance_partition(&labelled(&[("pi0", 2), ("pi1", 2), ("pi2", 2)]), "pi0").unwrap();
        assert_eq!(a, vec!["pi1"]);
        assert_eq!(b, vec!["pi2"]);
    }

    #[test]
    fn balance_greedy_largest_first() {
        let ks = labelled(&[("a0", 3), ("a", 3), ("b", 1), ("c", 1)]);
        let (s1, s2) = balance_partition(&ks, "a0").unwrap();
        assert_eq!(s1, vec!["a"]);
        assert_eq!(s2, vec!["b", "c"]);
        // ties in codimension keep list order; smaller ones fill the lighter side
        let ks = labelled(&[("x", 1), ("p", 2), ("q", 2), ("r", 1), ("s", 1)]);
        let (s1, s2) = balance_partition(&ks, "s").unwrap();
        assert_eq!(s1, vec!["x", "p"]);
        assert_eq!(s2, vec!["q", "r"]);
    }

    #[test]
    fn balance_needs_two_labels() {
        let ks = labelled(&[("a", 2), ("b", 1)]);
        assert_eq!(balance_partition(&ks, "a"), Err(Error::CannotPartition(1)));
    }

    #[test]
    fn kappa_split_prefers_halves() {
        assert_eq!(choose_kappas(2, 2, 2, 2, 2), Some((1, 1)));
        assert_eq!(choose_kappas(3, 1, 4, 5, 5), Some((2, 1)));
        assert_eq!(choose_kappas(3, 4, 1, 5, 5), Some((1, 2)));
        // first side only has room for one dimension
        assert_eq!(choose_kappas(3, 1, 4, 1, 5), Some((1, 2)));
        assert_eq!(choose_kappas(3, 1, 4, 1, 1), None);
    }

    #[test]
    fn example_first_split() {
        let s = example_snarl();
        let step = construct_transverse_splitting(&s, "pi0", 3).unwrap();
        let ks: Vec<usize> = step.child.codim_profile().iter().map(|x| x.1).collect();
        assert_eq!(ks, vec![2, 2, 1, 1]);
        assert_eq!((step.kappa_prime, step.kappa_double_prime), (1, 1));
        assert!(step.w_prime.is_subspace_of(s.get("pi1").unwrap()));
        assert!(step.w_double_prime.is_subspace_of(s.get("pi2").unwrap()));
        assert!(is_transverse_splitting(&s, &step.child, &step.witness).unwrap());
        assert!(step.invariant_violations().is_empty());
        assert_eq!(step.witness.beta1, "b1");
        assert!(!step.seeds_used.is_empty());
    }

    #[test]
    fn codim_one_is_not_splittable() {
        let s = example_snarl();
        let step = construct_transverse_splitting(&s, "pi0", 1).unwrap();
        assert_eq!(
            construct_transverse_splitting(&step.child, "b1", 1),
            Err(Error::NotSplittable("b1".into()))
        );
    }

    #[test]
    fn repeated_subspaces_defeat_genericity() {
        let v = kernel(&map(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
        let s = Snarl::new(
            4,
            vec![
                ("a".into(), v.clone()),
                ("b".into(), v.clone()),
                ("c".into(), v),
            ],
        )
        .unwrap();
        let err = construct_transverse_splitting(&s, "a", 9).unwrap_err();
        assert!(matches!(err, Error::GenericityFailure { .. }), "{err:?}");
    }

    #[test]
    fn splitting_is_deterministic() {
        let s = generic(6, &[3, 2, 2, 2], 4);
        let a = construct_transverse_splitting(&s, "v0", 77).unwrap();
        let b = construct_transverse_splitting(&s, "v0", 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.kappa_prime + a.kappa_double_prime, 3);
    }

    #[test]
    fn resolve_example() {
        let r = resolve(&example_snarl(), 0).unwrap();
        assert_eq!(r.steps.len(), 3);
        assert_eq!(r.terminal().len(), 6);
        assert!(r.terminal().is_one_dimensional());
        assert!(r.chain.iter().all(|s| s.total_codim() == 6));
        let report = verify_resolution(&r);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn resolve_one_dimensional_input_is_empty_chain() {
        let s = generic(4, &[1, 1, 1, 1, 1], 2);
        let r = resolve(&s, 5).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.terminal(), &s);
        assert!(verify_resolution(&r).passed);
    }

    #[test]
    fn resolve_four_planes_in_six_space() {
        let s = generic(6, &[2, 2, 2, 2], 11);
        assert!(s.check_strong_hypothesis());
        let r = resolve(&s, 21).unwrap();
        assert_eq!(r.steps.len(), 4);
        assert_eq!(r.terminal().len(), 8);
        assert!(r.terminal_general_position);
        assert!(verify_resolution(&r).passed);
    }

    #[test]
    fn resolve_rejects_weak_hypothesis_violation() {
        let s = generic(4, &[2, 2, 2, 1], 3);
        assert!(matches!(resolve(&s, 0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn resolve_reports_failing_step() {
        let v = kernel(&map(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
        let s = Snarl::new(
            4,
            vec![
                ("a".into(), v.clone()),
                ("b".into(), v.clone()),
                ("c".into(), v),
            ],
        )
        .unwrap();
        assert!(matches!(
            resolve(&s, 0),
            Err(Error::GenericityFailure { step: Some(0), .. })
        ));
    }

    #[test]
    fn labels_are_never_reused() {
        let r = resolve(&generic(6, &[3, 2, 2, 2], 8), 1).unwrap();
        let mut seen = HashSet::new();
        for step in &r.steps {
            assert!(seen.insert(step.witness.beta1.clone()));
            assert!(seen.insert(step.witness.beta2.clone()));
        }
    }

    #[test]
    fn tampered_child_fails_verification() {
        let mut r = resolve(&example_snarl(), 0).unwrap();
        let mut entries = r.chain[2].entries().to_vec();
        entries[0].1 = kernel(&map(&[&[1, 2, 3, 4], &[0, 1, 0, 1]]));
        r.chain[2] = Snarl::new(4, entries).unwrap();
        let report = verify_resolution(&r);
        assert!(!report.passed);
        assert!(!report.steps[1].passed);
        assert!(report.steps[0].passed);
    }

    #[test]
    fn resolution_json_round_trip() {
        let r = resolve(&example_snarl(), 12).unwrap();
        let j = serde_json::to_string(&ResolutionJson::from(&r)).unwrap();
        let back: ResolutionJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Resolution::try_from(back).unwrap(), r);
    }

    #[test]
    fn derived_projection_for_coordinate_split() {
        // V0 = {x1 = y1 = 0}; W'' = span{e_x1} so V0 + W'' = {y1 = 0}, i.e. the map
        // (s, t) = pi0(x) ↦ t.
        let parent = example_snarl();
        let v0 = parent.get("pi0").unwrap().clone();
        let e = |i: usize| -> Vec<crate::linalg::Rat> {
            (0..4).map(|j| rat((i == j) as i64)).collect()
        };
        let w1 = Subspace::span(4, vec![e(2)]).unwrap();
        let w2 = Subspace::span(4, vec![e(0)]).unwrap();
        let child = parent
            .replace_with_pair(
                "pi0",
                ("b1".into(), v0.sum(&w1).unwrap()),
                ("b2".into(), v0.sum(&w2).unwrap()),
            )
            .unwrap();
        let step = SplittingStep {
            parent,
            child,
            witness: SplitWitness {
                alpha0: "pi0".into(),
                beta1: "b1".into(),
                beta2: "b2".into(),
                partition: (vec!["pi1".into()], vec!["pi2".into()]),
            },
            w_prime: w1,
            w_double_prime: w2,
            kappa_prime: 1,
            kappa_double_prime: 1,
            seeds_used: vec![],
        };
        let (pn, pn1) = derived_projections(&step, &example_maps()).unwrap();
        assert_eq!(pn, map(&[&[0, 0, 1, 0]]));
        assert_eq!(pn1, map(&[&[1, 0, 0, 0]]));
    }

    #[test]
    fn derived_projections_of_random_steps() {
        let maps = example_maps();
        for seed in 0..5 {
            let step = construct_transverse_splitting(&example_snarl(), "pi0", seed).unwrap();
            let (pn, pn1) = derived_projections(&step, &maps).unwrap();
            let v0 = step.parent.get("pi0").unwrap();
            assert_eq!(kernel(&pn), v0.sum(&step.w_double_prime).unwrap());
            assert_eq!(kernel(&pn1), v0.sum(&step.w_prime).unwrap());
            assert_eq!(pn.rows(), step.kappa_prime);
            assert_eq!(pn1.rows(), step.kappa_double_prime);
            assert!(maps[0].1.solve_left(&pn).is_some());
        }
    }

    #[test]
    fn derived_projections_reject_wrong_map() {
        let step = construct_transverse_splitting(&example_snarl(), "pi0", 0).unwrap();
        let wrong = vec![("pi0".to_string(), map(&[&[0, 1, 0, 0], &[0, 0, 0, 1]]))];
        assert!(matches!(
            derived_projections(&step, &wrong),
            Err(Error::InconsistentKernel(_))
        ));
        assert!(matches!(
            derived_projections(&step, &[]),
            Err(Error::UnknownLabel(_))
        ));
    }
}

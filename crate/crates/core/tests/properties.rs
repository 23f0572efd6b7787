use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oscint_core::degeneracy::{is_degenerate, nd_norm, slice_subtract, DegeneracyAnalyzer};
use oscint_core::linalg::{kernel, random_int_matrix, random_subspace, rat, ratio, Mat, Rat};
use oscint_core::poly::{compose, monomials, MultiPoly};
use oscint_core::resolution::{balance_partition, derived_projections, resolve};
use oscint_core::snarl::Snarl;

fn weak_snarl(seed: u64, max_m: usize) -> Snarl {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = rng.gen_range(3..=max_m);
        let n = rng.gen_range(3..=5);
        let codims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..m)).collect();
        let max = *codims.iter().max().unwrap();
        if max + codims.iter().sum::<usize>() > 2 * m {
            continue;
        }
        let entries = codims
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                (
                    format!("e{j}"),
                    random_subspace(m, m - c, rng.gen(), 1000).unwrap(),
                )
            })
            .collect();
        return Snarl::new(m, entries).unwrap();
    }
}

fn surjection(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    loop {
        let a = random_int_matrix(rng, rows, cols, 3);
        if a.rank() == rows {
            return a;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, vars: usize, degree: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(vars);
    for e in monomials(vars, degree) {
        if rng.gen_bool(0.6) {
            p.add_term(e.0, rat(rng.gen_range(-4..=4)));
        }
    }
    p
}

fn maps_and_phase(seed: u64) -> (Vec<(String, Mat)>, MultiPoly, MultiPoly) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=4);
    let maps: Vec<(String, Mat)> = (0..rng.gen_range(1..=3))
        .map(|j| {
            let r = rng.gen_range(1..m);
            (format!("p{j}"), surjection(&mut rng, r, m))
        })
        .collect();
    let degree = rng.gen_range(1..=3);
    let p = random_poly(&mut rng, m, degree);
    let mut d = MultiPoly::zero(m);
    for (_, pi) in &maps {
        let q = random_poly(&mut rng, pi.rows(), degree);
        d = d.add(&compose(&q, pi).unwrap()).unwrap();
    }
    (maps, p, d)
}

fn pis(maps: &[(String, Mat)]) -> Vec<Mat> {
    maps.iter().map(|x| x.1.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_conserves_codimension(seed in any::<u64>()) {
        let s = weak_snarl(seed, 6);
        let r = resolve(&s, seed).unwrap();
        let total = s.total_codim();
        prop_assert_eq!(r.steps.len(), total - s.len());
        prop_assert_eq!(r.terminal().len(), total);
        for w in r.chain.windows(2) {
            prop_assert_eq!(w[1].total_codim(), total);
            prop_assert!(w[1].max_codim() <= w[0].max_codim());
            prop_assert_eq!(w[1].len(), w[0].len() + 1);
        }
        for st in &r.steps {
            prop_assert!(st.invariant_violations().is_empty());
        }
        if s.check_strong_hypothesis() {
            prop_assert!(r.terminal().len() <= 2 * s.ambient_dim() - 2);
            prop_assert!(r.chain.iter().all(Snarl::check_strong_hypothesis));
        }
    }

    #[test]
    fn resolve_is_deterministic(seed in any::<u64>()) {
        let s = weak_snarl(seed, 5);
        let a = resolve(&s, seed).unwrap();
        let b = resolve(&s, seed).unwrap();
        prop_assert_eq!(a.chain, b.chain);
    }

    #[test]
    fn balanced_partition_gap(kappas in proptest::collection::vec(1usize..6, 3..8)) {
        let profile: Vec<(String, usize)> =
            kappas.iter().enumerate().map(|(i, k)| (format!("l{i}"), *k)).collect();
        let k0 = *kappas.iter().max().unwrap();
        let excluded = profile.iter().find(|x| x.1 == k0).unwrap().0.clone();
        let (a, b) = balance_partition(&profile, &excluded).unwrap();
        let sum = |side: &[String]| -> usize {
            side.iter().map(|l| profile.iter().find(|x| &x.0 == l).unwrap().1).sum()
        };
        prop_assert!(!a.is_empty() && !b.is_empty());
        prop_assert_eq!(a.len() + b.len(), profile.len() - 1);
        prop_assert!(sum(&a).abs_diff(sum(&b)) <= k0);
    }

    #[test]
    fn norm_ignores_degenerate_shifts(seed in any::<u64>()) {
        let (maps, p, d) = maps_and_phase(seed);
        let pis = pis(&maps);
        let base = nd_norm(&p, &pis).unwrap();
        let shifted = nd_norm(&p.add(&d).unwrap(), &pis).unwrap();
        prop_assert!((base - shifted).abs() <= 1e-12 * base.max(1.0));
        prop_assert_eq!(nd_norm(&d, &pis).unwrap(), 0.0);
        prop_assert_eq!(base == 0.0, is_degenerate(&p, &maps).unwrap().is_degenerate);
    }

    #[test]
    fn norm_is_homogeneous(seed in any::<u64>(), num in -9i64..=9, den in 1i64..=9) {
        let (maps, p, _) = maps_and_phase(seed);
        let pis = pis(&maps);
        let lam = ratio(num, den);
        let scaled = nd_norm(&p.scale(&lam), &pis).unwrap();
        let expect = nd_norm(&p, &pis).unwrap() * (num as f64 / den as f64).abs();
        prop_assert!((scaled - expect).abs() <= 1e-12 * expect.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn slicing_preserves_the_class(seed in any::<u64>()) {
        let (maps, p, _) = maps_and_phase(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let pi0 = &maps[0].1;
        let z: Vec<Rat> = (0..kernel(pi0).dim()).map(|_| rat(rng.gen_range(-3..=3))).collect();
        let q = slice_subtract(&p, pi0, &z).unwrap();
        let diff = q.sub(&p).unwrap();
        prop_assert!(is_degenerate(&diff, &maps[..1]).unwrap().is_degenerate);
        let a = DegeneracyAnalyzer::new(p.num_vars(), &pis(&maps), p.degree().max(q.degree())).unwrap();
        prop_assert_eq!(a.nd_norm_squared(&p).unwrap(), a.nd_norm_squared(&q).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn derived_maps_factor_through_the_split_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = 4;
        let maps: Vec<(String, Mat)> =
            (0..3).map(|j| (format!("p{j}"), surjection(&mut rng, 2, m))).collect();
        let s = Snarl::from_maps(&maps).unwrap();
        let r = resolve(&s, seed).unwrap();
        let st = &r.steps[0];
        let (pn, pn1) = derived_projections(st, &maps).unwrap();
        let w = &st.witness;
        prop_assert_eq!(&kernel(&pn), st.child.get(&w.beta2).unwrap());
        prop_assert_eq!(&kernel(&pn1), st.child.get(&w.beta1).unwrap());
        let pi0 = &maps.iter().find(|x| x.0 == w.alpha0).unwrap().1;
        prop_assert!(pi0.solve_left(&pn).is_some());
        prop_assert!(pi0.solve_left(&pn1).is_some());
    }
}

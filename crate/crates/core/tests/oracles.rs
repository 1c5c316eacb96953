//! Independent brute-force checks against the library's fast paths.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use realforms::search::{canonical_systems, enumerate_systems};
use realforms::{
    are_isomorphic, canonical_form, classify_coxeter_matrix, CoxeterClass, CoxeterMatrix,
    FiniteFamily, SwellingSystem, Witness,
};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Literal minimum over every label bijection, every ordering of the
/// contours (descending length) and every rotation.
fn brute_force_key(sys: &SwellingSystem) -> Vec<u32> {
    let n = sys.n();
    let k = sys.k();
    let mut best: Option<Vec<u32>> = None;
    for relabel in permutations(n) {
        for order in permutations(k) {
            let lens: Vec<usize> = order.iter().map(|&i| sys.contours()[i].len()).collect();
            if lens.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            let mut rotations = vec![0usize; k];
            loop {
                let mut words = vec![n as u32, k as u32];
                words.extend(lens.iter().map(|&m| m as u32));
                for (slot, &ci) in order.iter().enumerate() {
                    let c = &sys.contours()[ci];
                    for j in 0..c.len() {
                        words.push(
                            relabel[c[(j + rotations[slot]) % c.len()] as usize - 1] as u32 + 1,
                        );
                    }
                }
                if best.as_ref().is_none_or(|b| words < *b) {
                    best = Some(words);
                }
                // odometer over rotations
                let mut slot = 0;
                loop {
                    if slot == k {
                        break;
                    }
                    rotations[slot] += 1;
                    if rotations[slot] < lens[slot] {
                        break;
                    }
                    rotations[slot] = 0;
                    slot += 1;
                }
                if slot == k {
                    break;
                }
            }
        }
    }
    best.unwrap()
}

fn key_words(sys: &SwellingSystem) -> Vec<u32> {
    canonical_form(sys)
        .unwrap()
        .as_bytes()
        .chunks_exact(4)
        .map(|w| u32::from_be_bytes([w[0], w[1], w[2], w[3]]))
        .collect()
}

fn random_system(rng: &mut StdRng, max_n: usize, max_k: usize, max_m: usize) -> SwellingSystem {
    loop {
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(1..=max_k);
        let contours: Vec<Vec<u32>> = (0..k)
            .map(|_| {
                let m = rng.gen_range(1..=max_m);
                (0..m).map(|_| rng.gen_range(1..=n as u32)).collect()
            })
            .collect();
        let sys = SwellingSystem::new(n, contours);
        if sys.is_valid() {
            return sys;
        }
    }
}

fn random_witness(rng: &mut StdRng, sys: &SwellingSystem) -> Witness {
    // contours may only move between equal lengths
    let k = sys.k();
    let mut contour_map: Vec<usize> = (0..k).collect();
    for _ in 0..k * 2 {
        let (a, b) = (rng.gen_range(0..k), rng.gen_range(0..k));
        if sys.contours()[a].len() == sys.contours()[b].len() {
            contour_map.swap(a, b);
        }
    }
    let shifts = sys
        .contours()
        .iter()
        .map(|c| rng.gen_range(0..c.len()))
        .collect();
    let mut label_map: Vec<u32> = (1..=sys.n() as u32).collect();
    label_map.shuffle(rng);
    Witness {
        contour_map,
        shifts,
        label_map,
    }
}

#[test]
fn fast_key_equals_brute_force_minimum() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..400 {
        let sys = random_system(&mut rng, 4, 3, 5);
        assert_eq!(key_words(&sys), brute_force_key(&sys), "{sys}");
    }
}

#[test]
fn thousand_random_orbit_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = random_system(&mut rng, 5, 3, 6);
        let w = random_witness(&mut rng, &a);
        let b = w.apply(&a).unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        let found = are_isomorphic(&a, &b).unwrap().expect("isomorphic");
        assert_eq!(found.apply(&a).unwrap(), b);
    }
}

#[test]
fn hexagon_orbit_is_exhaustively_one_class() {
    // Every relabeling and rotation of [1,2,1,2,1,3] has the same key, and
    // [3,1,3,1,3,2] is one of them.
    let a = SwellingSystem::new(3, vec![vec![1, 2, 1, 2, 1, 3]]);
    let mut orbit = BTreeSet::new();
    for relabel in permutations(3) {
        for rot in 0..6 {
            let c: Vec<u32> = (0..6)
                .map(|j| relabel[a.contours()[0][(j + rot) % 6] as usize - 1] as u32 + 1)
                .collect();
            let b = SwellingSystem::new(3, vec![c.clone()]);
            assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
            orbit.insert(c);
        }
    }
    assert!(orbit.contains(&vec![3, 1, 3, 1, 3, 2]));
}

#[test]
fn isomorphism_is_an_equivalence_on_a_family() {
    // All valid labelings (not just representatives) of small systems.
    let mut raw = Vec::new();
    for m in 2..=5usize {
        let total = 3usize.pow(m as u32);
        for code in 0..total {
            let c: Vec<u32> = (0..m)
                .map(|j| (code / 3usize.pow(j as u32) % 3) as u32 + 1)
                .collect();
            let s = SwellingSystem::new(3, vec![c]);
            if s.is_valid() {
                raw.push(s);
            }
        }
    }
    let iso = |a: &SwellingSystem, b: &SwellingSystem| are_isomorphic(a, b).unwrap().is_some();
    for a in &raw {
        assert!(iso(a, a));
        for b in &raw {
            let ab = iso(a, b);
            assert_eq!(ab, iso(b, a));
            assert_eq!(ab, canonical_form(a).unwrap() == canonical_form(b).unwrap());
        }
    }
    // transitivity through the class partition: keys partition raw exactly
    let classes: HashSet<_> = raw.iter().map(|s| canonical_form(s).unwrap()).collect();
    let reps = enumerate_systems(3, 1, 5).unwrap();
    assert_eq!(classes.len(), reps.len());
}

#[test]
fn enumeration_matches_brute_force_class_count() {
    // Count classes by brute-force keys over every raw labeling.
    for (n, max_m) in [(2usize, 6usize), (3, 8), (4, 6)] {
        let mut keys = BTreeSet::new();
        for m in 1..=max_m {
            let total = n.pow(m as u32);
            for code in 0..total {
                let c: Vec<u32> = (0..m)
                    .map(|j| (code / n.pow(j as u32) % n) as u32 + 1)
                    .collect();
                let s = SwellingSystem::new(n, vec![c]);
                if s.is_valid() {
                    keys.insert(brute_force_key(&s));
                }
            }
        }
        let reps = enumerate_systems(n, 1, max_m).unwrap();
        assert_eq!(reps.len(), keys.len(), "n = {n}, m <= {max_m}");
    }
}

#[test]
fn two_contour_enumeration_matches_brute_force() {
    let n: usize = 3;
    let mut keys = BTreeSet::new();
    let mut singles = Vec::new();
    for m in 1..=5usize {
        for code in 0..n.pow(m as u32) {
            let c: Vec<u32> = (0..m)
                .map(|j| (code / n.pow(j as u32) % n) as u32 + 1)
                .collect();
            singles.push(c);
        }
    }
    for a in &singles {
        for b in &singles {
            if a.len() + b.len() > 6 {
                continue;
            }
            let s = SwellingSystem::new(n, vec![a.clone(), b.clone()]);
            if s.is_valid() {
                keys.insert(brute_force_key(&s));
            }
        }
    }
    let reps: Vec<_> = enumerate_systems(n, 2, 6)
        .unwrap()
        .into_iter()
        .filter(|s| s.k() == 2)
        .collect();
    assert_eq!(reps.len(), keys.len());
}

#[test]
fn n3_single_contour_class_count_fixture() {
    let per_length: Vec<usize> = (1..=8).map(|m| canonical_systems(3, &[m]).len()).collect();
    assert_eq!(per_length, vec![0, 0, 1, 1, 1, 3, 3, 7]);
    assert_eq!(enumerate_systems(3, 1, 8).unwrap().len(), 16);
}

#[test]
fn n4_single_contour_max_h_fixture() {
    let r = realforms::max_h(realforms::EnumerationBounds::new(4, 1, 8, 0)).unwrap();
    assert_eq!(r.models_checked, 50);
    assert_eq!(r.overall, 8);
    assert_eq!(r.overall, r.f_bound);
    assert!(r.violations.is_empty());
    let per_genus: Vec<(u64, i64)> = r.per_genus.iter().map(|(g, m)| (*g, m.h)).collect();
    assert_eq!(per_genus, vec![(1, 6), (3, 6), (5, 8), (7, 6), (9, 8)]);
    assert_eq!(
        r.per_genus[&5].witness.system().contours(),
        [vec![1, 2, 1, 3, 1, 4]]
    );
}

fn count_rejected_non_orbit_pairs(rng: &mut StdRng) -> usize {
    let mut rejected = 0;
    while rejected < 1000 {
        let a = random_system(rng, 4, 2, 5);
        let b = random_system(rng, 4, 2, 5);
        let differs = {
            let mut ma = a.multiplicities();
            let mut mb = b.multiplicities();
            ma.sort();
            mb.sort();
            ma != mb || a.n() != b.n() || brute_force_key(&a) != brute_force_key(&b)
        };
        if !differs {
            continue;
        }
        assert!(are_isomorphic(&a, &b).unwrap().is_none(), "{a} vs {b}");
        assert_ne!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        rejected += 1;
    }
    rejected
}

#[test]
fn thousand_random_non_orbit_pairs() {
    let mut rng = StdRng::seed_from_u64(13);
    assert_eq!(count_rejected_non_orbit_pairs(&mut rng), 1000);
}

fn arb_system() -> impl Strategy<Value = SwellingSystem> {
    (1usize..=5)
        .prop_flat_map(|n| {
            let contour = prop::collection::vec(1..=n as u32, 1..=6);
            (Just(n), prop::collection::vec(contour, 1..=3))
        })
        .prop_map(|(n, contours)| SwellingSystem::new(n, contours))
        .prop_filter("valid", SwellingSystem::is_valid)
}

proptest! {
    #[test]
    fn key_constant_on_orbits(sys in arb_system(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let w = random_witness(&mut rng, &sys);
        let image = w.apply(&sys).unwrap();
        prop_assert_eq!(canonical_form(&sys).unwrap(), canonical_form(&image).unwrap());
    }

    #[test]
    fn representative_is_a_fixed_point(sys in arb_system()) {
        let key = canonical_form(&sys).unwrap();
        let rep = key.representative();
        prop_assert_eq!(canonical_form(&rep).unwrap(), key.clone());
        let w = are_isomorphic(&sys, &rep).unwrap().unwrap();
        prop_assert_eq!(w.apply(&sys).unwrap(), rep);
    }

    #[test]
    fn classification_ignores_relabeling(
        entries in prop::collection::vec(prop::sample::select(vec![2u32, 2, 2, 3, 3, 4, 5, 6, 0]), 10),
        seed in any::<u64>(),
    ) {
        let n = 5;
        let mut rows = vec![vec![1u32; n]; n];
        let mut it = entries.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let refs: Vec<&[u32]> = rows.iter().map(Vec::as_slice).collect();
        let m = CoxeterMatrix::from_integers(&refs).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut StdRng::seed_from_u64(seed));
        let p = m.permuted(&perm);
        prop_assert_eq!(m.classify().families(), p.classify().families());
    }
}

/// Group order by breadth-first closure of integer matrices, capped.
fn closure_size(gens: &[Vec<Vec<i64>>], cap: usize) -> usize {
    let dim = gens[0].len();
    let id: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([id.clone()]);
    seen.insert(id);
    while let Some(x) = queue.pop_front() {
        if seen.len() > cap {
            return seen.len();
        }
        for g in gens {
            let y: Vec<Vec<i64>> = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| (0..dim).map(|t| x[i][t] * g[t][j]).sum())
                        .collect()
                })
                .collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// Reflections of the geometric representation for labels in {2, 3}, scaled
/// so that every entry is an integer.
fn simply_laced_reflections(m: &CoxeterMatrix) -> Vec<Vec<Vec<i64>>> {
    let n = m.size();
    let a = |i: usize, j: usize| -> i64 {
        match m.get(i, j) {
            realforms::Order::Finite(1) => 2,
            realforms::Order::Finite(2) => 0,
            realforms::Order::Finite(3) => -1,
            other => panic!("not simply laced: {other}"),
        }
    };
    (0..n)
        .map(|s| {
            // σ_s(e_j) = e_j − a(s,j) e_s; row-vector convention
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|t| i64::from(t == j) - if t == s { a(s, j) } else { 0 })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn dihedral_order(m: u32) -> usize {
    // reflections of a regular m-gon acting on vertex indices
    let m = m as usize;
    let s1: Vec<usize> = (0..m).map(|v| (m - v) % m).collect();
    let s2: Vec<usize> = (0..m).map(|v| (m + 1 - v) % m).collect();
    let mut seen = HashSet::new();
    let id: Vec<usize> = (0..m).collect();
    let mut queue = VecDeque::from([id.clone()]);
    seen.insert(id);
    while let Some(x) = queue.pop_front() {
        for g in [&s1, &s2] {
            let y: Vec<usize> = x.iter().map(|&v| g[v]).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

#[test]
fn rank_two_classification_agrees_with_group_order() {
    for m in 3..=12u32 {
        let mat = CoxeterMatrix::from_integers(&[&[1, m], &[m, 1]]).unwrap();
        let CoxeterClass::Finite(cs) = classify_coxeter_matrix(&mat) else {
            panic!("finite dihedral");
        };
        assert_eq!(cs.len(), 1);
        assert_eq!(dihedral_order(m), 2 * m as usize);
        match cs[0].family {
            FiniteFamily::A(2) => assert_eq!(m, 3),
            FiniteFamily::B(2) => assert_eq!(m, 4),
            FiniteFamily::I2(k) => assert_eq!(k, m),
            other => panic!("unexpected {other}"),
        }
    }
}

#[test]
fn simply_laced_orders_by_closure() {
    let a3 = CoxeterMatrix::from_integers(&[&[1, 3, 2], &[3, 1, 3], &[2, 3, 1]]).unwrap();
    assert!(a3.classify().is_finite());
    assert_eq!(closure_size(&simply_laced_reflections(&a3), 10_000), 24);

    let d4 =
        CoxeterMatrix::from_integers(&[&[1, 3, 3, 3], &[3, 1, 2, 2], &[3, 2, 1, 2], &[3, 2, 2, 1]])
            .unwrap();
    assert_eq!(d4.classify().families(), Some(vec![FiniteFamily::D(4)]));
    assert_eq!(closure_size(&simply_laced_reflections(&d4), 10_000), 192);

    // Triangle of 3s: growth passes any finite bound we set.
    let affine = CoxeterMatrix::from_integers(&[&[1, 3, 3], &[3, 1, 3], &[3, 3, 1]]).unwrap();
    assert_eq!(affine.classify(), CoxeterClass::NotFinite);
    assert!(closure_size(&simply_laced_reflections(&affine), 5_000) > 5_000);
}

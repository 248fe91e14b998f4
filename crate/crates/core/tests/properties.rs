use lorentzian_core::cov2::{
    search_2cov_feasible, synth_strong_from_parts, synth_strong_matroid, verify_strong2cov, StrongPart,
};
use lorentzian_core::entropy::{mmi, JointDistribution};
use lorentzian_core::lc::{certify_clc_homogeneous, inertia, Inertia, Verdict};
use lorentzian_core::matroid::{Matroid, TableMode};
use lorentzian_core::rational::int;
use lorentzian_core::setfn::{
    contract, homogeneous_restrict, mobius_coverage_weights, predicates, CoverageInstance, CoverageWeights, SetFunction,
};
use lorentzian_core::subset::subsets_of_size;
use lorentzian_core::{Rational, SetFunctionTable, Subset, SymMatrix};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn sym_matrix(n: usize, entries: &[i64]) -> SymMatrix {
    let mut k = 0;
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, int(entries[k]));
            m.set(j, i, int(entries[k]));
            k += 1;
        }
    }
    m
}

fn sym_strategy(max_n: usize, range: i64) -> impl Strategy<Value = SymMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-range..=range, n * (n + 1) / 2).prop_map(move |e| sym_matrix(n, &e))
    })
}

/// `L · U · Π` with unit-triangular factors, hence invertible.
fn invertible(n: usize, lower: &[i64], upper: &[i64], shift: usize) -> Vec<Vec<Rational>> {
    let mut l = vec![vec![int(0); n]; n];
    let mut u = vec![vec![int(0); n]; n];
    let mut k = 0;
    for i in 0..n {
        l[i][i] = int(1);
        u[i][i] = int(1);
        for j in 0..i {
            l[i][j] = int(lower[k]);
            u[j][i] = int(upper[k]);
            k += 1;
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let col = (j + shift) % n;
                    (0..n).map(|t| &l[i][t] * &u[t][col]).sum()
                })
                .collect()
        })
        .collect()
}

/// Characteristic polynomial by Faddeev-LeVerrier, coefficients of
/// `λ^n, λ^{n-1}, …, 1`.
fn char_poly(a: &SymMatrix) -> Vec<Rational> {
    let n = a.dim();
    let rows: Vec<Vec<Rational>> = a.rows().map(<[Rational]>::to_vec).collect();
    let mul = |x: &Vec<Vec<Rational>>, y: &Vec<Vec<Rational>>| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|t| &x[i][t] * &y[t][j]).sum()).collect())
            .collect()
    };
    let mut coeffs = vec![int(1)];
    let mut m = vec![vec![int(0); n]; n];
    for k in 1..=n {
        let mut next = mul(&rows, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - 1];
        }
        m = next;
        let am = mul(&rows, &m);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs.push(-trace / int(k as i64));
    }
    coeffs
}

fn sign_changes(c: &[Rational]) -> usize {
    let signs: Vec<bool> = c.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Exact inertia of a real-rooted polynomial by Descartes' rule.
fn descartes_inertia(a: &SymMatrix) -> Inertia {
    let c = char_poly(a);
    let n = a.dim();
    let n_zero = c.iter().rev().take_while(|x| x.is_zero()).count();
    let n_pos = sign_changes(&c);
    let reflected: Vec<Rational> = c
        .iter()
        .enumerate()
        .map(|(k, x)| if (n - k) % 2 == 1 { -x } else { x.clone() })
        .collect();
    Inertia {
        n_pos,
        n_zero,
        n_neg: sign_changes(&reflected),
    }
}

fn coverage_strategy(max_n: usize) -> impl Strategy<Value = CoverageInstance> {
    (1..=max_n, 1usize..=5).prop_flat_map(|(n, u)| {
        (
            prop::collection::vec(0i64..=3, u),
            prop::collection::vec(prop::collection::vec(any::<bool>(), u), n),
        )
            .prop_map(|(w, member)| {
                let sets = member
                    .iter()
                    .map(|m| (0..m.len()).filter(|&k| m[k]).collect())
                    .collect();
                CoverageInstance::from_indices(w.into_iter().map(int).collect(), sets).unwrap()
            })
    })
}

fn partition_strategy(max_n: usize) -> impl Strategy<Value = Matroid> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0usize..3, n),
            prop::collection::vec(1usize..=3, 3),
        )
            .prop_map(move |(block, caps)| {
                let blocks: Vec<Subset> = (0..3)
                    .map(|b| Subset::from_indices((0..n).filter(|&i| block[i] == b)))
                    .collect();
                let (blocks, caps): (Vec<_>, Vec<_>) =
                    blocks.into_iter().zip(caps).filter(|(b, _)| !b.is_empty()).unzip();
                Matroid::partition(n, blocks, caps).unwrap()
            })
    })
}

fn joint_strategy(max_n: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(2usize..=3, 1..=max_n).prop_flat_map(|alphabets| {
        let size: usize = alphabets.iter().product();
        prop::collection::vec(0u32..5, size).prop_filter_map("nonzero mass", move |raw| {
            let total: u32 = raw.iter().sum();
            (total > 0).then(|| {
                let mut pmf = Vec::new();
                for (idx, &r) in raw.iter().enumerate() {
                    if r == 0 {
                        continue;
                    }
                    let mut rest = idx;
                    let outcome = alphabets
                        .iter()
                        .map(|&k| {
                            let v = rest % k;
                            rest /= k;
                            v
                        })
                        .collect();
                    pmf.push((outcome, r as f64 / total as f64));
                }
                JointDistribution::new(alphabets.clone(), pmf).unwrap()
            })
        })
    })
}

fn support(f: &SetFunctionTable, d: usize) -> Vec<Subset> {
    subsets_of_size(f.ground(), d)
        .into_iter()
        .filter(|s| !f.get(*s).is_zero())
        .collect()
}

fn basis_exchange_holds(bases: &[Subset]) -> bool {
    bases.iter().all(|&b1| {
        bases.iter().all(|&b2| {
            b1.difference(b2)
                .iter()
                .all(|i| b2.difference(b1).iter().any(|j| bases.contains(&b1.without(i).with(j))))
        })
    })
}

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn inertia_is_congruence_invariant(
        (a, lower, upper, shift) in sym_strategy(8, 4).prop_flat_map(|a| {
            let n = a.dim();
            let m = n * (n - 1) / 2;
            (Just(a), prop::collection::vec(-2i64..=2, m), prop::collection::vec(-2i64..=2, m), 0..n)
        })
    ) {
        let p = invertible(a.dim(), &lower, &upper, shift);
        let b = a.congruence(&p).unwrap();
        prop_assert_eq!(inertia(&a).unwrap(), inertia(&b).unwrap());
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn inertia_matches_descartes(a in sym_strategy(7, 3)) {
        prop_assert_eq!(inertia(&a).unwrap(), descartes_inertia(&a));
    }

    #[test]
    fn inertia_matches_float_eigenvalues(a in sym_strategy(8, 5)) {
        let n = a.dim();
        let rows: Vec<f64> = a.rows().flatten().map(lorentzian_core::rational::to_f64).collect();
        let eig = nalgebra::DMatrix::from_row_slice(n, n, &rows).symmetric_eigen().eigenvalues;
        // Only compare when no eigenvalue sits in the ambiguous band.
        prop_assume!(eig.iter().all(|x| x.abs() < 1e-9 || x.abs() > 1e-6));
        let got = inertia(&a).unwrap();
        let pos = eig.iter().filter(|x| **x > 1e-6).count();
        let neg = eig.iter().filter(|x| **x < -1e-6).count();
        prop_assert_eq!((got.n_pos, got.n_neg, got.n_zero), (pos, neg, n - pos - neg));
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn certification_is_closed_under_derivatives(g in coverage_strategy(7), d in 3usize..=5) {
        let f = g.materialize().unwrap();
        prop_assume!(d < f.n());
        let report = certify_clc_homogeneous(&f, d).unwrap();
        prop_assume!(report.verdict == Verdict::Certified);
        for i in 0..f.n() {
            let c = contract(&homogeneous_restrict(&f, d), Subset::singleton(i)).unwrap();
            let v = certify_clc_homogeneous(&c.table, d - 1).unwrap().verdict;
            prop_assert!(matches!(v, Verdict::Certified | Verdict::Vacuous), "derivative {} gave {:?}", i, v);
        }
    }

    #[test]
    fn certified_matroid_supports_exchange(m in partition_strategy(10)) {
        let f = m.to_setfunction(TableMode::Indicator).unwrap();
        let d = m.full_rank();
        prop_assume!(d >= 2);
        prop_assert_eq!(certify_clc_homogeneous(&f, d).unwrap().verdict, Verdict::Certified);
        prop_assert!(basis_exchange_holds(&support(&f, d)));
    }

    #[test]
    fn certified_coverage_supports_exchange(g in coverage_strategy(6), d in 2usize..=4) {
        let f = g.materialize().unwrap();
        prop_assume!(d <= f.n());
        if certify_clc_homogeneous(&f, d).unwrap().verdict == Verdict::Certified {
            prop_assert!(basis_exchange_holds(&support(&f, d)));
        }
    }

    #[test]
    fn strong_certificates_imply_monotone_submodular(
        g in coverage_strategy(6),
        m in partition_strategy(6),
        a in 0i64..4,
        b in 0i64..4,
    ) {
        let rank = m.to_setfunction(TableMode::Rank).unwrap();
        prop_assume!(rank.n() == g.n());
        let cert = synth_strong_matroid(&m).unwrap();
        let parts = [
            StrongPart::Certified { f: &rank, cert: &cert, coeff: int(a) },
            StrongPart::Coverage { instance: &g, coeff: int(b) },
        ];
        let (f, combined) = synth_strong_from_parts(&parts).unwrap();
        prop_assert!(verify_strong2cov(&f, &combined).unwrap().holds);
        let p = predicates(&f);
        prop_assert!(p.monotone.holds && p.submodular.holds);
    }

    #[test]
    fn strong_implies_two_coverage(g in coverage_strategy(5), d in 2usize..=5) {
        let f = g.materialize().unwrap();
        prop_assume!(d <= f.n());
        for tau in lorentzian_core::subset::subsets_up_to(f.ground(), d - 2) {
            if tau.len() == d - 2 {
                prop_assert!(search_2cov_feasible(&f, d, tau).unwrap().is_feasible(), "tau {}", tau);
            }
        }
    }

    #[test]
    fn mobius_round_trip(n in 1usize..=8, raw in prop::collection::vec((1u32..256, 0i64..5, 1i64..4), 0..12)) {
        let mut x = CoverageWeights::new(n);
        for (mask, p, q) in raw {
            let t = Subset(mask & ((1 << n) - 1));
            if !t.is_empty() && p > 0 {
                x.insert(t, Rational::new(p.into(), q.into()));
            }
        }
        let f = x.materialize().unwrap();
        let back = mobius_coverage_weights(&f).unwrap();
        prop_assert!(back.is_coverage);
        prop_assert_eq!(back.weights.weights, x.weights);
    }

    #[test]
    fn mmi_is_order_invariant(j in joint_strategy(4), perm_seed in any::<u64>(), mask in 1u32..16, cmask in 0u32..16) {
        let n = j.n();
        let t = Subset(mask & ((1 << n) - 1));
        prop_assume!(!t.is_empty());
        let c = Subset(cmask & ((1 << n) - 1)).difference(t);
        let vars: Vec<usize> = t.iter().collect();
        let mut shuffled = vars.clone();
        let k = shuffled.len();
        shuffled.rotate_left((perm_seed as usize) % k);
        if k > 1 && perm_seed & 1 == 1 {
            shuffled.swap(0, k - 1);
        }
        let a = mmi(&j, &vars, c).unwrap();
        let b = mmi(&j, &shuffled, c).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
    }
}

#[test]
fn char_poly_oracle_on_known_matrix() {
    // Hessian of 3x1x2 + x1x3 + x2x3: eigenvalues 4 and two negatives.
    let h = sym_matrix(3, &[0, 3, 1, 0, 1, 0]);
    assert_eq!(char_poly(&h), vec![int(1), int(0), int(-11), int(-6)]);
    assert_eq!(
        descartes_inertia(&h),
        Inertia {
            n_pos: 1,
            n_zero: 0,
            n_neg: 2
        }
    );
}

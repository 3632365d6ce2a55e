mod common;

use proptest::prelude::*;
use qid_core::attacks::{make_attack, AttackSpec};
use qid_core::complexity::{
    cumulative_projector, expectation_identity_check, low_complexity_count, program_projector, proxy_complexity,
    StructuredProjector,
};
use qid_core::linalg::{operator_norm, ComplexMatrix};
use qid_core::protocol::{Message, ProtocolInstance, Side, ThetaLayout};
use qid_core::random::{random_density, random_orthonormal, seeded_rng};
use qid_core::state::Projector;
use qid_core::tolerance::{DECISION, Tolerances};
use qid_core::tradeoff::{
    analyze_side, cross_norm_bound, entropy, landau_pollak_check, mutual_information, no_cloning_check,
    verify_attack, verify_tradeoff, VerifyOptions,
};
use rand::Rng;

fn instance(spec: &AttackSpec, n: usize) -> ProtocolInstance {
    ProtocolInstance::new(n, make_attack(spec, n).unwrap()).unwrap()
}

#[test]
fn catalogue_invariants_for_every_attack() {
    for spec in AttackSpec::library() {
        for n in 1..=4 {
            let inst = instance(&spec, n);
            for side in [Side::B, Side::E] {
                let a = analyze_side(&inst, side, DECISION).unwrap();
                let cat = &a.catalogue;
                assert!(cat.is_prefix_free(), "{spec:?} n={n} {side}");
                assert!(cat.kraft_sum() <= 1.0 + 1e-15);
                let mut seen = vec![false; 1 << n];
                for e in cat.entries() {
                    assert!(e.class.len() >= 2);
                    for m in &e.class.members {
                        assert!(!seen[m.index()]);
                        seen[m.index()] = true;
                    }
                    let v = e.class.pvm_violations(inst.theorem_states(side)).unwrap();
                    assert!(v.reconstruction <= 1e-7, "{spec:?} {v:?}");
                    assert!(v.orthogonality <= 1e-9 && v.subnormalization <= 1e-9);
                }
                assert!(a.profile.lengths.iter().all(|&l| (1..=n + 1).contains(&l)));
                assert_eq!(low_complexity_count(&a.profile, n + 1), 1 << n);
            }
        }
    }
}

#[test]
fn documented_profiles() {
    for n in 1..=3 {
        let id = analyze_side(&instance(&AttackSpec::Identity, n), Side::B, DECISION).unwrap();
        assert_eq!(id.catalogue.entries().len(), 1);
        assert_eq!(id.catalogue.entries()[0].codeword, "0");
        assert!(id.profile.lengths.iter().all(|&l| l == 1));
        assert_eq!(low_complexity_count(&id.profile, 0), 0);
        assert_eq!(low_complexity_count(&id.profile, 1), 1 << n);

        let mx = analyze_side(&instance(&AttackSpec::MeasureX, n), Side::B, DECISION).unwrap();
        assert!(mx.catalogue.entries().is_empty());
        assert_eq!(low_complexity_count(&mx.profile, n), 0);
        assert_eq!(low_complexity_count(&mx.profile, n + 1), 1 << n);

        let cnot = analyze_side(&instance(&AttackSpec::CnotProbe, n), Side::E, DECISION).unwrap();
        assert!(cnot.profile.lengths.iter().all(|&l| l == n + 1));
    }
}

#[test]
fn dense_program_projectors_are_projectors() {
    let inst = instance(&AttackSpec::Identity, 1);
    let a = analyze_side(&inst, Side::B, DECISION).unwrap();
    let p = program_projector(&a.catalogue, 0, &inst.layout()).unwrap();
    let d = p.to_dense().unwrap();
    assert_eq!(d.rows(), 8);
    assert!(d.matmul(&d).unwrap().max_abs_diff(&d).unwrap() < 1e-12);
    assert!(d.hermitian_violation() < 1e-15);
    assert!((d.trace().re - p.trace() as f64).abs() < 1e-12);
    assert!(program_projector(&a.catalogue, 1, &inst.layout()).is_err());
    let zero = cumulative_projector(&a.catalogue, 0, &inst.layout());
    assert!(zero.blocks.is_empty());
    assert_eq!(cumulative_projector(&a.catalogue, 1, &inst.layout()), p);
    let big = instance(&AttackSpec::Identity, 3);
    let ab = analyze_side(&big, Side::B, DECISION).unwrap();
    let pb = program_projector(&ab.catalogue, 0, &big.layout()).unwrap();
    assert!(matches!(pb.to_dense(), Err(qid_core::Error::Capacity(_))));
}

#[test]
fn split_channel_has_orthogonal_program_projectors() {
    let inst = ProtocolInstance::new(2, common::split_channel()).unwrap();
    let layout = inst.layout();
    for side in [Side::B, Side::E] {
        let a = analyze_side(&inst, side, DECISION).unwrap();
        assert_eq!(a.catalogue.entries().len(), 2, "{side}");
        let words: Vec<&str> = a.catalogue.entries().iter().map(|e| e.codeword.as_str()).collect();
        assert_eq!(words, ["00", "01"]);
        let p0 = program_projector(&a.catalogue, 0, &layout).unwrap().to_dense().unwrap();
        let p1 = program_projector(&a.catalogue, 1, &layout).unwrap().to_dense().unwrap();
        assert!(p0.matmul(&p1).unwrap().max_abs() < 1e-12);
        let full = cumulative_projector(&a.catalogue, 2, &layout).to_dense().unwrap();
        assert!(full.matmul(&full).unwrap().max_abs_diff(&full).unwrap() < 1e-12);
    }
    let report = verify_tradeoff(&inst, &AttackSpec::Identity, &VerifyOptions::default()).unwrap();
    let cross = report.cross_norms.unwrap();
    assert_eq!(cross.pairs, 4);
    assert!(cross.holds && cross.max_norm > 0.0, "{cross:?}");
    assert!(report.lp_records.iter().all(|r| r.holds));
}

#[test]
fn expectation_identity_examples() {
    let id = instance(&AttackSpec::Identity, 1);
    let cat = analyze_side(&id, Side::B, DECISION).unwrap().catalogue;
    let c = expectation_identity_check(&id, &cat, 1).unwrap();
    assert!((c.structured - 1.0).abs() < 1e-12 && (c.dense.unwrap() - 1.0).abs() < 1e-12 && c.agree);

    let mx = instance(&AttackSpec::MeasureX, 2);
    let cat = analyze_side(&mx, Side::B, DECISION).unwrap().catalogue;
    for l in 0..=2 {
        let c = expectation_identity_check(&mx, &cat, l).unwrap();
        assert_eq!(c.rhs, 0.0);
        assert!(c.structured.abs() < 1e-12 && c.agree);
    }

    let cnot = instance(&AttackSpec::CnotProbe, 2);
    let cat = analyze_side(&cnot, Side::B, DECISION).unwrap().catalogue;
    let c = expectation_identity_check(&cnot, &cat, 1).unwrap();
    assert!((c.rhs - 1.0).abs() < 1e-15 && c.agree);
}

#[test]
fn documented_grid_values() {
    let opts = VerifyOptions::default();
    let r = verify_attack(&AttackSpec::MeasureX, 3, &opts).unwrap();
    for g in &r.grid {
        if g.l <= 3 {
            assert_eq!(g.count_b, 0);
        }
        if g.m == 1 {
            assert_eq!(g.count_e, 8);
        }
    }
    assert!(r.all_hold());

    let r = verify_attack(&AttackSpec::Identity, 2, &opts).unwrap();
    assert!(r.grid.iter().filter(|g| g.l == 1).all(|g| g.count_b == 4));
    assert!(r.grid.iter().filter(|g| g.m <= 2).all(|g| g.count_e == 0));
    assert!(r.all_hold());

    let r = verify_attack(&AttackSpec::UniversalCloner, 1, &opts).unwrap();
    let g = r.grid.iter().find(|g| g.l == 2 && g.m == 2).unwrap();
    assert_eq!((g.count_b, g.count_e, g.bound), (2, 2, 18.0));
    assert!(r.grid.iter().filter(|g| g.l < 2).all(|g| g.count_b == 0));
}

#[test]
fn csv_has_one_row_per_grid_point() {
    let r = verify_attack(&AttackSpec::CnotProbe, 2, &VerifyOptions::default()).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,attack,l,m,count_B,count_E,bound,holds");
    assert_eq!(lines.count(), 16);
}

#[test]
fn no_cloning_at_four() {
    let r = no_cloning_check(4, 0, &Tolerances::default()).unwrap();
    assert!(r.holds);
    assert!(r.cloner_both_literal);
    assert_eq!(r.threshold, 1);
    // a perfect cloner would need 2 >= n - 3 - 2c, so it only contradicts
    // once the threshold passes 2
    assert!(!r.perfect_cloner_contradicts);
    let loose = no_cloning_check(4, -1, &Tolerances::default()).unwrap();
    assert_eq!(loose.threshold, 3);
    assert!(loose.perfect_cloner_contradicts);
    let cnot = r.attacks.iter().find(|a| a.attack == AttackSpec::CnotProbe).unwrap();
    assert_eq!((cnot.max_b, cnot.max_e), (1, 5));
}

/// Random sub-PVM split over a random subset of messages.
fn random_structured(rng: &mut impl Rng, side: Side, layout: &ThetaLayout) -> StructuredProjector {
    let n = layout.n;
    let dims = layout.side_dims(side).to_vec();
    let d: usize = dims.iter().product();
    let basis = random_orthonormal(rng, d, d);
    let mut per_msg: Vec<Vec<Vec<qid_core::C64>>> = vec![Vec::new(); 1 << n];
    for v in basis {
        // some vectors are dropped so the family is a proper sub-PVM
        let slot = rng.random_range(0..(1usize << n) + 1);
        if slot < 1 << n {
            per_msg[slot].push(v);
        }
    }
    let blocks = per_msg
        .into_iter()
        .enumerate()
        .filter(|(_, vs)| !vs.is_empty() && rng.random_bool(0.8))
        .map(|(i, vs)| (Message::new(i, n).unwrap(), Projector::from_orthonormal(&vs, dims.clone()).unwrap()))
        .collect();
    StructuredProjector { side, layout: layout.clone(), blocks }
}

fn joint_table(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() }).collect())
        .collect();
    let total: f64 = raw.iter().flatten().sum();
    if total == 0.0 {
        let mut t = vec![vec![0.0; cols]; rows];
        t[0][0] = 1.0;
        return t;
    }
    raw.into_iter().map(|r| r.into_iter().map(|p| p / total).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cross_norm_bound_for_random_decoders(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = seeded_rng(seed);
        let layout = ThetaLayout { n, dims_b: vec![2; n], dims_e: vec![2; n] };
        let p = random_structured(&mut rng, Side::B, &layout);
        let q = random_structured(&mut rng, Side::E, &layout);
        let norm = cross_norm_bound(&p, &q).unwrap();
        prop_assert!(norm <= 2f64.powf(-(n as f64) / 2.0) + 1e-9, "norm {norm}");
    }

    #[test]
    fn landau_pollak_on_random_families(seed in any::<u64>(), d in 2usize..=16, k in 1usize..=4) {
        let mut rng = seeded_rng(seed);
        let family: Vec<Projector> = (0..k)
            .map(|_| {
                let rank = rng.random_range(1..=d);
                Projector::new(qid_core::random::random_projector(&mut rng, d, rank), vec![d]).unwrap()
            })
            .collect();
        let rho = qid_core::DensityOperator::new(random_density(&mut rng, d), vec![d]).unwrap();
        let out = landau_pollak_check(&family, &rho).unwrap();
        prop_assert!(out.holds, "{out:?}");
    }

    #[test]
    fn mutual_information_is_bounded(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6) {
        let mut rng = seeded_rng(seed);
        let t = joint_table(&mut rng, rows, cols);
        let i = mutual_information(&t).unwrap();
        let hr = entropy(&t.iter().map(|r| r.iter().sum()).collect::<Vec<f64>>());
        let hc = entropy(&(0..cols).map(|c| t.iter().map(|r| r[c]).sum()).collect::<Vec<f64>>());
        prop_assert!(i >= 0.0);
        prop_assert!(i <= hr.min(hc) + 1e-9);
    }

    #[test]
    fn adding_entries_never_lengthens(seed in any::<u64>()) {
        // Start from measure_x at N = 3 (all literal) and bolt on synthetic
        // entries built from pairs of Eve-distinguishable messages.
        let inst = instance(&AttackSpec::MeasureX, 3);
        let base = analyze_side(&inst, Side::B, DECISION).unwrap().catalogue;
        let before = proxy_complexity(&base);
        let mut rng = seeded_rng(seed);
        let a = rng.random_range(0..4usize) * 2;
        let class = {
            let states = vec![qid_core::DensityOperator::pure(&[qid_core::C64::new(1.0, 0.0), qid_core::C64::new(0.0, 0.0)], vec![2]).unwrap(),
                              qid_core::DensityOperator::pure(&[qid_core::C64::new(0.0, 0.0), qid_core::C64::new(1.0, 0.0)], vec![2]).unwrap()];
            let pvm = qid_core::perfectly_distinguishable(&states, DECISION).unwrap().unwrap();
            qid_core::DistinguishableClass {
                members: vec![Message::new(a, 3).unwrap(), Message::new(a + 1, 3).unwrap()],
                pvm: Some(pvm),
            }
        };
        let len = rng.random_range(2..=6usize);
        let word: String = std::iter::once('0').chain((1..len).map(|_| if rng.random_bool(0.5) { '1' } else { '0' })).collect();
        let ext = base.with_entry(word, class).unwrap();
        prop_assert!(ext.is_prefix_free());
        let after = proxy_complexity(&ext);
        prop_assert!(after.lengths.iter().zip(&before.lengths).all(|(x, y)| x <= y));
    }
}

#[test]
fn overlap_norm_matches_squared_inner_product() {
    use qid_core::linalg::inner;
    use qid_core::protocol::{encode, Basis};
    for n in 1..=3 {
        for x in Message::all(n) {
            for z in Message::all(n) {
                let norm = qid_core::tradeoff::conjugate_overlap_norm(x, z, n).unwrap();
                let ip = inner(&encode(x, Basis::X), &encode(z, Basis::Z)).norm_sqr();
                assert!((norm - ip).abs() < 1e-12);
            }
        }
    }
    let _ = operator_norm(&ComplexMatrix::identity(1));
}

//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any of them failed.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8};
use std::fs;
use std::path::Path;

use qid_core::attacks::{make_attack, natural_povms, AttackSpec};
use qid_core::complexity::{
    cumulative_projector, expectation_identity_check, program_projector, DecoderCatalogue, StructuredProjector,
};
use qid_core::experiment::{random_lp_suite, run_experiment, ExperimentConfig};
use qid_core::linalg::{ComplexMatrix, C64};
use qid_core::protocol::{equivalence_check, global_state_theta, Message, ProtocolInstance, Side};
use qid_core::state::{DensityOperator, Projector};
use qid_core::tolerance::DECISION;
use qid_core::tradeoff::{
    analyze_side, average_versus_counting, conjugate_overlap_norm, cross_norm_bound, landau_pollak_check,
    shannon_tradeoff_check, theorem_bound, tradeoff_bound, verify_attack, VerifyOptions,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn instance(spec: &AttackSpec, n: usize) -> ProtocolInstance {
    ProtocolInstance::new(n, make_attack(spec, n).expect("attack")).expect("instance")
}

fn catalogue(inst: &ProtocolInstance, side: Side) -> DecoderCatalogue {
    analyze_side(inst, side, DECISION).expect("analysis").catalogue
}

fn entry_projectors(inst: &ProtocolInstance, side: Side) -> Vec<StructuredProjector> {
    let cat = catalogue(inst, side);
    (0..cat.entries().len())
        .map(|i| program_projector(&cat, i, &inst.layout()).expect("projector"))
        .collect()
}

/// Every instance at N <= 2 that the Theta-based checks run on: the library
/// attacks plus the split channel, which is the only one with catalogue
/// entries on both sides at once.
fn small_instances() -> Vec<(String, ProtocolInstance)> {
    let mut out = Vec::new();
    for n in 1..=2 {
        for spec in AttackSpec::library() {
            out.push((format!("{} n={n}", spec.slug()), instance(&spec, n)));
        }
    }
    out.push(("split n=2".into(), ProtocolInstance::new(2, common::split_channel()).unwrap()));
    out
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        let target = 0.5f64.powi(n as i32);
        for x in Message::all(n) {
            for z in Message::all(n) {
                let v = conjugate_overlap_norm(x, z, n).map_err(|e| e.to_string())?;
                worst = worst.max((v - target).abs());
            }
        }
    }
    if worst <= 1e-10 {
        Ok(format!("max deviation {worst:.2e} over N = 1..4"))
    } else {
        Err(format!("max deviation {worst:.2e}"))
    }
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        for spec in AttackSpec::library() {
            let r = equivalence_check(&instance(&spec, n), 1e-10).map_err(|e| e.to_string())?;
            if !r.dense || !r.passed {
                return Err(format!("{} n={n}: {r:?}", spec.slug()));
            }
            worst = worst.max(r.max_probability_deviation).max(r.max_state_deviation);
        }
    }
    Ok(format!("dense route, 14 instances, max deviation {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut checks = 0;
    let mut worst: f64 = 0.0;
    for (label, inst) in small_instances() {
        for side in [Side::B, Side::E] {
            let cat = catalogue(&inst, side);
            for l in 0..=inst.n() + 1 {
                let c = expectation_identity_check(&inst, &cat, l).map_err(|e| e.to_string())?;
                let dense = c.dense.ok_or_else(|| format!("{label}: no dense value"))?;
                let dev = (c.structured - c.rhs).abs().max((dense - c.rhs).abs());
                worst = worst.max(dev);
                if dev > 1e-9 {
                    return Err(format!("{label} {side} l={l}: {c:?}"));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} identities, max deviation {worst:.2e}"))
}

fn dense_projector(p: &StructuredProjector) -> Projector {
    let m = p.to_dense().expect("dense");
    let d = m.rows();
    Projector::new(m, vec![d]).expect("projector")
}

fn flatten(rho: &DensityOperator) -> DensityOperator {
    let d = rho.matrix().rows();
    DensityOperator::new(rho.matrix().clone(), vec![d]).expect("state")
}

/// Dense Theta families: each instance's own entries, and every pairing of
/// one attack's Bob entries with another attack's Eve entries when the
/// register layouts match.
fn theta_lp_families() -> Vec<(String, Vec<Projector>, DensityOperator)> {
    let insts = small_instances();
    let mut out = Vec::new();
    for (label, inst) in &insts {
        let theta = flatten(&global_state_theta(inst).expect("theta"));
        let own: Vec<Projector> = [Side::B, Side::E]
            .into_iter()
            .flat_map(|s| entry_projectors(inst, s))
            .map(|p| dense_projector(&p))
            .collect();
        // cumulative projectors as a second family
        let cumulative: Vec<Projector> = (1..=inst.n() + 1)
            .flat_map(|l| {
                [Side::B, Side::E].map(|s| dense_projector(&cumulative_projector(&catalogue(inst, s), l, &inst.layout())))
            })
            .filter(|p| p.rank() > 0)
            .collect();
        out.push((format!("{label} entries"), own, theta.clone()));
        out.push((format!("{label} cumulative"), cumulative, theta.clone()));
        for (other_label, other) in &insts {
            if other.layout() != inst.layout() || other_label == label {
                continue;
            }
            let family: Vec<Projector> = entry_projectors(inst, Side::B)
                .into_iter()
                .chain(entry_projectors(other, Side::E))
                .map(|p| dense_projector(&p))
                .collect();
            if family.len() >= 2 {
                out.push((format!("B of {label} with E of {other_label}"), family, theta.clone()));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let families = theta_lp_families();
    let mut min_margin = f64::INFINITY;
    for (label, family, theta) in &families {
        if family.is_empty() {
            continue;
        }
        let out = landau_pollak_check(family, theta).map_err(|e| e.to_string())?;
        if !out.holds {
            return Err(format!("{label}: {out:?}"));
        }
        min_margin = min_margin.min(out.rhs - out.lhs);
    }
    let random = random_lp_suite(20240601, 100).map_err(|e| e.to_string())?;
    if random.violations > 0 {
        return Err(format!("random suite: {random:?}"));
    }

    let zero = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let plus = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
    let mid = [C64::new(FRAC_PI_8.cos(), 0.0), C64::new(FRAC_PI_8.sin(), 0.0)];
    let pair = [
        Projector::new(ComplexMatrix::outer(&zero), vec![2]).unwrap(),
        Projector::new(ComplexMatrix::outer(&plus), vec![2]).unwrap(),
    ];
    let bisect = landau_pollak_check(&pair, &DensityOperator::pure(&mid, vec![2]).unwrap()).unwrap();
    if (bisect.lhs - (1.0 + FRAC_1_SQRT_2)).abs() > 1e-6 || (bisect.rhs - 2.0).abs() > 1e-6 {
        return Err(format!("bisecting case {bisect:?}"));
    }
    Ok(format!(
        "{} Theta families (min margin {:.1e}), 100 random instances (min margin {:.4}), bisecting lhs {:.4} rhs {:.4}",
        families.len(),
        min_margin,
        random.min_margin,
        bisect.lhs,
        bisect.rhs
    ))
}

fn criterion_5() -> Outcome {
    let insts = small_instances();
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    for (label, inst) in &insts {
        let bob = entry_projectors(inst, Side::B);
        for (other_label, other) in &insts {
            if other.layout() != inst.layout() {
                continue;
            }
            let limit = 0.5f64.powf(inst.n() as f64 / 2.0);
            for q in entry_projectors(other, Side::E) {
                for p in &bob {
                    let norm = cross_norm_bound(p, &q).map_err(|e| e.to_string())?;
                    if norm > limit + 1e-9 {
                        return Err(format!("B of {label}, E of {other_label}: {norm} > {limit}"));
                    }
                    pairs += 1;
                    worst = worst.max(norm / limit);
                }
            }
        }
    }
    if pairs == 0 {
        return Err("no entry pairs to check".into());
    }
    Ok(format!("{pairs} entry pairs, largest norm {worst:.4} of the limit"))
}

fn criterion_6() -> Outcome {
    let opts = VerifyOptions::default();
    let mut points = 0;
    for n in 1..=4 {
        for spec in AttackSpec::library() {
            let r = verify_attack(&spec, n, &opts).map_err(|e| e.to_string())?;
            for g in &r.grid {
                if g.bound != tradeoff_bound(g.l, g.m, n, 0) || (g.count_b + g.count_e) as f64 > g.bound || !g.holds {
                    return Err(format!("{} n={n}: {g:?}", spec.slug()));
                }
                points += 1;
            }
        }
    }
    Ok(format!("{points} grid points over N = 1..4, zero violations"))
}

fn criterion_7() -> Outcome {
    let opts = VerifyOptions::default();
    let mut tightest = i64::MAX;
    for n in 1..=4 {
        for spec in AttackSpec::library() {
            let c = verify_attack(&spec, n, &opts).map_err(|e| e.to_string())?.corollary1;
            if !c.holds || (c.sum as i64) < n as i64 - 3 {
                return Err(format!("{} n={n}: {c:?}", spec.slug()));
            }
            tightest = tightest.min(c.sum as i64 - (n as i64 - 3));
        }
    }
    Ok(format!("all attacks N = 1..4, smallest slack {tightest}"))
}

/// Brute-force oracle for the two extreme profiles: every pair of receiver
/// states orthogonal (one class, max length 1) or no pair orthogonal (all
/// literal, max length N+1).
fn oracle_max_length(states: &[DensityOperator], n: usize) -> Option<usize> {
    let mut any = false;
    let mut all = true;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let overlap = states[i].matrix().matmul(states[j].matrix()).unwrap().frobenius_norm();
            let orth = overlap < 1e-9;
            any |= orth;
            all &= orth;
        }
    }
    if all {
        Some(1)
    } else if !any {
        Some(n + 1)
    } else {
        None
    }
}

fn criterion_8() -> Outcome {
    let mut checks = Vec::new();
    let n = 3;
    for (spec, want) in [(AttackSpec::CnotProbe, (1, n + 1)), (AttackSpec::MeasureX, (n + 1, 1))] {
        checks.push((spec, n, want));
    }
    for n in 1..=3 {
        checks.push((AttackSpec::UniversalCloner, n, (n + 1, n + 1)));
    }
    for (spec, n, want) in checks {
        let inst = instance(&spec, n);
        let got = (
            analyze_side(&inst, Side::B, DECISION).unwrap().profile.max_length(),
            analyze_side(&inst, Side::E, DECISION).unwrap().profile.max_length(),
        );
        let oracle = (
            oracle_max_length(inst.theorem_states(Side::B), n),
            oracle_max_length(inst.theorem_states(Side::E), n),
        );
        if got != want || oracle != (Some(want.0), Some(want.1)) {
            return Err(format!("{} n={n}: got {got:?}, oracle {oracle:?}, want {want:?}", spec.slug()));
        }
    }
    Ok("cnot_probe (1, 4), measure_x (4, 1), cloner literal on both sides at N = 1..3, oracle agrees".into())
}

fn criterion_9() -> Outcome {
    let mut worst_sum: f64 = 0.0;
    for n in 1..=3 {
        for spec in AttackSpec::library() {
            let inst = instance(&spec, n);
            let (bob, eve) = natural_povms(&spec, n);
            let s = shannon_tradeoff_check(&inst, &bob, &eve).map_err(|e| e.to_string())?;
            if s.sum > n as f64 + 1e-9 {
                return Err(format!("{} n={n}: {s:?}", spec.slug()));
            }
            if matches!(spec, AttackSpec::Identity | AttackSpec::MeasureX) && (s.sum - n as f64).abs() > 1e-9 {
                return Err(format!("{} n={n} does not saturate: {s:?}", spec.slug()));
            }
            worst_sum = worst_sum.max(s.sum - n as f64);
        }
    }
    Ok(format!("largest sum - N is {worst_sum:.2e}; identity and measure_x saturate"))
}

fn criterion_10() -> Outcome {
    let r = average_versus_counting(24).map_err(|e| e.to_string())?;
    let n = 24.0;
    let ok = r.avg_sum == 9.0 * n / 8.0
        && r.theorem_bound == theorem_bound(12, 8, 24, 0)
        && r.count_sum as f64 > r.theorem_bound
        && r.violates_theorem_form;
    let scale = 2f64.powi(24);
    let summary = format!(
        "avg sum {} = 9N/8, count {:.4}*2^N vs theorem comparator {:.4}*2^N (pre-constant comparator {:.4}*2^N, violated: {})",
        r.avg_sum,
        r.count_sum as f64 / scale,
        r.theorem_bound / scale,
        r.pre_constant_bound / scale,
        r.violates_pre_constant_form
    );
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn criterion_11() -> Outcome {
    let cfg = ExperimentConfig::from_json(
        r#"{"n_values": [1, 2, 3], "seed": 7, "attacks": [
            {"kind": "identity"}, {"kind": "measure_x"}, {"kind": "cnot_probe"},
            {"kind": "universal_cloner"}, {"kind": "depolarize", "params": {"p": 0.25}}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg, Some(a.path())).map_err(|e| e.to_string())?;
    run_experiment(&cfg, Some(b.path())).map_err(|e| e.to_string())?;
    let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
    if ta.is_empty() || ta != tb {
        return Err(format!("{} vs {} files, contents differ", ta.len(), tb.len()));
    }
    Ok(format!("{} output files byte-identical across two runs", ta.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("conjugate overlap", criterion_1),
        ("protocol equivalence", criterion_2),
        ("expectation identities", criterion_3),
        ("Landau-Pollak suite", criterion_4),
        ("cross-norm bound", criterion_5),
        ("trade-off grid", criterion_6),
        ("max-complexity corollary", criterion_7),
        ("no-cloning scenario", criterion_8),
        ("Shannon cross-check", criterion_9),
        ("average versus counting", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Acceptance gate: one PASS/FAIL line per criterion. Tolerances are exact (all arithmetic is
//! rational); runtime bounds are checked per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsk_core::distance::{check_extended_four_point, check_four_point, check_metric, CertificateKind, DistanceSpace};
use tsk_core::diversity::{
    check_nice, d_delta, delta_t, embed_into_td, g_map, in_t_delta, is_arboreal, is_phylogenetic,
    phylogenetic_diversity, retract_to_t_delta, Diversity, PhyloWitness, SubsetFunction,
};
use tsk_core::domination::{as_dominating, kuratowski, verify_minimal};
use tsk_core::exactnum::{enumerate_vertices, frac, int, Q};
use tsk_core::random::{
    random_diameter_diversity, random_distance_space, random_kappa_point, random_l1_diversity, random_metric,
    random_pd_point,
};
use tsk_core::realtree::{
    anchor_leaves, build_subtree_representation, hull_length, random_subtree_distance, random_tree,
    verify_subtree_representation,
};
use tsk_core::tightspan::{
    contraction_retract, contraction_step, d_inf, f_sharp, in_pd, in_td, pd_polyhedron, retract_to_td,
    verify_kappa_distance, ContractionOptions, PointFunction,
};
use tsk_core::Rational;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rows(labels: &[&str], rows: &[&[i64]]) -> DistanceSpace {
    DistanceSpace::from_int_rows(labels, rows).expect("valid table")
}

fn pf(v: &[Rational]) -> PointFunction {
    PointFunction::new(v.to_vec())
}

fn five_point() -> DistanceSpace {
    rows(
        &["x", "y", "z", "v", "w"],
        &[&[0, 9, 1, 6, 9], &[9, 0, 3, 1, 10], &[1, 3, 0, 0, 2], &[6, 1, 0, 0, 7], &[9, 10, 2, 7, 0]],
    )
}

fn criterion_1() -> Outcome {
    let d = five_point();
    ensure(check_extended_four_point(&d).is_ok(), || "extended four-point fails".into())?;
    let rep = build_subtree_representation(&d).map_err(|e| e.to_string())?;
    let induced = rep.induced_distance().map_err(|e| e.to_string())?;
    let pairs = d.pairs();
    let matched = pairs.iter().filter(|&&(i, j)| induced.get(i, j) == d.get(i, j)).count();
    ensure(matched == 10 && pairs.len() == 10, || format!("{matched}/10 pairs reproduced"))?;
    ensure(verify_subtree_representation(&rep, &d).map_err(|e| e.to_string())?.is_ok(), || {
        "verification failed".into()
    })?;
    let m = check_metric(&d);
    ensure(
        m.kind == CertificateKind::MetricViolation
            && m.witness == ["x", "z", "y"]
            && m.lhs == Q(int(9))
            && m.rhs == Q(int(4)),
        || format!("metric certificate {m}"),
    )?;
    Ok(format!("10/10 pairs exact, {} tree edges, triangle violation {m}", rep.tree.edges().len()))
}

fn criterion_2() -> Outcome {
    let d = rows(&["x", "y", "z"], &[&[0, 3, 1], &[3, 0, 1], &[1, 1, 0]]);
    let mut on = Vec::new();
    for k in 0..=6 {
        let t = frac(k, 6);
        on.push(vec![t.clone(), int(3) - &t, int(1) - &t]);
        on.push(vec![int(3) - &t, t.clone(), int(1) - &t]);
    }
    for k in 1..=6 {
        let t = int(1) + frac(k, 7);
        on.push(vec![t.clone(), int(3) - &t, int(0)]);
    }
    on.sort();
    on.dedup();
    on.truncate(20);
    ensure(on.len() == 20, || format!("only {} distinct samples", on.len()))?;
    let mut off = 0;
    for p in &on {
        ensure(in_td(&d, &pf(p)).unwrap(), || format!("sample {p:?} not in T_d"))?;
        for k in 0..3 {
            for delta in [frac(1, 7), frac(-1, 7)] {
                let mut q = p.clone();
                q[k] += &delta;
                ensure(!in_td(&d, &pf(&q)).unwrap(), || format!("perturbed {q:?} in T_d"))?;
                off += 1;
            }
        }
    }

    let oct = rows(&["w", "x", "y", "z"], &[&[0, 1, 3, 1], &[1, 0, 1, 3], &[3, 1, 0, 1], &[1, 3, 1, 0]]);
    let cert = check_extended_four_point(&oct);
    ensure(!cert.is_ok() && cert.reproduces(&oct), || format!("octagon certificate {cert}"))?;
    let verts = enumerate_vertices(&pd_polyhedron(&oct)).map_err(|e| e.to_string())?;
    let mut expected: Vec<Vec<Rational>> = [(1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1)]
        .iter()
        .map(|&(a, b)| vec![int(a), int(b), int(3 - a), int(3 - b)])
        .collect();
    expected.sort();
    ensure(verts == expected, || format!("{} vertices: {verts:?}", verts.len()))?;
    ensure(verts.iter().all(|v| in_td(&oct, &pf(v)).unwrap()), || "a vertex is not in T_d".into())?;
    Ok(format!("20 family points in T_d, {off} perturbations rejected, octagon {cert}, 8 vertices"))
}

fn criterion_3() -> Outcome {
    let d = rows(&["w", "x", "y", "z"], &[&[0, 0, 0, 0], &[0, 0, 4, 0], &[0, 4, 0, 0], &[0, 0, 0, 0]]);
    let rho = rows(&["w", "x", "y", "z"], &[&[0, 1, 3, 2], &[1, 0, 4, 3], &[3, 4, 0, 1], &[2, 3, 1, 0]]);
    let rho = as_dominating(&d, rho).map_err(|e| e.to_string())?;
    ensure(verify_minimal(&rho).map_err(|e| e.to_string())?, || "ρ not certified minimal".into())?;
    let h = kuratowski(&rho, "w").map_err(|e| e.to_string())?;
    ensure(!in_td(&d, &h).unwrap(), || "h_w in T_d".into())?;
    let r = retract_to_td(&d, &h).map_err(|e| e.to_string())?;
    let want = PointFunction::from_ints(&[0, 1, 3, 0]);
    ensure(*r.function() == want, || format!("retraction {}", r.function()))?;
    Ok(format!("ρ minimal, h_w = {h} not in T_d, retraction {}", r.function()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pairs = 0;
    let mut samples = 0;
    for case in 0..50 {
        let n = 2 + case % 5;
        let d = random_distance_space(&mut rng, n);
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (&d.labels()[i], &d.labels()[j]);
                let k = verify_kappa_distance(&d, x, y).map_err(|e| format!("case {case} ({x},{y}): {e}"))?;
                ensure(k.distance == *d.get(i, j), || format!("case {case} ({x},{y}): {}", k.distance))?;
                pairs += 1;
            }
        }
        for _ in 0..2 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let f = random_kappa_point(&mut rng, &d, i);
            let g = random_kappa_point(&mut rng, &d, j);
            let dist = d_inf(f.function(), g.function()).unwrap();
            ensure(dist >= *d.get(i, j), || format!("case {case}: sampled pair at {dist} < d"))?;
            samples += 1;
        }
    }
    Ok(format!("{pairs} ordered pairs realized exactly, {samples} sampled κ pairs ≥ d"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200u64 {
        let n = rng.gen_range(2..=6);
        let size = rng.gen_range(1..=20);
        let (d, _) = random_subtree_distance(1000 + case, n, size);
        let c = check_extended_four_point(&d);
        ensure(c.is_ok(), || format!("case {case}: {c}"))?;
        let rep = build_subtree_representation(&d).map_err(|e| format!("case {case}: {e}"))?;
        let v = verify_subtree_representation(&rep, &d).map_err(|e| format!("case {case}: {e}"))?;
        ensure(v.is_ok(), || format!("case {case}: {v}"))?;
    }
    Ok("200/200 ext-4pt ok and representations verified".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut ok, mut bad) = (0, 0);
    for case in 0..200 {
        let n = rng.gen_range(1..=6);
        let d = if case % 2 == 0 {
            random_metric(&mut rng, n)
        } else {
            // Leaf metrics of random trees, so that both verdicts occur.
            let size = rng.gen_range(1..=8);
            let mut t = random_tree(&mut rng, size);
            let names = anchor_leaves(&mut t);
            let names = &names[..names.len().min(6)];
            DistanceSpace::from_fn(names.to_vec(), |i, j| t.tree_distance(&names[i], &names[j]).unwrap()).unwrap()
        };
        let (a, b) = (check_four_point(&d).is_ok(), check_extended_four_point(&d).is_ok());
        ensure(a == b, || format!("case {case}: four-point {a}, extended {b}"))?;
        if a {
            ok += 1;
        } else {
            bad += 1;
        }
    }
    Ok(format!("200/200 agree ({ok} ok, {bad} violations)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut steps = 0;
    let mut snapped = 0;
    for case in 0..50 {
        let n = rng.gen_range(2..=5);
        let d = random_distance_space(&mut rng, n);
        let f0 = random_pd_point(&mut rng, &d);
        let mut f = f0.clone();
        let mut s = f_sharp(&d, &f).unwrap();
        for k in 0..40 {
            let f1 = contraction_step(&d, &f).unwrap();
            let s1 = f_sharp(&d, &f1).unwrap();
            ensure(s.dominated_by(&s1) && s1.dominated_by(&f1) && f1.dominated_by(&f), || {
                format!("case {case} step {k}: sandwich broken")
            })?;
            ensure(in_pd(&d, &f1).unwrap(), || format!("case {case} step {k}: left P_d"))?;
            steps += 1;
            if f1 == f {
                break;
            }
            (f, s) = (f1, s1);
        }
        let out = contraction_retract(&d, &f0, &ContractionOptions::default()).map_err(|e| e.to_string())?;
        ensure(out.exact, || format!("case {case}: contraction not exact after {} steps", out.iterations))?;
        ensure(in_td(&d, &out.point).unwrap() && out.point.dominated_by(&f0), || {
            format!("case {case}: fixed point {} outside T_d or above f0", out.point)
        })?;
        snapped += usize::from(out.snapped);
        let lp = retract_to_td(&d, &f0).map_err(|e| e.to_string())?;
        ensure(in_td(&d, lp.function()).unwrap() && lp.function().dominated_by(&f0), || {
            format!("case {case}: LP retraction off")
        })?;
    }
    Ok(format!(
        "{steps} steps sandwiched, 50/50 exact fixed points ({snapped} by snapping), LP retractions agree on T_d"
    ))
}

fn embed_holds(delta: &Diversity, fs: &[SubsetFunction]) -> Result<usize, String> {
    let mut gs = Vec::new();
    for f in fs {
        if !in_t_delta(delta, f).map_err(|e| e.to_string())? {
            return Err("function not certified in T_δ".into());
        }
        gs.push(embed_into_td(delta, f).map_err(|e| e.to_string())?);
    }
    let dd = d_delta(delta);
    for (i, g) in gs.iter().enumerate() {
        ensure(in_td(&dd, g).unwrap(), || "f − δ outside T_D".into())?;
        for j in 0..i {
            let lhs = d_inf(&fs[i].to_point_function(), &fs[j].to_point_function()).unwrap();
            ensure(lhs == d_inf(g, &gs[j]).unwrap(), || "d_inf not preserved".into())?;
            ensure(lhs == delta_t(delta, &[fs[i].clone(), fs[j].clone()]).unwrap(), || {
                "δ_T differs from d_inf on a pair".into()
            })?;
        }
    }
    Ok(fs.len())
}

fn t_delta_members<R: Rng>(rng: &mut R, delta: &Diversity) -> Vec<SubsetFunction> {
    let mut out: Vec<SubsetFunction> = delta.elements().iter().map(|x| g_map(delta, x).unwrap()).collect();
    let size = delta.table().len();
    for _ in 0..2 {
        let top = delta.value(delta.full()).clone();
        let f0 = SubsetFunction(
            (0..size).map(|m| if m == 0 { int(0) } else { &top + frac(rng.gen_range(0..4), 2) }).collect(),
        );
        let w: Vec<Rational> = (1..size).map(|_| int(rng.gen_range(1..5))).collect();
        out.push(retract_to_t_delta(delta, &f0, Some(&w)).unwrap());
    }
    out
}

fn criterion_8() -> Outcome {
    let ex = Diversity::from_fn(vec!["a".into(), "b".into(), "c".into()], 5, |m| match m.count_ones() {
        1 => int(0),
        2 => int(4),
        _ => int(5),
    })
    .map_err(|e| e.to_string())?;
    ensure(is_arboreal(&ex).is_ok(), || "4/4/4/5 not arboreal".into())?;
    let v = is_phylogenetic(&ex).map_err(|e| e.to_string())?;
    let want = PhyloWitness::Subset { subset: "{a,b,c}".into(), delta: Q(int(5)), hull: Q(int(6)) };
    ensure(!v.phylogenetic && v.witness == Some(want), || format!("phylogenetic verdict {:?}", v.witness))?;
    let dd = d_delta(&ex);
    ensure(*dd.dist("{a,b}", "{c}").unwrap() == int(1), || "D({a,b},{c}) ≠ 1".into())?;

    let counting = Diversity::from_fn(vec!["x".into(), "y".into(), "z".into()], 5, |m| int(m.count_ones() as i64 - 1))
        .map_err(|e| e.to_string())?;
    ensure(!check_nice(&counting).map_err(|e| e.to_string())?.nice, || "|A|−1 reported nice".into())?;
    ensure(!is_arboreal(&counting).is_ok(), || "|A|−1 reported arboreal".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut embedded = embed_holds(&ex, &t_delta_members(&mut rng, &ex))?;
    embedded += embed_holds(&counting, &t_delta_members(&mut rng, &counting))?;
    for case in 0..20 {
        let n = rng.gen_range(2..=4);
        let delta = if case < 10 { random_diameter_diversity(&mut rng, n) } else { random_l1_diversity(&mut rng, n) };
        ensure(check_nice(&delta).map_err(|e| e.to_string())?.nice, || format!("case {case} not nice"))?;
        embedded += embed_holds(&delta, &t_delta_members(&mut rng, &delta))?;
    }
    Ok(format!(
        "example arboreal, not phylogenetic (5 vs 6), D = 1; |A|−1 not nice, not arboreal; 20/20 nice; {embedded} T_δ members embed"
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..50 {
        let size = rng.gen_range(1..=10);
        let mut t = random_tree(&mut rng, size);
        let k = rng.gen_range(1..=5).min(t.vertex_count());
        let mut verts: Vec<usize> = (0..t.vertex_count()).collect();
        for i in 0..k {
            let j = rng.gen_range(i..verts.len());
            verts.swap(i, j);
        }
        let names: Vec<String> = (0..k).map(|i| format!("t{i}")).collect();
        for (name, &v) in names.iter().zip(&verts) {
            t.add_anchor(name, tsk_core::realtree::TreePoint::vertex(v)).unwrap();
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let delta = phylogenetic_diversity(&t, &refs).map_err(|e| format!("case {case}: {e}"))?;
        let v = is_phylogenetic(&delta).map_err(|e| format!("case {case}: {e}"))?;
        ensure(v.phylogenetic, || format!("case {case}: {:?}", v.witness))?;
        let tree = v.tree.ok_or("no tree returned")?;
        for m in 0..1u32 << k {
            let sub: Vec<&str> = (0..k).filter(|i| m >> i & 1 == 1).map(|i| refs[i]).collect();
            ensure(hull_length(&tree, &sub).unwrap() == *delta.value(m), || format!("case {case}: hull mismatch"))?;
        }
        ensure(is_arboreal(&delta).is_ok(), || format!("case {case}: not arboreal"))?;
        ensure(delta.value(0).is_zero(), || "δ(∅) ≠ 0".into())?;
    }
    Ok("50/50 phylogenetic with matching hulls, all arboreal".into())
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        ("five-point table regression", criterion_1, Duration::from_secs(1)),
        ("three-point and octagon tight spans", criterion_2, Duration::from_secs(5)),
        ("minimal metric with Kuratowski row outside T_d", criterion_3, Duration::from_secs(60)),
        ("κ embedding", criterion_4, Duration::from_secs(300)),
        ("subtree roundtrip", criterion_5, Duration::from_secs(60)),
        ("metric four-point equivalence", criterion_6, Duration::from_secs(60)),
        ("contraction", criterion_7, Duration::from_secs(300)),
        ("diversities", criterion_8, Duration::from_secs(300)),
        ("phylogenetic roundtrip", criterion_9, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let out = match out {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match out {
            Ok(msg) => println!("PASS {} {name}: {msg} [{took:.2?}]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{took:.2?}]", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use hypiso_core::arith::int;
use hypiso_core::combiner::{independent, simultaneous_hyperbolic, verify_certificate, SearchSchedule};
use hypiso_core::dynamics::{
    axis_point, estimate_delta_insize, independent_separation, ns_dynamics_check,
    separation_check, standard_sample, NeighborhoodSpec,
};
use hypiso_core::geometry::{
    estimate_delta_four_point, estimate_delta_four_point_all_bases, estimate_translation_length, exact_to_f64,
    gromov_product,
};
use hypiso_core::sampling::{random_isometry, random_point, random_system, rng, SystemParams, Wanted};
use hypiso_core::{Action, ActionSystem, GroupWord, Isometry, IsometryClass, Mat2, Point, SpaceModel};
use rand::Rng;

struct Run {
    failed: usize,
}

impl Run {
    fn report(&mut self, name: &str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed += 1;
        }
    }
}

fn models() -> Vec<(&'static str, SpaceModel)> {
    vec![
        ("half-plane", SpaceModel::half_plane()),
        ("bass-serre(2,3)", SpaceModel::bass_serre(2, 3, 8).unwrap()),
        ("cayley-tree(2)", SpaceModel::cayley_tree(2, 8).unwrap()),
    ]
}

fn pair_action(model: &SpaceModel, f: Isometry, g: Isometry) -> Action {
    let images = BTreeMap::from([("f".to_string(), f), ("g".to_string(), g)]);
    Action::new("x", model.clone(), images).unwrap()
}

fn m(a: i64, b: i64, c: i64, d: i64) -> Isometry {
    Isometry::Mobius(Mat2::from_ints(a, b, c, d).unwrap())
}

fn worked_system() -> ActionSystem {
    let h = SpaceModel::half_plane();
    ActionSystem::without_witnesses(
        vec!["f".into(), "g".into()],
        vec![pair_action(&h, m(2, 1, 1, 1), m(0, -1, 1, 0)), pair_action(&h, m(0, -1, 1, 0), m(2, 1, 1, 1))],
    )
    .unwrap()
}

fn abs_trace(iso: &Isometry) -> hypiso_core::Rational {
    match iso {
        Isometry::Mobius(m) => m.abs_trace(),
        _ => unreachable!(),
    }
}

fn worked_instance(run: &mut Run) {
    let start = Instant::now();
    let sys = worked_system();
    let cert = simultaneous_hyperbolic(&sys, &SearchSchedule::default());
    let elapsed = start.elapsed().as_secs_f64();
    let Ok(cert) = cert else {
        return run.report("worked-instance", false, format!("search failed: {cert:?}"));
    };
    let traces: Vec<_> = (0..2).map(|i| abs_trace(&sys.evaluate(i, &cert.word).unwrap())).collect();
    let small = cert.word.runs().iter().all(|(_, e)| e.abs() <= 4);
    let hyperbolic = traces.iter().all(|t| *t > int(2));
    let seven = cert.word.to_string() != "f^2 g^2" || traces.iter().all(|t| *t == int(7));
    run.report(
        "worked-instance",
        small && hyperbolic && seven && verify_certificate(&sys, &cert).valid && elapsed < 1.0,
        format!("word {}, |tr| = {} and {}, {elapsed:.3}s (limit 1s)", cert.word, traces[0], traces[1]),
    );
}

fn desk_scale(run: &mut Run) {
    let start = Instant::now();
    let mut ok = 0;
    let mut notes = Vec::new();
    for seed in 0..100u64 {
        let sys = random_system(&mut rng(seed), &SystemParams::default());
        match simultaneous_hyperbolic(&sys, &SearchSchedule::with_max_exponent(32)) {
            Ok(cert) if verify_certificate(&sys, &cert).valid => ok += 1,
            Ok(_) => notes.push(format!("seed {seed}: certificate failed re-verification")),
            Err(e) => notes.push(format!("seed {seed}: {e}")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    run.report(
        "desk-scale-theorem",
        ok == 100 && elapsed < 60.0,
        format!("{ok}/100 systems certified and re-verified, {elapsed:.1}s (limit 60s){}", notes.join("; ")),
    );
}

fn estimate_agreement(run: &mut Run) {
    let mut worst_h = 0.0f64;
    let mut worst_e = 0.0f64;
    for (i, (_, model)) in models().into_iter().enumerate() {
        let mut r = rng(100 + i as u64);
        let base = model.basepoint();
        for _ in 0..200 {
            let g = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let est = estimate_translation_length(&model, &g, &base, 64).unwrap();
            let tau = exact_to_f64(est.exact_value.as_ref().unwrap());
            worst_h = worst_h.max((est.value - tau).abs());
            let e = random_isometry(&mut r, &model, Wanted::Elliptic);
            worst_e = worst_e.max(estimate_translation_length(&model, &e, &base, 64).unwrap().value);
        }
    }
    run.report(
        "estimate-vs-exact",
        worst_h <= 0.1 && worst_e < 0.1,
        format!("max |estimate − τ| = {worst_h:.4} over 600 hyperbolics (tol 0.1); max elliptic estimate = {worst_e:.4} over 600 (tol 0.1)"),
    );
}

fn tree_zero_delta(run: &mut Run) {
    let mut details = Vec::new();
    let mut pass = true;
    for model in [SpaceModel::bass_serre(2, 3, 4).unwrap(), SpaceModel::cayley_tree(2, 4).unwrap()] {
        let verts = model.ball().unwrap().vertices.clone();
        let d = estimate_delta_four_point_all_bases(&model, &verts).unwrap();
        let mut triples = Vec::new();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                for k in j + 1..verts.len() {
                    triples.push((verts[i].clone(), verts[j].clone(), verts[k].clone()));
                }
            }
        }
        let ins = estimate_delta_insize(&model, &triples).unwrap();
        pass &= d.delta == 0.0 && ins.delta == 0.0;
        details.push(format!(
            "{}: {} vertices, four-point δ = {} over {} 4-tuples, max insize = {} over {} triples",
            model.kind(),
            verts.len(),
            d.delta,
            d.sample_size,
            ins.delta,
            triples.len()
        ));
    }
    run.report("tree-delta-zero", pass, details.join("; "));
}

fn plane_points(seed: u64, n: usize) -> Vec<Point> {
    let h = SpaceModel::half_plane();
    let mut r = rng(seed);
    let mut out: Vec<Point> = Vec::new();
    while out.len() < n {
        let p = random_point(&mut r, &h, 0);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn plane_delta(run: &mut Run) {
    let h = SpaceModel::half_plane();
    let pts = plane_points(200, 200);
    let d = estimate_delta_four_point(&h, &pts, &h.basepoint()).unwrap();
    let mut r = rng(201);
    let triangles: Vec<_> = (0..1000)
        .map(|_| {
            let i = r.random_range(0..pts.len());
            let j = (i + r.random_range(1..pts.len())) % pts.len();
            let mut k = r.random_range(0..pts.len());
            while k == i || k == j {
                k = r.random_range(0..pts.len());
            }
            (pts[i].clone(), pts[j].clone(), pts[k].clone())
        })
        .collect();
    let ins = estimate_delta_insize(&h, &triangles).unwrap();
    run.report(
        "plane-delta-bound",
        d.delta <= 1.0 && ins.delta <= 1.0,
        format!("four-point δ̂ = {:.4} over 200 points (tol 1.0); max insize = {:.4} over 1000 triangles (tol 1.0)", d.delta, ins.delta),
    );
}

fn gromov_inequality(run: &mut Run) {
    let slack = 2f64.powi(-20);
    let mut details = Vec::new();
    let mut pass = true;
    for (i, (name, model)) in models().into_iter().enumerate() {
        let mut r = rng(300 + i as u64);
        let sample: Vec<Point> = match model.kind() {
            hypiso_core::ModelKind::HalfPlane => plane_points(310, 100),
            _ => (0..100).map(|_| random_point(&mut r, &model, 6)).collect(),
        };
        let delta = estimate_delta_four_point_all_bases(&model, &sample).unwrap().delta;
        let mut violations = 0;
        for _ in 0..10_000 {
            let mut pick = || sample[r.random_range(0..sample.len())].clone();
            let (x, y, z, w) = (pick(), pick(), pick(), pick());
            let gp = |a: &Point, b: &Point| gromov_product(&model, a, b, &w).unwrap().value;
            if gp(&x, &z) < gp(&x, &y).min(gp(&y, &z)) - delta - slack {
                violations += 1;
            }
        }
        pass &= violations == 0;
        details.push(format!("{name}: {violations} violations, δ̂ = {delta:.4}"));
    }
    run.report("gromov-product-inequality", pass, format!("10^4 quadruples per model, slack 2^-20; {}", details.join("; ")));
}

fn north_south(run: &mut Run) {
    let mut details = Vec::new();
    let mut pass = true;
    for (i, (name, model)) in models().into_iter().enumerate() {
        let mut r = rng(400 + i as u64);
        let mut worst = 0;
        let mut failures = 0;
        for _ in 0..20 {
            let g = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let IsometryClass::Hyperbolic(w) = model.classify(&g).unwrap() else { unreachable!() };
            let base = axis_point(&model, &g).unwrap();
            let up = NeighborhoodSpec::new(w.fixed_plus, 1.0, base.clone()).unwrap();
            let um = NeighborhoodSpec::new(w.fixed_minus, 1.0, base.clone()).unwrap();
            let sample = standard_sample(&model, &base).unwrap();
            let action = pair_action(&model, g.clone(), g);
            match ns_dynamics_check(&action, &GroupWord::generator("f"), &up, &um, &sample, 64) {
                Ok(n) => worst = worst.max(n),
                Err(_) => failures += 1,
            }
        }
        pass &= failures == 0;
        details.push(format!("{name}: {failures} failures, max N = {worst}"));
    }
    run.report("north-south-dynamics", pass, format!("20 elements per model, k = 1, N <= 64; {}", details.join("; ")));
}

fn separation(run: &mut Run) {
    let mut details = Vec::new();
    let mut pass = true;
    let f = GroupWord::generator("f");
    let g = GroupWord::generator("g");
    for (i, (name, model)) in models().into_iter().enumerate() {
        let mut r = rng(500 + i as u64);
        let mut sep_fail = 0;
        let mut powers = 0;
        let mut built = 0;
        let mut setup_fail = 0;
        while built < 20 {
            let fi = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let gi = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let action = pair_action(&model, fi.clone(), gi);
            if !independent(&action, &f, &g).unwrap() {
                continue;
            }
            built += 1;
            let mut sample = Vec::new();
            for y in standard_sample(&model, &model.basepoint()).unwrap().into_iter().step_by(4) {
                let mut p = y;
                for _ in 0..6 {
                    sample.push(p.clone());
                    p = model.apply(&fi, &p).unwrap();
                }
            }
            let Ok(setup) = independent_separation(&action, &f, &g, &sample, 32) else {
                setup_fail += 1;
                continue;
            };
            for k in setup.n..=setup.n + 8 {
                powers += 1;
                let res = separation_check(&action, &g.pow(i64::from(k)), &setup.u_plus, &setup.u_minus, &sample).unwrap();
                if !res.passed {
                    sep_fail += 1;
                }
            }
        }
        let mut dep_wrong = 0;
        for t in 0..20 {
            let fi = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let k = 1 + (t % 3) as i64;
            let gi = if t % 2 == 0 { fi.pow(k) } else { fi.pow(-k) };
            if independent(&pair_action(&model, fi, gi), &f, &g).unwrap() {
                dep_wrong += 1;
            }
        }
        pass &= sep_fail == 0 && setup_fail == 0 && dep_wrong == 0;
        details.push(format!(
            "{name}: {sep_fail}/{powers} separation failures, {setup_fail} setup failures, {dep_wrong}/20 dependent pairs called independent"
        ));
    }
    run.report("independence-and-separation", pass, details.join("; "));
}

fn negative_control(run: &mut Run) {
    let sys = worked_system();
    let mut cert = simultaneous_hyperbolic(&sys, &SearchSchedule::default()).unwrap();
    cert.word = GroupWord::parse("f g").unwrap();
    let v = verify_certificate(&sys, &cert);
    let tr = abs_trace(&sys.evaluate(0, &cert.word).unwrap());
    run.report(
        "negative-control",
        !v.valid && tr == int(0),
        format!("f g rejected: {}; trace in action 1 = {tr}", v.diagnostic.unwrap_or_default()),
    );
}

fn main() -> ExitCode {
    let mut run = Run { failed: 0 };
    worked_instance(&mut run);
    desk_scale(&mut run);
    estimate_agreement(&mut run);
    tree_zero_delta(&mut run);
    plane_delta(&mut run);
    gromov_inequality(&mut run);
    north_south(&mut run);
    separation(&mut run);
    negative_control(&mut run);
    if run.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", run.failed);
        ExitCode::FAILURE
    }
}

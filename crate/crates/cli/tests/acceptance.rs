//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::time::Instant;

use facered::cones::fig1::{dot3, Fig1Fixture, POINT_A, POINT_B};
use facered::cones::lindenstrauss::{centering, k_adjoint, k_map, k_pinv};
use facered::cones::{ConeDesc, Element, FaceRep, Fig1Face};
use facered::facial::{facial_reduction, sd_of_face_algorithm2, validate_certificate, ConicSystem, Fig1Oracle, Mode};
use facered::numerics::{exact_rank, rational_lp, sym_eigen, LpOutcome, RatMat, Rational, Sense};
use facered::rigidity::{
    bakonyi_johnson_check, edm_completion_system, equilibrium_stress_basis, stress_matrix_exact, gen_chordal, gen_ladder_sdp, gen_laman, gen_maximal_planar, random_generic_config,
    rigidity_verdicts, EdgeKind, Framework, Graph, RigidityVerdict,
};
use facered_cli::commands;
use facered_cli::files::{CertificateFile, ProblemFile};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const TAU_AUX: f64 = 1e-7;
const MUTATIONS: usize = 100;

struct Run {
    failed: usize,
    /// (sd, sd_range) of every framework analyzed, for the range/nullspace comparison.
    forms: Vec<(usize, usize)>,
    /// Problem and certificate files for the integrity check.
    certificates: Vec<(String, ProblemFile, CertificateFile)>,
}

impl Run {
    fn report(&mut self, id: &str, pass: bool, detail: String) {
        println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed += 1;
        }
    }

    fn verdict(&mut self, f: &Framework) -> Option<RigidityVerdict> {
        match rigidity_verdicts(f) {
            Ok(v) => {
                self.forms.push((v.sd, v.sd_range));
                Some(v)
            }
            Err(e) => {
                println!("  analysis error: {e}");
                None
            }
        }
    }

    fn keep_certificate(&mut self, name: String, sys: &ConicSystem) {
        let Ok(report) = facial_reduction(sys) else { return };
        if report.certificate.steps.is_empty() {
            return;
        }
        if let (Ok(p), Ok(c)) = (ProblemFile::from_system(sys), CertificateFile::from_report(&report, sys.mode)) {
            self.certificates.push((name, p, c));
        }
    }
}

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn orient(a: &[Rational], b: &[Rational], c: &[Rational]) -> Rational {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// Four points in convex position, no three collinear.
fn convex_position(p: &[Vec<Rational>]) -> bool {
    for i in 0..4 {
        let o: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let (a, b, c) = (&p[o[0]], &p[o[1]], &p[o[2]]);
        let s = [orient(a, b, &p[i]), orient(b, c, &p[i]), orient(c, a, &p[i])];
        if s.iter().any(|x| x.is_zero()) || orient(a, b, c).is_zero() {
            return false;
        }
        if s.iter().all(|x| x.is_positive()) || s.iter().all(|x| x.is_negative()) {
            return false;
        }
    }
    true
}

/// Boundary edges of a convex quadrilateral, as index pairs i < j.
fn hull_edges(pts: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let cx: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
    let cy: f64 = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| (pts[a][1] - cy).atan2(pts[a][0] - cx).total_cmp(&(pts[b][1] - cy).atan2(pts[b][0] - cx)));
    (0..order.len()).map(|k| (order[k].min(order[(k + 1) % 4]), order[k].max(order[(k + 1) % 4]))).collect()
}

fn k4_stress_pattern_ok(f: &Framework, v: &RigidityVerdict) -> bool {
    let [level] = v.stress_sequence.as_slice() else { return false };
    let boundary = hull_edges(&f.points());
    let scale = level.stress.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let tol = TAU_AUX * scale.max(1.0);
    f.graph.edges.iter().zip(&level.stress).all(|(e, &w)| if boundary.contains(e) { w > tol } else { w < -tol })
}

fn criterion_k4(run: &mut Run) {
    let t = Instant::now();
    let square = Framework::new(Graph::complete(4), 2, vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
    let mut frameworks = vec![square.clone()];
    let mut seed = 0;
    while frameworks.len() < 11 {
        let f = random_generic_config(&Graph::complete(4), 2, 4000 + seed).unwrap();
        seed += 1;
        if convex_position(&f.coords) {
            frameworks.push(f);
        }
    }
    let mut good = 0;
    for f in &frameworks {
        if let Some(v) = run.verdict(f) {
            let ok = v.sd == 1
                && v.stress_sequence.len() == 1
                && v.stress_sequence[0].rank == 1
                && k4_stress_pattern_ok(f, &v)
                && v.dimensionally_rigid
                && v.universally_rigid_certified;
            good += usize::from(ok);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    run.keep_certificate("k4-square".into(), &edm_completion_system(&square).unwrap());
    run.report("1 (K4)", good == 11 && secs < 2.0, format!("{good}/11 K4 frameworks: sd 1, one rank-1 stress, sign pattern, rigid; {secs:.2}s (limit 2s)"));
}

fn criterion_ladder(run: &mut Run) {
    let t = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for n in 3..=5 {
        let sys = gen_ladder_sdp(n).unwrap();
        match facial_reduction(&sys) {
            Ok(r) => {
                let valid = validate_certificate(&sys, &r.certificate, r.witness.as_slice()).ok;
                let min_margin = r.margins.iter().copied().fold(f64::INFINITY, f64::min);
                let pass = r.sd == n - 1 && r.exact && valid && min_margin >= 10.0 * TAU_AUX;
                ok &= pass;
                details.push(format!("n={n} sd {} valid {valid} min margin {min_margin:.2e}", r.sd));
                run.keep_certificate(format!("ladder-{n}"), &sys);
            }
            Err(e) => {
                ok = false;
                details.push(format!("n={n} error {e}"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    run.report("2 (ladder)", ok && secs < 10.0, format!("{}; {secs:.2}s (limit 10s)", details.join(", ")));
}

fn criterion_fig1(run: &mut Run) {
    let t = Instant::now();
    let sd = sd_of_face_algorithm2(&Fig1Oracle, &FaceRep::Fig1(Fig1Face::RayA));
    // supporting functionals at A: z(θ) = s(cos θ, sin θ, −cos θ) ⊥ A; half the draws sit on θ = π
    let fixture = Fig1Fixture;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut supporting, mut bad) = (0, 0);
    for k in 0..10_000 {
        let theta = if k % 2 == 0 { std::f64::consts::PI } else { rng.gen_range(0.0..std::f64::consts::TAU) };
        let s = rng.gen_range(0.1..10.0);
        let z = [s * theta.cos(), s * theta.sin(), -s * theta.cos()];
        debug_assert!(dot3(z, POINT_A).abs() < 1e-12);
        if fixture.in_dual(z, 1e-12) {
            supporting += 1;
            if dot3(z, POINT_B).abs() > 1e-9 * s {
                bad += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = sd.as_ref().is_ok_and(|&d| d == 2) && supporting >= 5_000 && bad == 0 && secs < 1.0;
    run.report(
        "3 (non-exposed cone)",
        pass,
        format!("sd {sd:?}; 10000 functionals ⊥ A, {supporting} supporting, {bad} miss B; {secs:.3}s (limit 1s)"),
    );
}

fn criterion_laman(run: &mut Run) {
    let mut good = 0;
    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 7);
        let f = random_generic_config(&gen_laman(n, seed).unwrap(), 2, 1000 + seed).unwrap();
        if let Some(v) = run.verdict(&f) {
            good += usize::from(v.sd == 0 && v.stress_sequence.is_empty() && v.margins.last().is_some_and(|m| *m > 0.0));
        }
    }
    run.report("4 (Laman sd 0)", good == 20, format!("{good}/20 Laman frameworks (n ≤ 10) with no stress level and positive margin"));
}

fn laman_plus(n: usize, d: usize, seed: u64) -> Graph {
    let mut g = gen_laman(n, seed).unwrap();
    for e in g.non_edges().into_iter().take(d) {
        g.add_edge(e.0, e.1, EdgeKind::Bar).unwrap();
    }
    g
}

fn wheel(rim: usize, seed: u64) -> Framework {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..=rim).map(|k| (0, k)).collect();
    edges.extend((1..=rim).map(|k| (k, k % rim + 1)));
    let g = Graph::new(rim + 1, &edges).unwrap();
    let mut angles: Vec<f64> = (0..rim).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let mut pts = vec![vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]];
    for a in angles {
        let r = rng.gen_range(0.5..1.5);
        pts.push(vec![r * a.cos(), r * a.sin()]);
    }
    Framework::from_f64(g, 2, &pts).unwrap()
}

/// Independent of the reduction engine: the exact equilibrium stress is unique up to scale
/// and its stress matrix is PSD of rank n − 3.
fn carries_psd_stress(f: &Framework) -> bool {
    let basis = equilibrium_stress_basis(f);
    let [w] = basis.as_slice() else { return false };
    let omega = stress_matrix_exact(&f.graph, w).to_f64();
    let Ok(eig) = sym_eigen(&omega) else { return false };
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = if eig.eigenvalues.iter().sum::<f64>() >= 0.0 { 1.0 } else { -1.0 };
    let values: Vec<f64> = eig.eigenvalues.iter().map(|v| sign * v).collect();
    values.iter().all(|v| *v >= -1e-9 * scale) && values.iter().filter(|v| **v > 1e-6 * scale).count() == f.n() - 3
}

/// First seeded wheel configuration that passes the stress oracle.
fn psd_wheel(rim: usize) -> Framework {
    (0..).map(|seed| wheel(rim, 100 * rim as u64 + seed)).find(carries_psd_stress).unwrap()
}

fn criterion_laman_plus(run: &mut Run) {
    let mut lines = Vec::new();
    let mut ok = true;
    for d in 1..=2usize {
        let mut good = 0;
        for seed in 0..20u64 {
            let n = 4 + (seed as usize % 5);
            let f = random_generic_config(&laman_plus(n, d, seed), 2, 1000 + seed).unwrap();
            if let Some(v) = run.verdict(&f) {
                good += usize::from(v.sd <= d);
            }
            if d == 1 && seed < 5 {
                run.keep_certificate(format!("laman+1-{seed}"), &edm_completion_system(&f).unwrap());
            }
        }
        ok &= good == 20;
        lines.push(format!("d={d}: {good}/20 with sd ≤ {d}"));
    }
    let mut circuits = vec![random_generic_config(&Graph::complete(4), 2, 4000).unwrap()];
    circuits.extend((4..=7).map(psd_wheel));
    let mut exact_one = 0;
    for (k, f) in circuits.iter().enumerate() {
        if let Some(v) = run.verdict(f) {
            exact_one += usize::from(v.sd == 1 && v.levels_verified && v.margins.last().is_some_and(|m| *m > 0.0));
        }
        run.keep_certificate(format!("circuit-{k}"), &edm_completion_system(f).unwrap());
    }
    ok &= exact_one == 5;
    lines.push(format!("circuits (K4, wheels rim 4..7): {exact_one}/5 with sd exactly 1"));
    run.report("5 (Laman + d)", ok, lines.join("; "));
}

fn criterion_chordal(run: &mut Run) {
    let mut good = 0;
    let mut realizable = 0;
    for seed in 0..20u64 {
        let n = 4 + (seed as usize % 7);
        let g = gen_chordal(n, 0.5, seed).unwrap();
        let f = random_generic_config(&g, 2, 1000 + seed).unwrap();
        let p = f.points();
        let dist: Vec<f64> = g.edges.iter().map(|&(i, j)| (p[i][0] - p[j][0]).powi(2) + (p[i][1] - p[j][1]).powi(2)).collect();
        let bj = bakonyi_johnson_check(&g, &dist).unwrap_or(false);
        realizable += usize::from(bj);
        if let Some(v) = run.verdict(&f) {
            good += usize::from(bj && v.sd <= 1);
        }
    }
    run.report("6 (chordal)", good == 20, format!("{realizable}/20 realizable by clique check, {good}/20 with sd ≤ 1"));
}

fn criterion_planar(run: &mut Run) {
    let mut lines = Vec::new();
    let mut ok = true;
    for d in 0..=1usize {
        let mut good = 0;
        for seed in 0..10u64 {
            let n = 4 + (seed as usize % 5);
            let mut g = gen_maximal_planar(n, seed).unwrap();
            for e in g.non_edges().into_iter().take(d) {
                g.add_edge(e.0, e.1, EdgeKind::Bar).unwrap();
            }
            let f = random_generic_config(&g, 3, 2000 + seed).unwrap().with_provenance("maximal-planar");
            if let Some(v) = run.verdict(&f) {
                good += usize::from(v.sd <= d);
            }
        }
        ok &= good == 10;
        lines.push(format!("d={d}: {good}/10 with sd ≤ {d}"));
    }
    run.report("7 (3D maximal planar + d)", ok, lines.join("; "));
}

fn signs_hold(f: &Framework, v: &RigidityVerdict) -> bool {
    v.stress_sequence.iter().all(|level| {
        let scale = level.stress.iter().fold(1.0f64, |m, w| m.max(w.abs()));
        f.graph.kinds.iter().zip(&level.stress).all(|(k, &w)| match k {
            EdgeKind::Cable => w >= -TAU_AUX * scale,
            EdgeKind::Strut => w <= TAU_AUX * scale,
            EdgeKind::Bar => true,
        })
    })
}

fn criterion_tensegrity(run: &mut Run) {
    use EdgeKind::{Cable, Strut};
    let g = Graph::with_kinds(4, &[(0, 1, Cable), (1, 2, Cable), (2, 3, Cable), (0, 3, Cable), (0, 2, Strut), (1, 3, Strut)]).unwrap();
    let square = Framework::new(g, 2, vec![vec![q(0), q(0)], vec![q(1), q(0)], vec![q(1), q(1)], vec![q(0), q(1)]]).unwrap();
    let sq = run.verdict(&square);
    let square_ok = sq.as_ref().is_some_and(|v| v.stress_sequence.len() == 1 && v.proper && v.super_stable && signs_hold(&square, v));
    run.keep_certificate("square-tensegrity".into(), &edm_completion_system(&square).unwrap());

    let mut good = 0;
    for seed in 0..10u64 {
        let n = 4 + (seed as usize % 5);
        let base = laman_plus(n, 1, seed);
        let kinds = [EdgeKind::Bar, EdgeKind::Cable, EdgeKind::Strut];
        let triples: Vec<_> = base.edges.iter().enumerate().map(|(e, &(i, j))| (i, j, kinds[(e * 7 + seed as usize) % 3])).collect();
        let f = random_generic_config(&Graph::with_kinds(n, &triples).unwrap(), 2, 3000 + seed).unwrap();
        if let Some(v) = run.verdict(&f) {
            good += usize::from(v.sd <= 1 && signs_hold(&f, &v));
        }
        if seed < 3 {
            run.keep_certificate(format!("tensegrity-{seed}"), &edm_completion_system(&f).unwrap());
        }
    }
    run.report(
        "8 (tensegrity)",
        square_ok && good == 10,
        format!("square: proper and super stable {square_ok}; {good}/10 Laman+1 tensegrities with sd ≤ 1 and signs within τ"),
    );
}

fn random_sym_int(rng: &mut ChaCha8Rng, n: usize, hollow: bool) -> RatMat {
    let mut m = RatMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if hollow && i == j {
                continue;
            }
            let v = Rational::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=6).into());
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

fn lp_feasible(rows: &[Vec<Rational>], rhs: &[Rational], vars: usize) -> bool {
    if vars == 0 {
        return rhs.iter().all(|v| v.is_zero());
    }
    let c = vec![Rational::zero(); vars];
    !matches!(rational_lp(&c, &RatMat::from_rows(rows), rhs, Sense::Max).unwrap(), LpOutcome::Infeasible)
}

fn in_image(a: &[Vec<i64>], support: &[usize], t: &[Rational]) -> bool {
    let rows: Vec<Vec<Rational>> = a.iter().map(|r| support.iter().map(|&k| q(r[k])).collect()).collect();
    lp_feasible(&rows, t, support.len())
}

/// ℳ(K ∩ (ℳ*y)⊥) = ℳ(K) ∩ y⊥ on a random orthant instance with ℳ*y ≥ 0.
fn cross_membership(rng: &mut ChaCha8Rng) -> bool {
    let n = rng.gen_range(2..=5);
    let m = rng.gen_range(1..=3);
    let y: Vec<i64> = loop {
        let y: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
        if y.iter().any(|&v| v != 0) {
            break y;
        }
    };
    let yy: i64 = y.iter().map(|v| v * v).sum();
    let project = |w: &[i64]| -> Vec<i64> {
        let wy: i64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
        w.iter().zip(&y).map(|(a, b)| a * yy - wy * b).collect()
    };
    let cols: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let wy: i64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
            if rng.gen_bool(0.4) {
                project(&w)
            } else if wy < 0 {
                w.iter().map(|v| -v).collect()
            } else {
                w
            }
        })
        .collect();
    let a: Vec<Vec<i64>> = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let z: Vec<i64> = cols.iter().map(|c| c.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
    let zero_set: Vec<usize> = (0..n).filter(|&k| z[k] == 0).collect();
    let all: Vec<usize> = (0..n).collect();
    let perp = |t: &[Rational]| t.iter().zip(&y).fold(Rational::zero(), |s, (a, &b)| s + a * q(b)).is_zero();
    (0..20).all(|_| {
        let x: Vec<i64> = (0..n).map(|k| if zero_set.contains(&k) { rng.gen_range(0..=4) } else { 0 }).collect();
        let left: Vec<Rational> = a.iter().map(|r| q(r.iter().zip(&x).map(|(p, v)| p * v).sum())).collect();
        let w: Vec<i64> = (0..m).map(|_| rng.gen_range(-4..=4)).collect();
        let right: Vec<Rational> = project(&w).into_iter().map(q).collect();
        perp(&left)
            && in_image(&a, &all, &left)
            && perp(&right)
            && in_image(&a, &all, &right) == in_image(&a, &zero_set, &right)
    })
}

fn criterion_identities(run: &mut Run) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ident = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let x = random_sym_int(&mut rng, n, false);
        let d = random_sym_int(&mut rng, n, true);
        let j = centering::<Rational>(n);
        let adjoint = k_map(&x).inner(&d) == x.inner(&k_adjoint(&d));
        let left_inverse = k_pinv(&k_map(&x)) == &(&j * &x) * &j;
        let right_inverse = k_map(&k_pinv(&d)) == d;
        ident += usize::from(adjoint && left_inverse && right_inverse);
    }
    let cross = (0..50).filter(|_| cross_membership(&mut rng)).count();
    let agree = run.forms.iter().filter(|(a, b)| a == b).count();
    let total = run.forms.len();
    run.report(
        "9 (identities)",
        ident == 100 && cross == 50 && agree == total,
        format!("{ident}/100 exact Lindenstrauss trials; {cross}/50 cross-membership instances; range = nullspace sd on {agree}/{total} frameworks"),
    );
}

fn random_orthant(rng: &mut ChaCha8Rng) -> ConicSystem {
    loop {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=3usize.min(n));
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let x0: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=3) }).collect();
        let rows: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        if exact_rank(&RatMat::from_rows(&rows)) < m {
            continue;
        }
        let b = a.iter().map(|r| q(r.iter().zip(&x0).map(|(p, x)| p * x).sum())).collect();
        let cons = rows.into_iter().map(Element::Exact).collect();
        return ConicSystem::new(ConeDesc::Orthant(n), cons, b, Mode::Exact).unwrap();
    }
}

fn criterion_orthant(run: &mut Run) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut good, mut singular) = (0, 0);
    for k in 0..50 {
        let sys = random_orthant(&mut rng);
        if let Ok(r) = facial_reduction(&sys) {
            let zero_tol = r.certificate.steps.iter().all(|s| s.tol == 0.0);
            good += usize::from(r.sd <= 1 && r.exact && r.exact_arithmetic && zero_tol);
            singular += usize::from(r.sd == 1);
            if r.sd == 1 && singular <= 10 {
                run.keep_certificate(format!("orthant-{k}"), &sys);
            }
        }
    }
    run.report("11 (polyhedral)", good == 50, format!("{good}/50 exact orthant systems with sd ≤ 1, rational decisions, zero kernel tolerance ({singular} singular)"));
    singular
}

/// Leaves of the certificate a mutation may touch: step fields other than `tol`, and `sd`.
fn mutable_leaves(v: &Value, path: String, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                if k != "tol" && k != "type" {
                    mutable_leaves(child, format!("{path}/{k}"), out);
                }
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                mutable_leaves(child, format!("{path}/{i}"), out);
            }
        }
        _ => out.push(path),
    }
}

fn mutate(leaf: &mut Value, rng: &mut ChaCha8Rng) {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    *leaf = match leaf {
        Value::Number(n) if n.is_u64() => Value::from(n.as_u64().unwrap() + rng.gen_range(1..=3)),
        Value::Number(n) => {
            let x = n.as_f64().unwrap();
            Value::from(x + sign * rng.gen_range(0.1..1.0) * (1.0 + x.abs()))
        }
        Value::String(s) => {
            let r = facered::numerics::parse_rational(s).unwrap();
            let delta = Rational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into());
            let r = if sign > 0.0 { r + delta } else { r - delta };
            Value::String(facered::numerics::format_rational(&r))
        }
        other => panic!("unexpected certificate leaf {other}"),
    };
}

fn criterion_certificates(run: &mut Run) {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut valid, mut rejected, mut tried) = (0, 0, 0);
    let mut escaped = Vec::new();
    for (name, problem, cert) in &run.certificates {
        let p = dir.path().join(format!("{name}.problem.json"));
        let c = dir.path().join(format!("{name}.cert.json"));
        write(&p, problem);
        write(&c, cert);
        if commands::validate(&p, &c).code == 0 {
            valid += 1;
        }
        let base = serde_json::to_value(cert).unwrap();
        let mut leaves = Vec::new();
        mutable_leaves(&base, String::new(), &mut leaves);
        leaves.retain(|l| l.starts_with("/steps") || l == "/sd");
        for _ in 0..MUTATIONS {
            let mut m = base.clone();
            let path = &leaves[rng.gen_range(0..leaves.len())];
            mutate(m.pointer_mut(path).unwrap(), &mut rng);
            let mc = dir.path().join("mutant.json");
            std::fs::write(&mc, m.to_string()).unwrap();
            tried += 1;
            if commands::validate(&p, &mc).code != 0 {
                rejected += 1;
            } else if escaped.len() < 5 {
                escaped.push(format!("{name}{path}"));
            }
        }
    }
    let total = run.certificates.len();
    run.report(
        "10 (certificate integrity)",
        total > 0 && valid == total && rejected == tried,
        format!("{valid}/{total} certificates validate; {rejected}/{tried} single-field mutations rejected{}", if escaped.is_empty() { String::new() } else { format!("; accepted: {}", escaped.join(", ")) }),
    );
}

fn write<T: serde::Serialize>(path: &Path, value: &T) {
    std::fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

fn main() {
    let mut run = Run { failed: 0, forms: Vec::new(), certificates: Vec::new() };
    let start = Instant::now();
    criterion_k4(&mut run);
    criterion_ladder(&mut run);
    criterion_fig1(&mut run);
    criterion_laman(&mut run);
    criterion_laman_plus(&mut run);
    criterion_chordal(&mut run);
    criterion_planar(&mut run);
    criterion_tensegrity(&mut run);
    criterion_identities(&mut run);
    criterion_orthant(&mut run);
    criterion_certificates(&mut run);
    println!("acceptance: {} failed, {:.1}s", run.failed, start.elapsed().as_secs_f64());
    if run.failed > 0 {
        std::process::exit(1);
    }
}

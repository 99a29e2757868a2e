//! The acceptance criteria, one test each. Every test writes a single
//! `PASS`/`FAIL` line straight to stdout (bypassing the harness capture) and
//! then asserts, so `cargo test --test acceptance` shows all eleven verdicts.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use pseudogram::arrangement::{arrangement_dist, circles, great_circle, weighted_frechet};
use pseudogram::cli_io::{gen, non_pappus, GenKind, GenSpec};
use pseudogram::frames::{circles_from_frame, coord_frame, orthonormalize_path, parseval_check, stiefel_dist, Frame};
use pseudogram::oriented_matroid::{check_chirotope_axioms, check_covector_axioms, om_consistency};
use pseudogram::spherical_kernel::{Vec2, Vec3};
use pseudogram::straighten::{
    basis_normalize, chord_redraw, greedy_pipeline, h_pivot_cell, h_projective_pivot, pipeline, Interpolator,
    PipelineOptions,
};
use pseudogram::{Arrangement, ChartBasis, CellComplex, Curve, Sign, UnitVec3, WeightedPseudocircle};

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, budget_s: u64, detail: &str) {
    let in_time = elapsed <= Duration::from_secs(budget_s);
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {id:>2} [{verdict}] {name}: {detail} ({:.2}s, budget {budget_s}s)", elapsed.as_secs_f64())
        .unwrap();
    out.flush().unwrap();
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded its time budget");
}

fn gaussian_vec(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn unit_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
    (0..n).map(|_| gaussian_vec(rng).normalize()).collect()
}

/// Haar-random orthogonal matrix, a reflection half of the time.
fn random_orthogonal(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let m = Matrix3::from_fn(|_, _| StandardNormal.sample(rng));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..3 {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    if rng.gen_bool(0.5) {
        q.column_mut(0).neg_mut();
    }
    q
}

fn random_point(rng: &mut ChaCha8Rng) -> UnitVec3 {
    UnitVec3::from_vec(gaussian_vec(rng))
}

/// Brute-force count of points where two closed spherical polygons cross:
/// every edge pair is tested against the meeting point of their great
/// circles, and hits within 1e-9 of each other count once.
fn brute_crossings(p: &Curve, q: &Curve) -> usize {
    let on_arc = |a: &Vec3, b: &Vec3, x: &Vec3| {
        let n = a.cross(b);
        let tol = 1e-12;
        a.cross(x).dot(&n) >= -tol && x.cross(b).dot(&n) >= -tol && x.dot(&(a + b)) > 0.0
    };
    let mut hits: Vec<Vec3> = Vec::new();
    let pv: Vec<Vec3> = p.vertices().iter().map(|v| *v.v()).collect();
    let qv: Vec<Vec3> = q.vertices().iter().map(|v| *v.v()).collect();
    for i in 0..pv.len() {
        let (a, b) = (pv[i], pv[(i + 1) % pv.len()]);
        for j in 0..qv.len() {
            let (c, d) = (qv[j], qv[(j + 1) % qv.len()]);
            let Some(x) = a.cross(&b).cross(&c.cross(&d)).try_normalize(1e-14) else { continue };
            for x in [x, -x] {
                if on_arc(&a, &b, &x) && on_arc(&c, &d, &x) && hits.iter().all(|h| (h - x).norm() > 1e-9) {
                    hits.push(x);
                }
            }
        }
    }
    hits.len()
}

#[test]
fn criterion_01_determinant_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut checked, mut bad) = (0usize, 0usize);
    for _ in 0..200 {
        let n = rng.gen_range(3..=8);
        let normals = unit_normals(&mut rng, n);
        let a = circles(&normals, 64);
        let chi = a.chirotope().expect("chirotope");
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let det = Matrix3::from_columns(&[normals[i], normals[j], normals[k]]).determinant();
                    if det.abs() <= 1e-6 {
                        continue;
                    }
                    checked += 1;
                    let want = if det > 0.0 { Sign::Pos } else { Sign::Neg };
                    bad += usize::from(chi.get(i, j, k) != want);
                }
            }
        }
    }
    report(1, "chirotope equals sign det", bad == 0, t0.elapsed(), 30, &format!("{bad} of {checked} triples differ"));
}

#[test]
fn criterion_02_cell_counts() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut failures = Vec::new();
    for n in 3..=8 {
        let a = circles(&unit_normals(&mut rng, n), 64);
        let cx = CellComplex::build(&a).expect("complex");
        let (v, e, f) = (cx.vertices.len(), cx.edges.len(), cx.faces.len());
        let cov = a.covectors().expect("covectors").len();
        let m = n * (n - 1);
        if v != m || e != 2 * m || f != m + 2 || cx.euler_characteristic() != 2 || cov != v + e + f + 1 {
            failures.push(format!("n={n}: V={v} E={e} F={f} |L|={cov}"));
        }
    }
    report(2, "great-circle cell counts", failures.is_empty(), t0.elapsed(), 10, &format!("{failures:?}"));
}

#[test]
fn criterion_03_axioms_on_corpus() {
    let t0 = Instant::now();
    let mut corpus: Vec<Arrangement> = Vec::new();
    for seed in 0..150u64 {
        let n = 3 + (seed as usize % 6);
        corpus.push(gen(&GenSpec { kind: GenKind::RandomCircles, n, amplitude: 0.0, seed }).unwrap());
    }
    for seed in 0..150u64 {
        let n = 3 + (seed as usize % 5);
        corpus.push(gen(&GenSpec { kind: GenKind::Perturbed, n, amplitude: 0.05, seed: 1000 + seed }).unwrap());
    }
    corpus.push(non_pappus());
    let mut failures = Vec::new();
    for (idx, a) in corpus.iter().enumerate() {
        let x = a.covectors().expect("covectors");
        let chi = a.chirotope().expect("chirotope");
        let (cov, chir, cons) = (check_covector_axioms(&x), check_chirotope_axioms(&chi), om_consistency(&x, &chi));
        if !(cov.ok && chir.ok && cons) {
            failures.push(format!("#{idx}: {:?} {:?} consistent={cons}", cov.violation, chir.violation));
        }
    }
    let detail = format!("{} instances, {} failures {:?}", corpus.len(), failures.len(), failures.first());
    report(3, "covector and chirotope axioms", failures.is_empty(), t0.elapsed(), 60, &detail);
}

#[test]
fn criterion_04_coord_properties() {
    let t0 = Instant::now();
    let coordinate = circles(&[Vec3::x(), Vec3::y(), Vec3::z()], 64);
    let identity_exact = coord_frame([0, 1, 2], &coordinate).unwrap().matrix() == &Matrix3::identity();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut equi, mut selfn) = (0.0f64, 0.0f64);
    for k in 0..100u64 {
        let n = 3 + (k as usize % 5);
        let a = gen(&GenSpec { kind: GenKind::Perturbed, n, amplitude: 0.05, seed: 4000 + k }).unwrap();
        let c = *coord_frame([0, 1, 2], &a).unwrap().matrix();
        let q = random_orthogonal(&mut rng);
        let cq = *coord_frame([0, 1, 2], &a.act_rotation(&q).unwrap()).unwrap().matrix();
        equi = equi.max((cq - q.transpose() * c).amax());
        let cc = *coord_frame([0, 1, 2], &a.act_rotation(&c).unwrap()).unwrap().matrix();
        selfn = selfn.max((cc - Matrix3::identity()).amax());
    }
    let ok = identity_exact && equi <= 1e-8 && selfn <= 1e-8;
    let detail = format!("identity exact={identity_exact}, equivariance {equi:.1e}, self-normalization {selfn:.1e}");
    report(4, "coord identity, equivariance, self-normalization", ok, t0.elapsed(), 20, &detail);
}

#[test]
fn criterion_05_orthonormalization() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut start, mut resid, mut equi, mut fixed) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(3..=8);
        let f = Frame::new((0..n).map(|_| gaussian_vec(&mut rng)).collect());
        start = start.max(stiefel_dist(&orthonormalize_path(&f, 0.0).unwrap(), &f));
        let g = orthonormalize_path(&f, 1.0).unwrap();
        resid = resid.max(parseval_check(&g).1);
        let q = random_orthogonal(&mut rng);
        for t in [0.37, 1.0] {
            let lhs = orthonormalize_path(&f.act(&q), t).unwrap();
            equi = equi.max(stiefel_dist(&lhs, &orthonormalize_path(&f, t).unwrap().act(&q)));
            fixed = fixed.max(stiefel_dist(&orthonormalize_path(&g, t).unwrap(), &g));
        }
    }
    let ok = start <= 1e-12 && resid <= 1e-10 && equi <= 1e-9 && fixed <= 1e-10;
    let detail = format!("q(F,0) {start:.1e}, residual {resid:.1e}, equivariance {equi:.1e}, Parseval fixed {fixed:.1e}");
    report(5, "orthonormalization path", ok, t0.elapsed(), 5, &detail);
}

#[test]
fn criterion_06_pipeline_retraction() {
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let (mut worst_resid, mut frames_seen) = (0.0f64, 0usize);
    for k in 0..100u64 {
        let n = 3 + (k as usize % 5);
        let a = gen(&GenSpec { kind: GenKind::Perturbed, n, amplitude: 0.05, seed: 6000 + k }).unwrap();
        let (f, trace) = match greedy_pipeline(&a, 20) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("seed {}: {e}", 6000 + k));
                continue;
            }
        };
        let resid = parseval_check(&f).1;
        worst_resid = worst_resid.max(resid);
        frames_seen += trace.frames.len();
        let invalid = trace.frames.iter().filter(|fr| !fr.arrangement.is_valid().unwrap_or(false)).count();
        let weights_moved = trace
            .frames
            .iter()
            .filter(|fr| fr.stage != "orthonormalize")
            .any(|fr| fr.arrangement.weights() != a.weights());
        if resid > 1e-9 || trace.frames.len() < 20 || invalid > 0 || weights_moved {
            failures.push(format!("seed {}: resid {resid:.1e}, {invalid} invalid frames, weights moved {weights_moved}", 6000 + k));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut fixed = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(3..=7);
        let f = orthonormalize_path(&Frame::new((0..n).map(|_| gaussian_vec(&mut rng)).collect()), 1.0).unwrap();
        let (g, _) = greedy_pipeline(&circles_from_frame(&f), 20).unwrap();
        fixed = fixed.max(stiefel_dist(&f, &g));
    }
    let ok = failures.is_empty() && fixed <= 1e-9;
    let detail = format!(
        "{} failures {:?}, worst residual {worst_resid:.1e}, {frames_seen} frames validated, Parseval inputs moved {fixed:.1e}",
        failures.len(),
        failures.first()
    );
    report(6, "pipeline retraction properties", ok, t0.elapsed(), 120, &detail);
}

#[test]
fn criterion_07_pipeline_equivariance() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for k in 0..25u64 {
        let n = 3 + (k as usize % 5);
        let a = gen(&GenSpec { kind: GenKind::Perturbed, n, amplitude: 0.05, seed: 7000 + k }).unwrap();
        let q = random_orthogonal(&mut rng);
        let opts = PipelineOptions { frames: 20, basis: Some([0, 1, 2]), validate_frames: false };
        match (pipeline(&a, &opts), pipeline(&a.act_rotation(&q).unwrap(), &opts)) {
            (Ok((f, _)), Ok((fq, _))) => worst = worst.max(stiefel_dist(&fq, &f.act(&q))),
            (r1, r2) => errors.push(format!("seed {}: {:?} / {:?}", 7000 + k, r1.err(), r2.err())),
        }
    }
    let ok = errors.is_empty() && worst <= 1e-8;
    report(7, "pipeline equivariance", ok, t0.elapsed(), 30, &format!("max deviation {worst:.1e}, errors {errors:?}"));
}

#[test]
fn criterion_08_deformation_validity() {
    let t0 = Instant::now();
    let samples: Vec<f64> = (0..10).map(|k| k as f64 / 9.0).collect();
    let mut failures = Vec::new();
    let mut monotone = true;
    let mut pivoted = 0usize;

    // m = 3: straightened-prefix arrangements read in the chart of their basis.
    for k in 0..50u64 {
        let n = 4 + (k as usize % 4);
        let a = gen(&GenSpec { kind: GenKind::Perturbed, n, amplitude: 0.05, seed: 8000 + k }).unwrap();
        let chordal = chord_redraw(&basis_normalize(&a, [0, 1, 2]).unwrap(), &[0, 1, 2]).unwrap();
        let normals: Vec<Vec3> =
            (0..3).map(|i| chordal.element(i).curve().unwrap().great_circle_normal(1e-9).unwrap()).collect();
        let chart = ChartBasis::new(normals[0], normals[1], normals[2]).unwrap();
        let lines: Vec<_> = chordal
            .elements
            .iter()
            .map(|e| pseudogram::straighten::ChartPseudoline::from_curve(e.curve().unwrap(), &chart).unwrap())
            .collect();
        let out = h_projective_pivot(&lines, &samples).unwrap();
        for line in &lines {
            if let Some(p) = pseudogram::straighten::ProjectivePivot::plan(line).unwrap() {
                pivoted += 1;
                let phis: Vec<f64> = samples.iter().map(|&t| p.angle(t).abs()).collect();
                monotone &= phis.windows(2).all(|w| w[1] <= w[0] + 1e-15) && phis[9] == 0.0;
            }
        }
        for (s, sample) in out.iter().enumerate() {
            let lifted: Vec<Curve> = sample.iter().map(|l| l.lift(&chart)).collect();
            for i in 0..n {
                for j in i + 1..n {
                    let c = brute_crossings(&lifted[i], &lifted[j]);
                    if c != 2 {
                        failures.push(format!("projective seed {} t={:.2} pair ({i},{j}): {c}", 8000 + k, samples[s]));
                    }
                }
            }
        }
    }

    // m > 3: three straight prefix lines, a straight pivot line, and a line
    // bent inside the prefix cell where it meets the pivot line.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let chart = ChartBasis::standard();
    let line_meet = |(p, d): (Vec2, Vec2), (q, e): (Vec2, Vec2)| -> Option<(f64, Vec2)> {
        let den = d.x * e.y - d.y * e.x;
        (den.abs() > 1e-9).then(|| {
            let s = ((q - p).x * e.y - (q - p).y * e.x) / den;
            (s, p + d * s)
        })
    };
    let mut built = 0;
    while built < 50 {
        let mut straight: Vec<(Vec2, Vec2)> = (0..4)
            .map(|_| {
                let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                (Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), Vec2::new(th.cos(), th.sin()))
            })
            .collect();
        let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let j_line = (Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)), Vec2::new(th.cos(), th.sin()));
        straight.push(j_line);
        let Some((s0, p1)) = line_meet(j_line, straight[3]) else { continue };
        // Nearest prefix crossings along line j on either side of p1.
        let along: Vec<(f64, Vec2)> = (0..3).filter_map(|i| line_meet(j_line, straight[i])).collect();
        let before = along.iter().filter(|(s, _)| *s < s0 - 1e-3).max_by(|x, y| x.0.total_cmp(&y.0));
        let after = along.iter().filter(|(s, _)| *s > s0 + 1e-3).min_by(|x, y| x.0.total_cmp(&y.0));
        let (Some(&(_, a)), Some(&(_, b))) = (before, after) else { continue };
        // Move the crossing with the pivot line along it, staying in the cell.
        let (_, dm) = straight[3];
        let bound: Vec<f64> = (0..3)
            .filter_map(|i| line_meet((p1, dm), straight[i]))
            .map(|(s, _)| s)
            .filter(|s| *s > 1e-3)
            .collect();
        let reach = bound.iter().cloned().fold(1.0, f64::min);
        let p0 = p1 + dm * (reach * rng.gen_range(0.2..0.8));
        let mut lines: Vec<_> =
            straight[..4].iter().map(|(p, d)| pseudogram::straighten::ChartPseudoline::line(*p, *d)).collect();
        lines.push(pseudogram::straighten::ChartPseudoline::polyline(vec![a, p0, b], j_line.1));
        let base: Vec<Curve> = lines.iter().map(|l| l.lift(&chart)).collect();
        if (0..4).any(|i| brute_crossings(&base[4], &base[i]) != 2) {
            continue;
        }
        built += 1;
        let out = h_pivot_cell(&lines, &[0, 1, 2], 3, 4, &samples).unwrap();
        if !out.last().unwrap().simplified().is_straight() {
            failures.push(format!("cell pivot instance {built}: not straight at t=1"));
        }
        for (s, l) in out.iter().enumerate() {
            let c = l.lift(&chart);
            for (i, other) in base.iter().enumerate().take(4) {
                let k = brute_crossings(&c, other);
                if k != 2 {
                    failures.push(format!("cell pivot instance {built} t={:.2} line {i}: {k}", samples[s]));
                }
            }
        }
    }
    let ok = failures.is_empty() && monotone && pivoted > 0;
    let detail =
        format!("{pivoted} projective pivots, 50 cell pivots, monotone={monotone}, {} failures {:?}", failures.len(), failures.first());
    report(8, "pivot deformations preserve crossings", ok, t0.elapsed(), 30, &detail);
}

#[test]
fn criterion_09_frechet_bound() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..100u64 {
        let pick = |rng: &mut ChaCha8Rng, seed: u64| {
            let a = gen(&GenSpec { kind: GenKind::Perturbed, n: 3, amplitude: 0.1, seed }).unwrap();
            let w: f64 = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.1..3.0) };
            a.element(0).with_weight(w)
        };
        let (x, y) = (pick(&mut rng, 9000 + 2 * k), pick(&mut rng, 9001 + 2 * k));
        worst_excess = worst_excess.max(weighted_frechet(&x, &y) - x.weight() - y.weight());
    }
    let mut worst_gap = 0.0f64;
    for _ in 0..20 {
        let c = great_circle(&gaussian_vec(&mut rng), None, 64);
        let (wa, wb) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let a = WeightedPseudocircle::new(wa, c.clone()).unwrap();
        let b = WeightedPseudocircle::new(wb, c.reversed()).unwrap();
        worst_gap = worst_gap.max((weighted_frechet(&a, &b) - wa - wb).abs());
        let one = |e: WeightedPseudocircle| Arrangement::new(vec![e], true);
        worst_gap = worst_gap.max((arrangement_dist(&one(a), &one(b)).unwrap() - wa - wb).abs());
    }
    let ok = worst_excess <= 0.02 && worst_gap <= 0.02;
    let detail = format!("max dist-(|a|+|b|) {worst_excess:.3}, reversal pair gap {worst_gap:.3}");
    report(9, "weighted Fréchet bound", ok, t0.elapsed(), 20, &detail);
}

#[test]
fn criterion_10_interpolation() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let (mut vertex_exact, mut diag) = (true, 0.0f64);
    let (mut pairs, mut mismatches, mut points) = (0, 0usize, 0usize);
    while pairs < 20 {
        let n = rng.gen_range(3..=6);
        let normals = unit_normals(&mut rng, n);
        let a = circles(&normals, 64);
        let moved: Vec<Vec3> = normals.iter().map(|v| (v + gaussian_vec(&mut rng) * 0.03).normalize()).collect();
        let b = circles(&moved, 64);
        if a.covectors().unwrap() != b.covectors().unwrap() {
            continue;
        }
        pairs += 1;
        let diag_map = Interpolator::new(&a, &a).unwrap();
        for v in &CellComplex::build(&a).unwrap().vertices {
            vertex_exact &= diag_map.map(&v.point).unwrap() == v.point;
        }
        let it = Interpolator::new(&a, &b).unwrap();
        for _ in 0..1000 {
            let x = random_point(&mut rng);
            diag = diag.max(diag_map.map(&x).unwrap().chord(&x));
            let y = it.map(&x).unwrap();
            points += 1;
            mismatches += usize::from(a.sign_vector(&y) != b.sign_vector(&x));
        }
    }
    let ok = vertex_exact && diag <= 1e-9 && mismatches == 0;
    let detail = format!("vertices exact={vertex_exact}, diagonal {diag:.1e}, {mismatches} sign mismatches in {points} points");
    report(10, "PL interpolation", ok, t0.elapsed(), 30, &detail);
}

#[test]
fn criterion_11_non_pappus() {
    let t0 = Instant::now();
    let a = non_pappus();
    let r = a.validate().unwrap();
    let chi = a.chirotope().unwrap();
    let axioms = check_chirotope_axioms(&chi).ok;
    let (f, trace) = greedy_pipeline(&a, 20).unwrap();
    let out_chi = trace.frames.last().unwrap().arrangement.chirotope().unwrap();
    let differs = out_chi != chi;
    let ok = r.valid && r.spanning && a.n() == 9 && axioms && differs && parseval_check(&f).0;
    let detail = format!("valid={} spanning={} axioms={axioms} output chirotope differs={differs}", r.valid, r.spanning);
    report(11, "non-Pappus regression", ok, t0.elapsed(), 10, &detail);
}

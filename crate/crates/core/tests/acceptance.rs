//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use margulis_bounds::assembly::{
    scaling_fit, theorem1_sweep, theorem2_sequence, FitTarget, ModelManifold, PipelineOptions, ThickPartSpec,
};
use margulis_bounds::cohomology::{boundary_image_check, symplectic_form, IntegerMatrix};
use margulis_bounds::covering_bound::{evaluate, CoverSpec, CtExponent, Parameter, Sweep};
use margulis_bounds::sturm_liouville::{
    convergence_study, first_eigenvalue, Boundary, MeshSpec, SlProblem, Weight,
};
use margulis_bounds::tube_model::FillingSlope;
use margulis_bounds::tube_spectrum::{collar_function_problem, t_form_problem, theta_form_problem, WeightMode};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn constant(left: f64, right: f64, bcs: (Boundary, Boundary), n: usize) -> SlProblem<f64> {
    SlProblem::new(Weight::Constant(1.0), Weight::Constant(1.0), (left, right), bcs, MeshSpec::uniform(n).unwrap())
        .unwrap()
}

fn criterion_1() -> Outcome {
    let nn = constant(0.0, PI, (Boundary::Neumann, Boundary::Neumann), 4096);
    let (l1, t1) = timed(|| first_eigenvalue(&nn, true).map_err(|e| e.to_string()));
    let dn = constant(0.0, PI / 2.0, (Boundary::Dirichlet, Boundary::Neumann), 4096);
    let (l2, t2) = timed(|| first_eigenvalue(&dn, false).map_err(|e| e.to_string()));
    let (l1, l2) = (l1?, l2?);
    let (e1, e2) = ((l1 - 1.0).abs(), (l2 - 1.0).abs());
    check(
        e1 < 1e-4 && e2 < 1e-4 && t1 < Duration::from_secs(1) && t2 < Duration::from_secs(1),
        format!("NN rel err {e1:.2e} in {t1:?}, DN rel err {e2:.2e} in {t2:?}"),
    )
}

fn criterion_2() -> Outcome {
    let nn = constant(0.0, PI, (Boundary::Neumann, Boundary::Neumann), 64);
    let rep = convergence_study(&nn, &[64, 128, 256, 512], Some(1.0)).map_err(|e| e.to_string())?;
    let min_ratio = rep.errors.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
    let elements = [128, 256, 512, 1024];
    let mesh = MeshSpec::graded(128).unwrap();
    let t = convergence_study(&t_form_problem(10.0, mesh, WeightMode::Geometric).unwrap(), &elements, None)
        .map_err(|e| e.to_string())?;
    let th = convergence_study(&theta_form_problem(10.0, mesh, WeightMode::Geometric).unwrap(), &elements, None)
        .map_err(|e| e.to_string())?;
    let ot = t.orders.iter().copied().fold(f64::INFINITY, f64::min);
    let oth = th.orders.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        min_ratio >= 3.5 && ot >= 1.5 && oth >= 1.5,
        format!("constant-weight min error ratio {min_ratio:.3}, tanh order {ot:.3}, coth order {oth:.3}"),
    )
}

fn criterion_3() -> Outcome {
    let radii = [5.0, 10.0, 20.0, 40.0];
    let (res, elapsed) = timed(|| -> Result<Vec<Vec<(f64, f64)>>, String> {
        let mut rows = Vec::new();
        for &n in &[1024usize, 2048] {
            let mesh = MeshSpec::graded(n).unwrap();
            let mut vals: Vec<(f64, f64)> = Vec::new();
            for &r in &radii {
                let lt = first_eigenvalue(&t_form_problem(r, mesh, WeightMode::Geometric).unwrap(), true)
                    .map_err(|e| e.to_string())?;
                let lth = first_eigenvalue(&theta_form_problem(r, mesh, WeightMode::Geometric).unwrap(), false)
                    .map_err(|e| e.to_string())?;
                vals.push((lt * r * r, lth * r * r));
            }
            rows.push(vals);
        }
        Ok(rows)
    });
    let rows = res?;
    let coarse = &rows[0];
    let mut max_consecutive: f64 = 0.0;
    for w in coarse.windows(2) {
        max_consecutive = max_consecutive.max((w[1].0 / w[0].0 - 1.0).abs()).max((w[1].1 / w[0].1 - 1.0).abs());
    }
    let mut max_mesh: f64 = 0.0;
    for (a, b) in coarse.iter().zip(&rows[1]) {
        max_mesh = max_mesh.max((b.0 / a.0 - 1.0).abs()).max((b.1 / a.1 - 1.0).abs());
    }
    let lo = coarse.iter().map(|v| v.0.min(v.1)).fold(f64::INFINITY, f64::min);
    let hi = coarse.iter().map(|v| v.0.max(v.1)).fold(0.0, f64::max);
    check(
        lo > 0.0 && max_consecutive < 0.2 && max_mesh < 0.01 && elapsed < Duration::from_secs(30),
        format!(
            "band [{lo:.3}, {hi:.3}], max consecutive deviation {max_consecutive:.3}, mesh-doubling change {max_mesh:.2e}, {elapsed:?}"
        ),
    )
}

/// Factor in `(1/τ, τ)`: τ raised to a squashed random trigonometric sum.
fn perturbation(rng: &mut ChaCha8Rng, tau: f64) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let modes: Vec<(f64, f64, f64)> =
        (0..4).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0), rng.gen_range(0.0..2.0 * PI))).collect();
    let ln_tau = tau.ln();
    move |r| {
        let s: f64 = modes.iter().map(|&(a, w, p)| a * (w * r + p).sin()).sum();
        (ln_tau * s.tanh()).exp()
    }
}

fn criterion_4() -> Outcome {
    let tau: f64 = 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mesh = MeshSpec::graded(256).unwrap();
    let bases = [
        (t_form_problem(10.0, mesh, WeightMode::Geometric).unwrap(), true),
        (theta_form_problem(6.0, mesh, WeightMode::Geometric).unwrap(), false),
        (collar_function_problem(1.0, 4.0, mesh, WeightMode::Geometric).unwrap(), true),
    ];
    let reference: Vec<f64> = bases.iter().map(|(p, d)| first_eigenvalue(p, *d).unwrap()).collect();
    let (lo, hi) = (tau.powi(-2), tau.powi(2));
    let slack = 1e-9;
    let mut violations = 0;
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for trial in 0..100 {
        let (base, drop) = &bases[trial % bases.len()];
        let f = perturbation(&mut rng, tau);
        let g = perturbation(&mut rng, tau);
        let (s0, m0) = (base.stiffness.clone(), base.mass.clone());
        let p = base.with_weights(Weight::custom(move |r| s0.eval(r) * f(r)), Weight::custom(move |r| m0.eval(r) * g(r)));
        let l = first_eigenvalue(&p, *drop).map_err(|e| e.to_string())?;
        let ratio = l / reference[trial % bases.len()];
        rmin = rmin.min(ratio);
        rmax = rmax.max(ratio);
        if ratio < lo * (1.0 - slack) || ratio > hi * (1.0 + slack) {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations in 100 trials, ratios in [{rmin:.3}, {rmax:.3}] vs [{lo:.3}, {hi:.3}]"))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn criterion_5() -> Outcome {
    let sym = evaluate(&CoverSpec::two_open(q(1), q(1), q(1), q(0), q(0), 0, CtExponent::Two)).map_err(|e| e.to_string())?;
    let grad = evaluate(&CoverSpec::two_open(q(1), q(1), q(1), q(1), q(1), 0, CtExponent::One)).map_err(|e| e.to_string())?;
    let exact = sym.bound == BigRational::new(1.into(), 18.into()) && grad.bound == BigRational::new(1.into(), 42.into());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let rat = |rng: &mut ChaCha8Rng, lo: i64| BigRational::new(rng.gen_range(lo..50).into(), rng.gen_range(1..20).into());
    let mut violations = 0;
    for _ in 0..200 {
        let e = if rng.gen_bool(0.5) { CtExponent::One } else { CtExponent::Two };
        let cover = CoverSpec::two_open(rat(&mut rng, 1), rat(&mut rng, 1), rat(&mut rng, 1), rat(&mut rng, 0), rat(&mut rng, 0), 0, e);
        let base = evaluate(&cover).unwrap().bound;
        let up = rat(&mut rng, 1);
        let factor = q(1) + up;
        for p in [Parameter::OpenMu(1), Parameter::OpenMu(2), Parameter::OverlapMu(1, 2)] {
            let b = &sensitivity_one(&cover, &p, Sweep::Scale(vec![factor.clone()]));
            if *b < base {
                violations += 1;
            }
        }
        for p in [Parameter::CRho, Parameter::CT] {
            let b = &sensitivity_one(&cover, &p, Sweep::Scale(vec![factor.clone()]));
            if *b > base {
                violations += 1;
            }
        }
    }
    check(
        exact && violations == 0,
        format!("symmetric = {}, gradient = {}, {violations} monotonicity violations over 200 covers", sym.bound, grad.bound),
    )
}

fn sensitivity_one(cover: &CoverSpec<BigRational>, p: &Parameter, s: Sweep<BigRational>) -> BigRational {
    margulis_bounds::covering_bound::sensitivity(cover, p, &s).unwrap().remove(0).bound
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut bad_identity = 0;
    let mut bad_det = 0;
    for t in 0..200 {
        let n = 1 + t % 6;
        let rows: Vec<Vec<BigInt>> =
            (0..n).map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()).collect();
        let p = IntegerMatrix::from_rows(&rows).unwrap();
        let adj = p.adjugate().unwrap();
        let det = p.det().unwrap();
        let identity = IntegerMatrix::<BigInt>::identity(n).scale(&det);
        if p.mul(&adj).unwrap() != identity || adj.mul(&p).unwrap() != identity {
            bad_identity += 1;
        }
        if adj.det().unwrap() != num_traits::pow(det.clone(), n - 1) {
            bad_det += 1;
        }
    }
    // single tube, slope (a, b): the inverse of [[1, a], [0, b]]
    let (a, b) = (3i64, 7i64);
    let m = ModelManifold::uniform(
        ThickPartSpec::default(),
        1,
        4.0,
        FillingSlope::new(a, b).unwrap(),
        1.0,
        PipelineOptions::default(),
    )
    .unwrap();
    let sd = m.section_data().unwrap();
    let inv: Vec<Vec<Ratio<i64>>> = (0..2)
        .map(|i| (0..2).map(|j| Ratio::new(*sd.adj_p.get(i, j), sd.det_p)).collect())
        .collect();
    let expected = vec![vec![Ratio::from_integer(1), Ratio::new(-a, b)], vec![Ratio::from_integer(0), Ratio::new(1, b)]];
    let section_ok = inv == expected;
    check(
        bad_identity == 0 && bad_det == 0 && section_ok,
        format!(
            "adjugate identity failures {bad_identity}/200, det(adj) failures {bad_det}/200, T = [[{}, {}], [{}, {}]]",
            inv[0][0], inv[0][1], inv[1][0], inv[1][1]
        ),
    )
}

fn criterion_7() -> Outcome {
    let j = symplectic_form::<i64>(1);
    let solid = boundary_image_check(&IntegerMatrix::from_i64_rows(&[&[1], &[0]]).unwrap(), &j).map_err(|e| e.to_string())?;
    let full = boundary_image_check(&IntegerMatrix::<i64>::identity(2), &j).map_err(|e| e.to_string())?;
    check(
        solid.passes() && solid.rank == 1 && solid.isotropic && !full.isotropic && !full.passes(),
        format!(
            "solid torus rank {} of {} isotropic={}, full image isotropic={}",
            solid.rank,
            2 * solid.half_dimension,
            solid.isotropic,
            full.isotropic
        ),
    )
}

fn criterion_8() -> Outcome {
    let radii = [5.0, 10.0, 15.0, 20.0, 30.0, 40.0];
    let slope = FillingSlope::new(1, 7).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for k in [1usize, 2] {
        let reps = theorem1_sweep(ThickPartSpec::default(), k, &radii, slope, 1.0, PipelineOptions::default())
            .map_err(|e| e.to_string())?;
        let span = reps.last().unwrap().d / reps[0].d;
        let norm: Vec<f64> = reps.iter().map(|r| r.mu_k1_normalized()).collect();
        let band = norm.iter().copied().fold(0.0, f64::max) / norm.iter().copied().fold(f64::INFINITY, f64::min);
        let fit = scaling_fit(&reps, FitTarget::MuK1).map_err(|e| e.to_string())?;
        let floor = reps.iter().map(|r| r.mu1_normalized_d()).fold(f64::INFINITY, f64::min);
        let ordered = reps.iter().all(|r| r.mu1_lb <= r.mu_k1_lb);
        ok &= span >= 4.0 && band <= 10.0 && (-2.3..=-1.7).contains(&fit.slope) && floor > 0.0 && ordered;
        detail.push(format!("k={k}: d span {span:.2}, band {band:.3}, slope {:.3}, min mu1*d^4*e^(2kd) {floor:.3e}", fit.slope));
    }
    check(ok, detail.join("; "))
}

fn criterion_9() -> Outcome {
    let opts = PipelineOptions::default();
    let template =
        ModelManifold::uniform(ThickPartSpec::default(), 1, 4.0, FillingSlope::new(1, 8).unwrap(), 1.0, opts).unwrap();
    let indices: Vec<u64> = (8..=64).collect();
    let rows = theorem2_sequence(&template, &indices, 2.0).map_err(|e| e.to_string())?;
    let passing: Vec<_> = rows.iter().filter(|r| r.regime_ok).collect();
    let cap = ThickPartSpec::<f64>::default().c_prime;
    let same_cap = passing.iter().all(|r| r.c_t == cap);
    let norm: Vec<f64> = passing.iter().map(|r| r.normalized()).collect();
    let band = norm.iter().copied().fold(0.0, f64::max) / norm.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        !passing.is_empty() && same_cap && band <= 10.0,
        format!("{}/{} rows in regime, identical C_T cap: {same_cap}, band {band:.3}", passing.len(), rows.len()),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_margulis-bounds");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = std::process::Command::new(bin)
            .args(["theorem1", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("theorem1 exited with {status}"));
        }
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(
        outputs[0] == outputs[1] && !outputs[0].is_empty(),
        format!("two runs, {} bytes each, identical: {}", outputs[0].len(), outputs[0] == outputs[1]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("constant-weight controls", criterion_1),
        ("convergence order", criterion_2),
        ("tube C/R^2 scaling", criterion_3),
        ("quasi-isometry ratio bound", criterion_4),
        ("covering bound evaluator", criterion_5),
        ("integer algebra", criterion_6),
        ("isotropy check", criterion_7),
        ("first-eigenvalue and mu_(k+1) pipeline", criterion_8),
        ("filling sequence pipeline", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d}", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

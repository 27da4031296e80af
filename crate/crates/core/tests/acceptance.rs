//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion to
//! stderr (outside the test capture) and fails if any criterion fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{brute_paths, dense, q, DirectGolden, DirectMap, DirectShift3, DirectTent};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tamegraph::graph::example1::{third_lap_word, Blade};
use tamegraph::graph::{example1, full_shift, golden_mean, refinement, transition_matrix, CylinderWord, MarkovMapSpec};
use tamegraph::horseshoe::horseshoe_sequence;
use tamegraph::slope::{
    analyze_slope, build_constant_slope_model, check_subeigenvector, evaluate_model, example1_eigenvector,
    exact_perron_vector, lipschitz_report, perron_vector, to_rational, vj_subeigenvector, ConstantSlopeModel,
    RowClass, SlopeMode, SubEigenvector, VjOptions,
};
use tamegraph::symbolic::{arc_measure_n, delta, delta_identities_check, itinerary, rho_distance, Gamma, PointCoord};
use tamegraph::transition::{gurevich_entropy_with, spectral_radius, CountableMatrix, DepthSchedule, FiniteMatrix};
use tamegraph::{Quadratic, Scalar};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(start: Instant, budget: Duration) -> Outcome {
    let took = start.elapsed();
    check!(took < budget, "took {took:?}, budget {budget:?}");
    Ok(format!("{:.3}s", took.as_secs_f64()))
}

fn whole(spec: &MarkovMapSpec) -> FiniteMatrix {
    let m = transition_matrix(spec);
    FiniteMatrix::principal(&m, m.enumeration().to_vec()).unwrap()
}

fn pow2(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << n as usize)
}

fn example1_exact_eigen() -> Outcome {
    let start = Instant::now();
    let spec = example1(12).map_err(|e| e.to_string())?;
    let m = transition_matrix(&spec);
    let v = example1_eigenvector::<BigRational>();
    let report = check_subeigenvector(&m, &v.lambda, &v, spec.arcs(), 0.0).map_err(|e| e.to_string())?;
    check!(report.rows.len() == spec.arcs().len(), "not every prefix row was checked");
    for row in &report.rows {
        check!(row.class == RowClass::Eigen && row.slack.is_zero(), "row {} has slack {}", row.arc, row.slack);
    }
    let blade = |b: Blade| -> BigRational { b.laps().iter().map(|l| v.entry(&l.label()).unwrap()).sum() };
    for n in 0..=12u32 {
        check!(blade(Blade::A(n)) == pow2(n) + q(1, 1), "v_A{n} = {}", blade(Blade::A(n)));
        check!(blade(Blade::C(n.max(1) as u64)) == q(1, 2), "v_C{n}");
    }
    check!(blade(Blade::B) == q(1, 1), "v_B");
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("{} rows with zero slack, blade sums 2^n+1, 1, 1/2 for n <= 12 ({t})", report.rows.len()))
}

fn third_lap_obstruction() -> Outcome {
    let start = Instant::now();
    let spec = example1(10).map_err(|e| e.to_string())?;
    let m = transition_matrix(&spec);
    let v = example1_eigenvector::<BigRational>();
    // the partial products 2 · 3/4 · 5/6 · ... · (2^k+1)/(2^k+2)
    let mut product = q(2, 1);
    for n in 0..=30u32 {
        let k = n + 1;
        let factor = (pow2(k) + q(1, 1)) / (pow2(k) + q(2, 1));
        product *= factor;
        let word = CylinderWord::new(&m, third_lap_word(n)).map_err(|e| e.to_string())?;
        let d = delta(&word, &v).map_err(|e| e.to_string())?;
        check!(d == q(1, 1) + q(1, 1) / pow2(n + 1), "Δ at n = {n} is {d}");
        check!(d == product, "Δ at n = {n} differs from the partial product {product}");
    }
    let out = analyze_slope(&spec, &v, 30).map_err(|e| e.to_string())?;
    check!(out.model.is_none(), "a model was built from a non-summable vector");
    let warned = out.warnings.iter().any(|w| w.word.word == third_lap_word(30));
    check!(warned, "no positive-length limit cylinder warning along the third laps");
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("Δ = 1 + 2^-(n+1) for n <= 30, warning emitted ({t})"))
}

fn entropy_convergence() -> Outcome {
    let start = Instant::now();
    let log2 = 2f64.ln();
    let m = transition_matrix(&example1(15).map_err(|e| e.to_string())?);
    let est = gurevich_entropy_with(&m, &"b".into(), 20, 1e-9, DepthSchedule::Doubling).map_err(|e| e.to_string())?;
    let values: Vec<f64> = est.bounds.iter().map(|b| b.log_radius).collect();
    check!(values.windows(2).all(|w| w[0] <= w[1]), "bounds decrease: {values:?}");
    check!(values.iter().all(|&x| x <= log2 + 1e-6), "a bound exceeds log 2: {values:?}");
    check!(est.value >= log2 - 1e-3, "best bound {} is below log 2 - 1e-3", est.value);
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("best lower bound {:.6} (log 2 - {:.2e}) over {} truncations ({t})", est.value, log2 - est.value, values.len()))
}

fn golden_spectral_radius() -> Outcome {
    let a = whole(&golden_mean());
    let start = Instant::now();
    let r = spectral_radius(&a, 1e-12).map_err(|e| e.to_string())?;
    let t = within(start, Duration::from_millis(100))?;
    check!((r.value - 1.618_033_988_749_895).abs() < 1e-9, "radius {}", r.value);
    Ok(format!("radius {} ({t})", r.value))
}

fn horseshoe_bound() -> Outcome {
    let spec = golden_mean();
    let m = transition_matrix(&spec);
    let seq = horseshoe_sequence(&m, &"0".into(), 40).map_err(|e| e.to_string())?;
    let row = &seq.rows[39];
    check!(row.count == BigUint::from(165_580_141u64), "m00(40) = {}", row.count);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let bound = row.bound.ok_or("no loop of length 40")?;
    check!((bound - phi.ln()).abs() < 0.02, "(1/40) log m00(40) = {bound}");
    let (_, rows) = dense(&m);
    for n in 1..=12 {
        check!(seq.rows[n - 1].count == BigUint::from(brute_paths(&rows, 0, 0, n)), "count at n = {n}");
    }
    Ok(format!("(1/40) log m00(40) = {bound:.6}, log phi = {:.6}; counts match enumeration for n <= 12", phi.ln()))
}

fn vere_jones() -> Outcome {
    let m = transition_matrix(&full_shift(2).map_err(|e| e.to_string())?);
    let out = vj_subeigenvector(&m, 3.0, &"0".into(), VjOptions::default()).map_err(|e| e.to_string())?;
    let v0 = out.vector.entry(&"0".into()).unwrap();
    let v1 = out.vector.entry(&"1".into()).unwrap();
    check!((v0 - 2.0).abs() < 1e-9 && (v1 - 1.0).abs() < 1e-9, "v = ({v0}, {v1})");
    let row1 = out.residual.row(&"1".into()).ok_or("row 1 missing")?;
    check!(row1.class == RowClass::Eigen, "row 1 is {:?}", row1.class);
    check!(out.residual.deficient_rows() == vec![&"0".into()], "deficient rows {:?}", out.residual.deficient_rows());
    let row0 = out.residual.row(&"0".into()).ok_or("row 0 missing")?;
    let want = 3.0 * (v0 - 1.0);
    check!((row0.image - want).abs() < 1e-9, "(Mv)_0 = {} but lambda(v_0 - 1) = {want}", row0.image);
    Ok(format!("v = ({v0:.12}, {v1:.12}), (Mv)_0 = {:.12}", row0.image))
}

fn global<S: Scalar>(model: &ConstantSlopeModel<S>, p: &PointCoord<S>) -> S {
    let mut x = S::zero();
    for a in model.arcs() {
        if *a == p.arc {
            return x + p.offset.clone();
        }
        x = x + model.length(a).unwrap();
    }
    panic!("unknown arc {}", p.arc)
}

fn local<S: Scalar>(model: &ConstantSlopeModel<S>, x: &S) -> PointCoord<S> {
    let mut rest = x.clone();
    let arcs = model.arcs();
    for (k, a) in arcs.iter().enumerate() {
        let len = model.length(a).unwrap();
        if rest <= len || k + 1 == arcs.len() {
            return PointCoord { arc: a.clone(), offset: rest };
        }
        rest = rest - len;
    }
    unreachable!()
}

fn itineraries_agree<S: Scalar>(model: &ConstantSlopeModel<S>, oracle: &dyn DirectMap<S>, points: Vec<S>) -> Result<(), String> {
    for x in points {
        let it = itinerary(model, &local(model, &x), 12).map_err(|e| e.to_string())?;
        check!(it.ambiguous.is_none(), "orbit of {x} is ambiguous");
        let mut y = x.clone();
        for k in 0..=12 {
            if k > 0 {
                y = oracle.apply(&y);
            }
            check!(it.word.word[k].as_str() == oracle.letter(&y).to_string(), "x = {x}: letter {k} differs");
            check!(global(model, &it.orbit[k]) == y, "x = {x}: point {k} differs");
        }
    }
    Ok(())
}

fn random_rationals(seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..200).map(|_| q(rng.gen_range(1..999_983), 999_983)).collect()
}

fn model_correctness() -> Outcome {
    let builtins = [("tent", full_shift(2).unwrap()), ("3-lap tent", full_shift(3).unwrap()), ("golden mean", golden_mean())];
    for (name, spec) in &builtins {
        let v = exact_perron_vector(&whole(spec)).map_err(|e| e.to_string())?;
        let model = build_constant_slope_model(spec, &v).map_err(|e| e.to_string())?;
        for a in spec.arcs() {
            let lhs = model.image_length(a).unwrap();
            let rhs = model.lambda().clone() * model.length(a).unwrap();
            check!(lhs == rhs, "{name}: arc {a} has image length {lhs}, lambda v = {rhs}");
        }
    }
    let rational = |spec: &MarkovMapSpec| {
        let v = to_rational(&exact_perron_vector(&whole(spec)).unwrap()).unwrap();
        build_constant_slope_model(spec, &v).unwrap()
    };
    itineraries_agree(&rational(&builtins[0].1), &DirectTent, random_rationals(11))?;
    itineraries_agree(&rational(&builtins[1].1), &DirectShift3, random_rationals(12))?;
    let golden = build_constant_slope_model(&builtins[2].1, &exact_perron_vector(&whole(&builtins[2].1)).unwrap()).unwrap();
    itineraries_agree(&golden, &DirectGolden, random_rationals(13).into_iter().map(Quadratic::rational).collect())?;
    Ok("image lengths exact on 3 built-ins; 200 points x 12 steps agree with the direct maps".into())
}

fn identity_suite_for<S: Scalar>(name: &str, spec: &MarkovMapSpec, v: &SubEigenvector<S>, normalize: bool) -> Result<usize, String> {
    let m = transition_matrix(spec);
    let mut checked = 0;
    for n in 0..8 {
        for w in refinement(spec, n, usize::MAX).map_err(|e| e.to_string())?.words {
            let c = delta_identities_check(&m, v, &w).map_err(|e| e.to_string())?;
            check!(c.passed(), "{name}: identity fails at {w}");
            checked += 1;
        }
    }
    if normalize {
        for n in 0..=10 {
            let total = arc_measure_n(&m, v, &Gamma::Whole, n).map_err(|e| e.to_string())?;
            check!(total == S::one(), "{name}: level {n} sums to {total}");
        }
    }
    Ok(checked)
}

fn delta_identities() -> Outcome {
    let rational = |spec: &MarkovMapSpec| to_rational(&exact_perron_vector(&whole(spec)).unwrap()).unwrap();
    let tent = full_shift(2).unwrap();
    let shift3 = full_shift(3).unwrap();
    let golden = golden_mean();
    let mut words = 0;
    words += identity_suite_for("tent", &tent, &rational(&tent), true)?;
    words += identity_suite_for("3-lap tent", &shift3, &rational(&shift3), true)?;
    words += identity_suite_for("golden mean", &golden, &exact_perron_vector(&whole(&golden)).unwrap(), true)?;
    let e1 = example1(5).map_err(|e| e.to_string())?;
    words += identity_suite_for("example1", &e1, &example1_eigenvector::<BigRational>(), false)?;
    Ok(format!("{words} words checked exactly; level sums equal 1 for n <= 10 on the finite built-ins"))
}

fn random_point(rng: &mut ChaCha8Rng, model: &ConstantSlopeModel<f64>) -> PointCoord<f64> {
    let arcs = model.arcs();
    let a = &arcs[rng.gen_range(0..arcs.len())];
    PointCoord { arc: a.clone(), offset: rng.gen::<f64>() * model.length(a).unwrap() }
}

fn metric_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in [golden_mean(), full_shift(2).unwrap()] {
        let model = build_constant_slope_model(&spec, &perron_vector(&whole(&spec), 1e-13).unwrap()).unwrap();
        let rho = |a: &PointCoord<f64>, b: &PointCoord<f64>| *rho_distance(&model, a, b).unwrap().value();
        for _ in 0..100 {
            let (x, y, z) = (random_point(&mut rng, &model), random_point(&mut rng, &model), random_point(&mut rng, &model));
            check!(rho(&x, &z) <= rho(&x, &y) + rho(&y, &z) + 1e-12, "triangle inequality fails at {x}, {y}, {z}");
        }
        let lambda = *model.lambda();
        for _ in 0..500 {
            let (x, y) = (random_point(&mut rng, &model), random_point(&mut rng, &model));
            let (fx, fy) = (evaluate_model(&model, &x).unwrap(), evaluate_model(&model, &y).unwrap());
            check!(rho(&fx, &fy) <= lambda * rho(&x, &y) + 1e-9, "Lipschitz bound fails at {x}, {y}");
        }
    }
    Ok("100 triangles and 500 Lipschitz pairs on golden mean and tent".into())
}

fn lipschitz() -> Outcome {
    let spec = full_shift(2).unwrap();
    let m = transition_matrix(&spec);
    let lambda = (2f64.ln() + 0.05).exp();
    let vj = vj_subeigenvector(&m, lambda, &"0".into(), VjOptions::default()).map_err(|e| e.to_string())?;
    let model = build_constant_slope_model(&spec, &vj.vector).map_err(|e| e.to_string())?;
    check!(model.mode() == SlopeMode::Bounded, "model is not bounded-slope");
    let h = gurevich_entropy_with(&m, &"0".into(), 8, 1e-12, DepthSchedule::Doubling).map_err(|e| e.to_string())?;
    let report = lipschitz_report(&model, &h, 0.1).map_err(|e| e.to_string())?;
    check!((report.product - (2f64.ln() + 0.05)).abs() < 1e-9, "HD log+ Lip = {}", report.product);
    check!(report.holds && report.product < report.entropy + 0.1, "{} is not below {} + 0.1", report.product, report.entropy);
    Ok(format!("HD log+ Lip = {:.9} < h + eps = {:.9}", report.product, report.entropy + 0.1))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("example-1 exact eigenvector", example1_exact_eigen),
        ("non-conjugacy obstruction", third_lap_obstruction),
        ("gurevich entropy convergence", entropy_convergence),
        ("golden-mean spectral radius", golden_spectral_radius),
        ("horseshoe entropy bound", horseshoe_bound),
        ("vere-jones subeigenvector", vere_jones),
        ("constant-slope model", model_correctness),
        ("delta identity suite", delta_identities),
        ("metric properties", metric_properties),
        ("lipschitz report", lipschitz),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => writeln!(err, "PASS {:>2} {name}: {detail}", k + 1).unwrap(),
            Err(why) => {
                writeln!(err, "FAIL {:>2} {name}: {why}", k + 1).unwrap();
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

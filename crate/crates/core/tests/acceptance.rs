//! Acceptance suite: one line per criterion, run sequentially so the
//! runtime bounds are measured without contention.
//!
//! Run with `cargo test -p taugeo-core --test acceptance -- --nocapture`.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use taugeo_core::algebra::{leibniz_check, leibniz_check_all, seeded, st_star_structure_check, Algebra, SigmaTau};
use taugeo_core::connection::{
    connection_leibniz_check, curvature, lie_structure_check, metric_compat_check, metric_connection_free,
    torsion, torsion_check, torsion_free_construct, CompatMode, Connection, LieStructure, Side,
};
use taugeo_core::matrix::Matrix;
use taugeo_core::matrix_geometry::{
    curvature_difference, dual_product_rule_check, matrix_levi_civita_full, matrix_levi_civita_vector,
    random_commuting_invertibles, random_commuting_unitaries, regularity_candidates, regularity_check,
    unique_regular_connection, MatrixGeometry, MatrixSampling, Projector,
};
use taugeo_core::module::{hermitian_axioms_check, module_law_check, HermitianForm, ModMap, SigmaModule};
use taugeo_core::presets::{build_matrix_algebra, build_qplane, build_qplane_star, build_shift_line, MatrixSigma};
use taugeo_core::report::CheckReport;
use taugeo_core::scalar::{q_integer, ComplexFloat, Field, GaussianRational, RatFunc, Rational};
use taugeo_core::sphere::{build_sphere, solve_x_table, XActionTable};
use num_traits::Zero;
use taugeo_core::{QAlgebra, QElement};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn require(report: CheckReport) -> Result<(), String> {
    if report.passed() {
        Ok(())
    } else {
        Err(format!("{} failed: {}", report.name, report.witness.unwrap_or(report.detail)))
    }
}

/// Negative controls must fail and carry a witness.
fn require_failure(report: CheckReport) -> Result<String, String> {
    match (report.failed(), report.witness) {
        (true, Some(w)) if !w.is_empty() => Ok(w),
        _ => Err(format!("negative control {} did not fail with a witness", report.name)),
    }
}

fn require_error<T>(result: taugeo_core::Result<T>, label: &str) -> Result<String, String> {
    match result {
        Err(e) => Ok(e.to_string()),
        Ok(_) => Err(format!("negative control {label} was accepted")),
    }
}

fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_ints(re, im)
}

fn q_pow(k: u32) -> RatFunc {
    RatFunc::q().pow_i(k as i64).expect("q is nonzero")
}

fn qplane_example(n: u32, m: u32) -> (QAlgebra, LieStructure<RatFunc>, Connection<QAlgebra>) {
    let (alg, lie) = build_qplane().expect("q-plane");
    let alg = Arc::new(alg);
    let module = SigmaModule::free(&alg, 2);
    let zero = alg.zero();
    let y_m = alg.parse(&format!("y^{m}")).expect("parse");
    let x_n = alg.parse(&format!("x^{n}")).expect("parse");
    let gamma = vec![
        vec![vec![zero.clone(), y_m], vec![zero.clone(), zero.clone()]],
        vec![vec![zero.clone(), zero.clone()], vec![x_n, zero.clone()]],
    ];
    let conn = Connection::from_gamma(&module, gamma).expect("connection");
    (alg.as_ref().clone(), lie, conn)
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for n in 1..=4u32 {
        for m in 1..=4u32 {
            let (alg, lie, conn) = qplane_example(n, m);
            let module = conn.module();
            let p = |t: String| -> QElement { alg.parse(&t).expect("parse") };
            let curv_e1 = curvature(&conn, &lie, 0, 1, &module.unit(0));
            let expected_e1 = vec![
                p(format!("x^{n}*y^{m}")).scale(&q_pow(m).neg_ref()),
                p(format!("y^{}", m - 1)).scale(&q_integer(m).neg_ref()),
            ];
            ensure!(
                curv_e1 == expected_e1,
                "n = {n}, m = {m}: Curv e1 = {} expected {}",
                module.render(&curv_e1),
                module.render(&expected_e1)
            );
            let curv_e2 = curvature(&conn, &lie, 0, 1, &module.unit(1));
            let expected_e2 = vec![
                p(format!("x^{}", n - 1)).scale(&q_integer(n)),
                p(format!("x^{n}*y^{m}")).scale(&q_pow(n)),
            ];
            ensure!(
                curv_e2 == expected_e2,
                "n = {n}, m = {m}: Curv e2 = {} expected {}",
                module.render(&curv_e2),
                module.render(&expected_e2)
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, m) pairs, exact equality"))
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    for n in 1..=4u32 {
        for m in 1..=4u32 {
            let (alg, lie, conn) = qplane_example(n, m);
            let module = conn.module();
            let xy_e1 = vec![alg.parse("x*y").expect("parse"), alg.zero()];
            let curv = curvature(&conn, &lie, 0, 1, &xy_e1);
            let expected = vec![
                alg.parse(&format!("x^{}*y^{}", n + 1, m + 1)).expect("parse").scale(&q_pow(m + 2).neg_ref()),
                alg.parse(&format!("x*y^{m}"))
                    .expect("parse")
                    .scale(&q_pow(2).mul_ref(&q_integer(m)).neg_ref()),
            ];
            ensure!(
                curv == expected,
                "n = {n}, m = {m}: Curv(xy e1) = {} expected {}",
                module.render(&curv),
                module.render(&expected)
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} (n, m) pairs, exact equality"))
}

/// Random commuting `U`s, `Gamma`s, `A` and indices; `p` alternates between
/// the identity and a random rank-one projector.
fn matrix_instance<F: MatrixSampling>(
    size: usize,
    rank_one: bool,
    tol: f64,
    rng: &mut taugeo_core::algebra::SeededRng,
) -> (MatrixGeometry<F>, Vec<Matrix<F>>, usize, usize, Matrix<F>) {
    let count = rng.gen_range(1..=3);
    let (us, _) = random_commuting_invertibles::<F>(count, size, rng);
    let alg = build_matrix_algebra(us, tol).expect("commuting invertibles");
    let projector = if rank_one {
        Projector::rank_one(F::random_unit_vector(size, rng), tol).expect("unit vector")
    } else {
        Projector::identity(size)
    };
    let geometry = MatrixGeometry::new(alg).with_projector(projector).expect("projector");
    let gammas = (0..count).map(|_| Matrix::random(size, size, rng)).collect();
    let (a, b) = (rng.gen_range(0..count), rng.gen_range(0..count));
    let m = Matrix::random(size, size, rng);
    (geometry, gammas, a, b, m)
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = seeded(3);
    for size in 2..=4 {
        for k in 0..50 {
            let (geometry, gammas, a, b, m) = matrix_instance::<GaussianRational>(size, k % 2 == 1, 0.0, &mut rng);
            let (closed, direct) = curvature_difference(&geometry, &gammas, a, b, &m).map_err(|e| e.to_string())?;
            ensure!(closed == direct, "exact N = {size}, instance {k}: {} vs {}", closed.render(), direct.render());
            let (geometry, gammas, a, b, m) = matrix_instance::<ComplexFloat>(size, k % 2 == 1, 1e-9, &mut rng);
            let (closed, direct) = curvature_difference(&geometry, &gammas, a, b, &m).map_err(|e| e.to_string())?;
            let diff = closed.sub(&direct).max_abs();
            worst = worst.max(diff);
            ensure!(diff <= 1e-9, "float N = {size}, instance {k}: max abs difference {diff:e}");
        }
    }
    Ok(format!("150 exact instances identical, 150 float instances max abs diff {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = seeded(4);
    for size in 2..=4 {
        for k in 0..50 {
            let (geometry, gammas, a, b, m) = matrix_instance::<GaussianRational>(size, true, 0.0, &mut rng);
            let (closed, direct) = curvature_difference(&geometry, &gammas, a, b, &m).map_err(|e| e.to_string())?;
            ensure!(closed.is_zero() && direct.is_zero(), "exact N = {size}, instance {k}: {}", direct.render());
            let (geometry, gammas, a, b, m) = matrix_instance::<ComplexFloat>(size, true, 1e-9, &mut rng);
            let (closed, direct) = curvature_difference(&geometry, &gammas, a, b, &m).map_err(|e| e.to_string())?;
            worst = worst.max(closed.max_abs()).max(direct.max_abs());
            ensure!(worst <= 1e-9, "float N = {size}, instance {k}: curvature {}", direct.render());
        }
    }
    Ok(format!("150 exact instances zero, 150 float instances below {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let us = vec![
        Matrix::diagonal(&[g(1, 0), g(0, 1), g(-1, 0)]),
        Matrix::diagonal(&[g(1, 0), g(-1, 0), g(0, 1)]),
    ];
    let doubled = Arc::new(build_matrix_algebra(us, 0.0).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?);
    let (regular, _) = regularity_check(doubled.as_ref(), "regular", 5);
    require(regular)?;
    let unique = unique_regular_connection(&doubled, "unique", 200, 5).map_err(|e| e.to_string())?;
    require(unique.report)?;
    // Every regular candidate serves as a witness.
    let alternatives: Vec<Matrix<GaussianRational>> = regularity_candidates(3, 20, 11)
        .into_iter()
        .filter(|b| (0..2).all(|a| !doubled.derive(a, b).det(0.0).is_zero()))
        .collect();
    ensure!(!alternatives.is_empty(), "no alternative regularity witnesses");
    let mut rng = seeded(55);
    let module = SigmaModule::free(&doubled, 1).with_star().map_err(|e| e.to_string())?;
    let mut injections = 0;
    for _ in 0..20 {
        let injected: Vec<Matrix<GaussianRational>> = (0..2).map(|_| Matrix::random(3, 3, &mut rng)).collect();
        let witness = require_failure(dual_product_rule_check(&doubled, &injected, &unique.witnesses, "injected", 0, 1))?;
        ensure!(witness.contains("right rule"), "unexpected witness {witness}");
        for alt in &alternatives {
            require_failure(dual_product_rule_check(&doubled, &injected, std::slice::from_ref(alt), "injected.alt", 0, 1))?;
        }
        let table = (0..4).map(|k| vec![vec![injected[k % 2].clone()]]).collect();
        let conn = Connection::from_gamma(&module, table).map_err(|e| e.to_string())?;
        require_failure(connection_leibniz_check(&conn, Side::Bimodule, "injected.leibniz", 20, 2))?;
        injections += 1;
    }
    Ok(format!(
        "both product rules hold for nabla = X~; {injections} injected Gamma~ each produce witnesses ({} alternative regularity witnesses agree)",
        alternatives.len()
    ))
}

fn levi_civita_instances<F: MatrixSampling>(tol: f64, seed: u64, label: &str) -> Result<usize, String> {
    let mut rng = seeded(seed);
    let mut count = 0;
    for size in 2..=4 {
        for _ in 0..3 {
            let n = rng.gen_range(1..=3);
            let (us, v0) = random_commuting_unitaries::<F>(n, size, &mut rng);
            let doubled = Arc::new(build_matrix_algebra(us.clone(), tol).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?);
            let (_, full) = matrix_levi_civita_full(&doubled, &Matrix::identity(size), &us, &format!("{label}.full"), 20, seed)
                .map_err(|e| e.to_string())?;
            require(full)?;
            let lambdas: Vec<F> = (0..n).map(|_| F::random_nonzero(&mut rng)).collect();
            let (_, vector) = matrix_levi_civita_vector(&doubled, &v0, &F::from_i64(2), &lambdas, &format!("{label}.vector"), 20, seed)
                .map_err(|e| e.to_string())?;
            require(vector)?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_6() -> Outcome {
    let us = vec![Matrix::diagonal(&[g(1, 0), g(0, 1)]), Matrix::diagonal(&[g(-1, 0), g(0, -1)])];
    let doubled = Arc::new(build_matrix_algebra(us.clone(), 0.0).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?);
    let (_, full) = matrix_levi_civita_full(&doubled, &Matrix::identity(2), &us, "full", 50, 6).map_err(|e| e.to_string())?;
    require(full)?;
    let e1 = Matrix::column(vec![g(1, 0), g(0, 0)]);
    let (_, vector) = matrix_levi_civita_vector(&doubled, &e1, &g(3, 0), &[g(1, 1), g(2, 0)], "vector", 50, 6)
        .map_err(|e| e.to_string())?;
    require(vector)?;
    let exact = levi_civita_instances::<GaussianRational>(0.0, 61, "exact")?;
    let float = levi_civita_instances::<ComplexFloat>(1e-9, 62, "float")?;
    Ok(format!("diagonal example plus {exact} exact and {float} float random geometries, full and vector modes"))
}

fn sphere_suite(table: &XActionTable, label: &str) -> Result<(), String> {
    let sphere = build_sphere(table).map_err(|e| e.to_string())?;
    let sigma = sphere.sigma();
    require(st_star_structure_check(sigma.as_ref(), &format!("{label}.star"), 200, 7))?;
    for report in leibniz_check_all(sigma.as_ref(), &format!("{label}.leibniz"), 200, 7) {
        require(report)?;
    }
    require(sphere.commutator_check(&format!("{label}.commutators")))?;
    require(sphere.bimodule_relation_check(&format!("{label}.bimodule"), 1))?;
    require(sphere.k_hat_check(&format!("{label}.k_hat"), 200, 7))?;
    require(module_law_check(sphere.omega(), &format!("{label}.omega"), 200, 7))?;
    Ok(())
}

fn criterion_7() -> Outcome {
    let solved = solve_x_table(2).map_err(|e| e.to_string())?;
    ensure!(solved.solution_dimension == 1, "solution space has dimension {}", solved.solution_dimension);
    sphere_suite(&solved.table, "solved")?;
    let supplied = XActionTable {
        x_plus: ["-q*cstar", "0", "astar", "0"].map(String::from).to_vec(),
        x_minus: ["0", "c", "0", "-q^-1*a"].map(String::from).to_vec(),
        x_z: ["a", "-q^2*astar", "c", "-q^2*cstar"].map(String::from).to_vec(),
    };
    sphere_suite(&supplied, "supplied")?;
    Ok(format!(
        "solver ({} unknowns, 1-dimensional solution) and supplied tables pass all structure checks",
        solved.unknowns
    ))
}

fn random_table<A: Algebra>(alg: &A, n: usize, rank: usize, rng: &mut taugeo_core::algebra::SeededRng) -> Vec<Vec<Vec<A::Elem>>> {
    (0..n)
        .map(|_| (0..rank).map(|_| (0..rank).map(|_| alg.random_element(rng)).collect()).collect())
        .collect()
}

/// `gamma_iota(a),ji = gamma_a,ij^*` filled in from the first half of the indices.
fn symmetric_gamma<A: SigmaTau>(alg: &A, rank: usize, rng: &mut taugeo_core::algebra::SeededRng) -> Vec<Vec<Vec<A::Elem>>> {
    let iota = alg.iota().expect("star algebra").to_vec();
    let mut table = random_table(alg, iota.len(), rank, rng);
    for a in 0..iota.len() {
        if iota[a] > a {
            for i in 0..rank {
                for j in 0..rank {
                    table[iota[a]][j][i] = alg.star(&table[a][i][j]).expect("star");
                }
            }
        }
    }
    table
}

fn closure_metric<A: SigmaTau + 'static>(module: &SigmaModule<A>, h: &HermitianForm<A>, label: &str, seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    for k in 0..20 {
        let gamma = symmetric_gamma(module.algebra().as_ref(), module.rank(), &mut rng);
        let conn = metric_connection_free(module, h, &gamma).map_err(|e| e.to_string())?;
        for mode in [CompatMode::Generators, CompatMode::Random] {
            require(metric_compat_check(&conn, h, mode, &format!("{label}.{k}"), 200, seed + k).map_err(|e| e.to_string())?)?;
        }
    }
    Ok(())
}

fn closure_torsion<A: SigmaTau + 'static>(module: &SigmaModule<A>, lie: &LieStructure<A::Scalar>, label: &str, seed: u64) -> Result<(), String> {
    let mut rng = seeded(seed);
    let anchor: Vec<Vec<A::Elem>> = (0..module.rank()).map(|a| module.unit(a)).collect();
    for k in 0..20 {
        let gamma_tilde = random_table(module.algebra().as_ref(), lie.dim(), lie.dim(), &mut rng);
        let conn = torsion_free_construct(module, lie, &anchor, &gamma_tilde).map_err(|e| e.to_string())?;
        require(torsion_check(&conn, lie, &anchor, &format!("{label}.{k}")))?;
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let (qstar, _) = build_qplane_star().map_err(|e| e.to_string())?;
    let qstar = Arc::new(qstar);
    let qmodule = SigmaModule::free(&qstar, 2).with_star().map_err(|e| e.to_string())?;
    let qh = HermitianForm::new(
        qstar.as_ref(),
        vec![
            vec![qstar.parse("2").unwrap(), qstar.parse("i").unwrap()],
            vec![qstar.parse("-i").unwrap(), qstar.parse("3").unwrap()],
        ],
    )
    .map_err(|e| e.to_string())?;
    closure_metric(&qmodule, &qh, "qplane.metric", 81)?;

    let us = vec![
        Matrix::diagonal(&[g(1, 0), g(0, 1), g(-1, 0)]),
        Matrix::diagonal(&[g(0, -1), g(0, -1), g(1, 0)]),
    ];
    let doubled = Arc::new(build_matrix_algebra(us.clone(), 0.0).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?);
    let mmodule = SigmaModule::free(&doubled, 1).with_star().map_err(|e| e.to_string())?;
    let h0 = Matrix::diagonal(&[g(2, 0), g(1, 0), g(5, 0)]);
    let mh = HermitianForm::new(doubled.as_ref(), vec![vec![h0]]).map_err(|e| e.to_string())?;
    closure_metric(&mmodule, &mh, "matrix.metric", 82)?;

    let (qplane, qlie) = build_qplane().map_err(|e| e.to_string())?;
    let qplane = Arc::new(qplane);
    closure_torsion(&SigmaModule::free(&qplane, 2), &qlie, "qplane.torsion", 83)?;
    let malg = Arc::new(build_matrix_algebra(us, 0.0).map_err(|e| e.to_string())?);
    closure_torsion(&SigmaModule::free(&malg, 2), &malg.lie_structure(), "matrix.torsion", 84)?;
    Ok("20 metric and 20 torsion-free tables per preset pass their checkers".into())
}

fn structural_suite<A: SigmaTau + 'static>(alg: &Arc<A>, lie: &LieStructure<A::Scalar>, label: &str, seed: u64) -> Result<usize, String> {
    let mut checks = 0;
    require(lie_structure_check(alg.as_ref(), lie, &format!("{label}.lie"), 200, seed))?;
    for report in leibniz_check_all(alg.as_ref(), &format!("{label}.leibniz"), 200, seed) {
        require(report)?;
        checks += 1;
    }
    let mut module = SigmaModule::free(alg, 2);
    if alg.iota().is_some() {
        require(st_star_structure_check(alg.as_ref(), &format!("{label}.star"), 200, seed))?;
        module = module.with_star().map_err(|e| e.to_string())?;
        let h = HermitianForm::identity(alg.as_ref(), 2);
        require(hermitian_axioms_check(&h, &module, &format!("{label}.hermitian"), 200, seed))?;
        checks += 2;
    }
    require(module_law_check(&module, &format!("{label}.module"), 200, seed))?;
    Ok(checks + 2)
}

fn negative_controls() -> Result<usize, String> {
    let mut witnesses = Vec::new();
    let (qplane, qlie) = build_qplane().map_err(|e| e.to_string())?;
    let qplane = Arc::new(qplane);
    // Wrong sigma in the Leibniz rule.
    witnesses.push(require_failure(leibniz_check(
        qplane.as_ref(),
        "neg.sigma",
        &|f| qplane.derive(0, f),
        &|f| f.clone(),
        &|f| f.clone(),
        20,
        1,
    ))?);
    // Fabricated structure constant.
    let fabricated = qlie.clone().with_structure_constant(0, 1, 0, RatFunc::from_i64(1));
    witnesses.push(require_failure(lie_structure_check(qplane.as_ref(), &fabricated, "neg.lie", 20, 1))?);
    // Corrupted sigma-hat.
    let alg = qplane.clone();
    let corrupt: ModMap<QElement> = Arc::new(move |m: &[QElement]| m.iter().map(|x| alg.sigma(1, x)).collect());
    let id: ModMap<QElement> = Arc::new(|m: &[QElement]| m.to_vec());
    let alg = qplane.clone();
    let good: ModMap<QElement> = Arc::new(move |m: &[QElement]| m.iter().map(|x| alg.sigma(0, x)).collect());
    let bad_module = SigmaModule::from_maps(&qplane, 1, vec![corrupt, good], vec![id.clone(), id]).map_err(|e| e.to_string())?;
    witnesses.push(require_failure(module_law_check(&bad_module, "neg.sigma_hat", 20, 1))?);
    // Asymmetric Christoffel symbols give torsion.
    let module = SigmaModule::free(&qplane, 2);
    let mut gamma = vec![vec![module.zero(); 2]; 2];
    gamma[0][1] = vec![qplane.parse("x").unwrap(), qplane.zero()];
    let conn = Connection::from_gamma(&module, gamma).map_err(|e| e.to_string())?;
    let anchor = vec![module.unit(0), module.unit(1)];
    witnesses.push(require_failure(torsion_check(&conn, &qlie, &anchor, "neg.torsion"))?);
    let t = torsion(&conn, &qlie, &anchor, 0, 1);
    ensure!(t == vec![qplane.parse("x").unwrap(), qplane.zero()], "torsion value {}", module.render(&t));
    // Non-basis anchor.
    witnesses.push(require_error(
        torsion_free_construct(&module, &qlie, &[module.unit(1), module.unit(0)], &random_table(qplane.as_ref(), 2, 2, &mut seeded(1))),
        "anchor",
    )?);
    // Non-hermitian form and gamma symmetry violations.
    let (qstar, _) = build_qplane_star().map_err(|e| e.to_string())?;
    let qstar = Arc::new(qstar);
    witnesses.push(require_error(
        HermitianForm::new(qstar.as_ref(), vec![vec![qstar.parse("1").unwrap(), qstar.parse("x").unwrap()], vec![qstar.zero(), qstar.one()]]),
        "hermitian",
    )?);
    let smodule = SigmaModule::free(&qstar, 1).with_star().map_err(|e| e.to_string())?;
    let mut bad_gamma = vec![vec![vec![qstar.zero()]]; 4];
    bad_gamma[0][0][0] = qstar.parse("x").unwrap();
    witnesses.push(require_error(
        metric_connection_free(&smodule, &HermitianForm::identity(qstar.as_ref(), 1), &bad_gamma),
        "gamma symmetry",
    )?);
    // A connection that is not compatible with the metric.
    let mut off = vec![vec![smodule.zero()]; 4];
    off[0][0] = vec![qstar.parse("x").unwrap()];
    let conn = Connection::from_gamma(&smodule, off).map_err(|e| e.to_string())?;
    witnesses.push(require_failure(
        metric_compat_check(&conn, &HermitianForm::identity(qstar.as_ref(), 1), CompatMode::Generators, "neg.metric", 20, 1)
            .map_err(|e| e.to_string())?,
    )?);
    // Matrix controls: Gamma~ = 1, non-commuting h0, E not commuting with U, Gamma != 1 - E.
    let us = vec![Matrix::diagonal(&[g(1, 0), g(0, 1)])];
    let doubled = Arc::new(build_matrix_algebra(us.clone(), 0.0).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?);
    let (_, reg) = regularity_check(doubled.as_ref(), "reg", 1);
    let reg: Vec<_> = reg.into_iter().flatten().collect();
    witnesses.push(require_failure(dual_product_rule_check(&doubled, &[Matrix::identity(2)], &reg, "neg.gamma_tilde", 5, 1))?);
    let h0 = Matrix::from_rows(vec![vec![g(1, 0), g(1, 0)], vec![g(1, 0), g(1, 0)]]).unwrap();
    witnesses.push(require_error(matrix_levi_civita_full(&doubled, &h0, &us, "neg.h0", 5, 1), "h0")?);
    let us2 = vec![Matrix::diagonal(&[g(1, 0), g(0, 1)]), Matrix::diagonal(&[g(-1, 0), g(1, 0)])];
    let geometry = MatrixGeometry::new(build_matrix_algebra(us2.clone(), 0.0).map_err(|e| e.to_string())?)
        .with_projector(Projector::identity(2))
        .map_err(|e| e.to_string())?;
    let swap = Matrix::from_rows(vec![vec![g(0, 0), g(1, 0)], vec![g(1, 0), g(0, 0)]]).unwrap();
    witnesses.push(require_error(geometry.torsion_free_gamma_choice(&[swap, us2[1].clone()], "neg.e"), "E commutation")?);
    let choice = geometry.torsion_free_gamma_choice(&us2, "e").map_err(|e| e.to_string())?;
    require(choice.report)?;
    let mut skewed = choice.gammas.clone();
    skewed[0] = skewed[0].add(&Matrix::identity(2));
    let conn = geometry.projective_connection(&skewed).map_err(|e| e.to_string())?;
    let lie = geometry.algebra().lie_structure();
    witnesses.push(require_failure(torsion_check(&conn, &lie, &choice.anchor, "neg.skewed_gamma"))?);
    // Corrupted sphere tables and singular or non-unitary matrices.
    let mut table = solve_x_table(2).map_err(|e| e.to_string())?.table;
    table.x_minus[1] = "2*c".into();
    witnesses.push(require_error(build_sphere(&table), "sphere table")?);
    witnesses.push(require_error(build_matrix_algebra(vec![Matrix::diagonal(&[g(1, 0), g(0, 0)])], 0.0), "singular")?);
    witnesses.push(require_error(
        build_matrix_algebra(vec![Matrix::diagonal(&[g(2, 0), g(1, 0)])], 0.0).and_then(|a: MatrixSigma<GaussianRational>| a.doubled()),
        "unitary",
    )?);
    ensure!(witnesses.iter().all(|w| !w.is_empty()), "empty witness");
    Ok(witnesses.len())
}

fn criterion_9() -> Outcome {
    let mut checks = 0;
    let (qplane, qlie) = build_qplane().map_err(|e| e.to_string())?;
    checks += structural_suite(&Arc::new(qplane), &qlie, "qplane", 91)?;
    let (qstar, qslie) = build_qplane_star().map_err(|e| e.to_string())?;
    checks += structural_suite(&Arc::new(qstar), &qslie, "qplane_star", 92)?;
    let hbar: Rational = "1/2".parse().expect("rational");
    let shift = build_shift_line(&hbar).map_err(|e| e.to_string())?;
    checks += structural_suite(&Arc::new(shift), &LieStructure::flip(1), "shift", 93)?;
    let us = vec![
        Matrix::diagonal(&[g(1, 0), g(0, 1), g(-1, 0)]),
        Matrix::from_rows(vec![
            vec![g(0, 1), g(0, 0), g(0, 0)],
            vec![g(0, 0), g(1, 0), g(0, 0)],
            vec![g(0, 0), g(0, 0), g(0, -1)],
        ])
        .unwrap(),
    ];
    let malg = build_matrix_algebra(us, 0.0).map_err(|e| e.to_string())?;
    let mdoubled = malg.doubled().map_err(|e| e.to_string())?;
    checks += structural_suite(&Arc::new(malg.clone()), &malg.lie_structure(), "matrix", 94)?;
    checks += structural_suite(&Arc::new(mdoubled.clone()), &mdoubled.lie_structure(), "matrix_star", 95)?;
    let mut rng = seeded(96);
    let (fus, _) = random_commuting_unitaries::<ComplexFloat>(2, 3, &mut rng);
    let falg = build_matrix_algebra(fus, 1e-9).map_err(|e| e.to_string())?.doubled().map_err(|e| e.to_string())?;
    checks += structural_suite(&Arc::new(falg.clone()), &falg.lie_structure(), "matrix_float", 97)?;
    let negatives = negative_controls()?;
    Ok(format!("{checks} structural checks at 200 samples; {negatives} negative controls fail with witnesses"))
}

struct Criterion {
    number: usize,
    title: &'static str,
    bound: Option<Duration>,
    run: fn() -> Outcome,
}

#[test]
fn acceptance_criteria() {
    let criteria = [
        Criterion { number: 1, title: "q-plane curvature reproduction", bound: Some(Duration::from_secs(1)), run: criterion_1 },
        Criterion { number: 2, title: "q-plane extended value", bound: None, run: criterion_2 },
        Criterion { number: 3, title: "matrix curvature oracle equivalence", bound: Some(Duration::from_secs(10)), run: criterion_3 },
        Criterion { number: 4, title: "rank-one flatness", bound: None, run: criterion_4 },
        Criterion { number: 5, title: "regular uniqueness", bound: None, run: criterion_5 },
        Criterion { number: 6, title: "matrix Levi-Civita", bound: None, run: criterion_6 },
        Criterion { number: 7, title: "sphere structure suite", bound: Some(Duration::from_secs(60)), run: criterion_7 },
        Criterion { number: 8, title: "constructor/checker closure", bound: None, run: criterion_8 },
        Criterion { number: 9, title: "structural property suite", bound: None, run: criterion_9 },
    ];
    let mut failures = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.bound) {
            (Ok(_), Some(bound)) if elapsed > bound => Err(format!("runtime {elapsed:.2?} exceeds {bound:?}")),
            (other, _) => other,
        };
        match &outcome {
            Ok(detail) => println!("criterion {} [{}]: PASS ({detail}; {elapsed:.2?})", c.number, c.title),
            Err(why) => {
                println!("criterion {} [{}]: FAIL ({why}; {elapsed:.2?})", c.number, c.title);
                failures.push(c.number);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

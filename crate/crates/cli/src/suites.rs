//! Registry of checks per preset and their execution.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use taugeo_core::algebra::{leibniz_check_all, seeded, st_star_structure_check, Algebra, SeededRng, SigmaTau};
use taugeo_core::connection::{
    curvature, lie_structure_check, metric_compat_check, metric_connection_free, torsion_check, torsion_free_construct,
    CompatMode, Connection, LieStructure,
};
use taugeo_core::matrix::Matrix;
use taugeo_core::matrix_geometry::{
    curvature_difference, curvature_linearity_check, matrix_levi_civita_full, matrix_levi_civita_vector,
    random_commuting_unitaries, unique_regular_connection, MatrixGeometry, MatrixSampling, Projector,
};
use taugeo_core::module::{hermitian_axioms_check, module_law_check, HermitianForm, ModElem, SigmaModule};
use taugeo_core::presets::{build_matrix_algebra, build_qplane, build_qplane_star, build_shift_line};
use taugeo_core::report::{combine, CheckReport};
use taugeo_core::scalar::{q_integer, ComplexFloat, Field, GaussianRational, RatFunc, Rational};
use taugeo_core::sphere::{build_sphere, solve_x_table, XActionTable};
use taugeo_core::{Error, QAlgebra, QElement};

use crate::config::{Preset, RunConfig, ScalarMode, Suite};
use crate::error::{CliError, CliResult};
use crate::report::{CheckRecord, Report};

type CheckFn = Box<dyn FnOnce() -> taugeo_core::Result<CheckReport> + Send>;

/// A named check, executed lazily.
pub struct Check {
    pub name: String,
    run: CheckFn,
}

impl Check {
    pub fn new(name: impl Into<String>, run: impl FnOnce(&str) -> taugeo_core::Result<CheckReport> + Send + 'static) -> Self {
        let name = name.into();
        let label = name.clone();
        Self { name, run: Box::new(move || run(&label)) }
    }

    fn skipped(name: impl Into<String>, anchor: &'static str, reason: String) -> Self {
        Self::new(name, move |n| Ok(CheckReport::skipped(n, anchor, reason)))
    }

    /// Run, keeping the registered name and turning construction errors into failures.
    pub fn execute(self) -> CheckRecord {
        let start = Instant::now();
        let report = match (self.run)() {
            Ok(report) => report.named(&self.name),
            Err(e) => CheckReport::fail(&self.name, "construction of the checked object", format!("error: {e}")),
        };
        CheckRecord::new(report, start.elapsed().as_secs_f64() * 1e3)
    }
}

/// Run every check in parallel; the report is ordered by name.
pub fn run_checks(config: RunConfig, checks: Vec<Check>) -> Report {
    let records = checks.into_par_iter().map(Check::execute).collect();
    Report::new(config, records)
}

/// Build and run the full verification suite for the configured preset.
pub fn run_verify(config: &RunConfig) -> CliResult<Report> {
    let checks = build_checks(config)?;
    Ok(run_checks(config.clone(), checks))
}

pub fn build_checks(config: &RunConfig) -> CliResult<Vec<Check>> {
    match config.preset {
        Preset::Qplane => qplane_checks(config),
        Preset::Shiftline => shiftline_checks(config),
        Preset::Matrix => match config.scalar {
            ScalarMode::Exact => matrix_checks::<GaussianRational>(config),
            ScalarMode::Float => matrix_checks::<ComplexFloat>(config),
        },
        Preset::Sphere => sphere_checks(config),
    }
}

/// Seed for a named check: the run seed mixed with an FNV-1a hash of the name.
pub fn check_seed(seed: u64, name: &str) -> u64 {
    let hash = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    seed ^ hash
}

fn invalid_config(message: String) -> CliError {
    CliError::InvalidConfig { path: "<config>".into(), message }
}

// Random tables

fn random_table<A: Algebra>(alg: &A, n: usize, rank: usize, rng: &mut SeededRng) -> Vec<Vec<Vec<A::Elem>>> {
    (0..n)
        .map(|_| (0..rank).map(|_| (0..rank).map(|_| alg.random_element(rng)).collect()).collect())
        .collect()
}

/// Random table with `gamma_iota(a),ji = gamma_a,ij^*`.
fn symmetric_gamma<A: SigmaTau>(alg: &A, rank: usize, rng: &mut SeededRng) -> taugeo_core::Result<Vec<Vec<Vec<A::Elem>>>> {
    let iota = alg.iota().ok_or(Error::NoStarStructure)?.to_vec();
    let mut table = random_table(alg, iota.len(), rank, rng);
    for a in 0..iota.len() {
        if iota[a] > a {
            for i in 0..rank {
                for j in 0..rank {
                    table[iota[a]][j][i] = alg.star(&table[a][i][j])?;
                }
            }
        }
    }
    Ok(table)
}

/// Add the unit to `Gamma_1` at `(target, 1)`: `nabla_1 e_target` gains `e_1`.
fn corrupt<A: SigmaTau + 'static>(conn: &Connection<A>, target: usize) -> taugeo_core::Result<Connection<A>> {
    let module = conn.module();
    let alg = module.algebra();
    let mut gamma = conn.gamma().to_vec();
    let target = target.min(module.rank() - 1);
    gamma[0][target][0] = alg.add(&gamma[0][target][0], &alg.one());
    Connection::from_gamma(module, gamma)
}

// Generic suites

fn structure_checks<A: SigmaTau + 'static>(alg: &Arc<A>, lie: &LieStructure<A::Scalar>, label: &str, config: &RunConfig) -> Vec<Check> {
    let samples = config.samples;
    let seed = config.seed;
    let mut checks = Vec::new();
    let (a, l) = (alg.clone(), lie.clone());
    checks.push(Check::new(format!("{label}.lie"), move |n| Ok(lie_structure_check(a.as_ref(), &l, n, samples, check_seed(seed, n)))));
    let a = alg.clone();
    checks.push(Check::new(format!("{label}.leibniz"), move |n| {
        let parts = leibniz_check_all(a.as_ref(), n, samples, check_seed(seed, n));
        Ok(combine(n, "X_a(fg) = sigma_a(f) X_a(g) + X_a(f) tau_a(g)", parts))
    }));
    let star = alg.iota().is_some();
    let a = alg.clone();
    checks.push(Check::new(format!("{label}.module"), move |n| {
        let module = SigmaModule::free(&a, 2);
        let module = if star { module.with_star()? } else { module };
        Ok(module_law_check(&module, n, samples, check_seed(seed, n)))
    }));
    if star {
        let a = alg.clone();
        checks.push(Check::new(format!("{label}.star"), move |n| Ok(st_star_structure_check(a.as_ref(), n, samples, check_seed(seed, n)))));
        let a = alg.clone();
        checks.push(Check::new(format!("{label}.hermitian"), move |n| {
            let module = SigmaModule::free(&a, 2).with_star()?;
            let h = HermitianForm::identity(a.as_ref(), 2);
            Ok(hermitian_axioms_check(&h, &module, n, samples, check_seed(seed, n)))
        }));
    }
    checks
}

/// `metric_connection_free` on random symmetric tables, checked in both modes.
fn metric_closure_checks<A: SigmaTau + 'static>(module: &SigmaModule<A>, h: &HermitianForm<A>, label: &str, config: &RunConfig) -> Vec<Check> {
    let (samples, seed, inject) = (config.samples, config.seed, config.inject_corrupt_gamma);
    (0..config.tables)
        .map(|k| {
            let (module, h) = (module.clone(), h.clone());
            Check::new(format!("{label}.metric.t{k:02}"), move |n| {
                let seed = check_seed(seed, n);
                let gamma = symmetric_gamma(module.algebra().as_ref(), module.rank(), &mut seeded(seed))?;
                let mut conn = metric_connection_free(&module, &h, &gamma)?;
                if inject {
                    conn = corrupt(&conn, 0)?;
                }
                let parts = [CompatMode::Generators, CompatMode::Random]
                    .into_iter()
                    .map(|mode| metric_compat_check(&conn, &h, mode, &format!("{n}.{mode:?}").to_lowercase(), samples, seed))
                    .collect::<taugeo_core::Result<Vec<_>>>()?;
                Ok(combine(n, "metric_connection_free output is compatible with h", parts))
            })
        })
        .collect()
}

/// `torsion_free_construct` on random tables, checked for zero torsion.
fn torsion_closure_checks<A: SigmaTau + 'static>(alg: &Arc<A>, lie: &LieStructure<A::Scalar>, label: &str, config: &RunConfig) -> Vec<Check> {
    let (seed, inject) = (config.seed, config.inject_corrupt_gamma);
    (0..config.tables)
        .map(|k| {
            let (alg, lie) = (alg.clone(), lie.clone());
            Check::new(format!("{label}.torsion.t{k:02}"), move |n| {
                let module = SigmaModule::free(&alg, lie.dim());
                let anchor: Vec<ModElem<A>> = (0..module.rank()).map(|i| module.unit(i)).collect();
                let gamma_tilde = random_table(alg.as_ref(), lie.dim(), lie.dim(), &mut seeded(check_seed(seed, n)));
                let mut conn = torsion_free_construct(&module, &lie, &anchor, &gamma_tilde)?;
                if inject {
                    conn = corrupt(&conn, 1)?;
                }
                Ok(torsion_check(&conn, &lie, &anchor, n))
            })
        })
        .collect()
}

// q-plane

/// Values of the curvature of `nabla_1 e_1 = y^m e_2`, `nabla_2 e_2 = x^n e_1`.
pub struct QplaneCurvature {
    pub alg: Arc<QAlgebra>,
    pub module: SigmaModule<QAlgebra>,
    pub connection: Connection<QAlgebra>,
    /// `(label, computed, expected)` for `e_1`, `e_2` and `x y e_1`.
    pub values: Vec<(&'static str, ModElem<QAlgebra>, ModElem<QAlgebra>)>,
}

fn q_pow(k: u32) -> RatFunc {
    RatFunc::q().pow_i(i64::from(k)).expect("q is invertible")
}

pub fn qplane_curvature(n: u32, m: u32, inject: bool) -> taugeo_core::Result<QplaneCurvature> {
    let (alg, lie) = build_qplane()?;
    let alg = Arc::new(alg);
    let module = SigmaModule::free(&alg, 2);
    let zero = alg.zero();
    let p = |text: String| -> taugeo_core::Result<QElement> { alg.parse(&text) };
    let gamma = vec![
        vec![vec![zero.clone(), p(format!("y^{m}"))?], vec![zero.clone(), zero.clone()]],
        vec![vec![zero.clone(), zero.clone()], vec![p(format!("x^{n}"))?, zero.clone()]],
    ];
    let mut connection = Connection::from_gamma(&module, gamma)?;
    if inject {
        connection = corrupt(&connection, 0)?;
    }
    let e1 = module.unit(0);
    let e2 = module.unit(1);
    let xy_e1 = vec![p("x*y".into())?, alg.zero()];
    let xnym = p(format!("x^{n}*y^{m}"))?;
    let expected_e1 = vec![xnym.scale(&q_pow(m).neg_ref()), p(format!("y^{}", m - 1))?.scale(&q_integer(m).neg_ref())];
    let expected_e2 = vec![p(format!("x^{}", n - 1))?.scale(&q_integer(n)), xnym.scale(&q_pow(n))];
    let expected_xy = vec![
        p(format!("x^{}*y^{}", n + 1, m + 1))?.scale(&q_pow(m + 2).neg_ref()),
        p(format!("x*y^{m}"))?.scale(&q_pow(2).mul_ref(&q_integer(m)).neg_ref()),
    ];
    let values = vec![
        ("e1", curvature(&connection, &lie, 0, 1, &e1), expected_e1),
        ("e2", curvature(&connection, &lie, 0, 1, &e2), expected_e2),
        ("xy_e1", curvature(&connection, &lie, 0, 1, &xy_e1), expected_xy),
    ];
    Ok(QplaneCurvature { alg, module, connection, values })
}

/// Pass when every computed curvature value equals its closed form.
pub fn qplane_curvature_report(curv: &QplaneCurvature, name: &str, n: u32, m: u32) -> CheckReport {
    let anchor = "Curv(X1,X2) for nabla_1 e1 = y^m e2, nabla_2 e2 = x^n e1";
    for (label, computed, expected) in &curv.values {
        if computed != expected {
            return CheckReport::fail(
                name,
                anchor,
                format!(
                    "n = {n}, m = {m}, Curv(X1,X2)({label}) = {} expected {}",
                    curv.module.render(computed),
                    curv.module.render(expected)
                ),
            );
        }
    }
    CheckReport::pass(name, anchor, format!("n = {n}, m = {m}: e1, e2 and x*y*e1 match exactly"))
}

fn qplane_checks(config: &RunConfig) -> CliResult<Vec<Check>> {
    let (qplane, qlie) = build_qplane()?;
    let qplane = Arc::new(qplane);
    let (qstar, qslie) = build_qplane_star()?;
    let qstar = Arc::new(qstar);
    let mut checks = Vec::new();
    if config.runs(Suite::Structure) {
        checks.extend(structure_checks(&qplane, &qlie, "qplane", config));
        checks.extend(structure_checks(&qstar, &qslie, "qplane_star", config));
    }
    if config.runs(Suite::Curvature) {
        let (n, m, inject) = (config.qplane.n, config.qplane.m, config.inject_corrupt_gamma);
        checks.push(Check::new("qplane.curvature", move |name| {
            Ok(qplane_curvature_report(&qplane_curvature(n, m, inject)?, name, n, m))
        }));
    }
    if config.runs(Suite::Torsion) {
        checks.extend(torsion_closure_checks(&qplane, &qlie, "qplane", config));
    }
    if config.runs(Suite::Metric) {
        let module = SigmaModule::free(&qstar, 2).with_star()?;
        let h = HermitianForm::new(
            qstar.as_ref(),
            vec![vec![qstar.parse("2")?, qstar.parse("i")?], vec![qstar.parse("-i")?, qstar.parse("3")?]],
        )?;
        checks.extend(metric_closure_checks(&module, &h, "qplane_star", config));
    }
    Ok(checks)
}

// Shift line

/// `X(t^k) = (t + hbar)^k - t^k` for `k <= degree`.
pub fn shift_difference_report(alg: &taugeo_core::PresentedSigma<Rational>, hbar: &Rational, name: &str, degree: u32) -> taugeo_core::Result<CheckReport> {
    let anchor = "X(f)(t) = f(t + hbar) - f(t)";
    for k in 0..=degree {
        let f = alg.parse(&format!("t^{k}"))?;
        let shifted = alg.parse(&format!("(t + {hbar})^{k}"))?;
        let expected = alg.sub(&shifted, &f);
        let computed = alg.derive(0, &f);
        if computed != expected {
            return Ok(CheckReport::fail(name, anchor, format!("X(t^{k}) = {} expected {}", alg.render(&computed), alg.render(&expected))));
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("t^k for k <= {degree}")))
}

fn shiftline_checks(config: &RunConfig) -> CliResult<Vec<Check>> {
    let hbar: Rational = taugeo_core::expr::parse_scalar(&config.shiftline.hbar)
        .map_err(|e| invalid_config(format!("shiftline.hbar: {e}")))?;
    let alg = Arc::new(build_shift_line(&hbar)?);
    let lie = LieStructure::flip(1);
    let mut checks = Vec::new();
    if config.runs(Suite::Structure) {
        checks.extend(structure_checks(&alg, &lie, "shiftline", config));
        let a = alg.clone();
        checks.push(Check::new("shiftline.difference", move |n| shift_difference_report(a.as_ref(), &hbar, n, 6)));
    }
    if config.runs(Suite::Torsion) {
        checks.extend(torsion_closure_checks(&alg, &lie, "shiftline", config));
    }
    Ok(checks)
}

// Matrix geometries

/// Matrix data resolved from the config, before any structural validation.
pub struct MatrixData<F: Field> {
    pub us: Vec<Matrix<F>>,
    pub v0: Option<Matrix<F>>,
    pub es: Vec<Matrix<F>>,
    pub h0: Matrix<F>,
    pub h0_hat: F,
    pub lambdas: Vec<F>,
}

fn parse_matrix<F: Field>(rows: &[Vec<String>], field: &str) -> CliResult<Matrix<F>> {
    Matrix::parse(rows).map_err(|e| invalid_config(format!("{field}: {e}")))
}

fn parse_scalar<F: Field>(text: &str, field: &str) -> CliResult<F> {
    taugeo_core::expr::parse_scalar(text).map_err(|e| invalid_config(format!("{field}: {e}")))
}

pub fn matrix_data<F: MatrixSampling>(config: &RunConfig) -> CliResult<MatrixData<F>> {
    let params = &config.matrix;
    let (us, generated_v0) = match &params.us {
        Some(us) => (
            us.iter().enumerate().map(|(k, rows)| parse_matrix(rows, &format!("matrix.us[{k}]"))).collect::<CliResult<Vec<_>>>()?,
            None,
        ),
        None => {
            let (us, v0) = random_commuting_unitaries::<F>(params.count, params.size, &mut seeded(config.seed));
            (us, Some(v0))
        }
    };
    if us.is_empty() {
        return Err(invalid_config("matrix.us must not be empty".into()));
    }
    let size = us[0].rows();
    let v0 = match &params.v0 {
        Some(entries) => Some(Matrix::column(
            entries.iter().enumerate().map(|(i, t)| parse_scalar(t, &format!("matrix.v0[{i}]"))).collect::<CliResult<Vec<F>>>()?,
        )),
        None => generated_v0,
    };
    let es = match &params.es {
        Some(es) => es.iter().enumerate().map(|(k, rows)| parse_matrix(rows, &format!("matrix.es[{k}]"))).collect::<CliResult<Vec<_>>>()?,
        None => us.clone(),
    };
    let h0 = match &params.h0 {
        Some(rows) => parse_matrix(rows, "matrix.h0")?,
        None => Matrix::identity(size),
    };
    let h0_hat = parse_scalar(&params.h0_hat, "matrix.h0_hat")?;
    let lambdas = match &params.lambdas {
        Some(ls) => ls.iter().enumerate().map(|(i, t)| parse_scalar(t, &format!("matrix.lambdas[{i}]"))).collect::<CliResult<Vec<F>>>()?,
        None => vec![F::one(); us.len()],
    };
    Ok(MatrixData { us, v0, es, h0, h0_hat, lambdas })
}

/// Random `Gamma`s and a random `A` for one curvature instance.
fn curvature_instance<F: Field>(geometry: &MatrixGeometry<F>, rng: &mut SeededRng) -> (Vec<Matrix<F>>, Matrix<F>) {
    let size = geometry.algebra().size();
    let gammas = (0..geometry.algebra().us().len()).map(|_| Matrix::random(size, size, rng)).collect();
    (gammas, Matrix::random(size, size, rng))
}

fn curvature_oracle_report<F: Field>(geometry: &MatrixGeometry<F>, name: &str, samples: usize, seed: u64, flat: bool) -> taugeo_core::Result<CheckReport> {
    let anchor = if flat {
        "Curv(X_a,X_b) A = 0 for p = v0 v0^dagger"
    } else {
        "Curv(X_a,X_b) A = U_a U_b A [U_b^-1 Gamma_b p, U_a^-1 Gamma_a p]"
    };
    let tol = geometry.algebra().tolerance();
    let n = geometry.algebra().us().len();
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for k in 0..samples {
        let (gammas, m) = curvature_instance(geometry, &mut rng);
        let (a, b) = (k % n, (k / n) % n);
        let (closed, direct) = curvature_difference(geometry, &gammas, a, b, &m)?;
        worst = worst.max(closed.sub(&direct).max_abs());
        let agree = closed.approx_eq(&direct, tol);
        let zero = !flat || (closed.approx_eq(&Matrix::zeros(m.rows(), m.cols()), tol) && direct.approx_eq(&Matrix::zeros(m.rows(), m.cols()), tol));
        if !(agree && zero) {
            return Ok(CheckReport::fail(
                name,
                anchor,
                format!("a = {}, b = {}, A = {}: closed form {} vs direct {}", a + 1, b + 1, m.render(), closed.render(), direct.render()),
            ));
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("{samples} instances, max abs difference {worst:.2e}")))
}

fn matrix_checks<F: MatrixSampling>(config: &RunConfig) -> CliResult<Vec<Check>> {
    let data = matrix_data::<F>(config)?;
    let tol = config.effective_tolerance();
    let (samples, seed, inject) = (config.samples, config.seed, config.inject_corrupt_gamma);
    let malg = match build_matrix_algebra(data.us.clone(), tol) {
        Ok(alg) => alg,
        Err(e) => {
            return Ok(vec![Check::new("matrix.data", move |n| {
                Ok(CheckReport::fail(n, "commuting invertible U_a", format!("error: {e}")))
            })])
        }
    };
    let doubled = malg.doubled().map(Arc::new);
    let star_reason = |e: &Error| format!("no star structure: {e}");
    let malg = Arc::new(malg);
    let mut checks = Vec::new();
    if config.runs(Suite::Structure) {
        checks.extend(structure_checks(&malg, &malg.lie_structure(), "matrix", config));
        match &doubled {
            Ok(d) => checks.extend(structure_checks(d, &d.lie_structure(), "matrix_star", config)),
            Err(e) => checks.push(Check::skipped("matrix_star.structure", "star structure axioms", star_reason(e))),
        }
    }
    if config.runs(Suite::Curvature) {
        let a = malg.clone();
        checks.push(Check::new("matrix.curvature.free", move |n| {
            let geometry = MatrixGeometry::new(a.as_ref().clone()).with_projector(Projector::identity(a.size()))?;
            curvature_oracle_report(&geometry, n, samples, check_seed(seed, n), false)
        }));
        let a = malg.clone();
        checks.push(Check::new("matrix.curvature.linearity", move |n| {
            let geometry = MatrixGeometry::new(a.as_ref().clone()).with_projector(Projector::identity(a.size()))?;
            let (gammas, _) = curvature_instance(&geometry, &mut seeded(check_seed(seed, n)));
            curvature_linearity_check(&geometry, &gammas, n, samples, check_seed(seed, n))
        }));
        match &data.v0 {
            Some(v0) => {
                let (a, v0) = (malg.clone(), v0.clone());
                checks.push(Check::new("matrix.curvature.rank_one", move |n| {
                    let geometry = MatrixGeometry::new(a.as_ref().clone()).with_projector(Projector::rank_one(v0, tol)?)?;
                    curvature_oracle_report(&geometry, n, samples, check_seed(seed, n), true)
                }));
            }
            None => checks.push(Check::skipped("matrix.curvature.rank_one", "Curv = 0 for rank-one p", "no v0 supplied".into())),
        }
    }
    if config.runs(Suite::Torsion) {
        let (a, es) = (malg.clone(), data.es.clone());
        checks.push(Check::new("matrix.torsion.choice", move |n| {
            let geometry = MatrixGeometry::new(a.as_ref().clone()).with_projector(Projector::identity(a.size()))?;
            let choice = geometry.torsion_free_gamma_choice(&es, n)?;
            if !inject {
                return Ok(choice.report);
            }
            let mut skewed = choice.gammas.clone();
            skewed[0] = skewed[0].add(&Matrix::identity(a.size()));
            let conn = geometry.projective_connection(&skewed)?;
            Ok(torsion_check(&conn, &a.lie_structure(), &choice.anchor, n))
        }));
        checks.extend(torsion_closure_checks(&malg, &malg.lie_structure(), "matrix", config));
    }
    let star_suites = [Suite::Metric, Suite::Uniqueness, Suite::LeviCivita];
    match &doubled {
        Err(e) => {
            for suite in star_suites.into_iter().filter(|s| config.runs(*s)) {
                let name = format!("matrix_star.{}", suite_label(suite));
                checks.push(Check::skipped(name, "requires unitary U_a", star_reason(e)));
            }
        }
        Ok(doubled) => {
            if config.runs(Suite::Metric) {
                let module = SigmaModule::free(doubled, 1).with_star()?;
                let h = HermitianForm::new(doubled.as_ref(), vec![vec![data.h0.clone()]])?;
                checks.extend(metric_closure_checks(&module, &h, "matrix_star", config));
            }
            if config.runs(Suite::Uniqueness) {
                let d = doubled.clone();
                checks.push(Check::new("matrix_star.uniqueness", move |n| {
                    match unique_regular_connection(&d, n, samples, check_seed(seed, n)) {
                        Ok(unique) => Ok(unique.report),
                        Err(Error::NotRegular(a)) => Ok(CheckReport::skipped(
                            n,
                            "nabla = X~ is the unique connection",
                            format!("no regularity witness for derivation {}", a + 1),
                        )),
                        Err(e) => Err(e),
                    }
                }));
            }
            if config.runs(Suite::LeviCivita) {
                let (d, h0, es) = (doubled.clone(), data.h0.clone(), data.es.clone());
                checks.push(Check::new("matrix_star.levi_civita.full", move |n| {
                    Ok(matrix_levi_civita_full(&d, &h0, &es, n, samples.min(50), check_seed(seed, n))?.1)
                }));
                match &data.v0 {
                    Some(v0) => {
                        let (d, v0, h0_hat, lambdas) = (doubled.clone(), v0.clone(), data.h0_hat.clone(), data.lambdas.clone());
                        checks.push(Check::new("matrix_star.levi_civita.vector", move |n| {
                            Ok(matrix_levi_civita_vector(&d, &v0, &h0_hat, &lambdas, n, samples.min(50), check_seed(seed, n))?.1)
                        }));
                    }
                    None => checks.push(Check::skipped("matrix_star.levi_civita.vector", "Levi-Civita on Mat_N p", "no v0 supplied".into())),
                }
            }
        }
    }
    Ok(checks)
}

fn suite_label(suite: Suite) -> &'static str {
    match suite {
        Suite::Structure => "structure",
        Suite::Curvature => "curvature",
        Suite::Torsion => "torsion",
        Suite::Metric => "metric",
        Suite::Uniqueness => "uniqueness",
        Suite::LeviCivita => "levi_civita",
        Suite::Sphere => "sphere",
    }
}

// Sphere

/// Names of the sphere checks, in execution order.
pub const SPHERE_CHECKS: [&str; 6] = ["sphere.star", "sphere.leibniz", "sphere.commutators", "sphere.bimodule", "sphere.k_hat", "sphere.omega"];

/// The configured action table, solving for it when asked.
pub fn sphere_table(config: &RunConfig, solve: bool) -> taugeo_core::Result<Option<(XActionTable, Option<String>)>> {
    if let Some(table) = &config.sphere.table {
        return Ok(Some((table.clone(), None)));
    }
    if solve || config.sphere.solve {
        let solved = solve_x_table(2)?;
        let note = format!("solved: {} unknowns, solution space of dimension {}", solved.unknowns, solved.solution_dimension);
        return Ok(Some((solved.table, Some(note))));
    }
    Ok(None)
}

fn sphere_checks(config: &RunConfig) -> CliResult<Vec<Check>> {
    if !config.runs(Suite::Sphere) {
        return Ok(Vec::new());
    }
    let Some((table, note)) = sphere_table(config, false)? else {
        let reason = "no X action table: supply [sphere.table] or pass --solve".to_string();
        return Ok(SPHERE_CHECKS.iter().map(|name| Check::skipped(*name, "sphere structure", reason.clone())).collect());
    };
    let sphere = match build_sphere(&table) {
        Ok(sphere) => Arc::new(sphere),
        Err(e) => {
            let mut checks = vec![Check::new("sphere.table", move |n| Ok(CheckReport::fail(n, "consistent X action table", format!("error: {e}"))))];
            checks.extend(SPHERE_CHECKS.iter().map(|name| Check::skipped(*name, "sphere structure", "invalid X action table".into())));
            return Ok(checks);
        }
    };
    let (samples, seed) = (config.samples, config.seed);
    let mut checks = Vec::new();
    if let Some(note) = note {
        checks.push(Check::new("sphere.table", move |n| Ok(CheckReport::pass(n, "consistent X action table", note))));
    }
    let s = sphere.clone();
    checks.push(Check::new("sphere.star", move |n| Ok(st_star_structure_check(s.sigma().as_ref(), n, samples, check_seed(seed, n)))));
    let s = sphere.clone();
    checks.push(Check::new("sphere.leibniz", move |n| {
        let parts = leibniz_check_all(s.sigma().as_ref(), n, samples, check_seed(seed, n));
        Ok(combine(n, "Y_a(fg) = sigma_a(f) Y_a(g) + Y_a(f) tau_a(g)", parts))
    }));
    let s = sphere.clone();
    checks.push(Check::new("sphere.commutators", move |n| Ok(s.commutator_check(n))));
    let s = sphere.clone();
    checks.push(Check::new("sphere.bimodule", move |n| Ok(s.bimodule_relation_check(n, 1))));
    let s = sphere.clone();
    checks.push(Check::new("sphere.k_hat", move |n| Ok(s.k_hat_check(n, samples, check_seed(seed, n)))));
    let s = sphere;
    checks.push(Check::new("sphere.omega", move |n| Ok(module_law_check(s.omega(), n, samples, check_seed(seed, n)))));
    Ok(checks)
}

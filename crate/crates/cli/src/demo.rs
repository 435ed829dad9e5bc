//! Worked examples: rendered output plus the checks that back it.

use std::fmt::Write as _;
use std::sync::Arc;

use taugeo_core::algebra::{seeded, Algebra, SigmaTau};
use taugeo_core::matrix::Matrix;
use taugeo_core::matrix_geometry::{curvature_difference, random_commuting_unitaries, MatrixGeometry, MatrixSampling, Projector};
use taugeo_core::presets::{build_matrix_algebra, build_shift_line};
use taugeo_core::report::CheckReport;
use taugeo_core::scalar::{ComplexFloat, GaussianRational, Rational};
use taugeo_core::sphere::build_sphere;

use crate::config::{Preset, RunConfig, ScalarMode};
use crate::error::{CliError, CliResult};
use crate::report::{CheckRecord, Report};
use crate::suites::{check_seed, qplane_curvature, qplane_curvature_report, shift_difference_report, sphere_table};

pub struct DemoOutput {
    pub text: String,
    pub report: Report,
}

pub fn run_demo(config: &RunConfig, solve: bool) -> CliResult<DemoOutput> {
    let mut text = String::new();
    let checks = match config.preset {
        Preset::Qplane => qplane_demo(config, &mut text)?,
        Preset::Shiftline => shiftline_demo(config, &mut text)?,
        Preset::Matrix => match config.scalar {
            ScalarMode::Exact => matrix_demo::<GaussianRational>(config, &mut text)?,
            ScalarMode::Float => matrix_demo::<ComplexFloat>(config, &mut text)?,
        },
        Preset::Sphere => sphere_demo(config, solve, &mut text)?,
    };
    let records = checks.into_iter().map(|c| CheckRecord::new(c, 0.0)).collect();
    Ok(DemoOutput { text, report: Report::new(config.clone(), records) })
}

fn superscript(k: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string().chars().map(|c| DIGITS[c.to_digit(10).expect("decimal digit") as usize]).collect()
}

/// `var^k` with the exponent omitted for `k = 1` and the factor for `k = 0`.
fn power(var: &str, k: u32) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}{}", superscript(k)),
    }
}

/// Closed forms of `Curv(X₁,X₂)` on `e₁`, `e₂` and `xye₁`.
pub fn qplane_closed_forms(n: u32, m: u32) -> [String; 3] {
    let spaced = |s: String| if s.is_empty() { String::new() } else { format!(" {s}") };
    [
        format!("Curv(X₁,X₂)e₁ = −{}{}{}e₁ − [{m}]_q{} e₂", power("q", m), power("x", n), power("y", m), spaced(power("y", m - 1))),
        format!("Curv(X₁,X₂)e₂ = {}{}{}e₂ + [{n}]_q{} e₁", power("q", n), power("x", n), power("y", m), spaced(power("x", n - 1))),
        format!(
            "Curv(X₁,X₂)(xye₁) = −{}{}{}e₁ − q²[{m}]_q x{} e₂",
            power("q", m + 2),
            power("x", n + 1),
            power("y", m + 1),
            power("y", m)
        ),
    ]
}

fn qplane_demo(config: &RunConfig, out: &mut String) -> CliResult<Vec<CheckReport>> {
    let (n, m) = (config.qplane.n, config.qplane.m);
    let curv = qplane_curvature(n, m, config.inject_corrupt_gamma)?;
    let _ = writeln!(out, "q-plane yx = q xy over Q(i)(s), q = s²");
    let alg = &curv.alg;
    for a in 0..alg.num_derivations() {
        for g in alg.generators() {
            let _ = writeln!(
                out,
                "  {}({g}) = {}, σ{k}({g}) = {}, τ{k}({g}) = {}",
                alg.derivation_name(a),
                alg.render(&alg.derive(a, &g)),
                alg.render(&alg.sigma(a, &g)),
                alg.render(&alg.tau(a, &g)),
                k = a + 1,
                g = alg.render(&g),
            );
        }
    }
    let _ = writeln!(out, "connection: ∇_{{X₁}}e₁ = {}e₂, ∇_{{X₂}}e₂ = {}e₁, all others zero", power("y", m), power("x", n));
    let _ = writeln!(out);
    let _ = writeln!(out, "computed:");
    for (label, computed, _) in &curv.values {
        let _ = writeln!(out, "  Curv(X1,X2)({label}) = {}", curv.module.render(computed));
    }
    let _ = writeln!(out);
    let report = qplane_curvature_report(&curv, "qplane.curvature", n, m);
    let verdict = if report.passed() { "matches computed value" } else { "DOES NOT match computed value" };
    let _ = writeln!(out, "closed form:");
    for line in qplane_closed_forms(n, m) {
        let _ = writeln!(out, "  {line}   [{verdict}]");
    }
    Ok(vec![report])
}

fn shiftline_demo(config: &RunConfig, out: &mut String) -> CliResult<Vec<CheckReport>> {
    let hbar: Rational = taugeo_core::expr::parse_scalar(&config.shiftline.hbar)
        .map_err(|e| CliError::InvalidConfig { path: "<config>".into(), message: format!("shiftline.hbar: {e}") })?;
    let alg = build_shift_line(&hbar)?;
    let _ = writeln!(out, "shift line: X(f)(t) = f(t + {hbar}) - f(t), σ = id, τ(t) = t + {hbar}");
    for k in 1..=4 {
        let f = alg.parse(&format!("t^{k}"))?;
        let _ = writeln!(out, "  X(t^{k}) = {}", alg.render(&alg.derive(0, &f)));
    }
    Ok(vec![shift_difference_report(&alg, &hbar, "shiftline.difference", 6)?])
}

fn matrix_demo<F: MatrixSampling>(config: &RunConfig, out: &mut String) -> CliResult<Vec<CheckReport>> {
    let size = config.matrix.size;
    let tol = config.effective_tolerance();
    let mut rng = seeded(config.seed);
    let (us, v0) = random_commuting_unitaries::<F>(2, size, &mut rng);
    let alg = build_matrix_algebra(us.clone(), tol)?;
    let gammas: Vec<Matrix<F>> = (0..2).map(|_| Matrix::random(size, size, &mut rng)).collect();
    let a = Matrix::random(size, size, &mut rng);
    let _ = writeln!(out, "matrix algebra Mat_{size} with X_a(A) = A - U_a A U_a^-1, scalars {}", F::KIND);
    for (k, u) in us.iter().enumerate() {
        let _ = writeln!(out, "  U{} = {}", k + 1, u.render());
    }
    for (k, g) in gammas.iter().enumerate() {
        let _ = writeln!(out, "  Gamma{} = {}", k + 1, g.render());
    }
    let _ = writeln!(out, "  A = {}", a.render());
    let mut reports = Vec::new();
    let projectors = [("identity", Projector::identity(size)), ("rank_one", Projector::rank_one(v0.clone(), tol)?)];
    for (label, projector) in projectors {
        let geometry = MatrixGeometry::new(alg.clone()).with_projector(projector)?;
        let (closed, direct) = curvature_difference(&geometry, &gammas, 0, 1, &a)?;
        let _ = writeln!(out);
        let _ = writeln!(out, "p = {}:", if label == "identity" { "1".to_string() } else { format!("v0 v0^dagger, v0 = {}", v0.render()) });
        let _ = writeln!(out, "  closed form U_1 U_2 pA [U_2^-1 Gamma_2 p, U_1^-1 Gamma_1 p] = {}", closed.render());
        let _ = writeln!(out, "  direct nabla_1 nabla_2 - R nabla_p nabla_q - nabla_[X1,X2]   = {}", direct.render());
        let name = format!("matrix.curvature.{label}");
        let anchor = "closed-form curvature equals the definition";
        let agree = closed.approx_eq(&direct, tol);
        let zero = Matrix::zeros(size, size);
        if label == "rank_one" && agree && closed.approx_eq(&zero, tol) && direct.approx_eq(&zero, tol) {
            let _ = writeln!(out, "  curvature identically 0 on Mat_{size} p");
        }
        let flat_ok = label != "rank_one" || (closed.approx_eq(&zero, tol) && direct.approx_eq(&zero, tol));
        reports.push(if agree && flat_ok {
            CheckReport::pass(name, anchor, format!("max abs difference {:.2e}", closed.sub(&direct).max_abs()))
        } else {
            CheckReport::fail(name, anchor, format!("closed form {} vs direct {}", closed.render(), direct.render()))
        });
    }
    Ok(reports)
}

fn sphere_demo(config: &RunConfig, solve: bool, out: &mut String) -> CliResult<Vec<CheckReport>> {
    let Some((table, note)) = sphere_table(config, solve)? else {
        let _ = writeln!(out, "no X action table: supply [sphere.table] in a config or pass --solve");
        return Ok(vec![CheckReport::skipped("sphere.demo", "sphere structure", "no X action table")]);
    };
    let sphere = Arc::new(build_sphere(&table)?);
    let _ = writeln!(out, "quantum sphere S^3_q on a, astar, c, cstar over Q(i)(s), q = s²");
    if let Some(note) = note {
        let _ = writeln!(out, "X action table ({note}):");
    } else {
        let _ = writeln!(out, "X action table (from config):");
    }
    let gens = ["a", "astar", "c", "cstar"];
    for (label, images) in [("X+", &table.x_plus), ("X-", &table.x_minus), ("Xz", &table.x_z)] {
        let row: Vec<String> = gens.iter().zip(images.iter()).map(|(g, v)| format!("{label}({g}) = {v}")).collect();
        let _ = writeln!(out, "  {}", row.join(", "));
    }
    let _ = writeln!(out, "Y table:");
    for (y, g, value) in sphere.y_table() {
        let _ = writeln!(out, "  {y}({g}) = {value}");
    }
    let omega = sphere.omega();
    for g in ["a", "c"] {
        let f = sphere.parse(g)?;
        let _ = writeln!(out, "d({g}) = {}", omega.render(&sphere.d(&f)));
    }
    let sigma = sphere.sigma();
    let _ = writeln!(out, "derivations: {}", (0..sigma.num_derivations()).map(|a| sigma.derivation_name(a)).collect::<Vec<_>>().join(", "));
    let bimodule = sphere.bimodule_relation_check("sphere.bimodule", 1);
    let _ = writeln!(out, "bimodule relations eta_a f = K^n_a(f) eta_a: {}", if bimodule.passed() { "hold" } else { "FAIL" });
    let commutators = sphere.commutator_check("sphere.commutators");
    let _ = writeln!(out, "twisted commutators: {}", if commutators.passed() { "hold" } else { "FAIL" });
    let k_hat = sphere.k_hat_check("sphere.k_hat", config.samples.min(50), check_seed(config.seed, "sphere.k_hat"));
    let _ = writeln!(out, "K-hat^* = K-hat^-1: {}", if k_hat.passed() { "holds" } else { "FAILS" });
    Ok(vec![bimodule, commutators, k_hat])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_for_n_m_one() {
        let [e1, e2, xy] = qplane_closed_forms(1, 1);
        assert_eq!(xy, "Curv(X₁,X₂)(xye₁) = −q³x²y²e₁ − q²[1]_q xy e₂");
        assert_eq!(e1, "Curv(X₁,X₂)e₁ = −qxye₁ − [1]_q e₂");
        assert_eq!(e2, "Curv(X₁,X₂)e₂ = qxye₂ + [1]_q e₁");
    }

    #[test]
    fn closed_forms_for_larger_exponents() {
        let [e1, _, xy] = qplane_closed_forms(2, 3);
        assert_eq!(e1, "Curv(X₁,X₂)e₁ = −q³x²y³e₁ − [3]_q y² e₂");
        assert_eq!(xy, "Curv(X₁,X₂)(xye₁) = −q⁵x³y⁴e₁ − q²[3]_q xy³ e₂");
    }

    #[test]
    fn qplane_demo_passes() {
        let out = run_demo(&RunConfig::new(Preset::Qplane), false).unwrap();
        assert!(!out.report.has_failures());
        assert!(out.text.contains("Curv(X₁,X₂)(xye₁) = −q³x²y²e₁ − q²[1]_q xy e₂"));
    }

    #[test]
    fn matrix_demo_reports_flat_rank_one() {
        let mut config = RunConfig::new(Preset::Matrix);
        config.matrix.size = 2;
        let out = run_demo(&config, false).unwrap();
        assert!(!out.report.has_failures(), "{}", out.report.to_text());
        assert!(out.text.contains("curvature identically 0"));
    }
}

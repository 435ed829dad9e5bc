//! Property tests for the algebraic invariants of every layer.

use std::sync::Arc;

use proptest::prelude::*;
use taugeo_core::algebra::{Algebra, Element, SigmaTau};
use taugeo_core::matrix::Matrix;
use taugeo_core::matrix_geometry::{curvature_difference, householder_to, MatrixGeometry, MatrixSampling, Projector};
use taugeo_core::presets::{build_matrix_algebra, build_qplane, build_shift_line};
use taugeo_core::scalar::{q_integer, Field, GaussianRational, RatFunc, Rational};
use taugeo_core::sphere::{k_action, solve_x_table, build_sphere, sphere_presentation};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, -6i64..=6, 1i64..=4).prop_map(|(re, im, den)| {
        GaussianRational::from_ints(re, im).div_ref(&GaussianRational::from_ints(den, 0)).unwrap()
    })
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (gaussian(), gaussian(), -3i64..=3, -2i64..=2).prop_map(|(a, b, k, l)| {
        let num = RatFunc::constant(a).mul_ref(&RatFunc::s_pow(k)).add_ref(&RatFunc::constant(b));
        let den = RatFunc::s_pow(l).add_ref(&RatFunc::from_i64(2));
        num.div_ref(&den).unwrap()
    })
}

/// Polynomial text with small coefficients in the given generators.
fn poly_text(gens: &'static [&'static str], max_terms: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(
        (-3i64..=3, prop::collection::vec(0usize..gens.len(), 0..4), any::<bool>()),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(c, word, imag)| {
                let coef = if imag { format!("({c}*i)") } else { format!("({c})") };
                std::iter::once(coef).chain(word.iter().map(|&g| gens[g].to_string())).collect::<Vec<_>>().join("*")
            })
            .collect();
        parts.join(" + ")
    })
}

const QPLANE: &[&str] = &["x", "y"];
const SPHERE: &[&str] = &["a", "astar", "c", "cstar"];

fn gaussian_matrix(n: usize) -> impl Strategy<Value = Matrix<GaussianRational>> {
    prop::collection::vec(gaussian(), n * n).prop_map(move |entries| {
        Matrix::from_rows(entries.chunks(n).map(|r| r.to_vec()).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gaussian_field_axioms(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b), b.mul_ref(&a));
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b).conj(), a.conj().mul_ref(&b.conj()));
        if let Ok(inv) = a.inv() {
            prop_assert_eq!(a.mul_ref(&inv), GaussianRational::from_i64(1));
        }
    }

    #[test]
    fn ratfunc_field_axioms(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        prop_assert_eq!(a.add_ref(&b), b.add_ref(&a));
        prop_assert_eq!(a.mul_ref(&b).mul_ref(&c), a.mul_ref(&b.mul_ref(&c)));
        prop_assert_eq!(a.mul_ref(&b.add_ref(&c)), a.mul_ref(&b).add_ref(&a.mul_ref(&c)));
        prop_assert_eq!(a.sub_ref(&a), RatFunc::from_i64(0));
        if let Ok(inv) = a.inv() {
            prop_assert_eq!(a.mul_ref(&inv), RatFunc::from_i64(1));
        }
    }

    #[test]
    fn q_integer_identity(n in 0u32..12) {
        let q = RatFunc::q();
        let lhs = q_integer(n).mul_ref(&q.sub_ref(&RatFunc::from_i64(1)));
        prop_assert_eq!(lhs, q.pow_i(n as i64).unwrap().sub_ref(&RatFunc::from_i64(1)));
    }

    #[test]
    fn sphere_normal_forms_associate(f in poly_text(SPHERE, 3), g in poly_text(SPHERE, 3), h in poly_text(SPHERE, 2)) {
        let pres = sphere_presentation().unwrap();
        let (f, g, h) = (Element::parse(&pres, &f).unwrap(), Element::parse(&pres, &g).unwrap(), Element::parse(&pres, &h).unwrap());
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
    }

    #[test]
    fn sphere_star_is_anti_involution(f in poly_text(SPHERE, 3), g in poly_text(SPHERE, 3)) {
        let pres = sphere_presentation().unwrap();
        let (f, g) = (Element::parse(&pres, &f).unwrap(), Element::parse(&pres, &g).unwrap());
        prop_assert_eq!((&f * &g).star().unwrap(), &g.star().unwrap() * &f.star().unwrap());
        prop_assert_eq!(f.star().unwrap().star().unwrap(), f);
    }

    #[test]
    fn k_is_multiplicative(f in poly_text(SPHERE, 3), g in poly_text(SPHERE, 3)) {
        let pres = sphere_presentation().unwrap();
        let k = k_action(&pres).unwrap();
        let (f, g) = (Element::parse(&pres, &f).unwrap(), Element::parse(&pres, &g).unwrap());
        prop_assert_eq!(k.apply(&(&f * &g)), &k.apply(&f) * &k.apply(&g));
        let kinv = k.pow(-1).unwrap();
        prop_assert_eq!(kinv.apply(&k.apply(&f)), f);
    }

    #[test]
    fn render_parse_round_trip(f in poly_text(SPHERE, 4)) {
        let pres = sphere_presentation().unwrap();
        let f = Element::parse(&pres, &f).unwrap();
        prop_assert_eq!(Element::parse(&pres, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn qplane_leibniz_and_commutation(f in poly_text(QPLANE, 4), g in poly_text(QPLANE, 4)) {
        let (alg, _) = build_qplane().unwrap();
        let (f, g) = (alg.parse(&f).unwrap(), alg.parse(&g).unwrap());
        for a in 0..2 {
            let lhs = alg.derive(a, &alg.mul(&f, &g));
            let rhs = alg.add(&alg.mul(&alg.sigma(a, &f), &alg.derive(a, &g)), &alg.mul(&alg.derive(a, &f), &alg.tau(a, &g)));
            prop_assert_eq!(lhs, rhs);
        }
        prop_assert_eq!(alg.derive(0, &alg.derive(1, &f)), alg.derive(1, &alg.derive(0, &f)));
        prop_assert_eq!(alg.derive(0, &alg.sigma(1, &f)), alg.sigma(1, &alg.derive(0, &f)));
        prop_assert_eq!(alg.sigma(0, &alg.sigma(1, &f)), alg.sigma(1, &alg.sigma(0, &f)));
    }

    #[test]
    fn shift_line_is_a_difference_operator(coeffs in prop::collection::vec(-4i64..=4, 1..5), num in -3i64..=3) {
        let hbar = Rational::new(num.into(), 3.into());
        let alg = build_shift_line(&hbar).unwrap();
        let text = coeffs.iter().enumerate().map(|(k, c)| format!("({c})*t^{k}")).collect::<Vec<_>>().join(" + ");
        let f = alg.parse(&text).unwrap();
        let shifted = alg.parse(&text.replace('t', &format!("(t + {hbar})"))).unwrap();
        prop_assert_eq!(alg.derive(0, &f), alg.sub(&shifted, &f));
    }

    #[test]
    fn sphere_y_leibniz(f in poly_text(SPHERE, 2), g in poly_text(SPHERE, 2)) {
        let sphere = build_sphere(&solve_x_table(2).unwrap().table).unwrap();
        let sigma = sphere.sigma();
        let (f, g) = (sphere.parse(&f).unwrap(), sphere.parse(&g).unwrap());
        for a in 0..3 {
            let lhs = sigma.derive(a, &(&f * &g));
            let rhs = &(&sigma.sigma(a, &f) * &sigma.derive(a, &g)) + &(&sigma.derive(a, &f) * &sigma.tau(a, &g));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(sigma.derive(a, &f.star().unwrap()).star().unwrap(), sigma.derive(a, &f));
        }
    }

    #[test]
    fn matrix_inverse_and_det(m in gaussian_matrix(3), k in gaussian_matrix(3)) {
        if let Ok(inv) = m.inverse(0.0) {
            prop_assert_eq!(m.mul(&inv), Matrix::identity(3));
        } else {
            prop_assert!(m.det(0.0).is_negligible(0.0, 1.0));
        }
        prop_assert_eq!(m.mul(&k).det(0.0), m.det(0.0).mul_ref(&k.det(0.0)));
        prop_assert_eq!(m.mul(&k).dagger(), k.dagger().mul(&m.dagger()));
    }

    #[test]
    fn matrix_inner_derivations(seed in 0u64..1000, a in gaussian_matrix(2), b in gaussian_matrix(2)) {
        let mut rng = taugeo_core::algebra::seeded(seed);
        let v0 = GaussianRational::random_unit_vector(2, &mut rng);
        let h = householder_to(&v0);
        prop_assert!(h.is_unitary(0.0));
        let u = h.mul(&Matrix::diagonal(&[GaussianRational::random_phase(&mut rng), GaussianRational::random_phase(&mut rng)])).mul(&h);
        let alg = build_matrix_algebra(vec![u], 0.0).unwrap().doubled().unwrap();
        for k in 0..2 {
            let lhs = alg.derive(k, &a.mul(&b));
            let rhs = alg.sigma(k, &a).mul(&alg.derive(k, &b)).add(&alg.derive(k, &a).mul(&alg.tau(k, &b)));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(alg.derive(k, &a.dagger()).dagger(), alg.derive(alg.iota().unwrap()[k], &a));
        }
    }

    #[test]
    fn closed_form_curvature_matches_definition(seed in 0u64..1000, gammas in prop::collection::vec(gaussian_matrix(3), 2), m in gaussian_matrix(3), rank_one in any::<bool>()) {
        let mut rng = taugeo_core::algebra::seeded(seed);
        let (us, v0) = taugeo_core::matrix_geometry::random_commuting_invertibles::<GaussianRational>(2, 3, &mut rng);
        let projector = if rank_one { Projector::rank_one(v0.clone(), 0.0).unwrap() } else { Projector::identity(3) };
        let geometry = MatrixGeometry::new(build_matrix_algebra(us, 0.0).unwrap()).with_projector(projector).unwrap();
        let (closed, direct) = curvature_difference(&geometry, &gammas, 0, 1, &m).unwrap();
        prop_assert_eq!(&closed, &direct);
        if rank_one {
            prop_assert!(closed.is_zero());
            let v = m.mul(&v0);
            prop_assert_eq!(geometry.phi_inv(&geometry.phi(&v).unwrap()).unwrap(), v);
        }
    }
}

#[test]
fn qplane_arc_shares_presentation() {
    let (alg, _) = build_qplane().unwrap();
    let alg = Arc::new(alg);
    let x = alg.parse("x").unwrap();
    assert_eq!(x.presentation().generator_names(), &["x".to_string(), "y".to_string()]);
}

//! The quantum 3-sphere: presentation, the K action, the twisted derivations
//! `X_+`, `X_-`, `X_z` and `Y_1..Y_3`, and the bimodule of one-forms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    Algebra, AlgebraHom, Element, Presentation, PresentationBuilder, PresentedSigma, SigmaTau,
    SigmaTauDerivation,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{EndoFn, ModElem, SigmaModule};
use crate::report::CheckReport;
use crate::scalar::{Field, RatFunc};

/// Generator names in index order.
pub const GENERATORS: [&str; 4] = ["a", "astar", "c", "cstar"];

/// Exponents `n_a` in `eta_a f = K^{n_a}(f) eta_a`.
pub const OMEGA_EXPONENTS: [i64; 3] = [2, 2, 4];

/// Weight of each generator under `K` (`K(g) = s^w g`).
const K_WEIGHTS: [i64; 4] = [-1, 1, -1, 1];

pub type SphereAlgebra = PresentedSigma<RatFunc>;
pub type OmegaModule = SigmaModule<SphereAlgebra>;

/// Relations of the quantum 3-sphere as rewrite rules, ordered by
/// weighted degree (`a`, `astar` weigh 1; `c`, `cstar` weigh 0).
pub fn sphere_presentation() -> Result<Arc<Presentation<RatFunc>>> {
    Ok(Arc::new(
        PresentationBuilder::new(&GENERATORS)
            .star(&["astar", "a", "cstar", "c"])
            .weights(&[1, 1, 0, 0])
            .rule("ac", "c*a", "q^-1*a*c")
            .rule("cstar-astar", "cstar*astar", "q*astar*cstar")
            .rule("a-cstar", "cstar*a", "q^-1*a*cstar")
            .rule("c-astar", "c*astar", "q*astar*c")
            .rule("c-cstar", "cstar*c", "c*cstar")
            .rule("unit-left", "astar*a", "1 - c*cstar")
            .rule("unit-right", "a*astar", "1 - q^2*c*cstar")
            .build()?,
    ))
}

/// `K(a) = q^(-1/2) a`, `K(astar) = q^(1/2) astar`, likewise for `c`.
pub fn k_action(pres: &Arc<Presentation<RatFunc>>) -> Result<AlgebraHom<RatFunc>> {
    let factors = K_WEIGHTS.iter().map(|&w| RatFunc::s_pow(w)).collect();
    AlgebraHom::diagonal(pres, factors)
}

/// Generator images of `X_+`, `X_-`, `X_z` in the element syntax, in the
/// order `a, astar, c, cstar`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XActionTable {
    pub x_plus: Vec<String>,
    pub x_minus: Vec<String>,
    pub x_z: Vec<String>,
}

/// Outcome of [`solve_x_table`].
#[derive(Clone, Debug)]
pub struct SolvedTable {
    pub table: XActionTable,
    /// Dimension of the space of admissible `X_+` tables before the
    /// commutators fix the normalisation.
    pub solution_dimension: usize,
    /// Number of unknowns in the ansatz.
    pub unknowns: usize,
    /// Real factor applied to the raw null vector.
    pub scale: RatFunc,
}

fn q() -> RatFunc {
    RatFunc::q()
}

fn word_weight(w: &[u8]) -> i64 {
    w.iter().map(|&g| K_WEIGHTS[g as usize]).sum()
}

struct Triple {
    plus: SigmaTauDerivation<RatFunc>,
    minus: SigmaTauDerivation<RatFunc>,
    z: SigmaTauDerivation<RatFunc>,
}

/// Values of the three twisted commutators minus their right hand sides on
/// a generator: `X_- X_+ - q^2 X_+ X_- - X_z`,
/// `q^2 X_z X_- - q^-2 X_- X_z - (1+q^2) X_-`,
/// `q^2 X_+ X_z - q^-2 X_z X_+ - (1+q^2) X_+`.
fn commutator_defects(t: &Triple, f: &Element<RatFunc>) -> [Element<RatFunc>; 3] {
    let q2 = q().mul_ref(&q());
    let qm2 = q2.inv().expect("q is nonzero");
    let one_q2 = RatFunc::from_i64(1).add_ref(&q2);
    let (xp, xm, xz) = (&t.plus, &t.minus, &t.z);
    let first = &(&xm.apply(&xp.apply(f)) - &xp.apply(&xm.apply(f)).scale(&q2)) - &xz.apply(f);
    let second = &(&xz.apply(&xm.apply(f)).scale(&q2) - &xm.apply(&xz.apply(f)).scale(&qm2))
        - &xm.apply(f).scale(&one_q2);
    let third = &(&xp.apply(&xz.apply(f)).scale(&q2) - &xz.apply(&xp.apply(f)).scale(&qm2))
        - &xp.apply(f).scale(&one_q2);
    [first, second, third]
}

const COMMUTATOR_NAMES: [&str; 3] = [
    "X_- X_+ - q^2 X_+ X_- = X_z",
    "q^2 X_z X_- - q^-2 X_- X_z = (1+q^2) X_-",
    "q^2 X_+ X_z - q^-2 X_z X_+ = (1+q^2) X_+",
];

/// `X_-(g) = -K^2(X_+(g^*)^*)` on generators.
fn minus_from_plus(
    pres: &Arc<Presentation<RatFunc>>,
    k2: &AlgebraHom<RatFunc>,
    plus_images: &[Element<RatFunc>],
) -> Result<Vec<Element<RatFunc>>> {
    let table = pres.star_table().ok_or(Error::NoStarStructure)?;
    table
        .iter()
        .map(|&gs| Ok(k2.apply(&plus_images[gs as usize].star()?).neg_ref()))
        .collect()
}

fn z_from_pair(
    pres: &Arc<Presentation<RatFunc>>,
    plus: &SigmaTauDerivation<RatFunc>,
    minus: &SigmaTauDerivation<RatFunc>,
) -> Vec<Element<RatFunc>> {
    let q2 = q().mul_ref(&q());
    (0..pres.num_generators() as u8)
        .map(|g| {
            let f = Element::generator(pres, g);
            &minus.apply(&plus.apply(&f)) - &plus.apply(&minus.apply(&f)).scale(&q2)
        })
        .collect()
}

/// Solve for the generator images of `X_+` among normal words of degree at
/// most `max_degree` raising the K-weight by 2, subject to well-definedness
/// as an `(id, K^2)`-derivation. `X_-` follows from the star relation, `X_z`
/// from the first commutator, and the remaining commutators fix the real
/// normalisation.
pub fn solve_x_table(max_degree: usize) -> Result<SolvedTable> {
    let pres = sphere_presentation()?;
    let k = k_action(&pres)?;
    let k2 = k.pow(2)?;
    let id = AlgebraHom::identity(&pres);
    let words = pres.normal_words(max_degree);
    let mut unknowns: Vec<(usize, Vec<u8>)> = Vec::new();
    for g in 0..GENERATORS.len() {
        for w in &words {
            if word_weight(w) == K_WEIGHTS[g] + 2 {
                unknowns.push((g, w.clone()));
            }
        }
    }
    if unknowns.is_empty() {
        return Err(Error::NoSolution("empty ansatz".into()));
    }
    // Each unknown contributes linearly to the relation defects.
    let mut columns: Vec<Vec<(String, Vec<u8>, RatFunc)>> = Vec::new();
    for (g, w) in &unknowns {
        let mut images = vec![Element::zero(&pres); GENERATORS.len()];
        images[*g] = Element::word(&pres, w);
        let d = SigmaTauDerivation::unchecked("X+", id.clone(), k2.clone(), images);
        let mut col = Vec::new();
        for (rel, terms) in d.relation_defects() {
            for (word, c) in terms {
                col.push((rel.clone(), word, c));
            }
        }
        columns.push(col);
    }
    let mut row_keys: Vec<(String, Vec<u8>)> = columns
        .iter()
        .flat_map(|c| c.iter().map(|(r, w, _)| (r.clone(), w.clone())))
        .collect();
    row_keys.sort();
    row_keys.dedup();
    let mut system = Matrix::<RatFunc>::zeros(row_keys.len().max(1), unknowns.len());
    for (j, col) in columns.iter().enumerate() {
        for (rel, word, c) in col {
            let i = row_keys
                .binary_search(&(rel.clone(), word.clone()))
                .expect("row key present");
            system[(i, j)] = system[(i, j)].add_ref(c);
        }
    }
    let null = system.nullspace(0.0);
    let Some(vector) = null.first() else {
        return Err(Error::NoSolution("well-definedness admits only X_+ = 0".into()));
    };
    let raw_plus = |scale: &RatFunc| -> Vec<Element<RatFunc>> {
        let mut images = vec![Element::zero(&pres); GENERATORS.len()];
        for ((g, w), c) in unknowns.iter().zip(vector) {
            images[*g] = &images[*g] + &Element::word(&pres, w).scale(&c.mul_ref(scale));
        }
        images
    };
    let build_triple = |scale: &RatFunc| -> Result<Triple> {
        let plus_images = raw_plus(scale);
        let minus_images = minus_from_plus(&pres, &k2, &plus_images)?;
        let plus = SigmaTauDerivation::new("X+", id.clone(), k2.clone(), plus_images)?;
        let minus = SigmaTauDerivation::new("X-", id.clone(), k2.clone(), minus_images)?;
        let z_images = z_from_pair(&pres, &plus, &minus);
        let z = SigmaTauDerivation::new("Xz", id.clone(), k2.pow(2)?, z_images)?;
        Ok(Triple { plus, minus, z })
    };
    let raw = build_triple(&RatFunc::from_i64(1))?;
    // Under X_+ -> t X_+ (t real) the second commutator scales as t^3 on the
    // left and t on the right, so t^2 = 1 / ratio.
    let mut ratio = None;
    for g in 0..GENERATORS.len() as u8 {
        let f = Element::generator(&pres, g);
        let rhs = raw.minus.apply(&f).scale(&RatFunc::from_i64(1).add_ref(&q().mul_ref(&q())));
        let lhs = &commutator_defects(&raw, &f)[1] + &rhs;
        if let Some((w, c)) = rhs.terms().iter().next() {
            ratio = Some(lhs.coeff(w).div_ref(c)?);
            break;
        }
    }
    let ratio = ratio.ok_or_else(|| Error::NoSolution("X_- vanishes on all generators".into()))?;
    if num_traits::Zero::is_zero(&ratio) {
        return Err(Error::NoSolution("second commutator degenerates".into()));
    }
    let scale = ratio
        .inv()?
        .real_sqrt()
        .ok_or_else(|| Error::NoSolution(format!("normalisation 1/({ratio}) has no real square root")))?;
    let solved = build_triple(&scale)?;
    let render = |d: &SigmaTauDerivation<RatFunc>| d.images().iter().map(|e| e.to_string()).collect();
    let table = XActionTable {
        x_plus: render(&solved.plus),
        x_minus: render(&solved.minus),
        x_z: render(&solved.z),
    };
    Ok(SolvedTable { table, solution_dimension: null.len(), unknowns: unknowns.len(), scale })
}

/// The sphere with its derivations and the module of one-forms.
pub struct QuantumSphere {
    pres: Arc<Presentation<RatFunc>>,
    k: AlgebraHom<RatFunc>,
    table: XActionTable,
    x_plus: SigmaTauDerivation<RatFunc>,
    x_minus: SigmaTauDerivation<RatFunc>,
    x_z: SigmaTauDerivation<RatFunc>,
    sigma: Arc<SphereAlgebra>,
    omega: OmegaModule,
}

impl std::fmt::Debug for QuantumSphere {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QuantumSphere({:?})", self.table)
    }
}

fn invalid(e: Error) -> Error {
    match e {
        Error::InvalidActionTable(_) => e,
        other => Error::InvalidActionTable(other.to_string()),
    }
}

/// Validate an action table and build `Sigma^* = (S^3_q, {Y_1, Y_2, Y_3}, id)`
/// with `Y_1 = i K^-1 (X_+ + X_-)`, `Y_2 = K^-1 (X_- - X_+)`, `Y_3 = i K^-2 X_z`.
pub fn build_sphere(table: &XActionTable) -> Result<QuantumSphere> {
    let pres = sphere_presentation()?;
    let k = k_action(&pres)?;
    let id = AlgebraHom::identity(&pres);
    let parse = |label: &str, images: &[String]| -> Result<Vec<Element<RatFunc>>> {
        if images.len() != GENERATORS.len() {
            return Err(Error::InvalidActionTable(format!(
                "{label}: expected {} images, got {}",
                GENERATORS.len(),
                images.len()
            )));
        }
        images
            .iter()
            .map(|t| Element::parse(&pres, t).map_err(|e| Error::InvalidActionTable(format!("{label}: {e}"))))
            .collect()
    };
    let k2 = k.pow(2)?;
    let k4 = k.pow(4)?;
    let x_plus = SigmaTauDerivation::new("X+", id.clone(), k2.clone(), parse("x_plus", &table.x_plus)?)
        .map_err(invalid)?;
    let x_minus = SigmaTauDerivation::new("X-", id.clone(), k2.clone(), parse("x_minus", &table.x_minus)?)
        .map_err(invalid)?;
    let x_z = SigmaTauDerivation::new("Xz", id.clone(), k4.clone(), parse("x_z", &table.x_z)?)
        .map_err(invalid)?;
    let triple = Triple { plus: x_plus, minus: x_minus, z: x_z };
    let generators: Vec<Element<RatFunc>> =
        (0..GENERATORS.len() as u8).map(|g| Element::generator(&pres, g)).collect();
    for f in &generators {
        for (defect, name) in commutator_defects(&triple, f).iter().zip(COMMUTATOR_NAMES) {
            if !defect.is_zero() {
                return Err(Error::InvalidActionTable(format!(
                    "commutator `{name}` fails on {f}: defect {defect}"
                )));
            }
        }
    }
    // Star relations X_+^* = -K^-2 X_-, X_-^* = -K^-2 X_+, X_z^* = -K^-4 X_z.
    let km2 = k.pow(-2)?;
    let km4 = k.pow(-4)?;
    for f in &generators {
        let checks = [
            ("X_+^* = -K^-2 X_-", &triple.plus, &triple.minus, &km2),
            ("X_-^* = -K^-2 X_+", &triple.minus, &triple.plus, &km2),
            ("X_z^* = -K^-4 X_z", &triple.z, &triple.z, &km4),
        ];
        for (name, x, y, kk) in checks {
            let lhs = x.apply(&f.star()?).star()?;
            let rhs = kk.apply(&y.apply(f)).neg_ref();
            if lhs != rhs {
                return Err(Error::InvalidActionTable(format!(
                    "star relation `{name}` fails on {f}: {lhs} vs {rhs}"
                )));
            }
        }
    }
    let km1 = k.pow(-1)?;
    let imag = RatFunc::imag_unit().expect("Q(i)(s) contains i");
    let y_images = |combine: &dyn Fn(&Element<RatFunc>) -> Element<RatFunc>| -> Vec<Element<RatFunc>> {
        generators.iter().map(combine).collect()
    };
    let y1 = y_images(&|f| km1.apply(&(&triple.plus.apply(f) + &triple.minus.apply(f))).scale(&imag));
    let y2 = y_images(&|f| km1.apply(&(&triple.minus.apply(f) - &triple.plus.apply(f))));
    let y3 = y_images(&|f| km2.apply(&triple.z.apply(f)).scale(&imag));
    let ys = vec![
        SigmaTauDerivation::new("Y1", km1.clone(), k.clone(), y1).map_err(invalid)?,
        SigmaTauDerivation::new("Y2", km1.clone(), k.clone(), y2).map_err(invalid)?,
        SigmaTauDerivation::new("Y3", km2.clone(), k2.clone(), y3).map_err(invalid)?,
    ];
    let sigma = Arc::new(PresentedSigma::new(&pres, ys, Some(vec![0, 1, 2]))?);
    let twist: Vec<EndoFn<Element<RatFunc>>> = OMEGA_EXPONENTS
        .iter()
        .map(|&n| {
            let kn = k.pow(n).expect("diagonal powers exist");
            Arc::new(move |f: &Element<RatFunc>| kn.apply(f)) as EndoFn<Element<RatFunc>>
        })
        .collect();
    let omega = SigmaModule::free(&sigma, 3)
        .with_right_twist(twist)?
        .with_star()?
        .with_basis_names(&["eta1", "eta2", "eta3"]);
    let Triple { plus, minus, z } = triple;
    Ok(QuantumSphere {
        pres,
        k,
        table: table.clone(),
        x_plus: plus,
        x_minus: minus,
        x_z: z,
        sigma,
        omega,
    })
}

impl QuantumSphere {
    pub fn presentation(&self) -> &Arc<Presentation<RatFunc>> {
        &self.pres
    }

    pub fn k(&self) -> &AlgebraHom<RatFunc> {
        &self.k
    }

    pub fn table(&self) -> &XActionTable {
        &self.table
    }

    pub fn x_plus(&self) -> &SigmaTauDerivation<RatFunc> {
        &self.x_plus
    }

    pub fn x_minus(&self) -> &SigmaTauDerivation<RatFunc> {
        &self.x_minus
    }

    pub fn x_z(&self) -> &SigmaTauDerivation<RatFunc> {
        &self.x_z
    }

    pub fn sigma(&self) -> &Arc<SphereAlgebra> {
        &self.sigma
    }

    pub fn omega(&self) -> &OmegaModule {
        &self.omega
    }

    pub fn parse(&self, text: &str) -> Result<Element<RatFunc>> {
        Element::parse(&self.pres, text)
    }

    /// `K-hat^n(m^a eta_a) = K^n(m^a) eta_a`.
    pub fn k_hat(&self, n: i64, m: &[Element<RatFunc>]) -> Result<ModElem<SphereAlgebra>> {
        let kn = self.k.pow(n)?;
        Ok(m.iter().map(|x| kn.apply(x)).collect())
    }

    /// `K-hat^*(m) = K-hat(m^*)^*`.
    pub fn k_hat_star(&self, m: &[Element<RatFunc>]) -> Result<ModElem<SphereAlgebra>> {
        self.omega.star(&self.k_hat(1, &self.omega.star(m)?)?)
    }

    /// `df` in the eta basis:
    /// `(-i/2 (X_+ f + X_- f), (X_- f - X_+ f)/2, -i X_z f)`.
    pub fn d(&self, f: &Element<RatFunc>) -> ModElem<SphereAlgebra> {
        let imag = RatFunc::imag_unit().expect("Q(i)(s) contains i");
        let half = RatFunc::from_i64(2).inv().expect("2 is invertible");
        let (p, m, z) = (self.x_plus.apply(f), self.x_minus.apply(f), self.x_z.apply(f));
        vec![
            (&p + &m).scale(&imag.mul_ref(&half).neg_ref()),
            (&m - &p).scale(&half),
            z.scale(&imag.neg_ref()),
        ]
    }

    /// `df` in the omega basis: `(X_+ f, X_- f, X_z f)`.
    pub fn d_omega(&self, f: &Element<RatFunc>) -> [Element<RatFunc>; 3] {
        [self.x_plus.apply(f), self.x_minus.apply(f), self.x_z.apply(f)]
    }

    /// Convert omega-basis coefficients to the eta basis, using
    /// `omega_+ = (-i eta_1 - eta_2)/2`, `omega_- = (-i eta_1 + eta_2)/2`,
    /// `omega_z = -i eta_3`.
    pub fn omega_to_eta(&self, coeffs: &[Element<RatFunc>; 3]) -> ModElem<SphereAlgebra> {
        let imag = RatFunc::imag_unit().expect("Q(i)(s) contains i");
        let half = RatFunc::from_i64(2).inv().expect("2 is invertible");
        let [p, m, z] = coeffs;
        vec![
            (p + m).scale(&imag.mul_ref(&half).neg_ref()),
            (m - p).scale(&half),
            z.scale(&imag.neg_ref()),
        ]
    }

    /// Twisted commutators of `X_+`, `X_-`, `X_z` on every generator.
    pub fn commutator_check(&self, name: &str) -> CheckReport {
        let triple = Triple {
            plus: self.x_plus.clone(),
            minus: self.x_minus.clone(),
            z: self.x_z.clone(),
        };
        for g in 0..GENERATORS.len() as u8 {
            let f = Element::generator(&self.pres, g);
            for (defect, label) in commutator_defects(&triple, &f).iter().zip(COMMUTATOR_NAMES) {
                if !defect.is_zero() {
                    return CheckReport::fail(name, label, format!("on {f}: defect {defect}"));
                }
            }
        }
        CheckReport::pass(name, COMMUTATOR_NAMES.join("; "), "3 commutators on 4 generators")
    }

    /// `eta_a f = K^{n_a}(f) eta_a` on monomials, comparing the module's right
    /// action with the generator table `omega_± g = q^∓1 g omega_±`,
    /// `omega_z g = q^∓2 g omega_z` extended multiplicatively.
    pub fn bimodule_relation_check(&self, name: &str, max_degree: usize) -> CheckReport {
        let anchor = "eta_a f = K^{n_a}(f) eta_a";
        let q = q();
        let qi = q.inv().expect("q is nonzero");
        let table: [[RatFunc; 4]; 3] = {
            let pm = [qi.clone(), q.clone(), qi.clone(), q.clone()];
            let z = [
                qi.mul_ref(&qi),
                q.mul_ref(&q),
                qi.mul_ref(&qi),
                q.mul_ref(&q),
            ];
            [pm.clone(), pm, z]
        };
        let words = self.pres.normal_words(max_degree);
        for (a, &n) in OMEGA_EXPONENTS.iter().enumerate() {
            let kn = match self.k.pow(n) {
                Ok(k) => k,
                Err(e) => return CheckReport::fail(name, anchor, e.to_string()),
            };
            for w in &words {
                let f = Element::word(&self.pres, w);
                let factor = w.iter().fold(RatFunc::from_i64(1), |acc, &g| acc.mul_ref(&table[a][g as usize]));
                let expected_coeff = f.scale(&factor);
                if kn.apply(&f) != expected_coeff {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!("K^{n}({f}) = {} but the table gives {}", kn.apply(&f), expected_coeff),
                    );
                }
                let eta = self.omega.unit(a);
                let right = self.omega.right_mul(&eta, &f).expect("bimodule");
                let left = self.omega.left_mul(&expected_coeff, &eta);
                if !self.omega.approx_eq(&right, &left) {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!(
                            "eta{} * ({f}) = {} but expected {}",
                            a + 1,
                            self.omega.render(&right),
                            self.omega.render(&left)
                        ),
                    );
                }
            }
        }
        CheckReport::pass(name, anchor, format!("{} monomials per basis element", words.len()))
    }

    /// `K-hat^* = K-hat^-1` and `K-hat(f m g) = K(f) K-hat(m) K(g)` on samples.
    pub fn k_hat_check(&self, name: &str, samples: usize, seed: u64) -> CheckReport {
        let anchor = "K-hat^* = K-hat^-1, K-hat(f m g) = K(f) K-hat(m) K(g)";
        let (fs, ms) = self.omega.sample_elements(samples, seed);
        let run = || -> Result<Option<String>> {
            for (k, m) in ms.iter().enumerate() {
                let lhs = self.k_hat_star(m)?;
                let rhs = self.k_hat(-1, m)?;
                if !self.omega.approx_eq(&lhs, &rhs) {
                    return Ok(Some(format!(
                        "K-hat^*({}) = {} but K-hat^-1 gives {}",
                        self.omega.render(m),
                        self.omega.render(&lhs),
                        self.omega.render(&rhs)
                    )));
                }
                let f = &fs[k % fs.len()];
                let g = &fs[(k * 3 + 1) % fs.len()];
                let fmg = self.omega.right_mul(&self.omega.left_mul(f, m), g).expect("bimodule");
                let lhs = self.k_hat(1, &fmg)?;
                let khat = self.k_hat(1, m)?;
                let rhs = self
                    .omega
                    .right_mul(&self.omega.left_mul(&self.k.apply(f), &khat), &self.k.apply(g))
                    .expect("bimodule");
                if !self.omega.approx_eq(&lhs, &rhs) {
                    return Ok(Some(format!(
                        "K-hat(f m g) != K(f) K-hat(m) K(g) for f = {f}, m = {}, g = {g}",
                        self.omega.render(m)
                    )));
                }
            }
            Ok(None)
        };
        match run() {
            Ok(None) => CheckReport::pass(name, anchor, format!("{} samples", ms.len())),
            Ok(Some(w)) => CheckReport::fail(name, anchor, w),
            Err(e) => CheckReport::fail(name, anchor, e.to_string()),
        }
    }

    /// Rendered `Y_a(g)` for every derivation and generator.
    pub fn y_table(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for a in 0..self.sigma.num_derivations() {
            for g in 0..GENERATORS.len() as u8 {
                let f = Element::generator(&self.pres, g);
                out.push((
                    self.sigma.derivation_name(a),
                    GENERATORS[g as usize].to_string(),
                    self.sigma.render(&self.sigma.derive(a, &f)),
                ));
            }
        }
        out
    }
}

/// Number of monomials of degree at most `d` in the classical coordinate
/// ring of SU(2): `C(d+4, 4) - C(d+2, 4)`.
pub fn classical_dimension(d: usize) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    binom(d + 4, 4) - binom(d + 2, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::st_star_structure_check;

    #[test]
    fn sphere_relations_normalise() {
        let pres = sphere_presentation().unwrap();
        let p = |t: &str| Element::parse(&pres, t).unwrap();
        assert_eq!(p("astar*a"), p("1 - c*cstar"));
        assert_eq!(p("c*a"), p("q^-1*a*c"));
        assert_eq!(p("a*astar"), p("1 - q^2*c*cstar"));
        assert_eq!(&p("astar*a") + &p("cstar*c"), p("1"));
    }

    #[test]
    fn k_star_is_k_inverse() {
        let pres = sphere_presentation().unwrap();
        let k = k_action(&pres).unwrap();
        assert_eq!(k.star_conjugate().unwrap(), k.pow(-1).unwrap());
        let a = Element::parse(&pres, "a").unwrap();
        assert_eq!(k.apply(&a), Element::parse(&pres, "s^-1*a").unwrap());
    }

    #[test]
    fn solver_reproduces_known_table() {
        let solved = solve_x_table(2).unwrap();
        assert_eq!(solved.solution_dimension, 1);
        let sphere = build_sphere(&solved.table).unwrap();
        let p = |t: &str| sphere.parse(t).unwrap();
        let xp = sphere.x_plus();
        let xm = sphere.x_minus();
        let xz = sphere.x_z();
        // Either sign of the real normalisation is admissible.
        let sign = if xp.apply(&p("c")) == p("astar") { 1 } else { -1 };
        let sg = RatFunc::from_i64(sign);
        assert_eq!(xp.apply(&p("c")), p("astar").scale(&sg));
        assert_eq!(xp.apply(&p("a")), p("-q*cstar").scale(&sg));
        assert!(xp.apply(&p("astar")).is_zero() && xp.apply(&p("cstar")).is_zero());
        assert_eq!(xm.apply(&p("astar")), p("c").scale(&sg));
        assert_eq!(xm.apply(&p("cstar")), p("-q^-1*a").scale(&sg));
        assert_eq!(xz.apply(&p("a")), p("a"));
        assert_eq!(xz.apply(&p("astar")), p("-q^2*astar"));
        assert!(xz.apply(&sphere.sigma().one()).is_zero());
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let mut table = solve_x_table(2).unwrap().table;
        table.x_z[0] = "2*a".to_string();
        let err = build_sphere(&table).unwrap_err();
        assert!(matches!(err, Error::InvalidActionTable(_)), "{err}");
        let mut table = solve_x_table(2).unwrap().table;
        table.x_plus[0] = "c".to_string();
        assert!(matches!(build_sphere(&table), Err(Error::InvalidActionTable(_))));
    }

    #[test]
    fn y_derivations_are_self_adjoint() {
        let sphere = build_sphere(&solve_x_table(2).unwrap().table).unwrap();
        assert!(st_star_structure_check(sphere.sigma().as_ref(), "star", 10, 1).passed());
    }

    #[test]
    fn bimodule_examples() {
        let sphere = build_sphere(&solve_x_table(2).unwrap().table).unwrap();
        let omega = sphere.omega();
        let a = sphere.parse("a").unwrap();
        let eta3 = omega.unit(2);
        assert_eq!(
            omega.right_mul(&eta3, &a).unwrap(),
            omega.left_mul(&sphere.parse("q^-2*a").unwrap(), &eta3)
        );
        let eta1 = omega.unit(0);
        let cs = sphere.parse("cstar").unwrap();
        assert_eq!(
            omega.right_mul(&eta1, &cs).unwrap(),
            omega.left_mul(&sphere.parse("q*cstar").unwrap(), &eta1)
        );
        let one = sphere.sigma().one();
        assert_eq!(omega.right_mul(&eta1, &one).unwrap(), eta1);
        let m = omega.left_mul(&a, &eta1);
        assert_eq!(sphere.k_hat(1, &m).unwrap()[0], sphere.parse("s^-1*a").unwrap());
        assert!(sphere.bimodule_relation_check("rel", 2).passed());
    }

    #[test]
    fn differential_examples() {
        let sphere = build_sphere(&solve_x_table(2).unwrap().table).unwrap();
        assert!(sphere.omega().is_zero(&sphere.d(&sphere.sigma().one())));
        let c = sphere.parse("c").unwrap();
        assert_eq!(sphere.d_omega(&c)[0], sphere.x_plus().apply(&c));
        assert_eq!(sphere.omega_to_eta(&sphere.d_omega(&c)), sphere.d(&c));
    }

    #[test]
    fn monomial_count_matches_classical_dimension() {
        let pres = sphere_presentation().unwrap();
        assert_eq!(classical_dimension(1), 5);
        assert_eq!(classical_dimension(2), 14);
        for d in 0..=3 {
            assert_eq!(pres.normal_words(d).len(), classical_dimension(d), "degree {d}");
        }
    }
}

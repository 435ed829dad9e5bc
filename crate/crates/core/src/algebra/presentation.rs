use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::expr::{self, Evaluator, ScalarAtom};
use crate::scalar::Field;

/// A word in the generators, stored as generator indices.
pub type Word = Vec<u8>;

/// Linear combination of words, not yet reduced.
pub type Terms<F> = BTreeMap<Word, F>;

/// Oriented rewrite rule `lhs -> rhs`.
#[derive(Clone, Debug)]
pub struct Rule<F> {
    pub name: String,
    pub lhs: Word,
    pub rhs: Vec<(Word, F)>,
}

/// Finitely presented associative algebra with a confluent, terminating
/// rewriting system.
///
/// Words are compared by a weighted degree (sum of per-generator weights),
/// then length, then lexicographically by generator index. With all weights
/// zero this is the usual length-then-lexicographic order.
pub struct Presentation<F: Field> {
    names: Vec<String>,
    star: Option<Vec<u8>>,
    rules: Vec<Rule<F>>,
    weights: Vec<u32>,
    commutative: bool,
    cache: RwLock<HashMap<Word, Vec<(Word, F)>>>,
}

impl<F: Field> fmt::Debug for Presentation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presentation")
            .field("generators", &self.names)
            .field("rules", &self.rules.len())
            .field("commutative", &self.commutative)
            .finish()
    }
}

/// Declarative description of a presentation.
#[derive(Clone, Debug, Default)]
pub struct PresentationBuilder {
    names: Vec<String>,
    star: Option<Vec<String>>,
    rules: Vec<(String, String, String)>,
    weights: Option<Vec<u32>>,
    commutative: bool,
    overlap_degree: usize,
}

impl PresentationBuilder {
    pub fn new<S: AsRef<str>>(generators: &[S]) -> Self {
        Self {
            names: generators.iter().map(|g| g.as_ref().to_string()).collect(),
            overlap_degree: 4,
            ..Self::default()
        }
    }

    /// Generators commute; the commutation rules are added automatically.
    pub fn commutative(mut self) -> Self {
        self.commutative = true;
        self
    }

    /// Star image of each generator, by name.
    pub fn star<S: AsRef<str>>(mut self, images: &[S]) -> Self {
        self.star = Some(images.iter().map(|g| g.as_ref().to_string()).collect());
        self
    }

    pub fn weights(mut self, weights: &[u32]) -> Self {
        self.weights = Some(weights.to_vec());
        self
    }

    /// Add `lhs -> rhs`; `lhs` must be a single word.
    pub fn rule(mut self, name: &str, lhs: &str, rhs: &str) -> Self {
        self.rules
            .push((name.to_string(), lhs.to_string(), rhs.to_string()));
        self
    }

    /// Maximal length of overlap words inspected by the confluence check.
    pub fn overlap_degree(mut self, degree: usize) -> Self {
        self.overlap_degree = degree;
        self
    }

    pub fn build<F: Field>(self) -> Result<Presentation<F>> {
        if self.names.len() > u8::MAX as usize {
            return Err(Error::Config("too many generators".into()));
        }
        let mut pres: Presentation<F> = Presentation {
            weights: self.weights.unwrap_or_else(|| vec![0; self.names.len()]),
            names: self.names,
            star: None,
            rules: Vec::new(),
            commutative: self.commutative,
            cache: RwLock::new(HashMap::new()),
        };
        if pres.weights.len() != pres.names.len() {
            return Err(Error::DimensionMismatch {
                expected: pres.names.len(),
                got: pres.weights.len(),
            });
        }
        if pres.commutative && !self.rules.is_empty() {
            return Err(Error::Config(
                "commutative presentations take no extra rules".into(),
            ));
        }
        for (name, lhs, rhs) in &self.rules {
            let lhs_terms = pres.parse_free(lhs)?;
            let lhs = match lhs_terms.iter().next() {
                Some((w, c)) if lhs_terms.len() == 1 && c.is_one() && !w.is_empty() => w.clone(),
                _ => {
                    return Err(Error::Config(format!(
                        "left side of rule `{name}` must be a single word"
                    )))
                }
            };
            let rhs = pres.parse_free(rhs)?.into_iter().collect();
            pres.rules.push(Rule {
                name: name.clone(),
                lhs,
                rhs,
            });
        }
        if pres.commutative {
            for j in 0..pres.names.len() as u8 {
                for i in 0..j {
                    pres.rules.push(Rule {
                        name: format!("{}{}={}{}", pres.names[j as usize], pres.names[i as usize], pres.names[i as usize], pres.names[j as usize]),
                        lhs: vec![j, i],
                        rhs: vec![(vec![i, j], F::one())],
                    });
                }
            }
        }
        for rule in &pres.rules {
            if rule
                .rhs
                .iter()
                .any(|(w, _)| pres.compare(w, &rule.lhs) != Ordering::Less)
            {
                return Err(Error::NonTerminating(rule.name.clone()));
            }
        }
        if !pres.commutative {
            pres.check_confluence(self.overlap_degree)?;
        }
        if let Some(star) = &self.star {
            if star.len() != pres.names.len() {
                return Err(Error::DimensionMismatch {
                    expected: pres.names.len(),
                    got: star.len(),
                });
            }
            let table = star
                .iter()
                .map(|n| pres.index_of(n))
                .collect::<Result<Vec<u8>>>()?;
            pres.star = Some(table);
            pres.check_star()?;
        }
        Ok(pres)
    }
}

impl<F: Field> Presentation<F> {
    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn num_generators(&self) -> usize {
        self.names.len()
    }

    pub fn rules(&self) -> &[Rule<F>] {
        &self.rules
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn star_table(&self) -> Option<&[u8]> {
        self.star.as_deref()
    }

    pub fn index_of(&self, name: &str) -> Result<u8> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|p| p as u8)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// The monomial order.
    pub fn compare(&self, u: &[u8], v: &[u8]) -> Ordering {
        let weight = |w: &[u8]| w.iter().map(|&g| self.weights[g as usize]).sum::<u32>();
        weight(u)
            .cmp(&weight(v))
            .then(u.len().cmp(&v.len()))
            .then_with(|| u.cmp(v))
    }

    fn find_redex(&self, w: &[u8]) -> Option<(usize, &Rule<F>)> {
        (0..w.len()).find_map(|pos| {
            self.rules
                .iter()
                .find(|r| w[pos..].starts_with(&r.lhs))
                .map(|r| (pos, r))
        })
    }

    pub fn is_normal(&self, w: &[u8]) -> bool {
        if self.commutative {
            w.windows(2).all(|p| p[0] <= p[1])
        } else {
            self.find_redex(w).is_none()
        }
    }

    /// Normal form of a single word, reducing the leftmost redex first.
    pub fn reduce_word(&self, w: &[u8]) -> Vec<(Word, F)> {
        if self.commutative {
            let mut sorted = w.to_vec();
            sorted.sort_unstable();
            return vec![(sorted, F::one())];
        }
        if let Some(hit) = self.cache.read().expect("cache lock").get(w) {
            return hit.clone();
        }
        let result = match self.find_redex(w) {
            None => vec![(w.to_vec(), F::one())],
            Some((pos, rule)) => {
                let mut acc: Terms<F> = BTreeMap::new();
                for (rw, c) in &rule.rhs {
                    let mut next = w[..pos].to_vec();
                    next.extend_from_slice(rw);
                    next.extend_from_slice(&w[pos + rule.lhs.len()..]);
                    for (nw, c2) in self.reduce_word(&next) {
                        accumulate(&mut acc, nw, c.mul_ref(&c2));
                    }
                }
                acc.into_iter().collect()
            }
        };
        self.cache
            .write()
            .expect("cache lock")
            .insert(w.to_vec(), result.clone());
        result
    }

    /// Normal form of an arbitrary combination of words.
    pub fn reduce(&self, terms: &Terms<F>) -> Terms<F> {
        let mut acc = BTreeMap::new();
        for (w, c) in terms {
            for (nw, c2) in self.reduce_word(w) {
                accumulate(&mut acc, nw, c.mul_ref(&c2));
            }
        }
        acc
    }

    /// Parse text into an unreduced combination of words.
    pub fn parse_free(&self, text: &str) -> Result<Terms<F>> {
        FreeEvaluator { pres: self }.eval(&expr::parse(text)?)
    }

    fn check_confluence(&self, max_len: usize) -> Result<()> {
        for r1 in &self.rules {
            for r2 in &self.rules {
                let (l1, l2) = (&r1.lhs, &r2.lhs);
                // suffix of l1 overlapping a prefix of l2
                for k in 1..l1.len().min(l2.len()) {
                    if l1[l1.len() - k..] != l2[..k] || l1.len() + l2.len() - k > max_len {
                        continue;
                    }
                    let mut word = l1.clone();
                    word.extend_from_slice(&l2[k..]);
                    let left = substitute(&r1.rhs, &[], &l2[k..]);
                    let right = substitute(&r2.rhs, &l1[..l1.len() - k], &[]);
                    self.compare_reductions(&word, &left, &right)?;
                }
                // l2 strictly inside l1
                if r1.name != r2.name && l2.len() < l1.len() && l1.len() <= max_len {
                    for p in 0..=(l1.len() - l2.len()) {
                        if l1[p..p + l2.len()] == l2[..] {
                            let left = substitute(&r1.rhs, &[], &[]);
                            let right =
                                substitute(&r2.rhs, &l1[..p], &l1[p + l2.len()..]);
                            self.compare_reductions(l1, &left, &right)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn compare_reductions(&self, word: &[u8], left: &Terms<F>, right: &Terms<F>) -> Result<()> {
        let (a, b) = (self.reduce(left), self.reduce(right));
        if a != b {
            return Err(Error::NotConfluent {
                word: self.render_word(word),
                left: self.render_terms(&a),
                right: self.render_terms(&b),
            });
        }
        Ok(())
    }

    /// Star of a combination of words: reverse, map generators, conjugate.
    pub fn star_terms(&self, terms: &Terms<F>) -> Result<Terms<F>> {
        let table = self.star.as_ref().ok_or(Error::NoStarStructure)?;
        let mut raw = BTreeMap::new();
        for (w, c) in terms {
            let image: Word = w.iter().rev().map(|&g| table[g as usize]).collect();
            accumulate(&mut raw, image, c.conj());
        }
        Ok(self.reduce(&raw))
    }

    fn check_star(&self) -> Result<()> {
        let table = self.star.as_ref().expect("star table set");
        for (g, &img) in table.iter().enumerate() {
            if table[img as usize] as usize != g {
                return Err(Error::BadStar(format!(
                    "star of star of `{}` is not itself",
                    self.names[g]
                )));
            }
        }
        for rule in &self.rules {
            let lhs: Terms<F> = [(rule.lhs.clone(), F::one())].into_iter().collect();
            let rhs: Terms<F> = rule.rhs.iter().cloned().collect();
            let (a, b) = (self.star_terms(&lhs)?, self.star_terms(&rhs)?);
            if a != b {
                return Err(Error::BadStar(format!(
                    "relation `{}` maps to {} != {}",
                    rule.name,
                    self.render_terms(&a),
                    self.render_terms(&b)
                )));
            }
        }
        Ok(())
    }

    /// `x^2*y` style rendering of a word; the empty word renders as `1`.
    pub fn render_word(&self, w: &[u8]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let mut k = 0;
        while k < w.len() {
            let mut run = 1;
            while k + run < w.len() && w[k + run] == w[k] {
                run += 1;
            }
            let name = &self.names[w[k] as usize];
            parts.push(if run == 1 {
                name.clone()
            } else {
                format!("{name}^{run}")
            });
            k += run;
        }
        parts.join("*")
    }

    /// Canonical rendering, terms in decreasing monomial order.
    pub fn render_terms(&self, terms: &Terms<F>) -> String {
        let mut entries: Vec<_> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
        if entries.is_empty() {
            return "0".to_string();
        }
        entries.sort_by(|a, b| self.compare(b.0, a.0));
        let mut out = String::new();
        for (w, c) in entries {
            let text = if w.is_empty() {
                c.to_string()
            } else if c.is_one() {
                self.render_word(w)
            } else if c.neg_ref().is_one() {
                format!("-{}", self.render_word(w))
            } else {
                format!("{}*{}", c.render_factor(), self.render_word(w))
            };
            if !out.is_empty() && !text.starts_with('-') {
                out.push('+');
            }
            out.push_str(&text);
        }
        out
    }

    /// Normal-form words of length at most `degree`, in increasing order.
    pub fn normal_words(&self, degree: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..degree {
            let mut next = Vec::new();
            for w in &frontier {
                for g in 0..self.names.len() as u8 {
                    let mut ext: Word = w.clone();
                    ext.push(g);
                    if self.is_normal(&ext) {
                        next.push(ext);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| self.compare(a, b));
        out
    }
}

pub(crate) fn accumulate<F: Field>(acc: &mut Terms<F>, w: Word, c: F) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&w) {
        Some(existing) => {
            let sum = existing.add_ref(&c);
            if sum.is_zero() {
                acc.remove(&w);
            } else {
                *existing = sum;
            }
        }
        None => {
            acc.insert(w, c);
        }
    }
}

fn substitute<F: Field>(rhs: &[(Word, F)], prefix: &[u8], suffix: &[u8]) -> Terms<F> {
    let mut out = BTreeMap::new();
    for (w, c) in rhs {
        let mut word = prefix.to_vec();
        word.extend_from_slice(w);
        word.extend_from_slice(suffix);
        accumulate(&mut out, word, c.clone());
    }
    out
}

pub(crate) fn free_mul<F: Field>(a: &Terms<F>, b: &Terms<F>) -> Terms<F> {
    let mut out = BTreeMap::new();
    for (u, x) in a {
        for (v, y) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            accumulate(&mut out, w, x.mul_ref(y));
        }
    }
    out
}

fn scalar_part<F: Field>(t: &Terms<F>) -> Option<F> {
    match t.len() {
        0 => Some(F::zero()),
        1 => t.get(&Vec::new()).cloned(),
        _ => None,
    }
}

struct FreeEvaluator<'a, F: Field> {
    pres: &'a Presentation<F>,
}

impl<F: Field> Evaluator for FreeEvaluator<'_, F> {
    type Value = Terms<F>;

    fn scalar(&self, c: ScalarAtom) -> Result<Terms<F>> {
        let mut out = BTreeMap::new();
        accumulate(&mut out, Vec::new(), c.value()?);
        Ok(out)
    }

    fn ident(&self, name: &str, offset: usize) -> Result<Terms<F>> {
        let g = self.pres.index_of(name).map_err(|_| Error::Parse {
            offset,
            message: format!("unknown generator `{name}`"),
        })?;
        Ok([(vec![g], F::one())].into_iter().collect())
    }

    fn add(&self, mut a: Terms<F>, b: Terms<F>) -> Terms<F> {
        for (w, c) in b {
            accumulate(&mut a, w, c);
        }
        a
    }

    fn neg(&self, a: Terms<F>) -> Terms<F> {
        a.into_iter().map(|(w, c)| (w, c.neg_ref())).collect()
    }

    fn mul(&self, a: Terms<F>, b: Terms<F>) -> Result<Terms<F>> {
        Ok(free_mul(&a, &b))
    }

    fn div(&self, a: Terms<F>, b: Terms<F>) -> Result<Terms<F>> {
        let d = scalar_part(&b).ok_or_else(|| Error::Parse {
            offset: 0,
            message: "division by a non-scalar".into(),
        })?;
        let inv = d.inv()?;
        Ok(a.into_iter().map(|(w, c)| (w, c.mul_ref(&inv))).collect())
    }

    fn pow(&self, a: Terms<F>, n: i64) -> Result<Terms<F>> {
        if n < 0 {
            let c = scalar_part(&a).ok_or_else(|| Error::Parse {
                offset: 0,
                message: "negative power of a non-scalar".into(),
            })?;
            return self.scalar_terms(c.pow_i(n)?);
        }
        let mut acc = self.scalar_terms(F::one())?;
        for _ in 0..n {
            acc = free_mul(&acc, &a);
        }
        Ok(acc)
    }
}

impl<F: Field> FreeEvaluator<'_, F> {
    fn scalar_terms(&self, c: F) -> Result<Terms<F>> {
        let mut out = BTreeMap::new();
        accumulate(&mut out, Vec::new(), c);
        Ok(out)
    }
}

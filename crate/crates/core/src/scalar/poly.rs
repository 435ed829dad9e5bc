use super::Field;

/// Dense univariate polynomial, coefficients stored from degree zero upward
/// with no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    /// `c * s^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// True for `c * s^k`.
    pub fn is_monomial(&self) -> bool {
        match self.valuation() {
            Some(v) => v + 1 == self.coeffs.len(),
            None => false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => F::zero(),
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(F::neg_ref).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
                }
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    /// Multiply by `s^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Divide by `s^k`; the caller guarantees `k <= valuation`.
    pub fn shift_down(&self, k: usize) -> Self {
        Self {
            coeffs: self.coeffs[k.min(self.coeffs.len())..].to_vec(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lead_inv = divisor
            .lead()
            .expect("polynomial division by zero")
            .inv()
            .expect("nonzero leading coefficient");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].mul_ref(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = rem[idx].sub_ref(&c.mul_ref(d));
            }
            quot[k - dd] = c;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Scale to leading coefficient one.
    pub fn monic(&self) -> Self {
        match self.lead() {
            Some(l) if !l.is_one() => self.scale(&l.inv().expect("nonzero lead")),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc.mul_ref(x).add_ref(c))
    }

    /// Apply `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&F) -> F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Render in the variable `var`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let power = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let text = if k == 0 {
                c.to_string()
            } else if c.is_one() {
                power
            } else if c.neg_ref().is_one() {
                format!("-{power}")
            } else {
                format!("{}*{power}", c.render_factor())
            };
            if !out.is_empty() && !text.starts_with('-') {
                out.push('+');
            }
            out.push_str(&text);
        }
        out
    }
}

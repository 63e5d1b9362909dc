//! Polynomials whose coefficients are linear forms in template parameters.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::poly::{fmt_monomial, Monomial, Poly, PolyRing};
use crate::ring::ResidueInt;

/// `sum a_i * p_i` over the parameters `p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm(Vec<ResidueInt>);

impl LinearForm {
    pub fn zero(nparams: usize, width: u32) -> Self {
        LinearForm(vec![ResidueInt::zero(width); nparams])
    }

    pub fn unit(nparams: usize, idx: usize, width: u32) -> Self {
        let mut f = Self::zero(nparams, width);
        f.0[idx] = ResidueInt::one(width);
        f
    }

    pub fn from_coeffs(coeffs: Vec<ResidueInt>) -> Self {
        LinearForm(coeffs)
    }

    pub fn coeffs(&self) -> &[ResidueInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(ResidueInt::is_zero)
    }

    /// Minimum 2-adic valuation over the nonzero coefficients.
    pub fn nu2_bar(&self) -> Option<u32> {
        self.0.iter().filter_map(|c| c.nu2().ok()).min()
    }

    pub fn add_scaled(&mut self, other: &LinearForm, c: &ResidueInt) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = &*a + &(b * c);
        }
    }

    pub fn scale(&self, c: &ResidueInt) -> LinearForm {
        LinearForm(self.0.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `2^k`; the result is only
    /// determined modulo `2^(d-k)`, which is all that a later
    /// multiplication by `2^k` observes.
    pub fn shr(&self, k: u32) -> LinearForm {
        LinearForm(
            self.0
                .iter()
                .map(|a| ResidueInt::new(a.value() >> k, a.width()))
                .collect(),
        )
    }

    pub fn eval(&self, values: &[ResidueInt]) -> ResidueInt {
        let d = self.0.first().map_or(1, ResidueInt::width);
        self.0
            .iter()
            .zip(values)
            .fold(ResidueInt::zero(d), |acc, (a, v)| &acc + &(a * v))
    }

    pub fn signed_coeffs(&self) -> Vec<BigInt> {
        self.0.iter().map(ResidueInt::to_signed).collect()
    }

    fn render(&self, names: &[String]) -> (String, bool) {
        let parts: Vec<(BigInt, &String)> = self
            .signed_coeffs()
            .into_iter()
            .zip(names)
            .filter(|(c, _)| c.sign() != num_bigint::Sign::NoSign)
            .collect();
        let mut s = String::new();
        for (i, (c, name)) in parts.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    s.push('-');
                }
            } else {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if mag.is_one() {
                s.push_str(name);
            } else {
                s.push_str(&format!("{mag}*{name}"));
            }
        }
        (s, parts.len() > 1)
    }
}

/// A polynomial over `Z/2^d[params]` in the variables of `ring`.
#[derive(Debug, Clone)]
pub struct ParamPoly {
    ring: Arc<PolyRing>,
    params: Arc<Vec<String>>,
    terms: HashMap<Monomial, LinearForm>,
}

impl PartialEq for ParamPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.params == other.params && self.terms == other.terms
    }
}

impl ParamPoly {
    pub fn zero(ring: &Arc<PolyRing>, params: &Arc<Vec<String>>) -> Self {
        ParamPoly {
            ring: ring.clone(),
            params: params.clone(),
            terms: HashMap::new(),
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn width(&self) -> u32 {
        self.ring.width()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, form: &LinearForm, c: &ResidueInt) {
        let n = self.params.len();
        let d = self.width();
        let entry = self
            .terms
            .entry(mono.clone())
            .or_insert_with(|| LinearForm::zero(n, d));
        entry.add_scaled(form, c);
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn coeff(&self, mono: &Monomial) -> Option<&LinearForm> {
        self.terms.get(mono)
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> Vec<(&Monomial, &LinearForm)> {
        let order = self.ring.order();
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &ParamPoly, c: &ResidueInt) -> ParamPoly {
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f, c);
        }
        out
    }

    /// `self - form * m * g`.
    fn sub_form_times(&mut self, form: &LinearForm, m: &Monomial, g: &Poly) {
        for t in g.terms() {
            let c = -&t.coeff;
            self.add_term(t.mono.mul(m).expect("same ring"), form, &c);
        }
    }

    /// Moves the polynomial into `target`, sending variable `i` to `map[i]`.
    pub fn embed(&self, target: &Arc<PolyRing>, map: &[usize]) -> ParamPoly {
        let mut out = ParamPoly::zero(target, &self.params);
        let one = ResidueInt::one(self.width());
        for (m, f) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &x) in m.exponents().iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial::new(e), f, &one);
        }
        out
    }

    /// The concrete polynomial obtained by fixing every parameter.
    pub fn instantiate(&self, values: &[ResidueInt]) -> Poly {
        Poly::from_terms(
            &self.ring,
            self.terms
                .iter()
                .map(|(m, f)| (f.eval(values), m.clone()))
                .collect::<Vec<_>>(),
        )
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, form)) in terms.into_iter().enumerate() {
            let (mut c, compound) = form.render(&self.params);
            let mut sep = " + ";
            if !compound && c.starts_with('-') {
                c.remove(0);
                sep = " - ";
                if i == 0 {
                    write!(f, "-")?;
                }
            } else if compound {
                c = format!("({c})");
            }
            if i > 0 {
                write!(f, "{sep}")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{}", fmt_monomial(self.ring.vars(), m))?;
            }
        }
        Ok(())
    }
}

/// Template `sum_q l_q * q` over all monomials of degree at most `k`,
/// parameters `l1, l2, ...` in descending monomial order and `xi` last for
/// the constant monomial.
pub fn make_template(ring: &Arc<PolyRing>, k: u32) -> ParamPoly {
    let n = ring.nvars();
    let mut monos = Vec::new();
    let mut e = vec![0u32; n];
    enumerate_monomials(&mut e, 0, k, &mut monos);
    let order = ring.order();
    monos.sort_by(|a, b| order.cmp(b, a));
    let count = monos.len();
    let mut names: Vec<String> = (1..count).map(|i| format!("l{i}")).collect();
    names.push("xi".to_string());
    let params = Arc::new(names);
    let d = ring.width();
    let one = ResidueInt::one(d);
    let mut out = ParamPoly::zero(ring, &params);
    for (i, m) in monos.into_iter().enumerate() {
        out.add_term(m, &LinearForm::unit(count, i, d), &one);
    }
    out
}

fn enumerate_monomials(e: &mut Vec<u32>, var: usize, budget: u32, out: &mut Vec<Monomial>) {
    if var == e.len() {
        out.push(Monomial::new(e.clone()));
        return;
    }
    for x in 0..=budget {
        e[var] = x;
        enumerate_monomials(e, var + 1, budget - x, out);
    }
    e[var] = 0;
}

/// Parametric normal form: repeatedly cancels the largest term `c*m` for
/// which some `g` has `lm(g) | m` and `nu2(lc g) <= nu2_bar(c)`.
pub fn pnf(f: &ParamPoly, gens: &[Poly]) -> ParamPoly {
    let mut p = f.clone();
    loop {
        let step = p.terms().into_iter().find_map(|(m, form)| {
            let nu = form.nu2_bar()?;
            gens.iter().find_map(|g| {
                let lt = g.leading_term()?;
                let (k, odd) = lt.coeff.split_odd().ok()?;
                (k <= nu && lt.mono.divides(m).ok()?).then(|| {
                    let inv = crate::ring::inv_hensel(&odd).expect("odd");
                    let q = form.shr(k).scale(&inv);
                    (q, m.div_unchecked(&lt.mono), g.clone())
                })
            })
        });
        match step {
            Some((q, shift, g)) => p.sub_form_times(&q, &shift, &g),
            None => return p,
        }
    }
}

//! Rendering of scripts, models, verdicts and polynomials as SMT-LIB2.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::invgen::{Atom, RelOp};
use crate::poly::Poly;
use crate::ring::ResidueInt;
use crate::satcheck::Verdict;

use super::ast::{BoolTerm, BvTerm, Command, Script};

pub fn bv_sort(width: u32) -> String {
    format!("(_ BitVec {width})")
}

pub fn bv_literal(v: &ResidueInt) -> String {
    format!("(_ bv{} {})", v.value(), v.width())
}

fn nary(op: &str, parts: impl IntoIterator<Item = String>) -> String {
    let parts: Vec<String> = parts.into_iter().collect();
    format!("({op} {})", parts.join(" "))
}

fn term_body(p: &Poly, mono: &crate::poly::Monomial, mag: &BigInt) -> String {
    let d = p.width();
    let mut factors: Vec<String> = Vec::new();
    if !mag.is_one() || mono.is_one() {
        factors.push(bv_literal(&ResidueInt::from_bigint(mag, d)));
    }
    for (i, &e) in mono.exponents().iter().enumerate() {
        for _ in 0..e {
            factors.push(p.ring().vars()[i].clone());
        }
    }
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        nary("bvmul", factors)
    }
}

/// `p` as a `bvadd`/`bvsub`/`bvmul` term with signed coefficients.
pub fn poly_to_smt(p: &Poly) -> String {
    let mut acc: Option<String> = None;
    for t in p.terms() {
        let c = t.coeff.to_signed();
        let body = term_body(p, &t.mono, &c.abs());
        acc = Some(match acc {
            None if c.is_negative() => format!("(bvneg {body})"),
            None => body,
            Some(a) if c.is_negative() => format!("(bvsub {a} {body})"),
            Some(a) => format!("(bvadd {a} {body})"),
        });
    }
    acc.unwrap_or_else(|| bv_literal(&ResidueInt::zero(p.width())))
}

/// Order comparisons map to their unsigned bit-vector predicates.
pub fn atom_to_smt(a: &Atom) -> String {
    let op = match a.op {
        RelOp::Eq => "=",
        RelOp::Neq => "distinct",
        RelOp::Lt => "bvult",
        RelOp::Le => "bvule",
        RelOp::Gt => "bvugt",
        RelOp::Ge => "bvuge",
    };
    format!("({op} {} {})", poly_to_smt(&a.lhs), poly_to_smt(&a.rhs))
}

pub fn print_bv(t: &BvTerm) -> String {
    match t {
        BvTerm::Var(v) => v.clone(),
        BvTerm::Lit { value, width } => format!("(_ bv{value} {width})"),
        BvTerm::Add(ts) => nary("bvadd", ts.iter().map(print_bv)),
        BvTerm::Sub(ts) => nary("bvsub", ts.iter().map(print_bv)),
        BvTerm::Mul(ts) => nary("bvmul", ts.iter().map(print_bv)),
        BvTerm::Neg(t) => format!("(bvneg {})", print_bv(t)),
        BvTerm::Ite(c, a, b) => format!("(ite {} {} {})", print_bool(c), print_bv(a), print_bv(b)),
    }
}

pub fn print_bool(t: &BoolTerm) -> String {
    match t {
        BoolTerm::True => "true".into(),
        BoolTerm::False => "false".into(),
        BoolTerm::Not(a) => format!("(not {})", print_bool(a)),
        BoolTerm::And(ts) => nary("and", ts.iter().map(print_bool)),
        BoolTerm::Or(ts) => nary("or", ts.iter().map(print_bool)),
        BoolTerm::Implies(ts) => nary("=>", ts.iter().map(print_bool)),
        BoolTerm::Xor(ts) => nary("xor", ts.iter().map(print_bool)),
        BoolTerm::Iff(ts) => nary("=", ts.iter().map(print_bool)),
        BoolTerm::Eq(ts) => nary("=", ts.iter().map(print_bv)),
        BoolTerm::Distinct(ts) => nary("distinct", ts.iter().map(print_bv)),
        BoolTerm::Ite(c, a, b) => format!(
            "(ite {} {} {})",
            print_bool(c),
            print_bool(a),
            print_bool(b)
        ),
    }
}

/// One command per line.
pub fn print_script(s: &Script) -> String {
    let mut out = String::new();
    for c in &s.commands {
        let line = match c {
            Command::SetLogic(l) => format!("(set-logic {l})"),
            Command::Info(text) => text.clone(),
            Command::Declare { name, width } => {
                format!("(declare-const {name} {})", bv_sort(*width))
            }
            Command::Assert(t) => format!("(assert {})", print_bool(t)),
            Command::CheckSat => "(check-sat)".into(),
            Command::GetModel => "(get-model)".into(),
            Command::Exit => "(exit)".into(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// `sat` followed by a `(model ...)` in declaration order, or the bare
/// status for `unsat` and `unknown`.
pub fn print_verdict(v: &Verdict) -> String {
    match v {
        Verdict::Sat(model) => {
            let defs: Vec<String> = model
                .iter()
                .map(|(name, val)| {
                    format!(
                        "(define-fun {name} () {} {})",
                        bv_sort(val.width()),
                        bv_literal(val)
                    )
                })
                .collect();
            if defs.is_empty() {
                "sat\n(model)".into()
            } else {
                format!("sat\n(model {})", defs.join(" "))
            }
        }
        Verdict::Unsat(_) => "unsat".into(),
        Verdict::Unknown(_) => "unknown".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;

    #[test]
    fn model_format() {
        let v = Verdict::Sat(vec![("x".into(), ResidueInt::from_u64(2, 3))]);
        assert_eq!(
            print_verdict(&v),
            "sat\n(model (define-fun x () (_ BitVec 3) (_ bv2 3)))"
        );
        assert_eq!(print_verdict(&Verdict::Unsat(vec![])), "unsat");
        assert_eq!(print_verdict(&Verdict::Unknown("budget".into())), "unknown");
    }

    #[test]
    fn polynomials_render_signed() {
        let r = PolyRing::with_vars(8, &["x", "y"]);
        let p = Poly::parse(&r, "x - y + 8").unwrap();
        assert_eq!(poly_to_smt(&p), "(bvadd (bvsub x y) (_ bv8 8))");
        let p = Poly::parse(&r, "-3*x^2*y").unwrap();
        assert_eq!(poly_to_smt(&p), "(bvneg (bvmul (_ bv3 8) x x y))");
        assert_eq!(poly_to_smt(&Poly::zero(&r)), "(_ bv0 8)");
    }
}

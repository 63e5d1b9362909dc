//! Loop files: `(width d)`, `(vars x y ...)`, `(pre atom ...)`,
//! `(guard atom ...)`, `(trans (= x' poly) ...)`, `(post atom ...)`,
//! `(mode verify|refute)`. Atoms are `(op lhs rhs)` or `(rel op lhs rhs)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::invgen::{Atom, LoopProblem, Mode, RelOp};
use crate::poly::{Poly, PolyRing};
use crate::ring::ResidueInt;

use super::diag::{Diagnostic, ErrorCode, PResult, Span};
use super::sexpr::{read_all, Sexp, SexpKind};
use super::smt2::{bv_literal, check_name, parse_width};

/// Largest exponent accepted by `^`.
pub const MAX_EXPONENT: u32 = 16;

const SECTIONS: &[&str] = &["width", "vars", "pre", "guard", "trans", "post", "mode"];

fn err(code: ErrorCode, span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(code, span, msg)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    State,
    Trans,
}

struct Terms<'a> {
    ring: &'a Arc<PolyRing>,
    scope: Scope,
    /// Unprimed names of the loop variables.
    vars: &'a [String],
}

impl Terms<'_> {
    fn symbol(&self, sym: &str, span: Span) -> PResult<Poly> {
        let d = self.ring.width();
        let digits = sym.strip_prefix('-').unwrap_or(sym);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let v: BigInt = sym.parse().expect("signed decimal");
            return Ok(Poly::constant(self.ring, ResidueInt::from_bigint(&v, d)));
        }
        if let Some(base) = sym.strip_suffix('\'') {
            if self.vars.iter().any(|v| v == base) && self.scope == Scope::State {
                return Err(err(
                    ErrorCode::PrimedOutsideTrans,
                    span,
                    format!("primed variable `{sym}` outside `trans`"),
                ));
            }
        }
        Poly::var_named(self.ring, sym).map_err(|_| {
            err(
                ErrorCode::UnknownSymbol,
                span,
                format!("unknown variable `{sym}`"),
            )
        })
    }

    fn poly(&self, s: &Sexp) -> PResult<Poly> {
        if let Some(lit) = bv_literal(s) {
            let (v, w) = lit?;
            if w != self.ring.width() {
                return Err(err(
                    ErrorCode::WidthMix,
                    s.span,
                    format!(
                        "literal width {w} differs from the loop width {}",
                        self.ring.width()
                    ),
                ));
            }
            return Ok(Poly::constant(self.ring, ResidueInt::new(v, w)));
        }
        match &s.kind {
            SexpKind::Str(_) => Err(err(
                ErrorCode::Sort,
                s.span,
                "string literals are not terms",
            )),
            SexpKind::Symbol(sym) => self.symbol(sym, s.span),
            SexpKind::List(items) => {
                let Some(op) = items.first().and_then(Sexp::symbol) else {
                    return Err(err(ErrorCode::Parse, s.span, "expected an operator"));
                };
                let args = &items[1..];
                let polys = || {
                    args.iter()
                        .map(|a| self.poly(a))
                        .collect::<PResult<Vec<_>>>()
                };
                let need = |min: usize| {
                    if args.len() < min {
                        Err(err(
                            ErrorCode::Parse,
                            s.span,
                            format!("too few arguments to `{op}`"),
                        ))
                    } else {
                        Ok(())
                    }
                };
                match op {
                    "+" | "bvadd" => {
                        need(1)?;
                        Ok(polys()?
                            .into_iter()
                            .reduce(|a, b| &a + &b)
                            .expect("nonempty"))
                    }
                    "*" | "bvmul" => {
                        need(1)?;
                        Ok(polys()?
                            .into_iter()
                            .reduce(|a, b| &a * &b)
                            .expect("nonempty"))
                    }
                    "-" | "bvsub" | "bvneg" => {
                        need(1)?;
                        let ps = polys()?;
                        if ps.len() == 1 {
                            Ok(-&ps[0])
                        } else if op == "bvneg" {
                            Err(err(ErrorCode::Parse, s.span, "`bvneg` takes one argument"))
                        } else {
                            Ok(ps.into_iter().reduce(|a, b| &a - &b).expect("nonempty"))
                        }
                    }
                    "^" => {
                        if args.len() != 2 {
                            return Err(err(
                                ErrorCode::Parse,
                                s.span,
                                "`^` takes a base and an exponent",
                            ));
                        }
                        let base = self.poly(&args[0])?;
                        let e = args[1]
                            .symbol()
                            .and_then(|t| t.parse::<u32>().ok())
                            .ok_or_else(|| {
                                err(ErrorCode::Parse, args[1].span, "expected an exponent")
                            })?;
                        if e > MAX_EXPONENT {
                            return Err(err(
                                ErrorCode::Unsupported,
                                args[1].span,
                                "exponent too large",
                            ));
                        }
                        Ok(base.pow(e))
                    }
                    _ => Err(err(
                        ErrorCode::Unsupported,
                        items[0].span,
                        format!("operator `{op}` is not supported in loop files"),
                    )),
                }
            }
        }
    }

    fn atom(&self, s: &Sexp) -> PResult<(RelOp, Poly, Poly)> {
        let items = s
            .list()
            .ok_or_else(|| err(ErrorCode::Parse, s.span, "expected an atom `(op lhs rhs)`"))?;
        let items = if items.first().and_then(Sexp::symbol) == Some("rel") {
            &items[1..]
        } else {
            items
        };
        if items.len() != 3 {
            return Err(err(
                ErrorCode::Parse,
                s.span,
                "expected an atom `(op lhs rhs)`",
            ));
        }
        let op_sym = items[0]
            .symbol()
            .ok_or_else(|| err(ErrorCode::Parse, items[0].span, "expected a relation"))?;
        let op = match op_sym {
            "=" => RelOp::Eq,
            "!=" | "distinct" => RelOp::Neq,
            "<" | "bvult" => RelOp::Lt,
            "<=" | "bvule" => RelOp::Le,
            ">" | "bvugt" => RelOp::Gt,
            ">=" | "bvuge" => RelOp::Ge,
            other => {
                return Err(err(
                    ErrorCode::Unsupported,
                    items[0].span,
                    format!("unknown relation `{other}`"),
                ))
            }
        };
        if self.scope == Scope::Trans && op != RelOp::Eq {
            return Err(err(
                ErrorCode::TransNotEquational,
                s.span,
                format!("transition atom uses `{op_sym}`; only `=` is allowed"),
            ));
        }
        Ok((op, self.poly(&items[1])?, self.poly(&items[2])?))
    }
}

pub fn parse_loop(text: &str) -> PResult<LoopProblem> {
    let forms = read_all(text)?;
    let mut sections: HashMap<&str, &Sexp> = HashMap::new();
    for f in &forms {
        let Some(head) = f.head() else {
            return Err(err(
                ErrorCode::Parse,
                f.span,
                "expected a section `(name ...)`",
            ));
        };
        if !SECTIONS.contains(&head) {
            return Err(err(
                ErrorCode::Parse,
                f.span,
                format!("unknown section `{head}`"),
            ));
        }
        if sections.insert(head, f).is_some() {
            return Err(err(
                ErrorCode::Parse,
                f.span,
                format!("duplicate section `{head}`"),
            ));
        }
    }
    let section_args = |name: &str| sections.get(name).map(|s| &s.list().expect("list")[1..]);
    let end = Span::new(1, 1);

    let width = match (sections.get("width"), section_args("width")) {
        (Some(_), Some([w])) => parse_width(w),
        (Some(s), _) => Err(err(ErrorCode::Parse, s.span, "`width` takes one value")),
        _ => Err(err(ErrorCode::Parse, end, "missing `(width d)`")),
    }?;

    let var_items =
        section_args("vars").ok_or_else(|| err(ErrorCode::Parse, end, "missing `(vars ...)`"))?;
    if var_items.is_empty() {
        return Err(err(
            ErrorCode::Parse,
            sections["vars"].span,
            "at least one variable is required",
        ));
    }
    let mut vars: Vec<String> = Vec::new();
    for v in var_items {
        let name = v
            .symbol()
            .ok_or_else(|| err(ErrorCode::Parse, v.span, "expected a variable name"))?;
        check_name(name, v.span)?;
        if vars.iter().any(|x| x == name) {
            return Err(err(
                ErrorCode::Parse,
                v.span,
                format!("`{name}` listed twice"),
            ));
        }
        vars.push(name.to_string());
    }

    let mode = match section_args("mode") {
        None => Mode::Verify,
        Some([m]) if m.symbol() == Some("verify") => Mode::Verify,
        Some([m]) if m.symbol() == Some("refute") => Mode::Refute,
        Some(_) => {
            return Err(err(
                ErrorCode::Parse,
                sections["mode"].span,
                "`mode` is `verify` or `refute`",
            ))
        }
    };

    let mut lp = LoopProblem::new(width, &vars, mode);
    let state_ring = lp.ring().clone();
    let trans_ring = lp.trans_ring().clone();
    let state = Terms {
        ring: &state_ring,
        scope: Scope::State,
        vars: &vars,
    };
    let trans = Terms {
        ring: &trans_ring,
        scope: Scope::Trans,
        vars: &vars,
    };
    for (name, target) in [("pre", 0), ("guard", 1), ("post", 2)] {
        for a in section_args(name).unwrap_or(&[]) {
            let (op, l, r) = state.atom(a)?;
            let atom = Atom::new(op, l, r);
            match target {
                0 => lp.pre.push(atom),
                1 => lp.guard.push(atom),
                _ => lp.post.push(atom),
            }
        }
    }
    for a in section_args("trans").unwrap_or(&[]) {
        let (_, l, r) = trans.atom(a)?;
        lp.trans.push((l, r));
    }
    Ok(lp)
}

/// Loop file text for `lp`.
pub fn print_loop(lp: &LoopProblem) -> String {
    use super::printer::poly_to_smt;
    let atom = |a: &Atom| {
        let op = match a.op {
            RelOp::Eq => "=",
            RelOp::Neq => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        };
        format!("({op} {} {})", poly_to_smt(&a.lhs), poly_to_smt(&a.rhs))
    };
    let section = |name: &str, atoms: &[Atom]| {
        let parts: Vec<String> = atoms.iter().map(atom).collect();
        format!(
            "({name}{}{})\n",
            if parts.is_empty() { "" } else { " " },
            parts.join(" ")
        )
    };
    let mut s = format!("(width {})\n(vars {})\n", lp.width(), lp.vars().join(" "));
    s.push_str(&section("pre", &lp.pre));
    s.push_str(&section("guard", &lp.guard));
    let trans: Vec<String> = lp
        .trans
        .iter()
        .map(|(l, r)| format!("(= {} {})", poly_to_smt(l), poly_to_smt(r)))
        .collect();
    s.push_str(&format!("(trans {})\n", trans.join(" ")));
    s.push_str(&section("post", &lp.post));
    s.push_str(match lp.mode {
        Mode::Verify => "(mode verify)\n",
        Mode::Refute => "(mode refute)\n",
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "
        (width 32)
        (vars x y)
        (pre (= x 1) (= y 9))
        (guard (!= y 0))
        (trans (= x' (+ x 1)) (= y' (+ y 1)))
        (post (< (- y x) 10))
        (mode verify)";

    #[test]
    fn parses_loop_example() {
        let lp = parse_loop(EXAMPLE).unwrap();
        assert_eq!(lp.vars(), &["x", "y"]);
        assert_eq!(lp.width(), 32);
        let shown: Vec<String> = lp
            .pre
            .iter()
            .chain(&lp.guard)
            .chain(&lp.post)
            .map(|a| a.to_string())
            .collect();
        assert_eq!(shown, vec!["x = 1", "y = 9", "y != 0", "-x + y < 10"]);
        let trans: Vec<String> = lp.trans.iter().map(|(l, r)| format!("{l} = {r}")).collect();
        assert_eq!(trans, vec!["x' = x + 1", "y' = y + 1"]);
        assert_eq!(lp.mode, Mode::Verify);
        let again = parse_loop(&print_loop(&lp)).unwrap();
        assert_eq!(print_loop(&again), print_loop(&lp));
    }

    #[test]
    fn loop_errors() {
        let e = parse_loop("(width 8)(vars x)(trans (< x' x))").unwrap_err();
        assert_eq!(
            (e.code, e.span),
            (ErrorCode::TransNotEquational, Span::new(1, 25))
        );
        let e = parse_loop("(width 8)(vars x)(pre (= x' 1))").unwrap_err();
        assert_eq!(e.code, ErrorCode::PrimedOutsideTrans);
        let e = parse_loop("(width 8)(vars x)(pre (= z 1))").unwrap_err();
        assert_eq!(e.code, ErrorCode::UnknownSymbol);
        let e = parse_loop("(vars x)").unwrap_err();
        assert_eq!(e.code, ErrorCode::Parse);
        assert!(e.span.is_valid());
    }

    #[test]
    fn empty_pre_is_true() {
        let lp = parse_loop("(width 8)(vars x)(pre)(trans (= x' (* 3 x)))").unwrap();
        assert!(lp.pre.is_empty());
    }
}

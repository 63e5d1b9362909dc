//! The accepted SMT-LIB2 subset: `declare-const`/`declare-fun` of
//! bit-vector constants, `assert` over `=`, `distinct`, boolean connectives,
//! `ite`, and `bvadd`/`bvsub`/`bvmul`/`bvneg`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Num;

use crate::poly::{MonomialOrdering, OrderKind, Poly, PolyRing};
use crate::ring::{modulus, ResidueInt};
use crate::satcheck::{Formula, AUX_PREFIX};

use super::ast::{BoolTerm, BvTerm, Command, Script};
use super::diag::{Diagnostic, ErrorCode, PResult, Span};
use super::sexpr::{read_all, Sexp, SexpKind};

/// Largest accepted bit-vector width.
pub const MAX_WIDTH: u32 = 1 << 16;
/// Largest number of `ite` branches one term may expand into.
pub const MAX_ITE_CASES: usize = 1024;

const UNSUPPORTED_OPS: &[&str] = &[
    "bvand",
    "bvor",
    "bvxor",
    "bvnot",
    "bvnand",
    "bvnor",
    "bvxnor",
    "bvcomp",
    "bvudiv",
    "bvurem",
    "bvsdiv",
    "bvsrem",
    "bvsmod",
    "bvshl",
    "bvlshr",
    "bvashr",
    "concat",
    "extract",
    "repeat",
    "zero_extend",
    "sign_extend",
    "rotate_left",
    "rotate_right",
    "bvult",
    "bvule",
    "bvugt",
    "bvuge",
    "bvslt",
    "bvsle",
    "bvsgt",
    "bvsge",
    "let",
    "forall",
    "exists",
    "!",
    "select",
    "store",
    "bv2nat",
    "nat2bv",
    "+",
    "-",
    "*",
    "<",
    "<=",
    ">",
    ">=",
];

fn err(code: ErrorCode, span: Span, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(code, span, msg)
}

/// `(_ bvN w)`, `#b...` or `#x...`; `None` when `s` is none of these.
pub(crate) fn bv_literal(s: &Sexp) -> Option<PResult<(BigUint, u32)>> {
    match &s.kind {
        SexpKind::Symbol(sym) => {
            let (digits, radix, per) = if let Some(b) = sym.strip_prefix("#b") {
                (b, 2, 1)
            } else {
                let x = sym.strip_prefix("#x")?;
                (x, 16, 4)
            };
            Some(literal_digits(digits, radix, per, s.span))
        }
        SexpKind::List(items) if items.first().and_then(Sexp::symbol) == Some("_") => {
            let name = items.get(1)?.symbol()?;
            let value = name.strip_prefix("bv")?;
            if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            Some((|| {
                if items.len() != 3 {
                    return Err(err(ErrorCode::Parse, s.span, "`(_ bvN w)` takes a width"));
                }
                let w = parse_width(&items[2])?;
                let v = BigUint::from_str_radix(value, 10).expect("decimal digits");
                Ok((v % modulus(w), w))
            })())
        }
        _ => None,
    }
}

fn literal_digits(digits: &str, radix: u32, per: u32, span: Span) -> PResult<(BigUint, u32)> {
    if digits.is_empty() {
        return Err(err(ErrorCode::Parse, span, "empty bit-vector literal"));
    }
    let v = BigUint::from_str_radix(digits, radix)
        .map_err(|_| err(ErrorCode::Parse, span, "malformed bit-vector literal"))?;
    let w = u32::try_from(digits.len())
        .ok()
        .and_then(|n| n.checked_mul(per))
        .filter(|&w| w <= MAX_WIDTH)
        .ok_or_else(|| err(ErrorCode::Unsupported, span, "literal too wide"))?;
    Ok((v, w))
}

/// A positive decimal width not above [`MAX_WIDTH`].
pub(crate) fn parse_width(s: &Sexp) -> PResult<u32> {
    let sym = s
        .symbol()
        .filter(|t| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| err(ErrorCode::Parse, s.span, "expected a width"))?;
    match sym.parse::<u32>() {
        Ok(w) if (1..=MAX_WIDTH).contains(&w) => Ok(w),
        Ok(0) => Err(err(ErrorCode::Parse, s.span, "width must be positive")),
        _ => Err(err(
            ErrorCode::Unsupported,
            s.span,
            format!("width above {MAX_WIDTH}"),
        )),
    }
}

/// Checks that `name` can be a declared symbol.
pub(crate) fn check_name(name: &str, span: Span) -> PResult<()> {
    if name.starts_with(AUX_PREFIX) {
        return Err(err(
            ErrorCode::Reserved,
            span,
            format!("`{name}` uses a reserved prefix"),
        ));
    }
    let first = name.chars().next();
    let valid = first.is_some_and(|c| !c.is_ascii_digit() && c != '#' && c != ':')
        && name.chars().all(|c| c.is_ascii_graphic() && c != '\'')
        && !matches!(name, "true" | "false" | "_" | "!");
    if !valid {
        return Err(err(
            ErrorCode::Parse,
            span,
            format!("`{name}` is not a valid name"),
        ));
    }
    Ok(())
}

enum Term {
    Bv(BvTerm, usize),
    Bool(BoolTerm),
}

struct Parser {
    decls: HashMap<String, u32>,
    width: Option<u32>,
}

impl Parser {
    fn use_width(&mut self, w: u32, span: Span) -> PResult<()> {
        match self.width {
            None => {
                self.width = Some(w);
                Ok(())
            }
            Some(v) if v == w => Ok(()),
            Some(v) => Err(err(
                ErrorCode::WidthMix,
                span,
                format!("width {w} differs from the problem width {v}"),
            )),
        }
    }

    fn bv(&mut self, s: &Sexp) -> PResult<(BvTerm, usize)> {
        match self.term(s)? {
            Term::Bv(t, n) => Ok((t, n)),
            Term::Bool(_) => Err(err(ErrorCode::Sort, s.span, "expected a bit-vector term")),
        }
    }

    fn boolean(&mut self, s: &Sexp) -> PResult<BoolTerm> {
        match self.term(s)? {
            Term::Bool(t) => Ok(t),
            Term::Bv(..) => Err(err(ErrorCode::Sort, s.span, "expected a boolean term")),
        }
    }

    fn term(&mut self, s: &Sexp) -> PResult<Term> {
        if let Some(lit) = bv_literal(s) {
            let (value, width) = lit?;
            self.use_width(width, s.span)?;
            return Ok(Term::Bv(BvTerm::Lit { value, width }, 1));
        }
        match &s.kind {
            SexpKind::Str(_) => Err(err(
                ErrorCode::Sort,
                s.span,
                "string literals are not terms",
            )),
            SexpKind::Symbol(sym) => match sym.as_str() {
                "true" => Ok(Term::Bool(BoolTerm::True)),
                "false" => Ok(Term::Bool(BoolTerm::False)),
                _ if sym.bytes().all(|b| b.is_ascii_digit()) => Err(err(
                    ErrorCode::Unsupported,
                    s.span,
                    "integer literals are not supported",
                )),
                _ => match self.decls.get(sym) {
                    Some(_) => Ok(Term::Bv(BvTerm::Var(sym.clone()), 1)),
                    None => Err(err(
                        ErrorCode::UnknownSymbol,
                        s.span,
                        format!("unknown symbol `{sym}`"),
                    )),
                },
            },
            SexpKind::List(items) => {
                let Some(head) = items.first() else {
                    return Err(err(ErrorCode::Parse, s.span, "empty application"));
                };
                let Some(op) = head.symbol() else {
                    return Err(err(
                        ErrorCode::Unsupported,
                        head.span,
                        "indexed or compound operator",
                    ));
                };
                self.app(op, &items[1..], s.span, head.span)
            }
        }
    }

    fn arity(args: &[Sexp], min: usize, max: Option<usize>, op: &str, span: Span) -> PResult<()> {
        if args.len() < min || max.is_some_and(|m| args.len() > m) {
            return Err(err(
                ErrorCode::Parse,
                span,
                format!("wrong number of arguments to `{op}`"),
            ));
        }
        Ok(())
    }

    fn cases(n: usize, span: Span) -> PResult<usize> {
        if n > MAX_ITE_CASES {
            Err(err(ErrorCode::Unsupported, span, "too many `ite` branches"))
        } else {
            Ok(n)
        }
    }

    fn app(&mut self, op: &str, args: &[Sexp], span: Span, head_span: Span) -> PResult<Term> {
        match op {
            "bvadd" | "bvsub" | "bvmul" => {
                Self::arity(args, 2, None, op, span)?;
                let mut ts = Vec::new();
                let mut n = 1usize;
                for a in args {
                    let (t, k) = self.bv(a)?;
                    n = Self::cases(n.saturating_mul(k), span)?;
                    ts.push(t);
                }
                let t = match op {
                    "bvadd" => BvTerm::Add(ts),
                    "bvsub" => BvTerm::Sub(ts),
                    _ => BvTerm::Mul(ts),
                };
                Ok(Term::Bv(t, n))
            }
            "bvneg" => {
                Self::arity(args, 1, Some(1), op, span)?;
                let (t, k) = self.bv(&args[0])?;
                Ok(Term::Bv(BvTerm::Neg(Box::new(t)), k))
            }
            "ite" => {
                Self::arity(args, 3, Some(3), op, span)?;
                let c = self.boolean(&args[0])?;
                match (self.term(&args[1])?, self.term(&args[2])?) {
                    (Term::Bv(a, ka), Term::Bv(b, kb)) => {
                        let n = Self::cases(ka + kb, span)?;
                        Ok(Term::Bv(
                            BvTerm::Ite(Box::new(c), Box::new(a), Box::new(b)),
                            n,
                        ))
                    }
                    (Term::Bool(a), Term::Bool(b)) => Ok(Term::Bool(BoolTerm::Ite(
                        Box::new(c),
                        Box::new(a),
                        Box::new(b),
                    ))),
                    _ => Err(err(
                        ErrorCode::Sort,
                        args[2].span,
                        "`ite` branches differ in sort",
                    )),
                }
            }
            "not" => {
                Self::arity(args, 1, Some(1), op, span)?;
                Ok(Term::Bool(BoolTerm::Not(Box::new(self.boolean(&args[0])?))))
            }
            "and" | "or" | "=>" | "xor" => {
                Self::arity(
                    args,
                    if matches!(op, "and" | "or") { 1 } else { 2 },
                    None,
                    op,
                    span,
                )?;
                let ts = args
                    .iter()
                    .map(|a| self.boolean(a))
                    .collect::<PResult<Vec<_>>>()?;
                Ok(Term::Bool(match op {
                    "and" => BoolTerm::And(ts),
                    "or" => BoolTerm::Or(ts),
                    "=>" => BoolTerm::Implies(ts),
                    _ => BoolTerm::Xor(ts),
                }))
            }
            "=" | "distinct" => {
                Self::arity(args, 2, None, op, span)?;
                let first = self.term(&args[0])?;
                match first {
                    Term::Bv(t, k) => {
                        let mut ts = vec![t];
                        let mut total = k;
                        for a in &args[1..] {
                            let (t, k) = self.bv(a)?;
                            total = Self::cases(total.saturating_mul(k), span)?;
                            ts.push(t);
                        }
                        Ok(Term::Bool(if op == "=" {
                            BoolTerm::Eq(ts)
                        } else {
                            BoolTerm::Distinct(ts)
                        }))
                    }
                    Term::Bool(t) => {
                        let mut ts = vec![t];
                        for a in &args[1..] {
                            ts.push(self.boolean(a)?);
                        }
                        if op == "=" {
                            Ok(Term::Bool(BoolTerm::Iff(ts)))
                        } else {
                            let mut pairs = Vec::new();
                            for i in 0..ts.len() {
                                for j in i + 1..ts.len() {
                                    pairs.push(BoolTerm::Xor(vec![ts[i].clone(), ts[j].clone()]));
                                }
                            }
                            Ok(Term::Bool(BoolTerm::And(pairs)))
                        }
                    }
                }
            }
            _ if UNSUPPORTED_OPS.contains(&op) || op.starts_with("bv") => Err(err(
                ErrorCode::Unsupported,
                head_span,
                format!("operator `{op}` is outside the supported fragment"),
            )),
            _ => Err(err(
                ErrorCode::UnknownSymbol,
                head_span,
                format!("unknown function `{op}`"),
            )),
        }
    }

    fn sort(&mut self, s: &Sexp) -> PResult<u32> {
        match &s.kind {
            SexpKind::Symbol(b) if b == "Bool" => Err(err(
                ErrorCode::Unsupported,
                s.span,
                "boolean constants are not supported",
            )),
            SexpKind::List(items)
                if items.len() == 3
                    && items[0].symbol() == Some("_")
                    && items[1].symbol() == Some("BitVec") =>
            {
                parse_width(&items[2])
            }
            _ => Err(err(
                ErrorCode::UnknownSymbol,
                s.span,
                format!("unknown sort `{s}`"),
            )),
        }
    }

    fn command(&mut self, s: &Sexp) -> PResult<Command> {
        let items = s
            .list()
            .ok_or_else(|| err(ErrorCode::Parse, s.span, "expected a command"))?;
        let Some(head) = items.first() else {
            return Err(err(ErrorCode::Parse, s.span, "empty command"));
        };
        let name = head
            .symbol()
            .ok_or_else(|| err(ErrorCode::Parse, head.span, "expected a command name"))?;
        let args = &items[1..];
        let want = |n: usize| -> PResult<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(err(
                    ErrorCode::Parse,
                    s.span,
                    format!("`{name}` takes {n} argument(s)"),
                ))
            }
        };
        match name {
            "set-logic" => {
                want(1)?;
                let logic = args[0]
                    .symbol()
                    .ok_or_else(|| err(ErrorCode::Parse, args[0].span, "expected a logic name"))?;
                Ok(Command::SetLogic(logic.to_string()))
            }
            "set-info" | "set-option" => Ok(Command::Info(s.to_string())),
            "check-sat" => want(0).map(|_| Command::CheckSat),
            "get-model" => want(0).map(|_| Command::GetModel),
            "exit" => want(0).map(|_| Command::Exit),
            "declare-const" | "declare-fun" => {
                let sort_expr = if name == "declare-const" {
                    want(2)?;
                    &args[1]
                } else {
                    want(3)?;
                    match args[1].list() {
                        Some([]) => {}
                        _ => {
                            return Err(err(
                                ErrorCode::Unsupported,
                                args[1].span,
                                "uninterpreted functions are not supported",
                            ))
                        }
                    }
                    &args[2]
                };
                let cname = args[0]
                    .symbol()
                    .ok_or_else(|| err(ErrorCode::Parse, args[0].span, "expected a name"))?;
                check_name(cname, args[0].span)?;
                if self.decls.contains_key(cname) {
                    return Err(err(
                        ErrorCode::Parse,
                        args[0].span,
                        format!("`{cname}` redeclared"),
                    ));
                }
                let w = self.sort(sort_expr)?;
                self.use_width(w, sort_expr.span)?;
                self.decls.insert(cname.to_string(), w);
                Ok(Command::Declare {
                    name: cname.to_string(),
                    width: w,
                })
            }
            "assert" => {
                want(1)?;
                Ok(Command::Assert(self.boolean(&args[0])?))
            }
            _ => Err(err(
                ErrorCode::Unsupported,
                head.span,
                format!("command `{name}` is not supported"),
            )),
        }
    }
}

pub fn parse_smt2(text: &str) -> PResult<Script> {
    let forms = read_all(text)?;
    let mut p = Parser {
        decls: HashMap::new(),
        width: None,
    };
    let commands = forms
        .iter()
        .map(|f| p.command(f))
        .collect::<PResult<Vec<_>>>()?;
    Ok(Script {
        commands,
        width: p.width,
    })
}

/// A parsed script as a satcheck problem over its declared constants.
#[derive(Debug, Clone)]
pub struct Problem {
    pub ring: Arc<PolyRing>,
    pub formula: Formula,
}

enum Cases {
    Leaf(Poly),
    Split(Formula, Box<Cases>, Box<Cases>),
}

impl Cases {
    fn map(&self, f: &dyn Fn(&Poly) -> Poly) -> Cases {
        match self {
            Cases::Leaf(p) => Cases::Leaf(f(p)),
            Cases::Split(c, a, b) => {
                Cases::Split(c.clone(), Box::new(a.map(f)), Box::new(b.map(f)))
            }
        }
    }

    fn zip(&self, other: &Cases, f: &dyn Fn(&Poly, &Poly) -> Poly) -> Cases {
        match self {
            Cases::Leaf(p) => other.map(&|q| f(p, q)),
            Cases::Split(c, a, b) => Cases::Split(
                c.clone(),
                Box::new(a.zip(other, f)),
                Box::new(b.zip(other, f)),
            ),
        }
    }

    fn compare(&self, other: &Cases, eq: bool) -> Formula {
        match (self, other) {
            (Cases::Leaf(p), Cases::Leaf(q)) => {
                if eq {
                    Formula::eq(p.clone(), q.clone())
                } else {
                    Formula::neq(p.clone(), q.clone())
                }
            }
            (Cases::Leaf(_), Cases::Split(c, a, b)) => {
                Formula::ite(c.clone(), self.compare(a, eq), self.compare(b, eq))
            }
            (Cases::Split(c, a, b), _) => {
                Formula::ite(c.clone(), a.compare(other, eq), b.compare(other, eq))
            }
        }
    }
}

fn conj(mut parts: Vec<Formula>) -> Formula {
    if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Formula::And(parts)
    }
}

struct Lowering<'a> {
    ring: &'a Arc<PolyRing>,
}

impl Lowering<'_> {
    fn bv(&self, t: &BvTerm) -> Cases {
        let fold = |ts: &[BvTerm], f: &dyn Fn(&Poly, &Poly) -> Poly| {
            let mut acc = self.bv(&ts[0]);
            for t in &ts[1..] {
                acc = acc.zip(&self.bv(t), f);
            }
            acc
        };
        match t {
            BvTerm::Var(name) => Cases::Leaf(Poly::var_named(self.ring, name).expect("declared")),
            BvTerm::Lit { value, width } => Cases::Leaf(Poly::constant(
                self.ring,
                ResidueInt::new(value.clone(), *width),
            )),
            BvTerm::Add(ts) => fold(ts, &|a, b| a + b),
            BvTerm::Sub(ts) => fold(ts, &|a, b| a - b),
            BvTerm::Mul(ts) => fold(ts, &|a, b| a * b),
            BvTerm::Neg(t) => self.bv(t).map(&|p| -p),
            BvTerm::Ite(c, a, b) => {
                Cases::Split(self.boolean(c), Box::new(self.bv(a)), Box::new(self.bv(b)))
            }
        }
    }

    fn boolean(&self, t: &BoolTerm) -> Formula {
        match t {
            BoolTerm::True => Formula::True,
            BoolTerm::False => Formula::False,
            BoolTerm::Not(a) => Formula::negation(self.boolean(a)),
            BoolTerm::And(ts) => Formula::And(ts.iter().map(|t| self.boolean(t)).collect()),
            BoolTerm::Or(ts) => Formula::Or(ts.iter().map(|t| self.boolean(t)).collect()),
            BoolTerm::Implies(ts) => {
                let mut fs: Vec<Formula> = ts.iter().map(|t| self.boolean(t)).collect();
                let mut acc = fs.pop().expect("arity checked");
                while let Some(a) = fs.pop() {
                    acc = Formula::Or(vec![Formula::negation(a), acc]);
                }
                acc
            }
            BoolTerm::Xor(ts) => {
                let fs: Vec<Formula> = ts.iter().map(|t| self.boolean(t)).collect();
                let mut acc = fs[0].clone();
                for f in &fs[1..] {
                    acc = Formula::ite(acc, Formula::negation(f.clone()), f.clone());
                }
                acc
            }
            BoolTerm::Iff(ts) => {
                let fs: Vec<Formula> = ts.iter().map(|t| self.boolean(t)).collect();
                conj(
                    fs.windows(2)
                        .map(|w| {
                            Formula::ite(
                                w[0].clone(),
                                w[1].clone(),
                                Formula::negation(w[1].clone()),
                            )
                        })
                        .collect(),
                )
            }
            BoolTerm::Eq(ts) => {
                let cs: Vec<Cases> = ts.iter().map(|t| self.bv(t)).collect();
                conj(cs.windows(2).map(|w| w[0].compare(&w[1], true)).collect())
            }
            BoolTerm::Distinct(ts) => {
                let cs: Vec<Cases> = ts.iter().map(|t| self.bv(t)).collect();
                let mut parts = Vec::new();
                for i in 0..cs.len() {
                    for j in i + 1..cs.len() {
                        parts.push(cs[i].compare(&cs[j], false));
                    }
                }
                conj(parts)
            }
            BoolTerm::Ite(c, a, b) => {
                Formula::ite(self.boolean(c), self.boolean(a), self.boolean(b))
            }
        }
    }
}

/// Satcheck problem for `script` with the given ordering kind over the
/// declared constants (declaration order gives priority).
pub fn lower(script: &Script, order: OrderKind) -> Problem {
    let names: Vec<String> = script.decls().iter().map(|(n, _)| n.to_string()).collect();
    let width = script.width.unwrap_or(1);
    let ordering = match order {
        OrderKind::Elimination { .. } => MonomialOrdering::new(OrderKind::GradedLex, names.len()),
        k => MonomialOrdering::new(k, names.len()),
    };
    let ring = PolyRing::new(width, names, ordering);
    let lw = Lowering { ring: &ring };
    let formula = conj(script.asserts().map(|t| lw.boolean(t)).collect());
    Problem { ring, formula }
}

//! Line-oriented polynomial lists:
//!
//! ```text
//! # comment
//! width 8
//! vars x y
//! x^2 - 2*y
//! x*y + 3
//! ```

use std::sync::Arc;

use crate::poly::{MonomialOrdering, OrderKind, Poly, PolyRing};

use super::diag::{Diagnostic, ErrorCode, PResult, Span};
use super::smt2::MAX_WIDTH;

fn err(code: ErrorCode, line: usize, col: usize, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(code, Span::new(line, col), msg)
}

fn valid_var(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ring and generators of a polynomial list file.
pub fn parse_poly_file(text: &str, order: OrderKind) -> PResult<(Arc<PolyRing>, Vec<Poly>)> {
    let mut width: Option<u32> = None;
    let mut ring: Option<Arc<PolyRing>> = None;
    let mut polys = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("");
        let col = body.len() - body.trim_start().len() + 1;
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match head {
            "width" => {
                if width.is_some() {
                    return Err(err(ErrorCode::Parse, line, col, "duplicate `width`"));
                }
                let w = rest
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| err(ErrorCode::Parse, line, col, "expected a width"))?;
                if w == 0 || w > MAX_WIDTH {
                    return Err(err(
                        ErrorCode::Unsupported,
                        line,
                        col,
                        format!("width must be in 1..={MAX_WIDTH}"),
                    ));
                }
                width = Some(w);
            }
            "vars" => {
                let d = width
                    .ok_or_else(|| err(ErrorCode::Parse, line, col, "`vars` before `width`"))?;
                if ring.is_some() {
                    return Err(err(ErrorCode::Parse, line, col, "duplicate `vars`"));
                }
                let vars: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                for (k, v) in vars.iter().enumerate() {
                    if !valid_var(v) || v.starts_with(crate::satcheck::AUX_PREFIX) {
                        return Err(err(
                            ErrorCode::Parse,
                            line,
                            col,
                            format!("`{v}` is not a valid variable"),
                        ));
                    }
                    if vars[..k].contains(v) {
                        return Err(err(
                            ErrorCode::Parse,
                            line,
                            col,
                            format!("duplicate variable `{v}`"),
                        ));
                    }
                }
                let n = vars.len();
                ring = Some(PolyRing::new(d, vars, MonomialOrdering::new(order, n)));
            }
            _ => {
                let r = ring.as_ref().ok_or_else(|| {
                    err(
                        ErrorCode::Parse,
                        line,
                        col,
                        "polynomial before `width` and `vars`",
                    )
                })?;
                let p = Poly::parse(r, body).map_err(|e| {
                    let code = match e {
                        crate::poly::PolyError::UnknownVariable(_) => ErrorCode::UnknownSymbol,
                        _ => ErrorCode::Parse,
                    };
                    err(code, line, col, e.to_string())
                })?;
                polys.push(p);
            }
        }
    }
    let ring =
        ring.ok_or_else(|| err(ErrorCode::Parse, last_line, 1, "missing `width` or `vars`"))?;
    Ok((ring, polys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_header_and_polynomials() {
        let (r, ps) = parse_poly_file(
            "# g\nwidth 8\nvars x y\n x^2 - 2*y\nx*y + 3 # tail\n",
            OrderKind::Lex,
        )
        .unwrap();
        assert_eq!(r.width(), 8);
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[1].to_string(), "x*y + 3");
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_poly_file("width 4\nvars x\nx + z\n", OrderKind::Lex).unwrap_err();
        assert_eq!(
            (e.code, e.span),
            (ErrorCode::UnknownSymbol, Span::new(3, 1))
        );
        let e = parse_poly_file("x + 1\n", OrderKind::Lex).unwrap_err();
        assert_eq!(e.span.line, 1);
        let e = parse_poly_file("width 0\n", OrderKind::Lex).unwrap_err();
        assert_eq!(e.code, ErrorCode::Unsupported);
        assert!(parse_poly_file("", OrderKind::Lex).is_err());
    }
}

//! Generators of well-formed inputs in both formats, and a byte-level
//! mutator for robustness fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::mask;

const NAMES: &[&str] = &["a", "b2", "x_y", "v.1", "|q|"];

struct Gen<'a, R> {
    rng: &'a mut R,
    d: u32,
    vars: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn literal(&mut self) -> String {
        let v = self.rng.gen_range(0..=mask(self.d.min(20)));
        match self.rng.gen_range(0..3) {
            0 if self.d <= 20 => format!("#b{:0width$b}", v, width = self.d as usize),
            1 if self.d.is_multiple_of(4) && self.d <= 20 => {
                format!("#x{:0width$x}", v, width = (self.d / 4) as usize)
            }
            _ => format!("(_ bv{v} {})", self.d),
        }
    }

    fn bv(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return if self.rng.gen_bool(0.6) {
                self.vars.choose(self.rng).unwrap().clone()
            } else {
                self.literal()
            };
        }
        match self.rng.gen_range(0..6) {
            0..=2 => {
                let op = ["bvadd", "bvsub", "bvmul"][self.rng.gen_range(0..3)];
                let k = self.rng.gen_range(2..=3);
                let args: Vec<String> = (0..k).map(|_| self.bv(depth - 1)).collect();
                format!("({op} {})", args.join(" "))
            }
            3 => format!("(bvneg {})", self.bv(depth - 1)),
            4 => format!(
                "(ite {} {} {})",
                self.boolean(depth - 1),
                self.bv(depth - 1),
                self.bv(depth - 1)
            ),
            _ => self.bv(0),
        }
    }

    fn boolean(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.2) {
            let k = self.rng.gen_range(2..=3);
            let op = if self.rng.gen_bool(0.6) {
                "="
            } else {
                "distinct"
            };
            let args: Vec<String> = (0..k).map(|_| self.bv(1)).collect();
            return format!("({op} {})", args.join(" "));
        }
        match self.rng.gen_range(0..8) {
            0 => format!("(not {})", self.boolean(depth - 1)),
            1..=3 => {
                let op = ["and", "or", "=>", "xor", "="][self.rng.gen_range(0..5)];
                let k = self.rng.gen_range(2..=3);
                let args: Vec<String> = (0..k).map(|_| self.boolean(depth - 1)).collect();
                format!("({op} {})", args.join(" "))
            }
            4 => format!(
                "(ite {} {} {})",
                self.boolean(depth - 1),
                self.boolean(depth - 1),
                self.boolean(depth - 1)
            ),
            5 => ["true", "false"][self.rng.gen_range(0..2)].to_string(),
            _ => {
                let args: Vec<String> = (0..2).map(|_| self.bv(depth - 1)).collect();
                format!("(= {})", args.join(" "))
            }
        }
    }
}

/// A script inside the supported fragment.
pub fn random_script<R: Rng>(rng: &mut R) -> String {
    let d = rng.gen_range(1..=16);
    let n = rng.gen_range(1..=3);
    let mut names: Vec<&str> = NAMES.to_vec();
    names.shuffle(rng);
    let decl_names: Vec<&str> = names[..n].to_vec();
    let vars: Vec<String> = decl_names
        .iter()
        .map(|s| s.trim_matches('|').to_string())
        .collect();
    let mut out = String::from("(set-logic QF_BV)\n");
    if rng.gen_bool(0.3) {
        out.push_str("(set-info :status unknown)\n");
    }
    for v in &decl_names {
        out.push_str(&format!("(declare-const {v} (_ BitVec {d}))\n"));
    }
    let mut g = Gen { rng, d, vars };
    let k = g.rng.gen_range(1..=3);
    for _ in 0..k {
        let depth = g.rng.gen_range(1..=3);
        out.push_str(&format!("(assert {})\n", g.boolean(depth)));
    }
    out.push_str("(check-sat)\n");
    if g.rng.gen_bool(0.5) {
        out.push_str("(get-model)\n");
    }
    if g.rng.gen_bool(0.3) {
        out.push_str("(exit)\n");
    }
    out
}

/// A loop file with `n <= 3` variables.
pub fn random_loop_text<R: Rng>(rng: &mut R) -> String {
    let d = rng.gen_range(2..=32);
    let n = rng.gen_range(1..=3);
    let vars = &["x", "y", "z"][..n];
    let c = |rng: &mut R| rng.gen_range(0..=mask(d.min(16)));
    let mut out = format!("(width {d})\n(vars {})\n", vars.join(" "));
    let ops = ["=", "distinct", "<", "<=", ">", ">="];
    let pre: Vec<String> = vars
        .iter()
        .map(|v| format!("({} {v} {})", ops[rng.gen_range(0..ops.len())], c(rng)))
        .collect();
    out.push_str(&format!("(pre {})\n", pre.join(" ")));
    out.push_str(&format!(
        "(guard (distinct {} 0))\n",
        vars[rng.gen_range(0..n)]
    ));
    let trans: Vec<String> = vars
        .iter()
        .map(|v| {
            let w = vars[rng.gen_range(0..n)];
            match rng.gen_range(0..3) {
                0 => format!("(= {v}' (+ {v} {}))", c(rng)),
                1 => format!("(= {v}' (* {v} {w}))"),
                _ => format!("(= {v}' (- (^ {w} 2) {v}))"),
            }
        })
        .collect();
    out.push_str(&format!("(trans {})\n", trans.join(" ")));
    out.push_str(&format!(
        "(post (rel < (- {} {}) {}))\n",
        vars[0],
        vars[n - 1],
        c(rng)
    ));
    out.push_str(&format!(
        "(mode {})\n",
        if rng.gen_bool(0.5) {
            "verify"
        } else {
            "refute"
        }
    ));
    out
}

const SPLICES: &[&str] = &[
    "(",
    ")",
    "((",
    "))",
    " ",
    "\n",
    "|",
    "\"",
    ";",
    "#b",
    "#x1g",
    "_",
    "bv",
    "(_ bv3 4)",
    "(_ BitVec 0)",
    "(_ BitVec 99999)",
    "bvand",
    "bvult",
    "x'",
    "__z1",
    "999999999999999999999999",
    "ite",
    "-",
    "'",
    "(assert",
    "(declare-const",
    "(rel",
    "(^ x 99)",
    "(width",
    "distinct",
    "=>",
    ":named",
    "\u{0}",
    "é",
];

/// One to four random edits of `text`.
pub fn mutate<R: Rng>(rng: &mut R, text: &str) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..rng.gen_range(1..=4) {
        let len = chars.len();
        let at = rng.gen_range(0..=len);
        match rng.gen_range(0..6) {
            0 if len > 0 => {
                let end = (at + rng.gen_range(1..=8)).min(len);
                chars.drain(at.min(len)..end);
            }
            1 => {
                let s = SPLICES.choose(rng).unwrap();
                for (k, ch) in s.chars().enumerate() {
                    chars.insert(at + k, ch);
                }
            }
            2 if len > 0 => {
                let start = rng.gen_range(0..len);
                let end = (start + rng.gen_range(1..=16)).min(len);
                let piece: Vec<char> = chars[start..end].to_vec();
                for (k, ch) in piece.into_iter().enumerate() {
                    chars.insert(at + k, ch);
                }
            }
            3 => chars.truncate(at),
            4 if len > 1 => {
                let (i, j) = (rng.gen_range(0..len), rng.gen_range(0..len));
                chars.swap(i, j);
            }
            _ => {
                let ch = *b"()_ bvx#|;\"0123456789-+'\n".choose(rng).unwrap() as char;
                chars.insert(at, ch);
            }
        }
    }
    chars.into_iter().collect()
}

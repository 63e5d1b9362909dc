use std::fs;
use std::io::Write;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use modsmt::frontend::{lower, parse_loop, parse_poly_file, parse_smt2, print_verdict, Diagnostic};
use modsmt::groebner::strong_groebner_with_budget;
use modsmt::invgen::{synthesize, InvariantForm, InvgenConfig, LoopVerdict};
use modsmt::poly::OrderKind;
use modsmt::ring::{
    inv_euclid_counted, inv_hensel_counted, inv_small, OpCounter, ResidueInt, SMALL_INVERSE_LIMIT,
};
use modsmt::satcheck::{solve, SolveConfig, Verdict};

const EXIT_OK: u8 = 0;
const EXIT_UNKNOWN: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "modsmt",
    version,
    about = "Bit-vector equational solving and loop invariants over Z/2^d"
)]
struct Cli {
    /// Wrap results and diagnostics in JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lex,
    Grevlex,
}

impl Order {
    fn kind(self) -> OrderKind {
        match self {
            Order::Lex => OrderKind::Lex,
            Order::Grevlex => OrderKind::GradedLex,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Euclid,
    Hensel,
    Small,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide an SMT-LIB2 QF_BV file, or every `.smt2` file under `--dir`.
    Solve {
        #[arg(long, required_unless_present = "dir", conflicts_with = "dir")]
        input: Option<PathBuf>,
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Search node budget.
        #[arg(long, env = "MODSMT_BUDGET")]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
    },
    /// Strong Gröbner basis of a polynomial list file.
    Gb {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "grevlex")]
        order: Order,
        /// Critical-element budget.
        #[arg(long, env = "MODSMT_BUDGET")]
        budget: Option<usize>,
    },
    /// Polynomial invariants for a loop file.
    Invgen {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        /// Multipliers, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "-1,0,1"
        )]
        mu: Vec<i64>,
        /// Writes each query as `<name>.smt2` into this directory.
        #[arg(long)]
        emit_queries: Option<PathBuf>,
        /// Search node budget for internal discharges.
        #[arg(long, env = "MODSMT_BUDGET")]
        budget: Option<usize>,
    },
    /// CSV operation counts of the inverse algorithms over odd `a`.
    InverseBench {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        a_max: u64,
        #[arg(long, value_enum, default_value = "all")]
        algo: Algo,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Solve {
            input: Some(path),
            budget,
            order,
            ..
        } => {
            let out = solve_file(path, *budget, *order);
            emit(&out, cli.json);
            out.code
        }
        Cmd::Solve {
            dir: Some(dir),
            budget,
            order,
            ..
        } => solve_dir(dir, *budget, *order, cli.json),
        Cmd::Solve { .. } => unreachable!("clap requires --input or --dir"),
        Cmd::Gb {
            input,
            order,
            budget,
        } => run_gb(input, *order, *budget, cli.json),
        Cmd::Invgen {
            input,
            degree,
            mu,
            emit_queries,
            budget,
        } => run_invgen(
            input,
            *degree,
            mu,
            emit_queries.as_deref(),
            *budget,
            cli.json,
        ),
        Cmd::InverseBench { d, a_max, algo } => run_inverse_bench(*d, *a_max, *algo),
    };
    ExitCode::from(code)
}

/// Outcome of one command: stdout text, stderr text, JSON form, exit code.
struct Outcome {
    text: String,
    note: Option<String>,
    json: Value,
    code: u8,
}

fn emit(out: &Outcome, as_json: bool) {
    if as_json {
        println!("{}", out.json);
    } else {
        if !out.text.is_empty() {
            println!("{}", out.text);
        }
        if let Some(n) = &out.note {
            eprintln!("{n}");
        }
    }
}

fn diag_json(d: &Diagnostic) -> Value {
    json!({
        "code": d.code.as_str(),
        "severity": d.severity.as_str(),
        "line": d.span.line,
        "col": d.span.col,
        "message": d.message,
    })
}

fn input_error(file: &Path, d: Diagnostic) -> Outcome {
    Outcome {
        text: String::new(),
        note: Some(format!("{}: {d}", file.display())),
        json: json!({ "file": file.display().to_string(), "status": "error", "diagnostic": diag_json(&d) }),
        code: EXIT_INPUT,
    }
}

fn read_input(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome {
        text: String::new(),
        note: Some(format!("{}: cannot read input: {e}", path.display())),
        json: json!({ "file": path.display().to_string(), "status": "error", "message": e.to_string() }),
        code: EXIT_INPUT,
    })
}

fn solve_config(budget: Option<usize>) -> SolveConfig {
    let mut cfg = SolveConfig::default();
    if let Some(b) = budget {
        cfg.node_budget = b;
    }
    cfg
}

fn solve_file(path: &Path, budget: Option<usize>, order: Order) -> Outcome {
    let text = match read_input(path) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let script = match parse_smt2(&text) {
        Ok(s) => s,
        Err(d) => return input_error(path, d),
    };
    let problem = lower(&script, order.kind());
    let verdict = match solve(&problem.ring, &problem.formula, &solve_config(budget)) {
        Ok(v) => v,
        Err(e) => Verdict::Unknown(e.to_string()),
    };
    let file = path.display().to_string();
    match &verdict {
        Verdict::Sat(model) => {
            let m: Map<String, Value> = model
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.value().to_string())))
                .collect();
            Outcome {
                text: print_verdict(&verdict),
                note: None,
                json: json!({ "file": file, "status": "sat", "model": m }),
                code: EXIT_OK,
            }
        }
        Verdict::Unsat(_) => Outcome {
            text: print_verdict(&verdict),
            note: None,
            json: json!({ "file": file, "status": "unsat" }),
            code: EXIT_OK,
        },
        Verdict::Unknown(reason) => Outcome {
            text: print_verdict(&verdict),
            note: Some(format!("{file}: unknown: {reason}")),
            json: json!({ "file": file, "status": "unknown", "reason": reason }),
            code: EXIT_UNKNOWN,
        },
    }
}

fn solve_dir(dir: &Path, budget: Option<usize>, order: Order, as_json: bool) -> u8 {
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "smt2"))
            .collect(),
        Err(e) => {
            eprintln!("{}: cannot read directory: {e}", dir.display());
            return EXIT_INPUT;
        }
    };
    files.sort();
    let prev_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let outcomes: Vec<Outcome> = files
        .par_iter()
        .map(|f| {
            panic::catch_unwind(|| solve_file(f, budget, order)).unwrap_or_else(|_| Outcome {
                text: "unknown".into(),
                note: Some(format!("{}: unknown: internal error", f.display())),
                json: json!({ "file": f.display().to_string(), "status": "unknown", "reason": "internal error" }),
                code: EXIT_UNKNOWN,
            })
        })
        .collect();
    panic::set_hook(prev_hook);
    if as_json {
        let all: Vec<Value> = outcomes.iter().map(|o| o.json.clone()).collect();
        println!("{}", Value::Array(all));
    } else {
        for (f, o) in files.iter().zip(&outcomes) {
            let status = o.json["status"].as_str().unwrap_or("unknown");
            println!("{}: {status}", f.display());
            if let Some(n) = &o.note {
                eprintln!("{n}");
            }
        }
    }
    outcomes.iter().map(|o| o.code).max().unwrap_or(EXIT_OK)
}

fn run_gb(path: &Path, order: Order, budget: Option<usize>, as_json: bool) -> u8 {
    let out = (|| {
        let text = read_input(path)?;
        let (ring, polys) = parse_poly_file(&text, order.kind()).map_err(|d| input_error(path, d))?;
        let budget = budget.unwrap_or(modsmt::groebner::DEFAULT_GB_BUDGET);
        Ok(match strong_groebner_with_budget(&ring, &polys, budget) {
            Ok(gb) => {
                let basis: Vec<String> = gb.gens().iter().map(|g| g.to_string()).collect();
                Outcome {
                    text: basis.join("\n"),
                    note: None,
                    json: json!({ "file": path.display().to_string(), "status": "ok", "basis": basis }),
                    code: EXIT_OK,
                }
            }
            Err(e) => Outcome {
                text: String::new(),
                note: Some(format!("unknown: {e}")),
                json: json!({ "file": path.display().to_string(), "status": "unknown", "reason": e.to_string() }),
                code: EXIT_UNKNOWN,
            },
        })
    })()
    .unwrap_or_else(|o: Outcome| o);
    emit(&out, as_json);
    out.code
}

fn run_invgen(
    path: &Path,
    degree: u32,
    mus: &[i64],
    emit_dir: Option<&Path>,
    budget: Option<usize>,
    as_json: bool,
) -> u8 {
    let out = (|| {
        let text = read_input(path)?;
        let lp = parse_loop(&text).map_err(|d| input_error(path, d))?;
        let mut mus = mus.to_vec();
        mus.sort_unstable();
        mus.dedup();
        let cfg = InvgenConfig {
            degree,
            mus,
            solve: solve_config(budget),
            ..InvgenConfig::default()
        };
        let result = synthesize(&lp, &cfg).map_err(|e| Outcome {
            text: String::new(),
            note: Some(format!("{}: {e}", path.display())),
            json: json!({ "file": path.display().to_string(), "status": "error", "message": e.to_string() }),
            code: EXIT_INPUT,
        })?;
        if let Some(dir) = emit_dir {
            fs::create_dir_all(dir).map_err(|e| Outcome {
                text: String::new(),
                note: Some(format!("{}: cannot create directory: {e}", dir.display())),
                json: json!({ "status": "error", "message": e.to_string() }),
                code: EXIT_INPUT,
            })?;
        }
        let mut lines = Vec::new();
        let mut invs = Vec::new();
        for inv in &result.invariants {
            let form = match inv.form {
                InvariantForm::Concrete => "concrete",
                InvariantForm::Relative => "relative",
            };
            lines.push(format!(
                "invariant mu={} {form} initiation={}: {} = 0",
                inv.mu,
                inv.initiation.as_str(),
                inv.poly
            ));
            invs.push(json!({
                "mu": inv.mu,
                "form": form,
                "poly": inv.poly.to_string(),
                "initiation": inv.initiation.as_str(),
            }));
        }
        let mut queries = Vec::new();
        for q in &result.queries {
            let file = match emit_dir {
                Some(dir) => {
                    let p = dir.join(format!("{}.smt2", q.name));
                    fs::write(&p, &q.smt2).map_err(|e| Outcome {
                        text: String::new(),
                        note: Some(format!("{}: cannot write query: {e}", p.display())),
                        json: json!({ "status": "error", "message": e.to_string() }),
                        code: EXIT_INPUT,
                    })?;
                    Some(p.display().to_string())
                }
                None => None,
            };
            lines.push(format!(
                "query {} {} {}{}",
                q.name,
                q.kind.as_str(),
                q.status.as_str(),
                file.as_ref().map(|f| format!(" {f}")).unwrap_or_default()
            ));
            queries.push(json!({
                "name": q.name,
                "mu": q.mu,
                "kind": q.kind.as_str(),
                "status": q.status.as_str(),
                "path": file,
            }));
        }
        lines.push(format!("verdict: {}", result.verdict.as_str()));
        let code = match result.verdict {
            LoopVerdict::Verified | LoopVerdict::Refuted => EXIT_OK,
            LoopVerdict::Unknown => EXIT_UNKNOWN,
        };
        Ok(Outcome {
            text: lines.join("\n"),
            note: None,
            json: json!({
                "file": path.display().to_string(),
                "status": result.verdict.as_str(),
                "invariants": invs,
                "queries": queries,
                "rejected": result.rejected,
            }),
            code,
        })
    })()
    .unwrap_or_else(|o: Outcome| o);
    emit(&out, as_json);
    out.code
}

fn run_inverse_bench(d: u32, a_max: u64, algo: Algo) -> u8 {
    if d == 0 {
        eprintln!("error: --d must be positive");
        return EXIT_INPUT;
    }
    if matches!(algo, Algo::Small | Algo::All) && a_max > SMALL_INVERSE_LIMIT {
        eprintln!("error: --a-max above {SMALL_INVERSE_LIMIT} is outside the small-inverse range");
        return EXIT_INPUT;
    }
    let algos: &[Algo] = match algo {
        Algo::All => &[Algo::Euclid, Algo::Hensel, Algo::Small],
        _ => std::slice::from_ref(&algo),
    };
    let mut out = std::io::stdout().lock();
    if writeln!(out, "a,d,algo,arith_ops,bin_ops,micros").is_err() {
        return EXIT_OK;
    }
    for a in (3..=a_max).step_by(2) {
        let r = ResidueInt::from_u64(a, d);
        if r.value().to_u64() != Some(a) {
            break;
        }
        for &alg in algos {
            let mut c = OpCounter::new();
            let t = Instant::now();
            let (name, res) = match alg {
                Algo::Euclid => ("euclid", inv_euclid_counted(&r, &mut c)),
                Algo::Hensel => ("hensel", inv_hensel_counted(&r, &mut c)),
                Algo::Small => ("small", inv_small(&r, &mut c)),
                Algo::All => unreachable!("expanded above"),
            };
            let micros = t.elapsed().as_micros();
            if let Err(e) = res {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
            if writeln!(out, "{a},{d},{name},{},{},{micros}", c.arith_ops, c.bin_ops).is_err() {
                return EXIT_OK;
            }
        }
    }
    EXIT_OK
}

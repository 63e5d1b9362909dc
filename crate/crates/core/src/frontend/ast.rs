use num_bigint::BigUint;

/// Bit-vector term; every node has the script's single width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BvTerm {
    Var(String),
    /// Value already reduced below `2^width`.
    Lit {
        value: BigUint,
        width: u32,
    },
    Add(Vec<BvTerm>),
    Sub(Vec<BvTerm>),
    Mul(Vec<BvTerm>),
    Neg(Box<BvTerm>),
    Ite(Box<BoolTerm>, Box<BvTerm>, Box<BvTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolTerm {
    True,
    False,
    Not(Box<BoolTerm>),
    And(Vec<BoolTerm>),
    Or(Vec<BoolTerm>),
    /// Right-associative chain.
    Implies(Vec<BoolTerm>),
    /// Left-associative chain.
    Xor(Vec<BoolTerm>),
    /// Boolean `=` chain.
    Iff(Vec<BoolTerm>),
    /// Bit-vector `=` chain.
    Eq(Vec<BvTerm>),
    Distinct(Vec<BvTerm>),
    Ite(Box<BoolTerm>, Box<BoolTerm>, Box<BoolTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    SetLogic(String),
    /// `set-info` / `set-option`, kept verbatim.
    Info(String),
    Declare {
        name: String,
        width: u32,
    },
    Assert(BoolTerm),
    CheckSat,
    GetModel,
    Exit,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub commands: Vec<Command>,
    /// Common width of all bit-vector terms, if any occurred.
    pub width: Option<u32>,
}

impl Script {
    /// Declared constants in declaration order.
    pub fn decls(&self) -> Vec<(&str, u32)> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::Declare { name, width } => Some((name.as_str(), *width)),
                _ => None,
            })
            .collect()
    }

    pub fn asserts(&self) -> impl Iterator<Item = &BoolTerm> {
        self.commands.iter().filter_map(|c| match c {
            Command::Assert(t) => Some(t),
            _ => None,
        })
    }
}

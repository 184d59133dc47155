//! Execution and verification: a typed tree-walking interpreter for the
//! target language with step accounting, brute-force evaluation of
//! specification semantics, and the grid checker that compares the two.

mod check;
mod oracle;

pub use check::{check_judgment, full_ranges, CompareMode, Disagreement, Report};
pub use oracle::{oracle_decide, oracle_list, DEFAULT_ORACLE_BOUND};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::programs::{Cmd, Expr, PhpVar, Program};

/// A runtime value: the universal set is the positive integers, but the
/// deciders echo booleans and `DEF-REM` introduces the literal 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Int(u64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{}", v),
            Value::Bool(true) => write!(f, "TRUE"),
            Value::Bool(false) => write!(f, "FALSE"),
        }
    }
}

/// Input environment: a map from input rank to a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Env {
    values: BTreeMap<u32, u64>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn bind(&mut self, rank: u32, value: u64) -> Result<(), RunError> {
        if value == 0 {
            return Err(RunError::NonPositiveInput { rank });
        }
        self.values.insert(rank, value);
        Ok(())
    }

    pub fn from_pairs(pairs: &[(u32, u64)]) -> Result<Env, RunError> {
        let mut env = Env::new();
        for (rank, value) in pairs {
            env.bind(*rank, *value)?;
        }
        Ok(env)
    }

    pub fn get(&self, rank: u32) -> Option<u64> {
        self.values.get(&rank).copied()
    }

    pub fn max_value(&self) -> u64 {
        self.values.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &u64)> {
        self.values.iter()
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(r, v)| format!("{}={}", crate::specs::seq_name(['i', 'j', 'k'], *r), v))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("step limit of {limit} exceeded")]
    StepLimit { limit: u64 },
    #[error("read of unassigned variable {var}")]
    UnboundVar { var: String },
    #[error("input rank {rank} is not bound in the environment")]
    UnboundInput { rank: u32 },
    #[error("inputs must be positive (rank {rank})")]
    NonPositiveInput { rank: u32 },
    #[error("type error: {msg}")]
    Type { msg: String },
    #[error("remainder by zero")]
    RemZero,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("program contains an unfilled template hole")]
    Hole,
}

/// Result of a program run: the echoed values in order, and the number of
/// AST nodes evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub outputs: Vec<Value>,
    pub steps: u64,
}

struct Machine<'a> {
    env: &'a Env,
    vars: BTreeMap<PhpVar, Value>,
    outputs: Vec<Value>,
    steps: u64,
    limit: u64,
}

impl<'a> Machine<'a> {
    fn tick(&mut self) -> Result<(), RunError> {
        self.steps += 1;
        if self.steps > self.limit {
            Err(RunError::StepLimit { limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, RunError> {
        self.tick()?;
        match e {
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Var(PhpVar::Input(r)) => self
                .env
                .get(*r)
                .map(Value::Int)
                .ok_or(RunError::UnboundInput { rank: *r }),
            Expr::Var(v) => self
                .vars
                .get(v)
                .copied()
                .ok_or_else(|| RunError::UnboundVar { var: v.to_string() }),
            Expr::Not(a) => {
                let v = self.eval_bool(a)?;
                Ok(Value::Bool(!v))
            }
            Expr::And(a, b) => {
                let x = self.eval_bool(a)?;
                let y = self.eval_bool(b)?;
                Ok(Value::Bool(x && y))
            }
            Expr::Or(a, b) => {
                let x = self.eval_bool(a)?;
                let y = self.eval_bool(b)?;
                Ok(Value::Bool(x || y))
            }
            Expr::Eq(a, b) => {
                let x = self.eval_int(a)?;
                let y = self.eval_int(b)?;
                Ok(Value::Bool(x == y))
            }
            Expr::Lt(a, b) => {
                let x = self.eval_int(a)?;
                let y = self.eval_int(b)?;
                Ok(Value::Bool(x < y))
            }
            Expr::Mul(a, b) => {
                let x = self.eval_int(a)?;
                let y = self.eval_int(b)?;
                x.checked_mul(y).map(Value::Int).ok_or(RunError::Overflow)
            }
            Expr::Rem(a, b) => {
                let x = self.eval_int(a)?;
                let y = self.eval_int(b)?;
                if y == 0 {
                    return Err(RunError::RemZero);
                }
                Ok(Value::Int(x % y))
            }
            Expr::Hole(_) => Err(RunError::Hole),
        }
    }

    fn eval_bool(&mut self, e: &Expr) -> Result<bool, RunError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(RunError::Type {
                msg: format!("boolean expected in '{}'", e),
            }),
        }
    }

    fn eval_int(&mut self, e: &Expr) -> Result<u64, RunError> {
        match self.eval(e)? {
            Value::Int(v) => Ok(v),
            Value::Bool(_) => Err(RunError::Type {
                msg: format!("integer expected in '{}'", e),
            }),
        }
    }

    fn exec(&mut self, c: &Cmd) -> Result<(), RunError> {
        self.tick()?;
        match c {
            Cmd::Echo(e) => {
                let v = self.eval(e)?;
                self.outputs.push(v);
                Ok(())
            }
            Cmd::Assign(v, e) => {
                if matches!(v, PhpVar::Input(_)) {
                    return Err(RunError::Type {
                        msg: format!("assignment to input variable {}", v),
                    });
                }
                let value = self.eval(e)?;
                self.vars.insert(*v, value);
                Ok(())
            }
            Cmd::Inc(v) => {
                let cur = self
                    .vars
                    .get(v)
                    .copied()
                    .ok_or_else(|| RunError::UnboundVar { var: v.to_string() })?;
                match cur {
                    Value::Int(n) => {
                        let next = n.checked_add(1).ok_or(RunError::Overflow)?;
                        self.vars.insert(*v, Value::Int(next));
                        Ok(())
                    }
                    Value::Bool(_) => Err(RunError::Type {
                        msg: format!("increment of boolean {}", v),
                    }),
                }
            }
            Cmd::If(cond, body) => {
                if self.eval_bool(cond)? {
                    self.exec(body)?;
                }
                Ok(())
            }
            Cmd::For {
                init,
                cond,
                step,
                body,
            } => {
                self.exec(init)?;
                loop {
                    if !self.eval_bool(cond)? {
                        return Ok(());
                    }
                    self.exec(body)?;
                    self.exec(step)?;
                }
            }
            Cmd::Block(cmds) => {
                for c in cmds {
                    self.exec(c)?;
                }
                Ok(())
            }
        }
    }
}

pub const DEFAULT_STEP_LIMIT: u64 = 10_000_000;

/// Runs a program on an input environment. Every command and expression
/// node evaluated costs one step; exceeding the limit is an error that
/// signals possible non-termination.
pub fn run(p: &Program, env: &Env, step_limit: u64) -> Result<RunResult, RunError> {
    let mut m = Machine {
        env,
        vars: BTreeMap::new(),
        outputs: Vec::new(),
        steps: 0,
        limit: step_limit,
    };
    for c in &p.commands {
        m.exec(c)?;
    }
    Ok(RunResult {
        outputs: m.outputs,
        steps: m.steps,
    })
}

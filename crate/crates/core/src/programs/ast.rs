use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::specs::seq_name;

/// A variable of the target language.
///
/// Input variables `$i`, `$j`, `$k`, `$i4`, ... are never assigned.
/// Program variables `$a`, `$b`, `$c`, `$a4`, ... hold loop counters and
/// intermediate values; flag variables `$A`, `$B`, ... are the domain the
/// QUIT rule draws from, kept in their own rank band so splicing programs
/// together never aliases a counter with a flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhpVar {
    Input(u32),
    Prog(u32),
    Flag(u32),
}

impl fmt::Display for PhpVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhpVar::Input(r) => write!(f, "${}", seq_name(['i', 'j', 'k'], *r)),
            PhpVar::Prog(r) => write!(f, "${}", seq_name(['a', 'b', 'c'], *r)),
            PhpVar::Flag(r) => write!(f, "${}", seq_name(['A', 'B', 'C'], *r)),
        }
    }
}

/// Hole markers inside a [`Template`](super::Template). `[M]` stands for
/// the echo argument of the program being spliced into; `[N]` is the
/// inner program's echo argument in two-stage rule templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoleMark {
    M,
    N,
}

/// An expression of the target language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expr {
    Bool(bool),
    Int(u64),
    Var(PhpVar),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Lt(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Rem(Box<Expr>, Box<Expr>),
    /// Template hole; never present in a finished program.
    Hole(HoleMark),
}

impl Expr {
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }
    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }
    pub fn eq(a: Expr, b: Expr) -> Expr {
        Expr::Eq(Box::new(a), Box::new(b))
    }
    pub fn lt(a: Expr, b: Expr) -> Expr {
        Expr::Lt(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }
    pub fn rem(a: Expr, b: Expr) -> Expr {
        Expr::Rem(Box::new(a), Box::new(b))
    }
    pub fn var(v: PhpVar) -> Expr {
        Expr::Var(v)
    }

    pub fn map(&self, f: &mut impl FnMut(&Expr) -> Option<Expr>) -> Expr {
        if let Some(replaced) = f(self) {
            return replaced;
        }
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(_) | Expr::Hole(_) => self.clone(),
            Expr::Not(a) => Expr::not(a.map(f)),
            Expr::And(a, b) => Expr::and(a.map(f), b.map(f)),
            Expr::Or(a, b) => Expr::or(a.map(f), b.map(f)),
            Expr::Eq(a, b) => Expr::eq(a.map(f), b.map(f)),
            Expr::Lt(a, b) => Expr::lt(a.map(f), b.map(f)),
            Expr::Mul(a, b) => Expr::mul(a.map(f), b.map(f)),
            Expr::Rem(a, b) => Expr::rem(a.map(f), b.map(f)),
        }
    }

    pub fn for_each(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(_) | Expr::Hole(_) => {}
            Expr::Not(a) => a.for_each(f),
            Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Eq(a, b)
            | Expr::Lt(a, b)
            | Expr::Mul(a, b)
            | Expr::Rem(a, b) => {
                a.for_each(f);
                b.for_each(f);
            }
        }
    }

    pub fn contains_hole(&self) -> bool {
        let mut found = false;
        self.for_each(&mut |e| {
            if matches!(e, Expr::Hole(_)) {
                found = true;
            }
        });
        found
    }
}

/// A command of the target language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cmd {
    Echo(Expr),
    Assign(PhpVar, Expr),
    If(Expr, Box<Cmd>),
    For {
        init: Box<Cmd>,
        cond: Expr,
        step: Box<Cmd>,
        body: Box<Cmd>,
    },
    Inc(PhpVar),
    Block(Vec<Cmd>),
}

impl Cmd {
    pub fn for_each_expr(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Cmd::Echo(e) | Cmd::Assign(_, e) => e.for_each(f),
            Cmd::If(c, body) => {
                c.for_each(f);
                body.for_each_expr(f);
            }
            Cmd::For {
                init,
                cond,
                step,
                body,
            } => {
                init.for_each_expr(f);
                cond.for_each(f);
                step.for_each_expr(f);
                body.for_each_expr(f);
            }
            Cmd::Inc(_) => {}
            Cmd::Block(cmds) => cmds.iter().for_each(|c| c.for_each_expr(f)),
        }
    }

    pub fn for_each_assigned(&self, f: &mut impl FnMut(PhpVar)) {
        match self {
            Cmd::Assign(v, _) | Cmd::Inc(v) => f(*v),
            Cmd::Echo(_) => {}
            Cmd::If(_, body) => body.for_each_assigned(f),
            Cmd::For {
                init, step, body, ..
            } => {
                init.for_each_assigned(f);
                step.for_each_assigned(f);
                body.for_each_assigned(f);
            }
            Cmd::Block(cmds) => cmds.iter().for_each(|c| c.for_each_assigned(f)),
        }
    }
}

/// A program: an ordered command sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Program {
    pub commands: Vec<Cmd>,
}

impl Program {
    pub fn new(commands: Vec<Cmd>) -> Program {
        Program { commands }
    }

    /// Maximum program-variable rank assigned anywhere, 0 if none.
    pub fn max_prog_rank(&self) -> u32 {
        let mut max = 0;
        for c in &self.commands {
            c.for_each_assigned(&mut |v| {
                if let PhpVar::Prog(r) = v {
                    max = max.max(r);
                }
            });
        }
        max
    }

    /// Maximum flag rank assigned anywhere, 0 if none.
    pub fn max_flag_rank(&self) -> u32 {
        let mut max = 0;
        for c in &self.commands {
            c.for_each_assigned(&mut |v| {
                if let PhpVar::Flag(r) = v {
                    max = max.max(r);
                }
            });
        }
        max
    }

    /// Set of assigned program/flag variables.
    pub fn assigned_vars(&self) -> BTreeSet<PhpVar> {
        let mut out = BTreeSet::new();
        for c in &self.commands {
            c.for_each_assigned(&mut |v| {
                out.insert(v);
            });
        }
        out
    }

    pub fn echo_count(&self) -> usize {
        fn count(c: &Cmd) -> usize {
            match c {
                Cmd::Echo(_) => 1,
                Cmd::Assign(_, _) | Cmd::Inc(_) => 0,
                Cmd::If(_, body) => count(body),
                Cmd::For { init, step, body, .. } => count(init) + count(step) + count(body),
                Cmd::Block(cmds) => cmds.iter().map(count).sum(),
            }
        }
        self.commands.iter().map(count).sum()
    }

    /// No command may assign to an input variable, and a finished program
    /// contains no template holes.
    pub fn well_formed(&self) -> bool {
        let mut ok = true;
        for c in &self.commands {
            c.for_each_assigned(&mut |v| {
                if matches!(v, PhpVar::Input(_)) {
                    ok = false;
                }
            });
            c.for_each_expr(&mut |e| {
                if matches!(e, Expr::Hole(_)) {
                    ok = false;
                }
            });
        }
        ok
    }
}

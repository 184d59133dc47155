use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::{Cmd, Expr, HoleMark, PhpVar, Program};
use super::ProgramError;

/// Substitution from input-variable ranks to expressions, applied
/// simultaneously (`M:I=E1, J=E2`). The rules bind inputs to other input
/// variables, literals, or — in the DO rule — the host's echo argument.
pub type ExprBinding = BTreeMap<u32, Expr>;

fn subst_expr(e: &Expr, binding: &ExprBinding) -> Expr {
    e.map(&mut |node| match node {
        Expr::Var(PhpVar::Input(r)) => binding.get(r).cloned(),
        _ => None,
    })
}

fn subst_cmd(c: &Cmd, binding: &ExprBinding) -> Cmd {
    match c {
        Cmd::Echo(e) => Cmd::Echo(subst_expr(e, binding)),
        Cmd::Assign(v, e) => Cmd::Assign(*v, subst_expr(e, binding)),
        Cmd::Inc(v) => Cmd::Inc(*v),
        Cmd::If(cond, body) => Cmd::If(subst_expr(cond, binding), Box::new(subst_cmd(body, binding))),
        Cmd::For {
            init,
            cond,
            step,
            body,
        } => Cmd::For {
            init: Box::new(subst_cmd(init, binding)),
            cond: subst_expr(cond, binding),
            step: Box::new(subst_cmd(step, binding)),
            body: Box::new(subst_cmd(body, binding)),
        },
        Cmd::Block(cmds) => Cmd::Block(cmds.iter().map(|c| subst_cmd(c, binding)).collect()),
    }
}

/// Replaces each reference to a bound input variable by its expression,
/// simultaneously, so swap bindings like `{I=J, J=I}` behave correctly.
pub fn subst_inputs(p: &Program, binding: &ExprBinding) -> Program {
    Program::new(p.commands.iter().map(|c| subst_cmd(c, binding)).collect())
}

/// Rank offsets for the two assignable variable bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankOffset {
    pub prog: u32,
    pub flag: u32,
}

impl RankOffset {
    /// The offset that moves `n` above everything `host` assigns.
    pub fn above(host: &Program) -> RankOffset {
        RankOffset {
            prog: host.max_prog_rank(),
            flag: host.max_flag_rank(),
        }
    }
}

fn shift_var(v: PhpVar, off: RankOffset) -> PhpVar {
    match v {
        PhpVar::Input(r) => PhpVar::Input(r),
        PhpVar::Prog(r) => PhpVar::Prog(r + off.prog),
        PhpVar::Flag(r) => PhpVar::Flag(r + off.flag),
    }
}

fn shift_expr(e: &Expr, off: RankOffset) -> Expr {
    e.map(&mut |node| match node {
        Expr::Var(v) => Some(Expr::Var(shift_var(*v, off))),
        _ => None,
    })
}

fn shift_cmd(c: &Cmd, off: RankOffset) -> Cmd {
    match c {
        Cmd::Echo(e) => Cmd::Echo(shift_expr(e, off)),
        Cmd::Assign(v, e) => Cmd::Assign(shift_var(*v, off), shift_expr(e, off)),
        Cmd::Inc(v) => Cmd::Inc(shift_var(*v, off)),
        Cmd::If(cond, body) => Cmd::If(shift_expr(cond, off), Box::new(shift_cmd(body, off))),
        Cmd::For {
            init,
            cond,
            step,
            body,
        } => Cmd::For {
            init: Box::new(shift_cmd(init, off)),
            cond: shift_expr(cond, off),
            step: Box::new(shift_cmd(step, off)),
            body: Box::new(shift_cmd(body, off)),
        },
        Cmd::Block(cmds) => Cmd::Block(cmds.iter().map(|c| shift_cmd(c, off)).collect()),
    }
}

/// Increases every program-variable rank (assigned or read) by `offset`,
/// leaving inputs and flags alone. The rules use [`shift_ranks_banded`]
/// so flags introduced by QUIT move within their own band.
pub fn shift_ranks(n: &Program, offset: u32) -> Program {
    shift_ranks_banded(
        n,
        RankOffset {
            prog: offset,
            flag: 0,
        },
    )
}

pub fn shift_ranks_banded(n: &Program, off: RankOffset) -> Program {
    Program::new(n.commands.iter().map(|c| shift_cmd(c, off)).collect())
}

/// A command-list pattern with `[M]`/`[N]` holes, spliced over a
/// program's echo commands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub commands: Vec<Cmd>,
}

impl Template {
    pub fn new(commands: Vec<Cmd>) -> Template {
        Template { commands }
    }

    /// Fills every `mark` hole with `e`, leaving other holes for a later
    /// splice stage.
    pub fn fill(&self, mark: HoleMark, e: &Expr) -> Template {
        let commands = self
            .commands
            .iter()
            .map(|c| fill_cmd(c, mark, e))
            .collect();
        Template::new(commands)
    }
}

impl From<Program> for Template {
    fn from(p: Program) -> Template {
        Template::new(p.commands)
    }
}

fn fill_expr(x: &Expr, mark: HoleMark, e: &Expr) -> Expr {
    x.map(&mut |node| match node {
        Expr::Hole(m) if *m == mark => Some(e.clone()),
        _ => None,
    })
}

fn fill_cmd(c: &Cmd, mark: HoleMark, e: &Expr) -> Cmd {
    match c {
        Cmd::Echo(x) => Cmd::Echo(fill_expr(x, mark, e)),
        Cmd::Assign(v, x) => Cmd::Assign(*v, fill_expr(x, mark, e)),
        Cmd::Inc(v) => Cmd::Inc(*v),
        Cmd::If(cond, body) => Cmd::If(fill_expr(cond, mark, e), Box::new(fill_cmd(body, mark, e))),
        Cmd::For {
            init,
            cond,
            step,
            body,
        } => Cmd::For {
            init: Box::new(fill_cmd(init, mark, e)),
            cond: fill_expr(cond, mark, e),
            step: Box::new(fill_cmd(step, mark, e)),
            body: Box::new(fill_cmd(body, mark, e)),
        },
        Cmd::Block(cmds) => Cmd::Block(cmds.iter().map(|c| fill_cmd(c, mark, e)).collect()),
    }
}

/// Replaces every echo command of `p` with the commands produced by
/// `replacement` from the echo's argument. A multi-command replacement in
/// a single-command position (an if or for body) is grouped into a block;
/// in a command list it splices inline.
pub fn map_echoes(p: &Program, replacement: &mut impl FnMut(&Expr) -> Vec<Cmd>) -> Program {
    fn in_list(cmds: &[Cmd], f: &mut impl FnMut(&Expr) -> Vec<Cmd>) -> Vec<Cmd> {
        let mut out = Vec::new();
        for c in cmds {
            match c {
                Cmd::Echo(e) => out.extend(f(e)),
                other => out.push(single(other, f)),
            }
        }
        out
    }
    fn in_slot(c: &Cmd, f: &mut impl FnMut(&Expr) -> Vec<Cmd>) -> Cmd {
        match c {
            Cmd::Echo(e) => {
                let mut cmds = f(e);
                if cmds.len() == 1 {
                    cmds.pop().unwrap()
                } else {
                    Cmd::Block(cmds)
                }
            }
            other => single(other, f),
        }
    }
    fn single(c: &Cmd, f: &mut impl FnMut(&Expr) -> Vec<Cmd>) -> Cmd {
        match c {
            Cmd::Echo(_) => unreachable!("handled by caller"),
            Cmd::Assign(v, e) => Cmd::Assign(*v, e.clone()),
            Cmd::Inc(v) => Cmd::Inc(*v),
            Cmd::If(cond, body) => Cmd::If(cond.clone(), Box::new(in_slot(body, f))),
            Cmd::For {
                init,
                cond,
                step,
                body,
            } => Cmd::For {
                init: init.clone(),
                cond: cond.clone(),
                step: step.clone(),
                body: Box::new(in_slot(body, f)),
            },
            Cmd::Block(cmds) => Cmd::Block(in_list(cmds, f)),
        }
    }
    Program::new(in_list(&p.commands, replacement))
}

/// The s-function: replaces every echo command of `m` by `tpl` with each
/// `[M]` hole filled by that echo's argument.
pub fn splice(m: &Program, tpl: &Template) -> Result<Program, ProgramError> {
    if m.echo_count() == 0 {
        return Err(ProgramError::NoEcho);
    }
    Ok(map_echoes(m, &mut |e| tpl.fill(HoleMark::M, e).commands))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::render::{render, same_text};

    fn iv(r: u32) -> Expr {
        Expr::var(PhpVar::Input(r))
    }
    fn pv(r: u32) -> Expr {
        Expr::var(PhpVar::Prog(r))
    }
    fn hole_m() -> Expr {
        Expr::Hole(HoleMark::M)
    }

    fn echo_lt_ij() -> Program {
        Program::new(vec![Cmd::Echo(Expr::lt(iv(1), iv(2)))])
    }

    #[test]
    fn simultaneous_substitution_is_swap_safe() {
        // if ($a<$i)||($a<$j) with {I=J, J=K} becomes if ($a<$j)||($a<$k)
        let p = Program::new(vec![Cmd::If(
            Expr::or(Expr::lt(pv(1), iv(1)), Expr::lt(pv(1), iv(2))),
            Box::new(Cmd::Echo(pv(1))),
        )]);
        let mut binding = ExprBinding::new();
        binding.insert(1, iv(2));
        binding.insert(2, iv(3));
        let q = subst_inputs(&p, &binding);
        assert!(same_text(
            &render(&q),
            "if (($a<$j)||($a<$k)) echo $a ;"
        ));

        // A literal binding: echo $i<$j with {J="2"}
        let mut binding = ExprBinding::new();
        binding.insert(2, Expr::Int(2));
        let q = subst_inputs(&echo_lt_ij(), &binding);
        assert!(same_text(&render(&q), "echo $i<2 ;"));
    }

    #[test]
    fn empty_binding_is_identity() {
        let p = echo_lt_ij();
        assert_eq!(subst_inputs(&p, &ExprBinding::new()), p);
    }

    #[test]
    fn shift_moves_assigned_and_read_occurrences() {
        let p = Program::new(vec![
            Cmd::Assign(PhpVar::Prog(1), Expr::Int(1)),
            Cmd::Echo(pv(1)),
        ]);
        let q = shift_ranks(&p, 1);
        assert!(same_text(&render(&q), "$b = 1 ; echo $b ;"));
        assert_eq!(shift_ranks(&p, 0), p);
    }

    #[test]
    fn flags_shift_in_their_own_band() {
        let p = Program::new(vec![
            Cmd::Assign(PhpVar::Flag(1), Expr::Bool(false)),
            Cmd::Echo(Expr::var(PhpVar::Flag(1))),
        ]);
        let q = shift_ranks_banded(&p, RankOffset { prog: 5, flag: 1 });
        assert!(same_text(&render(&q), "$B = FALSE ; echo $B ;"));
    }

    #[test]
    fn splice_fills_the_hole_with_the_echo_argument() {
        // s("if (1<$i) echo $i*$i ;", "echo [M]*2 ;") = "if (1<$i) echo $i*$i*2 ;"
        let m = Program::new(vec![Cmd::If(
            Expr::lt(Expr::Int(1), iv(1)),
            Box::new(Cmd::Echo(Expr::mul(iv(1), iv(1)))),
        )]);
        let tpl = Template::new(vec![Cmd::Echo(Expr::mul(hole_m(), Expr::Int(2)))]);
        let got = splice(&m, &tpl).unwrap();
        assert!(same_text(&render(&got), "if (1<$i) echo $i*$i*2 ;"));
    }

    #[test]
    fn splice_negation() {
        let tpl = Template::new(vec![Cmd::Echo(Expr::not(hole_m()))]);
        let got = splice(&echo_lt_ij(), &tpl).unwrap();
        assert!(same_text(&render(&got), "echo !($i<$j) ;"));
    }

    #[test]
    fn splice_can_drop_the_argument() {
        // The QUIT body: replace the echo with an assignment.
        let m = Program::new(vec![Cmd::Echo(pv(1))]);
        let tpl = Template::new(vec![Cmd::Assign(PhpVar::Flag(1), Expr::Bool(true))]);
        let got = splice(&m, &tpl).unwrap();
        assert!(same_text(&render(&got), "$A = TRUE ;"));
    }

    #[test]
    fn splice_without_echo_is_an_error() {
        let m = Program::new(vec![Cmd::Assign(PhpVar::Prog(1), Expr::Int(1))]);
        let tpl = Template::new(vec![Cmd::Echo(hole_m())]);
        assert!(matches!(splice(&m, &tpl), Err(ProgramError::NoEcho)));
    }

    #[test]
    fn multi_command_replacement_blocks_in_body_position() {
        let m = Program::new(vec![Cmd::For {
            init: Box::new(Cmd::Assign(PhpVar::Prog(1), Expr::Int(1))),
            cond: Expr::lt(pv(1), iv(1)),
            step: Box::new(Cmd::Inc(PhpVar::Prog(1))),
            body: Box::new(Cmd::Echo(pv(1))),
        }]);
        let tpl = Template::new(vec![
            Cmd::Assign(PhpVar::Flag(1), Expr::Bool(false)),
            Cmd::If(hole_m(), Box::new(Cmd::Assign(PhpVar::Flag(1), Expr::Bool(true)))),
        ]);
        let got = splice(&m, &tpl).unwrap();
        assert!(same_text(
            &render(&got),
            "for ($a=1 ; $a<$i ; ++$a) { $A=FALSE ; if ($a) $A=TRUE ; } ;"
        ));
    }

    #[test]
    fn splice_preserves_echo_count_product() {
        let m = Program::new(vec![Cmd::Echo(pv(1)), Cmd::Echo(pv(1))]);
        let tpl = Template::new(vec![
            Cmd::Echo(hole_m()),
            Cmd::Echo(Expr::mul(hole_m(), Expr::Int(2))),
        ]);
        let got = splice(&m, &tpl).unwrap();
        assert_eq!(got.echo_count(), 4);
    }
}

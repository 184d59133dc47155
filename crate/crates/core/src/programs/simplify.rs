use super::ast::{Cmd, Expr, PhpVar, Program};

// Code Rule 1: `$A=FALSE ; if P $A=TRUE ; echo $A` is `echo P`.
//
// The guarded assignment may sit inside a singleton block (the DO rule
// wraps its products in braces). The flag must not appear anywhere else
// and P itself must not read it.

fn occurrences(p: &Program, v: PhpVar) -> usize {
    let mut n = 0;
    for c in &p.commands {
        c.for_each_assigned(&mut |w| {
            if w == v {
                n += 1;
            }
        });
        c.for_each_expr(&mut |e| {
            if let Expr::Var(w) = e {
                if *w == v {
                    n += 1;
                }
            }
        });
    }
    n
}

fn expr_mentions(e: &Expr, v: PhpVar) -> bool {
    let mut found = false;
    e.for_each(&mut |x| {
        if let Expr::Var(w) = x {
            if *w == v {
                found = true;
            }
        }
    });
    found
}

fn guarded_set(c: &Cmd, v: PhpVar) -> Option<&Expr> {
    let inner = match c {
        Cmd::Block(cmds) if cmds.len() == 1 => &cmds[0],
        other => other,
    };
    match inner {
        Cmd::If(cond, body) => match body.as_ref() {
            Cmd::Assign(w, Expr::Bool(true)) if *w == v => Some(cond),
            _ => None,
        },
        _ => None,
    }
}

fn rewrite_list(cmds: &[Cmd], whole: &Program) -> (Vec<Cmd>, bool) {
    let mut out: Vec<Cmd> = Vec::new();
    let mut changed = false;
    let mut i = 0;
    while i < cmds.len() {
        if i + 2 < cmds.len() {
            if let Cmd::Assign(v, Expr::Bool(false)) = &cmds[i] {
                if let Some(cond) = guarded_set(&cmds[i + 1], *v) {
                    let is_echo = matches!(&cmds[i + 2], Cmd::Echo(Expr::Var(w)) if w == v);
                    if is_echo && !expr_mentions(cond, *v) && occurrences(whole, *v) == 3 {
                        out.push(Cmd::Echo(cond.clone()));
                        i += 3;
                        changed = true;
                        continue;
                    }
                }
            }
        }
        let (cmd, inner_changed) = rewrite_cmd(&cmds[i], whole);
        changed |= inner_changed;
        out.push(cmd);
        i += 1;
    }
    (out, changed)
}

fn rewrite_cmd(c: &Cmd, whole: &Program) -> (Cmd, bool) {
    match c {
        Cmd::Block(cmds) => {
            let (new, changed) = rewrite_list(cmds, whole);
            (Cmd::Block(new), changed)
        }
        Cmd::If(cond, body) => {
            let (new, changed) = rewrite_cmd(body, whole);
            (Cmd::If(cond.clone(), Box::new(new)), changed)
        }
        Cmd::For {
            init,
            cond,
            step,
            body,
        } => {
            let (new, changed) = rewrite_cmd(body, whole);
            (
                Cmd::For {
                    init: init.clone(),
                    cond: cond.clone(),
                    step: step.clone(),
                    body: Box::new(new),
                },
                changed,
            )
        }
        other => (other.clone(), false),
    }
}

/// Applies Code Rule 1 everywhere it fires, to a fixpoint. Programs
/// without the pattern come back unchanged.
pub fn simplify_cr1(p: &Program) -> Program {
    let mut cur = p.clone();
    loop {
        let (commands, changed) = rewrite_list(&cur.commands, &cur);
        cur = Program::new(commands);
        if !changed {
            return cur;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::render::{render, same_text};

    fn flag() -> PhpVar {
        PhpVar::Flag(1)
    }
    fn iv(r: u32) -> Expr {
        Expr::var(PhpVar::Input(r))
    }

    fn quit_do_product() -> Program {
        // $A=FALSE ; { if (($j % $i) == 0) $A=TRUE ; } ; echo $A ;
        Program::new(vec![
            Cmd::Assign(flag(), Expr::Bool(false)),
            Cmd::Block(vec![Cmd::If(
                Expr::eq(Expr::rem(iv(2), iv(1)), Expr::Int(0)),
                Box::new(Cmd::Assign(flag(), Expr::Bool(true))),
            )]),
            Cmd::Echo(Expr::var(flag())),
        ])
    }

    #[test]
    fn fires_on_the_quit_do_product() {
        let got = simplify_cr1(&quit_do_product());
        assert!(same_text(&render(&got), "echo ($j % $i) == 0 ;"));
    }

    #[test]
    fn does_not_fire_when_flag_is_read_elsewhere() {
        let mut p = quit_do_product();
        p.commands.push(Cmd::Echo(Expr::var(flag())));
        assert_eq!(simplify_cr1(&p), p);
    }

    #[test]
    fn identity_on_already_simple_programs() {
        let p = Program::new(vec![Cmd::Echo(Expr::lt(iv(1), iv(2)))]);
        assert_eq!(simplify_cr1(&p), p);
    }
}

use std::fmt;

use super::ast::{Cmd, Expr, Program};

// Printing convention: comparison and logical operators parenthesize any
// operand that is not a literal or variable; the arithmetic operators `*`
// and `%` chain bare on the left (they are left-associative and of equal
// precedence) and parenthesize compound right operands; `!` always
// parenthesizes its operand. This reproduces the axiom programs and every
// combined form the rules emit.

fn atomic(e: &Expr) -> bool {
    matches!(e, Expr::Bool(_) | Expr::Int(_) | Expr::Var(_) | Expr::Hole(_))
}

fn arith(e: &Expr) -> bool {
    matches!(e, Expr::Mul(_, _) | Expr::Rem(_, _))
}

fn paren_unless(e: &Expr, keep_bare: impl Fn(&Expr) -> bool, out: &mut String) {
    if keep_bare(e) {
        render_expr(e, out);
    } else {
        out.push('(');
        render_expr(e, out);
        out.push(')');
    }
}

pub(crate) fn render_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Bool(true) => out.push_str("TRUE"),
        Expr::Bool(false) => out.push_str("FALSE"),
        Expr::Int(v) => out.push_str(&v.to_string()),
        Expr::Var(v) => out.push_str(&v.to_string()),
        Expr::Hole(mark) => out.push_str(match mark {
            super::ast::HoleMark::M => "[M]",
            super::ast::HoleMark::N => "[N]",
        }),
        Expr::Not(a) => {
            out.push_str("!(");
            render_expr(a, out);
            out.push(')');
        }
        Expr::And(a, b) => {
            paren_unless(a, atomic, out);
            out.push_str(" && ");
            paren_unless(b, atomic, out);
        }
        Expr::Or(a, b) => {
            paren_unless(a, atomic, out);
            out.push_str(" || ");
            paren_unless(b, atomic, out);
        }
        Expr::Eq(a, b) => {
            paren_unless(a, atomic, out);
            out.push_str(" == ");
            paren_unless(b, atomic, out);
        }
        Expr::Lt(a, b) => {
            paren_unless(a, atomic, out);
            out.push_str(" < ");
            paren_unless(b, atomic, out);
        }
        Expr::Mul(a, b) => {
            paren_unless(a, |e| atomic(e) || arith(e), out);
            out.push_str(" * ");
            paren_unless(b, atomic, out);
        }
        Expr::Rem(a, b) => {
            paren_unless(a, |e| atomic(e) || arith(e), out);
            out.push_str(" % ");
            paren_unless(b, atomic, out);
        }
    }
}

// `terminated` controls the trailing `;`: the init and step slots of a
// for-header go bare.
fn render_cmd(c: &Cmd, terminated: bool, out: &mut String) {
    match c {
        Cmd::Echo(e) => {
            out.push_str("echo ");
            render_expr(e, out);
            if terminated {
                out.push_str(" ;");
            }
        }
        Cmd::Assign(v, e) => {
            out.push_str(&v.to_string());
            out.push_str(" = ");
            render_expr(e, out);
            if terminated {
                out.push_str(" ;");
            }
        }
        Cmd::Inc(v) => {
            out.push_str("++");
            out.push_str(&v.to_string());
            if terminated {
                out.push_str(" ;");
            }
        }
        Cmd::If(cond, body) => {
            out.push_str("if (");
            render_expr(cond, out);
            out.push_str(") ");
            render_cmd(body, true, out);
        }
        Cmd::For {
            init,
            cond,
            step,
            body,
        } => {
            out.push_str("for (");
            render_cmd(init, false, out);
            out.push_str(" ; ");
            render_expr(cond, out);
            out.push_str(" ; ");
            render_cmd(step, false, out);
            out.push_str(") ");
            render_cmd(body, true, out);
        }
        Cmd::Block(cmds) => {
            out.push_str("{ ");
            for c in cmds {
                render_cmd(c, true, out);
                out.push(' ');
            }
            out.push('}');
            if terminated {
                out.push_str(" ;");
            }
        }
    }
}

/// Renders a program as target-language text. Every command carries a
/// trailing `;` and blocks print braces; comparisons in tests treat
/// whitespace and semicolons as insignificant.
pub fn render(p: &Program) -> String {
    let mut out = String::new();
    for (i, c) in p.commands.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        render_cmd(c, true, &mut out);
    }
    out
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render_expr(self, &mut s);
        write!(f, "{}", s)
    }
}

/// Comparison key for program text: whitespace- and semicolon-insensitive.
pub fn text_key(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ';')
        .collect()
}

/// True when two program texts are equal up to whitespace and semicolons.
pub fn same_text(a: &str, b: &str) -> bool {
    text_key(a) == text_key(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::ast::PhpVar;

    fn iv(r: u32) -> Expr {
        Expr::var(PhpVar::Input(r))
    }
    fn pv(r: u32) -> Expr {
        Expr::var(PhpVar::Prog(r))
    }

    #[test]
    fn axiom_style_echoes() {
        let p = Program::new(vec![Cmd::Echo(Expr::lt(iv(1), iv(2)))]);
        assert!(same_text(&render(&p), "echo $i < $j ;"));

        let p = Program::new(vec![Cmd::Echo(Expr::mul(iv(1), iv(2)))]);
        assert!(same_text(&render(&p), "echo $i*$j;"));
    }

    #[test]
    fn for_loop_renders_like_axiom_six() {
        let p = Program::new(vec![Cmd::For {
            init: Box::new(Cmd::Assign(PhpVar::Prog(1), Expr::Int(1))),
            cond: Expr::lt(pv(1), iv(1)),
            step: Box::new(Cmd::Inc(PhpVar::Prog(1))),
            body: Box::new(Cmd::Echo(pv(1))),
        }]);
        assert!(same_text(&render(&p), "for ($a=1 ; $a<$i ; ++$a) echo $a ;"));
    }

    #[test]
    fn conjunction_parenthesizes_compound_operands() {
        let e = Expr::and(Expr::lt(iv(1), iv(2)), Expr::lt(iv(2), iv(3)));
        assert!(same_text(&e.to_string(), "($i<$j)&&($j<$k)"));

        let e = Expr::and(
            Expr::not(Expr::var(PhpVar::Flag(1))),
            Expr::not(Expr::lt(iv(1), Expr::Int(2))),
        );
        assert!(same_text(&e.to_string(), "(!($A)) && (!($i<2))"));
    }

    #[test]
    fn multiplication_chains_stay_bare() {
        let e = Expr::mul(Expr::mul(iv(1), iv(1)), Expr::Int(2));
        assert!(same_text(&e.to_string(), "$i*$i*2"));
    }

    #[test]
    fn remainder_under_comparison_is_parenthesized() {
        let e = Expr::eq(Expr::rem(iv(2), iv(1)), Expr::Int(0));
        assert!(same_text(&e.to_string(), "($j % $i) == 0"));
    }

    #[test]
    fn empty_program_renders_empty() {
        assert_eq!(render(&Program::default()), "");
    }

    #[test]
    fn block_prints_braces() {
        let p = Program::new(vec![Cmd::Block(vec![Cmd::If(
            Expr::lt(iv(1), iv(2)),
            Box::new(Cmd::Echo(iv(1))),
        )])]);
        assert!(same_text(&render(&p), "{ if ($i<$j) echo $i ; } ;"));
    }
}

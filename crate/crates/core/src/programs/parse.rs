use super::ast::{Cmd, Expr, PhpVar, Program};
use super::ProgramError;
use crate::specs::seq_rank;

/// Parses program text in the target-language subset: `echo`, assignment,
/// `if`, `for`, `++`, braces, and the expression operators `!`, `&&`,
/// `||`, `==`, `<`, `*`, `%`. Semicolons after commands are optional, as
/// the corpus listings are inconsistent about them.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut commands = Vec::new();
    loop {
        p.skip_noise();
        if p.pos >= p.src.len() {
            break;
        }
        commands.push(p.command()?);
    }
    let program = Program::new(commands);
    if !program.well_formed() {
        return Err(ProgramError::Parse {
            pos: 0,
            msg: "program assigns to an input variable".to_string(),
        });
    }
    Ok(program)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ProgramError {
        ProgramError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    // Whitespace and empty statements.
    fn skip_noise(&mut self) {
        loop {
            self.skip_ws();
            if self.peek() == Some(b';') {
                self.pos += 1;
            } else {
                return;
            }
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            let after = self.src.get(self.pos + kw.len()).copied();
            if !matches!(after, Some(c) if c.is_ascii_alphanumeric()) {
                self.pos += kw.len();
                return true;
            }
        }
        false
    }

    fn expect(&mut self, token: &str) -> Result<(), ProgramError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", token)))
        }
    }

    fn command(&mut self) -> Result<Cmd, ProgramError> {
        self.skip_noise();
        if self.eat_keyword("echo") {
            let e = self.expr()?;
            self.opt_semi();
            return Ok(Cmd::Echo(e));
        }
        if self.eat_keyword("if") {
            self.expect("(")?;
            let cond = self.expr()?;
            self.expect(")")?;
            let body = self.command()?;
            return Ok(Cmd::If(cond, Box::new(body)));
        }
        if self.eat_keyword("for") {
            self.expect("(")?;
            let init = self.header_command()?;
            self.expect(";")?;
            let cond = self.expr()?;
            self.expect(";")?;
            let step = self.header_command()?;
            self.expect(")")?;
            let body = self.command()?;
            return Ok(Cmd::For {
                init: Box::new(init),
                cond,
                step: Box::new(step),
                body: Box::new(body),
            });
        }
        if self.eat("{") {
            let mut cmds = Vec::new();
            loop {
                self.skip_noise();
                if self.eat("}") {
                    self.opt_semi();
                    return Ok(Cmd::Block(cmds));
                }
                if self.pos >= self.src.len() {
                    return Err(self.err("unclosed block"));
                }
                cmds.push(self.command()?);
            }
        }
        if self.eat("++") {
            let v = self.var()?;
            self.opt_semi();
            return Ok(Cmd::Inc(v));
        }
        if self.peek() == Some(b'$') {
            let v = self.var()?;
            self.skip_ws();
            // '=' but not '=='
            if self.peek() == Some(b'=') && self.src.get(self.pos + 1) != Some(&b'=') {
                self.pos += 1;
                let e = self.expr()?;
                self.opt_semi();
                return Ok(Cmd::Assign(v, e));
            }
            return Err(self.err("expected '=' after variable"));
        }
        Err(self.err("expected a command"))
    }

    // init/step slots of a for header: assignment or increment.
    fn header_command(&mut self) -> Result<Cmd, ProgramError> {
        self.skip_ws();
        if self.eat("++") {
            let v = self.var()?;
            return Ok(Cmd::Inc(v));
        }
        let v = self.var()?;
        self.skip_ws();
        if self.peek() == Some(b'=') && self.src.get(self.pos + 1) != Some(&b'=') {
            self.pos += 1;
            let e = self.expr()?;
            return Ok(Cmd::Assign(v, e));
        }
        Err(self.err("expected assignment or increment"))
    }

    fn opt_semi(&mut self) {
        self.skip_ws();
        if self.peek() == Some(b';') {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Expr, ProgramError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ProgramError> {
        let mut e = self.and_expr()?;
        while self.eat("||") {
            let rhs = self.and_expr()?;
            e = Expr::or(e, rhs);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr, ProgramError> {
        let mut e = self.cmp_expr()?;
        while self.eat("&&") {
            let rhs = self.cmp_expr()?;
            e = Expr::and(e, rhs);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> Result<Expr, ProgramError> {
        let e = self.arith_expr()?;
        self.skip_ws();
        if self.eat("==") {
            let rhs = self.arith_expr()?;
            return Ok(Expr::eq(e, rhs));
        }
        if self.peek() == Some(b'<') {
            self.pos += 1;
            let rhs = self.arith_expr()?;
            return Ok(Expr::lt(e, rhs));
        }
        Ok(e)
    }

    fn arith_expr(&mut self) -> Result<Expr, ProgramError> {
        let mut e = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    e = Expr::mul(e, rhs);
                }
                Some(b'%') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    e = Expr::rem(e, rhs);
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ProgramError> {
        self.skip_ws();
        if self.peek() == Some(b'!') && self.src.get(self.pos + 1) != Some(&b'=') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::not(inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ProgramError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(b'$') => Ok(Expr::Var(self.var()?)),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                text.parse()
                    .map(Expr::Int)
                    .map_err(|_| self.err("integer literal out of range"))
            }
            _ => {
                if self.eat_keyword("TRUE") {
                    return Ok(Expr::Bool(true));
                }
                if self.eat_keyword("FALSE") {
                    return Ok(Expr::Bool(false));
                }
                Err(self.err("expected an expression"))
            }
        }
    }

    fn var(&mut self) -> Result<PhpVar, ProgramError> {
        self.skip_ws();
        if self.peek() != Some(b'$') {
            return Err(self.err("expected a variable"));
        }
        self.pos += 1;
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(r) = seq_rank(['i', 'j', 'k'], name) {
            return Ok(PhpVar::Input(r));
        }
        if let Some(r) = seq_rank(['a', 'b', 'c'], name) {
            return Ok(PhpVar::Prog(r));
        }
        if let Some(r) = seq_rank(['A', 'B', 'C'], name) {
            return Ok(PhpVar::Flag(r));
        }
        Err(self.err(&format!("unknown variable name '${}'", name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::render::{render, same_text};

    #[test]
    fn round_trips_the_axiom_programs() {
        let sources = [
            "echo $i ;",
            "echo $i==$j",
            "echo $i < $j ;",
            "echo $i*$j;",
            "echo $i%$j ;",
            "for ($a=1 ; $a<$i ; ++$a) echo $a ;",
            "for ($a=1 ; !($i<$a) ; ++$a) echo $a ;",
        ];
        for src in sources {
            let p = parse_program(src).unwrap();
            assert!(same_text(&render(&p), src), "{}", src);
            assert_eq!(parse_program(&render(&p)).unwrap(), p);
        }
    }

    #[test]
    fn parses_the_prime_checker() {
        let src = "$A=FALSE ; for ($a=1;$a<$i;++$a){ if (1<$a) { if (($i % $a) == 0) $A=TRUE ; } ; } ; echo (!($A)) && (!($i<2)) ;";
        let p = parse_program(src).unwrap();
        assert!(same_text(&render(&p), src));
    }

    #[test]
    fn rejects_assignment_to_inputs() {
        assert!(parse_program("$i = 1 ;").is_err());
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(parse_program("echo $q ;").is_err());
    }
}

use super::term::{term_from_name, Term, BOUND_LETTERS};
use super::wff::{Relation, Wff};
use super::SpecError;

/// Parses spec notation: `^` conjunction, `v` disjunction, `~` negation,
/// `(exists A)` / `(all A)` quantifiers, quoted decimal literals.
/// Precedence is `~` > `^` > `v`; a quantifier body extends to the next
/// conjunct boundary unless parenthesized.
pub fn parse_spec(text: &str) -> Result<Wff, SpecError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        scope: Vec::new(),
    };
    p.skip_ws();
    let w = p.or_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    w.check_closed()?;
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    scope: Vec<u32>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> SpecError {
        SpecError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SpecError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    // or_expr := and_expr ('v' and_expr)*
    fn or_expr(&mut self) -> Result<Wff, SpecError> {
        let mut w = self.and_expr()?;
        loop {
            self.skip_ws();
            if self.at_or_token() {
                self.pos += 1;
                self.skip_ws();
                let rhs = self.and_expr()?;
                w = Wff::or(w, rhs);
            } else {
                return Ok(w);
            }
        }
    }

    // A lone lowercase 'v' is the disjunction operator; it never starts a
    // term or relation name.
    fn at_or_token(&self) -> bool {
        if self.peek() != Some(b'v') {
            return false;
        }
        !matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_alphanumeric())
    }

    // and_expr := unary ('^' unary)*
    fn and_expr(&mut self) -> Result<Wff, SpecError> {
        let mut w = self.unary()?;
        loop {
            self.skip_ws();
            if self.eat(b'^') {
                self.skip_ws();
                let rhs = self.unary()?;
                w = Wff::and(w, rhs);
            } else {
                return Ok(w);
            }
        }
    }

    fn unary(&mut self) -> Result<Wff, SpecError> {
        self.skip_ws();
        if self.eat(b'~') {
            let inner = self.unary()?;
            return Ok(Wff::not(inner));
        }
        if self.peek() == Some(b'(') {
            // Either a quantifier prefix or a parenthesized wff.
            if let Some(q) = self.try_quantifier()? {
                return Ok(q);
            }
            self.expect(b'(')?;
            let w = self.or_expr()?;
            self.skip_ws();
            self.expect(b')')?;
            return Ok(w);
        }
        self.atom()
    }

    fn try_quantifier(&mut self) -> Result<Option<Wff>, SpecError> {
        let save = self.pos;
        self.expect(b'(')?;
        self.skip_ws();
        let kw = self.ident();
        let universal = match kw.as_str() {
            "exists" => false,
            "all" | "forall" => true,
            _ => {
                self.pos = save;
                return Ok(None);
            }
        };
        self.skip_ws();
        let name = self.ident();
        let rank = match term_from_name(&name) {
            Some(Term::Bound(r)) => r,
            _ => {
                return Err(self.err(&format!(
                    "quantified variable must be one of {}..., got '{}'",
                    BOUND_LETTERS.iter().collect::<String>(),
                    name
                )))
            }
        };
        self.skip_ws();
        self.expect(b')')?;
        if self.scope.contains(&rank) {
            return Err(self.err(&format!("quantifier shadows {} already in scope", name)));
        }
        self.scope.push(rank);
        let body = self.quant_body()?;
        self.scope.pop();
        Ok(Some(if universal {
            Wff::forall(rank, body)
        } else {
            Wff::exists(rank, body)
        }))
    }

    // The body extends past `v` but stops at the next `^`:
    // quant_body := unary ('v' unary)*
    fn quant_body(&mut self) -> Result<Wff, SpecError> {
        let mut w = self.unary()?;
        loop {
            self.skip_ws();
            if self.at_or_token() {
                self.pos += 1;
                self.skip_ws();
                let rhs = self.unary()?;
                w = Wff::or(w, rhs);
            } else {
                return Ok(w);
            }
        }
    }

    fn atom(&mut self) -> Result<Wff, SpecError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident();
        if name.is_empty() {
            return Err(self.err("expected a relation"));
        }
        let Some(rel) = Relation::from_name(&name) else {
            self.pos = start;
            return Err(self.err(&format!("unknown relation '{}'", name)));
        };
        self.skip_ws();
        self.expect(b'(')?;
        let mut args = Vec::new();
        loop {
            self.skip_ws();
            args.push(self.term()?);
            self.skip_ws();
            if self.eat(b',') {
                continue;
            }
            self.expect(b')')?;
            break;
        }
        if args.len() != rel.arity() {
            return Err(SpecError::Arity {
                relation: rel.name().to_string(),
                expected: rel.arity(),
                got: args.len(),
            });
        }
        Ok(Wff::Atom(super::wff::Atom { rel, args }))
    }

    fn term(&mut self) -> Result<Term, SpecError> {
        if self.eat(b'"') {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.err("expected digits in literal"));
            }
            let text = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            self.expect(b'"')?;
            let value: u64 = text
                .parse()
                .map_err(|_| self.err("literal out of range"))?;
            return Ok(Term::Lit(value));
        }
        let start = self.pos;
        let name = self.ident();
        match term_from_name(&name) {
            Some(t) => Ok(t),
            None => {
                self.pos = start;
                Err(self.err(&format!("expected a variable or literal, got '{}'", name)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specs::render_spec;

    fn inp(r: u32) -> Term {
        Term::Input(r)
    }
    fn out(r: u32) -> Term {
        Term::Output(r)
    }

    #[test]
    fn parses_plain_atom() {
        let w = parse_spec("BETW(I,J,K)").unwrap();
        assert_eq!(
            w,
            Wff::atom(Relation::Betw, vec![inp(1), inp(2), inp(3)]).unwrap()
        );
    }

    #[test]
    fn parses_conjunction_with_literals() {
        let w = parse_spec("PRIME(x) ^ BETW(\"1\",x,\"100\")").unwrap();
        assert_eq!(
            w,
            Wff::and(
                Wff::atom(Relation::Prime, vec![out(1)]).unwrap(),
                Wff::atom(Relation::Betw, vec![Term::Lit(1), out(1), Term::Lit(100)]).unwrap(),
            )
        );
    }

    #[test]
    fn arity_error_is_reported() {
        assert!(matches!(
            parse_spec("LT(I)"),
            Err(SpecError::Arity { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_position() {
        match parse_spec("LT(I") {
            Err(SpecError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn unbound_quantified_variable_is_rejected() {
        assert!(matches!(
            parse_spec("PFAC(A,I)"),
            Err(SpecError::UnboundVar { .. }) | Err(SpecError::Syntax { .. })
        ));
    }

    #[test]
    fn quantifier_body_stops_at_conjunct_boundary() {
        // (exists A) binds only PFAC(A,I); the ^ continues at the outer level.
        let w = parse_spec("(exists A)PFAC(A,I)^LT(I,J)").unwrap();
        assert_eq!(
            w,
            Wff::and(
                Wff::exists(
                    1,
                    Wff::atom(Relation::Pfac, vec![Term::Bound(1), inp(1)]).unwrap()
                ),
                Wff::atom(Relation::Lt, vec![inp(1), inp(2)]).unwrap(),
            )
        );
    }

    #[test]
    fn quantifier_body_swallows_disjunction() {
        let w = parse_spec("(all A)~PFAC(A,I) v ~LT(A,x)").unwrap();
        match w {
            Wff::Forall(1, body) => match *body {
                Wff::Or(_, _) => {}
                other => panic!("expected disjunction body, got {}", other),
            },
            other => panic!("expected forall, got {}", other),
        }
    }

    #[test]
    fn negated_exists_renders_and_reparses() {
        let w = Wff::not(Wff::exists(
            1,
            Wff::atom(Relation::Pfac, vec![Term::Bound(1), inp(1)]).unwrap(),
        ));
        assert_eq!(render_spec(&w), "~(exists A)PFAC(A,I)");
        assert_eq!(parse_spec(&render_spec(&w)).unwrap(), w);
    }

    #[test]
    fn min_of_two_round_trips() {
        let text = "(LT(I,J)^EQ(I,x)) v (~LT(I,J)^EQ(J,x))";
        let w = parse_spec(text).unwrap();
        assert_eq!(parse_spec(&render_spec(&w)).unwrap(), w);
    }

    #[test]
    fn render_of_and_with_lt_matches_paper_notation() {
        let w = Wff::and(
            Wff::atom(Relation::Lt, vec![inp(1), inp(2)]).unwrap(),
            Wff::atom(Relation::Lt, vec![inp(2), inp(3)]).unwrap(),
        );
        assert_eq!(render_spec(&w), "LT(I,J)^LT(J,K)");
    }
}

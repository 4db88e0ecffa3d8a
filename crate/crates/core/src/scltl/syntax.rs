//! Concrete syntax for scLTL formulas and propositional guards.
//!
//! ```text
//! formula := or
//! or      := and ( ("|" | "||") and )*
//! and     := until ( ("&" | "&&") until )*
//! until   := unary ( "U" until )?          right associative
//! unary   := "!" unary | "X" unary | "F" unary | primary
//! primary := IDENT | "true" | "false" | "(" formula ")"
//! ```
//!
//! In formulas `!` may only apply to an atom (or a constant). Guards use
//! the same tokens without `X`/`F`/`U` and allow `!` anywhere.

use super::formula::Formula;
use super::guard::Guard;
use super::ScltlError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Eventually,
    Until,
    LParen,
    RParen,
}

fn describe(t: Option<&(Tok, usize)>) -> String {
    match t {
        None => "end of input".to_string(),
        Some((tok, _)) => match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Next => "`X`".into(),
            Tok::Eventually => "`F`".into(),
            Tok::Until => "`U`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        },
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ScltlError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'!' | b'~' => out.push((Tok::Not, start)),
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    i += 1;
                }
                out.push((Tok::And, start));
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    i += 1;
                }
                out.push((Tok::Or, start));
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "U" => Tok::Until,
                    "G" | "R" | "W" | "M" => {
                        return Err(ScltlError::NotCoSafe {
                            position: start,
                            message: format!("operator `{word}` is outside the co-safe fragment"),
                        })
                    }
                    _ => Tok::Ident(word.to_string()),
                };
                out.push((tok, start));
                continue;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                return Err(ScltlError::NotCoSafe {
                    position: start,
                    message: "implication is not supported; rewrite with `!` on atoms and `|`"
                        .into(),
                })
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ScltlError::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    temporal: bool,
}

impl Parser {
    fn new(text: &str, temporal: bool) -> Result<Self, ScltlError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            temporal,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self, expected: &str) -> ScltlError {
        ScltlError::Syntax {
            position: self.offset(),
            message: format!(
                "expected {expected}, found {}",
                describe(self.toks.get(self.pos))
            ),
        }
    }

    fn finish(&self) -> Result<(), ScltlError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected("an operator or end of input"))
        } else {
            Ok(())
        }
    }

    fn formula(&mut self) -> Result<Formula, ScltlError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            lhs = Formula::or(lhs, self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ScltlError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ScltlError> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::Until) {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ScltlError> {
        match self.peek() {
            Some(Tok::Not) => {
                let at = self.offset();
                self.bump();
                match self.unary()? {
                    Formula::Atom(o) => Ok(Formula::NotAtom(o)),
                    Formula::NotAtom(o) => Ok(Formula::Atom(o)),
                    Formula::True => Ok(Formula::False),
                    Formula::False => Ok(Formula::True),
                    other => Err(ScltlError::NotCoSafe {
                        position: at,
                        message: format!(
                            "negation on a non-atom `{other}` (not co-safe syntax)"
                        ),
                    }),
                }
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Some(Tok::Eventually) => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ScltlError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some((Tok::Ident(name), _)) => Ok(Formula::Atom(name)),
                _ => unreachable!(),
            },
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::False)
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("a proposition, constant or `(`")),
        }
    }

    fn guard(&mut self) -> Result<Guard, ScltlError> {
        let mut terms = vec![self.guard_conj()?];
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            terms.push(self.guard_conj()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Guard::Or(terms)
        })
    }

    fn guard_conj(&mut self) -> Result<Guard, ScltlError> {
        let mut terms = vec![self.guard_unary()?];
        while self.peek() == Some(&Tok::And) {
            self.bump();
            terms.push(self.guard_unary()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Guard::And(terms)
        })
    }

    fn guard_unary(&mut self) -> Result<Guard, ScltlError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(Guard::Not(Box::new(self.guard_unary()?)))
            }
            Some(Tok::Ident(_)) => match self.bump() {
                Some((Tok::Ident(name), _)) => Ok(Guard::Atom(name)),
                _ => unreachable!(),
            },
            Some(Tok::True) => {
                self.bump();
                Ok(Guard::True)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Guard::False)
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.guard()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Some(Tok::Next | Tok::Eventually | Tok::Until) => {
                debug_assert!(!self.temporal);
                Err(ScltlError::Syntax {
                    position: self.offset(),
                    message: "temporal operators are not allowed in guards".into(),
                })
            }
            _ => Err(self.unexpected("a proposition, constant or `(`")),
        }
    }
}

/// Parses an scLTL formula.
pub fn parse_scltl(text: &str) -> Result<Formula, ScltlError> {
    let mut p = Parser::new(text, true)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a propositional guard expression.
pub fn parse_guard(text: &str) -> Result<Guard, ScltlError> {
    let mut p = Parser::new(text, false)?;
    let g = p.guard()?;
    p.finish()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_formulas_parse() {
        assert_eq!(
            parse_scltl("F charge").unwrap(),
            Formula::eventually(Formula::atom("charge"))
        );
        assert_eq!(
            parse_scltl("!plant U dirt").unwrap(),
            Formula::until(Formula::not_atom("plant"), Formula::atom("dirt"))
        );
        assert_eq!(
            parse_scltl("F(plant && F rock)").unwrap(),
            Formula::eventually(Formula::and(
                Formula::atom("plant"),
                Formula::eventually(Formula::atom("rock"))
            ))
        );
    }

    #[test]
    fn precedence() {
        let f = parse_scltl("a | b & c U d").unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::atom("a"),
                Formula::and(
                    Formula::atom("b"),
                    Formula::until(Formula::atom("c"), Formula::atom("d"))
                )
            )
        );
        let f = parse_scltl("a U b U c").unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::atom("a"),
                Formula::until(Formula::atom("b"), Formula::atom("c"))
            )
        );
        assert_eq!(
            parse_scltl("F a & X b").unwrap(),
            Formula::and(
                Formula::eventually(Formula::atom("a")),
                Formula::next(Formula::atom("b"))
            )
        );
    }

    #[test]
    fn negation_only_on_atoms() {
        assert!(matches!(
            parse_scltl("!(F a)"),
            Err(ScltlError::NotCoSafe { position: 0, .. })
        ));
        assert!(matches!(
            parse_scltl("!(a & b)"),
            Err(ScltlError::NotCoSafe { .. })
        ));
        assert_eq!(parse_scltl("!(a)").unwrap(), Formula::not_atom("a"));
        assert_eq!(parse_scltl("!!a").unwrap(), Formula::atom("a"));
        assert_eq!(parse_scltl("!true").unwrap(), Formula::False);
    }

    #[test]
    fn syntax_errors_report_positions() {
        match parse_scltl("F (a & )") {
            Err(ScltlError::Syntax { position, .. }) => assert_eq!(position, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_scltl("a b"),
            Err(ScltlError::Syntax { position: 2, .. })
        ));
        assert!(matches!(parse_scltl("G a"), Err(ScltlError::NotCoSafe { .. })));
        assert!(matches!(parse_scltl("a $ b"), Err(ScltlError::Syntax { .. })));
        assert!(parse_scltl("").is_err());
    }

    #[test]
    fn guards() {
        let g = parse_guard("!a & (b | true)").unwrap();
        assert_eq!(
            g,
            Guard::And(vec![
                Guard::Not(Box::new(Guard::atom("a"))),
                Guard::Or(vec![Guard::atom("b"), Guard::True])
            ])
        );
        assert!(parse_guard("F a").is_err());
        assert_eq!(parse_guard("!(a | b)").unwrap().to_string(), "!(a | b)");
    }
}

//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence, tightest first: `~ <> []`, `&`, `|`, `->` (right-assoc),
//! `<->`. `&`, `|` and `<->` group to the left.

use super::Formula;

/// Parenthesis/unary nesting accepted before the parser gives up. Keeps the
/// recursive passes over the AST well inside the default stack.
pub const MAX_NESTING: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Var(u32),
    True,
    False,
    Not,
    Dia,
    Box,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(self) -> &'static str {
        match self {
            Tok::Var(_) => "variable",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Not => "`~`",
            Tok::Dia => "`<>`",
            Tok::Box => "`[]`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Imp => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::End => "end of input",
        }
    }
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &bytes[i..];
        let (tok, width) = if rest.starts_with(b"<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with(b"<>") {
            (Tok::Dia, 2)
        } else if rest.starts_with(b"[]") {
            (Tok::Box, 2)
        } else if rest.starts_with(b"->") {
            (Tok::Imp, 2)
        } else if rest.starts_with(b"true") && !ident_continues(rest, 4) {
            (Tok::True, 4)
        } else if rest.starts_with(b"false") && !ident_continues(rest, 5) {
            (Tok::False, 5)
        } else {
            match c {
                b'~' => (Tok::Not, 1),
                b'&' => (Tok::And, 1),
                b'|' => (Tok::Or, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'p' => {
                    let digits = rest[1..].iter().take_while(|b| b.is_ascii_digit()).count();
                    if digits == 0 {
                        return err(i, "expected digits after `p`");
                    }
                    if ident_continues(rest, 1 + digits) {
                        return err(i, "malformed variable name");
                    }
                    let s = &text[i + 1..i + 1 + digits];
                    let idx: u32 = s
                        .parse()
                        .or_else(|_| err(i, "variable index too large"))?;
                    if idx == 0 {
                        return err(i, "variable indices start at p1");
                    }
                    (Tok::Var(idx), 1 + digits)
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return err(i, format!("unexpected character {ch:?}"));
                }
            }
        };
        out.push((tok, i));
        i += width;
    }
    out.push((Tok::End, bytes.len()));
    Ok(out)
}

fn ident_continues(rest: &[u8], at: usize) -> bool {
    rest.get(at).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    nesting: usize,
}

impl Parser {
    fn peek(&self) -> Tok {
        self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return err(self.pos(), format!("nesting deeper than {MAX_NESTING}"));
        }
        Ok(())
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Tok::Imp {
            self.bump();
            self.enter()?;
            let rhs = self.imp()?;
            self.nesting -= 1;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Dia => Formula::dia,
            Tok::Box => Formula::boxed,
            _ => return self.atom(),
        };
        self.bump();
        self.enter()?;
        let inner = self.unary()?;
        self.nesting -= 1;
        Ok(wrap(inner))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Var(i) => Ok(Formula::Var(i)),
            Tok::True => Ok(Formula::Top),
            Tok::False => Ok(Formula::Bot),
            Tok::LParen => {
                self.enter()?;
                let inner = self.iff()?;
                self.nesting -= 1;
                if self.peek() != Tok::RParen {
                    return err(self.pos(), format!("expected `)`, found {}", self.peek().describe()));
                }
                self.bump();
                Ok(inner)
            }
            t => err(pos, format!("expected a formula, found {}", t.describe())),
        }
    }
}

/// Parses the ASCII syntax (`p1`, `true`, `false`, `~`, `<>`, `[]`, `&`,
/// `|`, `->`, `<->`, parentheses).
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        nesting: 0,
    };
    let f = p.iff()?;
    if p.peek() != Tok::End {
        return err(p.pos(), format!("unexpected {} after formula", p.peek().describe()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(i: u32) -> Formula {
        Formula::var(i)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("p1").unwrap(), p(1));
        assert_eq!(
            parse("<> [] p1 -> p2").unwrap(),
            Formula::imp(Formula::dia(Formula::boxed(p(1))), p(2))
        );
        assert_eq!(
            parse("p1 -> p2 -> p3").unwrap(),
            Formula::imp(p(1), Formula::imp(p(2), p(3)))
        );
        assert_eq!(
            parse("p1 | p2 & p3").unwrap(),
            Formula::or(p(1), Formula::and(p(2), p(3)))
        );
        assert_eq!(
            parse("p1 <-> p2 -> p3").unwrap(),
            Formula::iff(p(1), Formula::imp(p(2), p(3)))
        );
        assert_eq!(
            parse("~(p1&p2)|false").unwrap(),
            Formula::or(Formula::not(Formula::and(p(1), p(2))), Formula::Bot)
        );
        assert_eq!(parse("  true ").unwrap(), Formula::Top);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("p1 &").unwrap_err().pos, 4);
        assert_eq!(parse("p0").unwrap_err().pos, 0);
        assert_eq!(parse("(p1").unwrap_err().pos, 3);
        assert_eq!(parse("p1 p2").unwrap_err().pos, 3);
        assert_eq!(parse("p1 # p2").unwrap_err().pos, 3);
        assert_eq!(parse("").unwrap_err().pos, 0);
        assert!(parse("truex").is_err());
        assert!(parse("p99999999999").is_err());
        assert!(parse("pé").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected() {
        let deep = "~".repeat(MAX_NESTING + 1) + "p1";
        assert!(parse(&deep).is_err());
        let ok = "~".repeat(MAX_NESTING) + "p1";
        assert!(parse(&ok).is_ok());
        let parens = "(".repeat(10_000);
        assert!(parse(&parens).is_err());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (1u32..5).prop_map(Formula::Var),
            Just(Formula::Bot),
            Just(Formula::Top),
        ];
        leaf.prop_recursive(6, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::dia),
                inner.clone().prop_map(Formula::boxed),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse(&text).unwrap(), f);
        }

        #[test]
        fn glivenko_keeps_variables(f in arb_formula(), m in 0usize..4) {
            prop_assert_eq!(super::super::glivenko_translate(f.clone(), m).vars(), f.vars());
        }
    }
}

use thiserror::Error;

use super::{Agent, AgentSet, DerivedOp, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown agent {agent:?} at byte {offset}")]
    UnknownAgent { offset: usize, agent: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownAgent { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Keyword(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Keyword(s) => format!("{s:?}"),
            Tok::Not => "'~'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Implies => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |offset: usize, message: String| ParseError::Syntax { offset, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => out.push((start, Tok::Not)),
            b'&' => out.push((start, Tok::And)),
            b'|' => out.push((start, Tok::Or)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'[' => out.push((start, Tok::LBracket)),
            b']' => out.push((start, Tok::RBracket)),
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((start, Tok::Implies));
                    i += 2;
                    continue;
                }
                return Err(syntax(start, "expected '->'".into()));
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    out.push((start, Tok::Iff));
                    i += 3;
                    continue;
                }
                return Err(syntax(start, "expected '<->'".into()));
            }
            b'a'..=b'z' | b'0'..=b'9' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            b'A'..=b'Z' => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((start, Tok::Keyword(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {ch:?}")));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    agents: Option<&'a AgentSet>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent(&mut self) -> Result<Agent, ParseError> {
        if !self.eat(&Tok::LBracket) {
            return self.unexpected("'['");
        }
        let offset = self.offset();
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.unexpected("an agent name"),
        };
        self.pos += 1;
        let agent = Agent::new(name.clone()).map_err(|e| ParseError::Syntax {
            offset,
            message: e.to_string(),
        })?;
        if let Some(set) = self.agents {
            if !set.contains(&agent) {
                return Err(ParseError::UnknownAgent {
                    offset,
                    agent: name,
                });
            }
        }
        if !self.eat(&Tok::RBracket) {
            return self.unexpected("']'");
        }
        Ok(agent)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return self.unexpected("a formula");
        };
        match tok {
            Tok::Not => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.pos += 1;
                let f = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return self.unexpected("')'");
                }
                Ok(f)
            }
            Tok::Ident(name) => {
                if !name.as_bytes()[0].is_ascii_lowercase() {
                    return self.error(format!("invalid atom {name:?}"));
                }
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Tok::Keyword(kw) => {
                self.pos += 1;
                match kw.as_str() {
                    "K" => {
                        let a = self.agent()?;
                        Ok(Formula::k(a, self.unary()?))
                    }
                    "Kw" => {
                        let a = self.agent()?;
                        Ok(Formula::kw(a, self.unary()?))
                    }
                    "E" => Ok(Formula::e(self.unary()?)),
                    "C" => Ok(Formula::c(self.unary()?)),
                    "Cw" => Ok(Formula::cw(self.unary()?)),
                    other => match other.parse::<DerivedOp>() {
                        Ok(op) => Ok(Formula::derived(op, self.unary()?)),
                        Err(_) => Err(ParseError::Syntax {
                            offset,
                            message: format!("unknown operator {other:?}"),
                        }),
                    },
                }
            }
            _ => self.unexpected("a formula"),
        }
    }
}

fn run(text: &str, agents: Option<&AgentSet>) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        agents,
    };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return p.unexpected("end of input");
    }
    Ok(f)
}

/// Parses `text`, rejecting agents outside `agents`.
///
/// Precedence from tightest: `~` and the modal prefixes, `&`, `|`, `->`
/// (right associative), `<->`. Disjunction and the biconditional are
/// expanded into `~`, `&` and `->`.
pub fn parse(text: &str, agents: &AgentSet) -> Result<Formula, ParseError> {
    run(text, Some(agents))
}

/// Parses `text` accepting any well-formed agent name.
pub fn parse_unchecked(text: &str) -> Result<Formula, ParseError> {
    run(text, None)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_unchecked(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(names: &[&str]) -> AgentSet {
        AgentSet::from_names(names).unwrap()
    }

    fn a(n: &str) -> Agent {
        Agent::new(n).unwrap()
    }

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn knowing_whether_prefix() {
        assert_eq!(parse("Kw[a] p", &g(&["a"])).unwrap(), Formula::kw(a("a"), p()));
    }

    #[test]
    fn derived_operator_keyword() {
        assert_eq!(
            parse("Cw1 p", &g(&["a", "b"])).unwrap(),
            Formula::derived(DerivedOp::Cw1, p())
        );
    }

    #[test]
    fn modal_binds_tighter_than_conjunction() {
        let f = parse("Kw[a](p -> q) & ~C p", &g(&["a"])).unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::kw(a("a"), Formula::implies(p(), q())),
                Formula::not(Formula::c(p()))
            )
        );
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_unchecked("p -> q -> r").unwrap();
        assert_eq!(
            f,
            Formula::implies(p(), Formula::implies(q(), Formula::atom("r")))
        );
    }

    #[test]
    fn precedence_ladder() {
        let f = parse_unchecked("p | q & r -> p <-> q").unwrap();
        let lhs = Formula::implies(
            Formula::or(p(), Formula::and(q(), Formula::atom("r"))),
            p(),
        );
        assert_eq!(f, Formula::iff(lhs, q()));
    }

    #[test]
    fn cw_prefix_and_numbered_variants() {
        assert_eq!(parse_unchecked("Cw p").unwrap(), Formula::cw(p()));
        assert_eq!(parse_unchecked("Cw(p)").unwrap(), Formula::cw(p()));
        assert_eq!(
            parse_unchecked("Cw21 Cw p").unwrap(),
            Formula::derived(DerivedOp::Cw21, Formula::cw(p()))
        );
    }

    #[test]
    fn unknown_agent_is_reported_with_offset() {
        let err = parse("p & K[b] q", &g(&["a"])).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownAgent {
                offset: 6,
                agent: "b".into()
            }
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse_unchecked("p &").unwrap_err().offset(), 3);
        assert_eq!(parse_unchecked("(p").unwrap_err().offset(), 2);
        assert_eq!(parse_unchecked("p $ q").unwrap_err().offset(), 2);
        assert_eq!(parse_unchecked("Cw7 p").unwrap_err().offset(), 0);
        assert_eq!(parse_unchecked("p q").unwrap_err().offset(), 2);
        assert_eq!(parse_unchecked("p - q").unwrap_err().offset(), 2);
        assert!(parse_unchecked("").is_err());
        assert!(parse_unchecked("9").is_err());
    }
}

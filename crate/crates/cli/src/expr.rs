//! A small expression language for char-2 series arithmetic at the command
//! line:
//!
//! ```text
//! expr   := term ('+' term)*
//! term   := factor ('*' factor)*
//! factor := '0' | '1' | 's' ('^' rational)? | 'inv' '(' expr ',' rational ')'
//!         | '(' expr ')'
//! ```
//!
//! `inv(e, c)` inverts its argument to the requested cutoff `c`. There is no
//! subtraction: coefficients live in the two-element field, where `+` is its
//! own inverse. The exponent period group is inferred as the group generated
//! by every literal `s`-exponent, unless an explicit generator is supplied.

use maslov::novikov::{NovikovError, NovikovSeries, PeriodGroup};
use maslov::rat::{parse_rat, Rat};

/// Parse/evaluation failures, with a character position where that helps.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error(transparent)]
    Eval(#[from] NovikovError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Plus,
    Star,
    LParen,
    RParen,
    Comma,
    Caret,
    S,
    Inv,
    Literal(Rat),
}

#[derive(Debug, Clone)]
enum Ast {
    Zero,
    One,
    SPow(Rat),
    Sum(Vec<Ast>),
    Prod(Vec<Ast>),
    Inv(Box<Ast>, Rat),
}

fn lex(input: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let fail = |position: usize, message: String| ExprError::Parse { position, message };
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            '*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            ',' => {
                tokens.push((i, Token::Comma));
                i += 1;
            }
            '^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            's' => {
                tokens.push((i, Token::S));
                i += 1;
            }
            'i' => {
                if input[i..].starts_with("inv") {
                    tokens.push((i, Token::Inv));
                    i += 3;
                } else {
                    return Err(fail(i, "expected `inv`".into()));
                }
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '/') {
                    i += 1;
                }
                let text = &input[start..i];
                let value = parse_rat(text)
                    .map_err(|e| fail(start, format!("bad rational {text:?}: {e}")))?;
                tokens.push((start, Token::Literal(value)));
            }
            other => return Err(fail(i, format!("unexpected character {other:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    input_len: usize,
}

impl Parser {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        let position = self
            .tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.input_len);
        Err(ExprError::Parse {
            position,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn expect(&mut self, want: &Token, describe: &str) -> Result<(), ExprError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {describe}"))
        }
    }

    fn expect_literal(&mut self, describe: &str) -> Result<Rat, ExprError> {
        match self.peek() {
            Some(Token::Literal(r)) => {
                let r = *r;
                self.pos += 1;
                Ok(r)
            }
            _ => self.fail(format!("expected {describe}")),
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut terms = vec![self.term()?];
        while self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Ast::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Ast::Prod(factors)
        })
    }

    fn factor(&mut self) -> Result<Ast, ExprError> {
        let Some(token) = self.peek().cloned() else {
            return self.fail("expected a factor (0, 1, s, s^<rat>, inv(...), or a parenthesis)");
        };
        self.pos += 1;
        match token {
            Token::Literal(r) => {
                if r == Rat::from_integer(0) {
                    Ok(Ast::Zero)
                } else if r == Rat::from_integer(1) {
                    Ok(Ast::One)
                } else {
                    self.pos -= 1;
                    self.fail("only the scalars 0 and 1 exist over the two-element field")
                }
            }
            Token::S => {
                if self.peek() == Some(&Token::Caret) {
                    self.pos += 1;
                    let exponent = self.expect_literal("an exponent after `^`")?;
                    Ok(Ast::SPow(exponent))
                } else {
                    Ok(Ast::SPow(Rat::from_integer(1)))
                }
            }
            Token::Inv => {
                self.expect(&Token::LParen, "`(` after `inv`")?;
                let inner = self.expr()?;
                self.expect(&Token::Comma, "`,` between the argument and the cutoff")?;
                let cutoff = self.expect_literal("a cutoff rational")?;
                self.expect(&Token::RParen, "`)` closing `inv`")?;
                Ok(Ast::Inv(Box::new(inner), cutoff))
            }
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                self.fail("expected a factor (0, 1, s, s^<rat>, inv(...), or a parenthesis)")
            }
        }
    }
}

fn collect_exponents(ast: &Ast, out: &mut Vec<Rat>) {
    match ast {
        Ast::Zero | Ast::One => {}
        Ast::SPow(e) => out.push(*e),
        Ast::Sum(items) | Ast::Prod(items) => {
            for item in items {
                collect_exponents(item, out);
            }
        }
        Ast::Inv(inner, _) => collect_exponents(inner, out),
    }
}

fn eval(ast: &Ast, group: &PeriodGroup) -> Result<NovikovSeries, ExprError> {
    Ok(match ast {
        Ast::Zero => NovikovSeries::zero(group.clone()),
        Ast::One => NovikovSeries::one(group.clone()),
        Ast::SPow(e) => NovikovSeries::monomial(group.clone(), *e)?,
        Ast::Sum(items) => {
            let mut acc = NovikovSeries::zero(group.clone());
            for item in items {
                acc = acc.add(&eval(item, group)?)?;
            }
            acc
        }
        Ast::Prod(items) => {
            let mut acc = NovikovSeries::one(group.clone());
            for item in items {
                acc = acc.mul(&eval(item, group)?)?;
            }
            acc
        }
        Ast::Inv(inner, cutoff) => eval(inner, group)?.invert(*cutoff)?,
    })
}

/// Parses and evaluates an expression. With `gamma` set, the period group is
/// the cyclic group it generates (exponents outside it are evaluation
/// errors); otherwise the group is generated by the literal exponents in the
/// expression. Returns the series together with the group used.
pub fn eval_expression(
    input: &str,
    gamma: Option<Rat>,
) -> Result<(NovikovSeries, PeriodGroup), ExprError> {
    let tokens = lex(input)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        input_len: input.len(),
    };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.fail("trailing input after a complete expression");
    }
    let group = match gamma {
        Some(g) => PeriodGroup::cyclic(g)?,
        None => {
            let mut exponents = Vec::new();
            collect_exponents(&ast, &mut exponents);
            // The group generated by a set of rationals is generated by
            // their absolute values; zero exponents contribute nothing.
            let positive: Vec<Rat> = exponents
                .into_iter()
                .filter(|e| *e != Rat::from_integer(0))
                .map(|e| if e < Rat::from_integer(0) { -e } else { e })
                .collect();
            PeriodGroup::generated_by(&positive)?
        }
    };
    let series = eval(&ast, &group)?;
    Ok((series, group))
}

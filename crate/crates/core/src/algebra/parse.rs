//! Text form of polynomials: sums of terms like `3/4*q^2*p - 0.5*p + 1`.
//!
//! Accepted tokens are numbers (integers, decimals with optional exponent,
//! or integer ratios `a/b`), the variables `q` and `p`, `*`, `^`, `+`, `-`
//! and parentheses. Whitespace is ignored.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::polynomial::{Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("polynomial parse error at column {pos}: {msg}")]
pub struct PolyParseError {
    pub pos: usize,
    pub msg: String,
}

impl FromStr for Polynomial {
    type Err = PolyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let mut parser = Parser {
            chars,
            at: 0,
            len: s.len(),
        };
        let out = parser.expr()?;
        if let Some(&(pos, c)) = parser.chars.get(parser.at) {
            return Err(PolyParseError {
                pos,
                msg: format!("unexpected '{c}'"),
            });
        }
        Ok(out)
    }
}

/// Parses a rational literal: `7`, `-3/4`, `0.125`, `1e-3`.
pub fn parse_rational(s: &str) -> Result<Rational, PolyParseError> {
    let p: Polynomial = s.parse()?;
    p.as_constant().ok_or(PolyParseError {
        pos: 0,
        msg: format!("'{s}' is not a constant"),
    })
}

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map(|&(p, _)| p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyParseError> {
        Err(PolyParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, PolyParseError> {
        let mut acc = Polynomial::zero();
        let mut sign = match self.peek() {
            Some('-') => {
                self.at += 1;
                -1
            }
            Some('+') => {
                self.at += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            if sign < 0 {
                acc -= &t;
            } else {
                acc += &t;
            }
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.at += 1;
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.at += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, PolyParseError> {
        let base = match self.peek() {
            Some('q') => {
                self.at += 1;
                Polynomial::q()
            }
            Some('p') => {
                self.at += 1;
                Polynomial::p()
            }
            Some('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.at += 1;
                inner
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Polynomial::constant(self.number()?),
            Some(c) => return self.err(format!("unexpected '{c}'")),
            None => return self.err("unexpected end of input"),
        };
        if self.peek() == Some('^') {
            self.at += 1;
            let e = self.digits();
            if e.is_empty() {
                return self.err("expected integer exponent after '^'");
            }
            let n: u32 = e.parse().map_err(|_| PolyParseError {
                pos: self.pos(),
                msg: format!("exponent '{e}' out of range"),
            })?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.at += 1;
        }
        s
    }

    fn number(&mut self) -> Result<Rational, PolyParseError> {
        let int_part = self.digits();
        let mut frac_part = String::new();
        let mut is_decimal = false;
        if self.peek() == Some('.') {
            self.at += 1;
            is_decimal = true;
            frac_part = self.digits();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return self.err("malformed number");
        }
        let mantissa: BigInt = format!("{int_part}{frac_part}")
            .parse()
            .unwrap_or_else(|_| BigInt::zero());
        let mut value = Rational::new(mantissa, BigInt::from(10u32).pow(frac_part.len() as u32));

        if matches!(self.peek(), Some('e') | Some('E')) {
            self.at += 1;
            let neg = match self.peek() {
                Some('-') => {
                    self.at += 1;
                    true
                }
                Some('+') => {
                    self.at += 1;
                    false
                }
                _ => false,
            };
            let e = self.digits();
            let n: u32 = e.parse().map_err(|_| PolyParseError {
                pos: self.pos(),
                msg: "malformed exponent".into(),
            })?;
            let scale = Rational::from_integer(BigInt::from(10u32).pow(n));
            value = if neg { value / scale } else { value * scale };
            is_decimal = true;
        }

        if self.peek() == Some('/') {
            if is_decimal {
                return self.err("ratio literals take integers only");
            }
            self.at += 1;
            let den = self.digits();
            if den.is_empty() {
                return self.err("expected denominator after '/'");
            }
            let den: BigInt = den.parse().unwrap_or_else(|_| BigInt::zero());
            if den.is_zero() {
                return self.err("zero denominator");
            }
            value /= Rational::from_integer(den);
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::polynomial::{rat, Monomial};

    fn parse(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn parses_terms_with_rational_and_decimal_coefficients() {
        let f = parse("3/4*q^2*p - 0.5*p + 1");
        assert_eq!(f.coeff(2, 1), rat(3, 4));
        assert_eq!(f.coeff(0, 1), rat(-1, 2));
        assert_eq!(f.coeff(0, 0), rat(1, 1));
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse(" q * p+ 2 "), parse("q*p+2"));
        assert_eq!(parse("- q ^ 2"), -Polynomial::q().pow(2));
    }

    #[test]
    fn decimal_exponents_and_parentheses() {
        assert_eq!(parse("1e-3"), Polynomial::constant(rat(1, 1000)));
        assert_eq!(parse("2.5E1*q"), Polynomial::monomial(rat(25, 1), 1, 0));
        assert_eq!(parse("(q+p)^2"), parse("q^2 + 2*q*p + p^2"));
        assert_eq!(
            parse("q*q*p"),
            Polynomial::from_terms([(Monomial::new(2, 1), rat(1, 1))])
        );
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "q +", "x", "q/2", "1/0", "0.5/2", "q^", "(q", "3//4", "q p"] {
            assert!(bad.parse::<Polynomial>().is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn printer_output_reparses() {
        let f = parse("-3/4*q^3 + q*p^2 - 7 + 1/3*p");
        assert_eq!(parse(&f.to_string()), f);
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert!(parse_rational("q").is_err());
    }
}

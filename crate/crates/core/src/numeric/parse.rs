//! A small recursive-descent parser for real-number expressions such as
//! `(1+sqrt(5))/2`, `2^(1/3)`, `log(3)/log(2)` or `exp(pi*sqrt(163))`.
//!
//! Rational subexpressions are folded exactly, so `2^(1/3)` becomes a cube root
//! and `355/113` stays an exact rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::real::Real;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<Real> {
    let mut p = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// Parse an exact rational such as `6/5`, `-3`, `2.955` or `1e-6`.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let e = parse_expr(src)?;
    e.as_rational()
        .cloned()
        .ok_or_else(|| Error::Parse(format!("{src:?} is not an exact rational")))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> Error {
        let s: String = self.chars.iter().collect();
        Error::Parse(format!("{msg} at offset {} in {s:?}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Real> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = fold(acc, rhs, '+')?;
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = fold(acc, rhs, '-')?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Real> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = fold(acc, rhs, '*')?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = fold(acc, rhs, '/')?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Real> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(match v.as_rational() {
                Some(q) => Real::rational(-q),
                None => -v,
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Real> {
        let base = self.atom()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return pow(base, exponent);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Real> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                self.call(&name)
            }
            _ => Err(self.err("expected a number, constant, function or '('")),
        }
    }

    fn number(&mut self) -> Result<Real> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let int_part: String = self.chars[start..self.pos].iter().collect();
        let mut frac = String::new();
        if self.eat('.') {
            let fs = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            frac = self.chars[fs..self.pos].iter().collect();
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(self.err("malformed number"));
        }
        let digits = format!("{int_part}{frac}");
        let mant: BigInt = digits.parse().map_err(|_| self.err("malformed number"))?;
        let mut q = BigRational::new(mant, num_traits::pow(BigInt::from(10), frac.len()));
        // scientific exponent, only when followed by a digit or sign+digit
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = self.eat('-');
            if !neg {
                self.eat('+');
            }
            let es = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if es == self.pos {
                self.pos = save;
            } else {
                let e: String = self.chars[es..self.pos].iter().collect();
                let e: usize = e.parse().map_err(|_| self.err("exponent too large"))?;
                let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), e));
                q = if neg { q / scale } else { q * scale };
            }
        }
        Ok(Real::rational(q))
    }

    fn args(&mut self) -> Result<Vec<Real>> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn call(&mut self, name: &str) -> Result<Real> {
        match name {
            "pi" => return Ok(Real::pi()),
            "e" => return Ok(Real::e()),
            _ => {}
        }
        let args = self.args()?;
        let one = |args: &[Real]| -> Result<Real> {
            match args {
                [a] => Ok(a.clone()),
                _ => Err(Error::Parse(format!("{name} takes one argument"))),
            }
        };
        match name {
            "sqrt" => Ok(one(&args)?.sqrt()),
            "cbrt" => Ok(one(&args)?.root(3)),
            "log" | "ln" => Ok(one(&args)?.ln()),
            "exp" => Ok(one(&args)?.exp()),
            "dist" => Ok(one(&args)?.dist_to_int()),
            "root" => match args.as_slice() {
                [x, n] => {
                    let n = n
                        .as_rational()
                        .filter(|q| q.is_integer() && q.is_positive())
                        .and_then(|q| q.numer().to_u32())
                        .ok_or_else(|| Error::Parse("root index must be a positive integer".into()))?;
                    Ok(x.root(n))
                }
                _ => Err(Error::Parse("root takes two arguments".into())),
            },
            _ => Err(Error::Parse(format!("unknown function {name:?}"))),
        }
    }
}

fn fold(a: Real, b: Real, op: char) -> Result<Real> {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        let v = match op {
            '+' => x + y,
            '-' => x - y,
            '*' => x * y,
            _ => {
                if y.is_zero() {
                    return Err(Error::Parse("division by zero".into()));
                }
                x / y
            }
        };
        return Ok(Real::rational(v));
    }
    Ok(match op {
        '+' => a + b,
        '-' => a - b,
        '*' => a * b,
        _ => a / b,
    })
}

fn pow(base: Real, exponent: Real) -> Result<Real> {
    let Some(q) = exponent.as_rational().cloned() else {
        return Ok((exponent * base.ln()).exp());
    };
    let num = q.numer().abs().to_u64();
    let den = q.denom().to_u32();
    let (Some(num), Some(den)) = (num, den) else {
        return Ok((exponent * base.ln()).exp());
    };
    if let Some(b) = base.as_rational() {
        if den == 1 {
            let p = num_traits::pow(b.clone(), num as usize);
            let p = if q.is_negative() {
                if p.is_zero() {
                    return Err(Error::Parse("zero to a negative power".into()));
                }
                p.recip()
            } else {
                p
            };
            return Ok(Real::rational(p));
        }
    }
    let mut v = base.root(den).powi(num);
    if q.is_negative() {
        v = Real::rational(BigRational::one()) / v;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_fold() {
        let e = parse_expr("355/113").unwrap();
        assert_eq!(e.as_rational().unwrap(), &BigRational::new(355.into(), 113.into()));
        assert_eq!(
            parse_rational("2.955").unwrap(),
            BigRational::new(591.into(), 200.into())
        );
        assert_eq!(
            parse_rational("1e-6").unwrap(),
            BigRational::new(1.into(), 1_000_000.into())
        );
        assert_eq!(
            parse_rational("-(3/2)^2").unwrap(),
            BigRational::new((-9).into(), 4.into())
        );
    }

    #[test]
    fn fractional_powers_become_roots() {
        let e = parse_expr("2^(1/3)").unwrap();
        assert_eq!(e.to_string(), "root(2,3)");
        let e = parse_expr("(1+sqrt(5))/2").unwrap();
        assert_eq!(e.to_string(), "((1+sqrt(5))/2)");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_expr("2+").is_err());
        assert!(parse_expr("foo(1)").is_err());
        assert!(parse_expr("1/0").is_err());
        assert!(parse_expr("(1").is_err());
    }

    #[test]
    fn functions_evaluate() {
        let e = parse_expr("exp(log(7))").unwrap();
        let c = e.enclose_to_width(-100, 4096).unwrap();
        assert!(c.interval().contains(&crate::numeric::Dyadic::from_int(7)));
    }
}

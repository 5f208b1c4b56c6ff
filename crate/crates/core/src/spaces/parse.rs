//! Plain-text descriptor grammar:
//!
//! ```text
//! space  := lp(num) | lorentz(num,num) | dwp(weight,num) | orlicz(young)
//!         | marc(fund) | dual(space) | power(space,num) | mult(space,space)
//! weight := pow(num)
//! young  := power(num) | mix(num,num)
//! fund   := pow(num) | fund(space)
//! num    := decimal | integer/integer | inf
//! ```

use std::str::FromStr;

use crate::error::{Error, Result};

use super::descriptor::{FundamentalRule, OrliczFunction, Scalar, SpaceDescriptor, WeightRule};

#[derive(Debug, Clone)]
enum Node {
    Call {
        name: String,
        args: Vec<Node>,
        pos: usize,
    },
    Num(Scalar, usize),
}

impl Node {
    fn pos(&self) -> usize {
        match self {
            Node::Call { pos, .. } | Node::Num(_, pos) => *pos,
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn node(&mut self) -> Result<Node> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .to_ascii_lowercase();
                if name == "inf" {
                    return Ok(Node::Num(Scalar::INFINITY, start));
                }
                self.expect(b'(')?;
                let mut args = vec![self.node()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.node()?);
                }
                self.expect(b')')?;
                Ok(Node::Call {
                    name,
                    args,
                    pos: start,
                })
            }
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'-' || c == b'+' => {
                self.number(start)
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self, start: usize) -> Result<Node> {
        let is_num = |c: u8| c.is_ascii_digit() || matches!(c, b'.' | b'e' | b'E' | b'-' | b'+');
        while self.pos < self.src.len() && is_num(self.src[self.pos]) {
            // a sign is only part of the literal at the start or after an exponent
            let c = self.src[self.pos];
            if (c == b'-' || c == b'+')
                && self.pos > start
                && !matches!(self.src[self.pos - 1], b'e' | b'E')
            {
                break;
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let integral = !text.contains(['.', 'e', 'E']);
        if self.peek() == Some(b'/') {
            if !integral {
                return self.err("rational literal needs integer numerator");
            }
            self.pos += 1;
            self.skip_ws();
            let ds = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let dtext = std::str::from_utf8(&self.src[ds..self.pos]).unwrap();
            let num: i64 = text.parse().or_else(|_| self.err("bad numerator"))?;
            let den: i64 = dtext.parse().or_else(|_| self.err("bad denominator"))?;
            if den == 0 {
                return self.err("zero denominator");
            }
            return Ok(Node::Num(Scalar::ratio(num, den), start));
        }
        if integral {
            if let Ok(n) = text.parse::<i64>() {
                return Ok(Node::Num(Scalar::integer(n), start));
            }
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Node::Num(Scalar::new(v), start)),
            _ => Err(Error::Parse {
                pos: start,
                msg: format!("bad number '{text}'"),
            }),
        }
    }
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        pos,
        msg: msg.into(),
    })
}

fn num(node: &Node) -> Result<Scalar> {
    match node {
        Node::Num(s, _) => Ok(*s),
        Node::Call { name, pos, .. } => perr(*pos, format!("expected a number, found '{name}(...)'")),
    }
}

fn arity(name: &str, args: &[Node], n: usize, pos: usize) -> Result<()> {
    if args.len() != n {
        return perr(
            pos,
            format!("'{name}' takes {n} argument(s), got {}", args.len()),
        );
    }
    Ok(())
}

fn space(node: &Node) -> Result<SpaceDescriptor> {
    let (name, args, pos) = match node {
        Node::Call { name, args, pos } => (name.as_str(), args.as_slice(), *pos),
        Node::Num(_, pos) => return perr(*pos, "expected a space expression"),
    };
    use SpaceDescriptor as S;
    Ok(match name {
        "lp" => {
            arity(name, args, 1, pos)?;
            S::Lp(num(&args[0])?)
        }
        "lorentz" => {
            arity(name, args, 2, pos)?;
            S::LorentzPQ {
                p: num(&args[0])?,
                q: num(&args[1])?,
            }
        }
        "dwp" => {
            arity(name, args, 2, pos)?;
            S::LorentzD {
                w: weight(&args[0])?,
                p: num(&args[1])?,
            }
        }
        "orlicz" => {
            arity(name, args, 1, pos)?;
            S::Orlicz(young(&args[0])?)
        }
        "marc" => {
            arity(name, args, 1, pos)?;
            S::Marcinkiewicz(fund(&args[0])?)
        }
        "dual" => {
            arity(name, args, 1, pos)?;
            S::Dual(Box::new(space(&args[0])?))
        }
        "power" => {
            arity(name, args, 2, pos)?;
            S::Power(Box::new(space(&args[0])?), num(&args[1])?)
        }
        "mult" => {
            arity(name, args, 2, pos)?;
            S::Multiplier(Box::new(space(&args[0])?), Box::new(space(&args[1])?))
        }
        other => return perr(pos, format!("unknown space '{other}'")),
    })
}

fn weight(node: &Node) -> Result<WeightRule> {
    match node {
        Node::Call { name, args, pos } if name == "pow" => {
            arity(name, args, 1, *pos)?;
            Ok(WeightRule::Pow(num(&args[0])?))
        }
        n => perr(n.pos(), "expected a weight rule 'pow(alpha)'"),
    }
}

fn young(node: &Node) -> Result<OrliczFunction> {
    match node {
        Node::Call { name, args, pos } if name == "power" => {
            arity(name, args, 1, *pos)?;
            Ok(OrliczFunction::Power(num(&args[0])?))
        }
        Node::Call { name, args, pos } if name == "mix" => {
            arity(name, args, 2, *pos)?;
            Ok(OrliczFunction::Mix(num(&args[0])?, num(&args[1])?))
        }
        n => perr(n.pos(), "expected a Young function 'power(a)' or 'mix(a,b)'"),
    }
}

fn fund(node: &Node) -> Result<FundamentalRule> {
    match node {
        Node::Call { name, args, pos } if name == "pow" => {
            arity(name, args, 1, *pos)?;
            Ok(FundamentalRule::Pow(num(&args[0])?))
        }
        Node::Call { name, args, pos } if name == "fund" => {
            arity(name, args, 1, *pos)?;
            Ok(FundamentalRule::Of(Box::new(space(&args[0])?)))
        }
        n => perr(n.pos(), "expected 'pow(beta)' or 'fund(space)'"),
    }
}

fn parse_root(src: &str) -> Result<Node> {
    let mut lx = Lexer {
        src: src.as_bytes(),
        pos: 0,
    };
    let node = lx.node()?;
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    Ok(node)
}

/// Parses a space expression without validating parameter ranges.
pub fn parse_space(src: &str) -> Result<SpaceDescriptor> {
    space(&parse_root(src)?)
}

/// Parses a comma-separated couple `E0,E1` (top-level comma).
pub fn parse_couple(src: &str) -> Result<(SpaceDescriptor, SpaceDescriptor)> {
    let mut depth = 0i32;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                return Ok((parse_space(&src[..i])?, parse_space(&src[i + 1..])?));
            }
            _ => {}
        }
    }
    perr(src.len(), "expected two comma-separated spaces")
}

impl FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let d = parse_space(s)?;
        d.validate()?;
        Ok(d)
    }
}

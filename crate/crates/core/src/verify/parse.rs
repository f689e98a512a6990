//! Parser for the MATH answer-expression surface: rationals, decimals,
//! powers, roots, trig/log/exp, constants, fractions, absolute value,
//! factorials, implicit multiplication.
//!
//! The goal is equivalence checking, not typesetting: anything outside the
//! grammar returns `None` and the caller degrades to string comparison.

/// Expression AST.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Var(String),
    Pi,
    Euler,
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Func(MathFn, Box<Ast>),
    /// log with explicit base: `\log_2 x`.
    LogBase(Box<Ast>, Box<Ast>),
    /// n-th root: `\sqrt[n]{x}`.
    Root(Box<Ast>, Box<Ast>),
    Abs(Box<Ast>),
    Fact(Box<Ast>),
}

/// Supported single-argument functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathFn {
    Sin,
    Cos,
    Tan,
    Cot,
    Sec,
    Csc,
    Asin,
    Acos,
    Atan,
    Sinh,
    Cosh,
    Tanh,
    Ln,
    Log,
    Exp,
    Sqrt,
}

impl MathFn {
    fn from_name(name: &str) -> Option<MathFn> {
        Some(match name {
            "sin" => MathFn::Sin,
            "cos" => MathFn::Cos,
            "tan" => MathFn::Tan,
            "cot" => MathFn::Cot,
            "sec" => MathFn::Sec,
            "csc" => MathFn::Csc,
            "arcsin" | "asin" => MathFn::Asin,
            "arccos" | "acos" => MathFn::Acos,
            "arctan" | "atan" => MathFn::Atan,
            "sinh" => MathFn::Sinh,
            "cosh" => MathFn::Cosh,
            "tanh" => MathFn::Tanh,
            "ln" => MathFn::Ln,
            "log" => MathFn::Log,
            "exp" => MathFn::Exp,
            "sqrt" => MathFn::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(String),
    Name(String), // known function name from plain letters
    Cmd(String),  // backslash command
    Pi,
    Euler,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Underscore,
    Bang,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Pipe,
}

/// Multi-letter names recognized inside plain letter runs, longest first.
const NAMES: &[&str] = &[
    "arcsin", "arccos", "arctan", "sinh", "cosh", "tanh", "sqrt", "sin", "cos", "tan", "sec",
    "csc", "cot", "abs", "exp", "ln", "log", "pi",
];

fn lex(s: &str) -> Option<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() || c == '.' {
            let mut num = String::new();
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                num.push(chars[i]);
                i += 1;
            }
            toks.push(Tok::Num(num.parse().ok()?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let run: String = chars[start..i].iter().collect();
            let mut rest = run.as_str();
            while !rest.is_empty() {
                if let Some(name) = NAMES.iter().find(|n| rest.starts_with(**n)) {
                    if *name == "pi" {
                        toks.push(Tok::Pi);
                    } else if *name == "abs" {
                        toks.push(Tok::Name("abs".into()));
                    } else {
                        toks.push(Tok::Name((*name).to_string()));
                    }
                    rest = &rest[name.len()..];
                } else {
                    let ch = rest.chars().next().expect("non-empty");
                    if ch == 'e' {
                        toks.push(Tok::Euler);
                    } else {
                        toks.push(Tok::Var(ch.to_string()));
                    }
                    rest = &rest[ch.len_utf8()..];
                }
            }
        } else if c == '\\' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            if start == i {
                return None; // escaped punctuation has no expression meaning
            }
            let cmd: String = chars[start..i].iter().collect();
            match cmd.as_str() {
                "pi" => toks.push(Tok::Pi),
                _ => toks.push(Tok::Cmd(cmd)),
            }
        } else {
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '_' => Tok::Underscore,
                '!' => Tok::Bang,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '|' => Tok::Pipe,
                _ => return None,
            };
            toks.push(tok);
            i += 1;
        }
    }
    Some(toks)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
    abs_depth: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &Tok) -> Option<()> {
        (self.peek() == Some(t)).then(|| self.pos += 1)
    }

    fn expr(&mut self) -> Option<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Some(lhs),
            }
        }
    }

    fn term(&mut self) -> Option<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(t) if self.starts_atom(t) => {
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Some(lhs),
            }
        }
    }

    fn starts_atom(&self, t: &Tok) -> bool {
        match t {
            Tok::Num(_)
            | Tok::Var(_)
            | Tok::Name(_)
            | Tok::Cmd(_)
            | Tok::Pi
            | Tok::Euler
            | Tok::LParen
            | Tok::LBrace => true,
            Tok::Pipe => self.abs_depth == 0,
            _ => false,
        }
    }

    fn unary(&mut self) -> Option<Ast> {
        if self.eat(&Tok::Minus).is_some() {
            return Some(Ast::Neg(Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Option<Ast> {
        let mut a = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Bang) => {
                    self.pos += 1;
                    a = Ast::Fact(Box::new(a));
                }
                Some(Tok::Caret) => {
                    self.pos += 1;
                    let e = self.script_arg()?;
                    a = Ast::Pow(Box::new(a), Box::new(e));
                }
                _ => return Some(a),
            }
        }
    }

    /// Argument of `^` or `_`: brace group, or a single signed atom.
    fn script_arg(&mut self) -> Option<Ast> {
        if self.eat(&Tok::LBrace).is_some() {
            let e = self.expr()?;
            self.eat(&Tok::RBrace)?;
            return Some(e);
        }
        if self.eat(&Tok::Minus).is_some() {
            return Some(Ast::Neg(Box::new(self.script_arg()?)));
        }
        self.atom()
    }

    /// Base of `\log_`: a brace group, or — matching the one-token subscript
    /// convention — a single digit peeled off the front of the next number
    /// (`\log_28` is log base 2 of 8).
    fn log_base_arg(&mut self) -> Option<Ast> {
        if let Some(Tok::Num(n)) = self.peek().cloned() {
            if n.fract() == 0.0 && n >= 10.0 {
                let digits = format!("{}", n as u64);
                let first = f64::from(digits.chars().next()?.to_digit(10)?);
                let rest: f64 = digits[1..].parse().ok()?;
                self.toks[self.pos] = Tok::Num(rest);
                return Some(Ast::Num(first));
            }
        }
        self.script_arg()
    }

    /// Group argument for `\frac`/`\sqrt`: brace group or single atom.
    fn group_arg(&mut self) -> Option<Ast> {
        if self.eat(&Tok::LBrace).is_some() {
            let e = self.expr()?;
            self.eat(&Tok::RBrace)?;
            return Some(e);
        }
        self.atom()
    }

    /// Function application argument: parenthesized expression or a tight
    /// postfix chain (`\sin x`, `\sin x^2`).
    fn func_arg(&mut self) -> Option<Ast> {
        if self.eat(&Tok::LParen).is_some() {
            let e = self.expr()?;
            self.eat(&Tok::RParen)?;
            return Some(e);
        }
        if self.eat(&Tok::Minus).is_some() {
            return Some(Ast::Neg(Box::new(self.func_arg()?)));
        }
        self.postfix()
    }

    fn apply_func(&mut self, name: &str) -> Option<Ast> {
        if name == "abs" {
            // abs(x) written as a name
            self.eat(&Tok::LParen)?;
            let e = self.expr()?;
            self.eat(&Tok::RParen)?;
            return Some(Ast::Abs(Box::new(e)));
        }
        if name == "sqrt" {
            if self.eat(&Tok::LBracket).is_some() {
                let degree = self.expr()?;
                self.eat(&Tok::RBracket)?;
                let arg = self.group_arg()?;
                return Some(Ast::Root(Box::new(degree), Box::new(arg)));
            }
            let arg = self.group_arg()?;
            return Some(Ast::Func(MathFn::Sqrt, Box::new(arg)));
        }
        let f = MathFn::from_name(name)?;
        // optional ^exp before the argument: \sin^2 x
        let mut exp = None;
        if self.eat(&Tok::Caret).is_some() {
            exp = Some(self.script_arg()?);
        }
        // optional _base for log: \log_2 x
        let mut base = None;
        if f == MathFn::Log && self.eat(&Tok::Underscore).is_some() {
            base = Some(self.log_base_arg()?);
        }
        let arg = self.func_arg()?;
        let mut out = match base {
            Some(b) => Ast::LogBase(Box::new(b), Box::new(arg)),
            None => Ast::Func(f, Box::new(arg)),
        };
        if let Some(e) = exp {
            out = Ast::Pow(Box::new(out), Box::new(e));
        }
        Some(out)
    }

    fn atom(&mut self) -> Option<Ast> {
        let tok = self.peek()?.clone();
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Some(Ast::Num(n))
            }
            Tok::Pi => {
                self.pos += 1;
                Some(Ast::Pi)
            }
            Tok::Euler => {
                self.pos += 1;
                Some(Ast::Euler)
            }
            Tok::Var(v) => {
                self.pos += 1;
                // subscripted variable keeps its subscript in the name
                if self.eat(&Tok::Underscore).is_some() {
                    let sub = if self.eat(&Tok::LBrace).is_some() {
                        let mut s = String::new();
                        loop {
                            match self.peek()?.clone() {
                                Tok::RBrace => {
                                    self.pos += 1;
                                    break;
                                }
                                Tok::Num(n) => {
                                    s.push_str(&format_subscript(n));
                                    self.pos += 1;
                                }
                                Tok::Var(v2) => {
                                    s.push_str(&v2);
                                    self.pos += 1;
                                }
                                _ => return None,
                            }
                        }
                        s
                    } else {
                        match self.peek()?.clone() {
                            Tok::Num(n) => {
                                self.pos += 1;
                                format_subscript(n)
                            }
                            Tok::Var(v2) => {
                                self.pos += 1;
                                v2
                            }
                            _ => return None,
                        }
                    };
                    return Some(Ast::Var(format!("{v}_{sub}")));
                }
                Some(Ast::Var(v))
            }
            Tok::Name(name) => {
                self.pos += 1;
                self.apply_func(&name)
            }
            Tok::Cmd(cmd) => {
                self.pos += 1;
                match cmd.as_str() {
                    "frac" => {
                        let a = self.group_arg()?;
                        let b = self.group_arg()?;
                        Some(Ast::Div(Box::new(a), Box::new(b)))
                    }
                    _ => self.apply_func(&cmd),
                }
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(&Tok::RParen)?;
                Some(e)
            }
            Tok::LBrace => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(&Tok::RBrace)?;
                Some(e)
            }
            Tok::Pipe if self.abs_depth == 0 => {
                self.pos += 1;
                self.abs_depth += 1;
                let e = self.expr()?;
                self.abs_depth -= 1;
                self.eat(&Tok::Pipe)?;
                Some(Ast::Abs(Box::new(e)))
            }
            _ => None,
        }
    }
}

fn format_subscript(n: f64) -> String {
    if n.fract() == 0.0 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// Parse an answer string into an expression AST; `None` when the string is
/// outside the supported grammar.
pub fn parse_expression(s: &str) -> Option<Ast> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return None;
    }
    let mut p = P {
        toks,
        pos: 0,
        abs_depth: 0,
    };
    let ast = p.expr()?;
    (p.pos == p.toks.len()).then_some(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_forms() {
        assert_eq!(parse_expression("42"), Some(Ast::Num(42.0)));
        assert!(parse_expression("x^2-1").is_some());
        assert!(parse_expression("(x-1)(x+1)").is_some());
        assert!(parse_expression("\\frac{1}{2}").is_some());
        assert!(parse_expression("1/2").is_some());
        assert!(parse_expression("\\sqrt[3]{8}").is_some());
        assert!(parse_expression("2\\pi").is_some());
        assert!(parse_expression("\\sin^2x+\\cos^2x").is_some());
        assert!(parse_expression("|x-1|").is_some());
        assert!(parse_expression("5!").is_some());
        assert!(parse_expression("x_1+x_2").is_some());
        assert!(parse_expression("\\log_28").is_some());
    }

    #[test]
    fn multi_letter_runs_split_into_products() {
        // "xy" = x·y
        let ast = parse_expression("xy").unwrap();
        assert_eq!(
            ast,
            Ast::Mul(
                Box::new(Ast::Var("x".into())),
                Box::new(Ast::Var("y".into()))
            )
        );
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_expression("1+").is_none());
        assert!(parse_expression("(1").is_none());
        assert!(parse_expression("\\text{hi}").is_none());
        assert!(parse_expression("").is_none());
        assert!(parse_expression("3=4").is_none());
    }

    #[test]
    fn unbraced_exponent_takes_whole_number() {
        // human convention: 2^10 = 1024, not (2^1)·0
        let ast = parse_expression("2^10").unwrap();
        assert_eq!(
            ast,
            Ast::Pow(Box::new(Ast::Num(2.0)), Box::new(Ast::Num(10.0)))
        );
    }
}

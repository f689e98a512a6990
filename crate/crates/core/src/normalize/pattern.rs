//! Deterministic pattern conversion of symbolic notation to LaTeX.
//!
//! Handles the notation families that appear in dictionary fields:
//! expressions and equations (`gcd(a,b) * lcm(a,b) = a * b`), conditionals
//! (`If P then Q`), universally quantified statements
//! (`for all a,b in S ...`), and plain prose descriptions. Anything outside
//! the grammar — applied lambda abstractions, arrows, mismatched syntax —
//! is declined so the caller can fall back to the model path.

/// Which rule family produced a conversion (reported for diagnostics).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Expression,
    Equation,
    Conditional,
    Quantified,
    Prose,
}

impl RuleFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleFamily::Expression => "expression",
            RuleFamily::Equation => "equation",
            RuleFamily::Conditional => "conditional",
            RuleFamily::Quantified => "quantified",
            RuleFamily::Prose => "prose",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
    LParen,
    RParen,
    Comma,
    Pipe,
}

fn tokenize(input: &str) -> Option<Vec<Tok>> {
    let chars: Vec<char> = input.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                s.push(chars[i]);
                i += 1;
            }
            toks.push(Tok::Num(s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            toks.push(Tok::Ident(s));
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let tok = match two.as_str() {
                "<=" => Some((Tok::Le, 2)),
                ">=" => Some((Tok::Ge, 2)),
                "!=" => Some((Tok::Ne, 2)),
                _ => match c {
                    '+' => Some((Tok::Plus, 1)),
                    '-' => Some((Tok::Minus, 1)),
                    '*' => Some((Tok::Star, 1)),
                    '/' => Some((Tok::Slash, 1)),
                    '^' => Some((Tok::Caret, 1)),
                    '=' => Some((Tok::Eq, 1)),
                    '<' => Some((Tok::Lt, 1)),
                    '>' => Some((Tok::Gt, 1)),
                    '(' => Some((Tok::LParen, 1)),
                    ')' => Some((Tok::RParen, 1)),
                    ',' => Some((Tok::Comma, 1)),
                    '|' => Some((Tok::Pipe, 1)),
                    _ => None,
                },
            };
            let (tok, n) = tok?;
            toks.push(tok);
            i += n;
        }
    }
    Some(toks)
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(String),
    Var(String),
    Word(String),
    Call(String, Vec<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RelOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
}

#[derive(Debug, Clone, PartialEq)]
enum Stmt {
    Expr(Expr),
    Rel(RelOp, Expr, Expr),
    Cond(Box<Stmt>, Box<Stmt>),
    ForAll(Vec<String>, Expr, Box<Stmt>),
}

const KEYWORDS: &[&str] = &["if", "then", "for", "all", "in", "forall"];

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi",
    "omega", "Gamma", "Delta", "Theta", "Lambda", "Pi", "Sigma", "Phi", "Psi", "Omega",
];

/// Functions rendered as native LaTeX commands.
const LATEX_FUNCS: &[&str] = &[
    "sin", "cos", "tan", "cot", "sec", "csc", "arcsin", "arccos", "arctan", "sinh", "cosh", "tanh",
    "ln", "log", "exp", "gcd", "min", "max", "det", "deg", "dim", "ker", "inf", "sup",
];

/// Trig-style functions that take the `\sin^{2}(x)` power form.
const POWER_FUNCS: &[&str] = &[
    "sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh",
];

fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name.to_ascii_lowercase().as_str())
}

fn is_greek(name: &str) -> bool {
    GREEK.contains(&name)
}

/// A bare multi-letter identifier that is neither greek nor a known
/// function: implicit multiplication never crosses these (they indicate
/// prose, not math).
fn is_plain_word(name: &str) -> bool {
    name.chars().count() > 1 && !is_greek(name) && !LATEX_FUNCS.contains(&name)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok) -> Option<()> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Some(())
        } else {
            None
        }
    }

    fn relop(&mut self) -> Option<RelOp> {
        let op = match self.peek()? {
            Tok::Eq => RelOp::Eq,
            Tok::Lt => RelOp::Lt,
            Tok::Gt => RelOp::Gt,
            Tok::Le => RelOp::Le,
            Tok::Ge => RelOp::Ge,
            Tok::Ne => RelOp::Ne,
            _ => return None,
        };
        self.pos += 1;
        Some(op)
    }

    fn expr(&mut self) -> Option<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Some(lhs),
            }
        }
    }

    fn term(&mut self) -> Option<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => {
                    if self.implicit_mul_allowed(&lhs) {
                        lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                    } else {
                        return Some(lhs);
                    }
                }
            }
        }
    }

    /// Implicit multiplication: `2x`, `2(x+1)`, `(x-1)(x+1)`, `f(x) y` — but
    /// never across bare words (`greatest common` is prose, not a product).
    fn implicit_mul_allowed(&self, prev: &Expr) -> bool {
        let prev_is_word = matches!(prev, Expr::Word(_));
        match self.peek() {
            Some(Tok::Num(_)) | Some(Tok::LParen) => !prev_is_word,
            Some(Tok::Ident(name)) => {
                if is_keyword(name) {
                    return false;
                }
                let is_call = self.peek2() == Some(&Tok::LParen);
                !prev_is_word && (is_call || !is_plain_word(name))
            }
            _ => false,
        }
    }

    fn factor(&mut self) -> Option<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Some(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Option<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.factor()?;
            return Some(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Some(base)
    }

    fn primary(&mut self) -> Option<Expr> {
        match self.next()?.clone() {
            Tok::Num(n) => Some(Expr::Num(n)),
            Tok::Ident(name) => {
                if is_keyword(&name) {
                    return None;
                }
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Tok::RParen)?;
                    Some(Expr::Call(name, args))
                } else if name.chars().count() == 1 || is_greek(&name) {
                    Some(Expr::Var(name))
                } else {
                    Some(Expr::Word(name))
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Some(inner)
            }
            Tok::Pipe => {
                let inner = self.expr()?;
                self.expect(&Tok::Pipe)?;
                Some(Expr::Abs(Box::new(inner)))
            }
            _ => None,
        }
    }
}

fn parse_relation(toks: &[Tok]) -> Option<Stmt> {
    let mut p = Parser { toks, pos: 0 };
    let lhs = p.expr()?;
    if let Some(op) = p.relop() {
        let rhs = p.expr()?;
        (p.pos == toks.len()).then_some(Stmt::Rel(op, lhs, rhs))
    } else {
        (p.pos == toks.len()).then_some(Stmt::Expr(lhs))
    }
}

fn ident_is(tok: Option<&Tok>, word: &str) -> bool {
    matches!(tok, Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(word))
}

fn parse_statement(toks: &[Tok]) -> Option<Stmt> {
    if toks.is_empty() {
        return None;
    }
    // conditional: If <relation> then <statement>
    if ident_is(toks.first(), "if") {
        let mut depth = 0i32;
        for (i, t) in toks.iter().enumerate().skip(1) {
            match t {
                Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::Ident(s) if depth == 0 && s.eq_ignore_ascii_case("then") => {
                    let cond = parse_relation(&toks[1..i])?;
                    let body = parse_statement(&toks[i + 1..])?;
                    return Some(Stmt::Cond(Box::new(cond), Box::new(body)));
                }
                _ => {}
            }
        }
        return None;
    }
    // quantified: for all v1,v2 in <set-atom> <statement>
    let quant_len = if ident_is(toks.first(), "forall") {
        Some(1)
    } else if ident_is(toks.first(), "for") && ident_is(toks.get(1), "all") {
        Some(2)
    } else {
        None
    };
    if let Some(skip) = quant_len {
        let mut pos = skip;
        let mut vars = Vec::new();
        loop {
            match toks.get(pos) {
                Some(Tok::Ident(v)) if !is_keyword(v) => {
                    vars.push(v.clone());
                    pos += 1;
                }
                _ => return None,
            }
            if matches!(toks.get(pos), Some(Tok::Comma)) {
                pos += 1;
            } else {
                break;
            }
        }
        if !ident_is(toks.get(pos), "in") || vars.is_empty() {
            return None;
        }
        pos += 1;
        // the set is a single atom (identifier, call, or parenthesized
        // expression); implicit multiplication must not swallow the body
        let mut p = Parser {
            toks: &toks[pos..],
            pos: 0,
        };
        let set = p.primary()?;
        let body = parse_statement(&toks[pos + p.pos..])?;
        return Some(Stmt::ForAll(vars, set, Box::new(body)));
    }
    parse_relation(toks)
}

/// Escape plain text for embedding in LaTeX (used for `\text{…}` bodies and
/// prose descriptions). Backslashes are dropped; specials are escaped.
pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => {}
            '{' => out.push_str("\\{"),
            '}' => out.push_str("\\}"),
            '_' => out.push_str("\\_"),
            '$' => out.push_str("\\$"),
            '%' => out.push_str("\\%"),
            '#' => out.push_str("\\#"),
            '&' => out.push_str("\\&"),
            _ => out.push(c),
        }
    }
    out
}

fn render_call(name: &str, args: &[Expr]) -> String {
    let rendered: Vec<String> = args.iter().map(render_expr).collect();
    let joined = rendered.join(",");
    if name == "sqrt" && args.len() == 1 {
        format!("\\sqrt{{{joined}}}")
    } else if name == "abs" && args.len() == 1 {
        format!("|{joined}|")
    } else if name == "lcm" {
        format!("\\operatorname{{lcm}}({joined})")
    } else if LATEX_FUNCS.contains(&name) {
        format!("\\{name}({joined})")
    } else if name.chars().count() == 1 {
        format!("{name}({joined})")
    } else if is_greek(name) {
        format!("\\{name}({joined})")
    } else {
        format!("\\text{{{}}}({joined})", escape_text(name))
    }
}

fn needs_parens_in_product(e: &Expr) -> bool {
    matches!(e, Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..))
}

fn render_expr(e: &Expr) -> String {
    match e {
        Expr::Num(n) => n.clone(),
        Expr::Var(v) => {
            if is_greek(v) {
                format!("\\{v}")
            } else {
                v.clone()
            }
        }
        Expr::Word(w) => format!("\\text{{{}}}", escape_text(w)),
        Expr::Call(name, args) => render_call(name, args),
        Expr::Neg(x) => {
            if needs_parens_in_product(x) {
                format!("-({})", render_expr(x))
            } else {
                format!("-{}", render_expr(x))
            }
        }
        Expr::Add(a, b) => format!("{} + {}", render_expr(a), render_expr(b)),
        Expr::Sub(a, b) => {
            let rhs = if matches!(**b, Expr::Add(..) | Expr::Sub(..)) {
                format!("({})", render_expr(b))
            } else {
                render_expr(b)
            };
            format!("{} - {rhs}", render_expr(a))
        }
        Expr::Mul(a, b) => {
            let la = if needs_parens_in_product(a) {
                format!("({})", render_expr(a))
            } else {
                render_expr(a)
            };
            let lb = if needs_parens_in_product(b) {
                format!("({})", render_expr(b))
            } else {
                render_expr(b)
            };
            format!("{la} \\cdot {lb}")
        }
        Expr::Div(a, b) => format!("\\frac{{{}}}{{{}}}", render_expr(a), render_expr(b)),
        Expr::Pow(base, exp) => {
            if let Expr::Call(name, args) = &**base {
                if POWER_FUNCS.contains(&name.as_str()) {
                    let joined: Vec<String> = args.iter().map(render_expr).collect();
                    return format!("\\{name}^{{{}}}({})", render_expr(exp), joined.join(","));
                }
            }
            let b = match **base {
                Expr::Num(_) | Expr::Var(_) | Expr::Call(..) | Expr::Abs(..) | Expr::Word(_) => {
                    render_expr(base)
                }
                _ => format!("({})", render_expr(base)),
            };
            format!("{b}^{{{}}}", render_expr(exp))
        }
        Expr::Abs(x) => format!("|{}|", render_expr(x)),
    }
}

fn render_relop(op: RelOp) -> &'static str {
    match op {
        RelOp::Eq => "=",
        RelOp::Lt => "<",
        RelOp::Gt => ">",
        RelOp::Le => "\\le",
        RelOp::Ge => "\\ge",
        RelOp::Ne => "\\ne",
    }
}

fn render_stmt(s: &Stmt) -> String {
    match s {
        Stmt::Expr(e) => render_expr(e),
        Stmt::Rel(op, a, b) => {
            format!(
                "{} {} {}",
                render_expr(a),
                render_relop(*op),
                render_expr(b)
            )
        }
        Stmt::Cond(c, t) => format!("{} \\Rightarrow {}", render_stmt(c), render_stmt(t)),
        Stmt::ForAll(vars, set, body) => format!(
            "\\forall {} \\in {}: {}",
            vars.join(", "),
            render_expr(set),
            render_stmt(body)
        ),
    }
}

fn family_of(s: &Stmt) -> RuleFamily {
    match s {
        Stmt::Expr(_) => RuleFamily::Expression,
        Stmt::Rel(..) => RuleFamily::Equation,
        Stmt::Cond(..) => RuleFamily::Conditional,
        Stmt::ForAll(..) => RuleFamily::Quantified,
    }
}

/// Whether text qualifies for the prose pass-through rule: no math/markup
/// characters, no lambda abstractions, no call syntax, balanced parens.
fn prose_eligible(s: &str) -> bool {
    if s.trim().is_empty() {
        return false;
    }
    const BANNED: &[char] = &[
        '=', '^', '_', '\\', '{', '}', '$', '<', '>', '|', ':', '*', '+',
    ];
    if s.chars().any(|c| BANNED.contains(&c)) {
        return false;
    }
    let lower = s.to_lowercase();
    if lower
        .split(|c: char| !c.is_ascii_alphanumeric())
        .any(|w| w == "lambda")
    {
        return false;
    }
    // call syntax means failed math, not prose
    let bytes: Vec<char> = s.chars().collect();
    for i in 1..bytes.len() {
        if bytes[i] == '(' && bytes[i - 1].is_ascii_alphanumeric() {
            return false;
        }
    }
    let mut depth = 0i32;
    for c in &bytes {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Convert symbolic notation to LaTeX via the pattern grammar.
///
/// Returns `None` when no rule applies (the caller should fall back to the
/// model path or mark the field unconverted).
pub fn pattern_normalize(input: &str) -> Option<(String, RuleFamily)> {
    let trimmed = input.trim();
    if let Some(toks) = tokenize(trimmed) {
        if !toks.is_empty() {
            if let Some(stmt) = parse_statement(&toks) {
                let rendered = render_stmt(&stmt);
                if super::latex_valid(&rendered) {
                    return Some((rendered, family_of(&stmt)));
                }
            }
        }
    }
    if prose_eligible(trimmed) {
        let escaped = escape_text(trimmed);
        if super::latex_valid(&escaped) {
            return Some((escaped, RuleFamily::Prose));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv(input: &str) -> (String, RuleFamily) {
        pattern_normalize(input).unwrap_or_else(|| panic!("should convert: {input}"))
    }

    #[test]
    fn trig_square_identity() {
        let (out, fam) = conv("sin(x)^2 + cos(x)^2 = 1");
        assert_eq!(out, "\\sin^{2}(x) + \\cos^{2}(x) = 1");
        assert_eq!(fam, RuleFamily::Equation);
    }

    #[test]
    fn conditional_with_quantifier() {
        let (out, fam) = conv("If is_commutative(G) then for all a,b in carrier(G) a*b = b*a");
        assert_eq!(
            out,
            "\\text{is\\_commutative}(G) \\Rightarrow \\forall a, b \\in \\text{carrier}(G): a \\cdot b = b \\cdot a"
        );
        assert_eq!(fam, RuleFamily::Conditional);
    }

    #[test]
    fn gcd_lcm_property() {
        let (out, _) = conv("gcd(a,b) * lcm(a,b) = a * b");
        assert_eq!(
            out,
            "\\gcd(a,b) \\cdot \\operatorname{lcm}(a,b) = a \\cdot b"
        );
    }

    #[test]
    fn numeric_example() {
        let (out, _) = conv("gcd(6,9) = 3");
        assert_eq!(out, "\\gcd(6,9) = 3");
    }

    #[test]
    fn single_variable_passes_through() {
        let (out, fam) = conv("x");
        assert_eq!(out, "x");
        assert_eq!(fam, RuleFamily::Expression);
    }

    #[test]
    fn division_becomes_frac() {
        let (out, _) = conv("a/b + c/d");
        assert_eq!(out, "\\frac{a}{b} + \\frac{c}{d}");
    }

    #[test]
    fn prose_descriptions_pass_through() {
        let (out, fam) = conv("Greatest common divisor of two or more integers");
        assert_eq!(out, "Greatest common divisor of two or more integers");
        assert_eq!(fam, RuleFamily::Prose);
    }

    #[test]
    fn declines_lambda_and_arrow_forms() {
        assert!(pattern_normalize("diff(lambda y:integral(lambda z:f(z))(y)) = f").is_none());
        assert!(pattern_normalize("x -> x + 1").is_none());
        assert!(pattern_normalize("").is_none());
    }

    #[test]
    fn declines_mixed_prose_math() {
        // a failed equation is not prose
        assert!(pattern_normalize("the value x = unbalanced ( paren").is_none());
    }

    #[test]
    fn implicit_multiplication_cases() {
        assert_eq!(conv("2x + 1").0, "2 \\cdot x + 1");
        assert_eq!(conv("(x-1)(x+1)").0, "(x - 1) \\cdot (x + 1)");
    }

    #[test]
    fn greek_and_relations() {
        assert_eq!(conv("pi * r^2").0, "\\pi \\cdot r^{2}");
        assert_eq!(conv("a <= b").0, "a \\le b");
        assert_eq!(conv("n != 0").0, "n \\ne 0");
    }

    #[test]
    fn nested_calls_and_sqrt() {
        assert_eq!(conv("sqrt(x + 1)").0, "\\sqrt{x + 1}");
        assert_eq!(
            conv("gcd(a,gcd(b,c)) = gcd(gcd(a,b),c)").0,
            "\\gcd(a,\\gcd(b,c)) = \\gcd(\\gcd(a,b),c)"
        );
        assert_eq!(conv("abs(x)").0, "|x|");
        assert_eq!(conv("|x - y|").0, "|x - y|");
    }

    #[test]
    fn quantifier_with_plain_set() {
        assert_eq!(
            conv("for all x in S x + 0 = x").0,
            "\\forall x \\in S: x + 0 = x"
        );
    }

    #[test]
    fn outputs_are_valid_latex() {
        for input in [
            "sin(x)^2 + cos(x)^2 = 1",
            "If is_commutative(G) then for all a,b in carrier(G) a*b = b*a",
            "gcd(a,b) * lcm(a,b) = a * b",
            "Greatest common divisor of two or more integers",
            "2x + 1",
            "pi * r^2",
        ] {
            let (out, _) = conv(input);
            assert!(
                super::super::latex_valid(&out),
                "invalid latex from {input}: {out}"
            );
        }
    }
}

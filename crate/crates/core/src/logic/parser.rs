//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! φ := φ "->" φ | φ "|" φ | φ "&" φ | "!" φ | "(" φ ")" | "true" | "false" | IDENT
//!    | "[" IDENT "]" "{" CMP WEIGHT "}" "." φ
//!    | φ "U"  "{" CMP WEIGHT "," BOUND "}" φ
//!    | φ "AU" "{" CMP WEIGHT "," BOUND "}" φ
//!    | ("AX"|"UX") "{" CMP WEIGHT "}" φ
//!    | ("AF"|"UF") "{" CMP WEIGHT "," BOUND "}" φ
//! ```
//!
//! Precedence from loosest: `->` (right associative), `|`, then `&` together
//! with `U` and `AU` (left associative), then the unary forms.

use super::{Bound, Formula};
use crate::error::{Error, Result};
use crate::semiring::{Cmp, Semiring, Weight};

/// Parses a formula whose thresholds are literals of `semiring`.
pub fn parse_formula(text: &str, semiring: Semiring) -> Result<Formula> {
    Parser::new(text, semiring, false).parse()
}

/// Parses a formula that may also use the CTL operators `EX`, `AX`, `EF`,
/// `AF`, `EG`, `AG`, `E[φ U φ]` and `A[φ U φ]`. Only boolean models are
/// accepted.
pub fn ctl_compat(text: &str, semiring: Semiring) -> Result<Formula> {
    if semiring != Semiring::Boolean {
        return Err(Error::Unsupported(format!(
            "CTL operators need the boolean semiring, not {}",
            semiring.name()
        )));
    }
    Parser::new(text, semiring, true).parse()
}

const KEYWORDS: [&str; 8] = ["true", "false", "U", "AU", "AX", "UX", "AF", "UF"];
const CTL_UNARY: [&str; 6] = ["EX", "AX", "EF", "AF", "EG", "AG"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    semiring: Semiring,
    ctl: bool,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, semiring: Semiring, ctl: bool) -> Self {
        Parser {
            src,
            pos: 0,
            semiring,
            ctl,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Formula {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            let found = self.rest().chars().next().map_or("end of input".to_string(), |c| format!("`{c}`"));
            self.err(format!("expected `{token}`, found {found}"))
        }
    }

    /// The identifier at the cursor, without consuming it.
    fn peek_word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if is_ident_start(c) => {}
            _ => return None,
        }
        // `.` belongs to identifiers but also ends a diamond prefix, which
        // is always followed by `]` or `}` so there is no clash here.
        let end = chars
            .find(|&(_, c)| !is_ident_char(c))
            .map_or(rest.len(), |(i, _)| i);
        Some(&rest[..end])
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek_word() {
            Some(w) if !KEYWORDS.contains(&w) => {
                self.pos += w.len();
                Ok(w.to_string())
            }
            Some(w) => self.err(format!("`{w}` is a keyword")),
            None => self.err("expected an identifier"),
        }
    }

    fn parse(mut self) -> Result<Formula> {
        let f = self.implies()?;
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.err(format!("unexpected trailing input `{}`", self.rest()));
        }
        Ok(f)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.eat("->") {
            let right = self.implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while self.eat("|") {
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        loop {
            if self.eat("&") {
                let right = self.unary()?;
                left = Formula::and(left, right);
                continue;
            }
            match self.peek_word() {
                Some(w @ ("U" | "AU")) => {
                    let save = self.pos;
                    self.pos += w.len();
                    if w == "U" && self.ctl && self.peek() != Some('{') {
                        // bare `U` closes the left operand of `E[φ U φ]`
                        self.pos = save;
                        return Ok(left);
                    }
                    let (cmp, threshold, bound) = self.annotation(true)?;
                    let right = self.unary()?;
                    left = if w == "U" {
                        Formula::until(left, cmp, threshold, bound, right)
                    } else {
                        Formula::all_until(left, cmp, threshold, bound, right)
                    };
                }
                _ => return Ok(left),
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            None => return self.err("unexpected end of input"),
            Some('!') => {
                self.pos += 1;
                return Ok(Formula::not(self.unary()?));
            }
            Some('(') => {
                self.pos += 1;
                let f = self.implies()?;
                self.expect(")")?;
                return Ok(f);
            }
            Some('[') => {
                self.pos += 1;
                let label = self.ident()?;
                self.expect("]")?;
                let (cmp, threshold, _) = self.annotation(false)?;
                self.expect(".")?;
                let body = self.unary()?;
                return Ok(Formula::diamond(&label, cmp, threshold, body));
            }
            _ => {}
        }
        let Some(word) = self.peek_word() else {
            return self.err("expected a formula");
        };
        let start = self.pos;
        self.pos += word.len();
        let braced = self.peek() == Some('{');
        match word {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            "AX" | "UX" | "AF" | "UF" if braced => {
                let bounded = word.ends_with('F');
                let (cmp, threshold, bound) = self.annotation(bounded)?;
                let bound = if bounded { bound } else { Bound::Finite(1) };
                let body = self.unary()?;
                Ok(if word.starts_with('A') {
                    Formula::all_until(Formula::True, cmp, threshold, bound, body)
                } else {
                    Formula::until(Formula::True, cmp, threshold, bound, body)
                })
            }
            w if self.ctl && CTL_UNARY.contains(&w) => {
                let body = self.unary()?;
                Ok(self.ctl_unary(w, body))
            }
            "E" | "A" if self.ctl && self.peek() == Some('[') => {
                self.pos += 1;
                let left = self.implies()?;
                if self.peek_word() != Some("U") {
                    return self.err("expected `U` inside a CTL path formula");
                }
                self.pos += 1;
                let right = self.implies()?;
                self.expect("]")?;
                let (cmp, p) = (Cmp::Gt, self.semiring.zero());
                Ok(if word == "A" {
                    Formula::all_until(left, cmp, p, Bound::Infinite, right)
                } else {
                    Formula::until(left, cmp, p, Bound::Infinite, right)
                })
            }
            w if CTL_UNARY.contains(&w) && !braced => {
                self.pos = start;
                self.err(format!("`{w}` needs `{{` or CTL compatibility mode"))
            }
            "AX" | "UX" | "AF" | "UF" | "U" | "AU" => {
                self.pos = start;
                self.err(format!("`{word}` must be followed by `{{`"))
            }
            _ => Ok(Formula::Atom(word.to_string())),
        }
    }

    fn ctl_unary(&self, op: &str, body: Formula) -> Formula {
        let (gt, zero) = (Cmp::Gt, self.semiring.zero());
        let inf = Bound::Infinite;
        let one = Bound::Finite(1);
        match op {
            "EX" => Formula::until(Formula::True, gt, zero, one, body),
            "AX" => Formula::all_until(Formula::True, gt, zero, one, body),
            "EF" => Formula::until(Formula::True, gt, zero, inf, body),
            "AF" => Formula::all_until(Formula::True, gt, zero, inf, body),
            "EG" => Formula::not(Formula::all_until(Formula::True, gt, zero, inf, Formula::not(body))),
            "AG" => Formula::not(Formula::until(Formula::True, gt, zero, inf, Formula::not(body))),
            _ => unreachable!("not a CTL operator: {op}"),
        }
    }

    /// `{CMP WEIGHT}` or `{CMP WEIGHT, BOUND}`.
    fn annotation(&mut self, with_bound: bool) -> Result<(Cmp, Weight, Bound)> {
        self.expect("{")?;
        let cmp = self.cmp()?;
        let threshold = self.weight()?;
        let bound = if with_bound {
            self.expect(",")?;
            self.bound()?
        } else {
            Bound::Finite(1)
        };
        self.expect("}")?;
        Ok((cmp, threshold, bound))
    }

    fn cmp(&mut self) -> Result<Cmp> {
        for (token, cmp) in [
            ("<=", Cmp::Le),
            (">=", Cmp::Ge),
            ("<", Cmp::Lt),
            (">", Cmp::Gt),
            ("=", Cmp::Eq),
        ] {
            if self.eat(token) {
                return Ok(cmp);
            }
        }
        self.err("expected a comparison (<, <=, =, >=, >)")
    }

    fn weight(&mut self) -> Result<Weight> {
        self.skip_ws();
        let rest = self.rest();
        let len = if rest.starts_with('(') {
            rest.find(')').map_or(rest.len(), |i| i + 1)
        } else {
            rest.find(|c: char| c == ',' || c == '}' || c.is_whitespace())
                .unwrap_or(rest.len())
        };
        if len == 0 {
            return self.err("expected a weight");
        }
        let literal = &rest[..len];
        match self.semiring.parse_weight(literal) {
            Ok(w) => {
                self.pos += len;
                Ok(w)
            }
            Err(_) => self.err(format!(
                "`{literal}` is not a weight of the {} semiring",
                self.semiring.name()
            )),
        }
    }

    fn bound(&mut self) -> Result<Bound> {
        self.skip_ws();
        if self.eat("inf") {
            return Ok(Bound::Infinite);
        }
        let digits = self.rest().chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            return self.err("expected a step bound (natural number or `inf`)");
        }
        let text = &self.rest()[..digits];
        match text.parse() {
            Ok(t) => {
                self.pos += digits;
                Ok(Bound::Finite(t))
            }
            Err(_) => self.err(format!("step bound `{text}` is too large")),
        }
    }
}

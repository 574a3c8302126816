//! Text input: field declarations, elements, forms, symbols and hypersurfaces.

use milnor_forms::forms::{DifferentialForm, Frame, PureSymbol};
use milnor_forms::hypersurface::HypersurfacePoly;
use milnor_forms::poly::{Mono, Poly};
use milnor_forms::{Error, FieldContext, FieldElement, GaloisField, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' | '[' => Some(Tok::LBrace),
            '}' | ']' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: l, column: col });
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<u64>().map_err(|_| error(l, col, "integer literal is too large"))?;
            out.push(Token { tok: Tok::Int(n), line: l, column: col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l, column: col });
        } else {
            return Err(error(l, col, format!("unexpected character `{c}`")));
        }
        column += i - start;
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

/// A sum of terms, each a coefficient times a wedge of dlogs.
type FormTerms = Vec<(FieldElement, Vec<FieldElement>)>;

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a FieldContext,
}

impl<'a> Parser<'a> {
    fn new(text: &str, ctx: &'a FieldContext) -> Result<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, ctx })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(error(l, c, message))
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.fail("unexpected trailing input"),
        }
    }

    /// Wraps arithmetic errors with the current position.
    fn at<T>(&self, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } | Error::DegreeOverflow { .. } => e,
            other => {
                let (l, c) = self.here();
                error(l, c, other.to_string())
            }
        })
    }

    fn expr(&mut self) -> Result<FieldElement> {
        let mut acc = if *self.peek() == Tok::Minus {
            self.advance();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.at(acc.add(&t))?;
                }
                Tok::Minus => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.at(acc.sub(&t))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    let f = self.factor()?;
                    acc = self.at(acc.mul(&f))?;
                }
                Tok::Slash => {
                    self.advance();
                    let f = self.factor()?;
                    if f.is_zero() {
                        return self.fail("division by zero");
                    }
                    acc = self.at(acc.div(&f))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FieldElement> {
        let base = match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                e
            }
            Tok::Int(n) => {
                self.advance();
                self.ctx.int((n % self.ctx.p() as u64) as i64)
            }
            Tok::Ident(name) => {
                if name == "dlog" {
                    return self.fail("dlog is not allowed inside a field element");
                }
                self.advance();
                if let Ok(v) = self.ctx.var(&name) {
                    v
                } else if name == "w" {
                    let gf = self.ctx.gf();
                    if gf.degree() < 2 {
                        return self.fail("`w` needs a constant field of degree at least 2");
                    }
                    self.ctx.constant(gf.from_coeffs(&[0, 1]))
                } else {
                    self.pos -= 1;
                    return self.fail(format!("unknown variable `{name}`"));
                }
            }
            Tok::End => return self.fail("unexpected end of input"),
            _ => return self.fail("expected a variable, number or `(`"),
        };
        if *self.peek() == Tok::Caret {
            self.advance();
            match self.advance() {
                Tok::Int(k) => {
                    let k = i64::try_from(k).map_err(|_| Error::DegreeOverflow { degree: u32::MAX, bound: self.ctx.max_degree() });
                    let k = self.at(k)?;
                    return self.at(base.pow(k));
                }
                _ => {
                    self.pos -= 1;
                    return self.fail("expected a nonnegative integer exponent");
                }
            }
        }
        Ok(base)
    }

    fn is_dlog(&self) -> bool {
        matches!(self.peek(), Tok::Ident(n) if n == "dlog") && *self.peek_at(1) == Tok::LParen
    }

    fn dlog_arg(&mut self) -> Result<FieldElement> {
        self.advance();
        self.expect(Tok::LParen, "`(`")?;
        let e = self.expr()?;
        if e.is_zero() {
            return self.fail("dlog of zero");
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(e)
    }

    fn form_term(&mut self) -> Result<(FieldElement, Vec<FieldElement>)> {
        let mut coeff = self.ctx.one();
        let mut chain: Option<Vec<FieldElement>> = None;
        let mut first = true;
        loop {
            let divide = if first {
                false
            } else {
                match self.peek() {
                    Tok::Star => {
                        self.advance();
                        false
                    }
                    Tok::Slash => {
                        self.advance();
                        true
                    }
                    _ => break,
                }
            };
            first = false;
            if self.is_dlog() {
                if divide {
                    return self.fail("cannot divide by a dlog");
                }
                if chain.is_some() {
                    return self.fail("use `^` to wedge dlogs");
                }
                let mut c = vec![self.dlog_arg()?];
                while *self.peek() == Tok::Caret {
                    self.advance();
                    if !self.is_dlog() {
                        return self.fail("expected dlog(...) after `^`");
                    }
                    c.push(self.dlog_arg()?);
                }
                chain = Some(c);
            } else {
                let f = self.factor()?;
                coeff = if divide {
                    if f.is_zero() {
                        return self.fail("division by zero");
                    }
                    self.at(coeff.div(&f))?
                } else {
                    self.at(coeff.mul(&f))?
                };
            }
        }
        Ok((coeff, chain.unwrap_or_default()))
    }

    fn form_terms(&mut self) -> Result<FormTerms> {
        let mut out = Vec::new();
        let mut negate = false;
        if *self.peek() == Tok::Minus {
            self.advance();
            negate = true;
        }
        loop {
            let (c, chain) = self.form_term()?;
            out.push((if negate { c.neg() } else { c }, chain));
            match self.peek() {
                Tok::Plus => negate = false,
                Tok::Minus => negate = true,
                _ => return Ok(out),
            }
            self.advance();
        }
    }
}

pub fn parse_element(text: &str, ctx: &FieldContext) -> Result<FieldElement> {
    let mut p = Parser::new(text, ctx)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// A form on the standard frame, written as `c*dlog(b1)^dlog(b2) + ...`.
pub fn parse_form(text: &str, ctx: &FieldContext) -> Result<DifferentialForm> {
    let frame = Frame::standard(ctx);
    let mut p = Parser::new(text, ctx)?;
    let terms = p.form_terms()?;
    p.finish()?;
    let degree = terms[0].1.len();
    if terms.iter().any(|(_, chain)| chain.len() != degree) {
        return Err(error(1, 1, "all terms of a form must have the same degree"));
    }
    let mut acc = DifferentialForm::zero(&frame, degree);
    for (c, chain) in terms {
        let mut t = DifferentialForm::scalar(&frame, c)?;
        for b in &chain {
            t = t.wedge(&frame.dlog(b)?)?;
        }
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// A symbol `{b1, b2, ...}`; the braces are optional.
pub fn parse_symbol(text: &str, ctx: &FieldContext) -> Result<PureSymbol> {
    let mut p = Parser::new(text, ctx)?;
    let braced = *p.peek() == Tok::LBrace;
    if braced {
        p.advance();
    }
    let mut entries = Vec::new();
    if !(braced && *p.peek() == Tok::RBrace) {
        loop {
            let e = p.expr()?;
            if e.is_zero() {
                return p.fail("symbol entries must be nonzero");
            }
            entries.push(e);
            if *p.peek() != Tok::Comma {
                break;
            }
            p.advance();
        }
    }
    if braced {
        p.expect(Tok::RBrace, "`}`")?;
    }
    p.finish()?;
    PureSymbol::new(entries)
}

/// A hypersurface polynomial such as `T1^2 + x*T2^2 + y`; identifiers starting with `T` that are not
/// field variables are the hypersurface variables. A leading `f:` is ignored.
pub fn parse_hypersurface(text: &str, ctx: &FieldContext) -> Result<HypersurfacePoly> {
    let toks = lex(text)?;
    let mut tvars: Vec<String> = Vec::new();
    for t in &toks {
        if let Tok::Ident(name) = &t.tok {
            if name.starts_with('T') && !ctx.vars().contains(name) && !tvars.contains(name) {
                tvars.push(name.clone());
            }
        }
    }
    tvars.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    if tvars.is_empty() {
        return Err(error(1, 1, "no hypersurface variables (names starting with T)"));
    }
    let ext = ctx.with_extra_vars(&tvars)?;
    let body = match (&toks[0].tok, toks.get(1).map(|t| &t.tok)) {
        (Tok::Ident(f), Some(Tok::Colon)) if f == "f" => {
            let t = &toks[2];
            skip_to(text, t.line, t.column)
        }
        _ => text,
    };
    let offset = text.len() - body.len();
    let e = parse_element(body, &ext).map_err(|err| match err {
        Error::Parse { line, column, message } if line == 1 => Error::Parse { line, column: column + offset, message },
        other => other,
    })?;
    let v = ctx.nvars();
    let k = tvars.len();
    if (v..v + k).any(|i| e.den().uses_var(i)) {
        return Err(error(1, 1, "hypersurface variables may not occur in a denominator"));
    }
    let mut grouped: Vec<(Vec<u32>, Vec<(Mono, u32)>)> = Vec::new();
    for (m, c) in e.num().terms() {
        let texps: Vec<u32> = (v..v + k).map(|i| m.0[i] as u32).collect();
        let mut bm = *m;
        for i in v..v + k {
            bm.0[i] = 0;
        }
        match grouped.iter_mut().find(|(t, _)| *t == texps) {
            Some((_, terms)) => terms.push((bm, *c)),
            None => grouped.push((texps, vec![(bm, *c)])),
        }
    }
    let mut terms = Vec::new();
    for (texps, coeff_terms) in grouped {
        let num = Poly::from_terms(ctx.gf(), coeff_terms);
        terms.push((texps, ctx.fraction(num, e.den().clone())?));
    }
    HypersurfacePoly::new(ctx, tvars, terms)
}

fn skip_to(text: &str, line: usize, column: usize) -> &str {
    if line != 1 {
        return text;
    }
    let idx = text.char_indices().nth(column - 1).map(|(i, _)| i).unwrap_or(text.len());
    &text[idx..]
}

/// `p=<p>,e=<e>,vars=<v1>,<v2>,...[,modulus=<poly in w>]`.
pub fn parse_field_spec(text: &str) -> Result<FieldContext> {
    let bad = |m: String| Error::InvalidField(m);
    let (mut p, mut e, mut vars, mut modulus) = (None, None, Vec::new(), None);
    let mut key = String::new();
    for part in text.split(',').map(str::trim) {
        let value = match part.split_once('=') {
            Some((k, v)) => {
                key = k.trim().to_string();
                v.trim()
            }
            None if key == "vars" => part,
            None => return Err(bad(format!("expected key=value, found `{part}`"))),
        };
        match key.as_str() {
            "p" => p = Some(value.parse::<u32>().map_err(|_| bad(format!("bad characteristic `{value}`")))?),
            "e" => e = Some(value.parse::<usize>().map_err(|_| bad(format!("bad degree `{value}`")))?),
            "vars" => {
                if !value.is_empty() {
                    vars.push(value.to_string());
                }
            }
            "modulus" => modulus = Some(value.to_string()),
            other => return Err(bad(format!("unknown field key `{other}`"))),
        }
    }
    let p = p.ok_or_else(|| bad("missing p".into()))?;
    if ![2, 3, 5].contains(&p) {
        return Err(bad(format!("characteristic {p} is not one of 2, 3, 5")));
    }
    if vars.is_empty() {
        return Err(bad("at least one variable is required".into()));
    }
    let gf = match modulus {
        Some(m) => {
            let coeffs = parse_modulus(&m, p)?;
            if e.is_some_and(|e| e + 1 != coeffs.len()) {
                return Err(bad(format!("modulus degree {} does not match e", coeffs.len() - 1)));
            }
            GaloisField::with_modulus(p, coeffs)?
        }
        None => GaloisField::new(p, e.unwrap_or(1))?,
    };
    FieldContext::new(gf, vars)
}

/// A polynomial in `w` with integer coefficients, as a coefficient list from the constant term up.
fn parse_modulus(text: &str, p: u32) -> Result<Vec<u32>> {
    let bad = || Error::InvalidField(format!("cannot read modulus `{text}`"));
    let mut coeffs: Vec<u32> = Vec::new();
    for term in text.split('+').map(str::trim) {
        let (c, deg) = match term.split_once('w') {
            None => (term.parse::<u32>().map_err(|_| bad())?, 0usize),
            Some((pre, post)) => {
                let c = match pre.trim_end_matches('*').trim() {
                    "" => 1,
                    s => s.parse::<u32>().map_err(|_| bad())?,
                };
                let deg = match post.trim() {
                    "" => 1,
                    s => s.strip_prefix('^').ok_or_else(bad)?.trim().parse::<usize>().map_err(|_| bad())?,
                };
                (c, deg)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] = (coeffs[deg] + c) % p;
    }
    Ok(coeffs)
}

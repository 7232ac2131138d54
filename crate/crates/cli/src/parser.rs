//! Recursive-descent parser with one token of lookahead.

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::lexer::{lex, Tok, Token};

const ITEMS: [&str; 10] =
    ["category", "poset", "monoid", "coverage", "presheaf", "subobject", "map", "family", "universe", "run"];

pub fn parse(text: &str) -> Result<SiteSpec, Diagnostic> {
    let mut p = Parser::new(text)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(SiteSpec { items })
}

/// Parses a single command, as written after `run`.
pub fn parse_command(text: &str) -> Result<Command, Diagnostic> {
    let mut p = Parser::new(text)?;
    let c = p.command()?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(c)
}

/// Parses a single formula.
pub fn parse_formula(text: &str) -> Result<Formula, Diagnostic> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect(&Tok::Eof, &["end of input"])?;
    Ok(f)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, Diagnostic> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Diagnostic {
        Diagnostic::expecting(self.span(), format!("unexpected {}", self.peek()), expected)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, expected: &[&str]) -> Result<Span, Diagnostic> {
        if self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.error(expected))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, Diagnostic> {
        if self.is_keyword(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[kw]))
        }
    }

    /// An identifier.
    fn ident(&mut self) -> Result<Name, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(text) => Ok(Name { text, span: self.bump().span }),
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// An object or arrow name: an identifier, a number or `*`.
    fn name(&mut self) -> Result<Name, Diagnostic> {
        let text = match self.peek() {
            Tok::Ident(s) => s.clone(),
            Tok::Number(n) => n.to_string(),
            Tok::Star => "*".to_string(),
            _ => return Err(self.error(&["name"])),
        };
        Ok(Name { text, span: self.bump().span })
    }

    fn number(&mut self) -> Result<usize, Diagnostic> {
        match *self.peek() {
            Tok::Number(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["number"])),
        }
    }

    /// `item (',' item)*`, possibly empty when `close` comes first.
    fn comma_list<T>(&mut self, close: &Tok, mut item: impl FnMut(&mut Self) -> Result<T, Diagnostic>) -> Result<Vec<T>, Diagnostic> {
        let mut out = Vec::new();
        if self.peek() == close {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn bracketed<T>(&mut self, item: impl FnMut(&mut Self) -> Result<T, Diagnostic>) -> Result<Vec<T>, Diagnostic> {
        self.expect(&Tok::LBracket, &["`[`"])?;
        let v = self.comma_list(&Tok::RBracket, item)?;
        self.expect(&Tok::RBracket, &["`,`", "`]`"])?;
        Ok(v)
    }

    fn numbers(&mut self) -> Result<Vec<usize>, Diagnostic> {
        self.bracketed(|p| p.number())
    }

    fn item(&mut self) -> Result<Item, Diagnostic> {
        let kw = match self.peek() {
            Tok::Ident(s) if ITEMS.contains(&s.as_str()) => s.clone(),
            _ => return Err(self.error(&ITEMS)),
        };
        let span = self.bump().span;
        Ok(match kw.as_str() {
            "category" => Item::Category(self.category(span)?),
            "poset" => Item::Category(self.poset(span)?),
            "monoid" => Item::Category(self.monoid(span)?),
            "coverage" => Item::Coverage(self.coverage()?),
            "presheaf" => Item::Presheaf(self.presheaf()?),
            "subobject" => Item::Subobject(self.subobject()?),
            "map" => Item::Map(self.map()?),
            "family" => Item::Family(self.family()?),
            "universe" => Item::Universe(self.universe()?),
            _ => Item::Run(self.command()?),
        })
    }

    fn category(&mut self, span: Span) -> Result<CategoryDecl, Diagnostic> {
        self.expect(&Tok::LBrace, &["`{`"])?;
        let (mut objects, mut arrows, mut compose) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(s) if s == "objects" => {
                    self.bump();
                    objects.extend(self.comma_list(&Tok::RBrace, |p| p.name())?);
                }
                Tok::Ident(s) if s == "arrow" => {
                    self.bump();
                    arrows.extend(self.comma_list(&Tok::RBrace, |p| p.arrow_decl())?);
                }
                Tok::Ident(s) if s == "compose" => {
                    self.bump();
                    compose.extend(self.comma_list(&Tok::RBrace, |p| p.compose_decl())?);
                }
                _ => return Err(self.error(&["objects", "arrow", "compose", "`}`"])),
            }
        }
        self.bump();
        Ok(CategoryDecl::Explicit { span, objects, arrows, compose })
    }

    fn arrow_decl(&mut self) -> Result<ArrowDecl, Diagnostic> {
        let name = self.name()?;
        self.expect(&Tok::Colon, &["`:`"])?;
        let dom = self.name()?;
        self.expect(&Tok::Arrow, &["`->`"])?;
        let cod = self.name()?;
        Ok(ArrowDecl { name, dom, cod })
    }

    fn compose_decl(&mut self) -> Result<ComposeDecl, Diagnostic> {
        let g = self.name()?;
        self.expect(&Tok::Dot, &["`.`"])?;
        let f = self.name()?;
        self.expect(&Tok::Eq, &["`=`"])?;
        let h = self.name()?;
        Ok(ComposeDecl { g, f, h })
    }

    fn poset(&mut self, span: Span) -> Result<CategoryDecl, Diagnostic> {
        self.expect(&Tok::LBrace, &["`{`"])?;
        let entries = self.comma_list(&Tok::RBrace, |p| {
            let first = p.name()?;
            if p.eat(&Tok::Colon) {
                let lo = p.name()?;
                p.expect(&Tok::Le, &["`<=`"])?;
                let hi = p.name()?;
                Ok(PosetEntry::Le { name: Some(first), lo, hi })
            } else if p.eat(&Tok::Le) {
                let hi = p.name()?;
                Ok(PosetEntry::Le { name: None, lo: first, hi })
            } else {
                Ok(PosetEntry::Object(first))
            }
        })?;
        self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
        Ok(CategoryDecl::Poset { span, entries })
    }

    fn monoid(&mut self, span: Span) -> Result<CategoryDecl, Diagnostic> {
        self.expect(&Tok::LBrace, &["`{`"])?;
        let (mut elements, mut compose) = (Vec::new(), Vec::new());
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(s) if s == "elements" => {
                    self.bump();
                    elements.extend(self.comma_list(&Tok::RBrace, |p| p.name())?);
                }
                Tok::Ident(s) if s == "compose" => {
                    self.bump();
                    compose.extend(self.comma_list(&Tok::RBrace, |p| p.compose_decl())?);
                }
                _ => return Err(self.error(&["elements", "compose", "`}`"])),
            }
        }
        self.bump();
        Ok(CategoryDecl::Monoid { span, elements, compose })
    }

    fn coverage(&mut self) -> Result<CoverageDecl, Diagnostic> {
        match self.peek() {
            Tok::Ident(_) => Ok(CoverageDecl::Named(self.ident()?)),
            Tok::LBrace => {
                let span = self.bump().span;
                let mut entries = Vec::new();
                while self.peek() != &Tok::RBrace {
                    let obj = self.name()?;
                    self.expect(&Tok::Colon, &["`:`"])?;
                    let mut sieves = vec![self.sieve()?];
                    while self.peek() == &Tok::Comma {
                        self.bump();
                        if self.peek() == &Tok::LBrace {
                            sieves.push(self.sieve()?);
                        } else {
                            break;
                        }
                    }
                    entries.push((obj, sieves));
                }
                self.bump();
                Ok(CoverageDecl::Sieves { span, entries })
            }
            _ => Err(self.error(&["trivial", "dense", "all", "`{`"])),
        }
    }

    fn sieve(&mut self) -> Result<SieveLit, Diagnostic> {
        let span = self.expect(&Tok::LBrace, &["`{`"])?;
        let members = self.comma_list(&Tok::RBrace, |p| p.name())?;
        self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
        Ok(SieveLit { span, members })
    }

    fn presheaf(&mut self) -> Result<PresheafDecl, Diagnostic> {
        let name = self.ident()?;
        let body = match self.peek() {
            Tok::LBrace => {
                self.bump();
                let entries = self.comma_list(&Tok::RBrace, |p| {
                    let key = p.name()?;
                    p.expect(&Tok::Colon, &["`:`"])?;
                    match p.peek() {
                        Tok::Number(_) => Ok(PresheafEntry::Size(key, p.number()?)),
                        Tok::LBracket => Ok(PresheafEntry::Action(key, p.numbers()?)),
                        _ => Err(p.error(&["number", "`[`"])),
                    }
                })?;
                self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
                PresheafBody::Tables(entries)
            }
            Tok::Eq => {
                self.bump();
                let kw = ["terminal", "initial", "constant", "yoneda"];
                match self.peek() {
                    Tok::Ident(s) if s == "terminal" => {
                        self.bump();
                        PresheafBody::Terminal
                    }
                    Tok::Ident(s) if s == "initial" => {
                        self.bump();
                        PresheafBody::Initial
                    }
                    Tok::Ident(s) if s == "constant" => {
                        self.bump();
                        self.expect(&Tok::LParen, &["`(`"])?;
                        let n = self.number()?;
                        self.expect(&Tok::RParen, &["`)`"])?;
                        PresheafBody::Constant(n)
                    }
                    Tok::Ident(s) if s == "yoneda" => {
                        self.bump();
                        self.expect(&Tok::LParen, &["`(`"])?;
                        let a = self.name()?;
                        self.expect(&Tok::RParen, &["`)`"])?;
                        PresheafBody::Yoneda(a)
                    }
                    _ => return Err(self.error(&kw)),
                }
            }
            _ => return Err(self.error(&["`{`", "`=`"])),
        };
        Ok(PresheafDecl { name, body })
    }

    fn subobject(&mut self) -> Result<SubobjectDecl, Diagnostic> {
        let name = self.ident()?;
        self.keyword("of")?;
        let mut parent = vec![self.ident()?];
        while self.eat(&Tok::Star) {
            parent.push(self.ident()?);
        }
        self.expect(&Tok::LBrace, &["`*`", "`{`"])?;
        let stages = self.comma_list(&Tok::RBrace, |p| {
            let obj = p.name()?;
            p.expect(&Tok::Colon, &["`:`"])?;
            let elems = p.bracketed(|p| match p.peek() {
                Tok::LParen => {
                    p.bump();
                    let v = p.comma_list(&Tok::RParen, |p| p.number())?;
                    p.expect(&Tok::RParen, &["`,`", "`)`"])?;
                    Ok(Element::Tuple(v))
                }
                _ => Ok(Element::Index(p.number()?)),
            })?;
            Ok((obj, elems))
        })?;
        self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
        Ok(SubobjectDecl { name, parent, stages })
    }

    fn map(&mut self) -> Result<MapDecl, Diagnostic> {
        let name = self.ident()?;
        self.expect(&Tok::Colon, &["`:`"])?;
        let source = self.ident()?;
        self.expect(&Tok::Arrow, &["`->`"])?;
        let target = self.ident()?;
        self.expect(&Tok::LBrace, &["`{`"])?;
        let components = self.comma_list(&Tok::RBrace, |p| {
            let obj = p.name()?;
            p.expect(&Tok::Colon, &["`:`"])?;
            Ok((obj, p.numbers()?))
        })?;
        self.expect(&Tok::RBrace, &["`,`", "`}`"])?;
        Ok(MapDecl { name, source, target, components })
    }

    fn family(&mut self) -> Result<FamilyDecl, Diagnostic> {
        match self.peek() {
            Tok::Ident(s) if s == "all" => Ok(FamilyDecl::All(self.bump().span)),
            Tok::LBracket => Ok(FamilyDecl::List(self.bracketed(|p| p.ident())?)),
            _ => Err(self.error(&["all", "`[`"])),
        }
    }

    fn universe(&mut self) -> Result<UniverseDecl, Diagnostic> {
        match self.peek() {
            Tok::Ident(s) if s == "auto" => {
                let span = self.bump().span;
                self.expect(&Tok::LParen, &["`(`"])?;
                let n = self.number()?;
                self.expect(&Tok::RParen, &["`)`"])?;
                Ok(UniverseDecl::Auto(span, n))
            }
            Tok::LBracket => {
                let objects = self.bracketed(|p| p.ident())?;
                let maps = if self.is_keyword("maps") {
                    self.bump();
                    Some(self.bracketed(|p| p.ident())?)
                } else {
                    None
                };
                Ok(UniverseDecl::List { objects, maps })
            }
            _ => Err(self.error(&["auto", "`[`"])),
        }
    }

    fn command(&mut self) -> Result<Command, Diagnostic> {
        let span = self.span();
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(&CommandKind::NAMES)),
        };
        if !CommandKind::NAMES.contains(&word.as_str()) {
            return Err(Diagnostic::expecting(span, format!("unknown command `{word}`"), &CommandKind::NAMES));
        }
        self.bump();
        let kind = match word.as_str() {
            "check-coverage" => CommandKind::CheckCoverage,
            "enumerate-coverages" => CommandKind::EnumerateCoverages,
            "sheafify" => CommandKind::Sheafify(self.ident()?),
            "is-sheaf" => CommandKind::IsSheaf(self.ident()?),
            "closure" => CommandKind::Closure(self.ident()?, self.ident()?),
            "verify-axioms" => CommandKind::VerifyAxioms,
            "verify-sheaf-axioms" => CommandKind::VerifySheafAxioms,
            _ => CommandKind::Eval(self.formula()?),
        };
        Ok(Command { span, kind })
    }

    fn formula(&mut self) -> Result<Formula, Diagnostic> {
        let span = self.span();
        match self.peek() {
            Tok::Ident(s) if s == "true" => {
                self.bump();
                return Ok(Formula { span, kind: FormulaKind::True });
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                return Ok(Formula { span, kind: FormulaKind::False });
            }
            Tok::LParen => {}
            _ => return Err(self.error(&["true", "false", "`(`"])),
        }
        self.bump();
        const HEADS: [&str; 11] = ["and", "or", "implies", "iff", "not", "forall", "exists", "`=`", "in", "mem", "`)`"];
        let head = match self.peek() {
            Tok::Ident(s) => s.clone(),
            Tok::Eq => "=".to_string(),
            _ => return Err(self.error(&HEADS)),
        };
        let kind = match head.as_str() {
            "and" | "or" => {
                self.bump();
                let mut args = Vec::new();
                while self.peek() != &Tok::RParen {
                    args.push(self.formula()?);
                }
                if head == "and" {
                    FormulaKind::And(args)
                } else {
                    FormulaKind::Or(args)
                }
            }
            "implies" | "iff" => {
                self.bump();
                let a = Box::new(self.formula()?);
                let b = Box::new(self.formula()?);
                if head == "implies" {
                    FormulaKind::Implies(a, b)
                } else {
                    FormulaKind::Iff(a, b)
                }
            }
            "not" => {
                self.bump();
                FormulaKind::Not(Box::new(self.formula()?))
            }
            "forall" | "exists" => {
                self.bump();
                self.expect(&Tok::LParen, &["`(`"])?;
                let var = self.ident()?;
                let sort = self.sort()?;
                self.expect(&Tok::RParen, &["`)`"])?;
                let body = Box::new(self.formula()?);
                if head == "forall" {
                    FormulaKind::Forall(var, sort, body)
                } else {
                    FormulaKind::Exists(var, sort, body)
                }
            }
            "=" => {
                self.bump();
                FormulaKind::Eq(self.term()?, self.term()?)
            }
            "in" => {
                self.bump();
                let s = self.ident()?;
                let mut args = Vec::new();
                while self.peek() != &Tok::RParen {
                    args.push(self.term()?);
                }
                FormulaKind::In(s, args)
            }
            "mem" => {
                self.bump();
                FormulaKind::Mem(self.term()?, self.term()?)
            }
            _ => return Err(self.error(&HEADS)),
        };
        self.expect(&Tok::RParen, &["`)`"])?;
        Ok(Formula { span, kind })
    }

    fn term(&mut self) -> Result<Term, Diagnostic> {
        match self.peek() {
            Tok::Ident(_) => Ok(Term::Var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let f = self.ident()?;
                let t = self.term()?;
                self.expect(&Tok::RParen, &["`)`"])?;
                Ok(Term::App(f, Box::new(t)))
            }
            _ => Err(self.error(&["identifier", "`(`"])),
        }
    }

    fn sort(&mut self) -> Result<Sort, Diagnostic> {
        match self.peek() {
            Tok::Number(1) => {
                self.bump();
                Ok(Sort::One)
            }
            Tok::Ident(s) if s == "Omega" => {
                self.bump();
                Ok(Sort::Omega)
            }
            Tok::Ident(_) => Ok(Sort::Named(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let power = match self.peek() {
                    Tok::Ident(s) if s == "P" || s == "PJ" => s == "P",
                    _ => return Err(self.error(&["P", "PJ"])),
                };
                self.bump();
                let x = self.ident()?;
                self.expect(&Tok::RParen, &["`)`"])?;
                Ok(if power { Sort::Power(x) } else { Sort::PowerJ(x) })
            }
            _ => Err(self.error(&["identifier", "`1`", "Omega", "`(`"])),
        }
    }
}

use super::ast::{Constructor, Decl, DeclBody, Expr, Item, SelGroup, TyExpr};
use super::lexer::{lex, Tok, Token};
use super::SurfaceError;

const KEYWORDS: [&str; 3] = ["free", "cotype", "let"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Parser, SurfaceError> {
        let toks = lex(src)?;
        let lines = src.split('\n').count().max(1);
        let last_col = src.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser { toks, pos: 0, eof: (lines, last_col) })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> SurfaceError {
        let (line, col) = self.toks.get(self.pos).map_or(self.eof, |t| (t.line, t.col));
        SurfaceError::syntax(line, col, msg.into())
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(t) => format!("{t:?}"),
        }
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok, what: &str) -> Result<(), SurfaceError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn is_keyword(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, SurfaceError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}, found {}", self.describe()))),
        }
    }

    fn peek_ident(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_))) && !self.is_keyword()
    }

    /// The next token starts exactly where the previous one ended.
    fn adjacent(&self) -> bool {
        self.pos > 0 && self.toks.get(self.pos).is_some_and(|t| t.start == self.toks[self.pos - 1].end)
    }

    // ---- items

    fn item(&mut self) -> Result<Item, SurfaceError> {
        if self.eat_keyword("free") {
            if !self.eat_keyword("type") {
                return Err(self.error(format!("expected `type` after `free`, found {}", self.describe())));
            }
            let (name, params) = self.head()?;
            let mut ctors = vec![self.alt()?];
            while self.eat(&Tok::Bar) {
                ctors.push(self.alt()?);
            }
            Ok(Item::Decl(Decl { name, params, body: DeclBody::Free(ctors) }))
        } else if self.eat_keyword("cotype") {
            let (name, params) = self.head()?;
            let mut alts = vec![self.coalt()?];
            while self.eat(&Tok::Bar) {
                alts.push(self.coalt()?);
            }
            Ok(Item::Decl(Decl { name, params, body: DeclBody::Co(alts) }))
        } else if self.eat_keyword("let") {
            let name = self.ident("a definition name")?;
            let mut params = Vec::new();
            while self.peek_ident() {
                params.push(self.ident("a parameter")?);
            }
            self.expect(&Tok::Eq, "`=`")?;
            let body = self.expr()?;
            Ok(Item::Let { name, params, body })
        } else {
            Err(self.error(format!("expected `free type`, `cotype` or `let`, found {}", self.describe())))
        }
    }

    fn head(&mut self) -> Result<(String, Vec<String>), SurfaceError> {
        let name = self.ident("a type name")?;
        let mut params = Vec::new();
        while self.peek_ident() {
            params.push(self.ident("a type parameter")?);
        }
        self.expect(&Tok::Defines, "`::=`")?;
        Ok((name, params))
    }

    fn alt(&mut self) -> Result<Constructor, SurfaceError> {
        let name = self.ident("a constructor name")?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            args.push(self.ty()?);
            while self.eat(&Tok::Semi) {
                args.push(self.ty()?);
            }
            self.expect(&Tok::RParen, "`)` closing the argument list")?;
        } else {
            while self.peek_ident() || self.peek() == Some(&Tok::LParen) {
                args.push(self.ty_atom()?);
            }
        }
        Ok(Constructor { name, args })
    }

    fn coalt(&mut self) -> Result<Vec<SelGroup>, SurfaceError> {
        self.expect(&Tok::LParen, "`(` opening a selector alternative")?;
        let mut groups = vec![self.sel_group()?];
        while self.eat(&Tok::Semi) {
            groups.push(self.sel_group()?);
        }
        self.expect(&Tok::RParen, "`)` closing the selector alternative")?;
        Ok(groups)
    }

    fn sel_group(&mut self) -> Result<SelGroup, SurfaceError> {
        let mut names = vec![self.ident("a selector name")?];
        while self.eat(&Tok::Comma) {
            names.push(self.ident("a selector name")?);
        }
        self.expect(&Tok::Colon, "`:`")?;
        let partial = self.eat(&Tok::Question);
        let ty = self.ty()?;
        Ok(SelGroup { names, partial, ty })
    }

    // ---- types

    pub(crate) fn ty(&mut self) -> Result<TyExpr, SurfaceError> {
        let a = self.ty_sum()?;
        if self.eat(&Tok::Arrow) {
            Ok(TyExpr::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn ty_sum(&mut self) -> Result<TyExpr, SurfaceError> {
        let a = self.ty_prod()?;
        if self.eat(&Tok::Plus) {
            Ok(TyExpr::sum(a, self.ty_sum()?))
        } else {
            Ok(a)
        }
    }

    fn ty_prod(&mut self) -> Result<TyExpr, SurfaceError> {
        let a = self.ty_app()?;
        if self.eat(&Tok::Times) {
            Ok(TyExpr::prod(a, self.ty_prod()?))
        } else {
            Ok(a)
        }
    }

    fn ty_app(&mut self) -> Result<TyExpr, SurfaceError> {
        if !self.peek_ident() {
            return self.ty_atom();
        }
        let name = self.ident("a type")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LBrack) && self.adjacent() {
            self.pos += 1;
            args.push(self.ty()?);
            while self.eat(&Tok::Comma) {
                args.push(self.ty()?);
            }
            self.expect(&Tok::RBrack, "`]`")?;
        } else {
            while self.peek_ident() || self.peek() == Some(&Tok::LParen) {
                args.push(self.ty_atom()?);
            }
        }
        Ok(TyExpr::app(&name, args))
    }

    fn ty_atom(&mut self) -> Result<TyExpr, SurfaceError> {
        if self.eat(&Tok::LParen) {
            let t = self.ty()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(t);
        }
        let name = self.ident("a type")?;
        if self.peek() == Some(&Tok::LBrack) && self.adjacent() {
            self.pos += 1;
            let mut args = vec![self.ty()?];
            while self.eat(&Tok::Comma) {
                args.push(self.ty()?);
            }
            self.expect(&Tok::RBrack, "`]`")?;
            return Ok(TyExpr::app(&name, args));
        }
        Ok(TyExpr::Name(name))
    }

    // ---- expressions

    pub(crate) fn expr(&mut self) -> Result<Expr, SurfaceError> {
        if self.eat(&Tok::Lambda) {
            let mut xs = vec![self.ident("a bound variable")?];
            while self.peek_ident() {
                xs.push(self.ident("a bound variable")?);
            }
            if !(self.eat(&Tok::Arrow) || self.eat(&Tok::Dot)) {
                return Err(self.error("expected `->` or `.` after the bound variables"));
            }
            let body = self.expr()?;
            return Ok(Expr::Lam(xs, Box::new(body)));
        }
        let mut e = self.aexpr()?;
        loop {
            if self.starts_aexpr() {
                let a = self.aexpr()?;
                e = Expr::app(e, a);
            } else if self.peek() == Some(&Tok::Lambda) {
                let a = self.expr()?;
                return Ok(Expr::app(e, a));
            } else {
                return Ok(e);
            }
        }
    }

    fn starts_aexpr(&self) -> bool {
        self.peek_ident() || matches!(self.peek(), Some(Tok::LParen | Tok::LBrack))
    }

    fn aexpr(&mut self) -> Result<Expr, SurfaceError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                if self.eat(&Tok::RParen) {
                    return Ok(Expr::Unit);
                }
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(&Tok::RParen, "`)`")?;
                let last = items.pop().expect("nonempty");
                Ok(items.into_iter().rev().fold(last, |acc, x| Expr::Pair(Box::new(x), Box::new(acc))))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat(&Tok::RBrack) {
                    items.push(self.expr()?);
                    while self.eat(&Tok::Comma) {
                        items.push(self.expr()?);
                    }
                    self.expect(&Tok::RBrack, "`]`")?;
                }
                Ok(Expr::List(items))
            }
            _ => {
                let name = self.ident("an expression")?;
                if name.chars().all(|c| c.is_ascii_digit()) {
                    let n = name.parse().map_err(|_| self.error(format!("numeral {name} is too large")))?;
                    return Ok(Expr::Num(n));
                }
                let mut targs = Vec::new();
                if self.peek() == Some(&Tok::LBrack) && self.adjacent() {
                    self.pos += 1;
                    targs.push(self.ty()?);
                    while self.eat(&Tok::Comma) {
                        targs.push(self.ty()?);
                    }
                    self.expect(&Tok::RBrack, "`]`")?;
                }
                Ok(Expr::Var(name, targs))
            }
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SurfaceError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe())))
        }
    }

    pub(crate) fn peek2_is(&self, t: &Tok) -> bool {
        self.peek_at(1) == Some(t)
    }

    pub(crate) fn save(&self) -> usize {
        self.pos
    }

    pub(crate) fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }
}

/// All items of a declaration file, in order.
pub fn parse_items(src: &str) -> Result<Vec<Item>, SurfaceError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while !p.at_end() {
        items.push(p.item()?);
    }
    Ok(items)
}

/// The type declarations of a file; `let` definitions are skipped.
pub fn parse(src: &str) -> Result<Vec<Decl>, SurfaceError> {
    Ok(parse_items(src)?
        .into_iter()
        .filter_map(|i| match i {
            Item::Decl(d) => Some(d),
            Item::Let { .. } => None,
        })
        .collect())
}

pub fn parse_expr(src: &str) -> Result<Expr, SurfaceError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_ty_expr(src: &str) -> Result<TyExpr, SurfaceError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Pretty-prints items one per line.
pub fn pretty(items: &[Item]) -> String {
    items.iter().map(|i| format!("{i}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_declaration() {
        let ds = parse("free type List a ::= nil | cons(a; List a)").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].params, vec!["a".to_string()]);
        let DeclBody::Free(cs) = &ds[0].body else { panic!() };
        assert_eq!(cs[0], Constructor { name: "nil".into(), args: vec![] });
        assert_eq!(cs[1].args, vec![TyExpr::name("a"), TyExpr::app("List", vec![TyExpr::name("a")])]);
    }

    #[test]
    fn juxtaposed_arguments() {
        let ds = parse("free type Nat ::= 0 | suc Nat").unwrap();
        let DeclBody::Free(cs) = &ds[0].body else { panic!() };
        assert_eq!(cs[0].name, "0");
        assert_eq!(cs[1].args, vec![TyExpr::name("Nat")]);
    }

    #[test]
    fn proc_declaration() {
        let ds = parse("cotype Proc ::= (out:? a; next:? Proc) | (spawnl, spawnr: Proc)").unwrap();
        let DeclBody::Co(alts) = &ds[0].body else { panic!() };
        assert_eq!(alts.len(), 2);
        assert!(alts[0][0].partial);
        assert_eq!(alts[1][0].names, vec!["spawnl".to_string(), "spawnr".to_string()]);
        assert!(!alts[1][0].partial);
    }

    #[test]
    fn empty_source() {
        assert_eq!(parse("").unwrap(), vec![]);
        assert_eq!(parse("  -- nothing\n").unwrap(), vec![]);
    }

    #[test]
    fn type_precedence() {
        let t = parse_ty_expr("a × b + c → d → e").unwrap();
        assert_eq!(t.to_string(), "a × b + c → d → e");
        let TyExpr::Arrow(l, _) = t else { panic!() };
        assert!(matches!(*l, TyExpr::Sum(..)));
        assert_eq!(parse_ty_expr("List[Nat]").unwrap(), parse_ty_expr("List Nat").unwrap());
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("free type L ::= a |\n  | b").unwrap_err();
        assert_eq!(err, SurfaceError::syntax(2, 3, "expected a constructor name, found Bar".into()));
    }

    #[test]
    fn expressions() {
        let e = parse_expr("fold 0 plus [1,2,3]").unwrap();
        let (head, args) = e.spine();
        assert_eq!(head, &Expr::var("fold"));
        assert_eq!(args.len(), 3);
        assert_eq!(args[2], &Expr::List(vec![Expr::Num(1), Expr::Num(2), Expr::Num(3)]));
        let e = parse_expr("fold[List] f g").unwrap();
        assert_eq!(e.spine().0, &Expr::Var("fold".into(), vec![TyExpr::name("List")]));
        let e = parse_expr("map f [1]").unwrap();
        assert_eq!(e.spine().1.len(), 2);
    }

    #[test]
    fn lets_stop_at_keywords() {
        let items = parse_items("let two = succ (succ 0)\nfree type U ::= u").unwrap();
        assert_eq!(items.len(), 2);
    }
}

use std::fmt;

/// Type expressions of the declaration language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TyExpr {
    /// A type variable, a base type or a nullary type constructor.
    Name(String),
    /// `C a b` or `C[a, b]`.
    App(String, Vec<TyExpr>),
    Prod(Box<TyExpr>, Box<TyExpr>),
    Sum(Box<TyExpr>, Box<TyExpr>),
    Arrow(Box<TyExpr>, Box<TyExpr>),
}

impl TyExpr {
    pub fn name(n: &str) -> TyExpr {
        TyExpr::Name(n.to_string())
    }

    pub fn app(n: &str, args: Vec<TyExpr>) -> TyExpr {
        if args.is_empty() {
            TyExpr::name(n)
        } else {
            TyExpr::App(n.to_string(), args)
        }
    }

    pub fn arrow(a: TyExpr, b: TyExpr) -> TyExpr {
        TyExpr::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: TyExpr, b: TyExpr) -> TyExpr {
        TyExpr::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: TyExpr, b: TyExpr) -> TyExpr {
        TyExpr::Sum(Box::new(a), Box::new(b))
    }

    /// The head constructor name, for `Name` and `App`.
    pub fn head(&self) -> Option<&str> {
        match self {
            TyExpr::Name(n) | TyExpr::App(n, _) => Some(n),
            _ => None,
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            TyExpr::Name(n) => n == name,
            TyExpr::App(n, args) => n == name || args.iter().any(|a| a.mentions(name)),
            TyExpr::Prod(a, b) | TyExpr::Sum(a, b) | TyExpr::Arrow(a, b) => a.mentions(name) || b.mentions(name),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            TyExpr::Arrow(..) => 0,
            TyExpr::Sum(..) => 1,
            TyExpr::Prod(..) => 2,
            TyExpr::App(..) => 3,
            TyExpr::Name(_) => 4,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for TyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TyExpr::Name(n) => write!(f, "{n}"),
            TyExpr::App(n, args) => {
                write!(f, "{n}")?;
                for a in args {
                    write!(f, " ")?;
                    a.fmt_at(4, f)?;
                }
                Ok(())
            }
            TyExpr::Prod(a, b) => {
                a.fmt_at(3, f)?;
                write!(f, " × ")?;
                b.fmt_at(2, f)
            }
            TyExpr::Sum(a, b) => {
                a.fmt_at(2, f)?;
                write!(f, " + ")?;
                b.fmt_at(1, f)
            }
            TyExpr::Arrow(a, b) => {
                a.fmt_at(1, f)?;
                write!(f, " → ")?;
                b.fmt_at(0, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub args: Vec<TyExpr>,
}

/// Selectors sharing one result type, as in `(spawnl, spawnr: Proc)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelGroup {
    pub names: Vec<String>,
    pub partial: bool,
    pub ty: TyExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclBody {
    Free(Vec<Constructor>),
    Co(Vec<Vec<SelGroup>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub params: Vec<String>,
    pub body: DeclBody,
}

impl Decl {
    pub fn is_free(&self) -> bool {
        matches!(self.body, DeclBody::Free(_))
    }

    /// The declared pattern `C a₁ ... aₙ`.
    pub fn pattern(&self) -> TyExpr {
        TyExpr::app(&self.name, self.params.iter().map(|p| TyExpr::name(p)).collect())
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = if self.is_free() { "free type" } else { "cotype" };
        write!(f, "{kw} {}", self.name)?;
        for p in &self.params {
            write!(f, " {p}")?;
        }
        write!(f, " ::=")?;
        match &self.body {
            DeclBody::Free(ctors) => {
                for (i, c) in ctors.iter().enumerate() {
                    write!(f, "{} {}", if i > 0 { " |" } else { "" }, c.name)?;
                    if !c.args.is_empty() {
                        let args: Vec<String> = c.args.iter().map(|a| a.to_string()).collect();
                        write!(f, "({})", args.join("; "))?;
                    }
                }
            }
            DeclBody::Co(alts) => {
                for (i, groups) in alts.iter().enumerate() {
                    write!(f, "{} (", if i > 0 { " |" } else { "" })?;
                    for (j, g) in groups.iter().enumerate() {
                        if j > 0 {
                            write!(f, "; ")?;
                        }
                        write!(f, "{}:{} {}", g.names.join(", "), if g.partial { "?" } else { "" }, g.ty)?;
                    }
                    write!(f, ")")?;
                }
            }
        }
        Ok(())
    }
}

/// Expressions evaluated against an elaborated environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Num(u64),
    Unit,
    /// A name, optionally with bracketed type arguments as in `fold[List]`.
    Var(String, Vec<TyExpr>),
    App(Box<Expr>, Box<Expr>),
    Lam(Vec<String>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    List(Vec<Expr>),
}

impl Expr {
    pub fn var(n: &str) -> Expr {
        Expr::Var(n.to_string(), vec![])
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Expr, Vec<&Expr>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Expr::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Unit => write!(f, "()"),
            Expr::Var(n, targs) => {
                write!(f, "{n}")?;
                if !targs.is_empty() {
                    let ts: Vec<String> = targs.iter().map(|t| t.to_string()).collect();
                    write!(f, "[{}]", ts.join(", "))?;
                }
                Ok(())
            }
            Expr::App(a, b) => {
                match **a {
                    Expr::Lam(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match **b {
                    Expr::App(..) | Expr::Lam(..) => write!(f, " ({b})"),
                    _ => write!(f, " {b}"),
                }
            }
            Expr::Lam(xs, body) => write!(f, "\\{} -> {body}", xs.join(" ")),
            Expr::Pair(a, b) => write!(f, "({a}, {b})"),
            Expr::List(xs) => {
                let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", items.join(", "))
            }
        }
    }
}

/// A top-level item of a declaration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Decl(Decl),
    Let { name: String, params: Vec<String>, body: Expr },
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Decl(d) => write!(f, "{d}"),
            Item::Let { name, params, body } => {
                write!(f, "let {name}")?;
                for p in params {
                    write!(f, " {p}")?;
                }
                write!(f, " = {body}")
            }
        }
    }
}

//! Reading back the printed forms of kernel types, signature functors and
//! their normal forms.

use crate::functors::{ExtPolyNF, PolyNF, SigFunctor};
use crate::kernel::Ty;

use super::lexer::Tok;
use super::parser::Parser;
use super::SurfaceError;

/// The name of an instantiated declared type, e.g. `List[Nat]`.
pub fn instance_name(name: &str, args: &[Ty]) -> String {
    if args.is_empty() {
        return name.to_string();
    }
    let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    format!("{name}[{}]", args.join(", "))
}

fn kty(p: &mut Parser) -> Result<Ty, SurfaceError> {
    let a = ksum(p)?;
    if p.eat(&Tok::Arrow) {
        Ok(Ty::total(a, kty(p)?))
    } else if p.eat(&Tok::PArrow) {
        Ok(Ty::partial(a, kty(p)?))
    } else {
        Ok(a)
    }
}

fn ksum(p: &mut Parser) -> Result<Ty, SurfaceError> {
    let a = kprod(p)?;
    if p.eat(&Tok::Plus) {
        Ok(Ty::sum(a, ksum(p)?))
    } else {
        Ok(a)
    }
}

fn kprod(p: &mut Parser) -> Result<Ty, SurfaceError> {
    let a = katom(p)?;
    if p.eat(&Tok::Times) {
        Ok(Ty::prod(a, kprod(p)?))
    } else {
        Ok(a)
    }
}

fn katom(p: &mut Parser) -> Result<Ty, SurfaceError> {
    if p.eat(&Tok::LParen) {
        let t = kty(p)?;
        p.expect(&Tok::RParen, "`)`")?;
        return Ok(t);
    }
    let name = p.ident("a type")?;
    Ok(match name.as_str() {
        "Zero" => Ty::Zero,
        "Unit" => Ty::Unit,
        "Nat" => Ty::Nat,
        "Bool" => Ty::Bool,
        "Logical" => Ty::Logical,
        _ => {
            if p.eat(&Tok::LBrack) {
                let mut args = vec![kty(p)?];
                while p.eat(&Tok::Comma) {
                    args.push(kty(p)?);
                }
                p.expect(&Tok::RBrack, "`]`")?;
                Ty::named(instance_name(&name, &args))
            } else {
                Ty::named(name)
            }
        }
    })
}

fn fsum(p: &mut Parser) -> Result<SigFunctor, SurfaceError> {
    let a = fprod(p)?;
    if p.eat(&Tok::Plus) {
        Ok(SigFunctor::sum(a, fsum(p)?))
    } else {
        Ok(a)
    }
}

fn fprod(p: &mut Parser) -> Result<SigFunctor, SurfaceError> {
    let a = fpow(p)?;
    if p.eat(&Tok::Times) {
        Ok(SigFunctor::prod(a, fprod(p)?))
    } else {
        Ok(a)
    }
}

fn fpow(p: &mut Parser) -> Result<SigFunctor, SurfaceError> {
    let a = fatom(p)?;
    if !p.eat(&Tok::Caret) {
        return Ok(a);
    }
    let k = p.ident("an exponent")?;
    let k: usize = k.parse().map_err(|_| p.error(format!("exponent {k} is not a numeral")))?;
    Ok(SigFunctor::prod_all(vec![a; k]))
}

fn fatom(p: &mut Parser) -> Result<SigFunctor, SurfaceError> {
    if p.eat(&Tok::LBrack) {
        let t = kty(p)?;
        p.expect(&Tok::RBrack, "`]`")?;
        return Ok(SigFunctor::Const(t));
    }
    if p.eat(&Tok::LParen) {
        let mark = p.save();
        if let Ok(b) = exp_domain(p) {
            if p.eat(&Tok::Arrow) && p.peek() == Some(&Tok::Ident("X".into())) && p.peek2_is(&Tok::RParen) {
                p.ident("X")?;
                p.expect(&Tok::RParen, "`)`")?;
                return Ok(SigFunctor::exp(b));
            }
        }
        p.restore(mark);
        let f = fsum(p)?;
        p.expect(&Tok::RParen, "`)`")?;
        return Ok(f);
    }
    if p.peek() == Some(&Tok::Ident("X".into())) {
        p.ident("X")?;
        return Ok(SigFunctor::Id);
    }
    Ok(SigFunctor::Const(katom(p)?))
}

fn exp_domain(p: &mut Parser) -> Result<Ty, SurfaceError> {
    if p.eat(&Tok::LBrack) {
        let t = kty(p)?;
        p.expect(&Tok::RBrack, "`]`")?;
        Ok(t)
    } else {
        katom(p)
    }
}

/// Parses a kernel type in its printed form.
pub fn parse_kernel_ty(src: &str) -> Result<Ty, SurfaceError> {
    let mut p = Parser::new(src)?;
    let t = kty(&mut p)?;
    p.finish()?;
    Ok(t)
}

/// Parses a signature functor in its printed form; normal-form displays
/// such as `[Unit] + [a]×X^2` are accepted too.
pub fn parse_functor(src: &str) -> Result<SigFunctor, SurfaceError> {
    let mut p = Parser::new(src)?;
    let f = fsum(&mut p)?;
    p.finish()?;
    Ok(f)
}

pub fn parse_poly_nf(src: &str) -> Result<PolyNF, SurfaceError> {
    Ok(crate::functors::to_poly_nf(&parse_functor(src)?)?)
}

pub fn parse_extpoly_nf(src: &str) -> Result<ExtPolyNF, SurfaceError> {
    Ok(crate::functors::to_extpoly_nf(&parse_functor(src)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_functors_read_back() {
        let fs = [
            SigFunctor::sum(SigFunctor::Const(Ty::Unit), SigFunctor::prod(SigFunctor::Const(Ty::named("a")), SigFunctor::Id)),
            SigFunctor::prod(SigFunctor::sum(SigFunctor::Id, SigFunctor::Id), SigFunctor::exp(Ty::Bool)),
            SigFunctor::Const(Ty::sum(Ty::Unit, Ty::prod(Ty::Nat, Ty::Nat))),
            SigFunctor::exp(Ty::sum(Ty::Unit, Ty::Unit)),
            SigFunctor::Const(Ty::named("List[Nat]")),
        ];
        for f in fs {
            assert_eq!(parse_functor(&f.to_string()).unwrap(), f, "{f}");
        }
    }

    #[test]
    fn normal_forms_read_back() {
        let nf = PolyNF { summands: vec![(Ty::Unit, 0), (Ty::named("a"), 1), (Ty::Bool, 3)] };
        assert_eq!(parse_poly_nf(&nf.to_string()).unwrap(), nf);
        let ext = ExtPolyNF { summands: vec![(Ty::named("a"), Ty::Unit), (Ty::Unit, Ty::Bool)] };
        assert_eq!(parse_extpoly_nf(&ext.to_string()).unwrap(), ext);
    }
}

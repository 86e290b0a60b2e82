use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

const MODIFIERS: &[&str] = &["public", "private", "protected", "static", "final", "abstract"];

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Pos {
        self.toks[self.pos].pos
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError {
            file: self.file.to_owned(),
            line: t.pos.line,
            column: t.pos.column,
            expected: format!("{expected}, found {}", t.tok.describe()),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(q) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.fail(&format!("`{p}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let pos = self.here();
                self.bump();
                Ok(Ident { name, pos })
            }
            _ => self.fail("an identifier"),
        }
    }

    fn qualified_name(&mut self) -> PResult<QualifiedName> {
        let mut parts = vec![self.ident()?];
        while self.is_punct(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            parts.push(self.ident()?);
        }
        Ok(QualifiedName { parts })
    }

    fn unit(&mut self, path: &str) -> PResult<CompilationUnit> {
        let mut unit = CompilationUnit {
            path: path.to_owned(),
            package: None,
            imports: Vec::new(),
            types: Vec::new(),
        };
        if self.eat_kw("package") {
            unit.package = Some(self.qualified_name()?);
            self.expect_punct(";")?;
        }
        while self.eat_kw("import") {
            if self.is_kw("static") {
                return self.fail("a single-type import (static imports are not supported)");
            }
            unit.imports.push(self.qualified_name()?);
            if self.is_punct(".") {
                self.bump();
                return self.fail("an identifier (wildcard imports are not supported)");
            }
            self.expect_punct(";")?;
        }
        while *self.peek() != Tok::Eof {
            if self.eat_punct(";") {
                continue;
            }
            unit.types.push(self.type_decl()?);
        }
        Ok(unit)
    }

    fn modifiers(&mut self) -> PResult<()> {
        loop {
            if self.is_punct("@") {
                return self.fail("a declaration (annotations are not supported)");
            }
            match self.peek() {
                Tok::Keyword(k) if MODIFIERS.contains(k) => {
                    self.bump();
                }
                _ => return Ok(()),
            }
        }
    }

    fn type_list(&mut self) -> PResult<Vec<TypeRef>> {
        let mut out = vec![self.type_ref()?];
        while self.eat_punct(",") {
            out.push(self.type_ref()?);
        }
        Ok(out)
    }

    fn type_decl(&mut self) -> PResult<TypeDecl> {
        self.modifiers()?;
        let kind = if self.eat_kw("class") {
            TypeKind::Class
        } else if self.eat_kw("interface") {
            TypeKind::Interface
        } else {
            return self.fail("`class` or `interface`");
        };
        let name = self.ident()?;
        if self.is_punct("<") {
            return self.fail("`{` (generic type declarations are not supported)");
        }
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_kw("extends") {
            extends = match kind {
                TypeKind::Class => vec![self.type_ref()?],
                TypeKind::Interface => self.type_list()?,
            };
        }
        if kind == TypeKind::Class && self.eat_kw("implements") {
            implements = self.type_list()?;
        }
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.eat_punct("}") {
            if self.eat_punct(";") {
                continue;
            }
            members.push(self.member(&name.name)?);
        }
        Ok(TypeDecl {
            name,
            kind,
            extends,
            implements,
            members,
        })
    }

    fn member(&mut self, type_name: &str) -> PResult<Member> {
        self.modifiers()?;
        if self.is_kw("class") || self.is_kw("interface") {
            return self.fail("a member (nested types are not supported)");
        }
        if matches!(self.peek(), Tok::Ident(n) if n == type_name) && self.peek_at(1) == &Tok::Punct("(") {
            let name = self.ident()?;
            return Ok(Member::Constructor(self.method_rest(name, None)?));
        }
        if self.eat_kw("void") {
            let name = self.ident()?;
            return Ok(Member::Method(self.method_rest(name, None)?));
        }
        let ty = self.type_ref()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            return Ok(Member::Method(self.method_rest(name, Some(ty))?));
        }
        let init = if self.eat_punct("=") {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        Ok(Member::Field(FieldDecl { ty, name, init }))
    }

    fn method_rest(&mut self, name: Ident, ret: Option<TypeRef>) -> PResult<MethodDecl> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                self.eat_kw("final");
                let ty = self.type_ref()?;
                let name = self.ident()?;
                params.push(Param { ty, name });
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        let throws = if self.eat_kw("throws") {
            self.type_list()?
        } else {
            Vec::new()
        };
        let body = if self.eat_punct(";") {
            None
        } else {
            Some(self.block()?)
        };
        Ok(MethodDecl {
            name,
            ret,
            params,
            throws,
            body,
        })
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let name = self.qualified_name()?;
        let mut args = Vec::new();
        if self.eat_punct("<") && !self.eat_punct(">") {
            args = self.type_list()?;
            self.expect_punct(">")?;
        }
        let mut dims = 0;
        while self.is_punct("[") && self.peek_at(1) == &Tok::Punct("]") {
            self.bump();
            self.bump();
            dims += 1;
        }
        Ok(TypeRef { name, args, dims })
    }

    /// Tries `p`, rewinding on failure.
    fn attempt<T>(&mut self, p: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let save = self.pos;
        match p(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.fail("`}`");
            }
            stmts.push(self.stmt()?);
        }
        Ok(Block { stmts })
    }

    fn local_head(&mut self) -> PResult<(TypeRef, Ident)> {
        self.eat_kw("final");
        let ty = self.type_ref()?;
        let name = self.ident()?;
        Ok((ty, name))
    }

    /// `T x [= e]` without the trailing `;`.
    fn local_decl(&mut self) -> Option<(TypeRef, Ident)> {
        self.attempt(|p| {
            let head = p.local_head()?;
            if p.is_punct("=") || p.is_punct(";") {
                Ok(head)
            } else {
                p.fail("`=` or `;`")
            }
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_punct("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if self.eat_punct(";") {
            return Ok(Stmt::Empty);
        }
        if self.eat_kw("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = Box::new(self.stmt()?);
            let otherwise = if self.eat_kw("else") {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                otherwise,
            });
        }
        if self.eat_kw("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::While { cond, body });
        }
        if self.eat_kw("for") {
            return self.for_rest();
        }
        if self.eat_kw("return") {
            let value = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            return Ok(Stmt::Return(value));
        }
        if self.eat_kw("throw") {
            let e = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::Throw(e));
        }
        if self.eat_kw("break") {
            self.expect_punct(";")?;
            return Ok(Stmt::Break);
        }
        if self.eat_kw("continue") {
            self.expect_punct(";")?;
            return Ok(Stmt::Continue);
        }
        let s = self.simple_stmt()?;
        self.expect_punct(";")?;
        Ok(s)
    }

    /// A local declaration or an expression statement, without `;`.
    fn simple_stmt(&mut self) -> PResult<Stmt> {
        if let Some((ty, name)) = self.local_decl() {
            let init = if self.eat_punct("=") {
                Some(self.expr()?)
            } else {
                None
            };
            return Ok(Stmt::Local { ty, name, init });
        }
        if self.is_kw("final") {
            return self.fail("a local variable declaration");
        }
        Ok(Stmt::Expr(self.expr()?))
    }

    fn for_rest(&mut self) -> PResult<Stmt> {
        self.expect_punct("(")?;
        let each = self.attempt(|p| {
            let head = p.local_head()?;
            if p.eat_punct(":") {
                Ok(head)
            } else {
                p.fail("`:`")
            }
        });
        if let Some((ty, name)) = each {
            let iter = self.expr()?;
            self.expect_punct(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::ForEach {
                ty,
                name,
                iter,
                body,
            });
        }
        let init = if self.is_punct(";") {
            None
        } else {
            Some(Box::new(self.simple_stmt()?))
        };
        self.expect_punct(";")?;
        let cond = if self.is_punct(";") {
            None
        } else {
            Some(self.expr()?)
        };
        self.expect_punct(";")?;
        let mut update = Vec::new();
        if !self.is_punct(")") {
            update.push(self.expr()?);
            while self.eat_punct(",") {
                update.push(self.expr()?);
            }
        }
        self.expect_punct(")")?;
        let body = Box::new(self.stmt()?);
        Ok(Stmt::For {
            init,
            cond,
            update,
            body,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        for op in ["=", "+=", "-=", "*=", "/=", "%="] {
            if self.is_punct(op) {
                if !matches!(lhs, Expr::Name(_) | Expr::Field { .. } | Expr::Index { .. }) {
                    return self.fail("an operator (left side is not assignable)");
                }
                self.bump();
                let rhs = self.expr()?;
                return Ok(Expr::Assign {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                });
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.eat_punct("?") {
            let then = self.expr()?;
            self.expect_punct(":")?;
            let otherwise = self.conditional()?;
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        Ok(cond)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["|"],
            &["^"],
            &["&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            if LEVELS[level].contains(&"<") && self.eat_kw("instanceof") {
                let ty = self.type_ref()?;
                lhs = Expr::InstanceOf {
                    expr: Box::new(lhs),
                    ty,
                };
                continue;
            }
            let op = match self.peek() {
                Tok::Punct(p) if LEVELS[level].contains(p) => *p,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        for op in ["!", "-", "+", "~", "++", "--"] {
            if self.eat_punct(op) {
                let expr = self.unary()?;
                return Ok(Expr::Unary {
                    op,
                    expr: Box::new(expr),
                });
            }
        }
        if self.is_punct("(") {
            if let Some(ty) = self.attempt(|p| {
                p.bump();
                let ty = p.type_ref()?;
                p.expect_punct(")")?;
                if p.starts_cast_operand(&ty) {
                    Ok(ty)
                } else {
                    p.fail("a cast operand")
                }
            }) {
                let expr = self.unary()?;
                return Ok(Expr::Cast {
                    ty,
                    expr: Box::new(expr),
                });
            }
        }
        self.postfix()
    }

    fn starts_cast_operand(&self, ty: &TypeRef) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Str(_) | Tok::Char(_) | Tok::Int(_) | Tok::Float(_) => true,
            Tok::Keyword(k) => matches!(*k, "this" | "new" | "null" | "true" | "false" | "super"),
            Tok::Punct("(") | Tok::Punct("!") | Tok::Punct("~") => true,
            // `(int) -x` is a cast, `(a) - x` is not.
            Tok::Punct("-") | Tok::Punct("+") => {
                ty.dims == 0 && ty.name.parts.len() == 1 && super::is_primitive(&ty.name.parts[0].name)
            }
            _ => false,
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let name = self.ident()?;
                if self.is_punct("(") {
                    let args = self.args()?;
                    e = Expr::Call {
                        target: Some(Box::new(e)),
                        name,
                        args,
                    };
                } else {
                    e = Expr::Field {
                        target: Box::new(e),
                        name,
                    };
                }
            } else if self.eat_punct("[") {
                let index = self.expr()?;
                self.expect_punct("]")?;
                e = Expr::Index {
                    target: Box::new(e),
                    index: Box::new(index),
                };
            } else if self.is_punct("++") || self.is_punct("--") {
                let op = if self.is_punct("++") { "++" } else { "--" };
                self.bump();
                e = Expr::Unary {
                    op,
                    expr: Box::new(e),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.here();
        let tok = self.peek().clone();
        match tok {
            Tok::Int(_) => {
                self.bump();
                Ok(Expr::Literal(Literal::Int))
            }
            Tok::Float(_) => {
                self.bump();
                Ok(Expr::Literal(Literal::Float))
            }
            Tok::Str(_) => {
                self.bump();
                Ok(Expr::Literal(Literal::Str))
            }
            Tok::Char(_) => {
                self.bump();
                Ok(Expr::Literal(Literal::Char))
            }
            Tok::Keyword("true") | Tok::Keyword("false") => {
                self.bump();
                Ok(Expr::Literal(Literal::Bool))
            }
            Tok::Keyword("null") => {
                self.bump();
                Ok(Expr::Literal(Literal::Null))
            }
            Tok::Keyword("this") => {
                self.bump();
                Ok(Expr::This(pos))
            }
            Tok::Keyword("new") => {
                self.bump();
                let ty = self.type_ref()?;
                if self.is_punct("[") {
                    let mut dims = Vec::new();
                    let mut extra = 0;
                    while self.eat_punct("[") {
                        if self.eat_punct("]") {
                            extra += 1;
                            continue;
                        }
                        if extra > 0 {
                            return self.fail("`]`");
                        }
                        dims.push(self.expr()?);
                        self.expect_punct("]")?;
                    }
                    if dims.is_empty() {
                        return self.fail("an array dimension (array initializers are not supported)");
                    }
                    let ty = TypeRef {
                        dims: ty.dims + dims.len() + extra,
                        ..ty
                    };
                    return Ok(Expr::NewArray { ty, dims });
                }
                if ty.dims > 0 {
                    return self.fail("an array dimension");
                }
                let args = self.args()?;
                if self.is_punct("{") {
                    return self.fail("`;` (anonymous classes are not supported)");
                }
                Ok(Expr::New { ty, args })
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.is_punct("(") {
                    let args = self.args()?;
                    Ok(Expr::Call {
                        target: None,
                        name,
                        args,
                    })
                } else {
                    Ok(Expr::Name(name))
                }
            }
            _ => self.fail("an expression"),
        }
    }
}

/// Parses one compilation unit.
pub fn parse_unit(path: &str, text: &str) -> Result<CompilationUnit, ParseError> {
    let toks = tokenize(path, text)?;
    let mut p = Parser {
        file: path,
        toks,
        pos: 0,
    };
    p.unit(path)
}

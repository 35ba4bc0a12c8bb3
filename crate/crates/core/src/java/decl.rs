//! Declaration-level parser: packages, imports, types and their members.
//! Method bodies and initializers are kept as token spans for the body
//! analyzer.

use super::lexer::{is_primitive, Token, TokenKind};
use crate::facts::EntityKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    /// Dotted name as written, or a primitive / `void`.
    pub name: String,
    pub args: Vec<TypeRef>,
    pub dims: u32,
}

impl TypeRef {
    pub fn simple(name: &str) -> Self {
        TypeRef {
            name: name.to_string(),
            args: Vec::new(),
            dims: 0,
        }
    }

    pub fn is_void(&self) -> bool {
        self.name == "void" && self.dims == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct Import {
    pub path: String,
    pub is_static: bool,
    pub wildcard: bool,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub line: u32,
    pub init: Option<Span>,
}

#[derive(Debug, Clone)]
pub struct MethodDecl {
    pub name: String,
    pub is_ctor: bool,
    pub ret: Option<TypeRef>,
    pub type_params: Vec<String>,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    /// Tokens strictly inside the body braces.
    pub body: Option<Span>,
    pub line: u32,
}

#[derive(Debug, Clone)]
pub struct EnumConstantDecl {
    pub name: String,
    pub line: u32,
    pub args: Option<Span>,
    pub body: Option<Span>,
}

#[derive(Debug, Clone)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Type(TypeDecl),
    Initializer(Span),
    EnumConstant(EnumConstantDecl),
}

#[derive(Debug, Clone)]
pub struct TypeDecl {
    pub name: String,
    pub kind: EntityKind,
    pub line: u32,
    pub type_params: Vec<String>,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclWarning {
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct CompilationUnit {
    pub package: Option<(String, u32)>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDecl>,
    pub warnings: Vec<DeclWarning>,
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

pub struct Parser<'t> {
    toks: &'t [Token],
    matching: &'t [Option<usize>],
    pos: usize,
    end: usize,
    record_components: Option<Vec<Param>>,
    pub warnings: Vec<DeclWarning>,
}

pub fn parse_unit(toks: &[Token], matching: &[Option<usize>]) -> CompilationUnit {
    let mut p = Parser::new(toks, matching, 0, toks.len());
    let mut unit = CompilationUnit::default();
    while p.pos < p.end {
        let start = p.pos;
        if p.eat(";") {
            continue;
        }
        if p.at("package") {
            let line = p.line();
            p.pos += 1;
            let name = p.dotted_name();
            if p.eat(";") && !name.is_empty() {
                unit.package = Some((name, line));
            } else {
                p.recover(start, "malformed package clause");
            }
            continue;
        }
        if p.at("import") {
            p.pos += 1;
            let is_static = p.eat("static");
            let path = p.dotted_name();
            let wildcard = p.at(".") && p.peek_is(1, "*");
            if wildcard {
                p.pos += 2;
            }
            if p.eat(";") && !path.is_empty() {
                unit.imports.push(Import {
                    path,
                    is_static,
                    wildcard,
                });
            } else {
                p.recover(start, "malformed import");
            }
            continue;
        }
        p.skip_modifiers();
        match p.type_decl() {
            Some(t) => unit.types.push(t),
            None => p.recover(start, "unrecognized top-level declaration"),
        }
    }
    unit.warnings = p.warnings;
    unit
}

/// Members of an anonymous class body (tokens strictly inside its braces).
pub fn parse_anonymous_body(
    toks: &[Token],
    matching: &[Option<usize>],
    body: Span,
) -> (Vec<Member>, Vec<DeclWarning>) {
    let mut p = Parser::new(toks, matching, body.start, body.end);
    let members = p.class_members("", body.end);
    (members, p.warnings)
}

/// Parse a local type declaration (`class X {..}` inside a block) starting at
/// `pos`. Returns the declaration and the index just past it.
pub fn parse_local_type(
    toks: &[Token],
    matching: &[Option<usize>],
    pos: usize,
    end: usize,
) -> Option<(TypeDecl, usize, Vec<DeclWarning>)> {
    let mut p = Parser::new(toks, matching, pos, end);
    p.skip_modifiers();
    let t = p.type_decl()?;
    Some((t, p.pos, p.warnings))
}

/// Parse a type reference at `pos`; returns it and the index after it.
pub fn parse_type_at(toks: &[Token], pos: usize, end: usize) -> Option<(TypeRef, usize)> {
    let mut p = Parser::new(toks, &[], pos, end);
    let t = p.type_ref()?;
    Some((t, p.pos))
}

/// Skip explicit type arguments `<...>` at `pos`; returns the index after.
pub fn skip_type_args_at(toks: &[Token], pos: usize, end: usize) -> Option<usize> {
    let mut p = Parser::new(toks, &[], pos, end);
    p.type_args()?;
    Some(p.pos)
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], matching: &'t [Option<usize>], pos: usize, end: usize) -> Self {
        Parser {
            toks,
            matching,
            pos,
            end: end.min(toks.len()),
            record_components: None,
            warnings: Vec::new(),
        }
    }

    fn tok(&self) -> Option<&'t Token> {
        if self.pos < self.end {
            self.toks.get(self.pos)
        } else {
            None
        }
    }

    fn peek(&self, k: usize) -> Option<&'t Token> {
        let i = self.pos + k;
        if i < self.end {
            self.toks.get(i)
        } else {
            None
        }
    }

    fn at(&self, s: &str) -> bool {
        self.tok()
            .is_some_and(|t| t.is(s) && t.kind != TokenKind::Str)
    }

    fn peek_is(&self, k: usize, s: &str) -> bool {
        self.peek(k)
            .is_some_and(|t| t.is(s) && t.kind != TokenKind::Str)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn line(&self) -> u32 {
        self.tok()
            .or_else(|| self.toks.get(self.end.saturating_sub(1)))
            .map(|t| t.line)
            .unwrap_or(1)
    }

    fn name(&mut self) -> Option<String> {
        let t = self.tok()?;
        if t.is_name() {
            self.pos += 1;
            Some(t.text.clone())
        } else {
            None
        }
    }

    fn close_of(&self, i: usize) -> Option<usize> {
        self.matching
            .get(i)
            .copied()
            .flatten()
            .filter(|&j| j < self.end)
    }

    fn dotted_name(&mut self) -> String {
        let mut out = String::new();
        if let Some(n) = self.name() {
            out.push_str(&n);
        } else {
            return out;
        }
        while self.at(".") && self.peek(1).is_some_and(|t| t.is_name()) {
            self.pos += 1;
            out.push('.');
            out.push_str(&self.name().unwrap_or_default());
        }
        out
    }

    /// Skip to the end of the current (broken) declaration and record it.
    fn recover(&mut self, start: usize, what: &str) {
        let line = self.toks.get(start).map(|t| t.line).unwrap_or(1);
        self.warnings.push(DeclWarning {
            line,
            message: what.to_string(),
        });
        let mut i = start;
        while i < self.end {
            let t = &self.toks[i];
            if t.is(";") && t.kind == TokenKind::Op {
                i += 1;
                break;
            }
            if t.is("{") && t.kind == TokenKind::Op {
                i = self.close_of(i).map(|j| j + 1).unwrap_or(self.end);
                break;
            }
            if t.is("}") && t.kind == TokenKind::Op && i > start {
                break;
            }
            i += 1;
        }
        self.pos = i.max(start + 1).min(self.end.max(start + 1));
    }

    fn skip_annotation(&mut self) -> bool {
        if self.at("@") && !self.peek_is(1, "interface") {
            self.pos += 1;
            self.dotted_name();
            if self.at("(") {
                self.pos = self.close_of(self.pos).map(|j| j + 1).unwrap_or(self.end);
            }
            true
        } else {
            false
        }
    }

    fn skip_modifiers(&mut self) {
        loop {
            if self.skip_annotation() {
                continue;
            }
            if let Some(t) = self.tok() {
                if MODIFIERS.contains(&t.text.as_str()) && t.kind == TokenKind::Ident {
                    self.pos += 1;
                    continue;
                }
                // non-sealed
                if t.is("non") && self.peek_is(1, "-") && self.peek_is(2, "sealed") {
                    self.pos += 3;
                    continue;
                }
            }
            break;
        }
    }

    fn type_args(&mut self) -> Option<Vec<TypeRef>> {
        if !self.eat("<") {
            return None;
        }
        let mut args = Vec::new();
        if self.eat(">") {
            return Some(args);
        }
        loop {
            while self.skip_annotation() {}
            if self.eat("?") {
                if self.eat("extends") || self.eat("super") {
                    args.push(self.type_ref()?);
                }
            } else {
                args.push(self.type_ref()?);
            }
            if self.eat(",") {
                continue;
            }
            if self.eat(">") {
                return Some(args);
            }
            return None;
        }
    }

    pub fn type_ref(&mut self) -> Option<TypeRef> {
        while self.skip_annotation() {}
        let t = self.tok()?;
        let mut ty = if t.kind == TokenKind::Ident && (is_primitive(&t.text) || t.is("void")) {
            self.pos += 1;
            TypeRef::simple(&t.text)
        } else if t.is_name() {
            self.pos += 1;
            let mut ty = TypeRef::simple(&t.text);
            loop {
                if self.at("<") {
                    let save = self.pos;
                    match self.type_args() {
                        Some(a) => ty.args = a,
                        None => {
                            self.pos = save;
                            break;
                        }
                    }
                }
                if self.at(".") && self.peek(1).is_some_and(|t| t.is_name()) {
                    self.pos += 1;
                    let n = self.name()?;
                    ty.name.push('.');
                    ty.name.push_str(&n);
                    continue;
                }
                break;
            }
            ty
        } else {
            return None;
        };
        while self.at("[") && self.peek_is(1, "]") {
            self.pos += 2;
            ty.dims += 1;
        }
        Some(ty)
    }

    fn type_params(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.at("<") {
            return out;
        }
        let save = self.pos;
        self.pos += 1;
        loop {
            while self.skip_annotation() {}
            match self.name() {
                Some(n) => out.push(n),
                None => break,
            }
            if self.eat("extends") {
                loop {
                    if self.type_ref().is_none() {
                        break;
                    }
                    if !self.eat("&") {
                        break;
                    }
                }
            }
            if self.eat(",") {
                continue;
            }
            if self.eat(">") {
                return out;
            }
            break;
        }
        self.pos = save;
        out.clear();
        out
    }

    fn type_list(&mut self) -> Vec<TypeRef> {
        let mut out = Vec::new();
        while let Some(t) = self.type_ref() {
            out.push(t);
            if !self.eat(",") {
                break;
            }
        }
        out
    }

    fn body_span(&mut self) -> Option<Span> {
        if !self.at("{") {
            return None;
        }
        let open = self.pos;
        let close = self.close_of(open)?;
        self.pos = close + 1;
        Some(Span {
            start: open + 1,
            end: close,
        })
    }

    fn paren_span(&mut self) -> Option<Span> {
        if !self.at("(") {
            return None;
        }
        let open = self.pos;
        let close = self.close_of(open)?;
        self.pos = close + 1;
        Some(Span {
            start: open + 1,
            end: close,
        })
    }

    /// At `class`, `interface`, `enum`, `@interface` or `record`.
    fn type_decl(&mut self) -> Option<TypeDecl> {
        let save = self.pos;
        let kind = if self.eat("class") {
            EntityKind::Class
        } else if self.eat("interface") {
            EntityKind::Interface
        } else if self.eat("enum") {
            EntityKind::Enum
        } else if self.at("@") && self.peek_is(1, "interface") {
            self.pos += 2;
            EntityKind::Annotation
        } else if self.at("record") && self.peek(1).is_some_and(|t| t.is_name()) {
            self.pos += 1;
            return self.record_decl(save);
        } else {
            return None;
        };
        let line = self.toks[save].line;
        let Some(name) = self.name() else {
            self.pos = save;
            return None;
        };
        let type_params = self.type_params();
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        loop {
            if self.eat("extends") {
                extends = self.type_list();
            } else if self.eat("implements") {
                implements = self.type_list();
            } else if self.eat("permits") {
                self.type_list();
            } else {
                break;
            }
        }
        if !self.at("{") {
            self.pos = save;
            return None;
        }
        let body = self.body_span()?;
        let mut inner = Parser::new(self.toks, self.matching, body.start, body.end);
        let members = if kind == EntityKind::Enum {
            inner.enum_members(&name, body.end)
        } else {
            inner.class_members(&name, body.end)
        };
        self.warnings.append(&mut inner.warnings);
        Some(TypeDecl {
            name,
            kind,
            line,
            type_params,
            extends,
            implements,
            members,
        })
    }

    fn record_decl(&mut self, save: usize) -> Option<TypeDecl> {
        let line = self.toks[save].line;
        let name = self.name()?;
        let type_params = self.type_params();
        let components = match self.paren_span() {
            Some(s) => {
                let mut inner = Parser::new(self.toks, self.matching, s.start, s.end);
                inner.params()
            }
            None => {
                self.pos = save;
                return None;
            }
        };
        let implements = if self.eat("implements") {
            self.type_list()
        } else {
            Vec::new()
        };
        let Some(body) = self.body_span() else {
            self.pos = save;
            return None;
        };
        let mut members: Vec<Member> = components
            .iter()
            .map(|c| {
                Member::Field(FieldDecl {
                    name: c.name.clone(),
                    ty: c.ty.clone(),
                    line,
                    init: None,
                })
            })
            .collect();
        let mut inner = Parser::new(self.toks, self.matching, body.start, body.end);
        inner.record_components = Some(components);
        members.extend(inner.class_members(&name, body.end));
        self.warnings.append(&mut inner.warnings);
        Some(TypeDecl {
            name,
            kind: EntityKind::Class,
            line,
            type_params,
            extends: Vec::new(),
            implements,
            members,
        })
    }

    fn enum_members(&mut self, name: &str, end: usize) -> Vec<Member> {
        let mut members = Vec::new();
        loop {
            while self.skip_annotation() {}
            if self.at(";") {
                self.pos += 1;
                break;
            }
            if self.pos >= end || self.at("}") {
                return members;
            }
            let start = self.pos;
            let line = self.line();
            let Some(cname) = self.name() else {
                self.recover(start, "malformed enum constant");
                break;
            };
            let args = self.paren_span();
            let body = self.body_span();
            members.push(Member::EnumConstant(EnumConstantDecl {
                name: cname,
                line,
                args,
                body,
            }));
            if self.eat(",") {
                continue;
            }
            if self.eat(";") {
                break;
            }
            if self.pos >= end {
                return members;
            }
            self.recover(self.pos, "malformed enum constant list");
            break;
        }
        members.extend(self.class_members(name, end));
        members
    }

    fn params(&mut self) -> Vec<Param> {
        let mut out = Vec::new();
        while self.pos < self.end {
            self.skip_modifiers();
            let Some(mut ty) = self.type_ref() else {
                break;
            };
            if self.eat("...") {
                ty.dims += 1;
            }
            while self.skip_annotation() {}
            let name = if self.eat("this") {
                "this".to_string()
            } else {
                match self.name() {
                    Some(n) => n,
                    None => break,
                }
            };
            while self.at("[") && self.peek_is(1, "]") {
                self.pos += 2;
                ty.dims += 1;
            }
            if name != "this" {
                out.push(Param { ty, name });
            }
            if !self.eat(",") {
                break;
            }
        }
        out
    }

    /// Skip an initializer expression, stopping at a top-level `,` or `;`.
    fn skip_initializer(&mut self) -> Span {
        let start = self.pos;
        while self.pos < self.end {
            let t = &self.toks[self.pos];
            if t.kind == TokenKind::Op {
                match t.text.as_str() {
                    "," | ";" | "}" => break,
                    "(" | "[" | "{" => {
                        self.pos = self.close_of(self.pos).map(|j| j + 1).unwrap_or(self.end);
                        continue;
                    }
                    "." if self.peek_is(1, "<") => {
                        self.pos += 1;
                        if self.type_args().is_none() {
                            self.pos += 1;
                        }
                        continue;
                    }
                    _ => {}
                }
            } else if t.is("new") {
                self.pos += 1;
                let _ = self.type_ref();
                continue;
            }
            self.pos += 1;
        }
        Span {
            start,
            end: self.pos,
        }
    }

    fn class_members(&mut self, class_name: &str, end: usize) -> Vec<Member> {
        let mut members = Vec::new();
        while self.pos < end {
            let start = self.pos;
            if self.eat(";") {
                continue;
            }
            if self.at("{") {
                if let Some(s) = self.body_span() {
                    members.push(Member::Initializer(s));
                    continue;
                }
            }
            if self.at("static") && self.peek_is(1, "{") {
                self.pos += 1;
                if let Some(s) = self.body_span() {
                    members.push(Member::Initializer(s));
                    continue;
                }
            }
            self.skip_modifiers();
            if let Some(t) = self.type_decl() {
                members.push(Member::Type(t));
                continue;
            }
            if self.pos != start && self.pos >= end {
                self.recover(start, "dangling modifiers");
                continue;
            }
            match self.member(class_name) {
                Some(mut m) => members.append(&mut m),
                None => self.recover(start, "unparseable member declaration"),
            }
        }
        members
    }

    fn member(&mut self, class_name: &str) -> Option<Vec<Member>> {
        let line = self.line();
        let type_params = self.type_params();
        // constructor
        if self.tok().is_some_and(|t| t.is(class_name)) && self.peek_is(1, "(") {
            self.pos += 1;
            return self.method_rest(class_name.to_string(), true, None, type_params, line);
        }
        // compact canonical constructor of a record
        if self.tok().is_some_and(|t| t.is(class_name)) && self.peek_is(1, "{") {
            if let Some(params) = self.record_components.clone() {
                self.pos += 1;
                let body = self.body_span();
                return Some(vec![Member::Method(MethodDecl {
                    name: class_name.to_string(),
                    is_ctor: true,
                    ret: None,
                    type_params,
                    params,
                    throws: Vec::new(),
                    body,
                    line,
                })]);
            }
        }
        let ty = self.type_ref()?;
        let name = self.name()?;
        if self.at("(") {
            return self.method_rest(name, false, Some(ty), type_params, line);
        }
        if !type_params.is_empty() {
            return None;
        }
        let mut out = Vec::new();
        let mut fname = name;
        let mut fline = line;
        loop {
            let mut fty = ty.clone();
            while self.at("[") && self.peek_is(1, "]") {
                self.pos += 2;
                fty.dims += 1;
            }
            let init = if self.eat("=") {
                Some(self.skip_initializer())
            } else {
                None
            };
            out.push(Member::Field(FieldDecl {
                name: fname,
                ty: fty,
                line: fline,
                init,
            }));
            if self.eat(",") {
                fline = self.line();
                fname = self.name()?;
                continue;
            }
            if self.eat(";") {
                return Some(out);
            }
            return None;
        }
    }

    fn method_rest(
        &mut self,
        name: String,
        is_ctor: bool,
        ret: Option<TypeRef>,
        type_params: Vec<String>,
        line: u32,
    ) -> Option<Vec<Member>> {
        let ps = self.paren_span()?;
        let mut inner = Parser::new(self.toks, self.matching, ps.start, ps.end);
        let params = inner.params();
        let mut ret = ret;
        while self.at("[") && self.peek_is(1, "]") {
            self.pos += 2;
            if let Some(r) = ret.as_mut() {
                r.dims += 1;
            }
        }
        let throws = if self.eat("throws") {
            self.type_list()
        } else {
            Vec::new()
        };
        let body = if self.at("{") {
            Some(self.body_span()?)
        } else if self.eat("default") {
            self.skip_initializer();
            if !self.eat(";") {
                return None;
            }
            None
        } else if self.eat(";") {
            None
        } else {
            return None;
        };
        Some(vec![Member::Method(MethodDecl {
            name,
            is_ctor,
            ret,
            type_params,
            params,
            throws,
            body,
            line,
        })])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::java::lexer::{match_brackets, tokenize};

    fn parse(src: &str) -> CompilationUnit {
        let toks = tokenize(src).tokens;
        let m = match_brackets(&toks);
        parse_unit(&toks, &m)
    }

    #[test]
    fn package_imports_and_class() {
        let u = parse(
            "package a.b;\nimport java.util.List;\nimport static java.lang.Math.*;\n\
             public class C<T extends Comparable<T>> extends Base implements I, J<T> {}",
        );
        assert_eq!(u.package.as_ref().unwrap().0, "a.b");
        assert_eq!(u.imports.len(), 2);
        assert!(u.imports[1].is_static && u.imports[1].wildcard);
        let c = &u.types[0];
        assert_eq!(c.name, "C");
        assert_eq!(c.type_params, vec!["T"]);
        assert_eq!(c.extends[0].name, "Base");
        assert_eq!(c.implements.len(), 2);
        assert!(u.warnings.is_empty());
    }

    #[test]
    fn members() {
        let u = parse(
            "class C {\n  private Map<String, List<Integer>> m = new HashMap<String, List<Integer>>(), n;\n\
             C(int a) { }\n  public <T> T get(T[] xs, String... rest) throws IOException { return null; }\n\
             static { init(); }\n  abstract void f();\n  class Inner {}\n}",
        );
        let c = &u.types[0];
        let kinds: Vec<&str> = c
            .members
            .iter()
            .map(|m| match m {
                Member::Field(_) => "field",
                Member::Method(m) if m.is_ctor => "ctor",
                Member::Method(_) => "method",
                Member::Type(_) => "type",
                Member::Initializer(_) => "init",
                Member::EnumConstant(_) => "const",
            })
            .collect();
        assert_eq!(
            kinds,
            vec!["field", "field", "ctor", "method", "init", "method", "type"]
        );
        let Member::Method(get) = &c.members[3] else {
            panic!()
        };
        assert_eq!(get.params.len(), 2);
        assert_eq!(get.params[1].ty.dims, 1);
        assert_eq!(get.throws[0].name, "IOException");
        assert!(u.warnings.is_empty(), "{:?}", u.warnings);
    }

    #[test]
    fn enums_and_annotations() {
        let u = parse(
            "enum E implements I { A(1), B { void f() {} }, C; int v; E() {} E(int v) { this.v = v; } }\n\
             @interface Ann { String value() default \"x\"; int n(); }",
        );
        assert_eq!(u.types[0].kind, EntityKind::Enum);
        let consts = u.types[0]
            .members
            .iter()
            .filter(|m| matches!(m, Member::EnumConstant(_)))
            .count();
        assert_eq!(consts, 3);
        assert_eq!(u.types[1].kind, EntityKind::Annotation);
        assert_eq!(u.types[1].members.len(), 2);
        assert!(u.warnings.is_empty(), "{:?}", u.warnings);
    }

    #[test]
    fn records() {
        let u = parse("record P(int x, int y) implements I { P { } int sum() { return x + y; } }");
        let t = &u.types[0];
        assert_eq!(t.kind, EntityKind::Class);
        assert_eq!(t.members.len(), 4);
        assert!(u.warnings.is_empty(), "{:?}", u.warnings);
    }

    #[test]
    fn broken_member_is_skipped_with_warning() {
        let u = parse("class C { int a; ??? garbage ; void f() {} }");
        assert_eq!(u.warnings.len(), 1);
        assert_eq!(u.types[0].members.len(), 2);
    }

    #[test]
    fn missing_semicolon_inside_body_is_tolerated() {
        let u = parse("class C { void p() { System.out.println(x) } }");
        assert!(u.warnings.is_empty());
        assert_eq!(u.types[0].members.len(), 1);
    }
}

//! Heuristic scanner for method bodies and initializers. It tracks local
//! variable types well enough to resolve receivers, field accesses, calls,
//! instantiations, casts and type tests without a full expression grammar.

use std::collections::HashMap;

use super::decl::{
    parse_anonymous_body, parse_local_type, parse_type_at, skip_type_args_at, Span, TypeDecl,
    TypeRef,
};
use super::index::{known_static_field_type, search_hierarchy, MethodInfo, Resolver, TypeInfo};
use super::lexer::{is_keyword, is_primitive, Token, TokenKind};
use super::project::{Sink, Unit};
use crate::facts::{EntityId, EntityKind, RelationKind, Target, CONSTRUCTOR_NAME, UNRESOLVED_MARK};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Statements; `;` and `:` start a new statement.
    Block,
    /// One expression; stops at a top-level `,` or `;`.
    Expr,
    /// Anything else (argument lists, parenthesized and bracketed parts).
    List,
}

#[derive(Debug, Clone)]
enum Val {
    Unknown,
    /// A type name used as a value (`Math.max`, `Foo.CONST`).
    Type(String),
    Obj(String),
}

impl Val {
    fn obj(t: Option<String>) -> Val {
        t.map(Val::Obj).unwrap_or(Val::Unknown)
    }

    fn ty(&self) -> Option<&str> {
        match self {
            Val::Type(t) | Val::Obj(t) => Some(t),
            Val::Unknown => None,
        }
    }
}

const COMPOUND: &[&str] = &["+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="];

pub(crate) struct Body<'s, 'u> {
    sink: &'s mut Sink,
    unit: &'u Unit,
    chain: Vec<String>,
    tparams: Vec<String>,
    source: EntityId,
    scopes: Vec<HashMap<String, Option<String>>>,
    local_types: HashMap<String, String>,
}

impl<'s, 'u> Body<'s, 'u> {
    pub fn new(
        sink: &'s mut Sink,
        unit: &'u Unit,
        chain: &[String],
        tparams: &[String],
        source: EntityId,
        captured: &HashMap<String, Option<String>>,
        local_types: &HashMap<String, String>,
    ) -> Self {
        Body {
            sink,
            unit,
            chain: chain.to_vec(),
            tparams: tparams.to_vec(),
            source,
            scopes: vec![captured.clone(), HashMap::new()],
            local_types: local_types.clone(),
        }
    }

    pub fn declare(&mut self, name: &str, ty: Option<String>) {
        if let Some(s) = self.scopes.last_mut() {
            s.insert(name.to_string(), ty);
        }
    }

    pub fn scan_block(&mut self, start: usize, end: usize) {
        self.scan(start, end, Mode::Block);
    }

    pub fn scan_list(&mut self, start: usize, end: usize) {
        self.scan(start, end, Mode::List);
    }

    // ---- token helpers ----

    fn toks(&self) -> &'u [Token] {
        &self.unit.toks
    }

    fn tok(&self, i: usize) -> Option<&'u Token> {
        self.unit.toks.get(i)
    }

    fn is_at(&self, i: usize, s: &str) -> bool {
        self.tok(i)
            .is_some_and(|t| t.is(s) && t.kind != TokenKind::Str)
    }

    fn name_at(&self, i: usize, e: usize) -> bool {
        i < e && self.tok(i).is_some_and(|t| t.is_name())
    }

    /// Matching closer of the bracket at `i`, clamped to `e`.
    fn close(&self, i: usize, e: usize) -> usize {
        self.unit
            .matching
            .get(i)
            .copied()
            .flatten()
            .filter(|&j| j > i)
            .unwrap_or(e)
            .min(e)
    }

    fn line(&self, i: usize) -> u32 {
        self.tok(i).map(|t| t.line).unwrap_or(1)
    }

    fn skip_annotation(&self, mut i: usize, e: usize) -> usize {
        i += 1;
        while self.name_at(i, e) {
            i += 1;
            if self.is_at(i, ".") && self.name_at(i + 1, e) {
                i += 1;
            } else {
                break;
            }
        }
        if i < e && self.is_at(i, "(") {
            i = self.close(i, e) + 1;
        }
        i
    }

    // ---- resolution ----

    fn current(&self) -> &str {
        &self.chain[0]
    }

    fn resolve_ref(&self, ty: &TypeRef) -> Option<String> {
        self.sink
            .resolve(self.unit, &self.chain, &self.tparams, &self.local_types, ty)
    }

    fn lookup_type(&self, name: &str) -> Option<String> {
        if let Some(t) = self.local_types.get(name) {
            return Some(t.clone());
        }
        Resolver {
            index: &self.sink.index,
            file: &self.unit.scope,
            chain: &self.chain,
            type_params: &self.tparams,
        }
        .lookup(name)
    }

    fn lookup_local(&self, name: &str) -> Option<Option<String>> {
        self.scopes.iter().rev().find_map(|s| s.get(name).cloned())
    }

    fn type_relation(&mut self, kind: RelationKind, ty: &TypeRef) -> Option<String> {
        let (chain, tparams, lt) = (
            self.chain.clone(),
            self.tparams.clone(),
            self.local_types.clone(),
        );
        self.sink
            .type_relation(self.unit, &chain, &tparams, &lt, self.source, kind, ty)
    }

    fn emit(&mut self, kind: RelationKind, target: Target) {
        self.sink.emit(self.source, kind, target);
    }

    fn emit_type(&mut self, kind: RelationKind, fqn: &str) {
        let t = self.sink.target_of(fqn);
        self.emit(kind, t);
    }

    fn field_in_scope(&self, name: &str) -> Option<(EntityId, Option<String>)> {
        for enc in &self.chain {
            let (found, _) = search_hierarchy(&self.sink.index, enc, |ti| {
                ti.fields
                    .iter()
                    .find(|f| f.name == name)
                    .map(|f| (f.id, f.ty.clone()))
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }

    // ---- statements ----

    fn scan(&mut self, mut i: usize, e: usize, mode: Mode) -> usize {
        let mut stmt_start = mode == Mode::Block;
        let mut prefix = false;
        while i < e {
            let t = &self.toks()[i];
            if t.kind == TokenKind::Op {
                match t.text.as_str() {
                    "{" => {
                        let c = self.close(i, e);
                        self.scopes.push(HashMap::new());
                        self.scan(i + 1, c, Mode::Block);
                        self.scopes.pop();
                        i = c + 1;
                        stmt_start = mode == Mode::Block;
                        prefix = false;
                        continue;
                    }
                    ";" | "," => {
                        if mode == Mode::Expr {
                            return i;
                        }
                        stmt_start = mode == Mode::Block && t.is(";");
                        prefix = false;
                        i += 1;
                        continue;
                    }
                    ":" => {
                        stmt_start = mode == Mode::Block;
                        i += 1;
                        continue;
                    }
                    "++" | "--" => {
                        prefix = true;
                        stmt_start = false;
                        i += 1;
                        continue;
                    }
                    "@" if !self.is_at(i + 1, "interface") => {
                        i = self.skip_annotation(i, e);
                        continue;
                    }
                    "(" => {}
                    _ => {
                        stmt_start = false;
                        prefix = false;
                        i += 1;
                        continue;
                    }
                }
            }
            if stmt_start {
                if let Some(ni) = self.local_type(i, e) {
                    i = ni;
                    continue;
                }
                if let Some(ni) = self.local_decl(i, e) {
                    i = ni;
                    stmt_start = false;
                    continue;
                }
            }
            stmt_start = false;
            let text = t.text.as_str();
            if t.kind == TokenKind::Ident {
                match text {
                    "for" | "catch" | "try" if self.is_at(i + 1, "(") => {
                        let c = self.close(i + 1, e);
                        if text == "catch" {
                            self.catch_header(i + 2, c);
                        } else {
                            self.scan(i + 2, c, Mode::Block);
                        }
                        i = c + 1;
                        stmt_start = mode == Mode::Block;
                        continue;
                    }
                    "if" | "while" | "switch" | "synchronized" if self.is_at(i + 1, "(") => {
                        let c = self.close(i + 1, e);
                        self.scan(i + 2, c, Mode::List);
                        i = c + 1;
                        stmt_start = mode == Mode::Block;
                        continue;
                    }
                    "else" | "do" | "finally" | "try" => {
                        i += 1;
                        stmt_start = mode == Mode::Block;
                        continue;
                    }
                    "instanceof" => {
                        i = self.instanceof(i + 1, e);
                        continue;
                    }
                    _ => {}
                }
                if is_keyword(text)
                    && !matches!(text, "new" | "this" | "super")
                    && !is_primitive(text)
                {
                    i += 1;
                    continue;
                }
            }
            let (ni, _) = self.chain(i, e, prefix);
            prefix = false;
            i = ni.max(i + 1);
        }
        e
    }

    /// `class Local { .. }` (or interface / enum / record) inside a block.
    fn local_type(&mut self, i: usize, e: usize) -> Option<usize> {
        let mut j = i;
        loop {
            if self.is_at(j, "@") && !self.is_at(j + 1, "interface") {
                j = self.skip_annotation(j, e);
            } else if ["final", "abstract", "static", "strictfp"]
                .iter()
                .any(|m| self.is_at(j, m))
            {
                j += 1;
            } else {
                break;
            }
        }
        let starts = ["class", "interface", "enum"]
            .iter()
            .any(|k| self.is_at(j, k))
            || (self.is_at(j, "record") && self.name_at(j + 1, e) && self.is_at(j + 2, "("));
        if !starts || j >= e {
            return None;
        }
        let (decl, end, warnings) = parse_local_type(&self.unit.toks, &self.unit.matching, i, e)?;
        for w in warnings {
            self.sink.warn(self.unit, w.line, "syntax", &w.message);
        }
        let enclosing = self.current().to_string();
        let n = self.sink.next_counter(&enclosing);
        let fqn = format!("{enclosing}${n}{}", decl.name);
        self.local_types.insert(decl.name.clone(), fqn.clone());
        self.nested_class(&decl, &fqn, None);
        Some(end.max(i + 1))
    }

    /// Declare, link and analyze a class declared inside this body.
    fn nested_class(
        &mut self,
        decl: &TypeDecl,
        fqn: &str,
        base: Option<String>,
    ) -> Option<EntityId> {
        let parent = self.sink.index.get(self.current()).map(|t| t.id)?;
        let id = self
            .sink
            .declare_type(self.unit, decl, fqn, parent, decl.line)?;
        if let Some(b) = base {
            let iface = self.sink.index.get(&b).is_some_and(TypeInfo::is_interface);
            let kind = if iface {
                RelationKind::Implements
            } else {
                RelationKind::Extends
            };
            let target = self.sink.target_of(&b);
            self.sink.emit(id, kind, target);
            if let Some(info) = self.sink.index.get_mut(fqn) {
                if iface {
                    info.interfaces.push(b);
                } else {
                    info.superclass = Some(b);
                }
            }
        }
        let mut chain = vec![fqn.to_string()];
        chain.extend(self.chain.iter().cloned());
        let tparams = self.tparams.clone();
        self.sink.link_type(self.unit, decl, fqn, &chain, &tparams);
        let mut captured = HashMap::new();
        for s in &self.scopes {
            captured.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        let lt = self.local_types.clone();
        self.sink
            .analyze_type(self.unit, decl, fqn, &chain, &tparams, captured, lt);
        Some(id)
    }

    /// Anonymous class body; returns its entity.
    pub fn anonymous(&mut self, body: Span, base: Option<String>, line: u32) -> Option<EntityId> {
        let (members, warnings) = parse_anonymous_body(&self.unit.toks, &self.unit.matching, body);
        for w in warnings {
            self.sink.warn(self.unit, w.line, "syntax", &w.message);
        }
        let enclosing = self.current().to_string();
        let n = self.sink.next_counter(&enclosing);
        let fqn = format!("{enclosing}${n}");
        let decl = TypeDecl {
            name: String::new(),
            kind: EntityKind::Class,
            line,
            type_params: Vec::new(),
            extends: Vec::new(),
            implements: Vec::new(),
            members,
        };
        self.nested_class(&decl, &fqn, base)
    }

    /// Local variable declaration at a statement start. Returns the index of
    /// the token ending the declaration.
    fn local_decl(&mut self, i: usize, e: usize) -> Option<usize> {
        let mut j = i;
        loop {
            if self.is_at(j, "final") {
                j += 1;
            } else if self.is_at(j, "@") && !self.is_at(j + 1, "interface") {
                j = self.skip_annotation(j, e);
            } else {
                break;
            }
        }
        let (ty, mut k) = if self.is_at(j, "var") && self.name_at(j + 1, e) {
            (None, j + 1)
        } else {
            let (t, k) = parse_type_at(&self.unit.toks, j, e)?;
            if t.name == "yield" && t.dims == 0 {
                return None;
            }
            (Some(t), k)
        };
        if !self.name_at(k, e) {
            return None;
        }
        let follows = k + 1 >= e
            || ["=", ";", ",", ":", "[", ")"]
                .iter()
                .any(|s| self.is_at(k + 1, s));
        if !follows {
            return None;
        }
        let fqn = match &ty {
            Some(t) => self.type_relation(RelationKind::Uses, t),
            None => None,
        };
        let base_dims = ty.as_ref().map(|t| t.dims).unwrap_or(0);
        loop {
            let name = self.unit.toks[k].text.clone();
            k += 1;
            let mut dims = base_dims;
            while self.is_at(k, "[") && self.is_at(k + 1, "]") {
                k += 2;
                dims += 1;
            }
            self.declare(&name, fqn.clone().filter(|_| dims == 0));
            if k < e && self.is_at(k, "=") {
                k = self.scan(k + 1, e, Mode::Expr);
            }
            if k < e && self.is_at(k, ",") && self.name_at(k + 1, e) {
                k += 1;
                continue;
            }
            return Some(k.min(e));
        }
    }

    fn catch_header(&mut self, s: usize, c: usize) {
        let mut j = s;
        while self.is_at(j, "final") || self.is_at(j, "@") {
            j = if self.is_at(j, "@") {
                self.skip_annotation(j, c)
            } else {
                j + 1
            };
        }
        let mut first = None;
        while let Some((ty, k)) = parse_type_at(&self.unit.toks, j, c) {
            let t = self.type_relation(RelationKind::Uses, &ty);
            first = first.or(t);
            j = k;
            if self.is_at(j, "|") {
                j += 1;
            } else {
                break;
            }
        }
        if self.name_at(j, c) {
            let name = self.unit.toks[j].text.clone();
            self.declare(&name, first);
        }
    }

    fn instanceof(&mut self, mut j: usize, e: usize) -> usize {
        if self.is_at(j, "final") {
            j += 1;
        }
        let Some((ty, k)) = parse_type_at(&self.unit.toks, j, e) else {
            return j;
        };
        let t = self.type_relation(RelationKind::Instanceof, &ty);
        if self.name_at(k, e) {
            let name = self.unit.toks[k].text.clone();
            self.declare(&name, t.filter(|_| ty.dims == 0));
            return k + 1;
        }
        if k < e && self.is_at(k, "(") {
            // record pattern
            return self.close(k, e) + 1;
        }
        k
    }

    // ---- expressions ----

    /// Primary expression followed by member accesses, calls and indexing.
    fn chain(&mut self, i: usize, e: usize, prefix: bool) -> (usize, Val) {
        let (mut j, mut val, mut pending) = self.primary(i, e);
        while j < e {
            let t = &self.toks()[j];
            if t.kind != TokenKind::Op {
                break;
            }
            match t.text.as_str() {
                "." => {
                    let mut k = j + 1;
                    if self.is_at(k, "<") {
                        k = skip_type_args_at(&self.unit.toks, k, e).unwrap_or(k + 1);
                    }
                    if k >= e {
                        j = k;
                        break;
                    }
                    let n = &self.toks()[k];
                    if n.kind != TokenKind::Ident {
                        j = k;
                        break;
                    }
                    match n.text.as_str() {
                        "class" => {
                            self.flush_read(pending.take());
                            if let Val::Type(t) = &val {
                                let t = t.clone();
                                self.emit_type(RelationKind::Uses, &t);
                            }
                            val = Val::Obj("java.lang.Class".into());
                            j = k + 1;
                        }
                        "this" => {
                            pending = None;
                            val = match val {
                                Val::Type(t) => Val::Obj(t),
                                v => v,
                            };
                            j = k + 1;
                        }
                        "super" => {
                            pending = None;
                            val = match val.ty() {
                                Some(t) => Val::Obj(t.to_string()),
                                None => Val::Unknown,
                            };
                            j = k + 1;
                        }
                        "new" => {
                            self.flush_read(pending.take());
                            let (nj, v) = self.new_expr(k, e);
                            j = nj;
                            val = v;
                        }
                        _ => {
                            self.flush_read(pending.take());
                            let name = n.text.clone();
                            if self.is_at(k + 1, "(") && k + 1 < e {
                                let c = self.close(k + 1, e);
                                let arity = self.args(k + 2, c);
                                val = self.call_on(&val, &name, arity);
                                j = c + 1;
                            } else {
                                let (v, p) = self.field_on(&val, &name);
                                val = v;
                                pending = p;
                                j = k + 1;
                            }
                        }
                    }
                }
                "[" => {
                    self.flush_read(pending.take());
                    let c = self.close(j, e);
                    self.scan(j + 1, c, Mode::List);
                    val = Val::Unknown;
                    j = c + 1;
                }
                "::" => {
                    self.flush_read(pending.take());
                    if let Val::Type(t) = &val {
                        let t = t.clone();
                        self.emit_type(RelationKind::Uses, &t);
                    }
                    val = Val::Unknown;
                    j = (j + 2).min(e);
                }
                "++" | "--" => {
                    if let Some(f) = pending.take() {
                        self.read_write(f);
                    }
                    j += 1;
                    val = Val::Unknown;
                    break;
                }
                _ => break,
            }
        }
        if let Some(f) = pending {
            let next = if j < e { self.tok(j) } else { None };
            let next_text = next.map(|t| t.text.as_str()).unwrap_or("");
            let shift_assign = next_text == ">"
                && (self.is_at(j + 1, ">=") || (self.is_at(j + 1, ">") && self.is_at(j + 2, ">=")));
            if next_text == "=" && !prefix {
                self.emit(RelationKind::Writes, Target::Entity(f));
            } else if next_text == "=" || prefix || shift_assign || COMPOUND.contains(&next_text) {
                self.read_write(f);
            } else {
                self.emit(RelationKind::Reads, Target::Entity(f));
            }
        }
        (j, val)
    }

    fn flush_read(&mut self, pending: Option<EntityId>) {
        if let Some(f) = pending {
            self.emit(RelationKind::Reads, Target::Entity(f));
        }
    }

    fn read_write(&mut self, f: EntityId) {
        self.emit(RelationKind::Reads, Target::Entity(f));
        self.emit(RelationKind::Writes, Target::Entity(f));
    }

    /// Returns the index after the primary, its value, and the internal field
    /// it denotes (whose read/write role depends on what follows).
    fn primary(&mut self, i: usize, e: usize) -> (usize, Val, Option<EntityId>) {
        let t = &self.toks()[i];
        match t.kind {
            TokenKind::Str => return (i + 1, Val::Obj("java.lang.String".into()), None),
            TokenKind::Number | TokenKind::Char => return (i + 1, Val::Unknown, None),
            TokenKind::Op => {
                if t.is("(") {
                    return self.paren(i, e);
                }
                return (i + 1, Val::Unknown, None);
            }
            TokenKind::Ident => {}
        }
        match t.text.as_str() {
            "new" => {
                let (j, v) = self.new_expr(i, e);
                (j, v, None)
            }
            "this" => {
                if self.is_at(i + 1, "(") && i + 1 < e {
                    let c = self.close(i + 1, e);
                    let arity = self.args(i + 2, c);
                    let cur = self.current().to_string();
                    if let Some(target) = self.ctor_target(&cur, arity) {
                        self.emit(RelationKind::Calls, target);
                    }
                    (c + 1, Val::Unknown, None)
                } else {
                    (i + 1, Val::Obj(self.current().to_string()), None)
                }
            }
            "super" => {
                let sup = self
                    .sink
                    .index
                    .get(self.current())
                    .and_then(|t| t.superclass.clone());
                if self.is_at(i + 1, "(") && i + 1 < e {
                    let c = self.close(i + 1, e);
                    let arity = self.args(i + 2, c);
                    if let Some(s) = sup {
                        if let Some(target) = self.ctor_target(&s, arity) {
                            self.emit(RelationKind::Calls, target);
                        }
                    }
                    (c + 1, Val::Unknown, None)
                } else {
                    (i + 1, Val::obj(sup), None)
                }
            }
            text if is_keyword(text) || is_primitive(text) => (i + 1, Val::Unknown, None),
            _ => self.name_primary(i, e),
        }
    }

    fn name_primary(&mut self, i: usize, e: usize) -> (usize, Val, Option<EntityId>) {
        let name = self.unit.toks[i].text.clone();
        if self.is_at(i + 1, "(") && i + 1 < e {
            let c = self.close(i + 1, e);
            let arity = self.args(i + 2, c);
            let v = self.call_unqualified(&name, arity);
            return (c + 1, v, None);
        }
        if self.is_at(i + 1, "->") {
            self.declare(&name, None);
            return (i + 1, Val::Unknown, None);
        }
        if let Some(ty) = self.lookup_local(&name) {
            return (i + 1, Val::obj(ty), None);
        }
        if let Some((fid, ty)) = self.field_in_scope(&name) {
            return (i + 1, Val::obj(ty), Some(fid));
        }
        if self.unit.scope.static_single.contains_key(&name) {
            return (i + 1, Val::Unknown, None);
        }
        if let Some(fqn) = self.lookup_type(&name) {
            return (i + 1, Val::Type(fqn), None);
        }
        let first = name.chars().next().unwrap_or('a');
        if first.is_lowercase() && self.is_at(i + 1, ".") {
            // package-qualified type name
            let mut segs = vec![name.clone()];
            let mut j = i + 1;
            while self.is_at(j, ".") && self.name_at(j + 1, e) {
                let seg = self.unit.toks[j + 1].text.clone();
                let upper = seg.chars().next().is_some_and(char::is_uppercase);
                segs.push(seg);
                j += 2;
                let cand = segs.join(".");
                if upper || self.sink.index.contains_key(&cand) {
                    return (j, Val::Type(cand), None);
                }
            }
        }
        if first.is_uppercase() && !is_constant_name(&name) {
            return (i + 1, Val::Type(format!("{UNRESOLVED_MARK}{name}")), None);
        }
        (i + 1, Val::Unknown, None)
    }

    fn paren(&mut self, i: usize, e: usize) -> (usize, Val, Option<EntityId>) {
        let c = self.close(i, e);
        if c + 1 < e && self.is_at(c + 1, "->") {
            self.lambda_params(i + 1, c);
            return (c + 1, Val::Unknown, None);
        }
        if let Some(ty) = self.cast_type(i, c, e) {
            let t = self.type_relation(RelationKind::Casts, &ty);
            let next_is_op = self
                .tok(c + 1)
                .is_some_and(|t| t.kind == TokenKind::Op && !t.is("("));
            if next_is_op {
                return (c + 1, Val::Unknown, None);
            }
            let (nj, _) = self.chain(c + 1, e, false);
            return (nj, Val::obj(t.filter(|_| ty.dims == 0)), None);
        }
        let (nj, v) = if i + 1 < c {
            self.chain(i + 1, c, false)
        } else {
            (c, Val::Unknown)
        };
        if nj >= c {
            (c + 1, v, None)
        } else {
            self.scan(nj, c, Mode::List);
            (c + 1, Val::Unknown, None)
        }
    }

    fn lambda_params(&mut self, s: usize, c: usize) {
        let mut seg_start = s;
        let mut k = s;
        while k <= c {
            if k == c || self.is_at(k, ",") {
                if k == seg_start + 1 && self.name_at(seg_start, c) {
                    let n = self.unit.toks[seg_start].text.clone();
                    self.declare(&n, None);
                } else if k > seg_start + 1 {
                    let mut j = seg_start;
                    while self.is_at(j, "final") {
                        j += 1;
                    }
                    if let Some((ty, after)) = parse_type_at(&self.unit.toks, j, k) {
                        if after + 1 == k && self.name_at(after, k) {
                            let t = self.type_relation(RelationKind::Uses, &ty);
                            let n = self.unit.toks[after].text.clone();
                            self.declare(&n, t.filter(|_| ty.dims == 0));
                        }
                    }
                }
                seg_start = k + 1;
            } else if self.is_at(k, "<") {
                k = skip_type_args_at(&self.unit.toks, k, c).unwrap_or(k + 1);
                continue;
            }
            k += 1;
        }
    }

    /// The type of a cast `( T ) operand` opening at `i`, if it is one.
    fn cast_type(&self, i: usize, c: usize, e: usize) -> Option<TypeRef> {
        if i > 0 {
            let prev = &self.toks()[i - 1];
            let callee = prev.is_name()
                || (prev.kind == TokenKind::Op && (prev.is(")") || prev.is("]")))
                || matches!(
                    prev.kind,
                    TokenKind::Str | TokenKind::Number | TokenKind::Char
                );
            if callee {
                return None;
            }
        }
        let (ty, mut k) = parse_type_at(&self.unit.toks, i + 1, c)?;
        // intersection casts
        while k < c && self.is_at(k, "&") {
            k = parse_type_at(&self.unit.toks, k + 1, c)?.1;
        }
        if k != c || c + 1 >= e {
            return None;
        }
        let next = self.tok(c + 1)?;
        let operand = match next.kind {
            TokenKind::Str | TokenKind::Number | TokenKind::Char => true,
            TokenKind::Ident => {
                next.is_name()
                    || matches!(
                        next.text.as_str(),
                        "this" | "super" | "new" | "true" | "false" | "null"
                    )
            }
            TokenKind::Op => matches!(next.text.as_str(), "(" | "!" | "~"),
        };
        if is_primitive(&ty.name) && ty.dims == 0 {
            let unary =
                next.kind == TokenKind::Op && matches!(next.text.as_str(), "+" | "-" | "++" | "--");
            return (operand || unary).then_some(ty);
        }
        let last = ty.name.rsplit('.').next().unwrap_or("");
        let plausible = last.chars().next().is_some_and(char::is_uppercase)
            || ty.dims > 0
            || !ty.args.is_empty()
            || self.sink.index.contains_key(&ty.name)
            || self.local_types.contains_key(&ty.name);
        (operand && plausible).then_some(ty)
    }

    /// Argument list strictly between `s` and its closer `c`; returns arity.
    fn args(&mut self, s: usize, c: usize) -> usize {
        if s >= c {
            return 0;
        }
        let mut arity = 1;
        let mut k = s;
        while k < c {
            let t = &self.toks()[k];
            if t.kind == TokenKind::Op {
                match t.text.as_str() {
                    "(" | "[" | "{" => {
                        k = self.close(k, c) + 1;
                        continue;
                    }
                    "," => arity += 1,
                    _ => {}
                }
            } else if t.is("new") {
                if let Some((_, after)) = parse_type_at(&self.unit.toks, k + 1, c) {
                    k = after;
                    continue;
                }
            }
            k += 1;
        }
        self.scan(s, c, Mode::List);
        arity
    }

    fn new_expr(&mut self, i: usize, e: usize) -> (usize, Val) {
        let mut j = i + 1;
        while self.is_at(j, "@") {
            j = self.skip_annotation(j, e);
        }
        if self.is_at(j, "<") {
            j = skip_type_args_at(&self.unit.toks, j, e).unwrap_or(j + 1);
        }
        let Some((ty, mut k)) = parse_type_at(&self.unit.toks, j, e) else {
            return (j.max(i + 1), Val::Unknown);
        };
        if ty.dims > 0 || (k < e && self.is_at(k, "[")) {
            self.type_relation(RelationKind::Uses, &ty);
            while k < e && self.is_at(k, "[") {
                let c = self.close(k, e);
                self.scan(k + 1, c, Mode::List);
                k = c + 1;
                while self.is_at(k, "[") && self.is_at(k + 1, "]") {
                    k += 2;
                }
            }
            if k < e && self.is_at(k, "{") {
                let c = self.close(k, e);
                self.scan(k + 1, c, Mode::List);
                k = c + 1;
            }
            return (k, Val::Unknown);
        }
        let fqn = self.resolve_ref(&ty);
        for a in &ty.args {
            self.type_relation(RelationKind::Uses, a);
        }
        if !(k < e && self.is_at(k, "(")) {
            return (k, Val::Unknown);
        }
        let c = self.close(k, e);
        let arity = self.args(k + 1, c);
        k = c + 1;
        if k < e && self.is_at(k, "{") {
            let bc = self.close(k, e);
            let line = self.line(i);
            if let Some(anon) = self.anonymous(
                Span {
                    start: k + 1,
                    end: bc,
                },
                fqn.clone(),
                line,
            ) {
                self.emit(RelationKind::Instantiates, Target::Entity(anon));
            }
            k = bc + 1;
        } else if let Some(f) = &fqn {
            if let Some(target) = self.ctor_target(f, arity) {
                self.emit(RelationKind::Instantiates, target);
            }
        }
        (k, Val::obj(fqn))
    }

    fn ctor_target(&self, owner: &str, arity: usize) -> Option<Target> {
        match self.sink.index.get(owner) {
            Some(info) => {
                let ctors: Vec<&MethodInfo> = info.methods.iter().filter(|m| m.is_ctor).collect();
                let pick = ctors.iter().find(|m| m.arity == arity).or(ctors.first());
                Some(match pick {
                    Some(m) => Target::Entity(m.id),
                    None => Target::Name(format!("{owner}.{CONSTRUCTOR_NAME}")),
                })
            }
            None => Some(Target::Name(format!("{owner}.{CONSTRUCTOR_NAME}"))),
        }
    }

    fn find_method<'i>(info: &'i TypeInfo, name: &str, arity: usize) -> Option<&'i MethodInfo> {
        let mut by_name = info.methods.iter().filter(|m| !m.is_ctor && m.name == name);
        let first = by_name.clone().next();
        by_name.find(|m| m.arity == arity || m.varargs).or(first)
    }

    fn call_unqualified(&mut self, name: &str, arity: usize) -> Val {
        let mut owner_hint: Option<String> = None;
        for enc in self.chain.clone() {
            let (found, ext) = search_hierarchy(&self.sink.index, &enc, |ti| {
                Self::find_method(ti, name, arity).map(|m| (m.id, m.ret.clone()))
            });
            if let Some((id, ret)) = found {
                self.emit(RelationKind::Calls, Target::Entity(id));
                return Val::obj(ret);
            }
            if owner_hint.is_none() {
                owner_hint = ext;
            }
        }
        let scope = &self.unit.scope;
        let static_owner = scope
            .static_single
            .get(name)
            .cloned()
            .or_else(|| scope.static_wildcard.first().cloned());
        if let Some(owner) = static_owner {
            return self.call_on(&Val::Type(owner), name, arity);
        }
        let target = match owner_hint {
            Some(o) => format!("{o}.{name}"),
            None => format!("{UNRESOLVED_MARK}.{name}"),
        };
        self.emit(RelationKind::Calls, Target::Name(target));
        Val::Unknown
    }

    fn call_on(&mut self, recv: &Val, name: &str, arity: usize) -> Val {
        let Some(t) = recv.ty().map(str::to_string) else {
            self.emit(
                RelationKind::Calls,
                Target::Name(format!("{UNRESOLVED_MARK}.{name}")),
            );
            return Val::Unknown;
        };
        if self.sink.index.contains_key(&t) {
            let (found, ext) = search_hierarchy(&self.sink.index, &t, |ti| {
                Self::find_method(ti, name, arity).map(|m| (m.id, m.ret.clone()))
            });
            if let Some((id, ret)) = found {
                self.emit(RelationKind::Calls, Target::Entity(id));
                return Val::obj(ret);
            }
            let owner = ext.unwrap_or(t);
            self.emit(RelationKind::Calls, Target::Name(format!("{owner}.{name}")));
            return Val::Unknown;
        }
        self.emit(RelationKind::Calls, Target::Name(format!("{t}.{name}")));
        Val::Unknown
    }

    fn field_on(&mut self, recv: &Val, name: &str) -> (Val, Option<EntityId>) {
        let Some(t) = recv.ty().map(str::to_string) else {
            return (Val::Unknown, None);
        };
        let is_type = matches!(recv, Val::Type(_));
        if self.sink.index.contains_key(&t) {
            let (found, _) = search_hierarchy(&self.sink.index, &t, |ti| {
                ti.fields
                    .iter()
                    .find(|f| f.name == name)
                    .map(|f| (f.id, f.ty.clone()))
            });
            if let Some((id, ty)) = found {
                return (Val::obj(ty), Some(id));
            }
            let nested = format!("{t}.{name}");
            if is_type && self.sink.index.contains_key(&nested) {
                return (Val::Type(nested), None);
            }
            return (Val::Unknown, None);
        }
        if is_type {
            if name.chars().next().is_some_and(char::is_uppercase) && !is_constant_name(name) {
                return (Val::Type(format!("{t}.{name}")), None);
            }
            self.emit_type(RelationKind::Uses, &t);
            if let Some(ft) = known_static_field_type(&t, name) {
                return (Val::Obj(ft.to_string()), None);
            }
        }
        (Val::Unknown, None)
    }
}

/// `MAX_VALUE`, `RED`: upper case with digits and underscores.
fn is_constant_name(name: &str) -> bool {
    name.len() > 1
        && name
            .chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

//! Per-project extraction: declarations become entities, then bodies are
//! scanned for relations once the whole project's symbol table is known.

use std::collections::HashMap;

use super::body::Body;
use super::decl::{parse_unit, CompilationUnit, Member, TypeDecl, TypeRef};
use super::index::{FieldInfo, FileScope, MethodInfo, Resolver, TypeIndex, TypeInfo};
use super::lexer::{match_brackets, tokenize, Token};
use super::sloc::count_sloc_lexed;
use crate::facts::{
    EntityId, EntityKind, FactRelation, FileSloc, ProjectFacts, RelationKind, SourceEntity, Target,
    CONSTRUCTOR_NAME, DEFAULT_PACKAGE,
};

#[derive(Debug, Clone)]
pub struct SourceFile {
    /// Relative, `/`-separated.
    pub path: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    /// `syntax` or `duplicate`.
    pub kind: &'static str,
    pub message: String,
}

pub(crate) struct Unit {
    pub path: String,
    pub toks: Vec<Token>,
    pub matching: Vec<Option<usize>>,
    pub cu: CompilationUnit,
    pub scope: FileScope,
    pub sloc: u64,
    pub unterminated_comment: Option<u32>,
}

impl Unit {
    fn new(file: &SourceFile) -> Self {
        let lexed = tokenize(&file.text);
        let sloc = count_sloc_lexed(&file.text, &lexed);
        let matching = match_brackets(&lexed.tokens);
        let cu = parse_unit(&lexed.tokens, &matching);
        let scope = FileScope::from_unit(&cu);
        Unit {
            path: file.path.clone(),
            toks: lexed.tokens,
            matching,
            cu,
            scope,
            sloc,
            unterminated_comment: lexed.unterminated_comment,
        }
    }
}

pub(crate) struct Sink {
    pub project_id: String,
    pub entities: Vec<SourceEntity>,
    pub relations: Vec<FactRelation>,
    pub index: TypeIndex,
    packages: HashMap<String, EntityId>,
    counters: HashMap<String, u32>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Extract the facts of one project from its source files. Entity ids start
/// at 1 and follow declaration order over files sorted by path.
pub fn extract_sources(
    project_id: &str,
    mut files: Vec<SourceFile>,
) -> (ProjectFacts, Vec<Diagnostic>) {
    files.sort_by(|a, b| a.path.cmp(&b.path));
    let units: Vec<Unit> = files.iter().map(Unit::new).collect();
    let mut sink = Sink::new(project_id);

    for u in &units {
        for w in &u.cu.warnings {
            sink.warn(u, w.line, "syntax", &w.message);
        }
        if let Some(line) = u.unterminated_comment {
            sink.warn(u, line, "syntax", "unterminated block comment");
        }
    }

    let mut tops: Vec<Vec<Option<String>>> = Vec::with_capacity(units.len());
    for u in &units {
        let pkg = sink.package(u);
        let mut declared = Vec::new();
        for t in &u.cu.types {
            let fqn = u.scope.qualify(&t.name);
            declared.push(sink.declare_type(u, t, &fqn, pkg, t.line).map(|_| fqn));
        }
        tops.push(declared);
    }
    for (u, declared) in units.iter().zip(&tops) {
        for (t, fqn) in u.cu.types.iter().zip(declared) {
            if let Some(fqn) = fqn {
                sink.link_type(u, t, fqn, std::slice::from_ref(fqn), &[]);
            }
        }
    }
    for (u, declared) in units.iter().zip(&tops) {
        for (t, fqn) in u.cu.types.iter().zip(declared) {
            if let Some(fqn) = fqn {
                sink.analyze_type(
                    u,
                    t,
                    fqn,
                    std::slice::from_ref(fqn),
                    &[],
                    HashMap::new(),
                    HashMap::new(),
                );
            }
        }
    }

    let file_sloc: Vec<FileSloc> = units
        .iter()
        .map(|u| FileSloc {
            path: u.path.clone(),
            sloc: u.sloc,
        })
        .collect();
    let facts = ProjectFacts {
        project_id: project_id.to_string(),
        sloc: file_sloc.iter().map(|f| f.sloc).sum(),
        entities: sink.entities,
        relations: sink.relations,
        files: file_sloc,
    };
    (facts, sink.diagnostics)
}

impl Sink {
    fn new(project_id: &str) -> Self {
        Sink {
            project_id: project_id.to_string(),
            entities: Vec::new(),
            relations: Vec::new(),
            index: TypeIndex::new(),
            packages: HashMap::new(),
            counters: HashMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn warn(&mut self, u: &Unit, line: u32, kind: &'static str, message: &str) {
        self.diagnostics.push(Diagnostic {
            file: u.path.clone(),
            line,
            kind,
            message: message.to_string(),
        });
    }

    fn add_entity(&mut self, u: &Unit, fqn: String, kind: EntityKind, line: u32) -> EntityId {
        let id = self.entities.len() as EntityId + 1;
        self.entities.push(SourceEntity {
            id,
            fqn,
            kind,
            project_id: self.project_id.clone(),
            file: u.path.clone(),
            line,
        });
        id
    }

    /// One relation per occurrence; repeated sites are kept.
    pub fn emit(&mut self, source: EntityId, kind: RelationKind, target: Target) {
        self.relations.push(FactRelation {
            source,
            kind,
            target,
        });
    }

    pub fn target_of(&self, fqn: &str) -> Target {
        match self.index.get(fqn) {
            Some(t) => Target::Entity(t.id),
            None => Target::Name(fqn.to_string()),
        }
    }

    pub fn next_counter(&mut self, enclosing: &str) -> u32 {
        let c = self.counters.entry(enclosing.to_string()).or_insert(0);
        *c += 1;
        *c
    }

    fn package(&mut self, u: &Unit) -> EntityId {
        let (name, line) = match &u.cu.package {
            Some((n, l)) => (n.clone(), *l),
            None => (DEFAULT_PACKAGE.to_string(), 1),
        };
        if let Some(&id) = self.packages.get(&name) {
            return id;
        }
        let id = self.add_entity(u, name.clone(), EntityKind::Package, line);
        self.packages.insert(name, id);
        id
    }

    /// Create the entities of a type and its members (recursively) and
    /// register it in the index. `None` if the FQN is already taken.
    pub fn declare_type(
        &mut self,
        u: &Unit,
        decl: &TypeDecl,
        fqn: &str,
        parent: EntityId,
        line: u32,
    ) -> Option<EntityId> {
        if self.index.contains_key(fqn) {
            self.warn(
                u,
                line,
                "duplicate",
                &format!("duplicate type `{fqn}` ignored"),
            );
            return None;
        }
        let id = self.add_entity(u, fqn.to_string(), decl.kind, line);
        self.emit(parent, RelationKind::Contains, Target::Entity(id));
        // reserve the name so nested lookups see the enclosing type
        self.index.insert(
            fqn.to_string(),
            TypeInfo {
                id,
                fqn: fqn.to_string(),
                kind: decl.kind,
                superclass: None,
                interfaces: Vec::new(),
                fields: Vec::new(),
                methods: Vec::new(),
                type_params: decl.type_params.clone(),
                member_ids: Vec::new(),
            },
        );
        let mut member_ids = Vec::with_capacity(decl.members.len());
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        for m in &decl.members {
            match m {
                Member::Field(f) => {
                    let fid =
                        self.add_entity(u, format!("{fqn}.{}", f.name), EntityKind::Field, f.line);
                    self.emit(id, RelationKind::Contains, Target::Entity(fid));
                    fields.push(FieldInfo {
                        name: f.name.clone(),
                        id: fid,
                        ty: None,
                    });
                    member_ids.push(fid);
                }
                Member::EnumConstant(c) => {
                    let fid =
                        self.add_entity(u, format!("{fqn}.{}", c.name), EntityKind::Field, c.line);
                    self.emit(id, RelationKind::Contains, Target::Entity(fid));
                    fields.push(FieldInfo {
                        name: c.name.clone(),
                        id: fid,
                        ty: Some(fqn.to_string()),
                    });
                    member_ids.push(fid);
                }
                Member::Method(md) => {
                    let (name, kind) = if md.is_ctor {
                        (CONSTRUCTOR_NAME, EntityKind::Constructor)
                    } else {
                        (md.name.as_str(), EntityKind::Method)
                    };
                    let mid = self.add_entity(u, format!("{fqn}.{name}"), kind, md.line);
                    self.emit(id, RelationKind::Contains, Target::Entity(mid));
                    methods.push(MethodInfo {
                        name: md.name.clone(),
                        id: mid,
                        arity: md.params.len(),
                        varargs: false,
                        ret: None,
                        is_ctor: md.is_ctor,
                    });
                    member_ids.push(mid);
                }
                Member::Type(t) => {
                    let nested = format!("{fqn}.{}", t.name);
                    let nid = self.declare_type(u, t, &nested, id, t.line);
                    member_ids.push(nid.unwrap_or(id));
                }
                Member::Initializer(_) => member_ids.push(id),
            }
        }
        let info = self.index.get_mut(fqn).expect("just inserted");
        info.member_ids = member_ids;
        info.fields = fields;
        info.methods = methods;
        Some(id)
    }

    pub fn resolve(
        &self,
        u: &Unit,
        chain: &[String],
        tparams: &[String],
        local_types: &HashMap<String, String>,
        ty: &TypeRef,
    ) -> Option<String> {
        let (first, rest) = match ty.name.split_once('.') {
            Some((f, r)) => (f, Some(r)),
            None => (ty.name.as_str(), None),
        };
        if let Some(local) = local_types.get(first) {
            return Some(match rest {
                Some(r) => format!("{local}.{r}"),
                None => local.clone(),
            });
        }
        Resolver {
            index: &self.index,
            file: &u.scope,
            chain,
            type_params: tparams,
        }
        .type_ref(ty)
    }

    /// Emit `kind` toward the type of `ty` and USES toward its type arguments.
    #[allow(clippy::too_many_arguments)]
    pub fn type_relation(
        &mut self,
        u: &Unit,
        chain: &[String],
        tparams: &[String],
        local_types: &HashMap<String, String>,
        source: EntityId,
        kind: RelationKind,
        ty: &TypeRef,
    ) -> Option<String> {
        let fqn = self.resolve(u, chain, tparams, local_types, ty);
        if let Some(f) = &fqn {
            let target = self.target_of(f);
            self.emit(source, kind, target);
        }
        for a in &ty.args {
            self.type_relation(
                u,
                chain,
                tparams,
                local_types,
                source,
                RelationKind::Uses,
                a,
            );
        }
        fqn
    }

    /// Declaration-level relations: supertypes, field types, signatures.
    pub fn link_type(
        &mut self,
        u: &Unit,
        decl: &TypeDecl,
        fqn: &str,
        chain: &[String],
        outer_tparams: &[String],
    ) {
        let Some(info) = self.index.get(fqn) else {
            return;
        };
        let id = info.id;
        let member_ids = info.member_ids.clone();
        let mut tparams = outer_tparams.to_vec();
        tparams.extend(decl.type_params.iter().cloned());
        let none = HashMap::new();

        let mut superclass = None;
        let mut interfaces = Vec::new();
        for e in &decl.extends {
            let t = self.type_relation(u, chain, &tparams, &none, id, RelationKind::Extends, e);
            if let Some(t) = t {
                if decl.kind == EntityKind::Interface {
                    interfaces.push(t);
                } else {
                    superclass = Some(t);
                }
            }
        }
        for i in &decl.implements {
            if let Some(t) =
                self.type_relation(u, chain, &tparams, &none, id, RelationKind::Implements, i)
            {
                interfaces.push(t);
            }
        }
        if let Some(info) = self.index.get_mut(fqn) {
            if superclass.is_some() {
                info.superclass = superclass;
            }
            info.interfaces.extend(interfaces);
        }

        let mut field_types = Vec::new();
        let mut returns = Vec::new();
        for (m, &mid) in decl.members.iter().zip(&member_ids) {
            match m {
                Member::Field(f) => {
                    let t = self.type_relation(
                        u,
                        chain,
                        &tparams,
                        &none,
                        mid,
                        RelationKind::Holds,
                        &f.ty,
                    );
                    field_types.push(t.filter(|_| f.ty.dims == 0));
                }
                Member::EnumConstant(_) => {
                    self.emit(mid, RelationKind::Holds, Target::Entity(id));
                    field_types.push(Some(fqn.to_string()));
                }
                Member::Method(md) => {
                    let mut mtp = tparams.clone();
                    mtp.extend(md.type_params.iter().cloned());
                    let mut ret = None;
                    if let Some(r) = &md.ret {
                        if !r.is_void() {
                            let t = self.type_relation(
                                u,
                                chain,
                                &mtp,
                                &none,
                                mid,
                                RelationKind::Uses,
                                r,
                            );
                            ret = t.filter(|_| r.dims == 0);
                        }
                    }
                    returns.push(ret);
                    for p in &md.params {
                        self.type_relation(u, chain, &mtp, &none, mid, RelationKind::Uses, &p.ty);
                    }
                    for t in &md.throws {
                        self.type_relation(u, chain, &mtp, &none, mid, RelationKind::Uses, t);
                    }
                }
                Member::Type(t) => {
                    let nested = format!("{fqn}.{}", t.name);
                    if self.index.get(&nested).map(|i| i.id) == Some(mid) {
                        let mut c = vec![nested.clone()];
                        c.extend(chain.iter().cloned());
                        self.link_type(u, t, &nested, &c, &tparams);
                    }
                }
                Member::Initializer(_) => {}
            }
        }
        if let Some(info) = self.index.get_mut(fqn) {
            for (f, t) in info.fields.iter_mut().zip(field_types) {
                f.ty = t;
            }
            for (m, r) in info.methods.iter_mut().zip(returns) {
                m.ret = r;
            }
        }
    }

    /// Scan initializers and bodies of a type and its nested types.
    #[allow(clippy::too_many_arguments)]
    pub fn analyze_type(
        &mut self,
        u: &Unit,
        decl: &TypeDecl,
        fqn: &str,
        chain: &[String],
        outer_tparams: &[String],
        captured: HashMap<String, Option<String>>,
        local_types: HashMap<String, String>,
    ) {
        let Some(info) = self.index.get(fqn) else {
            return;
        };
        let id = info.id;
        let member_ids = info.member_ids.clone();
        let mut tparams = outer_tparams.to_vec();
        tparams.extend(decl.type_params.iter().cloned());

        for (m, &mid) in decl.members.iter().zip(&member_ids) {
            match m {
                Member::Field(f) => {
                    if let Some(s) = f.init {
                        let mut b =
                            Body::new(self, u, chain, &tparams, mid, &captured, &local_types);
                        b.scan_list(s.start, s.end);
                    }
                }
                Member::EnumConstant(c) => {
                    let mut b = Body::new(self, u, chain, &tparams, mid, &captured, &local_types);
                    if let Some(a) = c.args {
                        b.scan_list(a.start, a.end);
                    }
                    if let Some(body) = c.body {
                        b.anonymous(body, Some(fqn.to_string()), c.line);
                    }
                }
                Member::Method(md) => {
                    let Some(s) = md.body else { continue };
                    let mut mtp = tparams.clone();
                    mtp.extend(md.type_params.iter().cloned());
                    let params: Vec<(String, Option<String>)> = md
                        .params
                        .iter()
                        .map(|p| {
                            let t = self.resolve(u, chain, &mtp, &local_types, &p.ty);
                            (p.name.clone(), t.filter(|_| p.ty.dims == 0))
                        })
                        .collect();
                    let mut b = Body::new(self, u, chain, &mtp, mid, &captured, &local_types);
                    for (n, t) in params {
                        b.declare(&n, t);
                    }
                    b.scan_block(s.start, s.end);
                }
                Member::Initializer(s) => {
                    let mut b = Body::new(self, u, chain, &tparams, id, &captured, &local_types);
                    b.scan_block(s.start, s.end);
                }
                Member::Type(t) => {
                    let nested = format!("{fqn}.{}", t.name);
                    if self.index.get(&nested).map(|i| i.id) == Some(mid) {
                        let mut c = vec![nested.clone()];
                        c.extend(chain.iter().cloned());
                        self.analyze_type(
                            u,
                            t,
                            &nested,
                            &c,
                            &tparams,
                            captured.clone(),
                            local_types.clone(),
                        );
                    }
                }
            }
        }
    }
}

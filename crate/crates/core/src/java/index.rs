//! Project-wide symbol table and import-based name resolution.

use std::collections::HashMap;

use super::decl::{CompilationUnit, TypeRef};
use super::lexer::is_primitive;
use crate::facts::{EntityId, EntityKind, UNRESOLVED_MARK};

#[derive(Debug, Clone)]
pub struct FieldInfo {
    pub name: String,
    pub id: EntityId,
    pub ty: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MethodInfo {
    pub name: String,
    pub id: EntityId,
    pub arity: usize,
    pub varargs: bool,
    pub ret: Option<String>,
    pub is_ctor: bool,
}

#[derive(Debug, Clone)]
pub struct TypeInfo {
    pub id: EntityId,
    pub fqn: String,
    pub kind: EntityKind,
    pub superclass: Option<String>,
    pub interfaces: Vec<String>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub type_params: Vec<String>,
    /// Entity id for each declared member, aligned with the declaration's
    /// member list (initializers map to the type itself).
    pub member_ids: Vec<EntityId>,
}

pub type TypeIndex = HashMap<String, TypeInfo>;

/// Import table of one compilation unit.
#[derive(Debug, Clone, Default)]
pub struct FileScope {
    /// Empty for the default package.
    pub package: String,
    pub single: HashMap<String, String>,
    pub wildcard: Vec<String>,
    pub static_single: HashMap<String, String>,
    pub static_wildcard: Vec<String>,
}

impl FileScope {
    pub fn from_unit(unit: &CompilationUnit) -> Self {
        let mut s = FileScope {
            package: unit
                .package
                .as_ref()
                .map(|p| p.0.clone())
                .unwrap_or_default(),
            ..Default::default()
        };
        for imp in &unit.imports {
            match (imp.is_static, imp.wildcard) {
                (false, false) => {
                    let simple = imp.path.rsplit('.').next().unwrap_or(&imp.path);
                    s.single.insert(simple.to_string(), imp.path.clone());
                }
                (false, true) => s.wildcard.push(imp.path.clone()),
                (true, false) => {
                    if let Some((owner, member)) = imp.path.rsplit_once('.') {
                        s.static_single
                            .insert(member.to_string(), owner.to_string());
                    }
                }
                (true, true) => s.static_wildcard.push(imp.path.clone()),
            }
        }
        s
    }

    pub fn qualify(&self, simple: &str) -> String {
        if self.package.is_empty() {
            simple.to_string()
        } else {
            format!("{}.{simple}", self.package)
        }
    }
}

/// Commonly used members of `java.lang`, which is imported implicitly.
const JAVA_LANG: &[&str] = &[
    "AbstractMethodError",
    "Appendable",
    "ArithmeticException",
    "ArrayIndexOutOfBoundsException",
    "ArrayStoreException",
    "AssertionError",
    "AutoCloseable",
    "Boolean",
    "Byte",
    "CharSequence",
    "Character",
    "Class",
    "ClassCastException",
    "ClassLoader",
    "ClassNotFoundException",
    "CloneNotSupportedException",
    "Cloneable",
    "Comparable",
    "Deprecated",
    "Double",
    "Enum",
    "Error",
    "Exception",
    "ExceptionInInitializerError",
    "Float",
    "FunctionalInterface",
    "IllegalAccessException",
    "IllegalArgumentException",
    "IllegalMonitorStateException",
    "IllegalStateException",
    "IndexOutOfBoundsException",
    "InheritableThreadLocal",
    "InstantiationException",
    "Integer",
    "InternalError",
    "InterruptedException",
    "Iterable",
    "LinkageError",
    "Long",
    "Math",
    "NegativeArraySizeException",
    "NoClassDefFoundError",
    "NoSuchFieldException",
    "NoSuchMethodException",
    "NullPointerException",
    "Number",
    "NumberFormatException",
    "Object",
    "OutOfMemoryError",
    "Override",
    "Package",
    "Process",
    "ProcessBuilder",
    "Readable",
    "Record",
    "ReflectiveOperationException",
    "Runnable",
    "Runtime",
    "RuntimeException",
    "SafeVarargs",
    "SecurityException",
    "Short",
    "StackOverflowError",
    "StackTraceElement",
    "StrictMath",
    "String",
    "StringBuffer",
    "StringBuilder",
    "StringIndexOutOfBoundsException",
    "SuppressWarnings",
    "System",
    "Thread",
    "ThreadGroup",
    "ThreadLocal",
    "Throwable",
    "TypeNotPresentException",
    "UnsupportedOperationException",
    "VirtualMachineError",
    "Void",
];

/// Static fields of JDK classes whose type is worth knowing for receiver
/// resolution (`System.out.println`).
const KNOWN_STATIC_FIELDS: &[(&str, &str)] = &[
    ("java.lang.System.out", "java.io.PrintStream"),
    ("java.lang.System.err", "java.io.PrintStream"),
    ("java.lang.System.in", "java.io.InputStream"),
];

pub fn known_static_field_type(owner: &str, field: &str) -> Option<&'static str> {
    KNOWN_STATIC_FIELDS
        .iter()
        .find(|(f, _)| f.strip_prefix(owner).and_then(|r| r.strip_prefix('.')) == Some(field))
        .map(|(_, t)| *t)
}

pub fn primitive_wrapper(name: &str) -> Option<&'static str> {
    Some(match name {
        "boolean" => "java.lang.Boolean",
        "byte" => "java.lang.Byte",
        "char" => "java.lang.Character",
        "short" => "java.lang.Short",
        "int" => "java.lang.Integer",
        "long" => "java.lang.Long",
        "float" => "java.lang.Float",
        "double" => "java.lang.Double",
        _ => return None,
    })
}

/// Everything needed to resolve a simple or qualified type name at some
/// point of the source.
pub struct Resolver<'a> {
    pub index: &'a TypeIndex,
    pub file: &'a FileScope,
    /// Enclosing types, innermost first.
    pub chain: &'a [String],
    pub type_params: &'a [String],
}

impl<'a> Resolver<'a> {
    /// Resolve a name known to denote a type. Unknown names come back
    /// marked unresolved (`?Name`). Type variables and `void` give `None`.
    pub fn type_name(&self, name: &str) -> Option<String> {
        if name == "void" || name == "var" {
            return None;
        }
        if let Some(w) = primitive_wrapper(name) {
            return Some(w.to_string());
        }
        if let Some(found) = self.lookup(name) {
            return Some(found);
        }
        if name.contains('.') {
            // fully qualified
            return Some(name.to_string());
        }
        if self.type_params.iter().any(|p| p == name) {
            return None;
        }
        Some(format!("{UNRESOLVED_MARK}{name}"))
    }

    /// Resolve a type reference, looking through array dimensions.
    pub fn type_ref(&self, t: &TypeRef) -> Option<String> {
        if !t.name.contains('.') && self.type_params.contains(&t.name) {
            return None;
        }
        self.type_name(&t.name)
    }

    /// Strict lookup: `Some` only if the name is a declared, imported, or
    /// `java.lang` type. Qualified names resolve through their first segment.
    pub fn lookup(&self, name: &str) -> Option<String> {
        if let Some((first, rest)) = name.split_once('.') {
            if let Some(head) = self.lookup_simple(first) {
                let fqn = format!("{head}.{rest}");
                return Some(fqn);
            }
            if self.index.contains_key(name) {
                return Some(name.to_string());
            }
            return None;
        }
        self.lookup_simple(name)
    }

    fn lookup_simple(&self, name: &str) -> Option<String> {
        if is_primitive(name) || self.type_params.iter().any(|p| p == name) {
            return None;
        }
        // member types of enclosing types and their supertypes
        for enc in self.chain {
            if enc.rsplit(['.', '$']).next() == Some(name) && self.index.contains_key(enc) {
                return Some(enc.clone());
            }
            let mut cur = Some(enc.clone());
            let mut guard = 0;
            while let Some(t) = cur {
                let cand = format!("{t}.{name}");
                if self.index.contains_key(&cand) {
                    return Some(cand);
                }
                cur = self.index.get(&t).and_then(|i| i.superclass.clone());
                guard += 1;
                if guard > 32 {
                    break;
                }
            }
        }
        if let Some(fqn) = self.file.single.get(name) {
            return Some(fqn.clone());
        }
        let same_pkg = self.file.qualify(name);
        if self.index.contains_key(&same_pkg) {
            return Some(same_pkg);
        }
        for w in &self.file.wildcard {
            let cand = format!("{w}.{name}");
            if self.index.contains_key(&cand) {
                return Some(cand);
            }
        }
        if JAVA_LANG.contains(&name) {
            return Some(format!("java.lang.{name}"));
        }
        None
    }
}

impl TypeInfo {
    pub fn is_interface(&self) -> bool {
        matches!(self.kind, EntityKind::Interface | EntityKind::Annotation)
    }
}

/// Walk `start` and its project-internal superclasses (and superinterfaces),
/// returning the first match of `f`. Also returns the first external
/// ancestor seen, which owns any member not found internally.
pub fn search_hierarchy<'i, T>(
    index: &'i TypeIndex,
    start: &str,
    mut f: impl FnMut(&'i TypeInfo) -> Option<T>,
) -> (Option<T>, Option<String>) {
    let mut queue = vec![start.to_string()];
    let mut seen: Vec<String> = Vec::new();
    let mut external: Option<String> = None;
    while let Some(t) = queue.pop() {
        if seen.contains(&t) || seen.len() > 64 {
            continue;
        }
        seen.push(t.clone());
        match index.get(&t) {
            Some(info) => {
                if let Some(found) = f(info) {
                    return (Some(found), external);
                }
                for i in info.interfaces.iter().rev() {
                    queue.push(i.clone());
                }
                if let Some(s) = &info.superclass {
                    queue.push(s.clone());
                }
            }
            None => {
                if external.is_none() && t != start {
                    external = Some(t);
                }
            }
        }
    }
    (None, external)
}

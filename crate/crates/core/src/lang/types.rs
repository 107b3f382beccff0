//! Static types of MiniJ and the class table used for subtyping,
//! member lookup and overload resolution.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the implicit root class.
pub const OBJECT: &str = "Object";
/// Name of the single catchable exception class.
pub const EXCEPTION: &str = "Exception";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LangType {
    Boolean,
    Int,
    Float,
    Str,
    Void,
    Array(Box<LangType>),
    Class(String),
    Null,
}

impl LangType {
    pub fn class(name: impl Into<String>) -> Self {
        LangType::Class(name.into())
    }

    pub fn array_of(elem: LangType) -> Self {
        LangType::Array(Box::new(elem))
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, LangType::Boolean | LangType::Int | LangType::Float)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, LangType::Int | LangType::Float)
    }

    /// Types whose values may be `null`.
    pub fn is_reference(&self) -> bool {
        matches!(
            self,
            LangType::Str | LangType::Array(_) | LangType::Class(_) | LangType::Null
        )
    }

    /// Parse a type as written in source (`int`, `String`, `Foo[]`, ...).
    pub fn from_source(text: &str) -> Self {
        if let Some(inner) = text.strip_suffix("[]") {
            return LangType::array_of(LangType::from_source(inner));
        }
        match text {
            "boolean" => LangType::Boolean,
            "int" => LangType::Int,
            "float" => LangType::Float,
            "String" => LangType::Str,
            "void" => LangType::Void,
            "null" => LangType::Null,
            other => LangType::Class(other.to_string()),
        }
    }
}

impl fmt::Display for LangType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LangType::Boolean => f.write_str("boolean"),
            LangType::Int => f.write_str("int"),
            LangType::Float => f.write_str("float"),
            LangType::Str => f.write_str("String"),
            LangType::Void => f.write_str("void"),
            LangType::Array(elem) => write!(f, "{elem}[]"),
            LangType::Class(name) => f.write_str(name),
            LangType::Null => f.write_str("null"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldInfo {
    pub name: String,
    pub ty: LangType,
    pub owner: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodInfo {
    pub name: String,
    pub params: Vec<LangType>,
    pub ret: LangType,
    pub owner: String,
    /// Index of the source file declaring the method; `None` for builtins.
    pub file: Option<usize>,
    /// Preorder id of the declaration node inside its file.
    pub decl: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassInfo {
    pub name: String,
    pub parent: Option<String>,
    pub fields: Vec<FieldInfo>,
    pub methods: Vec<MethodInfo>,
    pub ctors: Vec<MethodInfo>,
    pub file: Option<usize>,
    pub decl: Option<u32>,
}

/// All classes of a program, including the builtin `Object` and `Exception`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTable {
    classes: BTreeMap<String, ClassInfo>,
}

impl Default for ClassTable {
    fn default() -> Self {
        Self::new()
    }
}

impl ClassTable {
    pub fn new() -> Self {
        let mut classes = BTreeMap::new();
        classes.insert(
            OBJECT.to_string(),
            ClassInfo {
                name: OBJECT.to_string(),
                parent: None,
                fields: Vec::new(),
                methods: vec![MethodInfo {
                    name: "clone".to_string(),
                    params: Vec::new(),
                    ret: LangType::class(OBJECT),
                    owner: OBJECT.to_string(),
                    file: None,
                    decl: None,
                }],
                ctors: Vec::new(),
                file: None,
                decl: None,
            },
        );
        classes.insert(
            EXCEPTION.to_string(),
            ClassInfo {
                name: EXCEPTION.to_string(),
                parent: Some(OBJECT.to_string()),
                fields: Vec::new(),
                methods: Vec::new(),
                ctors: Vec::new(),
                file: None,
                decl: None,
            },
        );
        ClassTable { classes }
    }

    pub fn insert(&mut self, info: ClassInfo) {
        self.classes.insert(info.name.clone(), info);
    }

    pub fn get(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut ClassInfo> {
        self.classes.get_mut(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    /// User-declared classes (builtins excluded), in name order.
    pub fn user_classes(&self) -> impl Iterator<Item = &ClassInfo> {
        self.classes.values().filter(|c| c.file.is_some())
    }

    /// `name` followed by its ancestors up to `Object`.
    pub fn ancestry(&self, name: &str) -> Vec<String> {
        let mut chain = Vec::new();
        let mut cur = Some(name.to_string());
        while let Some(c) = cur {
            if chain.contains(&c) {
                break;
            }
            cur = self.classes.get(&c).and_then(|i| i.parent.clone());
            chain.push(c);
        }
        chain
    }

    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        self.ancestry(sub).iter().any(|c| c == sup)
    }

    /// Assignment compatibility: same type, `int` to `float` widening,
    /// subclass to superclass, or `null` to any reference type.
    pub fn compatible(&self, from: &LangType, to: &LangType) -> bool {
        if from == to {
            return true;
        }
        match (from, to) {
            (LangType::Int, LangType::Float) => true,
            (LangType::Null, t) => t.is_reference() && *t != LangType::Null,
            (LangType::Class(a), LangType::Class(b)) => self.is_subclass(a, b),
            _ => false,
        }
    }

    /// Types related by subtyping in either direction; used for casts and
    /// `instanceof`.
    pub fn related(&self, a: &LangType, b: &LangType) -> bool {
        self.compatible(a, b) || self.compatible(b, a)
    }

    pub fn field(&self, class: &str, name: &str) -> Option<&FieldInfo> {
        for c in self.ancestry(class) {
            if let Some(f) = self.classes.get(&c).and_then(|i| i.fields.iter().find(|f| f.name == name)) {
                return Some(f);
            }
        }
        None
    }

    /// All fields visible in `class`, nearest declaration first.
    pub fn visible_fields(&self, class: &str) -> Vec<&FieldInfo> {
        let mut out: Vec<&FieldInfo> = Vec::new();
        for c in self.ancestry(class) {
            if let Some(info) = self.classes.get(&c) {
                for f in &info.fields {
                    if !out.iter().any(|g| g.name == f.name) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    /// Methods callable on an instance of `class`: own and inherited, with
    /// overridden signatures collapsed to the most-derived declaration.
    pub fn visible_methods(&self, class: &str) -> Vec<&MethodInfo> {
        let mut out: Vec<&MethodInfo> = Vec::new();
        for c in self.ancestry(class) {
            if let Some(info) = self.classes.get(&c) {
                for m in &info.methods {
                    if !out.iter().any(|g| g.name == m.name && g.params == m.params) {
                        out.push(m);
                    }
                }
            }
        }
        out
    }

    /// Overload resolution among `candidates` for argument types `args`:
    /// applicable by arity and per-argument compatibility, then most specific.
    pub fn resolve<'a>(
        &self,
        candidates: &[&'a MethodInfo],
        args: &[LangType],
    ) -> Result<&'a MethodInfo, ResolveError> {
        let applicable: Vec<&MethodInfo> = candidates
            .iter()
            .copied()
            .filter(|m| {
                m.params.len() == args.len()
                    && m.params.iter().zip(args).all(|(p, a)| self.compatible(a, p))
            })
            .collect();
        match applicable.len() {
            0 => Err(ResolveError::NoMatch),
            1 => Ok(applicable[0]),
            _ => {
                let most_specific: Vec<&MethodInfo> = applicable
                    .iter()
                    .copied()
                    .filter(|m| {
                        applicable.iter().all(|o| {
                            m.params.iter().zip(&o.params).all(|(p, q)| self.compatible(p, q))
                        })
                    })
                    .collect();
                match most_specific.as_slice() {
                    [one] => Ok(one),
                    _ => Err(ResolveError::Ambiguous),
                }
            }
        }
    }

    /// Find the implementation of `name(params)` starting at the runtime class.
    pub fn dispatch(&self, runtime_class: &str, name: &str, params: &[LangType]) -> Option<&MethodInfo> {
        for c in self.ancestry(runtime_class) {
            if let Some(m) = self
                .classes
                .get(&c)
                .and_then(|i| i.methods.iter().find(|m| m.name == name && m.params == params))
            {
                return Some(m);
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolveError {
    NoMatch,
    Ambiguous,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_with_hierarchy() -> ClassTable {
        let mut t = ClassTable::new();
        for (name, parent) in [("Base", OBJECT), ("Derived", "Base")] {
            t.insert(ClassInfo {
                name: name.into(),
                parent: Some(parent.into()),
                fields: vec![],
                methods: vec![],
                ctors: vec![],
                file: Some(0),
                decl: None,
            });
        }
        t
    }

    #[test]
    fn compatibility_rules() {
        let t = table_with_hierarchy();
        assert!(t.compatible(&LangType::Int, &LangType::Int));
        assert!(t.compatible(&LangType::Int, &LangType::Float));
        assert!(!t.compatible(&LangType::Float, &LangType::Int));
        assert!(t.compatible(&LangType::class("Derived"), &LangType::class("Base")));
        assert!(!t.compatible(&LangType::class("Base"), &LangType::class("Derived")));
        assert!(t.compatible(&LangType::Null, &LangType::Str));
        assert!(!t.compatible(&LangType::Null, &LangType::Int));
        let ia = LangType::array_of(LangType::Int);
        let fa = LangType::array_of(LangType::Float);
        assert!(t.compatible(&LangType::Null, &ia));
        assert!(!t.compatible(&ia, &fa));
    }

    #[test]
    fn type_names_round_trip() {
        for src in ["int", "float", "boolean", "String", "void", "Foo", "int[]", "Foo[][]"] {
            assert_eq!(LangType::from_source(src).to_string(), src);
        }
    }

    #[test]
    fn overload_prefers_most_specific() {
        let t = table_with_hierarchy();
        let mk = |params: Vec<LangType>| MethodInfo {
            name: "f".into(),
            params,
            ret: LangType::Void,
            owner: "Base".into(),
            file: None,
            decl: None,
        };
        let a = mk(vec![LangType::Int]);
        let b = mk(vec![LangType::Int, LangType::Int]);
        let c = mk(vec![LangType::Float]);
        let cands = vec![&a, &b, &c];
        assert_eq!(t.resolve(&cands, &[LangType::Int]).unwrap(), &a);
        assert_eq!(t.resolve(&cands, &[LangType::Float]).unwrap(), &c);
        assert_eq!(t.resolve(&cands, &[LangType::Str]), Err(ResolveError::NoMatch));
    }
}

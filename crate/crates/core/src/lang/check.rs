//! Static checking: builds the class table, resolves names and overloads,
//! and annotates every expression with its [`LangType`].

use thiserror::Error;

use crate::ast::{BinOp, Callee, Kind, Lit, Node, NodeId, Span, UnOp};

use super::types::{ClassInfo, ClassTable, FieldInfo, LangType, MethodInfo, ResolveError, EXCEPTION, OBJECT};
use super::SourceFile;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{file}@{}: {message}", span.start)]
pub struct TypeError {
    pub file: String,
    pub span: Span,
    pub node: NodeId,
    pub message: String,
}

/// A well-typed program: annotated trees plus the class table.
#[derive(Clone, Debug)]
pub struct CheckedProgram {
    pub paths: Vec<String>,
    pub asts: Vec<Node>,
    pub classes: ClassTable,
}

impl CheckedProgram {
    pub fn file_index(&self, path: &str) -> Option<usize> {
        self.paths.iter().position(|p| p == path)
    }
}

/// Check a single compilation unit and return its annotated tree.
pub fn type_check(ast: &Node) -> Result<Node, Vec<TypeError>> {
    let file = SourceFile { path: "<input>".to_string(), text: String::new(), ast: ast.clone() };
    let mut checked = check_program(std::slice::from_ref(&file))?;
    Ok(checked.asts.remove(0))
}

/// Check all files of a program together (classes may reference each other
/// across files).
pub fn check_program(files: &[SourceFile]) -> Result<CheckedProgram, Vec<TypeError>> {
    let paths: Vec<String> = files.iter().map(|f| f.path.clone()).collect();
    let mut asts: Vec<Node> = files.iter().map(|f| f.ast.clone()).collect();
    let mut errors = Vec::new();
    let classes = build_class_table(&paths, &asts, &mut errors);
    if errors.is_empty() {
        for (i, ast) in asts.iter_mut().enumerate() {
            let mut ck = Checker::new(&classes, &paths[i]);
            ck.unit(ast);
            errors.extend(ck.errors);
        }
    }
    if errors.is_empty() {
        Ok(CheckedProgram { paths, asts, classes })
    } else {
        Err(errors)
    }
}

fn err(file: &str, n: &Node, message: impl Into<String>) -> TypeError {
    TypeError { file: file.to_string(), span: n.span, node: n.id, message: message.into() }
}

fn build_class_table(paths: &[String], asts: &[Node], errors: &mut Vec<TypeError>) -> ClassTable {
    let mut table = ClassTable::new();
    for (fi, ast) in asts.iter().enumerate() {
        let file = &paths[fi];
        for class in &ast.children {
            let Kind::Class { name, parent } = &class.kind else { continue };
            if table.contains(name) || name == "String" {
                errors.push(err(file, class, format!("duplicate class `{name}`")));
                continue;
            }
            let mut info = ClassInfo {
                name: name.clone(),
                parent: Some(parent.clone().unwrap_or_else(|| OBJECT.to_string())),
                fields: Vec::new(),
                methods: Vec::new(),
                ctors: Vec::new(),
                file: Some(fi),
                decl: Some(class.id),
            };
            for m in &class.children {
                match &m.kind {
                    Kind::Field { ty, name: fname } => {
                        if info.fields.iter().any(|f| &f.name == fname) {
                            errors.push(err(file, m, format!("duplicate field `{fname}`")));
                        }
                        info.fields.push(FieldInfo { name: fname.clone(), ty: ty.clone(), owner: name.clone() });
                    }
                    Kind::Method { ret, name: mname } => {
                        let params = param_types(m);
                        if info.methods.iter().any(|o| &o.name == mname && o.params == params) {
                            errors.push(err(file, m, format!("duplicate method `{mname}`")));
                        }
                        info.methods.push(MethodInfo {
                            name: mname.clone(),
                            params,
                            ret: ret.clone(),
                            owner: name.clone(),
                            file: Some(fi),
                            decl: Some(m.id),
                        });
                    }
                    Kind::Constructor { .. } => {
                        let params = param_types(m);
                        if info.ctors.iter().any(|o| o.params == params) {
                            errors.push(err(file, m, "duplicate constructor"));
                        }
                        info.ctors.push(MethodInfo {
                            name: name.clone(),
                            params,
                            ret: LangType::Void,
                            owner: name.clone(),
                            file: Some(fi),
                            decl: Some(m.id),
                        });
                    }
                    _ => {}
                }
            }
            table.insert(info);
        }
    }
    if !errors.is_empty() {
        return table;
    }
    // hierarchy and member signatures
    let user: Vec<ClassInfo> = table.user_classes().cloned().collect();
    for info in &user {
        let fi = info.file.unwrap_or(0);
        let file = &paths[fi];
        let class_node = asts[fi].find(info.decl.unwrap_or(0)).expect("class node");
        let parent = info.parent.as_deref().unwrap_or(OBJECT);
        if !table.contains(parent) {
            errors.push(err(file, class_node, format!("unknown superclass `{parent}`")));
            continue;
        }
        let chain = table.ancestry(&info.name);
        if chain.last().map(String::as_str) != Some(OBJECT) {
            errors.push(err(file, class_node, format!("cyclic inheritance involving `{}`", info.name)));
            continue;
        }
        for f in &info.fields {
            if !type_exists(&table, &f.ty) || f.ty == LangType::Void {
                errors.push(err(file, class_node, format!("unknown type `{}`", f.ty)));
            }
            if chain[1..].iter().any(|c| table.get(c).is_some_and(|ci| ci.fields.iter().any(|g| g.name == f.name))) {
                errors.push(err(file, class_node, format!("field `{}` hides an inherited field", f.name)));
            }
        }
        for m in info.methods.iter().chain(&info.ctors) {
            let node = asts[fi].find(m.decl.unwrap_or(0)).expect("method node");
            for p in &m.params {
                if !type_exists(&table, p) || *p == LangType::Void {
                    errors.push(err(file, node, format!("unknown parameter type `{p}`")));
                }
            }
            if !type_exists(&table, &m.ret) && m.ret != LangType::Void {
                errors.push(err(file, node, format!("unknown return type `{}`", m.ret)));
            }
        }
        for m in &info.methods {
            let node = asts[fi].find(m.decl.unwrap_or(0)).expect("method node");
            if let Some(over) = table.dispatch(parent, &m.name, &m.params) {
                if !table.compatible(&m.ret, &over.ret) {
                    errors.push(err(
                        file,
                        node,
                        format!("`{}` overrides a method returning `{}` with `{}`", m.name, over.ret, m.ret),
                    ));
                }
            }
        }
    }
    table
}

fn param_types(m: &Node) -> Vec<LangType> {
    m.children
        .iter()
        .filter_map(|c| match &c.kind {
            Kind::Param { ty, .. } => Some(ty.clone()),
            _ => None,
        })
        .collect()
}

fn type_exists(table: &ClassTable, ty: &LangType) -> bool {
    match ty {
        LangType::Class(c) => table.contains(c),
        LangType::Array(e) => type_exists(table, e) && **e != LangType::Void,
        _ => true,
    }
}

/// Whether a statement definitely ends by `return` (or never completes).
pub fn definitely_returns(s: &Node) -> bool {
    match &s.kind {
        Kind::Return => true,
        Kind::Block => s.children.iter().any(definitely_returns),
        Kind::If => s.children.len() == 3 && definitely_returns(&s.children[1]) && definitely_returns(&s.children[2]),
        Kind::While => is_true_literal(&s.children[0]) && !contains_break(&s.children[1]),
        Kind::For => s.children[1].kind == Kind::Empty && !contains_break(&s.children[3]),
        Kind::Try => s.children[0].children.iter().any(definitely_returns)
            && s.children[1..].iter().all(|c| c.children[0].children.iter().any(definitely_returns)),
        _ => false,
    }
}

/// Whether control can never fall through `s` to the next statement.
fn completes_abruptly(s: &Node) -> bool {
    match &s.kind {
        Kind::Return | Kind::Break | Kind::Continue => true,
        Kind::Block => s.children.iter().any(completes_abruptly),
        Kind::If => {
            s.children.len() == 3 && completes_abruptly(&s.children[1]) && completes_abruptly(&s.children[2])
        }
        _ => definitely_returns(s),
    }
}

fn is_true_literal(e: &Node) -> bool {
    match &e.kind {
        Kind::Literal(Lit::Bool(true)) => true,
        Kind::Paren => is_true_literal(&e.children[0]),
        _ => false,
    }
}

/// `break` that targets the loop whose body is `s`.
fn contains_break(s: &Node) -> bool {
    match &s.kind {
        Kind::Break => true,
        Kind::While | Kind::For => false,
        _ => s.children.iter().any(contains_break),
    }
}

struct Checker<'a> {
    classes: &'a ClassTable,
    file: &'a str,
    errors: Vec<TypeError>,
    class: String,
    ret: LangType,
    scopes: Vec<Vec<(String, LangType)>>,
    loops: usize,
}

impl<'a> Checker<'a> {
    fn new(classes: &'a ClassTable, file: &'a str) -> Self {
        Checker {
            classes,
            file,
            errors: Vec::new(),
            class: String::new(),
            ret: LangType::Void,
            scopes: Vec::new(),
            loops: 0,
        }
    }

    fn error(&mut self, n: &Node, message: impl Into<String>) {
        self.errors.push(err(self.file, n, message));
    }

    fn lookup_local(&self, name: &str) -> Option<&LangType> {
        self.scopes.iter().rev().flat_map(|s| s.iter().rev()).find(|(n, _)| n == name).map(|(_, t)| t)
    }

    fn declare(&mut self, n: &Node, name: &str, ty: LangType) {
        if self.lookup_local(name).is_some() {
            self.error(n, format!("variable `{name}` is already defined"));
        }
        if let Some(scope) = self.scopes.last_mut() {
            scope.push((name.to_string(), ty));
        }
    }

    fn check_decl_type(&mut self, n: &Node, ty: &LangType) -> bool {
        if *ty == LangType::Void || !type_exists(self.classes, ty) {
            self.error(n, format!("unknown type `{ty}`"));
            return false;
        }
        true
    }

    fn unit(&mut self, ast: &mut Node) {
        for class in &mut ast.children {
            let Kind::Class { name, .. } = &class.kind else { continue };
            self.class = name.clone();
            for m in &mut class.children {
                self.member(m);
            }
        }
    }

    fn member(&mut self, m: &mut Node) {
        match m.kind.clone() {
            Kind::Field { ty, .. } => {
                if let Some(init) = m.children.first_mut() {
                    self.scopes = vec![Vec::new()];
                    self.expect_assignable(init, &ty);
                }
            }
            Kind::Method { ret, .. } => {
                self.ret = ret.clone();
                self.body(m);
                let body = m.children.last().expect("method body");
                if ret != LangType::Void && !definitely_returns(body) {
                    let shown = m.clone();
                    self.error(&shown, "missing return statement");
                }
            }
            Kind::Constructor { .. } => {
                self.ret = LangType::Void;
                self.body(m);
            }
            _ => {}
        }
    }

    fn body(&mut self, m: &mut Node) {
        self.scopes = vec![Vec::new()];
        self.loops = 0;
        let n = m.children.len();
        for p in &m.children[..n - 1] {
            if let Kind::Param { ty, name } = &p.kind {
                self.declare(p, name, ty.clone());
            }
        }
        self.stmt(&mut m.children[n - 1]);
    }

    fn block_stmts(&mut self, stmts: &mut [Node]) {
        self.scopes.push(Vec::new());
        let mut dead = false;
        for s in stmts.iter_mut() {
            if dead {
                self.error(s, "unreachable statement");
                break;
            }
            self.stmt(s);
            dead = completes_abruptly(s);
        }
        self.scopes.pop();
    }

    fn scoped_stmt(&mut self, s: &mut Node) {
        self.scopes.push(Vec::new());
        self.stmt(s);
        self.scopes.pop();
    }

    fn stmt(&mut self, s: &mut Node) {
        match s.kind.clone() {
            Kind::Block => self.block_stmts(&mut s.children),
            Kind::LocalVar { ty, name } => {
                if self.check_decl_type(s, &ty) {
                    if let Some(init) = s.children.first_mut() {
                        self.expect_assignable(init, &ty);
                    }
                }
                let shown = s.clone();
                self.declare(&shown, &name, ty);
            }
            Kind::ExprStmt => {
                let e = &mut s.children[0];
                let is_call =
                    matches!(e.kind, Kind::Call { .. } | Kind::MethodCall { .. } | Kind::SuperCall { .. } | Kind::New { .. });
                self.expr(e);
                if !is_call {
                    let shown = e.clone();
                    self.error(&shown, "not a statement");
                }
            }
            Kind::Assign { op } => {
                let (target, value) = s.children.split_at_mut(1);
                let Some(tt) = self.lvalue(&mut target[0]) else {
                    self.expr(&mut value[0]);
                    return;
                };
                match op.binop() {
                    None => self.expect_assignable(&mut value[0], &tt),
                    Some(bop) => {
                        let Some(vt) = self.expr(&mut value[0]) else { return };
                        let shown = value[0].clone();
                        match self.binary_type(bop, &tt, &vt) {
                            Some(rt) if self.classes.compatible(&rt, &tt) => {}
                            _ => self.error(&shown, format!("bad operands for `{}`: {tt} and {vt}", op.symbol())),
                        }
                    }
                }
            }
            Kind::Step { .. } => {
                if let Some(t) = self.lvalue(&mut s.children[0]) {
                    if !t.is_numeric() {
                        let shown = s.clone();
                        self.error(&shown, format!("cannot increment a value of type {t}"));
                    }
                }
            }
            Kind::If => {
                self.expect_type(&mut s.children[0], &LangType::Boolean);
                for branch in &mut s.children[1..] {
                    self.scoped_stmt(branch);
                }
            }
            Kind::While => {
                self.expect_type(&mut s.children[0], &LangType::Boolean);
                self.loops += 1;
                self.scoped_stmt(&mut s.children[1]);
                self.loops -= 1;
            }
            Kind::For => {
                self.scopes.push(Vec::new());
                if s.children[0].kind != Kind::Empty {
                    self.stmt(&mut s.children[0]);
                }
                if s.children[1].kind != Kind::Empty {
                    self.expect_type(&mut s.children[1], &LangType::Boolean);
                }
                if s.children[2].kind != Kind::Empty {
                    self.stmt(&mut s.children[2]);
                }
                self.loops += 1;
                self.scoped_stmt(&mut s.children[3]);
                self.loops -= 1;
                self.scopes.pop();
            }
            Kind::Return => {
                let ret = self.ret.clone();
                match (s.children.first_mut(), ret == LangType::Void) {
                    (None, true) => {}
                    (None, false) => {
                        let shown = s.clone();
                        self.error(&shown, format!("missing return value of type {ret}"));
                    }
                    (Some(v), true) => {
                        self.expr(v);
                        let shown = s.clone();
                        self.error(&shown, "cannot return a value from a void method");
                    }
                    (Some(v), false) => self.expect_assignable(v, &ret),
                }
            }
            Kind::Break | Kind::Continue => {
                if self.loops == 0 {
                    let shown = s.clone();
                    self.error(&shown, format!("`{}` outside of a loop", s.kind.label()));
                }
            }
            Kind::Try => {
                self.stmt(&mut s.children[0]);
                for c in &mut s.children[1..] {
                    let Kind::Catch { ty, name } = c.kind.clone() else { continue };
                    if ty != LangType::class(EXCEPTION) {
                        let shown = c.clone();
                        self.error(&shown, format!("only `{EXCEPTION}` can be caught"));
                    }
                    self.scopes.push(Vec::new());
                    let shown = c.clone();
                    self.declare(&shown, &name, ty);
                    self.stmt(&mut c.children[0]);
                    self.scopes.pop();
                }
            }
            Kind::Empty => {}
            other => {
                let shown = s.clone();
                self.error(&shown, format!("unexpected {} in statement position", other.label()));
            }
        }
    }

    /// Type of an assignable expression.
    fn lvalue(&mut self, e: &mut Node) -> Option<LangType> {
        match &e.kind {
            Kind::Name(_) | Kind::Index => self.expr(e),
            Kind::Select { .. } => {
                let t = self.expr(e)?;
                if matches!(e.children[0].ty, Some(LangType::Array(_))) {
                    let shown = e.clone();
                    self.error(&shown, "array length is not assignable");
                    return None;
                }
                Some(t)
            }
            Kind::Paren => {
                let t = self.lvalue(&mut e.children[0]);
                e.ty = t.clone();
                t
            }
            _ => {
                self.expr(e);
                let shown = e.clone();
                self.error(&shown, "expression is not assignable");
                None
            }
        }
    }

    fn expect_type(&mut self, e: &mut Node, want: &LangType) {
        if let Some(t) = self.expr(e) {
            if t != *want {
                let shown = e.clone();
                self.error(&shown, format!("expected {want}, found {t}"));
            }
        }
    }

    fn expect_assignable(&mut self, e: &mut Node, want: &LangType) {
        if let Some(t) = self.expr(e) {
            if !self.classes.compatible(&t, want) {
                let shown = e.clone();
                self.error(&shown, format!("type mismatch: {t} is not compatible with {want}"));
            }
        }
    }

    fn binary_type(&self, op: BinOp, l: &LangType, r: &LangType) -> Option<LangType> {
        use LangType::*;
        match op {
            BinOp::Add if *l == Str || *r == Str => {
                (*l != Void && *r != Void).then_some(Str)
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => {
                if l.is_numeric() && r.is_numeric() {
                    Some(if *l == Int && *r == Int { Int } else { Float })
                } else {
                    None
                }
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => (l.is_numeric() && r.is_numeric()).then_some(Boolean),
            BinOp::Eq | BinOp::Ne => {
                let ok = (l.is_numeric() && r.is_numeric())
                    || (*l == Boolean && *r == Boolean)
                    || (l.is_reference() && r.is_reference() && (self.classes.related(l, r)));
                ok.then_some(Boolean)
            }
            BinOp::And | BinOp::Or => (*l == Boolean && *r == Boolean).then_some(Boolean),
        }
    }

    fn args(&mut self, args: &mut [Node]) -> Option<Vec<LangType>> {
        let mut out = Vec::new();
        let mut ok = true;
        for a in args.iter_mut() {
            match self.expr(a) {
                Some(LangType::Void) => {
                    let shown = a.clone();
                    self.error(&shown, "void value used as argument");
                    ok = false;
                }
                Some(t) => out.push(t),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn resolve_call(&mut self, e: &Node, candidates: Vec<&MethodInfo>, args: &[LangType], what: &str) -> Option<(LangType, Callee)> {
        if candidates.is_empty() {
            self.error(e, format!("cannot find {what}"));
            return None;
        }
        match self.classes.resolve(&candidates, args) {
            Ok(m) => Some((m.ret.clone(), Callee { owner: m.owner.clone(), params: m.params.clone() })),
            Err(ResolveError::NoMatch) => {
                let shown: Vec<String> = args.iter().map(ToString::to_string).collect();
                self.error(e, format!("no overload of {what} accepts ({})", shown.join(", ")));
                None
            }
            Err(ResolveError::Ambiguous) => {
                self.error(e, format!("ambiguous call to {what}"));
                None
            }
        }
    }

    fn expr(&mut self, e: &mut Node) -> Option<LangType> {
        let t = self.expr_inner(e);
        e.ty = t.clone();
        t
    }

    fn expr_inner(&mut self, e: &mut Node) -> Option<LangType> {
        let classes = self.classes;
        match e.kind.clone() {
            Kind::Literal(l) => Some(l.lang_type()),
            Kind::Name(n) => {
                if let Some(t) = self.lookup_local(&n) {
                    return Some(t.clone());
                }
                match classes.field(&self.class, &n) {
                    Some(f) => Some(f.ty.clone()),
                    None => {
                        let shown = e.clone();
                        self.error(&shown, format!("cannot find variable `{n}`"));
                        None
                    }
                }
            }
            Kind::This => Some(LangType::class(self.class.clone())),
            Kind::Paren => self.expr(&mut e.children[0]),
            Kind::Select { name } => {
                let rt = self.expr(&mut e.children[0])?;
                match &rt {
                    LangType::Array(_) if name == "length" => Some(LangType::Int),
                    LangType::Class(c) => match classes.field(c, &name) {
                        Some(f) => Some(f.ty.clone()),
                        None => {
                            let shown = e.clone();
                            self.error(&shown, format!("class `{c}` has no field `{name}`"));
                            None
                        }
                    },
                    _ => {
                        let shown = e.clone();
                        self.error(&shown, format!("{rt} has no field `{name}`"));
                        None
                    }
                }
            }
            Kind::Call { name } if name == "assert" => {
                if e.children.len() != 1 {
                    let shown = e.clone();
                    self.error(&shown, "assert takes exactly one argument");
                    return None;
                }
                self.expect_type(&mut e.children[0], &LangType::Boolean);
                Some(LangType::Void)
            }
            Kind::Call { name } => {
                let args = self.args(&mut e.children)?;
                let cands: Vec<&MethodInfo> =
                    classes.visible_methods(&self.class).into_iter().filter(|m| m.name == name).collect();
                let shown = e.clone();
                let (ret, callee) = self.resolve_call(&shown, cands, &args, &format!("method `{name}`"))?;
                e.callee = Some(callee);
                Some(ret)
            }
            Kind::MethodCall { name } => {
                let rt = self.expr(&mut e.children[0]);
                let args = self.args(&mut e.children[1..]);
                let (rt, args) = (rt?, args?);
                match &rt {
                    LangType::Str if name == "length" && args.is_empty() => {
                        e.callee = Some(Callee { owner: "String".to_string(), params: Vec::new() });
                        Some(LangType::Int)
                    }
                    LangType::Class(c) => {
                        let cands: Vec<&MethodInfo> =
                            classes.visible_methods(c).into_iter().filter(|m| m.name == name).collect();
                        let shown = e.clone();
                        let (ret, callee) =
                            self.resolve_call(&shown, cands, &args, &format!("method `{c}.{name}`"))?;
                        e.callee = Some(callee);
                        Some(ret)
                    }
                    _ => {
                        let shown = e.clone();
                        self.error(&shown, format!("{rt} has no method `{name}`"));
                        None
                    }
                }
            }
            Kind::SuperCall { name } => {
                let args = self.args(&mut e.children)?;
                let parent = classes.get(&self.class).and_then(|c| c.parent.clone());
                let Some(parent) = parent else {
                    let shown = e.clone();
                    self.error(&shown, "`super` used outside a subclass");
                    return None;
                };
                let cands: Vec<&MethodInfo> =
                    classes.visible_methods(&parent).into_iter().filter(|m| m.name == name).collect();
                let shown = e.clone();
                let (ret, callee) = self.resolve_call(&shown, cands, &args, &format!("method `super.{name}`"))?;
                e.callee = Some(callee);
                Some(ret)
            }
            Kind::New { class } => {
                let args = self.args(&mut e.children)?;
                if class == "String" {
                    if !args.is_empty() {
                        let shown = e.clone();
                        self.error(&shown, "String constructor takes no arguments");
                        return None;
                    }
                    return Some(LangType::Str);
                }
                let Some(info) = classes.get(&class) else {
                    let shown = e.clone();
                    self.error(&shown, format!("cannot find class `{class}`"));
                    return None;
                };
                if info.ctors.is_empty() {
                    if !args.is_empty() {
                        let shown = e.clone();
                        self.error(&shown, format!("`{class}` has only a no-argument constructor"));
                        return None;
                    }
                    e.callee = Some(Callee { owner: class.clone(), params: Vec::new() });
                } else {
                    let cands: Vec<&MethodInfo> = info.ctors.iter().collect();
                    let shown = e.clone();
                    let (_, callee) = self.resolve_call(&shown, cands, &args, &format!("constructor `{class}`"))?;
                    e.callee = Some(callee);
                }
                Some(LangType::class(class))
            }
            Kind::NewArray { elem } => {
                let shown = e.clone();
                if !self.check_decl_type(&shown, &elem) {
                    return None;
                }
                self.expect_type(&mut e.children[0], &LangType::Int);
                Some(LangType::array_of(elem))
            }
            Kind::ArrayLit { elem } => {
                let shown = e.clone();
                if !self.check_decl_type(&shown, &elem) {
                    return None;
                }
                for c in &mut e.children {
                    self.expect_assignable(c, &elem);
                }
                Some(LangType::array_of(elem))
            }
            Kind::Index => {
                let at = self.expr(&mut e.children[0]);
                self.expect_type(&mut e.children[1], &LangType::Int);
                match at? {
                    LangType::Array(elem) => Some(*elem),
                    other => {
                        let shown = e.clone();
                        self.error(&shown, format!("cannot index a value of type {other}"));
                        None
                    }
                }
            }
            Kind::Cast { ty } => {
                let from = self.expr(&mut e.children[0])?;
                let shown = e.clone();
                if !self.check_decl_type(&shown, &ty) {
                    return None;
                }
                let ok = from == ty
                    || (from.is_numeric() && ty.is_numeric())
                    || (from.is_reference() && ty.is_reference() && classes.related(&from, &ty));
                if !ok {
                    self.error(&shown, format!("cannot cast {from} to {ty}"));
                    return None;
                }
                Some(ty)
            }
            Kind::InstanceOf { ty } => {
                let from = self.expr(&mut e.children[0])?;
                let shown = e.clone();
                if !self.check_decl_type(&shown, &ty) {
                    return None;
                }
                let ok = matches!(ty, LangType::Class(_) | LangType::Array(_))
                    && from.is_reference()
                    && from != LangType::Null
                    && classes.related(&from, &ty);
                if !ok {
                    self.error(&shown, format!("incompatible instanceof: {from} and {ty}"));
                    return None;
                }
                Some(LangType::Boolean)
            }
            Kind::Binary { op } => {
                let l = self.expr(&mut e.children[0]);
                let r = self.expr(&mut e.children[1]);
                let (l, r) = (l?, r?);
                match self.binary_type(op, &l, &r) {
                    Some(t) => Some(t),
                    None => {
                        let shown = e.clone();
                        self.error(&shown, format!("bad operands for `{}`: {l} and {r}", op.symbol()));
                        None
                    }
                }
            }
            Kind::Unary { op } => {
                let t = self.expr(&mut e.children[0])?;
                let ok = match op {
                    UnOp::Not => t == LangType::Boolean,
                    UnOp::Neg => t.is_numeric(),
                };
                if !ok {
                    let shown = e.clone();
                    self.error(&shown, format!("bad operand for `{}`: {t}", op.symbol()));
                    return None;
                }
                Some(t)
            }
            Kind::Conditional => {
                self.expect_type(&mut e.children[0], &LangType::Boolean);
                let a = self.expr(&mut e.children[1]);
                let b = self.expr(&mut e.children[2]);
                let (a, b) = (a?, b?);
                if a == LangType::Void || b == LangType::Void {
                    let shown = e.clone();
                    self.error(&shown, "void value in conditional expression");
                    None
                } else if classes.compatible(&a, &b) {
                    Some(b)
                } else if classes.compatible(&b, &a) {
                    Some(a)
                } else {
                    let shown = e.clone();
                    self.error(&shown, format!("incompatible branch types {a} and {b}"));
                    None
                }
            }
            other => {
                let shown = e.clone();
                self.error(&shown, format!("unexpected {} in expression position", other.label()));
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse;

    fn check(src: &str) -> Result<Node, Vec<TypeError>> {
        type_check(&parse(src).unwrap())
    }

    fn in_method(body: &str) -> String {
        format!("class T {{ int f(int a) {{ return a; }} int f(int a, int b) {{ return a + b; }} void m() {{ {body} }} }}")
    }

    #[test]
    fn boolean_from_int_is_rejected() {
        let errs = check(&in_method("boolean b = 1;")).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("int is not compatible with boolean"), "{}", errs[0]);
    }

    #[test]
    fn null_string_is_well_typed() {
        check(&in_method("String s = null;")).unwrap();
    }

    #[test]
    fn overload_by_arity() {
        let ast = check(&in_method("int r = f(1);")).unwrap();
        let call = ast.preorder().into_iter().find(|n| matches!(n.kind, Kind::Call { .. })).unwrap().clone();
        assert_eq!(call.callee.unwrap().params, vec![LangType::Int]);
        assert_eq!(call.ty, Some(LangType::Int));
    }

    #[test]
    fn expressions_are_annotated() {
        let ast = check(&in_method("float x = 1 / 2 + 0.5; String s = \"a\" + x; boolean b = s.length() > 1;")).unwrap();
        ast.walk(&mut |n| {
            if n.is_expression() {
                assert!(n.ty.is_some(), "unannotated {:?}", n.kind);
            }
        });
    }

    #[test]
    fn undeclared_and_scoping() {
        assert!(check(&in_method("x = 1;")).is_err());
        assert!(check(&in_method("if (true) { int y = 1; } y = 2;")).is_err());
        assert!(check(&in_method("int y = 1; int y = 2;")).is_err());
        check(&in_method("for (int i = 0; i < 3; i++) { } for (int i = 0; i < 3; i++) { }")).unwrap();
    }

    #[test]
    fn hierarchy_rules() {
        let src = "class B { Object clone() { return new B(); } } class D extends B { int k; \
                   Object clone() { return (D) super.clone(); } void m(B b) { D d = (D) b; B e = d; boolean t = b instanceof D; } }";
        check(src).unwrap();
        let bad = "class B { } class D extends B { void m(B b) { D d = b; } }";
        assert!(check(bad).is_err());
    }

    #[test]
    fn missing_return_and_unreachable() {
        assert!(check("class A { int f(boolean c) { if (c) { return 1; } } }").is_err());
        check("class A { int f(boolean c) { if (c) { return 1; } else { return 2; } } }").unwrap();
        assert!(check("class A { int f() { return 1; int x = 2; } }").is_err());
        check("class A { int f() { while (true) { } } }").unwrap();
    }

    #[test]
    fn statement_forms() {
        assert!(check(&in_method("1 + 2;")).is_err());
        assert!(check(&in_method("break;")).is_err());
        check(&in_method("int[] a = new int[3]; a[0] += 2; a[1]++; int n = a.length;")).unwrap();
        assert!(check(&in_method("int[] a = new int[3]; a.length = 2;")).is_err());
        check(&in_method("try { int q = 1 / 0; } catch (Exception e) { assert(false); }")).unwrap();
    }
}

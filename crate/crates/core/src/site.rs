//! Context of a statement inside a checked program: enclosing class and
//! method, ancestors, and the variables in scope.

use crate::ast::{Kind, Node, NodeId};
use crate::lang::check::CheckedProgram;
use crate::lang::{ClassTable, LangType};

/// A variable visible at some program point.
#[derive(Clone, Debug, PartialEq)]
pub struct Var {
    pub name: String,
    pub ty: LangType,
    /// Declaring node (local, parameter or field); `None` for a field
    /// inherited from another file.
    pub decl: Option<NodeId>,
    pub field: bool,
}

pub struct Site<'a> {
    pub program: &'a CheckedProgram,
    pub file: usize,
    pub ast: &'a Node,
    pub stmt: &'a Node,
    /// Nodes from the compilation unit down to the parent of `stmt`.
    pub ancestors: Vec<&'a Node>,
    pub class: String,
    pub method: &'a Node,
    /// Return type of the enclosing method (`void` for constructors).
    pub ret: LangType,
}

impl<'a> Site<'a> {
    /// Context of statement `stmt` in file `file`; `None` unless it lies in a
    /// method or constructor body.
    pub fn new(program: &'a CheckedProgram, file: usize, stmt: NodeId) -> Option<Site<'a>> {
        let ast = &program.asts[file];
        let path = ast.path_to(stmt)?;
        let mut ancestors = Vec::with_capacity(path.len());
        let mut cur = ast;
        for &i in &path {
            ancestors.push(cur);
            cur = &cur.children[i];
        }
        let class = ancestors.iter().find_map(|n| match &n.kind {
            Kind::Class { name, .. } => Some(name.clone()),
            _ => None,
        })?;
        let method = *ancestors.iter().find(|n| matches!(n.kind, Kind::Method { .. } | Kind::Constructor { .. }))?;
        let ret = match &method.kind {
            Kind::Method { ret, .. } => ret.clone(),
            _ => LangType::Void,
        };
        Some(Site { program, file, ast, stmt: cur, ancestors, class, method, ret })
    }

    pub fn classes(&self) -> &'a ClassTable {
        &self.program.classes
    }

    pub fn parent(&self) -> Option<&'a Node> {
        self.ancestors.last().copied()
    }

    pub fn method_name(&self) -> Option<&'a str> {
        match &self.method.kind {
            Kind::Method { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Ancestors strictly inside the enclosing method.
    pub fn method_ancestors(&self) -> impl Iterator<Item = &&'a Node> {
        let start = self.ancestors.iter().position(|n| std::ptr::eq(*n, self.method)).unwrap_or(0);
        self.ancestors[start + 1..].iter()
    }

    /// Whether the statement sits in the body of a loop of its method.
    pub fn in_loop(&self) -> bool {
        self.method_ancestors().any(|n| matches!(n.kind, Kind::While | Kind::For))
    }

    /// Conditions of the `if`/`while`/`for` statements enclosing the
    /// statement inside its method.
    pub fn enclosing_conditions(&self) -> Vec<&'a Node> {
        self.method_ancestors()
            .filter_map(|n| match n.kind {
                Kind::If | Kind::While => Some(&n.children[0]),
                Kind::For if n.children[1].kind != Kind::Empty => Some(&n.children[1]),
                _ => None,
            })
            .collect()
    }

    /// Variables in scope at the start of the statement: locals and
    /// parameters (innermost last) followed by visible fields.
    pub fn scope(&self) -> Vec<Var> {
        self.scope_at(self.stmt.id)
    }

    /// Variables in scope at node `target` (inside the enclosing method).
    pub fn scope_at(&self, target: NodeId) -> Vec<Var> {
        let mut vars = Vec::new();
        let n = self.method.children.len();
        for p in &self.method.children[..n - 1] {
            if let Kind::Param { ty, name } = &p.kind {
                vars.push(Var { name: name.clone(), ty: ty.clone(), decl: Some(p.id), field: false });
            }
        }
        if let Some(path) = self.method.path_to(target) {
            let mut cur = self.method;
            for &i in &path {
                match cur.kind {
                    Kind::Block => {
                        for s in &cur.children[..i] {
                            if let Kind::LocalVar { ty, name } = &s.kind {
                                vars.push(Var { name: name.clone(), ty: ty.clone(), decl: Some(s.id), field: false });
                            }
                        }
                    }
                    Kind::For if i > 0 => {
                        if let Kind::LocalVar { ty, name } = &cur.children[0].kind {
                            vars.push(Var {
                                name: name.clone(),
                                ty: ty.clone(),
                                decl: Some(cur.children[0].id),
                                field: false,
                            });
                        }
                    }
                    Kind::Catch { ref ty, ref name } => {
                        vars.push(Var { name: name.clone(), ty: ty.clone(), decl: Some(cur.id), field: false });
                    }
                    _ => {}
                }
                cur = &cur.children[i];
            }
        }
        let locals: Vec<String> = vars.iter().map(|v| v.name.clone()).collect();
        for f in self.classes().visible_fields(&self.class) {
            if locals.contains(&f.name) {
                continue;
            }
            let decl = self.field_decl(&f.owner, &f.name);
            vars.push(Var { name: f.name.clone(), ty: f.ty.clone(), decl, field: true });
        }
        vars
    }

    fn field_decl(&self, owner: &str, name: &str) -> Option<NodeId> {
        let info = self.classes().get(owner)?;
        if info.file != Some(self.file) {
            return None;
        }
        let class = self.ast.find(info.decl?)?;
        class.children.iter().find(|m| matches!(&m.kind, Kind::Field { name: n, .. } if n == name)).map(|m| m.id)
    }

    /// Nodes of the statement that belong to it directly: its expressions
    /// in preorder, excluding nested statements (bodies of compound
    /// statements are statements of their own).
    pub fn own_expressions(&self) -> Vec<&'a Node> {
        let mut out = Vec::new();
        fn go<'n>(n: &'n Node, out: &mut Vec<&'n Node>) {
            for c in &n.children {
                if c.is_expression() {
                    c.walk(&mut |e| out.push(e));
                } else if matches!(n.kind, Kind::For) && !std::ptr::eq(c, n.children.last().expect("for body")) {
                    // header parts of a for loop
                    go(c, out);
                }
            }
        }
        go(self.stmt, &mut out);
        out
    }

    /// Parent of `id` within the statement (or the statement's parent).
    pub fn parent_of(&self, id: NodeId) -> Option<&'a Node> {
        if id == self.stmt.id {
            return self.parent();
        }
        let path = self.stmt.path_to(id)?;
        self.stmt.at_path(&path[..path.len() - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::check::check_program;
    use crate::lang::SourceFile;

    #[test]
    fn scope_and_context() {
        let src = "class A { int f; int m(int p) { int a = 1; for (int i = 0; i < 3; i++) { int b = i; a = a + b; } int late = 2; return a; } }";
        let prog = check_program(&[SourceFile::parse("a.mj", src).unwrap()]).unwrap();
        let ast = &prog.asts[0];
        let assign = ast.preorder().into_iter().find(|n| matches!(n.kind, Kind::Assign { .. })).unwrap();
        let site = Site::new(&prog, 0, assign.id).unwrap();
        let names: Vec<String> = site.scope().into_iter().map(|v| v.name).collect();
        assert_eq!(names, vec!["p", "a", "i", "b", "f"]);
        assert!(site.in_loop());
        assert_eq!(site.ret, LangType::Int);
        assert_eq!(site.enclosing_conditions().len(), 1);
        // target `a`, then `a + b`, `a`, `b`
        assert_eq!(site.own_expressions().len(), 4);
    }
}

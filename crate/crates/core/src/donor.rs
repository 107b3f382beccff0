//! Donor code search over the file that contains the buggy statement.
//!
//! Pools hold expressions, variables, literals, method signatures and
//! conditions, each sorted by distance to the buggy statement (then by
//! source position) and deduplicated by printed text.

use std::collections::{HashMap, HashSet};

use crate::ast::{distances_from, DistanceMetric, Kind, Lit, Node, NodeId, UnOp};
use crate::lang::check::CheckedProgram;
use crate::lang::printer::print_node;
use crate::lang::types::MethodInfo;
use crate::lang::{ClassTable, LangType};
use crate::site::Site;

/// Expressions bigger than this are not offered as donors.
const MAX_DONOR_SIZE: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct DonorEntry {
    /// Detached copy of the donor, type annotations kept.
    pub node: Node,
    /// Id of the donor (or of the declaration, for variables) in the file.
    pub id: NodeId,
    pub ty: LangType,
    pub distance: usize,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodDonor {
    pub info: MethodInfo,
    pub distance: usize,
    pub pos: usize,
}

#[derive(Clone, Debug, Default)]
pub struct DonorSet {
    pub expressions: Vec<DonorEntry>,
    pub variables: Vec<DonorEntry>,
    pub literals: Vec<DonorEntry>,
    pub methods: Vec<MethodDonor>,
    pub conditions: Vec<DonorEntry>,
    /// Distance of every node of the file to the buggy statement.
    pub distances: HashMap<NodeId, usize>,
}

impl DonorSet {
    pub fn distance_to(&self, id: NodeId) -> Option<usize> {
        self.distances.get(&id).copied()
    }

    pub fn method(&self, info: &MethodInfo) -> Option<&MethodDonor> {
        self.methods.iter().find(|m| m.info.owner == info.owner && m.info.name == info.name && m.info.params == info.params)
    }

    /// Expressions, variables and literals assignable to `required`, merged
    /// in distance order.
    pub fn values_for<'s>(&'s self, classes: &ClassTable, required: &LangType) -> Vec<&'s DonorEntry> {
        let mut out: Vec<&DonorEntry> = self
            .expressions
            .iter()
            .chain(&self.variables)
            .chain(&self.literals)
            .filter(|d| compatible(classes, &d.ty, required))
            .collect();
        out.sort_by_key(|d| (d.distance, d.pos, d.id));
        out
    }
}

/// Whether a donor of type `entry` may fill a slot of type `required`.
pub fn compatible(classes: &ClassTable, entry: &LangType, required: &LangType) -> bool {
    classes.compatible(entry, required)
}

/// Collect donors for the statement `buggy` of file `file`.
pub fn collect_donors(program: &CheckedProgram, file: usize, buggy: NodeId, metric: DistanceMetric) -> DonorSet {
    let Some(site) = Site::new(program, file, buggy) else {
        return DonorSet::default();
    };
    let ast = &program.asts[file];
    let distances = distances_from(ast, buggy, metric).unwrap_or_default();
    let far = distances.values().copied().max().unwrap_or(0) + 1;
    let dist = |id: NodeId| distances.get(&id).copied().unwrap_or(far);
    let classes = site.classes();

    let relevant = relevant_types(&site);
    let is_relevant = |t: &LangType| relevant.iter().any(|r| classes.compatible(t, r));

    let scope = site.scope();
    let scope_types: HashMap<&str, &LangType> = scope.iter().rev().map(|v| (v.name.as_str(), &v.ty)).collect();

    let mut variables = Vec::new();
    for v in &scope {
        if !is_relevant(&v.ty) {
            continue;
        }
        let (distance, pos) = match v.decl {
            Some(d) => (dist(d), ast.find(d).map_or(usize::MAX, |n| n.span.start)),
            None => (far, usize::MAX),
        };
        variables.push(DonorEntry {
            node: Node::name(&v.name).with_type(v.ty.clone()),
            id: v.decl.unwrap_or(crate::ast::DETACHED),
            ty: v.ty.clone(),
            distance,
            pos,
        });
    }

    let mut expressions = Vec::new();
    let mut literals = Vec::new();
    let mut class_stack: Vec<String> = Vec::new();
    collect_exprs(ast, &mut class_stack, &mut |class, n| {
        if n.id == buggy {
            return;
        }
        let Some(ty) = n.ty.clone() else { return };
        if ty == LangType::Void || !is_relevant(&ty) {
            return;
        }
        let entry = || DonorEntry { node: n.detached(), id: n.id, ty: ty.clone(), distance: dist(n.id), pos: n.span.start };
        if is_literal(n) {
            if !matches!(n.kind, Kind::Literal(Lit::Null)) {
                literals.push(entry());
            }
            return;
        }
        if matches!(n.kind, Kind::Name(_) | Kind::Paren) || n.size() > MAX_DONOR_SIZE {
            return;
        }
        if usable_at(n, class, &site, &scope_types) {
            expressions.push(entry());
        }
    });

    let mut methods = Vec::new();
    let mut seen_methods = HashSet::new();
    let own: Vec<&MethodInfo> = classes
        .user_classes()
        .filter(|c| c.file == Some(file))
        .flat_map(|c| c.methods.iter())
        .chain(classes.visible_methods(&site.class))
        .collect();
    for m in own {
        if !seen_methods.insert((m.owner.clone(), m.name.clone(), m.params.clone())) {
            continue;
        }
        let (distance, pos) = match (m.file, m.decl) {
            (Some(f), Some(d)) if f == file => (dist(d), ast.find(d).map_or(usize::MAX, |n| n.span.start)),
            _ => (far, usize::MAX),
        };
        methods.push(MethodDonor { info: m.clone(), distance, pos });
    }
    methods.sort_by(|a, b| {
        (a.distance, a.pos, &a.info.owner, &a.info.name).cmp(&(b.distance, b.pos, &b.info.owner, &b.info.name))
    });

    sort_dedup(&mut variables);
    sort_dedup(&mut expressions);
    sort_dedup(&mut literals);
    let mut conditions: Vec<DonorEntry> = expressions
        .iter()
        .chain(&variables)
        .filter(|d| d.ty == LangType::Boolean)
        .cloned()
        .collect();
    sort_dedup(&mut conditions);

    DonorSet { expressions, variables, literals, methods, conditions, distances }
}

/// Types that occur in the enclosing method: annotated expressions,
/// declarations and the return type. Booleans always count, as conditions.
fn relevant_types(site: &Site<'_>) -> Vec<LangType> {
    let mut out = vec![site.ret.clone(), LangType::Boolean];
    site.method.walk(&mut |n| {
        let t = match &n.kind {
            Kind::LocalVar { ty, .. } | Kind::Param { ty, .. } | Kind::Catch { ty, .. } => Some(ty),
            _ => n.ty.as_ref(),
        };
        if let Some(t) = t {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
    });
    out
}

fn is_literal(n: &Node) -> bool {
    match &n.kind {
        Kind::Literal(_) => true,
        Kind::Unary { op: UnOp::Neg } => matches!(n.children[0].kind, Kind::Literal(_)),
        _ => false,
    }
}

/// Walk the expressions of every member, telling the callback the
/// enclosing class.
fn collect_exprs<'a>(n: &'a Node, classes: &mut Vec<String>, f: &mut impl FnMut(&str, &'a Node)) {
    if let Kind::Class { name, .. } = &n.kind {
        classes.push(name.clone());
        for c in &n.children {
            collect_exprs(c, classes, f);
        }
        classes.pop();
        return;
    }
    if n.is_expression() {
        if let Some(class) = classes.last() {
            f(class, n);
        }
    }
    for c in &n.children {
        collect_exprs(c, classes, f);
    }
}

/// Whether an expression written in `class` means the same thing at the
/// buggy statement: its variables are in scope there with the same types,
/// and implicit-`this` members resolve in the current class.
fn usable_at(n: &Node, class: &str, site: &Site<'_>, scope: &HashMap<&str, &LangType>) -> bool {
    let same_class = class == site.class;
    let inherited = site.classes().is_subclass(&site.class, class);
    !n.any(&|e| match &e.kind {
        Kind::Name(v) => scope.get(v.as_str()).map_or(true, |t| Some(*t) != e.ty.as_ref()),
        Kind::This | Kind::Call { .. } => !inherited,
        Kind::SuperCall { .. } => !same_class,
        _ => false,
    })
}

fn sort_dedup(entries: &mut Vec<DonorEntry>) {
    entries.sort_by_key(|d| (d.distance, d.pos, d.id));
    let mut seen = HashSet::new();
    entries.retain(|d| seen.insert((print_node(&d.node), d.ty.clone())));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::check::check_program;
    use crate::lang::SourceFile;

    fn program(src: &str) -> CheckedProgram {
        check_program(&[SourceFile::parse("a.mj", src).unwrap()]).unwrap()
    }

    fn stmt_with(p: &CheckedProgram, text: &str) -> NodeId {
        p.asts[0].preorder().into_iter().find(|n| n.is_statement() && print_node(n) == text).unwrap().id
    }

    #[test]
    fn scope_rule_and_self_exclusion() {
        let p = program(
            "class A { int g(int z) { return z; } int m(int k) { int a = k + 1; a = g(a) * 2; int late = a - 1; return late; } }",
        );
        let buggy = stmt_with(&p, "a = g(a) * 2;");
        let d = collect_donors(&p, 0, buggy, DistanceMetric::PathLength);
        let vars: Vec<String> = d.variables.iter().map(|v| print_node(&v.node)).collect();
        assert!(vars.contains(&"k".to_string()) && vars.contains(&"a".to_string()));
        assert!(!vars.contains(&"late".to_string()));
        let exprs: Vec<String> = d.expressions.iter().map(|e| print_node(&e.node)).collect();
        assert!(exprs.contains(&"k + 1".to_string()));
        assert!(exprs.contains(&"g(a)".to_string()));
        // `a - 1` uses `a`, which is in scope; `late` is not
        assert!(exprs.contains(&"a - 1".to_string()));
        assert!(!exprs.iter().any(|e| e.contains("late")));
        assert!(d.expressions.windows(2).all(|w| (w[0].distance, w[0].pos) <= (w[1].distance, w[1].pos)));
        assert!(d.methods.iter().any(|m| m.info.name == "g"));
    }

    #[test]
    fn out_of_scope_names_are_excluded() {
        let p = program("class A { int m(int k) { int r = 0; if (k > 0) { int q = k * 3; r = q; } r = r + 1; return r; } }");
        let buggy = stmt_with(&p, "r = r + 1;");
        let d = collect_donors(&p, 0, buggy, DistanceMetric::PathLength);
        assert!(d.expressions.iter().all(|e| !print_node(&e.node).contains('q')));
        assert!(d.conditions.iter().any(|c| print_node(&c.node) == "k > 0"));
    }

    #[test]
    fn compatibility_rule() {
        let p = program("class B { } class D extends B { }");
        let c = &p.classes;
        assert!(compatible(c, &LangType::Int, &LangType::Int));
        assert!(compatible(c, &LangType::Int, &LangType::Float));
        assert!(!compatible(c, &LangType::Float, &LangType::Int));
        assert!(compatible(c, &LangType::class("D"), &LangType::class("B")));
        assert!(!compatible(c, &LangType::class("B"), &LangType::class("D")));
        assert!(compatible(c, &LangType::Null, &LangType::Str));
        assert!(!compatible(c, &LangType::Null, &LangType::Int));
    }
}

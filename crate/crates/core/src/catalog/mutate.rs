//! Mutation patterns: expressions, operators, types, literals, calls and
//! variables are replaced in place.

use crate::ast::{AssignOp, AstEdit, BinOp, Kind, Lit, Node, OpClass, UnOp};
use crate::donor::DonorSet;
use crate::lang::types::{MethodInfo, OBJECT};
use crate::lang::LangType;
use crate::site::Site;

use super::{bare, is_literal_like, same_text, Generated, PatternError};

/// Fillers tried per inserted argument position.
const MAX_FILLERS: usize = 6;

fn update(target: &Node, replacement: Node) -> Vec<AstEdit> {
    vec![AstEdit::Update { target: target.id, replacement }]
}

pub(super) fn instance_creation(site: &Site<'_>, new: &Node) -> Result<Vec<Generated>, PatternError> {
    let Kind::New { class } = &new.kind else { return Err(PatternError::Precondition("not an instance creation")) };
    if *class != site.class {
        return Err(PatternError::Precondition("created class is not the current class"));
    }
    let in_clone = site.method_name() == Some("clone") && site.method.children.len() == 1;
    let parent = site.classes().get(&site.class).and_then(|c| c.parent.clone()).unwrap_or_else(|| OBJECT.into());
    let overrides = site.classes().visible_methods(&parent).iter().any(|m| m.name == "clone" && m.params.is_empty());
    if !in_clone || !overrides {
        return Err(PatternError::Precondition("not inside an overriding clone()"));
    }
    let call = Node::leaf(Kind::SuperCall { name: "clone".into() });
    let cast = Node::new(Kind::Cast { ty: LangType::class(class.clone()) }, vec![call]);
    Ok(vec![Generated::plain(update(new, cast))])
}

/// Whether two conditions differ only in their binary operator.
fn operator_only_difference(a: &Node, b: &Node) -> bool {
    let (a, b) = (bare(a), bare(b));
    match (&a.kind, &b.kind) {
        (Kind::Binary { op: x }, Kind::Binary { op: y }) => {
            x != y && same_text(&a.children[0], &b.children[0]) && same_text(&a.children[1], &b.children[1])
        }
        _ => false,
    }
}

/// Swap the whole condition for a donor condition taken from outside it.
pub(super) fn replace_condition(site: &Site<'_>, cond: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let _ = site;
    Ok(donors
        .conditions
        .iter()
        .filter(|d| !cond.any(&|n| same_text(n, &d.node)) && !operator_only_difference(&d.node, cond))
        .map(|d| Generated::donated(update(cond, d.node.clone()), d.distance, d.pos))
        .collect())
}

pub(super) fn remove_subcondition(cond: &Node) -> Result<Vec<Generated>, PatternError> {
    if !matches!(cond.kind, Kind::Binary { op: BinOp::And | BinOp::Or }) {
        return Err(PatternError::Precondition("condition has no logical operator"));
    }
    Ok(cond.children.iter().map(|c| Generated::plain(update(cond, bare(c).detached()))).collect())
}

pub(super) fn insert_subcondition(cond: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let mut out = Vec::new();
    for d in &donors.conditions {
        if cond.any(&|n| same_text(n, &d.node)) || d.node.any(&|n| same_text(n, cond)) {
            continue;
        }
        for op in [BinOp::And, BinOp::Or] {
            let extended = Node::binary(op, cond.detached(), d.node.clone());
            out.push(Generated::donated(update(cond, extended), d.distance, d.pos));
        }
    }
    Ok(out)
}

/// Types that may stand in for `ty`: the other numeric type, or classes
/// related to it by inheritance.
fn alternative_types(site: &Site<'_>, ty: &LangType) -> Vec<LangType> {
    match ty {
        LangType::Int => vec![LangType::Float],
        LangType::Float => vec![LangType::Int],
        LangType::Class(_) => {
            let classes = site.classes();
            let mut out: Vec<LangType> = classes
                .names()
                .filter(|n| *n != crate::lang::types::EXCEPTION)
                .map(LangType::class)
                .filter(|t| t != ty && classes.related(t, ty))
                .collect();
            out.sort();
            out
        }
        _ => Vec::new(),
    }
}

pub(super) fn data_type(site: &Site<'_>, target: &Node) -> Result<Vec<Generated>, PatternError> {
    let (ty, make): (&LangType, Box<dyn Fn(LangType) -> Kind>) = match &target.kind {
        Kind::LocalVar { ty, name } => {
            let name = name.clone();
            (ty, Box::new(move |t| Kind::LocalVar { ty: t, name: name.clone() }))
        }
        Kind::Cast { ty } => (ty, Box::new(|t| Kind::Cast { ty: t })),
        _ => return Err(PatternError::Precondition("no declared or cast type")),
    };
    Ok(alternative_types(site, ty)
        .into_iter()
        .map(|t| {
            let mut n = target.detached();
            n.kind = make(t);
            Generated::plain(update(target, n))
        })
        .collect())
}

fn to_float_literal(n: &Node) -> Option<Node> {
    let n = bare(n);
    match &n.kind {
        Kind::Literal(Lit::Int(v)) => Some(Node::float(*v as f64)),
        Kind::Unary { op: UnOp::Neg } => match bare(&n.children[0]).kind {
            Kind::Literal(Lit::Int(v)) => Some(Node::float(-(v as f64))),
            _ => None,
        },
        _ => None,
    }
}

pub(super) fn integer_division(div: &Node, id: &str) -> Result<Vec<Generated>, PatternError> {
    let dividend = div.children[0].detached();
    let divisor = div.children[1].detached();
    let float_cast = |e: Node| Node::new(Kind::Cast { ty: LangType::Float }, vec![e]);
    let replacement = match id {
        "FP8.1" => Node::binary(BinOp::Div, float_cast(dividend), divisor),
        "FP8.2" => Node::binary(BinOp::Div, dividend, float_cast(divisor)),
        _ => {
            if let Some(f) = to_float_literal(&dividend) {
                Node::binary(BinOp::Div, f, divisor)
            } else if let Some(f) = to_float_literal(&divisor) {
                Node::binary(BinOp::Div, dividend, f)
            } else {
                Node::binary(BinOp::Div, Node::binary(BinOp::Mul, Node::float(1.0), dividend), divisor)
            }
        }
    };
    Ok(vec![Generated::plain(update(div, replacement))])
}

fn literal_value(n: &Node) -> Option<Lit> {
    let n = bare(n);
    match &n.kind {
        Kind::Literal(l) => Some(l.clone()),
        Kind::Unary { op: UnOp::Neg } => match &bare(&n.children[0]).kind {
            Kind::Literal(Lit::Int(v)) => Some(Lit::Int(v.wrapping_neg())),
            Kind::Literal(Lit::Float(v)) => Some(Lit::Float(-v)),
            _ => None,
        },
        _ => None,
    }
}

fn literal_node(l: &Lit) -> Node {
    match l {
        Lit::Int(v) => Node::int(*v),
        Lit::Float(v) => Node::float(*v),
        other => Node::lit(other.clone()),
    }
}

pub(super) fn literal_to_literal(lit: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let value = literal_value(lit).ok_or(PatternError::Precondition("not a literal"))?;
    let mut seen = vec![value.clone()];
    let mut out = Vec::new();
    let mut push = |l: Lit, distance: Option<(usize, usize)>, out: &mut Vec<Generated>| {
        if seen.contains(&l) {
            return;
        }
        seen.push(l.clone());
        let edits = update(lit, literal_node(&l));
        out.push(match distance {
            Some((d, p)) => Generated::donated(edits, d, p),
            None => Generated::plain(edits),
        });
    };
    match &value {
        Lit::Bool(b) => push(Lit::Bool(!b), None, &mut out),
        Lit::Int(n) => {
            for v in [0, 1, -1, n.wrapping_add(1), n.wrapping_sub(1)] {
                push(Lit::Int(v), None, &mut out);
            }
        }
        Lit::Float(f) => {
            for v in [0.0, 1.0, -1.0, f + 1.0, f - 1.0] {
                push(Lit::Float(v), None, &mut out);
            }
        }
        Lit::Str(_) => {}
        Lit::Null => return Err(PatternError::Precondition("null literal")),
    }
    let ty = value.lang_type();
    for d in &donors.literals {
        if d.ty == ty {
            if let Some(l) = literal_value(&d.node) {
                push(l, Some((d.distance, d.pos)), &mut out);
            }
        }
    }
    Ok(out)
}

pub(super) fn literal_to_expression(site: &Site<'_>, lit: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let ty = literal_value(lit).ok_or(PatternError::Precondition("not a literal"))?.lang_type();
    Ok(donors
        .expressions
        .iter()
        .chain(&donors.variables)
        .filter(|d| site.classes().compatible(&d.ty, &ty))
        .map(|d| Generated::donated(update(lit, d.node.clone()), d.distance, d.pos))
        .collect())
}

/// Argument nodes of a call-like node.
fn args(call: &Node) -> &[Node] {
    match call.kind {
        Kind::MethodCall { .. } => &call.children[1..],
        _ => &call.children,
    }
}

/// Methods (or constructors) that the call could target, found from the
/// call's receiver: all overloads and all other visible methods.
fn callable(site: &Site<'_>, call: &Node) -> Vec<MethodInfo> {
    let classes = site.classes();
    match &call.kind {
        Kind::Call { .. } => classes.visible_methods(&site.class).into_iter().cloned().collect(),
        Kind::SuperCall { .. } => {
            let parent = classes.get(&site.class).and_then(|c| c.parent.clone()).unwrap_or_else(|| OBJECT.into());
            classes.visible_methods(&parent).into_iter().cloned().collect()
        }
        Kind::MethodCall { .. } => match &call.children[0].ty {
            Some(LangType::Class(c)) => classes.visible_methods(c).into_iter().cloned().collect(),
            _ => Vec::new(),
        },
        Kind::New { class } => classes.get(class).map(|c| c.ctors.clone()).unwrap_or_default(),
        _ => Vec::new(),
    }
}

fn call_name(call: &Node) -> Option<&str> {
    match &call.kind {
        Kind::Call { name } | Kind::MethodCall { name } | Kind::SuperCall { name } => Some(name),
        Kind::New { class } => Some(class),
        _ => None,
    }
}

fn with_args(call: &Node, new_args: Vec<Node>) -> Node {
    let mut n = call.detached();
    let keep = if matches!(call.kind, Kind::MethodCall { .. }) { 1 } else { 0 };
    n.children.truncate(keep);
    n.children.extend(new_args);
    n
}

pub(super) fn method_name(site: &Site<'_>, call: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let callee = call.callee.as_ref().ok_or(PatternError::Precondition("unresolved call"))?;
    let classes = site.classes();
    let mut out = Vec::new();
    if let Kind::New { class } = &call.kind {
        let mut names: Vec<&str> = classes.user_classes().map(|c| c.name.as_str()).collect();
        names.sort();
        for other in names {
            let (a, b) = (LangType::class(other), LangType::class(class.clone()));
            if other == class || !classes.related(&a, &b) {
                continue;
            }
            let info = classes.get(other).expect("class");
            let fits = if info.ctors.is_empty() { callee.params.is_empty() } else { info.ctors.iter().any(|c| c.params == callee.params) };
            if fits {
                let mut n = call.detached();
                n.kind = Kind::New { class: other.to_string() };
                out.push(Generated::plain(update(call, n)));
            }
        }
        return Ok(out);
    }
    let name = call_name(call).unwrap_or_default();
    let ret = call.ty.clone().unwrap_or(LangType::Void);
    for m in callable(site, call) {
        if m.name == name || m.params != callee.params || (ret != LangType::Void && !classes.compatible(&m.ret, &ret)) {
            continue;
        }
        if site.method_name() == Some(m.name.as_str()) && matches!(call.kind, Kind::Call { .. }) {
            continue;
        }
        let mut n = call.detached();
        n.kind = match &call.kind {
            Kind::Call { .. } => Kind::Call { name: m.name.clone() },
            Kind::SuperCall { .. } => Kind::SuperCall { name: m.name.clone() },
            _ => Kind::MethodCall { name: m.name.clone() },
        };
        let edits = update(call, n);
        out.push(match donors.method(&m) {
            Some(d) => Generated::donated(edits, d.distance, d.pos),
            None => Generated::plain(edits),
        });
    }
    Ok(out)
}

pub(super) fn argument(site: &Site<'_>, call: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let mut out = Vec::new();
    for a in args(call) {
        if is_literal_like(a) || matches!(bare(a).kind, Kind::Name(_)) {
            continue;
        }
        let Some(ty) = &a.ty else { continue };
        for d in &donors.expressions {
            if site.classes().compatible(&d.ty, ty) && !same_text(&d.node, a) {
                out.push(Generated::donated(update(a, d.node.clone()), d.distance, d.pos));
            }
        }
    }
    Ok(out)
}

fn overloads(site: &Site<'_>, call: &Node, arity: usize) -> Vec<MethodInfo> {
    let name = call_name(call).unwrap_or_default();
    callable(site, call)
        .into_iter()
        .filter(|m| (m.name == name || matches!(call.kind, Kind::New { .. })) && m.params.len() == arity)
        .collect()
}

pub(super) fn remove_argument(site: &Site<'_>, call: &Node) -> Result<Vec<Generated>, PatternError> {
    let current = args(call);
    if current.is_empty() {
        return Err(PatternError::Precondition("call has no arguments"));
    }
    let targets = overloads(site, call, current.len() - 1);
    let classes = site.classes();
    let mut out = Vec::new();
    for i in 0..current.len() {
        let rest: Vec<&Node> = current.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a).collect();
        let fits = targets.iter().any(|m| {
            m.params.iter().zip(&rest).all(|(p, a)| a.ty.as_ref().is_some_and(|t| classes.compatible(t, p)))
        });
        if fits {
            out.push(Generated::plain(vec![AstEdit::Delete { target: current[i].id }]));
        }
    }
    Ok(out)
}

pub(super) fn insert_argument(site: &Site<'_>, call: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let current = args(call);
    let classes = site.classes();
    let mut out = Vec::new();
    for m in overloads(site, call, current.len() + 1) {
        for pos in 0..=current.len() {
            let others: Vec<&crate::lang::LangType> =
                m.params.iter().enumerate().filter(|(j, _)| *j != pos).map(|(_, p)| p).collect();
            let fits = others.iter().zip(current).all(|(p, a)| a.ty.as_ref().is_some_and(|t| classes.compatible(t, p)));
            if !fits {
                continue;
            }
            for d in donors.values_for(classes, &m.params[pos]).into_iter().take(MAX_FILLERS) {
                let mut new_args: Vec<Node> = current.iter().map(Node::detached).collect();
                new_args.insert(pos, d.node.clone());
                out.push(Generated::donated(update(call, with_args(call, new_args)), d.distance, d.pos));
            }
        }
    }
    Ok(out)
}

fn class_ops(op: BinOp) -> Vec<BinOp> {
    BinOp::ALL.iter().copied().filter(|o| o.class() == op.class() && *o != op).collect()
}

pub(super) fn operator(target: &Node) -> Result<Vec<Generated>, PatternError> {
    let mut out = Vec::new();
    match target.kind {
        Kind::Binary { op } => {
            for other in class_ops(op) {
                let mut n = target.detached();
                n.kind = Kind::Binary { op: other };
                out.push(Generated::plain(update(target, n)));
            }
        }
        Kind::Assign { op } if op != AssignOp::Set => {
            for other in [AssignOp::Add, AssignOp::Sub, AssignOp::Mul, AssignOp::Div] {
                if other != op {
                    let mut n = target.detached();
                    n.kind = Kind::Assign { op: other };
                    out.push(Generated::plain(update(target, n)));
                }
            }
        }
        _ => return Err(PatternError::Precondition("no operator")),
    }
    Ok(out)
}

fn arith_binary(n: &Node) -> Option<(BinOp, &Node, &Node)> {
    let n = bare(n);
    match n.kind {
        Kind::Binary { op } if op.class() == OpClass::Arithmetic => Some((op, &n.children[0], &n.children[1])),
        _ => None,
    }
}

pub(super) fn arithmetic_priority(target: &Node) -> Result<Vec<Generated>, PatternError> {
    let Some((op, left, right)) = arith_binary(target) else {
        return Err(PatternError::Precondition("not an arithmetic expression"));
    };
    let mut out = Vec::new();
    // a op (b op2 c)  ->  (a op b) op2 c
    if let Some((op2, b, c)) = arith_binary(right) {
        let inner = Node::binary(op, left.detached(), b.detached());
        out.push(Node::binary(op2, Node::new(Kind::Paren, vec![inner]), c.detached()));
    }
    // (a op2 b) op c  ->  a op2 (b op c)
    if let Some((op2, a, b)) = arith_binary(left) {
        let inner = Node::binary(op, b.detached(), right.detached());
        out.push(Node::binary(op2, a.detached(), Node::new(Kind::Paren, vec![inner])));
    }
    if out.is_empty() {
        return Err(PatternError::Precondition("no operator chain"));
    }
    Ok(out.into_iter().filter(|n| !same_text(n, target)).map(|n| Generated::plain(update(target, n))).collect())
}

pub(super) fn instanceof_to_null_check(target: &Node) -> Result<Vec<Generated>, PatternError> {
    let exp = &target.children[0];
    Ok([BinOp::Ne, BinOp::Eq]
        .into_iter()
        .map(|op| Generated::plain(update(target, Node::binary(op, exp.detached(), Node::lit(Lit::Null)))))
        .collect())
}

pub(super) fn returned_expression(site: &Site<'_>, ret: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let exp = &ret.children[0];
    let inner = bare(exp);
    if is_literal_like(inner) || matches!(inner.kind, Kind::Name(_) | Kind::Conditional) {
        return Err(PatternError::Precondition("returned expression is a literal, variable or conditional"));
    }
    Ok(donors
        .expressions
        .iter()
        .filter(|d| site.classes().compatible(&d.ty, &site.ret) && !same_text(&d.node, exp))
        .map(|d| Generated::donated(update(exp, d.node.clone()), d.distance, d.pos))
        .collect())
}

fn is_write_target(site: &Site<'_>, name: &Node) -> bool {
    site.parent_of(name.id).is_some_and(|p| {
        matches!(p.kind, Kind::Assign { .. } | Kind::Step { .. }) && p.children[0].id == name.id
    })
}

pub(super) fn variable_to_variable(site: &Site<'_>, var: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let Kind::Name(name) = &var.kind else { return Err(PatternError::Precondition("not a variable")) };
    let ty = var.ty.clone().ok_or(PatternError::Precondition("untyped variable"))?;
    let classes = site.classes();
    let mut out = Vec::new();
    for v in site.scope_at(var.id) {
        if v.name == *name || !(classes.compatible(&v.ty, &ty) || classes.compatible(&ty, &v.ty)) {
            continue;
        }
        let edits = update(var, Node::name(&v.name));
        out.push(match v.decl.and_then(|d| donors.distance_to(d)) {
            Some(dist) => {
                let pos = v.decl.and_then(|d| site.ast.find(d)).map_or(0, |n| n.span.start);
                Generated::donated(edits, dist, pos)
            }
            None => Generated::plain(edits),
        });
    }
    Ok(out)
}

pub(super) fn variable_to_expression(site: &Site<'_>, var: &Node, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    if is_write_target(site, var) {
        return Err(PatternError::Precondition("variable is assigned"));
    }
    let ty = var.ty.clone().ok_or(PatternError::Precondition("untyped variable"))?;
    Ok(donors
        .expressions
        .iter()
        .chain(&donors.literals)
        .filter(|d| site.classes().compatible(&d.ty, &ty) && !same_text(&d.node, var))
        .map(|d| Generated::donated(update(var, d.node.clone()), d.distance, d.pos))
        .collect())
}

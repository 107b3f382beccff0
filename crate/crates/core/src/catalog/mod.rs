//! The fix-pattern catalog: 35 sub-patterns, each a bug-context predicate
//! plus a generator of candidate edit lists.
//!
//! Matching walks a suspicious statement: its own expressions in preorder,
//! then the statement itself, then the enclosing method. Every node is
//! offered to every pattern whose bug context admits it.

mod insert;
mod mutate;
mod remove;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{apply_edits, normalize_equal, Action, AstEdit, BinOp, Kind, Lit, Node, NodeId, Patch, UnOp};
use crate::donor::DonorSet;
use crate::lang::check::{check_program, CheckedProgram};
use crate::lang::{pretty_print, LangType, SourceFile};
use crate::site::Site;

/// Candidates kept per (pattern, matched node) after type checking.
pub const CANDIDATE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    Expression,
    Statement,
    Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spread {
    Single,
    Multiple,
}

/// Node-kind predicate describing where a pattern applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BugContext {
    CastExpression,
    /// An expression of reference type that is dereferenced.
    NonPrimitiveAccess,
    ArrayAccess,
    AnyStatement,
    ClassInstanceCreation,
    /// A boolean expression used as a condition or as an operand of `&&`/`||`.
    ConditionalExpression,
    VariableDeclaration,
    IntegerDivision,
    Literal,
    /// Method invocation, class instance creation or super call.
    Invocation,
    AssignmentOrInfix,
    ArithmeticInfix,
    InstanceOf,
    ReturnStatement,
    VariableReference,
    Method,
}

impl BugContext {
    /// Whether `node`, whose parent is `parent`, fits this context.
    pub fn admits(self, node: &Node, parent: Option<&Node>) -> bool {
        use BugContext::*;
        match self {
            CastExpression => matches!(node.kind, Kind::Cast { .. }),
            NonPrimitiveAccess => {
                let deref = parent.is_some_and(|p| {
                    matches!(p.kind, Kind::Select { .. } | Kind::MethodCall { .. } | Kind::Index)
                        && p.children.first().map(|c| c.id) == Some(node.id)
                });
                deref
                    && node.ty.as_ref().is_some_and(LangType::is_reference)
                    && !matches!(node.kind, Kind::This | Kind::New { .. } | Kind::Literal(_) | Kind::Paren)
            }
            ArrayAccess => node.kind == Kind::Index,
            AnyStatement => node.is_statement() && !matches!(node.kind, Kind::Block | Kind::Empty),
            ClassInstanceCreation => matches!(node.kind, Kind::New { .. }),
            ConditionalExpression => is_condition(node, parent),
            VariableDeclaration => matches!(node.kind, Kind::LocalVar { .. }),
            IntegerDivision => {
                matches!(node.kind, Kind::Binary { op: BinOp::Div })
                    && node.children.iter().all(|c| c.ty == Some(LangType::Int))
            }
            Literal => {
                let under_neg = parent.is_some_and(|p| p.kind == Kind::Unary { op: UnOp::Neg });
                match &node.kind {
                    Kind::Literal(l) => !under_neg && !matches!(l, Lit::Null),
                    Kind::Unary { op: UnOp::Neg } => matches!(node.children[0].kind, Kind::Literal(_)),
                    _ => false,
                }
            }
            Invocation => {
                matches!(node.kind, Kind::Call { .. } | Kind::MethodCall { .. } | Kind::SuperCall { .. } | Kind::New { .. })
                    && node.callee.is_some()
            }
            AssignmentOrInfix => match node.kind {
                Kind::Binary { .. } => true,
                Kind::Assign { op } => op.binop().is_some(),
                _ => false,
            },
            ArithmeticInfix => matches!(node.kind, Kind::Binary { op } if op.is_arithmetic()),
            InstanceOf => matches!(node.kind, Kind::InstanceOf { .. }),
            ReturnStatement => node.kind == Kind::Return && node.children.len() == 1,
            VariableReference => matches!(node.kind, Kind::Name(_)),
            Method => matches!(node.kind, Kind::Method { .. } | Kind::Constructor { .. }),
        }
    }
}

fn is_condition(node: &Node, parent: Option<&Node>) -> bool {
    if node.ty != Some(LangType::Boolean) || matches!(node.kind, Kind::Literal(_) | Kind::Paren) {
        return false;
    }
    if matches!(node.kind, Kind::Binary { op: BinOp::And | BinOp::Or }) {
        return true;
    }
    let Some(p) = parent else { return false };
    let slot = p.children.iter().position(|c| c.id == node.id);
    match p.kind {
        Kind::If | Kind::While | Kind::Conditional => slot == Some(0),
        Kind::For => slot == Some(1),
        Kind::Binary { op: BinOp::And | BinOp::Or } => true,
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternDescriptor {
    pub id: &'static str,
    pub name: &'static str,
    pub action: Action,
    pub granularity: &'static [Granularity],
    pub bug_context: BugContext,
    pub spread: &'static [Spread],
    pub needs_donor: bool,
}

macro_rules! pattern {
    ($id:literal, $name:literal, $action:ident, [$($g:ident),+], $ctx:ident, [$($s:ident),+], $donor:literal) => {
        PatternDescriptor {
            id: $id,
            name: $name,
            action: Action::$action,
            granularity: &[$(Granularity::$g),+],
            bug_context: BugContext::$ctx,
            spread: &[$(Spread::$s),+],
            needs_donor: $donor,
        }
    };
}

static CATALOG: [PatternDescriptor; 35] = [
    pattern!("FP1", "insert cast checker", Insert, [Statement], CastExpression, [Single], false),
    pattern!("FP2.1", "null check wrapping the statement", Insert, [Statement], NonPrimitiveAccess, [Single], false),
    pattern!("FP2.2", "null check returning a default value", Insert, [Statement], NonPrimitiveAccess, [Multiple], false),
    pattern!("FP2.3", "null check returning from a void method", Insert, [Statement], NonPrimitiveAccess, [Multiple], false),
    pattern!("FP2.4", "null check skipping a loop iteration", Insert, [Statement], NonPrimitiveAccess, [Multiple], false),
    pattern!("FP2.5", "null check substituting another value", Insert, [Statement], NonPrimitiveAccess, [Multiple], true),
    pattern!("FP3", "insert range checker", Insert, [Statement], ArrayAccess, [Single], false),
    pattern!("FP4.1", "insert missed method invocation", Insert, [Statement], AnyStatement, [Single], true),
    pattern!("FP4.2", "insert missed try-catch", Insert, [Statement], AnyStatement, [Single], false),
    pattern!("FP4.3", "insert missed conditional return", Insert, [Statement], AnyStatement, [Single], true),
    pattern!("FP4.4", "insert missed if guard", Insert, [Statement], AnyStatement, [Single], true),
    pattern!("FP5", "mutate class instance creation", Update, [Expression], ClassInstanceCreation, [Single], false),
    pattern!("FP6.1", "replace conditional expression", Update, [Expression], ConditionalExpression, [Single], true),
    pattern!("FP6.2", "remove sub conditional expression", Delete, [Expression], ConditionalExpression, [Single], false),
    pattern!("FP6.3", "insert sub conditional expression", Insert, [Expression], ConditionalExpression, [Single], true),
    pattern!("FP7.1", "mutate declared data type", Update, [Expression], VariableDeclaration, [Single], false),
    pattern!("FP7.2", "mutate cast data type", Update, [Expression], CastExpression, [Single], false),
    pattern!("FP8.1", "cast dividend to float", Update, [Expression], IntegerDivision, [Single], false),
    pattern!("FP8.2", "cast divisor to float", Update, [Expression], IntegerDivision, [Single], false),
    pattern!("FP8.3", "float literal arithmetic", Update, [Expression], IntegerDivision, [Single], false),
    pattern!("FP9.1", "replace literal with literal", Update, [Expression], Literal, [Single], false),
    pattern!("FP9.2", "replace literal with expression", Update, [Expression], Literal, [Single], true),
    pattern!("FP10.1", "replace method name", Update, [Expression, Statement], Invocation, [Single], true),
    pattern!("FP10.2", "replace argument", Update, [Expression, Statement], Invocation, [Single], true),
    pattern!("FP10.3", "remove argument", Delete, [Expression, Statement], Invocation, [Single], false),
    pattern!("FP10.4", "insert argument", Insert, [Expression, Statement], Invocation, [Single], true),
    pattern!("FP11.1", "replace operator", Update, [Expression], AssignmentOrInfix, [Single], false),
    pattern!("FP11.2", "change arithmetic priority", Update, [Expression], ArithmeticInfix, [Single], false),
    pattern!("FP11.3", "replace instanceof with null comparison", Update, [Expression], InstanceOf, [Single], false),
    pattern!("FP12", "mutate returned expression", Update, [Expression], ReturnStatement, [Single], true),
    pattern!("FP13.1", "replace variable with variable", Update, [Expression], VariableReference, [Single], true),
    pattern!("FP13.2", "replace variable with expression", Update, [Expression], VariableReference, [Single], true),
    pattern!("FP14", "move statement", Move, [Statement], AnyStatement, [Single, Multiple], false),
    pattern!("FP15.1", "delete statement", Delete, [Statement], AnyStatement, [Single, Multiple], false),
    pattern!("FP15.2", "delete method body", Delete, [Method], Method, [Multiple], false),
];

/// All descriptors in catalog order.
pub fn catalog() -> &'static [PatternDescriptor] {
    &CATALOG
}

pub fn descriptor(id: &str) -> Option<&'static PatternDescriptor> {
    CATALOG.iter().find(|d| d.id == id)
}

/// Position of a pattern in catalog order.
pub fn pattern_index(id: &str) -> Option<usize> {
    CATALOG.iter().position(|d| d.id == id)
}

/// Allowlist of pattern ids. `FP2` admits every `FP2.x`; `FP2.1` only itself.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternFilter {
    allowed: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown fix pattern `{0}`")]
pub struct UnknownPattern(pub String);

impl PatternFilter {
    pub fn all() -> Self {
        PatternFilter { allowed: None }
    }

    pub fn parse(list: &str) -> Result<Self, UnknownPattern> {
        let mut allowed = Vec::new();
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let item = item.to_ascii_uppercase();
            if !CATALOG.iter().any(|d| family_match(&item, d.id)) {
                return Err(UnknownPattern(item));
            }
            allowed.push(item);
        }
        Ok(PatternFilter { allowed: Some(allowed) })
    }

    pub fn admits(&self, id: &str) -> bool {
        self.allowed.as_ref().map_or(true, |list| list.iter().any(|a| family_match(a, id)))
    }
}

impl fmt::Display for PatternFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.allowed {
            None => f.write_str("all"),
            Some(list) => f.write_str(&list.join(",")),
        }
    }
}

fn family_match(item: &str, id: &str) -> bool {
    id == item || id.strip_prefix(item).is_some_and(|rest| rest.starts_with('.'))
}

/// A metavariable value.
#[derive(Clone, Debug, PartialEq)]
pub enum Binding {
    Node(Node),
    Type(LangType),
    Op(String),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Node(n) => write!(f, "{n}"),
            Binding::Type(t) => write!(f, "{t}"),
            Binding::Op(o) => f.write_str(o),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MatchBindings(pub BTreeMap<&'static str, Binding>);

impl MatchBindings {
    fn node(&mut self, var: &'static str, n: &Node) {
        self.0.insert(var, Binding::Node(n.detached()));
    }

    fn ty(&mut self, var: &'static str, t: &LangType) {
        self.0.insert(var, Binding::Type(t.clone()));
    }

    pub fn get(&self, var: &str) -> Option<&Binding> {
        self.0.get(var)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternMatch {
    pub descriptor: &'static PatternDescriptor,
    /// Matched node (in the checked tree of the statement's file).
    pub target: NodeId,
    /// Position of the matched node in the traversal of the statement.
    pub node_order: usize,
    pub bindings: MatchBindings,
}

/// Match every pattern against the nodes of the site's statement in
/// traversal order: expressions, statement, method.
pub fn match_statement(site: &Site<'_>, filter: &PatternFilter) -> Vec<PatternMatch> {
    let mut nodes: Vec<(&Node, Option<&Node>)> =
        site.own_expressions().into_iter().map(|e| (e, site.parent_of(e.id))).collect();
    nodes.push((site.stmt, site.parent()));
    let method_parent = site.ancestors.iter().rev().find(|n| matches!(n.kind, Kind::Class { .. })).copied();
    nodes.push((site.method, method_parent));
    let mut out = Vec::new();
    for (order, (node, parent)) in nodes.into_iter().enumerate() {
        for d in CATALOG.iter() {
            if filter.admits(d.id) && d.bug_context.admits(node, parent) {
                out.push(PatternMatch { descriptor: d, target: node.id, node_order: order, bindings: bind(d, site, node) });
            }
        }
    }
    out
}

fn bind(d: &PatternDescriptor, site: &Site<'_>, node: &Node) -> MatchBindings {
    let mut b = MatchBindings::default();
    match d.bug_context {
        BugContext::CastExpression => {
            if let Kind::Cast { ty } = &node.kind {
                b.ty(if d.id == "FP1" { "T" } else { "T1" }, ty);
                b.node("exp", &node.children[0]);
            }
        }
        BugContext::NonPrimitiveAccess => {
            b.node("exp", node);
            b.ty("RT", &site.ret);
            if let Some(v) = default_value(&site.ret) {
                b.node("DEFAULT_VALUE", &v);
            }
        }
        BugContext::ArrayAccess => {
            b.node("exp", &node.children[0]);
            b.node("index", &node.children[1]);
        }
        BugContext::AnyStatement => b.node("statement", node),
        BugContext::ClassInstanceCreation => b.ty("T", &LangType::class(site.class.clone())),
        BugContext::ConditionalExpression => {
            b.node("condExp1", node);
            if let Kind::Binary { op } = node.kind {
                b.0.insert("Op", Binding::Op(op.symbol().to_string()));
            }
        }
        BugContext::VariableDeclaration => {
            if let Kind::LocalVar { ty, name } = &node.kind {
                b.ty("T1", ty);
                b.node("var", &Node::name(name));
            }
        }
        BugContext::IntegerDivision => {
            b.node("dividend", &node.children[0]);
            b.node("divisor", &node.children[1]);
        }
        BugContext::Literal => b.node("literal1", node),
        BugContext::Invocation => {
            let name = match &node.kind {
                Kind::Call { name } | Kind::MethodCall { name } | Kind::SuperCall { name } => name.clone(),
                Kind::New { class } => class.clone(),
                _ => String::new(),
            };
            b.0.insert("method1", Binding::Op(name));
        }
        BugContext::AssignmentOrInfix | BugContext::ArithmeticInfix => {
            let op = match node.kind {
                Kind::Binary { op } => op.symbol(),
                Kind::Assign { op } => op.symbol(),
                _ => "",
            };
            b.0.insert("Op", Binding::Op(op.to_string()));
            b.node("exp1", &node.children[0]);
            b.node("exp2", &node.children[1]);
        }
        BugContext::InstanceOf => {
            b.node("exp", &node.children[0]);
            if let Kind::InstanceOf { ty } = &node.kind {
                b.ty("T", ty);
            }
        }
        BugContext::ReturnStatement => {
            b.node("exp1", &node.children[0]);
            b.ty("RT", &site.ret);
        }
        BugContext::VariableReference => b.node("var1", node),
        BugContext::Method => {
            b.ty("RT", &site.ret);
            if let Some(v) = default_value(&site.ret) {
                b.node("DEFAULT_VALUE", &v);
            }
        }
    }
    b
}

/// Default value of a return type: `false`, `0`, `new String()` or `null`;
/// `None` for `void`, where the default is a bare `return;`.
pub fn default_value(rt: &LangType) -> Option<Node> {
    Some(match rt {
        LangType::Void => return None,
        LangType::Boolean => Node::lit(Lit::Bool(false)),
        t if t.is_primitive() => Node::int(0),
        LangType::Str => Node::leaf(Kind::New { class: "String".into() }),
        _ => Node::lit(Lit::Null),
    })
}

/// `return DEFAULT_VALUE;` for the return type (`return;` for void).
pub fn default_return(rt: &LangType) -> Node {
    Node::ret(default_value(rt))
}

/// One raw candidate of a pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub edits: Vec<AstEdit>,
    pub donor_distance: Option<usize>,
    pub donor_pos: usize,
}

impl Generated {
    fn plain(edits: Vec<AstEdit>) -> Self {
        Generated { edits, donor_distance: None, donor_pos: 0 }
    }

    fn donated(edits: Vec<AstEdit>, distance: usize, pos: usize) -> Self {
        Generated { edits, donor_distance: Some(distance), donor_pos: pos }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("{0}")]
    Precondition(&'static str),
    #[error("no donor code available")]
    NoDonor,
}

/// Run the generator of a match. Candidates come back ordered by donor
/// distance, then donor position, then generation order.
pub fn apply_pattern(site: &Site<'_>, m: &PatternMatch, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let target = site.stmt.find(m.target).or_else(|| (site.method.id == m.target).then_some(site.method));
    let target = target.ok_or(PatternError::Precondition("match target outside the statement"))?;
    let mut out = match m.descriptor.id {
        "FP1" => insert::cast_checker(site, target),
        "FP2.1" | "FP2.2" | "FP2.3" | "FP2.4" | "FP2.5" => insert::null_checker(site, target, m.descriptor.id, donors),
        "FP3" => insert::range_checker(site, target),
        "FP4.1" => insert::missed_invocation(site, donors),
        "FP4.2" => insert::missed_try_catch(site),
        "FP4.3" => insert::missed_return(site, donors),
        "FP4.4" => insert::missed_guard(site, donors),
        "FP5" => mutate::instance_creation(site, target),
        "FP6.1" => mutate::replace_condition(site, target, donors),
        "FP6.2" => mutate::remove_subcondition(target),
        "FP6.3" => mutate::insert_subcondition(target, donors),
        "FP7.1" | "FP7.2" => mutate::data_type(site, target),
        "FP8.1" | "FP8.2" | "FP8.3" => mutate::integer_division(target, m.descriptor.id),
        "FP9.1" => mutate::literal_to_literal(target, donors),
        "FP9.2" => mutate::literal_to_expression(site, target, donors),
        "FP10.1" => mutate::method_name(site, target, donors),
        "FP10.2" => mutate::argument(site, target, donors),
        "FP10.3" => mutate::remove_argument(site, target),
        "FP10.4" => mutate::insert_argument(site, target, donors),
        "FP11.1" => mutate::operator(target),
        "FP11.2" => mutate::arithmetic_priority(target),
        "FP11.3" => mutate::instanceof_to_null_check(target),
        "FP12" => mutate::returned_expression(site, target, donors),
        "FP13.1" => mutate::variable_to_variable(site, target, donors),
        "FP13.2" => mutate::variable_to_expression(site, target, donors),
        "FP14" => remove::move_statement(site),
        "FP15.1" => remove::delete_statement(site),
        "FP15.2" => remove::delete_method_body(site),
        _ => Err(PatternError::Precondition("unknown pattern")),
    }?;
    if out.is_empty() {
        return Err(if m.descriptor.needs_donor { PatternError::NoDonor } else { PatternError::Precondition("no applicable rewrite") });
    }
    out.sort_by_key(|g| (g.donor_distance, g.donor_pos));
    Ok(out)
}

/// A generated candidate whose patched program parses and type-checks.
#[derive(Clone, Debug)]
pub struct Realized {
    pub generated: Generated,
    pub patch: Patch,
    /// Index of this candidate in the generator's output.
    pub gen_index: usize,
    /// The program with the patched file reprinted.
    pub files: Vec<SourceFile>,
    pub checked: CheckedProgram,
}

/// Result of realizing the output of one generator.
#[derive(Clone, Debug, Default)]
pub struct Realization {
    pub kept: Vec<Realized>,
    /// Candidates tried, including those rejected by the type checker.
    pub tried: usize,
}

/// Apply each candidate to `files[file]` (whose checked tree is
/// `original.asts[file]`), keep those that type-check and differ from the
/// original, stopping after `cap`.
pub fn realize(
    files: &[SourceFile],
    original: &CheckedProgram,
    file: usize,
    pattern_id: &str,
    generated: Vec<Generated>,
    cap: usize,
) -> Realization {
    let mut out = Vec::new();
    let mut tried = 0;
    for (gen_index, g) in generated.into_iter().enumerate() {
        if out.len() >= cap {
            break;
        }
        tried += 1;
        let Some((files2, checked)) = patched_program(files, original, file, &g.edits) else {
            log::debug!("{pattern_id}: candidate {gen_index} rejected by the type checker");
            continue;
        };
        let patch = Patch {
            file: files[file].path.clone(),
            edits: g.edits.clone(),
            pattern_id: pattern_id.to_string(),
            donor_distance: g.donor_distance,
        };
        out.push(Realized { generated: g, patch, gen_index, files: files2, checked });
    }
    Realization { kept: out, tried }
}

/// Patched and re-checked program, or `None` when the edits do not apply,
/// the result does not type-check, or nothing changes.
pub fn patched_program(
    files: &[SourceFile],
    original: &CheckedProgram,
    file: usize,
    edits: &[AstEdit],
) -> Option<(Vec<SourceFile>, CheckedProgram)> {
    let ast = apply_edits(&original.asts[file], edits).ok()?;
    let text = pretty_print(&ast);
    let reparsed = SourceFile::parse(files[file].path.clone(), text).ok()?;
    let mut files2 = files.to_vec();
    files2[file] = reparsed;
    let checked = check_program(&files2).ok()?;
    if normalize_equal(&checked.asts[file], &original.asts[file]) {
        return None;
    }
    Some((files2, checked))
}

// ---- helpers shared by the generators ----

fn hole_block() -> Node {
    Node::block(vec![Node::leaf(Kind::Hole)])
}

fn null_lit() -> Node {
    Node::lit(Lit::Null)
}

/// Strip parentheses.
fn bare(n: &Node) -> &Node {
    if n.kind == Kind::Paren {
        bare(&n.children[0])
    } else {
        n
    }
}

fn is_literal_like(n: &Node) -> bool {
    let n = bare(n);
    match &n.kind {
        Kind::Literal(_) => true,
        Kind::Unary { op: UnOp::Neg } => matches!(bare(&n.children[0]).kind, Kind::Literal(_)),
        _ => false,
    }
}

fn same_text(a: &Node, b: &Node) -> bool {
    normalize_equal(a, b)
}

/// Variables declared by a statement.
fn declared(n: &Node) -> Vec<String> {
    let mut out = Vec::new();
    n.walk(&mut |s| {
        if let Kind::LocalVar { name, .. } = &s.kind {
            out.push(name.clone());
        }
    });
    out
}

/// Variable a statement writes directly (`v = ...`, `v++`, `T v = ...`).
fn written_var(n: &Node) -> Option<String> {
    match &n.kind {
        Kind::LocalVar { name, .. } => Some(name.clone()),
        Kind::Assign { .. } | Kind::Step { .. } => match &n.children[0].kind {
            Kind::Name(v) => Some(v.clone()),
            _ => None,
        },
        _ => None,
    }
}

/// The last following sibling of the site statement that (transitively)
/// uses what the statement defines; `None` if nothing depends on it or
/// the statement is not in a block.
fn dependents_through(site: &Site<'_>) -> Option<NodeId> {
    let parent = site.parent().filter(|p| p.kind == Kind::Block)?;
    let idx = parent.children.iter().position(|c| c.id == site.stmt.id)?;
    let mut names: Vec<String> = written_var(site.stmt).into_iter().collect();
    names.extend(declared(site.stmt));
    if names.is_empty() {
        return None;
    }
    let mut end = idx;
    loop {
        let before = end;
        for (j, s) in parent.children.iter().enumerate().skip(end + 1) {
            if s.referenced_names().iter().any(|v| names.contains(v)) {
                end = j;
            }
        }
        for s in &parent.children[before + 1..=end] {
            names.extend(declared(s));
        }
        if end == before {
            break;
        }
    }
    (end > idx).then(|| parent.children[end].id)
}

/// Wrap edits for the statement: first through its dependents, then alone.
fn wrap_variants(site: &Site<'_>, template: &Node) -> Vec<Vec<AstEdit>> {
    let mut out = Vec::new();
    if let Some(through) = dependents_through(site) {
        out.push(vec![AstEdit::Wrap { target: site.stmt.id, through: Some(through), template: template.clone() }]);
    }
    out.push(vec![AstEdit::Wrap { target: site.stmt.id, through: None, template: template.clone() }]);
    out
}

/// Whether `cond` contains a comparison of `exp` with `null`.
fn has_null_comparison(cond: &Node, exp: &Node) -> bool {
    cond.any(&|n| match n.kind {
        Kind::Binary { op: BinOp::Eq | BinOp::Ne } => {
            let (l, r) = (bare(&n.children[0]), bare(&n.children[1]));
            (same_text(l, exp) && matches!(r.kind, Kind::Literal(Lit::Null)))
                || (same_text(r, exp) && matches!(l.kind, Kind::Literal(Lit::Null)))
        }
        _ => false,
    })
}

#[cfg(test)]
mod tests;

//! Insertion patterns: cast, null and range checkers and missed statements.

use crate::ast::{AstEdit, BinOp, Kind, Lit, Node};
use crate::donor::DonorSet;
use crate::lang::LangType;
use crate::site::Site;

use super::{
    bare, default_return, has_null_comparison, hole_block, null_lit, same_text, wrap_variants, Generated,
    PatternError,
};

/// Argument combinations tried per inserted method invocation.
const MAX_ARG_COMBINATIONS: usize = 4;

pub(super) fn cast_checker(site: &Site<'_>, cast: &Node) -> Result<Vec<Generated>, PatternError> {
    let Kind::Cast { ty } = &cast.kind else { return Err(PatternError::Precondition("not a cast")) };
    let exp = &cast.children[0];
    if !matches!(ty, LangType::Class(_)) || !exp.ty.as_ref().is_some_and(LangType::is_reference) {
        return Err(PatternError::Precondition("cast is not a reference cast"));
    }
    let guarded = site.enclosing_conditions().iter().any(|c| {
        c.any(&|n| matches!(&n.kind, Kind::InstanceOf { ty: t } if t == ty) && same_text(bare(&n.children[0]), bare(exp)))
    });
    if guarded {
        return Err(PatternError::Precondition("cast already checked"));
    }
    let check = Node::new(Kind::InstanceOf { ty: ty.clone() }, vec![exp.detached()]);
    let template = Node::if_then(check, hole_block());
    Ok(wrap_variants(site, &template).into_iter().map(Generated::plain).collect())
}

pub(super) fn null_checker(
    site: &Site<'_>,
    exp: &Node,
    id: &str,
    donors: &DonorSet,
) -> Result<Vec<Generated>, PatternError> {
    let checked = site.enclosing_conditions().iter().any(|c| has_null_comparison(c, exp))
        || site.own_expressions().iter().any(|e| has_null_comparison(e, exp));
    if checked {
        return Err(PatternError::Precondition("access already null-checked"));
    }
    let is_null = || Node::binary(BinOp::Eq, exp.detached(), null_lit());
    let guard = |body: Node| Node::if_then(is_null(), Node::block(vec![body]));
    let before = |s: Node| vec![AstEdit::InsertBefore { target: site.stmt.id, payload: s }];
    let out = match id {
        "FP2.1" => {
            let template = Node::if_then(Node::binary(BinOp::Ne, exp.detached(), null_lit()), hole_block());
            wrap_variants(site, &template).into_iter().map(Generated::plain).collect()
        }
        "FP2.2" if site.ret != LangType::Void => vec![Generated::plain(before(guard(default_return(&site.ret))))],
        "FP2.3" if site.ret == LangType::Void => vec![Generated::plain(before(guard(Node::ret(None))))],
        "FP2.4" if site.in_loop() => vec![Generated::plain(before(guard(Node::leaf(Kind::Continue))))],
        "FP2.5" => {
            let ty = exp.ty.clone().unwrap_or(LangType::Null);
            let assignable = matches!(exp.kind, Kind::Name(_) | Kind::Select { .. } | Kind::Index);
            let mut out = Vec::new();
            for d in donors.expressions.iter().chain(&donors.variables) {
                if !site.classes().compatible(&d.ty, &ty) || same_text(&d.node, exp) || d.node.any(&|n| same_text(n, exp)) {
                    continue;
                }
                let edits = if assignable {
                    let assign =
                        Node::new(Kind::Assign { op: crate::ast::AssignOp::Set }, vec![exp.detached(), d.node.clone()]);
                    before(guard(assign))
                } else {
                    let swapped = Node::new(Kind::Conditional, vec![is_null(), d.node.clone(), exp.detached()]);
                    vec![AstEdit::Update { target: exp.id, replacement: swapped }]
                };
                out.push(Generated::donated(edits, d.distance, d.pos));
            }
            out
        }
        _ => Vec::new(),
    };
    Ok(out)
}

pub(super) fn range_checker(site: &Site<'_>, access: &Node) -> Result<Vec<Generated>, PatternError> {
    let array = &access.children[0];
    let index = &access.children[1];
    let mentions_length = |c: &Node| {
        c.any(&|n| matches!(&n.kind, Kind::Select { name } if name == "length") && same_text(bare(&n.children[0]), bare(array)))
    };
    if site.enclosing_conditions().iter().any(|c| mentions_length(c)) {
        return Err(PatternError::Precondition("access already range-checked"));
    }
    let length = || Node::new(Kind::Select { name: "length".into() }, vec![array.detached()]);
    let in_range = Node::binary(
        BinOp::And,
        Node::binary(BinOp::Ge, index.detached(), Node::int(0)),
        Node::binary(BinOp::Lt, index.detached(), length()),
    );
    let mut out: Vec<Generated> =
        wrap_variants(site, &Node::if_then(in_range, hole_block())).into_iter().map(Generated::plain).collect();
    let out_of_range = Node::binary(
        BinOp::Or,
        Node::binary(BinOp::Lt, index.detached(), Node::int(0)),
        Node::binary(BinOp::Ge, index.detached(), length()),
    );
    let early = Node::if_then(out_of_range, Node::block(vec![default_return(&site.ret)]));
    out.push(Generated::plain(vec![AstEdit::InsertBefore { target: site.stmt.id, payload: early }]));
    Ok(out)
}

pub(super) fn missed_invocation(site: &Site<'_>, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let classes = site.classes();
    // arguments and receivers come from the buggy statement
    let mut pool: Vec<&Node> = Vec::new();
    for e in site.own_expressions() {
        let usable = matches!(e.kind, Kind::Name(_) | Kind::Select { .. } | Kind::Index | Kind::This)
            && e.ty.as_ref().is_some_and(|t| *t != LangType::Void);
        if usable && !pool.iter().any(|p| same_text(p, e)) {
            pool.push(e);
        }
    }
    let current = site.method_name().map(|n| (n.to_string(), param_types(site.method)));
    let ancestry = classes.ancestry(&site.class);
    let mut out = Vec::new();
    for m in &donors.methods {
        let info = &m.info;
        let mut calls = Vec::new();
        let is_current = current.as_ref().is_some_and(|(n, p)| *n == info.name && *p == info.params && info.owner == site.class);
        if ancestry.contains(&info.owner) && !is_current {
            for args in argument_lists(&info.params, &pool, classes) {
                calls.push(Node::new(Kind::Call { name: info.name.clone() }, args));
            }
        }
        for recv in &pool {
            let Some(LangType::Class(c)) = &recv.ty else { continue };
            if recv.kind == Kind::This || !classes.is_subclass(c, &info.owner) {
                continue;
            }
            for args in argument_lists(&info.params, &pool, classes) {
                let mut children = vec![recv.detached()];
                children.extend(args);
                calls.push(Node::new(Kind::MethodCall { name: info.name.clone() }, children));
            }
        }
        for call in calls {
            let stmt = Node::new(Kind::ExprStmt, vec![call]);
            out.push(Generated::donated(
                vec![AstEdit::InsertBefore { target: site.stmt.id, payload: stmt.clone() }],
                m.distance,
                m.pos,
            ));
            out.push(Generated::donated(vec![AstEdit::InsertAfter { target: site.stmt.id, payload: stmt }], m.distance, m.pos));
        }
    }
    Ok(out)
}

fn param_types(method: &Node) -> Vec<LangType> {
    method
        .children
        .iter()
        .filter_map(|c| match &c.kind {
            Kind::Param { ty, .. } => Some(ty.clone()),
            _ => None,
        })
        .collect()
}

/// Argument lists for `params` drawn from `pool`, in odometer order.
fn argument_lists(params: &[LangType], pool: &[&Node], classes: &crate::lang::ClassTable) -> Vec<Vec<Node>> {
    let choices: Vec<Vec<&Node>> = params
        .iter()
        .map(|p| pool.iter().copied().filter(|e| e.ty.as_ref().is_some_and(|t| classes.compatible(t, p))).collect())
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; params.len()];
    loop {
        out.push(idx.iter().zip(&choices).map(|(i, c)| c[*i].detached()).collect());
        if out.len() >= MAX_ARG_COMBINATIONS {
            break;
        }
        let mut k = params.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

pub(super) fn missed_try_catch(site: &Site<'_>) -> Result<Vec<Generated>, PatternError> {
    let taken: Vec<String> = site.scope().into_iter().map(|v| v.name).collect();
    let mut name = "e".to_string();
    let mut k = 0;
    while taken.contains(&name) || site.stmt.any(&|n| matches!(&n.kind, Kind::LocalVar { name: v, .. } if *v == name)) {
        k += 1;
        name = format!("e{k}");
    }
    let catch = Node::new(Kind::Catch { ty: LangType::class(crate::lang::types::EXCEPTION), name }, vec![Node::block(vec![])]);
    let template = Node::new(Kind::Try, vec![hole_block(), catch]);
    Ok(wrap_variants(site, &template).into_iter().map(Generated::plain).collect())
}

pub(super) fn missed_return(site: &Site<'_>, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    Ok(donors
        .conditions
        .iter()
        .map(|c| {
            let guard = Node::if_then(c.node.clone(), Node::block(vec![default_return(&site.ret)]));
            Generated::donated(vec![AstEdit::InsertBefore { target: site.stmt.id, payload: guard }], c.distance, c.pos)
        })
        .collect())
}

/// Conditions that would duplicate the cast, null or range checkers.
fn checker_shaped(cond: &Node) -> bool {
    cond.any(&|n| match &n.kind {
        Kind::InstanceOf { .. } => true,
        Kind::Binary { op: BinOp::Eq | BinOp::Ne } => {
            n.children.iter().any(|c| matches!(bare(c).kind, Kind::Literal(Lit::Null)))
        }
        Kind::Select { name } | Kind::MethodCall { name } => name == "length",
        _ => false,
    })
}

pub(super) fn missed_guard(site: &Site<'_>, donors: &DonorSet) -> Result<Vec<Generated>, PatternError> {
    let mut out = Vec::new();
    for c in donors.conditions.iter().filter(|c| !checker_shaped(&c.node)) {
        let template = Node::if_then(c.node.clone(), hole_block());
        for edits in wrap_variants(site, &template) {
            out.push(Generated::donated(edits, c.distance, c.pos));
        }
    }
    Ok(out)
}

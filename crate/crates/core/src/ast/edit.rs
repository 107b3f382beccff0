//! Tree edits and patches.
//!
//! Edit targets are preorder ids of the *input* tree. Nodes created by an
//! edit carry [`DETACHED`] ids, so targets stay unambiguous while a list of
//! edits is applied in order. The result is renumbered; spans of original
//! nodes are kept and spans of inserted nodes are empty until the program is
//! printed and parsed again.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Kind, Node, NodeId, DETACHED};

#[derive(Clone, Debug, PartialEq)]
pub enum AstEdit {
    /// Replace the target subtree.
    Update { target: NodeId, replacement: Node },
    /// Remove the target; a statement in a single-statement slot becomes `;`.
    Delete { target: NodeId },
    InsertBefore { target: NodeId, payload: Node },
    InsertAfter { target: NodeId, payload: Node },
    /// Put the target statement, together with its following siblings up
    /// to and including `through`, in place of the single [`Kind::Hole`] of
    /// `template`.
    Wrap { target: NodeId, through: Option<NodeId>, template: Node },
    /// Move the target statement next to `anchor`.
    Move { target: NodeId, anchor: NodeId, after: bool },
}

impl AstEdit {
    pub fn target(&self) -> NodeId {
        match self {
            AstEdit::Update { target, .. }
            | AstEdit::Delete { target }
            | AstEdit::InsertBefore { target, .. }
            | AstEdit::InsertAfter { target, .. }
            | AstEdit::Wrap { target, .. }
            | AstEdit::Move { target, .. } => *target,
        }
    }
}

/// Change action class of a patch, in scheduling priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Update,
    Insert,
    Delete,
    Move,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Update => "Update",
            Action::Insert => "Insert",
            Action::Delete => "Delete",
            Action::Move => "Move",
        }
    }
}

/// Edits to one file, applied in order.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub file: String,
    pub edits: Vec<AstEdit>,
    pub pattern_id: String,
    pub donor_distance: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("edit target {0} does not exist")]
    DanglingTarget(NodeId),
    #[error("edit would leave node {0} with an invalid number of children")]
    Arity(NodeId),
    #[error("node {0} is not in a statement or argument list")]
    NotInList(NodeId),
    #[error("wrap template must contain exactly one hole")]
    BadTemplate,
    #[error("cannot move node {0} relative to itself or its descendant")]
    BadMove(NodeId),
}

/// Apply `edits` in order to a copy of `ast`.
pub fn apply_edits(ast: &Node, edits: &[AstEdit]) -> Result<Node, EditError> {
    let mut out = ast.clone();
    for e in edits {
        apply_one(&mut out, e)?;
    }
    out.check_arity().map_err(EditError::Arity)?;
    if out.any(&|n| n.kind == Kind::Hole) {
        return Err(EditError::BadTemplate);
    }
    out.renumber();
    Ok(out)
}

fn locate(root: &Node, id: NodeId) -> Result<(Vec<usize>, usize), EditError> {
    if id == DETACHED {
        return Err(EditError::DanglingTarget(id));
    }
    let mut path = root.path_to(id).ok_or(EditError::DanglingTarget(id))?;
    let idx = path.pop().ok_or(EditError::NotInList(id))?;
    Ok((path, idx))
}

fn apply_one(root: &mut Node, edit: &AstEdit) -> Result<(), EditError> {
    match edit {
        AstEdit::Update { target, replacement } => {
            let node = root.find_mut(*target).ok_or(EditError::DanglingTarget(*target))?;
            *node = replacement.detached();
            Ok(())
        }
        AstEdit::Delete { target } => {
            let (ppath, idx) = locate(root, *target)?;
            let parent = root.at_path_mut(&ppath).expect("parent");
            if parent.kind.has_list_children() {
                parent.children.remove(idx);
            } else if parent.children[idx].is_statement() {
                parent.children[idx] = Node::leaf(Kind::Empty);
            } else {
                return Err(EditError::Arity(parent.id));
            }
            Ok(())
        }
        AstEdit::InsertBefore { target, payload } | AstEdit::InsertAfter { target, payload } => {
            let after = matches!(edit, AstEdit::InsertAfter { .. });
            let (ppath, idx) = locate(root, *target)?;
            let parent = root.at_path_mut(&ppath).expect("parent");
            let payload = payload.detached();
            if parent.kind.has_list_children() {
                parent.children.insert(if after { idx + 1 } else { idx }, payload);
            } else if parent.children[idx].is_statement() && payload.is_statement() {
                let existing = std::mem::replace(&mut parent.children[idx], Node::leaf(Kind::Empty));
                let stmts = if after { vec![existing, payload] } else { vec![payload, existing] };
                parent.children[idx] = Node::block(stmts);
            } else {
                return Err(EditError::NotInList(*target));
            }
            Ok(())
        }
        AstEdit::Wrap { target, through, template } => {
            let holes = template.preorder().iter().filter(|n| n.kind == Kind::Hole).count();
            if holes != 1 {
                return Err(EditError::BadTemplate);
            }
            let (ppath, idx) = locate(root, *target)?;
            let parent = root.at_path_mut(&ppath).expect("parent");
            let end = match through {
                None => idx,
                Some(t) => {
                    if !parent.kind.has_list_children() {
                        return Err(EditError::NotInList(*t));
                    }
                    parent.children.iter().position(|c| c.id == *t).filter(|&e| e >= idx).ok_or(EditError::DanglingTarget(*t))?
                }
            };
            let wrapped: Vec<Node> = parent.children.drain(idx..=end).collect();
            let mut filled = template.detached();
            fill_hole(&mut filled, wrapped)?;
            parent.children.insert(idx, filled);
            Ok(())
        }
        AstEdit::Move { target, anchor, after } => {
            if target == anchor {
                return Err(EditError::BadMove(*target));
            }
            let moving = root.find(*target).ok_or(EditError::DanglingTarget(*target))?;
            if moving.find(*anchor).is_some() {
                return Err(EditError::BadMove(*target));
            }
            let (ppath, idx) = locate(root, *target)?;
            let parent = root.at_path_mut(&ppath).expect("parent");
            if !parent.kind.has_list_children() {
                return Err(EditError::NotInList(*target));
            }
            let node = parent.children.remove(idx);
            let (apath, aidx) = locate(root, *anchor)?;
            let aparent = root.at_path_mut(&apath).expect("parent");
            if !aparent.kind.has_list_children() {
                return Err(EditError::NotInList(*anchor));
            }
            aparent.children.insert(if *after { aidx + 1 } else { aidx }, node);
            Ok(())
        }
    }
}

/// Replace the hole of `template` by `stmts`. A hole directly inside a block
/// is spliced; elsewhere it takes a single statement (or a block of them).
fn fill_hole(template: &mut Node, mut stmts: Vec<Node>) -> Result<(), EditError> {
    if template.kind == Kind::Hole {
        *template = if stmts.len() == 1 { stmts.remove(0) } else { Node::block(stmts) };
        return Ok(());
    }
    if let Some(pos) = template.children.iter().position(|c| c.kind == Kind::Hole) {
        if template.kind == Kind::Block {
            template.children.splice(pos..=pos, stmts);
        } else {
            template.children[pos] = if stmts.len() == 1 { stmts.remove(0) } else { Node::block(stmts) };
        }
        return Ok(());
    }
    for c in &mut template.children {
        if c.any(&|n| n.kind == Kind::Hole) {
            return fill_hole(c, stmts);
        }
    }
    Err(EditError::BadTemplate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Lit;
    use crate::lang::parser::parse;
    use crate::lang::printer::pretty_print;

    fn method_body(src: &str) -> Node {
        parse(&format!("class A {{ void m(int x) {{ {src} }} }}")).unwrap()
    }

    fn block_of(ast: &Node) -> &Node {
        ast.children[0].children[0].children.last().unwrap()
    }

    #[test]
    fn delete_only_statement_leaves_empty_block() {
        let ast = method_body("x = 1;");
        let stmt = block_of(&ast).children[0].id;
        let out = apply_edits(&ast, &[AstEdit::Delete { target: stmt }]).unwrap();
        assert!(block_of(&out).children.is_empty());
        out.check_arity().unwrap();
    }

    #[test]
    fn update_literal_changes_one_leaf() {
        let ast = method_body("x = 0;");
        let lit = ast.preorder().into_iter().find(|n| matches!(n.kind, Kind::Literal(_))).unwrap().id;
        let out = apply_edits(&ast, &[AstEdit::Update { target: lit, replacement: Node::int(1) }]).unwrap();
        let diff: Vec<_> = ast.preorder().into_iter().zip(out.preorder()).filter(|(a, b)| a.kind != b.kind).collect();
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].1.kind, Kind::Literal(Lit::Int(1)));
        assert_eq!(ast, method_body("x = 0;"), "input is unmodified");
    }

    #[test]
    fn edit_list_equals_sequential_application() {
        let ast = method_body("x = 0; x = 2;");
        let first = block_of(&ast).children[0].id;
        let lit = block_of(&ast).children[1].children[1].id;
        let ins = AstEdit::InsertBefore { target: first, payload: parse_stmt("x = 5;") };
        let upd = AstEdit::Update { target: lit, replacement: Node::int(3) };
        let both = apply_edits(&ast, &[ins.clone(), upd.clone()]).unwrap();
        // sequential: ids of the second edit are re-resolved on the new tree
        let step1 = apply_edits(&ast, &[ins]).unwrap();
        let lit2 = block_of(&step1).children[2].children[1].id;
        let step2 = apply_edits(&step1, &[AstEdit::Update { target: lit2, replacement: Node::int(3) }]).unwrap();
        assert_eq!(both, step2);
        assert_eq!(pretty_print(&both), pretty_print(&method_body("x = 5; x = 0; x = 3;")));
    }

    fn parse_stmt(s: &str) -> Node {
        crate::lang::parser::parse_stmt(s).unwrap()
    }

    #[test]
    fn wrap_with_following_siblings() {
        let ast = method_body("x = 1; x = 2; x = 3;");
        let b = block_of(&ast);
        let template = Node::if_then(Node::lit(Lit::Bool(true)), Node::block(vec![Node::leaf(Kind::Hole)]));
        let out = apply_edits(
            &ast,
            &[AstEdit::Wrap { target: b.children[0].id, through: Some(b.children[1].id), template }],
        )
        .unwrap();
        assert_eq!(pretty_print(&out), pretty_print(&method_body("if (true) { x = 1; x = 2; } x = 3;")));
    }

    #[test]
    fn move_and_insert_into_single_statement_slot() {
        let ast = method_body("x = 1; x = 2; if (x > 0) x = 3;");
        let b = block_of(&ast);
        let out = apply_edits(&ast, &[AstEdit::Move { target: b.children[0].id, anchor: b.children[1].id, after: true }])
            .unwrap();
        assert_eq!(pretty_print(&out), pretty_print(&method_body("x = 2; x = 1; if (x > 0) x = 3;")));
        let then = b.children[2].children[1].id;
        let out = apply_edits(&ast, &[AstEdit::InsertBefore { target: then, payload: parse_stmt("x = 9;") }]).unwrap();
        assert_eq!(pretty_print(&out), pretty_print(&method_body("x = 1; x = 2; if (x > 0) { x = 9; x = 3; }")));
    }

    #[test]
    fn errors() {
        let ast = method_body("x = 1;");
        assert_eq!(apply_edits(&ast, &[AstEdit::Delete { target: 999 }]), Err(EditError::DanglingTarget(999)));
        let assign = block_of(&ast).children[0].clone();
        let value = assign.children[1].id;
        assert!(matches!(apply_edits(&ast, &[AstEdit::Delete { target: value }]), Err(EditError::Arity(_))));
    }
}

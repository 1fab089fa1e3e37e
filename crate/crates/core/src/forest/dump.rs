use alloc::string::String;
use core::fmt::Write;

use super::{BlockingStatus, CompletionForest, NodeKind};
use crate::vocab::Vocabulary;

/// Deterministic text rendering: nodes in creation order, then edges,
/// inequalities and merges. Statuses are appended when given.
pub fn dump(f: &CompletionForest, vocab: &Vocabulary, statuses: Option<&[BlockingStatus]>) -> String {
    let mut out = String::new();
    let _ = write_dump(&mut out, f, vocab, statuses);
    out
}

fn write_dump(
    out: &mut String,
    f: &CompletionForest,
    vocab: &Vocabulary,
    statuses: Option<&[BlockingStatus]>,
) -> core::fmt::Result {
    writeln!(out, "forest nodes={}", f.node_count())?;
    for x in f.node_ids() {
        match &f.node(x).kind {
            NodeKind::Root { individual } => write!(out, "node {x} root {individual}")?,
            NodeKind::Tree { parent } => write!(out, "node {x} tree parent={parent}")?,
        }
        out.push_str(" label={");
        for (i, c) in f.label(x).iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "{}", vocab.concept(*c))?;
        }
        out.push('}');
        if let Some(st) = statuses {
            match &st[x.index()] {
                BlockingStatus::Unblocked => out.push_str(" status=unblocked"),
                BlockingStatus::Indirect => out.push_str(" status=indirect"),
                BlockingStatus::Direct { witness, tree_root, witness_root, .. } => write!(
                    out,
                    " status=direct witness={witness} tree={tree_root} witness_tree={witness_root}"
                )?,
            }
        }
        out.push('\n');
    }
    for (x, y, roles) in f.edges() {
        write!(out, "edge {x} {y} {{")?;
        for (i, r) in roles.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "{}", vocab.role(*r))?;
        }
        out.push_str("}\n");
    }
    for (x, y) in f.neq_pairs() {
        writeln!(out, "neq {x} {y}")?;
    }
    for (y, z) in f.merged() {
        writeln!(out, "merged {y} {z}")?;
    }
    Ok(())
}

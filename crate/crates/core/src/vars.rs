//! Variable identifiers and the fixed session ordering.
//!
//! Node variables x_{i,r} exist only for positive nodes; a negative node's
//! variables are eliminated at construction via x_{τi,r} = −x_{i,r}. The
//! derived `Ord` puts node variables first, which keeps the leading monomial
//! of a factor stable under the shift substitution x ↦ x + kℏ (the
//! substitution only introduces lex-smaller monomials).

use serde::{Deserialize, Serialize};
use std::fmt;

/// A variable of the coefficient field ℚ(x, w, ℏ, u, v, …).
///
/// `node` indices are ordinals: for `Node` the ordinal runs over the positive
/// half Q0⁺ in sorted node-id order, for `Framing` over all of Q0. `idx` is
/// 1-based, matching the subscripts x_{i,r} and w_{j,k}.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Var {
    Node { node: u16, idx: u16 },
    Framing { node: u16, idx: u16 },
    Hbar,
    Spectral(u16),
}

pub const HBAR: Var = Var::Hbar;
/// The conventional spectral variables.
pub const U: Var = Var::Spectral(0);
pub const V: Var = Var::Spectral(1);
pub const U1: Var = Var::Spectral(2);
pub const U2: Var = Var::Spectral(3);
/// Generic spectral symbol used by truncation tests.
pub const Z: Var = Var::Spectral(4);

pub fn spectral_name(id: u16) -> String {
    match id {
        0 => "u".into(),
        1 => "v".into(),
        2 => "u1".into(),
        3 => "u2".into(),
        4 => "z".into(),
        n => format!("s{n}"),
    }
}

pub fn spectral_by_name(name: &str) -> Option<Var> {
    let id = match name {
        "u" => 0,
        "v" => 1,
        "u1" => 2,
        "u2" => 3,
        "z" => 4,
        _ => {
            let rest = name.strip_prefix('s')?;
            rest.parse::<u16>().ok()?
        }
    };
    Some(Var::Spectral(id))
}

impl Var {
    pub fn is_node(&self) -> bool {
        matches!(self, Var::Node { .. })
    }
    pub fn is_spectral(&self) -> bool {
        matches!(self, Var::Spectral(_))
    }
}

/// Maps variable ordinals back to the node-id strings of a quiver for
/// rendering and parsing. A plain pair of tables so it can be built from any
/// context (or left empty for contexts without a quiver).
#[derive(Clone, Debug, Default)]
pub struct VarNames {
    /// Positive-node ordinal → node-id string.
    pub positive: Vec<String>,
    /// All-node ordinal → node-id string.
    pub all: Vec<String>,
}

impl VarNames {
    pub fn render(&self, v: Var) -> String {
        match v {
            Var::Node { node, idx } => {
                let id = self
                    .positive
                    .get(node as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("#{node}"));
                format!("x[{id},{idx}]")
            }
            Var::Framing { node, idx } => {
                let id = self
                    .all
                    .get(node as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("#{node}"));
                format!("w[{id},{idx}]")
            }
            Var::Hbar => "h".into(),
            Var::Spectral(id) => spectral_name(id),
        }
    }

    pub fn parse(&self, s: &str) -> Option<Var> {
        if s == "h" {
            return Some(Var::Hbar);
        }
        if let Some(rest) = s.strip_prefix("x[").and_then(|r| r.strip_suffix(']')) {
            let (id, idx) = rest.rsplit_once(',')?;
            let node = self.positive.iter().position(|n| n == id)? as u16;
            return Some(Var::Node {
                node,
                idx: idx.parse().ok()?,
            });
        }
        if let Some(rest) = s.strip_prefix("w[").and_then(|r| r.strip_suffix(']')) {
            let (id, idx) = rest.rsplit_once(',')?;
            let node = self.all.iter().position(|n| n == id)? as u16;
            return Some(Var::Framing {
                node,
                idx: idx.parse().ok()?,
            });
        }
        spectral_by_name(s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Node { node, idx } => write!(f, "x[#{node},{idx}]"),
            Var::Framing { node, idx } => write!(f, "w[#{node},{idx}]"),
            Var::Hbar => write!(f, "h"),
            Var::Spectral(id) => write!(f, "{}", spectral_name(*id)),
        }
    }
}

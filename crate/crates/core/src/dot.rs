//! Graphviz exports.

use std::fmt::Write;

use crate::bitopology::BitopSpace;
use crate::completion::FormalBallPoset;
use crate::connectivity::{antisym_components, CombinedDigraph};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Antisymmetric components as clusters, combined-digraph arcs labelled `+`, `-` or `+-`.
pub fn components_dot(b: &BitopSpace) -> String {
    let mut out = String::from("digraph components {\n  rankdir=LR;\n");
    for (k, comp) in antisym_components(b).iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{k} {{\n    label=\"component {k}\";");
        for &x in comp {
            let _ = writeln!(out, "    n{x} [label={}];", quote(&b.points()[x]));
        }
        out.push_str("  }\n");
    }
    let g = CombinedDigraph::new(b);
    for (x, y, kind) in g.arcs(b) {
        let label = match (kind.forward, kind.backward) {
            (true, true) => "+-",
            (true, false) => "+",
            _ => "-",
        };
        let _ = writeln!(out, "  n{x} -> n{y} [label=\"{label}\"];");
    }
    out.push_str("}\n");
    out
}

/// Hasse diagram of the formal-ball order, larger balls at the top.
pub fn formal_ball_dot(p: &FormalBallPoset, labels: &[String]) -> String {
    let mut out = String::from("digraph formal_balls {\n  rankdir=BT;\n");
    for (i, ball) in p.balls.iter().enumerate() {
        let name = format!("({}, {})", labels[ball.point], ball.radius);
        let _ = writeln!(out, "  b{i} [label={}];", quote(&name));
    }
    for &(i, j) in &p.hasse {
        let _ = writeln!(out, "  b{j} -> b{i};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_dot_shape() {
        let b = BitopSpace::from_lists(&[vec![0, 1], vec![1]], &[vec![0], vec![1]]).unwrap();
        let dot = components_dot(&b);
        assert!(dot.contains("cluster_0") && dot.contains("cluster_1"));
        assert!(dot.contains("n0 -> n1 [label=\"+\"]"));
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}

use std::fmt::Write;

use super::{Color, ColoredDigraph};

/// Graphviz source. Black edges are solid, red edges dashed and red.
/// `annotate` may attach a label suffix to any node.
pub fn to_dot(g: &ColoredDigraph, annotate: impl Fn(u64) -> Option<String>) -> String {
    let mut out = String::new();
    writeln!(out, "digraph gamma_{} {{", g.modulus()).unwrap();
    for &v in g.nodes() {
        match annotate(v) {
            Some(extra) => writeln!(out, "  {v} [label=\"{v}\\n{extra}\"];").unwrap(),
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
    for e in g.edges() {
        let style = match e.color {
            Color::Black => "color=black, style=solid",
            Color::Red => "color=red, style=dashed",
        };
        writeln!(out, "  {} -> {} [{style}];", e.from, e.to).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::build_gamma;

    #[test]
    fn dot_styles() {
        let dot = to_dot(&build_gamma(2).unwrap(), |_| None);
        assert!(dot.starts_with("digraph gamma_2 {"));
        assert!(dot.contains("0 -> 1 [color=black, style=solid];"));
        assert!(dot.contains("1 -> 0 [color=red, style=dashed];"));
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn annotations() {
        let dot = to_dot(&build_gamma(2).unwrap(), |v| (v == 1).then(|| "pair 0".to_string()));
        assert!(dot.contains("1 [label=\"1\\npair 0\"];"));
        assert!(dot.contains("  0;"));
    }
}

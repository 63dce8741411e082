//! DOT and JSON emission for resolution trees.

use serde_json::json;

use crate::germs::Chart;

use super::resolve::{ResolutionTree, TreeNode};
use super::SingularityClass;

fn chart_name(c: Chart) -> &'static str {
    match c {
        Chart::T => "t",
        Chart::S => "s",
    }
}

fn eigen_text(class: &SingularityClass) -> Option<String> {
    match class {
        SingularityClass::ReducedNonDegenerate { eigenvalues }
        | SingularityClass::ReducedSaddleNode { eigenvalues } => {
            Some(format!("({}, {})", eigenvalues.0, eigenvalues.1))
        }
        _ => None,
    }
}

fn node_label(i: usize, n: &TreeNode) -> String {
    let mut parts = vec![format!("#{i}")];
    match &n.arrival {
        Some(a) => parts.push(format!("chart {} @ {}", chart_name(a.chart), a.center)),
        None => parts.push("root".to_string()),
    }
    parts.push(n.class.label().to_string());
    if let Some(e) = eigen_text(&n.class) {
        parts.push(format!("eig {e}"));
    }
    if n.dicritical {
        parts.push("dicritical".to_string());
    }
    if n.conjugates > 1 {
        parts.push(format!("x{} conj", n.conjugates));
    }
    for d in &n.divisors {
        parts.push(format!("{}^{}", d.label, d.multiplicity));
    }
    parts.join("\\n")
}

/// Graphviz text for a resolution tree, nodes in discovery order.
pub fn tree_to_dot(tree: &ResolutionTree) -> String {
    let mut out = String::from("digraph resolution {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, n) in tree.nodes.iter().enumerate() {
        let shape = if n.class.is_reduced() || matches!(n.class, SingularityClass::NonSingular) {
            ", style=filled, fillcolor=\"#e8f0e8\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  n{i} [label=\"{}\"{shape}];\n",
            node_label(i, n).replace('"', "'")
        ));
    }
    for (i, n) in tree.nodes.iter().enumerate() {
        for c in &n.children {
            out.push_str(&format!("  n{i} -> n{};\n", c.0));
        }
    }
    out.push_str("}\n");
    out
}

/// JSON value describing the full tree (canonical text for all coefficients).
pub fn tree_to_json(tree: &ResolutionTree) -> serde_json::Value {
    let nodes: Vec<serde_json::Value> = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            json!({
                "id": i,
                "parent": n.parent.map(|p| p.0),
                "children": n.children.iter().map(|c| c.0).collect::<Vec<_>>(),
                "depth": n.depth,
                "arrival": n.arrival.as_ref().map(|a| json!({
                    "chart": chart_name(a.chart),
                    "center": a.center.to_string(),
                    "defining_degree": a.defining_degree,
                })),
                "class": n.class.label(),
                "eigenvalues": eigen_text(&n.class),
                "dicritical": n.dicritical,
                "blown_up": n.blown_up,
                "conjugates": n.conjugates,
                "divisors": n.divisors.iter().map(|d| json!({
                    "axis": d.axis,
                    "label": d.label,
                    "multiplicity": d.multiplicity,
                })).collect::<Vec<_>>(),
                "field": {
                    "v1": n.field.comp1().to_string(),
                    "v2": n.field.comp2().to_string(),
                },
                "generators": n.tower.generator_names().collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "saturation_factor": tree.saturation_factor.as_ref().map(|f| f.to_string()),
        "nodes": nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::jet::{Jet2, Prec};
    use crate::algebra::tower::Tower;
    use crate::blowup::resolve::{resolve, ResolveOptions};
    use crate::germs::VectorField;

    #[test]
    fn dot_output_is_well_formed() {
        let t = Tower::rationals();
        let x = Jet2::var1(&t, ("x", "y"), Prec::EXACT);
        let y = Jet2::var2(&t, ("x", "y"), Prec::EXACT);
        let f = VectorField::new(x.mul(&x).unwrap(), y.mul(&y).unwrap()).unwrap();
        let tree = resolve(&f, &ResolveOptions::default()).unwrap();
        let dot = tree_to_dot(&tree);
        assert!(dot.starts_with("digraph resolution {"));
        assert!(dot.ends_with("}\n"));
        assert_eq!(dot.matches("->").count(), tree.nodes.len() - 1);
        let js = tree_to_json(&tree);
        assert_eq!(js["nodes"].as_array().unwrap().len(), tree.nodes.len());
    }
}

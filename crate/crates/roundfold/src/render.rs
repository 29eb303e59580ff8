//! Deterministic DOT and SVG output for graphs and descriptors.

use crate::descriptor::{BlockKind, Direction, RoundFoldDescriptor};
use crate::graph::DecompositionGraph;

/// Graphviz view of a decomposition graph, one node per piece, one edge per
/// gluing, matrices and ports on the edge labels.
pub fn graph_dot(g: &DecompositionGraph) -> String {
    let mut out = String::from("graph decomposition {\n");
    out.push_str("  node [shape=ellipse];\n");
    for (id, kind) in g.pieces() {
        out.push_str(&format!("  p{id} [label=\"{id}: {}\"];\n", kind.keyword()));
    }
    for gl in g.gluings() {
        let m = gl.matrix;
        out.push_str(&format!(
            "  p{} -- p{} [label=\"{}-{} {}\"];\n",
            gl.ends[0].piece, gl.ends[1].piece, gl.ends[0], gl.ends[1], m
        ));
    }
    out.push_str("}\n");
    out
}

/// Graphviz view of a descriptor's block adjacency: binding tubes, blocks by
/// level, interface tori as edges.
pub fn descriptor_dot(d: &RoundFoldDescriptor) -> String {
    let mut out = String::from("graph blocks {\n");
    out.push_str("  node [shape=box];\n");
    for i in 0..d.binding {
        out.push_str(&format!("  b{i} [label=\"binding {i}\"];\n"));
    }
    for (li, blocks) in d.blocks.iter().enumerate() {
        for (bi, block) in blocks.iter().enumerate() {
            let label = match block {
                BlockKind::Disk { .. } => "disk".to_string(),
                BlockKind::Pants { twisted: false, .. } => "pants".to_string(),
                BlockKind::Pants { twisted: true, .. } => "pants twisted".to_string(),
                BlockKind::Annulus { copies } => format!("annulus x{copies}"),
            };
            out.push_str(&format!(
                "  l{}_{bi} [label=\"{}:{bi} {label}\"];\n",
                li + 1,
                li + 1
            ));
        }
    }
    let mut tori = d.interfaces.clone();
    tori.sort_by_key(|t| (t.radius_below, t.inner, t.outer));
    for torus in &tori {
        let name = |a: &crate::descriptor::Attachment| match a {
            crate::descriptor::Attachment::Binding(i) => format!("b{i}"),
            crate::descriptor::Attachment::Port { block, .. } => {
                format!("l{}_{}", block.level, block.index)
            }
        };
        out.push_str(&format!(
            "  {} -- {} [label=\"r{}.5 mu {}\"];\n",
            name(&torus.inner),
            name(&torus.outer),
            torus.radius_below,
            torus.multiplicity
        ));
    }
    out.push_str("}\n");
    out
}

/// Concentric-circle picture of a descriptor: the critical circles with
/// their normal orientations as radial arrows, fiber counts per region, and
/// the binding size at the center.
pub fn descriptor_svg(d: &RoundFoldDescriptor) -> String {
    let scale = 40i64;
    let t = d.levels as i64;
    let margin = 30i64;
    let center = t * scale + scale / 2 + margin;
    let size = 2 * center;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    ));
    for k in 1..=t {
        let r = k * scale;
        out.push_str(&format!(
            "  <circle cx=\"{center}\" cy=\"{center}\" r=\"{r}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n"
        ));
        // radial arrow on the 45-degree ray: inward points to the center
        let direction = d
            .directions
            .get((k - 1) as usize)
            .copied()
            .unwrap_or(Direction::Outward);
        let (tip, tail) = match direction {
            Direction::Inward => (r - scale / 4, r + scale / 8),
            Direction::Outward => (r + scale / 4, r - scale / 8),
        };
        // 45°: x = y = r/sqrt(2), fixed-point with factor 1000/1414
        let proj = |rad: i64| center + rad * 1000 / 1414;
        let (x1, y1) = (proj(tail), proj(tail));
        let (x2, y2) = (proj(tip), proj(tip));
        out.push_str(&format!(
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"red\" stroke-width=\"2\"/>\n"
        ));
        let head = scale / 10;
        out.push_str(&format!(
            "  <circle cx=\"{x2}\" cy=\"{y2}\" r=\"{head}\" fill=\"red\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"black\">C{k}</text>\n",
            center + r + 3,
            center - 5
        ));
    }
    for j in 0..=t {
        let r = j * scale + scale / 2;
        let n = d.counts.get(j as usize).copied().unwrap_or(0);
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"blue\" text-anchor=\"middle\">{n}</text>\n",
            center + r,
            center + 15
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{center}\" y=\"{}\" font-size=\"12\" fill=\"black\" text-anchor=\"middle\">L x{}</text>\n",
        center - 10,
        d.binding
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::descriptor_from_morse;
    use crate::morse::MorsePage;

    #[test]
    fn dot_output_is_deterministic_and_complete() {
        let g = DecompositionGraph::parse(
            "piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 0 1 1 0\n",
        )
        .unwrap();
        let dot = graph_dot(&g);
        assert_eq!(dot, graph_dot(&g));
        assert!(dot.contains("p0 -- p1"));
        assert!(dot.contains("solidtorus"));
    }

    #[test]
    fn svg_marks_every_circle_and_region() {
        let page = MorsePage::parse(
            "boundary 3\nevent 1 merge b0 b1 -> c\nevent 2 merge c b2 -> d\nevent 3 death d\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        let svg = descriptor_svg(&d);
        assert_eq!(svg.matches("<circle").count(), 3 + 3); // circles + arrowheads
        assert!(svg.contains(">C3<"));
        assert!(svg.contains("L x3"));
        assert!(svg.starts_with("<svg"));
    }
}

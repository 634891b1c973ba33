use std::fmt::Write;

use super::DiscourseGraph;

/// Line-oriented node table and edge list.
///
/// ```text
/// # nodes
/// <index>\t<type>\t<id>\t<doc ids, comma separated>
/// # edges
/// <src>\t<dst>
/// ```
///
/// Self-loops are implicit and not listed.
pub fn graph_dump(g: &DiscourseGraph) -> String {
    let mut out = String::from("# nodes\n");
    for (i, n) in g.nodes().iter().enumerate() {
        let _ = writeln!(out, "{i}\t{}\t{}\t{}", n.node_type(), n.id(), n.docs.join(","));
    }
    out.push_str("# edges\n");
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

/// Dense 0/1 adjacency, one space-separated row per line.
pub fn adjacency_text(g: &DiscourseGraph) -> String {
    let a = g.adjacency();
    let mut out = String::with_capacity(g.len() * (2 * g.len() + 1));
    for row in a.outer_iter() {
        let line: Vec<&str> = row.iter().map(|&x| if x == 1 { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

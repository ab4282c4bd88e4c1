//! Space arguments for the CLI: file paths plus the inline shorthands
//! `kn:N` and `scale:T:SPEC` (which nest, e.g. `scale:2:kn:3`).

use magspace::io::read_space_file;
use magspace::space::{complete_graph, FiniteMetricSpace};
use std::path::Path;

pub fn parse_space_arg(arg: &str) -> Result<FiniteMetricSpace, String> {
    if let Some(rest) = arg.strip_prefix("kn:") {
        let n: usize = rest
            .parse()
            .map_err(|_| format!("bad point count in `{arg}`"))?;
        return complete_graph(n).map_err(|e| e.to_string());
    }
    if let Some(rest) = arg.strip_prefix("scale:") {
        let (t_str, inner) = rest
            .split_once(':')
            .ok_or_else(|| format!("`{arg}` needs the form scale:T:SPEC"))?;
        let t: f64 = t_str
            .parse()
            .map_err(|_| format!("bad scale factor in `{arg}`"))?;
        let inner_space = parse_space_arg(inner)?;
        return inner_space.scale(t).map_err(|e| e.to_string());
    }
    read_space_file(Path::new(arg)).map_err(|e| format!("{arg}: {e}"))
}

/// Parses a comma-separated index list such as `0,0,1,2`.
pub fn parse_index_list(arg: &str) -> Result<Vec<usize>, String> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad index `{s}` in `{arg}`"))
        })
        .collect()
}

//! Inputs shared by the benchmarks.

/// A synthetic knowledge base with `n` chained sections, each testing one
/// boolean parameter before jumping to the next.
pub fn chain_kb(n: usize) -> String {
    let mut src = String::from("title \"chain\"\n");
    for i in 0..n {
        src.push_str(&format!("parameter p{i}: boolean\n  question \"p{i}?\"\n"));
    }
    for i in 0..n {
        let name = if i == 0 {
            "start".to_owned()
        } else {
            format!("s{i}")
        };
        src.push_str(&format!(
            "section {name} {{\n  if p{i} and not false do advice \"step {i}\"\n"
        ));
        if i + 1 < n {
            src.push_str(&format!("  always do goto s{}\n", i + 1));
        }
        src.push_str("}\n");
    }
    src
}

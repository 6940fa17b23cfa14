//! Synthetic knowledge bases for benchmarking.

use std::fmt::Write;

/// An equality chain `c0 = c1 = ... = c{n-1}` with one typed fact at the
/// head and a query at the tail.
pub fn equality_chain(n: usize) -> String {
    let mut s = String::from("theory equality\npredicate dog/1\n");
    for i in 0..n {
        writeln!(s, "constant c{}", i).unwrap();
    }
    for i in 1..n {
        writeln!(s, "fact (= c{} c{}) true", i - 1, i).unwrap();
    }
    writeln!(s, "fact (dog c0) true\nquery tail (dog c{})", n.saturating_sub(1)).unwrap();
    s
}

/// A propositional implication chain `p0 -> p1 -> ... -> p{n-1}`.
pub fn implication_chain(n: usize) -> String {
    let mut s = String::new();
    for i in 0..n {
        writeln!(s, "predicate p{}/0", i).unwrap();
    }
    for i in 1..n {
        writeln!(s, "axiom (implies p{} p{})", i - 1, i).unwrap();
    }
    writeln!(s, "fact p0 true\nquery last p{}", n.saturating_sub(1)).unwrap();
    s
}

/// A unary function applied `depth` times inside an atom.
pub fn nested_functions(depth: usize) -> String {
    let mut term = "c".to_string();
    for _ in 0..depth {
        term = format!("(f {})", term);
    }
    format!("theory equality\npredicate P/1\nfunction f/1\nconstant c\nconstant d\naxiom (P {})\n", term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_kbs_parse() {
        for src in [equality_chain(4), implication_chain(4), nested_functions(3)] {
            lnn_core::parse_kb(&src).unwrap();
        }
    }
}

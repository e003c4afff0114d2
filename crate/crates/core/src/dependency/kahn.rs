use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::structure::{PredictionMatrix, VisitOrder};
use crate::data::Schema;
use crate::error::{Error, Result};

/// Topologically sorts the graph induced by `matrix` (edges parent → child).
///
/// Columns the matrix does not mention are parentless. Among columns that become
/// available together, schema order decides, so the output is deterministic.
pub fn kahn_sort(matrix: &PredictionMatrix, schema: &Schema) -> Result<VisitOrder> {
    let n = schema.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (child, ps) in matrix {
        let c = schema.require(child)?;
        for p in ps {
            let p = schema.require(p)?;
            if parents[c].contains(&p) {
                continue;
            }
            parents[c].push(p);
            children[p].push(c);
        }
    }
    let mut in_degree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| in_degree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &c in &children[i] {
            in_degree[c] -= 1;
            if in_degree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() < n {
        let cycle = find_cycle(&parents, &in_degree);
        return Err(Error::Cycle(
            cycle.into_iter().map(|i| schema.columns()[i].name.clone()).collect(),
        ));
    }
    let names = order.into_iter().map(|i| schema.columns()[i].name.clone()).collect();
    VisitOrder::new(names, schema)
}

// Every unsorted node keeps a positive in-degree, i.e. an unsorted parent; walking
// parents from any of them must revisit a node.
fn find_cycle(parents: &[Vec<usize>], in_degree: &[usize]) -> Vec<usize> {
    let start = in_degree.iter().position(|&d| d > 0).expect("an unsorted node");
    let mut path = vec![start];
    let mut seen_at = vec![usize::MAX; parents.len()];
    seen_at[start] = 0;
    let mut cur = start;
    loop {
        let next = *parents[cur]
            .iter()
            .find(|&&p| in_degree[p] > 0)
            .expect("unsorted node has an unsorted parent");
        if seen_at[next] != usize::MAX {
            let mut cycle = path[seen_at[next]..].to_vec();
            cycle.reverse();
            return cycle;
        }
        seen_at[next] = path.len();
        path.push(next);
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnType;

    fn schema(names: &[&str]) -> Schema {
        Schema::from_pairs(names.iter().map(|n| (*n, ColumnType::Float))).unwrap()
    }

    fn matrix(entries: &[(&str, &[&str])]) -> PredictionMatrix {
        entries
            .iter()
            .map(|(c, ps)| (c.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect()
    }

    #[test]
    fn simple_chain() {
        let order = kahn_sort(&matrix(&[("b", &["a"]), ("c", &["a", "b"])]), &schema(&["a", "b", "c"])).unwrap();
        assert_eq!(order.columns(), &["a", "b", "c"]);
    }

    #[test]
    fn parentless_keeps_schema_order() {
        let order = kahn_sort(&PredictionMatrix::new(), &schema(&["x", "y", "z"])).unwrap();
        assert_eq!(order.columns(), &["x", "y", "z"]);
    }

    #[test]
    fn ties_follow_schema_order() {
        // z must come after y; x and y are free.
        let order = kahn_sort(&matrix(&[("x", &["z"])]), &schema(&["x", "y", "z"])).unwrap();
        assert_eq!(order.columns(), &["y", "z", "x"]);
    }

    #[test]
    fn two_cycle_reported() {
        let err = kahn_sort(&matrix(&[("a", &["b"]), ("b", &["a"])]), &schema(&["a", "b"])).unwrap_err();
        match err {
            Error::Cycle(mut cols) => {
                cols.sort();
                assert_eq!(cols, vec!["a", "b"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cycle_excludes_downstream_nodes() {
        // c depends on the a↔b cycle but is not part of it.
        let err = kahn_sort(
            &matrix(&[("a", &["b"]), ("b", &["a"]), ("c", &["a"]), ("d", &[])]),
            &schema(&["c", "a", "b", "d"]),
        )
        .unwrap_err();
        match err {
            Error::Cycle(mut cols) => {
                cols.sort();
                assert_eq!(cols, vec!["a", "b"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn self_loop_is_cycle() {
        assert!(matches!(
            kahn_sort(&matrix(&[("a", &["a"])]), &schema(&["a"])),
            Err(Error::Cycle(_))
        ));
    }

    #[test]
    fn unknown_column() {
        assert!(matches!(
            kahn_sort(&matrix(&[("a", &["q"])]), &schema(&["a"])),
            Err(Error::UnknownColumn(_))
        ));
    }
}

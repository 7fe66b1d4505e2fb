use std::io::Write;
use std::time::Instant;

use anyhow::Result;
use tubings::chords::{chord_expansion, enumerate_connected_diagrams};
use tubings::dse::{solve_fixed_point, solve_tubing, SingleSpec};
use tubings::linegraph::{line_graph, maximal_atubings};
use tubings::trees::{enumerate_rooted_trees, TreeDomain};
use tubings::tubings::{count_tubings, enumerate_tubings};
use tubings::{Decoration, FlatTree, MellinTable, PlaneTree, Rational};

use crate::output::Table;
use crate::Cli;

fn timed(table: &mut Table, task: String, f: impl FnOnce() -> Result<String>) -> Result<()> {
    let start = Instant::now();
    let result = f()?;
    let ms = start.elapsed().as_secs_f64() * 1000.0;
    table.row(
        vec![task.clone(), result.clone(), format!("{ms:.3}")],
        serde_json::json!({ "task": task, "result": result, "millis": ms }),
    );
    Ok(())
}

/// Wall-clock timings of the main computations at size `--max`.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let n = cli.max.clamp(1, 12);
    let mut table = Table::new(cli.format);
    table.header(&["task", "result", "millis"]);
    timed(&mut table, format!("count_all_trees n={}", n + 3), || {
        let total: num_bigint::BigUint = enumerate_rooted_trees(n as u64 + 3, &TreeDomain::Unweighted)
            .iter()
            .map(count_tubings)
            .sum();
        Ok(total.to_string())
    })?;
    timed(&mut table, format!("enumerate_ladder n={}", n + 3), || {
        let host = FlatTree::new(&PlaneTree::ladder(n + 3))?;
        Ok(enumerate_tubings(&host).len().to_string())
    })?;
    let order = n.min(8);
    let table_sym = MellinTable::symbolic([Decoration::weight(1), Decoration::weight(2)], order);
    let s = Rational::from_integer((-2).into());
    timed(&mut table, format!("solve_tubing order={order}"), || {
        let g = solve_tubing(&SingleSpec::new(s.clone(), table_sym.clone(), order))?;
        Ok(g.coeff(order).coeffs().len().to_string())
    })?;
    timed(&mut table, format!("solve_fixed_point order={order}"), || {
        let g = solve_fixed_point(&SingleSpec::new(s.clone(), table_sym.clone(), order))?;
        Ok(g.coeff(order).coeffs().len().to_string())
    })?;
    let small = n.min(5);
    timed(&mut table, format!("chord_expansion order={small}"), || {
        let t = MellinTable::symbolic([Decoration::weight(1)], small);
        let g = chord_expansion(&s, &t, small)?;
        Ok(g.coeff(small).coeffs().len().to_string())
    })?;
    timed(&mut table, format!("connected_diagrams n={}", n.min(7)), || {
        Ok(enumerate_connected_diagrams(n.min(7)).len().to_string())
    })?;
    timed(
        &mut table,
        format!("maximal_atubings corolla n={}", n.min(8) + 1),
        || {
            let g = line_graph(&PlaneTree::corolla(n.min(8) + 1))?;
            Ok(maximal_atubings(&g)?.len().to_string())
        },
    )?;
    table.write(out)
}

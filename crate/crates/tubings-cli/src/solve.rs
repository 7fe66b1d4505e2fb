use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{bail, Result};
use serde_json::{json, Value};
use tubings::chords::{diagram_term, enumerate_weighted_connected};
use tubings::dse::{solve_system, solve_tubing, tree_terms, tubing_feynman_rules, GreenSeries, SingleSpec, SystemSpec};
use tubings::tubings::enumerate_tubings;
use tubings::{Decoration, FlatTree, LPoly, LoadedTable, MellinTable, Rational, Scalar, TypeTag};

use crate::output::{strings, tubes_json, Table};
use crate::{inputs, Cli, Emit, Format};

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    if let Some(path) = &cli.system {
        return run_system(cli, path, out);
    }
    let s = inputs::rational(&cli.s)?;
    let decos = inputs::kernel_decorations(&cli.kernels)?;
    match inputs::mellin_table(&cli.mellin, &decos, cli.order)? {
        LoadedTable::Exact(t) => single(cli, s, t, out),
        LoadedTable::Symbolic(t) => single(cli, s, t, out),
    }
}

fn run_system(cli: &Cli, path: &std::path::Path, out: &mut impl Write) -> Result<()> {
    let sys = inputs::system_file(path)?;
    let mut decos = sys.kernels.clone();
    if decos.is_empty() {
        let ws = inputs::kernel_weights(&cli.kernels)?;
        decos = sys
            .s
            .keys()
            .flat_map(|&a| ws.iter().map(move |&w| Decoration::new(a, w)))
            .collect();
    }
    match inputs::mellin_table(&cli.mellin, &decos, cli.order)? {
        LoadedTable::Exact(t) => system(cli, sys.s, t, out),
        LoadedTable::Symbolic(t) => system(cli, sys.s, t, out),
    }
}

fn coeff_strings<S: Scalar>(p: &LPoly<S>) -> Vec<String> {
    let cs = strings(p.coeffs());
    if cs.is_empty() {
        vec!["0".into()]
    } else {
        cs
    }
}

fn write_gamma<S: Scalar>(g: &GreenSeries<S>, format: Format, out: &mut impl Write) -> Result<()> {
    let gamma = strings(&g.gamma());
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(out);
            w.write_record(&gamma)?;
            w.flush()?;
        }
        Format::Json => writeln!(out, "{}", Value::from(gamma))?,
    }
    Ok(())
}

fn green_rows<S: Scalar>(table: &mut Table, ty: Option<TypeTag>, g: &GreenSeries<S>) {
    for (i, p) in g.terms().iter().enumerate() {
        for (k, c) in p.coeffs().iter().enumerate().skip(1) {
            let mut row = Vec::new();
            if let Some(a) = ty {
                row.push(a.to_string());
            }
            row.extend([(i + 1).to_string(), k.to_string(), c.to_string()]);
            table.row(row, Value::Null);
        }
    }
}

fn single<S: Scalar>(cli: &Cli, s: Rational, table: MellinTable<S>, out: &mut impl Write) -> Result<()> {
    let spec = SingleSpec::new(s, table, cli.order);
    let mut rows = Table::new(cli.format);
    match cli.emit {
        Emit::Gamma => return write_gamma(&solve_tubing(&spec)?, cli.format, out),
        Emit::Green => {
            let g = solve_tubing(&spec)?;
            if cli.format == Format::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&g.to_json())?)?;
                return Ok(());
            }
            rows.header(&["n", "k", "coeff"]);
            green_rows(&mut rows, None, &g);
        }
        Emit::PerTree => {
            rows.header(&["weight", "tree", "prefactor", "amplitude"]);
            for t in tree_terms(&spec)? {
                rows.row(
                    vec![
                        t.tree.weight().to_string(),
                        t.tree.to_string(),
                        t.prefactor.to_string(),
                        t.amplitude.to_string(),
                    ],
                    json!({
                        "weight": t.tree.weight(),
                        "tree": t.tree.to_string(),
                        "prefactor": t.prefactor.to_string(),
                        "L_coeffs": coeff_strings(&t.amplitude),
                    }),
                );
            }
        }
        Emit::PerTubing => {
            rows.header(&["weight", "tree", "tubes", "b", "prefactor", "contribution"]);
            for t in tree_terms(&spec)? {
                let plane = t.tree.to_plane();
                let host = FlatTree::new(&plane)?;
                for tau in enumerate_tubings(&host) {
                    let p = tubing_feynman_rules(&tau, &host, &spec.mellin)?.scale(&t.prefactor);
                    rows.row(
                        vec![
                            t.tree.weight().to_string(),
                            plane.to_string(),
                            tau.to_string(),
                            tau.b().to_string(),
                            t.prefactor.to_string(),
                            p.to_string(),
                        ],
                        json!({
                            "weight": t.tree.weight(),
                            "tree": plane.to_string(),
                            "tubes": tubes_json(&tau),
                            "b": tau.b(),
                            "prefactor": t.prefactor.to_string(),
                            "L_coeffs": coeff_strings(&p),
                        }),
                    );
                }
            }
        }
        Emit::PerDiagram => {
            if !spec.s.is_integer() || spec.s >= Rational::from_integer(0.into()) {
                bail!("per-diagram output needs a negative integer s, got {}", spec.s);
            }
            let ws: Vec<u32> = spec
                .mellin
                .decorations()
                .map(|d| d.weight)
                .filter(|&w| w as usize <= cli.order)
                .collect();
            rows.header(&["weight", "diagram", "chord_weights", "contribution"]);
            for c in enumerate_weighted_connected(cli.order, &ws) {
                let p = diagram_term(&c, &spec.s, &spec.mellin)?;
                if p.degree().is_none() {
                    continue;
                }
                rows.row(
                    vec![
                        c.total_weight().to_string(),
                        c.to_string(),
                        strings(c.weights()).join(" "),
                        p.to_string(),
                    ],
                    json!({
                        "weight": c.total_weight(),
                        "diagram": c.to_json(),
                        "L_coeffs": coeff_strings(&p),
                    }),
                );
            }
        }
    }
    rows.write(out)
}

fn system<S: Scalar>(
    cli: &Cli,
    s: BTreeMap<TypeTag, Rational>,
    table: MellinTable<S>,
    out: &mut impl Write,
) -> Result<()> {
    let spec = SystemSpec {
        s,
        mellin: table,
        order: cli.order,
    };
    let gs = solve_system(&spec)?;
    match (cli.emit, cli.format) {
        (Emit::Gamma, Format::Csv) => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
            for (a, g) in &gs {
                let mut rec = vec![a.to_string()];
                rec.extend(strings(&g.gamma()));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        (Emit::Gamma, Format::Json) => {
            let m: serde_json::Map<String, Value> = gs
                .iter()
                .map(|(a, g)| (a.to_string(), Value::from(strings(&g.gamma()))))
                .collect();
            writeln!(out, "{}", Value::Object(m))?;
        }
        (Emit::Green, Format::Csv) => {
            let mut rows = Table::new(Format::Csv);
            rows.header(&["type", "n", "k", "coeff"]);
            for (a, g) in &gs {
                green_rows(&mut rows, Some(*a), g);
            }
            rows.write(out)?;
        }
        (Emit::Green, Format::Json) => {
            let m: serde_json::Map<String, Value> = gs.iter().map(|(a, g)| (a.to_string(), g.to_json())).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&Value::Object(m))?)?;
        }
        _ => bail!("systems support --emit gamma or green"),
    }
    Ok(())
}

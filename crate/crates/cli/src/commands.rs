//! Subcommand implementations. Each returns the full text written to stdout.

use std::fmt::Write as _;

use betaorder::crosschecks::sampling::sample_eigenvalues;
use betaorder::fixedtrace::{conductance_pdf_with, fixed_trace_row_with};
use betaorder::gfzeros::{build_fixed_trace_xi, build_xi, classify, find_zeros, scan_csv, RootClass, ScanRow, XiPolynomial};
use betaorder::marginals::{compute_table_with, CellStore, EnsembleSpec, Family, Ordering, Stores, Table};
use betaorder::scalar::{fmt_q, q_to_rational, Q};
use betaorder::serial::{FunctionRecord, Record, SCHEMA_VERSION};
use betaorder::symfunc::{JacobiExpansion, LaguerreExpansion, PiecewisePower};
use rug::Float;
use serde_json::{json, Value};

use crate::args::*;
use crate::cache::{resolve_dir, DiskCache};
use crate::verify;
use crate::CliError;

/// A failed command, possibly with output that should still be written.
#[derive(Debug)]
pub struct Failure {
    pub output: Option<String>,
    pub error: CliError,
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { output: None, error: e.into() }
    }
}

type Out = Result<String, Failure>;

pub fn dispatch(cli: &Cli) -> Out {
    let cache = if cli.no_cache { None } else { resolve_dir(cli.cache_dir.as_deref()).map(DiskCache::new) };
    let cache = cache.as_ref();
    match &cli.command {
        Command::Marginal(a) => marginal(a, cache),
        Command::FixedTrace(a) => fixed_trace(a, cache),
        Command::Conductance(a) => conductance(a, cache),
        Command::GfZeros(a) => gf_zeros(a, cache),
        Command::Sample(a) => sample(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn stores(cache: Option<&DiskCache>) -> Stores<'_> {
    Stores {
        laguerre: cache.map(|c| c as &dyn CellStore<LaguerreExpansion>),
        jacobi: cache.map(|c| c as &dyn CellStore<JacobiExpansion>),
    }
}

fn laguerre_store(cache: Option<&DiskCache>) -> Option<&dyn CellStore<LaguerreExpansion>> {
    cache.map(|c| c as &dyn CellStore<LaguerreExpansion>)
}

fn usage(msg: impl Into<String>) -> Failure {
    CliError::Usage(msg.into()).into()
}

fn spec_json(spec: &EnsembleSpec) -> Value {
    let mut v = json!({
        "family": spec.family.to_string(),
        "beta": spec.beta,
        "lambda1": fmt_q(spec.lambda1),
        "regime": spec.regime.to_string(),
    });
    if spec.family == Family::Jacobi {
        v["lambda2"] = json!(fmt_q(spec.lambda2));
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn float_text(v: &Float, digits: u32) -> String {
    v.to_string_radix(10, Some(digits.max(1) as usize))
}

/// `count` evenly spaced points `hi·k/count`, `k = 1..count`.
fn grid(hi: Q, count: u32) -> Result<Vec<Q>, Failure> {
    if count == 0 {
        return Err(usage("--grid-points must be positive"));
    }
    Ok((1..=i64::from(count)).map(|k| hi * Q::new(k, i64::from(count))).collect())
}

fn x_text(x: Q) -> String {
    let f = Float::with_val(64, q_to_rational(x));
    f.to_string_radix(10, Some(12))
}

fn select_n(n: Option<u32>, big_n: u32) -> Result<Vec<u32>, Failure> {
    match n {
        None => Ok((1..=big_n).collect()),
        Some(n) if n >= 1 && n <= big_n => Ok(vec![n]),
        Some(n) => Err(usage(format!("--n {n} is outside 1..={big_n}"))),
    }
}

fn cell_parts(table: &Table, big_n: u32, n: u32) -> (String, String, FunctionRecord, FunctionRecord) {
    match table {
        Table::Laguerre(t) => {
            let (f, big_f) = (t.f(big_n, n), t.big_f(big_n, n));
            (f.to_string(), big_f.to_string(), f.to_record(), big_f.to_record())
        }
        Table::Jacobi(t) => {
            let (f, big_f) = (t.f(big_n, n), t.big_f(big_n, n));
            (f.to_string(), big_f.to_string(), f.to_record(), big_f.to_record())
        }
    }
}

fn marginal(a: &MarginalArgs, cache: Option<&DiskCache>) -> Out {
    let spec = a.ensemble.spec()?;
    if a.nmax == 0 {
        return Err(usage("--nmax must be positive"));
    }
    select_n(a.n, a.nmax)?;
    let table = compute_table_with(spec, a.nmax, Ordering::from(a.order), stores(cache))?;
    let cells: Vec<(u32, u32)> = (1..=a.nmax)
        .flat_map(|big_n| (1..=big_n).map(move |n| (big_n, n)))
        .filter(|&(_, n)| a.n.is_none_or(|m| m == n))
        .collect();
    let mut out = String::new();
    match a.format {
        Format::Human => {
            let _ = writeln!(out, "# {spec} ({}), N <= {}", spec.regime, a.nmax);
            for w in table.warnings() {
                let _ = writeln!(out, "# warning: {w}");
            }
            for (big_n, n) in cells {
                let (f, big_f, _, _) = cell_parts(&table, big_n, n);
                let _ = writeln!(out, "f_{big_n}({n}; x) = {f}");
                let _ = writeln!(out, "F_{big_n}({n}; x) = {big_f}");
            }
        }
        Format::Json => {
            let cells: Vec<Value> = cells
                .into_iter()
                .map(|(big_n, n)| {
                    let (f, big_f, fr, big_fr) = cell_parts(&table, big_n, n);
                    json!({"N": big_n, "n": n, "pdf": fr, "cdf": big_fr, "pdf_text": f, "cdf_text": big_f})
                })
                .collect();
            out = pretty(&json!({
                "schema": SCHEMA_VERSION,
                "command": "marginal",
                "spec": spec_json(&spec),
                "nmax": a.nmax,
                "warnings": table.warnings(),
                "cells": cells,
            }));
        }
        Format::CsvGrid => {
            let big_n = a.nmax;
            let ns = select_n(a.n, big_n)?;
            let xs = grid(spec.grid_extent(big_n), a.grid.grid_points)?;
            out.push('x');
            for n in &ns {
                let _ = write!(out, ",pdf_{n}");
            }
            for n in &ns {
                let _ = write!(out, ",cdf_{n}");
            }
            out.push('\n');
            let digits = a.grid.precision;
            for x in xs {
                let xr = q_to_rational(x);
                out.push_str(&x_text(x));
                for &n in &ns {
                    let _ = write!(out, ",{}", float_text(&table.pdf_value(big_n, n, &xr, digits), digits));
                }
                for &n in &ns {
                    let _ = write!(out, ",{}", float_text(&table.cdf_value(big_n, n, &xr, digits), digits));
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn piecewise_grid(columns: &[(String, &PiecewisePower)], hi: Q, g: &GridArgs, var: &str) -> Out {
    let mut out = String::from(var);
    for (name, _) in columns {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for x in grid(hi, g.grid_points)? {
        let xr = q_to_rational(x);
        out.push_str(&x_text(x));
        for (_, p) in columns {
            let _ = write!(out, ",{}", float_text(&p.eval(&xr, g.precision), g.precision));
        }
        out.push('\n');
    }
    Ok(out)
}

fn fixed_trace(a: &FixedTraceArgs, cache: Option<&DiskCache>) -> Out {
    let base = EnsembleSpec::laguerre(a.beta, a.lambda1)?;
    if a.nmax == 0 {
        return Err(usage("--nmax must be positive"));
    }
    let ns = select_n(a.n, a.nmax)?;
    let row = fixed_trace_row_with(base, a.nmax, laguerre_store(cache))?;
    let big_n = a.nmax;
    Ok(match a.format {
        Format::Human => {
            let mut out = format!("# unit-trace {base} ({}), N = {big_n}\n", base.regime);
            for &n in &ns {
                let _ = writeln!(out, "F_{big_n}({n}; x):");
                let _ = writeln!(out, "{}", row[n as usize - 1].display_with("x"));
            }
            out
        }
        Format::Json => {
            let functions: Vec<Value> = ns
                .iter()
                .map(|&n| {
                    let p = &row[n as usize - 1];
                    json!({"n": n, "cdf": p.to_record(), "intervals": intervals(p, "x")})
                })
                .collect();
            pretty(&json!({
                "schema": SCHEMA_VERSION,
                "command": "fixed-trace",
                "spec": spec_json(&base),
                "N": big_n,
                "functions": functions,
            }))
        }
        Format::CsvGrid => {
            let cols: Vec<(String, &PiecewisePower)> =
                ns.iter().map(|&n| (format!("cdf_{n}"), &row[n as usize - 1])).collect();
            piecewise_grid(&cols, Q::from_integer(1), &a.grid, "x")?
        }
    })
}

fn intervals(p: &PiecewisePower, var: &str) -> Vec<String> {
    p.display_with(var).lines().map(str::to_string).collect()
}

fn conductance(a: &ConductanceArgs, cache: Option<&DiskCache>) -> Out {
    let pdf = conductance_pdf_with(a.n1, a.n2, a.beta, laguerre_store(cache))?;
    let big_n = a.n1.min(a.n2);
    Ok(match a.format {
        Format::Human => {
            format!("# conductance density, N1={} N2={} beta={}\n{}\n", a.n1, a.n2, a.beta, pdf.display_with("g"))
        }
        Format::Json => pretty(&json!({
            "schema": SCHEMA_VERSION,
            "command": "conductance",
            "n1": a.n1,
            "n2": a.n2,
            "beta": a.beta,
            "pdf": pdf.to_record(),
            "intervals": intervals(&pdf, "g"),
        })),
        Format::CsvGrid => piecewise_grid(&[("pdf".into(), &pdf)], Q::from_integer(big_n.into()), &a.grid, "g")?,
    })
}

fn gf_zeros(a: &GfZerosArgs, cache: Option<&DiskCache>) -> Out {
    let spec = a.ensemble.spec()?;
    let digits = a.precision;
    if digits < 10 {
        return Err(usage("--precision must be at least 10"));
    }
    if a.nmax == 0 {
        return Err(usage("--nmax must be positive"));
    }
    let polys: Vec<XiPolynomial> = if a.fixed_trace {
        if spec.family != Family::Laguerre {
            return Err(usage("--fixed-trace applies to the Laguerre family only"));
        }
        let row = fixed_trace_row_with(spec, a.nmax, laguerre_store(cache))?;
        a.x.iter().map(|&x| build_fixed_trace_xi(&row, x, digits)).collect::<Result<_, _>>()?
    } else {
        let table = compute_table_with(spec, a.nmax, Ordering::RowMajor, stores(cache))?;
        a.x.iter().map(|&x| build_xi(&table, a.nmax, &q_to_rational(x), digits)).collect::<Result<_, _>>()?
    };
    let mut rows = Vec::new();
    for xi in &polys {
        let roots = find_zeros(xi)?;
        rows.push(ScanRow {
            x0: xi.x0.clone(),
            roots: roots
                .into_iter()
                .map(|z| {
                    let c = classify(&z, digits);
                    (z, c)
                })
                .collect(),
            log_concave: xi.log_concave(),
        });
    }
    let class_name = |c: &RootClass| serde_json::to_value(c).expect("class serializes");
    Ok(match a.format {
        ReportFormat::Csv => scan_csv(&rows, digits),
        ReportFormat::Json => {
            let points: Vec<Value> = rows
                .iter()
                .zip(&polys)
                .map(|(row, xi)| {
                    let roots: Vec<Value> = row
                        .roots
                        .iter()
                        .map(|(z, c)| {
                            json!({
                                "re": float_text(z.real(), digits),
                                "im": float_text(z.imag(), digits),
                                "class": class_name(c),
                            })
                        })
                        .collect();
                    json!({
                        "x0": row.x0.to_string(),
                        "degree": xi.degree(),
                        "log_concave": row.log_concave,
                        "roots": roots,
                    })
                })
                .collect();
            pretty(&json!({
                "schema": SCHEMA_VERSION,
                "command": "gf-zeros",
                "spec": spec_json(&spec),
                "N": a.nmax,
                "fixed_trace": a.fixed_trace,
                "precision": digits,
                "points": points,
            }))
        }
        ReportFormat::Human => {
            let mut out = format!("# zeros of the gap generating function, {spec}, N = {}\n", a.nmax);
            for (row, xi) in rows.iter().zip(&polys) {
                let _ = writeln!(
                    out,
                    "x0 = {}: degree {}, log-concave {}",
                    row.x0,
                    xi.degree(),
                    if row.log_concave { "yes" } else { "no" }
                );
                for (z, c) in &row.roots {
                    let _ = writeln!(
                        out,
                        "  {} {:+.3e} i  [{}]",
                        float_text(z.real(), digits.min(20)),
                        z.imag().to_f64(),
                        class_name(c).as_str().unwrap_or_default()
                    );
                }
            }
            out
        }
    })
}

fn sample(a: &SampleArgs) -> Out {
    let spec = a.ensemble.spec()?;
    if a.big_n == 0 {
        return Err(usage("--N must be positive"));
    }
    let draws = sample_eigenvalues(&spec, a.big_n, a.trials, a.seed)?;
    let mut out = String::from("trial");
    for k in 1..=a.big_n {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for (i, d) in draws.iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in d {
            let _ = write!(out, ",{v:.17e}");
        }
        out.push('\n');
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_verify(a: &VerifyArgs) -> Out {
    let reports = verify::run(a.suite);
    let passed = reports.iter().all(|r| r.passed);
    let text = match a.format {
        ReportFormat::Human => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "{}", verify::summary_line(r));
                for c in r.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(out, "    failed {}: {}", c.name, c.detail);
                }
                for note in &r.investigate {
                    let _ = writeln!(out, "    {note}");
                }
            }
            let ok = reports.iter().filter(|r| r.passed).count();
            let _ = writeln!(out, "{ok}/{} suites passed", reports.len());
            out
        }
        ReportFormat::Json => pretty(&json!({
            "schema": SCHEMA_VERSION,
            "command": "verify",
            "passed": passed,
            "suites": reports,
        })),
        ReportFormat::Csv => {
            let mut out = String::from("suite,check,passed,detail\n");
            for r in &reports {
                for c in &r.checks {
                    let _ = writeln!(out, "{},{},{},{}", r.name, csv_field(&c.name), c.passed, csv_field(&c.detail));
                }
            }
            out
        }
    };
    if passed {
        Ok(text)
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        Err(Failure { output: Some(text), error: CliError::Verification(failed.join(", ")) })
    }
}

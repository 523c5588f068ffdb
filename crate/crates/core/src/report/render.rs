//! Text, CSV and JSON renderings of command results.

use std::fmt::Write as _;

use serde::Serialize;

use super::{AnalyzeReport, CompareRow, CostReport, OutputMode, PrecisionOutput};
use crate::error::{Error, Result};
use crate::precision::{percent, tally_to_csv, tally_to_json};
use crate::progress::{CdIssue, NodeState, ProgressNode, ProgressTree};

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn value(v: Option<f64>) -> String {
    match v {
        None => "?".into(),
        Some(x) if x.fract() == 0.0 && x.abs() < 1e15 => format!("{x:.0}"),
        Some(x) => {
            let s = format!("{x:.4}");
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        }
    }
}

pub fn render_cost(report: &CostReport, mode: OutputMode) -> Result<String> {
    match mode {
        OutputMode::Json => json(report),
        OutputMode::Csv => csv_rows(
            &["format", "participants", "matches", "rounds"],
            [[
                report.format.clone(),
                report.participants.to_string(),
                report.matches.to_string(),
                report.rounds.to_string(),
            ]],
        ),
        OutputMode::Table => Ok(format!(
            "{}: {} participants, {} matches over {} rounds\n",
            report.format, report.participants, report.matches, report.rounds
        )),
    }
}

fn write_node(out: &mut String, node: &ProgressNode, edge: &str, depth: usize) {
    let reach: Vec<&str> = node.reachable.iter().map(|c| c.label.as_str()).collect();
    let _ = write!(out, "{}{edge}", "  ".repeat(depth));
    match &node.state {
        NodeState::Match {
            id,
            round,
            opponent,
        } => {
            let _ = write!(out, "{id} (round {round}");
            if let Some(o) = opponent {
                let _ = write!(out, " v {o}");
            }
            let _ = writeln!(
                out,
                ") stability {} reach {{{}}}",
                value(node.stability),
                reach.join(", ")
            );
        }
        NodeState::Placement => {
            let _ = writeln!(out, "-> {} = {}", reach.join(" | "), value(node.stability));
        }
    }
    if let Some(w) = &node.win {
        write_node(out, w, "W: ", depth + 1);
    }
    if let Some(l) = &node.loss {
        write_node(out, l, "L: ", depth + 1);
    }
}

fn write_tree(out: &mut String, tree: &ProgressTree) {
    let _ = writeln!(out, "{}", tree.participant);
    write_node(out, &tree.root, "", 1);
}

fn write_issues(out: &mut String, issues: &[CdIssue], pass: bool) {
    if issues.is_empty() {
        out.push_str("no issues\n");
    } else {
        let _ = writeln!(out, "{} issues:", issues.len());
        for issue in issues {
            let _ = writeln!(out, "  {issue}");
        }
    }
    let _ = writeln!(out, "CD: {}", if pass { "pass" } else { "fail" });
}

fn issue_csv(issues: &[CdIssue]) -> Result<String> {
    csv_rows(
        &["participant", "match", "kind", "detail"],
        issues.iter().map(|i| {
            [
                i.participant.clone(),
                i.match_id.clone().unwrap_or_default(),
                i.kind.to_string(),
                i.detail.clone(),
            ]
        }),
    )
}

pub fn render_analyze(report: &AnalyzeReport, mode: OutputMode) -> Result<String> {
    match (report, mode) {
        (_, OutputMode::Json) => json(report),
        (AnalyzeReport::Bracket { analysis, .. }, OutputMode::Csv) => issue_csv(&analysis.issues),
        (AnalyzeReport::RoundRobin { report, .. }, OutputMode::Csv) => issue_csv(&report.issues),
        (
            AnalyzeReport::Bracket {
                format,
                prizes,
                analysis,
                cd_pass,
            },
            OutputMode::Table,
        ) => {
            let mut out = format!("{format} progress trees, prizes {prizes:?}\n");
            for tree in &analysis.trees {
                write_tree(&mut out, tree);
            }
            out.push('\n');
            write_issues(&mut out, &analysis.issues, *cd_pass);
            Ok(out)
        }
        (
            AnalyzeReport::RoundRobin {
                format,
                state,
                prizes,
                report,
                cd_pass,
            },
            OutputMode::Table,
        ) => {
            let mut out = format!(
                "{format} {state}, prizes {prizes:?}, {} completions\n",
                report.completions
            );
            let _ = writeln!(
                out,
                "{:<10} {:>5} {:>4} {:>10}  reachable",
                "name", "W-L", "left", "stability"
            );
            for p in &report.participants {
                let reach: Vec<&str> = p.reachable.iter().map(|c| c.label.as_str()).collect();
                let _ = writeln!(
                    out,
                    "{:<10} {:>5} {:>4} {:>10}  {{{}}}",
                    p.name,
                    format!("{}-{}", p.wins, p.losses),
                    p.remaining,
                    value(p.stability),
                    reach.join(", ")
                );
            }
            for p in report.participants.iter().filter(|p| p.remaining > 0) {
                out.push('\n');
                write_tree(&mut out, &p.tree);
            }
            if !report.throwaways.is_empty() {
                out.push_str("\nconditional throwaways:\n");
                for t in &report.throwaways {
                    let _ = writeln!(
                        out,
                        "  {} @ {} (round {} v {}): {}/{} histories; {}",
                        t.participant,
                        t.match_id,
                        t.round,
                        t.opponent,
                        t.histories_flagged,
                        t.histories_total,
                        t.conditions.join(" or ")
                    );
                }
            }
            out.push('\n');
            write_issues(&mut out, &report.issues, *cd_pass);
            Ok(out)
        }
    }
}

pub fn render_precision(output: &PrecisionOutput, mode: OutputMode) -> Result<String> {
    let tally = &output.tally;
    match mode {
        OutputMode::Csv => tally_to_csv(tally),
        OutputMode::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                format: &'a str,
                tally: crate::precision::TallyDocument,
                precise: &'a [String],
                summary: &'a str,
            }
            json(&Doc {
                format: &output.format,
                tally: tally_to_json(tally, Some(&output.expected)),
                precise: &output.report.precise,
                summary: &output.report.summary,
            })
        }
        OutputMode::Table => {
            let cells: Vec<Vec<String>> = (1..=tally.participants() as u32)
                .map(|s| {
                    let modal = tally.modal(s);
                    let expected = output.expected[s as usize - 1];
                    tally
                        .row(s)
                        .iter()
                        .enumerate()
                        .map(|(c, &count)| {
                            let mut cell = format!("{count} ({}%)", percent(count, tally.total));
                            if modal.contains(&c) {
                                cell.push('*');
                            }
                            if c == expected {
                                cell = format!("[{cell}]");
                            }
                            cell
                        })
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = tally
                .classes
                .iter()
                .enumerate()
                .map(|(c, class)| {
                    cells
                        .iter()
                        .map(|r| r[c].len())
                        .chain([class.label.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let mut out = format!("{}: {} assignments\n", output.format, tally.total);
            let _ = write!(out, "{:>8}", "strength");
            for (class, w) in tally.classes.iter().zip(&widths) {
                let _ = write!(out, "  {:>w$}", class.label);
            }
            out.push('\n');
            for (s, row) in cells.iter().enumerate() {
                let _ = write!(out, "{:>8}", s + 1);
                for (cell, w) in row.iter().zip(&widths) {
                    let _ = write!(out, "  {cell:>w$}");
                }
                out.push('\n');
            }
            out.push_str(
                "* most frequent class for the strength; [..] class under a perfect ranking\n",
            );
            let precise = if output.report.precise.is_empty() {
                "none".to_string()
            } else {
                output.report.precise.join(", ")
            };
            let _ = writeln!(out, "precise classes: {precise}");
            let _ = writeln!(out, "RP: {}", output.report.summary);
            Ok(out)
        }
    }
}

pub fn render_compare(rows: &[CompareRow], mode: OutputMode) -> Result<String> {
    let verdict = |b: bool| if b { "pass" } else { "fail" }.to_string();
    match mode {
        OutputMode::Json => json(&rows),
        OutputMode::Csv => csv_rows(
            &["system", "participants", "cc", "cd", "rp"],
            rows.iter().map(|r| {
                [
                    r.system.clone(),
                    r.participants.to_string(),
                    r.cc.to_string(),
                    verdict(r.cd),
                    r.rp.clone(),
                ]
            }),
        ),
        OutputMode::Table => {
            let w = rows
                .iter()
                .map(|r| r.system.len())
                .chain([6])
                .max()
                .unwrap_or(6);
            let mut out = format!(
                "{:<w$}  {:>3}  {:>4}  {:<4}  RP\n",
                "system", "n", "CC", "CD"
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:<w$}  {:>3}  {:>4}  {:<4}  {}",
                    r.system,
                    r.participants,
                    r.cc,
                    verdict(r.cd),
                    r.rp
                );
            }
            Ok(out)
        }
    }
}

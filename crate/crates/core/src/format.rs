//! Line-oriented text formats for instances, matchings, round-2 costs, and
//! the Set Cover / graph inputs of the reductions.
//!
//! Instance grammar (`#` starts a comment, identifiers are `[A-Za-z0-9_]+`):
//!
//! ```text
//! smfq 1                      # or: hr 1
//! [agents]
//! a1: p1 p2
//! [programs]
//! p1 cost=1: a2 a4 a1 a3      # hr files also need quota=<int>
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{MatchingError, ValidationError};
use crate::generators::{GeneratorError, GraphInstance, SetCoverInstance};
use crate::model::{HrInstance, Market, Matching, SmfqInstance, SolveReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Smfq(SmfqInstance),
    Hr(HrInstance),
}

impl Instance {
    pub fn market(&self) -> &Market {
        match self {
            Instance::Smfq(i) => i.market(),
            Instance::Hr(i) => i.market(),
        }
    }

    pub fn costs(&self) -> &[u64] {
        match self {
            Instance::Smfq(i) => i.costs(),
            Instance::Hr(i) => i.costs(),
        }
    }

    /// The SMFQ view: an HR instance loses its quotas.
    pub fn to_smfq(&self) -> Result<SmfqInstance, ValidationError> {
        match self {
            Instance::Smfq(i) => Ok(i.clone()),
            Instance::Hr(i) => i.to_smfq(),
        }
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Non-empty content lines with comments stripped, paired with 1-based
/// line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn ident(line: usize, s: &str) -> Result<String, FormatError> {
    if is_ident(s) {
        Ok(s.to_owned())
    } else {
        err(line, format!("invalid identifier `{s}`"))
    }
}

fn idents(line: usize, s: &str) -> Result<Vec<String>, FormatError> {
    s.split_whitespace().map(|t| ident(line, t)).collect()
}

fn int(line: usize, key: &str, v: &str) -> Result<i64, FormatError> {
    v.parse::<i64>()
        .or_else(|_| err(line, format!("`{key}` expects an integer, got `{v}`")))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Smfq,
    Hr,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Agents,
    Programs,
}

struct ProgramLine {
    name: String,
    cost: i64,
    quota: Option<i64>,
    list: Vec<String>,
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut kind = None;
    let mut section = None;
    let mut seen_sections = Vec::new();
    let mut agents: Vec<(String, Vec<String>)> = Vec::new();
    let mut programs: Vec<ProgramLine> = Vec::new();

    for (line, content) in content_lines(text) {
        let Some(k) = kind else {
            kind = Some(match content.split_whitespace().collect::<Vec<_>>()[..] {
                ["smfq", "1"] => Kind::Smfq,
                ["hr", "1"] => Kind::Hr,
                _ => {
                    return err(
                        line,
                        format!("expected header `smfq 1` or `hr 1`, got `{content}`"),
                    )
                }
            });
            continue;
        };
        let next_section = match content {
            "[agents]" => Some(Section::Agents),
            "[programs]" => Some(Section::Programs),
            _ if content.starts_with('[') => {
                return err(line, format!("unknown section `{content}`"))
            }
            _ => None,
        };
        if let Some(s) = next_section {
            if seen_sections.contains(&s) {
                return err(line, format!("section `{content}` appears twice"));
            }
            seen_sections.push(s);
            section = Some(s);
            continue;
        }
        let Some((head, tail)) = content.split_once(':') else {
            return err(line, "missing `:`");
        };
        match section {
            None => return err(line, "entry outside of a section"),
            Some(Section::Agents) => {
                let name = ident(line, head.trim())?;
                agents.push((name, idents(line, tail)?));
            }
            Some(Section::Programs) => {
                let mut tokens = head.split_whitespace();
                let name = ident(line, tokens.next().unwrap_or(""))?;
                let (mut cost, mut quota) = (None, None);
                for token in tokens {
                    let Some((key, value)) = token.split_once('=') else {
                        return err(line, format!("expected key=value, got `{token}`"));
                    };
                    let slot = match key {
                        "cost" => &mut cost,
                        "quota" => &mut quota,
                        _ => return err(line, format!("unknown attribute `{key}`")),
                    };
                    if slot.replace(int(line, key, value)?).is_some() {
                        return err(line, format!("attribute `{key}` given twice"));
                    }
                }
                let cost = match (cost, k) {
                    (Some(c), _) => c,
                    (None, Kind::Hr) => 0,
                    (None, Kind::Smfq) => {
                        return err(line, format!("program `{name}` lacks cost="))
                    }
                };
                match (quota, k) {
                    (None, Kind::Hr) => return err(line, format!("program `{name}` lacks quota=")),
                    (Some(_), Kind::Smfq) => {
                        return err(
                            line,
                            format!("program `{name}`: quota= is only allowed in hr files"),
                        )
                    }
                    _ => {}
                }
                programs.push(ProgramLine {
                    name,
                    cost,
                    quota,
                    list: idents(line, tail)?,
                });
            }
        }
    }
    if kind.is_none() {
        return err(1, "empty instance file");
    }

    let lists: Vec<(&str, Vec<&str>)> = programs
        .iter()
        .map(|p| (p.name.as_str(), p.list.iter().map(String::as_str).collect()))
        .collect();
    let agent_lists: Vec<(&str, Vec<&str>)> = agents
        .iter()
        .map(|(n, l)| (n.as_str(), l.iter().map(String::as_str).collect()))
        .collect();
    let market = Market::from_names(&agent_lists, &lists)?;
    let costs = programs.iter().map(|p| p.cost).collect();
    Ok(match kind {
        Some(Kind::Smfq) => Instance::Smfq(SmfqInstance::new(market, costs)?),
        _ => Instance::Hr(HrInstance::new(
            market,
            programs.iter().map(|p| p.quota.unwrap_or(0)).collect(),
            costs,
        )?),
    })
}

fn write_market(out: &mut String, market: &Market, attrs: impl Fn(usize) -> String) {
    out.push_str("[agents]\n");
    for a in market.agents() {
        out.push_str(market.agent_name(a));
        out.push(':');
        for &p in market.agent_prefs(a) {
            out.push(' ');
            out.push_str(market.program_name(p));
        }
        out.push('\n');
    }
    out.push_str("[programs]\n");
    for p in market.programs() {
        let _ = write!(out, "{} {}:", market.program_name(p), attrs(p.0));
        for &a in market.program_prefs(p) {
            out.push(' ');
            out.push_str(market.agent_name(a));
        }
        out.push('\n');
    }
}

/// Canonical text form; [`parse_instance`] inverts it exactly.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    match instance {
        Instance::Smfq(i) => {
            out.push_str("smfq 1\n");
            write_market(&mut out, i.market(), |p| format!("cost={}", i.costs()[p]));
        }
        Instance::Hr(i) => {
            out.push_str("hr 1\n");
            write_market(&mut out, i.market(), |p| {
                format!("cost={} quota={}", i.costs()[p], i.quotas()[p])
            });
        }
    }
    out
}

/// One `<agent> -> <program>` line per agent (`-` when unmatched), in
/// instance order, followed by `# key=value` lines.
pub fn write_matching(market: &Market, m: &Matching, meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    for a in market.agents() {
        let target = m.get(a).map_or("-", |p| market.program_name(p));
        let _ = writeln!(out, "{} -> {}", market.agent_name(a), target);
    }
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

pub fn write_report(market: &Market, report: &SolveReport) -> String {
    write_matching(
        market,
        &report.matching,
        &[
            ("objective", report.objective.to_string()),
            ("method", report.method.to_owned()),
            ("certified", report.certified_optimal.to_string()),
        ],
    )
}

/// Parses a matching file against `market`. Every agent must appear once.
pub fn parse_matching(text: &str, market: &Market) -> Result<Matching, FormatError> {
    let index: HashMap<&str, usize> = market
        .agent_names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let programs: HashMap<&str, usize> = market
        .program_names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut seen = vec![false; market.num_agents()];
    let mut m = Matching::empty(market.num_agents());
    for (line, content) in content_lines(text) {
        let Some((a, p)) = content.split_once("->") else {
            return err(line, "expected `<agent> -> <program>`");
        };
        let (a, p) = (a.trim(), p.trim());
        let Some(&ai) = index.get(a) else {
            return err(line, format!("unknown agent `{a}`"));
        };
        if std::mem::replace(&mut seen[ai], true) {
            return err(line, format!("agent `{a}` listed twice"));
        }
        if p != "-" {
            let Some(&pi) = programs.get(p) else {
                return err(line, format!("unknown program `{p}`"));
            };
            m.assign(crate::model::AgentId(ai), crate::model::ProgramId(pi));
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return err(
            0,
            format!("agent `{}` is missing", market.agent_names()[missing]),
        );
    }
    market.check_matching(&m)?;
    Ok(m)
}

/// `<program> <cost>` lines covering every program of `market`.
pub fn parse_costs(text: &str, market: &Market) -> Result<Vec<u64>, FormatError> {
    let mut costs: Vec<Option<u64>> = vec![None; market.num_programs()];
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let [name, value] = tokens[..] else {
            return err(line, "expected `<program> <cost>`");
        };
        let Some(p) = market.program_by_name(name) else {
            return err(line, format!("unknown program `{name}`"));
        };
        let c = int(line, "cost", value)?;
        let c = u64::try_from(c)
            .or_else(|_| err(line, format!("program `{name}` has negative cost {c}")))?;
        if costs[p.0].replace(c).is_some() {
            return err(line, format!("program `{name}` listed twice"));
        }
    }
    costs
        .into_iter()
        .enumerate()
        .map(|(p, c)| {
            c.map_or_else(
                || {
                    err(
                        0,
                        format!("no cost for program `{}`", market.program_names()[p]),
                    )
                },
                Ok,
            )
        })
        .collect()
}

/// ```text
/// elements 3
/// set s1: 1 2
/// set s2: 2 3
/// target 1        # optional
/// ```
/// Elements are numbered `1..=n`; `f` is read off the occurrences.
pub fn parse_set_cover(text: &str) -> Result<SetCoverInstance, FormatError> {
    let mut num_elements = None;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut target = None;
    for (line, content) in content_lines(text) {
        if let Some(rest) = content.strip_prefix("elements") {
            if num_elements.is_some() {
                return err(line, "`elements` given twice");
            }
            num_elements = Some(int(line, "elements", rest.trim())?.max(0) as usize);
        } else if let Some(rest) = content.strip_prefix("target") {
            target = Some(int(line, "target", rest.trim())?.max(0) as usize);
        } else if let Some(rest) = content.strip_prefix("set ") {
            let Some(n) = num_elements else {
                return err(line, "`set` before the `elements` header");
            };
            let Some((id, members)) = rest.split_once(':') else {
                return err(line, "missing `:`");
            };
            let id = ident(line, id.trim())?;
            if names.contains(&id) {
                return err(line, format!("set `{id}` declared twice"));
            }
            let mut set = Vec::new();
            for tok in members.split_whitespace() {
                let e = int(line, "element", tok)?;
                if e < 1 || e as usize > n {
                    return err(line, format!("element {e} outside 1..={n}"));
                }
                set.push(e as usize - 1);
            }
            names.push(id);
            sets.push(set);
        } else {
            return err(line, format!("unexpected line `{content}`"));
        }
    }
    let n = num_elements.ok_or(FormatError::Parse {
        line: 1,
        message: "missing `elements <n>` header".into(),
    })?;
    let f = (0..n)
        .map(|e| sets.iter().filter(|s| s.contains(&e)).count())
        .next()
        .unwrap_or(2);
    let sc = SetCoverInstance::new(sets, n, f)?;
    Ok(match target {
        Some(k) => sc.with_target(k),
        None => sc,
    })
}

/// `edge u v` lines with 1-based vertices and an optional `vertices <n>`
/// header (otherwise `n` is the largest vertex mentioned).
pub fn parse_graph(text: &str) -> Result<GraphInstance, FormatError> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[..] {
            ["vertices", n] => declared = Some(int(line, "vertices", n)?.max(0) as usize),
            ["edge", u, v] => {
                let (u, v) = (int(line, "edge", u)?, int(line, "edge", v)?);
                if u < 1 || v < 1 {
                    return err(line, "vertices are numbered from 1");
                }
                edges.push((u as usize - 1, v as usize - 1));
            }
            _ => return err(line, format!("unexpected line `{content}`")),
        }
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Ok(GraphInstance::new(n, edges)?)
}

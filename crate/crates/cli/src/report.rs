//! Pipeline reports: typed results per stage, a deterministic machine
//! rendering (line-oriented `key=value` blocks separated by blank lines),
//! a parser for that rendering, and a human rendering.
//!
//! The machine text is a pure function of the report data, and the report
//! data is a pure function of the scenario, so identical scenarios always
//! produce byte-identical machine reports — the property the cache and the
//! determinism checks rely on.

use crate::scenario::Scenario;
use maslov::rat::{fmt_rat, parse_rat, Rat};

/// One row of the index table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRow {
    pub k: u64,
    /// `None` marks a degenerate iterate (some `k·ρ_i` an even integer).
    pub mu: Option<i64>,
    /// Mean index `k·Σρ_i`, defined for every `k`.
    pub mean: Rat,
}

/// Results of the small-angle witness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaStage {
    pub m: u64,
    pub d: i64,
    pub loop_total: i64,
    pub lambda: Vec<Rat>,
    pub r_max: u64,
    /// `(r, extremal)` for each certified equal-part partition count.
    pub certificates: Vec<(u64, bool)>,
}

/// Results of the point-power identity check on the projective-space ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eq2Stage {
    /// Chern number of the ring used here (always `n+1` for the family).
    pub ring_chern: u64,
    pub holds: bool,
    /// Rendered coefficient `α` with `[pt]^N = α·[M]`.
    pub alpha: String,
    pub alpha_degree: Option<i64>,
    pub alpha_invertible: bool,
    pub inverse_check: bool,
}

/// Verdict of the Betti replay stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremStage {
    /// No Betti data in the scenario; the stage did not run.
    Skipped,
    Consistent {
        conclusion: String,
        forced: Vec<(u64, u64)>,
        odd_note: Option<String>,
    },
    Contradiction {
        reason: String,
        forced: Vec<(u64, u64)>,
        odd_note: Option<String>,
    },
}

/// A full pipeline result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub version: String,
    pub scenario_hash: String,
    pub scenario: Scenario,
    pub index_rows: Vec<IndexRow>,
    pub lemma: LemmaStage,
    pub eq2: Eq2Stage,
    pub theorem: TheoremStage,
}

/// Failures when reading a machine report back in.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse machine report: {reason}")]
pub struct ReportParseError {
    pub reason: String,
}

fn parse_fail<T>(reason: impl Into<String>) -> Result<T, ReportParseError> {
    Err(ReportParseError {
        reason: reason.into(),
    })
}

impl Report {
    /// Exit code of the run: 0 when the verdict is consistent or the replay
    /// was skipped, 2 when the replay found a contradiction.
    pub fn exit_code(&self) -> u8 {
        match self.theorem {
            TheoremStage::Contradiction { .. } => 2,
            _ => 0,
        }
    }

    /// The canonical machine rendering.
    pub fn to_machine_text(&self) -> String {
        let mut out = String::new();
        out.push_str("stage=meta\n");
        out.push_str(&format!("version={}\n", self.version));
        out.push_str(&format!("scenario_hash={}\n", self.scenario_hash));
        out.push('\n');
        out.push_str("stage=scenario\n");
        out.push_str(&self.scenario.canonical_text());
        out.push('\n');
        out.push_str("stage=index_table\n");
        for row in &self.index_rows {
            let mu = match row.mu {
                Some(mu) => mu.to_string(),
                None => "degenerate".to_string(),
            };
            out.push_str(&format!("k={} mu={} mean={}\n", row.k, mu, fmt_rat(&row.mean)));
        }
        out.push('\n');
        out.push_str("stage=lemma\n");
        out.push_str(&format!("m={}\n", self.lemma.m));
        out.push_str(&format!("d={}\n", self.lemma.d));
        out.push_str(&format!("loop={}\n", self.lemma.loop_total));
        let lambda: Vec<String> = self.lemma.lambda.iter().map(fmt_rat).collect();
        out.push_str(&format!("lambda={}\n", lambda.join(",")));
        out.push_str(&format!("r_max={}\n", self.lemma.r_max));
        for (r, ok) in &self.lemma.certificates {
            out.push_str(&format!("cert_{r}={ok}\n"));
        }
        out.push('\n');
        out.push_str("stage=eq2\n");
        out.push_str(&format!("ring_chern={}\n", self.eq2.ring_chern));
        out.push_str(&format!("holds={}\n", self.eq2.holds));
        out.push_str(&format!("alpha={}\n", self.eq2.alpha));
        let degree = match self.eq2.alpha_degree {
            Some(d) => d.to_string(),
            None => "none".to_string(),
        };
        out.push_str(&format!("alpha_degree={degree}\n"));
        out.push_str(&format!("alpha_invertible={}\n", self.eq2.alpha_invertible));
        out.push_str(&format!("inverse_check={}\n", self.eq2.inverse_check));
        out.push('\n');
        out.push_str("stage=theorem\n");
        match &self.theorem {
            TheoremStage::Skipped => out.push_str("status=skipped\n"),
            TheoremStage::Consistent {
                conclusion,
                forced,
                odd_note,
            } => {
                out.push_str("status=consistent\n");
                out.push_str(&format!("conclusion={conclusion}\n"));
                out.push_str(&format!("forced={}\n", render_forced(forced)));
                if let Some(note) = odd_note {
                    out.push_str(&format!("odd_note={note}\n"));
                }
            }
            TheoremStage::Contradiction {
                reason,
                forced,
                odd_note,
            } => {
                out.push_str("status=contradiction\n");
                out.push_str(&format!("reason={reason}\n"));
                out.push_str(&format!("forced={}\n", render_forced(forced)));
                if let Some(note) = odd_note {
                    out.push_str(&format!("odd_note={note}\n"));
                }
            }
        }
        out.push_str(&format!("exit={}\n", self.exit_code()));
        out
    }

    /// Parses text produced by [`Report::to_machine_text`]. Round-trips:
    /// parsing then re-rendering reproduces the input byte for byte.
    pub fn from_machine_text(text: &str) -> Result<Self, ReportParseError> {
        let mut blocks = Vec::new();
        for chunk in text.split("\n\n") {
            let lines: Vec<&str> = chunk.lines().collect();
            if lines.is_empty() {
                continue;
            }
            blocks.push(lines);
        }
        let mut version = None;
        let mut scenario_hash = None;
        let mut scenario = None;
        let mut index_rows = None;
        let mut lemma = None;
        let mut eq2 = None;
        let mut theorem = None;
        for block in blocks {
            let Some(head) = block.first().and_then(|l| l.strip_prefix("stage=")) else {
                return parse_fail("block does not start with a stage line");
            };
            let body = &block[1..];
            match head {
                "meta" => {
                    let fields = key_values(body)?;
                    version = Some(fetch(&fields, "version")?);
                    scenario_hash = Some(fetch(&fields, "scenario_hash")?);
                }
                "scenario" => {
                    let text = body.join("\n");
                    scenario = Some(Scenario::parse(&text).map_err(|e| ReportParseError {
                        reason: format!("scenario block: {e}"),
                    })?);
                }
                "index_table" => {
                    let mut rows = Vec::new();
                    for line in body {
                        rows.push(parse_index_row(line)?);
                    }
                    index_rows = Some(rows);
                }
                "lemma" => {
                    let fields = key_values(body)?;
                    let mut certificates = Vec::new();
                    for (key, value) in &fields {
                        if let Some(r) = key.strip_prefix("cert_") {
                            let r: u64 = r.parse().map_err(|_| ReportParseError {
                                reason: format!("bad certificate key {key:?}"),
                            })?;
                            certificates.push((r, parse_bool(value)?));
                        }
                    }
                    certificates.sort_unstable();
                    let lambda = fetch(&fields, "lambda")?
                        .split(',')
                        .map(|piece| {
                            parse_rat(piece).map_err(|e| ReportParseError {
                                reason: format!("bad lambda entry: {e}"),
                            })
                        })
                        .collect::<Result<Vec<Rat>, ReportParseError>>()?;
                    lemma = Some(LemmaStage {
                        m: parse_int(&fetch(&fields, "m")?)?,
                        d: parse_int(&fetch(&fields, "d")?)?,
                        loop_total: parse_int(&fetch(&fields, "loop")?)?,
                        lambda,
                        r_max: parse_int(&fetch(&fields, "r_max")?)?,
                        certificates,
                    });
                }
                "eq2" => {
                    let fields = key_values(body)?;
                    let degree = fetch(&fields, "alpha_degree")?;
                    eq2 = Some(Eq2Stage {
                        ring_chern: parse_int(&fetch(&fields, "ring_chern")?)?,
                        holds: parse_bool(&fetch(&fields, "holds")?)?,
                        alpha: fetch(&fields, "alpha")?,
                        alpha_degree: match degree.as_str() {
                            "none" => None,
                            other => Some(parse_int(other)?),
                        },
                        alpha_invertible: parse_bool(&fetch(&fields, "alpha_invertible")?)?,
                        inverse_check: parse_bool(&fetch(&fields, "inverse_check")?)?,
                    });
                }
                "theorem" => {
                    let fields = key_values(body)?;
                    let status = fetch(&fields, "status")?;
                    let odd_note = fields
                        .iter()
                        .find(|(k, _)| k == "odd_note")
                        .map(|(_, v)| v.clone());
                    theorem = Some(match status.as_str() {
                        "skipped" => TheoremStage::Skipped,
                        "consistent" => TheoremStage::Consistent {
                            conclusion: fetch(&fields, "conclusion")?,
                            forced: parse_forced(&fetch(&fields, "forced")?)?,
                            odd_note,
                        },
                        "contradiction" => TheoremStage::Contradiction {
                            reason: fetch(&fields, "reason")?,
                            forced: parse_forced(&fetch(&fields, "forced")?)?,
                            odd_note,
                        },
                        other => return parse_fail(format!("unknown theorem status {other:?}")),
                    });
                }
                other => return parse_fail(format!("unknown stage {other:?}")),
            }
        }
        let report = Report {
            version: version.ok_or(ReportParseError {
                reason: "missing meta block".into(),
            })?,
            scenario_hash: scenario_hash.unwrap_or_default(),
            scenario: scenario.ok_or(ReportParseError {
                reason: "missing scenario block".into(),
            })?,
            index_rows: index_rows.ok_or(ReportParseError {
                reason: "missing index_table block".into(),
            })?,
            lemma: lemma.ok_or(ReportParseError {
                reason: "missing lemma block".into(),
            })?,
            eq2: eq2.ok_or(ReportParseError {
                reason: "missing eq2 block".into(),
            })?,
            theorem: theorem.ok_or(ReportParseError {
                reason: "missing theorem block".into(),
            })?,
        };
        Ok(report)
    }

    /// A readable rendering for terminals. Deterministic as well, but the
    /// byte-stability contract is on the machine format.
    pub fn to_human_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "toolkit {} | scenario {}\n",
            self.version, self.scenario_hash
        ));
        out.push_str(&format!(
            "scenario: n={} N={} rho=({}) horizon={}\n",
            self.scenario.n,
            self.scenario.chern,
            self.scenario
                .rho
                .iter()
                .map(fmt_rat)
                .collect::<Vec<_>>()
                .join(", "),
            self.scenario.horizon
        ));
        out.push('\n');
        out.push_str("index table:\n");
        for row in &self.index_rows {
            match row.mu {
                Some(mu) => out.push_str(&format!(
                    "  k={:<4} mu={:<6} mean={}\n",
                    row.k,
                    mu,
                    fmt_rat(&row.mean)
                )),
                None => out.push_str(&format!(
                    "  k={:<4} degenerate    mean={}\n",
                    row.k,
                    fmt_rat(&row.mean)
                )),
            }
        }
        out.push('\n');
        let lambda: Vec<String> = self.lemma.lambda.iter().map(fmt_rat).collect();
        out.push_str(&format!(
            "small-angle witness: m={} d={} loop={} lambda=({}) r_max={}\n",
            self.lemma.m,
            self.lemma.d,
            self.lemma.loop_total,
            lambda.join(", "),
            self.lemma.r_max
        ));
        let good = self
            .lemma
            .certificates
            .iter()
            .filter(|(_, ok)| *ok)
            .count();
        out.push_str(&format!(
            "  extremality certificates: {}/{} equal-part counts certified\n",
            good,
            self.lemma.certificates.len()
        ));
        out.push('\n');
        out.push_str(&format!(
            "point-power identity (ring Chern number {}): {}\n",
            self.eq2.ring_chern,
            if self.eq2.holds { "holds" } else { "FAILS" }
        ));
        out.push_str(&format!(
            "  alpha = {}  degree = {}  invertible = {}  inverse check = {}\n",
            self.eq2.alpha,
            match self.eq2.alpha_degree {
                Some(d) => d.to_string(),
                None => "none".to_string(),
            },
            self.eq2.alpha_invertible,
            self.eq2.inverse_check
        ));
        out.push('\n');
        match &self.theorem {
            TheoremStage::Skipped => {
                out.push_str("betti replay: skipped (no betti data in scenario)\n")
            }
            TheoremStage::Consistent {
                conclusion,
                forced,
                odd_note,
            } => {
                out.push_str("betti replay: CONSISTENT\n");
                out.push_str(&format!("  {conclusion}\n"));
                if !forced.is_empty() {
                    out.push_str(&format!("  forced dimensions: {}\n", render_forced(forced)));
                }
                if let Some(note) = odd_note {
                    out.push_str(&format!("  note: {note}\n"));
                }
            }
            TheoremStage::Contradiction {
                reason,
                forced,
                odd_note,
            } => {
                out.push_str("betti replay: CONTRADICTION\n");
                out.push_str(&format!("  {reason}\n"));
                if !forced.is_empty() {
                    out.push_str(&format!("  forced dimensions: {}\n", render_forced(forced)));
                }
                if let Some(note) = odd_note {
                    out.push_str(&format!("  note: {note}\n"));
                }
            }
        }
        out.push_str(&format!("exit code: {}\n", self.exit_code()));
        out
    }
}

fn render_forced(forced: &[(u64, u64)]) -> String {
    forced
        .iter()
        .map(|(degree, dim)| format!("{degree}:{dim}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_forced(text: &str) -> Result<Vec<(u64, u64)>, ReportParseError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|pair| {
            let (degree, dim) = pair.split_once(':').ok_or(ReportParseError {
                reason: format!("bad forced entry {pair:?}"),
            })?;
            Ok((parse_int(degree)?, parse_int(dim)?))
        })
        .collect()
}

fn key_values(lines: &[&str]) -> Result<Vec<(String, String)>, ReportParseError> {
    lines
        .iter()
        .map(|line| {
            line.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or(ReportParseError {
                    reason: format!("expected key=value, got {line:?}"),
                })
        })
        .collect()
}

fn fetch(fields: &[(String, String)], key: &str) -> Result<String, ReportParseError> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .ok_or(ReportParseError {
            reason: format!("missing field {key:?}"),
        })
}

fn parse_int<T: std::str::FromStr>(text: &str) -> Result<T, ReportParseError> {
    text.parse().map_err(|_| ReportParseError {
        reason: format!("bad integer {text:?}"),
    })
}

fn parse_bool(text: &str) -> Result<bool, ReportParseError> {
    match text {
        "true" => Ok(true),
        "false" => Ok(false),
        other => parse_fail(format!("bad boolean {other:?}")),
    }
}

fn parse_index_row(line: &str) -> Result<IndexRow, ReportParseError> {
    let mut k = None;
    let mut mu = None;
    let mut mean = None;
    for token in line.split_whitespace() {
        let Some((key, value)) = token.split_once('=') else {
            return parse_fail(format!("bad index row token {token:?}"));
        };
        match key {
            "k" => k = Some(parse_int::<u64>(value)?),
            "mu" => {
                mu = Some(match value {
                    "degenerate" => None,
                    other => Some(parse_int::<i64>(other)?),
                })
            }
            "mean" => {
                mean = Some(parse_rat(value).map_err(|e| ReportParseError {
                    reason: format!("bad mean: {e}"),
                })?)
            }
            other => return parse_fail(format!("unknown index row key {other:?}")),
        }
    }
    match (k, mu, mean) {
        (Some(k), Some(mu), Some(mean)) => Ok(IndexRow { k, mu, mean }),
        _ => parse_fail(format!("incomplete index row {line:?}")),
    }
}

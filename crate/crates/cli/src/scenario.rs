//! Scenario files: one run configuration per file, as flat `key=value` lines.
//!
//! ```text
//! # half-dimension and minimal Chern number
//! n=1
//! N=2
//! rho=-1/100
//! horizon=300
//! betti=1,0,1
//! ```
//!
//! Required keys: `n`, `N`, `rho`, `horizon`. Optional: `series_cutoff`
//! (default `-10`), `omega` (default `1`), `index_k` (default `10`), `betti`
//! (absent ⇒ the Betti replay stage is skipped). Rationals are written
//! `p/q` or `p`; vectors are comma-separated; `#` starts a comment; unknown
//! or repeated keys are rejected.

use maslov::rat::{fmt_rat, is_positive, parse_rat, Rat};
use std::collections::BTreeMap;

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    /// Half-dimension `n` (number of rotation-number blocks).
    pub n: u64,
    /// Minimal Chern number `N` used for divisibility and the Betti replay.
    pub chern: u64,
    /// Rotation numbers of the elliptic path, in half-turn units.
    pub rho: Vec<Rat>,
    /// Iterate budget for the small-angle search.
    pub horizon: u64,
    /// Truncation level for series output in reports.
    pub series_cutoff: Rat,
    /// Area parameter: one wrap of the quantum product costs `s^{-omega}`.
    pub omega: Rat,
    /// The index table covers `k = 1..=index_k`.
    pub index_k: u64,
    /// Betti numbers `b_0..b_{2n}`; `None` skips the replay stage.
    pub betti: Option<Vec<u64>>,
}

/// Parse/validation failures for scenario files.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("line {line}: expected key=value, got {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key {key:?}")]
    MissingKey { key: String },
    #[error("key {key:?}: {reason}")]
    BadValue { key: String, reason: String },
    #[error("{reason}")]
    Inconsistent { reason: String },
}

const KNOWN_KEYS: [&str; 8] = [
    "n",
    "N",
    "rho",
    "horizon",
    "series_cutoff",
    "omega",
    "index_k",
    "betti",
];

impl Scenario {
    /// Parses and validates scenario text.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut fields: BTreeMap<&str, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ScenarioError::MalformedLine {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let Some(&canonical) = KNOWN_KEYS.iter().find(|&&k| k == key) else {
                return Err(ScenarioError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            };
            if fields.insert(canonical, value.trim().to_string()).is_some() {
                return Err(ScenarioError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
        }

        let bad = |key: &str, reason: String| ScenarioError::BadValue {
            key: key.to_string(),
            reason,
        };
        let required = |key: &str| -> Result<&String, ScenarioError> {
            fields.get(key).ok_or(ScenarioError::MissingKey {
                key: key.to_string(),
            })
        };
        let parse_positive = |key: &str, value: &str| -> Result<u64, ScenarioError> {
            match value.parse::<u64>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(bad(key, format!("must be a positive integer, got {value:?}"))),
            }
        };

        let n = parse_positive("n", required("n")?)?;
        let chern = parse_positive("N", required("N")?)?;
        let horizon = parse_positive("horizon", required("horizon")?)?;
        let rho = required("rho")?
            .split(',')
            .map(|piece| parse_rat(piece.trim()).map_err(|e| bad("rho", e.to_string())))
            .collect::<Result<Vec<Rat>, ScenarioError>>()?;
        let series_cutoff = match fields.get("series_cutoff") {
            Some(value) => parse_rat(value).map_err(|e| bad("series_cutoff", e.to_string()))?,
            None => Rat::from_integer(-10),
        };
        let omega = match fields.get("omega") {
            Some(value) => parse_rat(value).map_err(|e| bad("omega", e.to_string()))?,
            None => Rat::from_integer(1),
        };
        let index_k = match fields.get("index_k") {
            Some(value) => parse_positive("index_k", value)?,
            None => 10,
        };
        let betti = match fields.get("betti") {
            Some(value) => Some(
                value
                    .split(',')
                    .map(|piece| {
                        piece
                            .trim()
                            .parse::<u64>()
                            .map_err(|_| bad("betti", format!("bad entry {piece:?}")))
                    })
                    .collect::<Result<Vec<u64>, ScenarioError>>()?,
            ),
            None => None,
        };

        let scenario = Scenario {
            n,
            chern,
            rho,
            horizon,
            series_cutoff,
            omega,
            index_k,
            betti,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |reason: String| Err(ScenarioError::Inconsistent { reason });
        if self.rho.len() as u64 != self.n {
            return fail(format!(
                "rho has {} entries but n={}",
                self.rho.len(),
                self.n
            ));
        }
        if !is_positive(&self.omega) {
            return fail(format!("omega must be positive, got {}", fmt_rat(&self.omega)));
        }
        if let Some(betti) = &self.betti {
            let expected = (2 * self.n + 1) as usize;
            if betti.len() != expected {
                return fail(format!(
                    "betti has {} entries but 2n+1={}",
                    betti.len(),
                    expected
                ));
            }
        }
        Ok(())
    }

    /// Deterministic rendering: fixed key order, reduced rationals. This is
    /// the text that gets hashed into the cache key, and the body of the
    /// scenario block in machine reports.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("n={}\n", self.n));
        out.push_str(&format!("N={}\n", self.chern));
        let rho: Vec<String> = self.rho.iter().map(fmt_rat).collect();
        out.push_str(&format!("rho={}\n", rho.join(",")));
        out.push_str(&format!("horizon={}\n", self.horizon));
        out.push_str(&format!("series_cutoff={}\n", fmt_rat(&self.series_cutoff)));
        out.push_str(&format!("omega={}\n", fmt_rat(&self.omega)));
        out.push_str(&format!("index_k={}\n", self.index_k));
        if let Some(betti) = &self.betti {
            let items: Vec<String> = betti.iter().map(u64::to_string).collect();
            out.push_str(&format!("betti={}\n", items.join(",")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use maslov::rat::rat;

    #[test]
    fn parses_a_full_scenario() {
        let text = "# comment\nn=2\nN=3\nrho=-1/100, -3/200\nhorizon=1000\n\
                    series_cutoff=-8\nomega=1/2\nindex_k=5\nbetti=1,0,1,0,1\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.chern, 3);
        assert_eq!(s.rho, vec![rat(-1, 100), rat(-3, 200)]);
        assert_eq!(s.horizon, 1000);
        assert_eq!(s.series_cutoff, rat(-8, 1));
        assert_eq!(s.omega, rat(1, 2));
        assert_eq!(s.index_k, 5);
        assert_eq!(s.betti, Some(vec![1, 0, 1, 0, 1]));
    }

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=300\n").unwrap();
        assert_eq!(s.series_cutoff, rat(-10, 1));
        assert_eq!(s.omega, rat(1, 1));
        assert_eq!(s.index_k, 10);
        assert_eq!(s.betti, None);
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "n=1\nN=2\nrho=-1/100\nhorizon=300\nbetti=1,0,1\n";
        let s = Scenario::parse(text).unwrap();
        let canon = s.canonical_text();
        let again = Scenario::parse(&canon).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.canonical_text(), canon);
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(matches!(
            Scenario::parse("n=1\nN=2\nrho=0/1\nhorizon=5\nwat=1\n"),
            Err(ScenarioError::UnknownKey { key, .. }) if key == "wat"
        ));
        assert!(matches!(
            Scenario::parse("n=1\nn=1\nN=2\nrho=0\nhorizon=5\n"),
            Err(ScenarioError::DuplicateKey { .. })
        ));
        assert!(matches!(
            Scenario::parse("n=1\nN=2\nrho 0\nhorizon=5\n"),
            Err(ScenarioError::MalformedLine { .. })
        ));
        assert!(matches!(
            Scenario::parse("n=1\nrho=0\nhorizon=5\n"),
            Err(ScenarioError::MissingKey { key }) if key == "N"
        ));
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        assert!(matches!(
            Scenario::parse("n=2\nN=3\nrho=-1/100\nhorizon=5\n"),
            Err(ScenarioError::Inconsistent { .. })
        ));
        assert!(matches!(
            Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=5\nbetti=1,0\n"),
            Err(ScenarioError::Inconsistent { .. })
        ));
        assert!(matches!(
            Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=5\nomega=-1\n"),
            Err(ScenarioError::Inconsistent { .. })
        ));
        assert!(matches!(
            Scenario::parse("n=0\nN=2\nrho=\nhorizon=5\n"),
            Err(ScenarioError::BadValue { .. })
        ));
    }
}

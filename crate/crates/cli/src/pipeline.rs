//! The full pipeline: index table, small-angle witness with extremality
//! certificates, point-power identity on the projective-space ring, and the
//! Betti replay — composed in that order, with every failure attributed to
//! the stage that raised it.

use crate::cache::scenario_key;
use crate::report::{Eq2Stage, IndexRow, LemmaStage, Report, TheoremStage};
use crate::scenario::Scenario;
use crate::TOOLKIT_VERSION;
use maslov::index::IndexError;
use maslov::orbit::OrbitError;
use maslov::qh::{QhError, TheoremOutcome};
use maslov::{
    cp_spec_with_omega, cz_index, find_lemma_iterate, mean_index, replay_theorem,
    verify_point_identity, RotationNumbers,
};

/// Pipeline stages, for error attribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Scenario,
    IndexTable,
    Lemma,
    Eq2,
    Theorem,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Scenario => "scenario",
            Stage::IndexTable => "index_table",
            Stage::Lemma => "lemma",
            Stage::Eq2 => "eq2",
            Stage::Theorem => "theorem",
        };
        write!(f, "{name}")
    }
}

/// An error raised by one stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{stage} stage: {kind}")]
pub struct PipelineError {
    pub stage: Stage,
    pub kind: StageErrorKind,
}

/// The underlying failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StageErrorKind {
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Qh(#[from] QhError),
}

fn at_stage<E: Into<StageErrorKind>>(stage: Stage) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        kind: e.into(),
    }
}

/// Runs every stage on a validated scenario. Deterministic: the report is a
/// pure function of the scenario.
pub fn run_pipeline(scenario: &Scenario) -> Result<Report, PipelineError> {
    let path =
        RotationNumbers::new(scenario.rho.clone()).map_err(at_stage(Stage::Scenario))?;

    let mut index_rows = Vec::new();
    for k in 1..=scenario.index_k {
        let mu = match cz_index(&path, k) {
            Ok(mu) => Some(mu),
            Err(IndexError::DegenerateIterate { .. }) => None,
            Err(e) => return Err(at_stage(Stage::IndexTable)(e)),
        };
        index_rows.push(IndexRow {
            k,
            mu,
            mean: mean_index(&path, k),
        });
    }

    let witness = find_lemma_iterate(&path, scenario.chern, scenario.horizon)
        .map_err(at_stage(Stage::Lemma))?;
    let lemma = LemmaStage {
        m: witness.m,
        d: witness.d,
        loop_total: witness.loop_total,
        lambda: witness.lambda.clone(),
        r_max: witness.r_max,
        certificates: witness.certified_partitions.clone(),
    };

    let spec = cp_spec_with_omega(scenario.n, scenario.omega).map_err(at_stage(Stage::Eq2))?;
    let identity = verify_point_identity(&spec).map_err(at_stage(Stage::Eq2))?;
    let eq2 = Eq2Stage {
        ring_chern: spec.chern(),
        holds: identity.holds,
        alpha: identity.alpha.to_string(),
        alpha_degree: identity.alpha_degree,
        alpha_invertible: identity.alpha_invertible,
        inverse_check: identity.inverse_check,
    };

    let theorem = match &scenario.betti {
        None => TheoremStage::Skipped,
        Some(betti) => {
            let verdict = replay_theorem(scenario.n, scenario.chern, betti)
                .map_err(at_stage(Stage::Theorem))?;
            match verdict.outcome {
                TheoremOutcome::Consistent { conclusion } => TheoremStage::Consistent {
                    conclusion,
                    forced: verdict.forced,
                    odd_note: verdict.odd_note,
                },
                TheoremOutcome::Contradiction { reason } => TheoremStage::Contradiction {
                    reason,
                    forced: verdict.forced,
                    odd_note: verdict.odd_note,
                },
            }
        }
    };

    Ok(Report {
        version: TOOLKIT_VERSION.to_string(),
        scenario_hash: scenario_key(scenario),
        scenario: scenario.clone(),
        index_rows,
        lemma,
        eq2,
        theorem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use maslov::rat::rat;

    fn cp1_scenario() -> Scenario {
        Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=300\nbetti=1,0,1\n").unwrap()
    }

    #[test]
    fn cp1_pipeline_produces_the_known_witness_and_consistency() {
        let report = run_pipeline(&cp1_scenario()).unwrap();
        assert_eq!(report.lemma.m, 199);
        assert_eq!(report.lemma.d, 0);
        assert_eq!(report.lemma.loop_total, -2);
        assert_eq!(report.lemma.lambda, vec![rat(1, 100)]);
        assert_eq!(report.lemma.r_max, 199);
        assert!(report.lemma.certificates.iter().all(|&(_, ok)| ok));
        assert!(report.eq2.holds && report.eq2.alpha_invertible);
        assert_eq!(report.eq2.alpha_degree, Some(-4));
        assert!(matches!(report.theorem, TheoremStage::Consistent { .. }));
        assert_eq!(report.exit_code(), 0);
        // Index table: k=1..10 all nondegenerate for rho = -1/100.
        assert_eq!(report.index_rows.len(), 10);
        assert_eq!(report.index_rows[0].mu, Some(-1));
        assert_eq!(report.index_rows[0].mean, rat(-1, 100));
    }

    #[test]
    fn oversized_chern_yields_contradiction_exit() {
        let scenario = Scenario::parse(
            "n=2\nN=4\nrho=-1/100,-3/200\nhorizon=100000\nbetti=1,0,1,0,1\n",
        )
        .unwrap();
        let report = run_pipeline(&scenario).unwrap();
        assert!(matches!(report.theorem, TheoremStage::Contradiction { .. }));
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn missing_betti_skips_the_replay() {
        let scenario = Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=300\n").unwrap();
        let report = run_pipeline(&scenario).unwrap();
        assert_eq!(report.theorem, TheoremStage::Skipped);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn tiny_horizon_fails_in_the_lemma_stage() {
        let scenario = Scenario::parse("n=1\nN=2\nrho=-1/100\nhorizon=1\n").unwrap();
        let err = run_pipeline(&scenario).unwrap_err();
        assert_eq!(err.stage, Stage::Lemma);
        assert!(matches!(
            err.kind,
            StageErrorKind::Orbit(OrbitError::HorizonExceeded { .. })
        ));
        assert!(err.to_string().contains("lemma stage"));
    }

    #[test]
    fn degenerate_iterates_are_table_rows_not_errors() {
        let scenario = Scenario::parse("n=1\nN=2\nrho=1/2\nhorizon=10\nindex_k=8\n").unwrap();
        // rho = 1/2: k=4 and k=8 are degenerate; the lemma stage then fails
        // (no small-angle iterate exists for a finite-order rotation).
        let err = run_pipeline(&scenario).unwrap_err();
        assert_eq!(err.stage, Stage::Lemma);
    }

    #[test]
    fn machine_report_round_trips_through_the_parser() {
        for text in [
            "n=1\nN=2\nrho=-1/100\nhorizon=300\nbetti=1,0,1\n",
            "n=1\nN=2\nrho=-1/100\nhorizon=300\n",
            "n=2\nN=4\nrho=-1/100,-3/200\nhorizon=100000\nbetti=1,0,1,0,1\n",
            "n=2\nN=3\nrho=-1/100,-3/200\nhorizon=100000\nbetti=1,0,2,0,1\n",
        ] {
            let scenario = Scenario::parse(text).unwrap();
            let report = run_pipeline(&scenario).unwrap();
            let machine = report.to_machine_text();
            let parsed = Report::from_machine_text(&machine).unwrap();
            assert_eq!(parsed, report);
            assert_eq!(parsed.to_machine_text(), machine);
        }
    }

    #[test]
    fn identical_scenarios_render_identically() {
        let a = run_pipeline(&cp1_scenario()).unwrap();
        let b = run_pipeline(&cp1_scenario()).unwrap();
        assert_eq!(a.to_machine_text(), b.to_machine_text());
        assert_eq!(a.to_human_text(), b.to_human_text());
    }
}

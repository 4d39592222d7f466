use std::fmt::Write as _;

use serde::Serialize;
use tw_core::bench::EvalResult;

/// Evaluation report: the core result plus where the games came from.
#[derive(Debug, Serialize)]
pub struct Report {
    pub benchmark: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    /// Seed the suite and the agents were derived from.
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    #[serde(flatten)]
    pub result: EvalResult,
}

impl Report {
    pub fn treasure_hunter(level: u32, seed: u64, result: EvalResult) -> Self {
        Report {
            benchmark: "treasure_hunter".into(),
            level: Some(level),
            seed,
            files: Vec::new(),
            result,
        }
    }

    pub fn files(files: Vec<String>, result: EvalResult) -> Self {
        Report {
            benchmark: "files".into(),
            level: None,
            seed: result.agent_seed,
            files,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self, per_game: bool) -> String {
        let r = &self.result;
        let mut out = String::new();
        let level = self
            .level
            .map(|l| format!(" level {l}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{}{level}: {} games, agent {}, seed {}, max steps {}",
            self.benchmark,
            r.games.len(),
            r.agent,
            self.seed,
            r.max_steps
        );
        let _ = writeln!(
            out,
            "avg score {:.3}  avg steps {:.2}",
            r.avg_score, r.avg_steps
        );
        if per_game {
            for g in &r.games {
                let seed = g.seed.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
                let name = self.files.get(g.index).map(String::as_str).unwrap_or("");
                let _ = writeln!(
                    out,
                    "  #{:<4} seed {seed:<20} {:<8} steps {:<5} score {:>2} {name}",
                    g.index,
                    format!("{:?}", g.outcome).to_lowercase(),
                    g.steps,
                    g.score,
                );
            }
        }
        out
    }
}

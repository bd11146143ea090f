//! Search settings assembled from defaults, a `key = value` config file and
//! command-line overrides, in that order.

use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use united::psl::PslConfig;
use united::unite::UniteConfig;

#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub unite: UniteConfig,
    pub psl: PslConfig,
}

pub const KEYS: &[&str] = &[
    "max_nodes",
    "top_k",
    "max_arbitrary",
    "max_conjectures",
    "refute_size",
    "fuel",
    "simp_steps",
    "auto_iters",
    "rule_cap",
    "close_search",
    "fastforce_induction",
    "max_term_size",
    "w_step",
    "w_size",
    "w_depth",
    "w_goals",
    "deductive_bonus",
    "timeout",
    "search_jobs",
    "psl_max_depth",
    "psl_max_nodes",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow!("invalid value '{value}' for '{key}'"))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let u = &mut self.unite;
        let p = &mut self.psl;
        match key {
            "max_nodes" => u.max_nodes = num(key, value)?,
            "top_k" => u.top_k = num(key, value)?,
            "max_arbitrary" => {
                u.induct.max_arbitrary = num(key, value)?;
                p.induct.max_arbitrary = u.induct.max_arbitrary;
            }
            "max_conjectures" => {
                u.abduce.max_conjectures = num(key, value)?;
                p.abduce.max_conjectures = u.abduce.max_conjectures;
            }
            "refute_size" => {
                u.abduce.refute_size = num(key, value)?;
                p.abduce.refute_size = u.abduce.refute_size;
            }
            "fuel" => {
                u.abduce.fuel = num(key, value)?;
                p.abduce.fuel = u.abduce.fuel;
            }
            "simp_steps" => u.budgets.simp_steps = num(key, value)?,
            "auto_iters" => u.budgets.auto_iters = num(key, value)?,
            "rule_cap" => u.budgets.rule_cap = num(key, value)?,
            "close_search" => u.budgets.close_search = num(key, value)?,
            "fastforce_induction" => u.budgets.fastforce_induction = num(key, value)?,
            "max_term_size" => u.budgets.max_term_size = num(key, value)?,
            "w_step" => u.weights.step = num(key, value)?,
            "w_size" => u.weights.size = num(key, value)?,
            "w_depth" => u.weights.depth = num(key, value)?,
            "w_goals" => u.weights.goals = num(key, value)?,
            "deductive_bonus" => u.weights.deductive_bonus = num(key, value)?,
            "timeout" => u.timeout = Some(Duration::from_secs_f64(num(key, value)?)),
            "search_jobs" => u.jobs = num(key, value)?,
            "psl_max_depth" => p.max_depth = num(key, value)?,
            "psl_max_nodes" => p.max_nodes = num(key, value)?,
            _ => bail!("unknown setting '{key}' (known: {})", KEYS.join(", ")),
        }
        p.budgets = u.budgets;
        Ok(())
    }

    /// `key = value` per line; `#` starts a comment.
    pub fn load(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", i + 1))?;
            self.set(k.trim(), v.trim()).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    /// `key=value` from `--set`.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got '{kv}'"))?;
        self.set(k.trim(), v.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_is_settable() {
        let mut s = Settings::default();
        for k in KEYS {
            let v = if *k == "fastforce_induction" { "false" } else { "3" };
            s.set(k, v).unwrap();
        }
        assert_eq!(s.unite.max_nodes, 3);
        assert_eq!(s.psl.abduce.max_conjectures, 3);
        assert!(!s.psl.budgets.fastforce_induction);
    }

    #[test]
    fn config_file_and_errors() {
        let mut s = Settings::default();
        s.load("# budgets\nmax_nodes = 10\n\nw_depth = 0.25\n").unwrap();
        assert_eq!(s.unite.max_nodes, 10);
        assert_eq!(s.unite.weights.depth, 0.25);
        assert!(s.load("max_nodes 10").is_err());
        assert!(s.load("nope = 1").is_err());
        assert!(s.apply_override("top_k=x").is_err());
    }
}

use std::path::PathBuf;
use std::sync::Arc;

use clap::ValueEnum;
use seifert_rt::invariants::DEFAULT_TERM_BUDGET;
use seifert_rt::RootSystem;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SEIFERT_RT_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    /// f64.
    Double,
    /// Double-double, about 32 significant digits.
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// Validated settings shared by the computing subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algebra: Arc<RootSystem>,
    pub levels: Vec<i64>,
    pub precision: Precision,
    pub budget: u128,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Default)]
pub struct RawConfig<'a> {
    pub algebra: &'a str,
    pub level: Option<i64>,
    pub r_range: Option<&'a str>,
    pub default_range: Option<&'a str>,
    pub precision: Option<Precision>,
    pub budget: Option<u128>,
    pub cache_dir: Option<PathBuf>,
    pub no_cache: bool,
    pub format: Option<Format>,
}

/// `a:b` or `a:b:step`, inclusive.
pub fn parse_range(s: &str) -> Result<Vec<i64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| {
        x.trim()
            .parse::<i64>()
            .map_err(|_| format!("r-range '{s}': '{x}' is not an integer"))
    };
    let (a, b, step) = match parts.as_slice() {
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err(format!("r-range '{s}' must look like a:b or a:b:step")),
    };
    if step <= 0 {
        return Err(format!("r-range '{s}': step must be positive"));
    }
    if a > b {
        return Err(format!("r-range '{s}': start exceeds end"));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

fn default_cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(d));
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("seifert-rt"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("seifert-rt"))
}

impl RawConfig<'_> {
    /// Check everything at once and report all problems together.
    pub fn validate(self) -> Result<RunConfig, String> {
        let mut errors = Vec::new();
        let algebra = match RootSystem::from_name(self.algebra) {
            Ok(rs) => Some(Arc::new(rs)),
            Err(e) => {
                errors.push(format!("--algebra {}: {e}", self.algebra));
                None
            }
        };
        let levels = match (self.level, self.r_range.or(self.default_range)) {
            (Some(_), Some(_)) if self.r_range.is_some() => {
                errors.push("give either --level or --r-range, not both".into());
                vec![]
            }
            (Some(r), _) => vec![r],
            (None, Some(s)) => parse_range(s).unwrap_or_else(|e| {
                errors.push(e);
                vec![]
            }),
            (None, None) => {
                errors.push("one of --level or --r-range is required".into());
                vec![]
            }
        };
        if let Some(rs) = &algebra {
            let h = rs.dual_coxeter();
            let low: Vec<String> = levels.iter().filter(|&&r| r < h).map(|r| r.to_string()).collect();
            if !low.is_empty() {
                errors.push(format!(
                    "level(s) {} below the dual Coxeter number {h} of {}",
                    low.join(", "),
                    rs.name()
                ));
            }
        }
        let budget = self.budget.unwrap_or(DEFAULT_TERM_BUDGET);
        if budget == 0 {
            errors.push("--budget must be positive".into());
        }
        if !errors.is_empty() {
            return Err(format!("invalid configuration:\n  - {}", errors.join("\n  - ")));
        }
        Ok(RunConfig {
            algebra: algebra.expect("validated"),
            levels,
            precision: self.precision.unwrap_or(Precision::Double),
            budget,
            cache_dir: if self.no_cache {
                None
            } else {
                self.cache_dir.or_else(default_cache_dir)
            },
            format: self.format.unwrap_or(Format::Json),
        })
    }
}

use std::fmt;

/// One machine-parseable inequality check:
/// `PASS|FAIL <name> measured=<x> bound=<y> ratio=<x/y>`.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Verdict {
    /// Passes when `measured ≤ bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Verdict {
            name: name.into(),
            measured,
            bound,
            pass: measured <= bound,
        }
    }

    /// Passes when `measured ≥ bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Verdict {
            name: name.into(),
            measured,
            bound,
            pass: measured >= bound,
        }
    }

    pub fn ratio(&self) -> f64 {
        if self.bound == 0.0 && self.measured == 0.0 {
            0.0
        } else {
            self.measured / self.bound
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} measured={:e} bound={:e} ratio={:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.bound,
            self.ratio()
        )
    }
}

#[derive(Default)]
pub struct Report {
    verdicts: Vec<Verdict>,
}

impl Report {
    pub fn push(&mut self, v: Verdict) {
        println!("{v}");
        self.verdicts.push(v);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn render(&self) -> String {
        self.verdicts.iter().map(|v| format!("{v}\n")).collect()
    }
}

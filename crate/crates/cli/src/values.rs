//! Numeric arguments: `--set` assignments and `--sweep` ranges.

use qdn_core::Binding;

use crate::error::CliError;

/// Evaluates a constant such as `pi/4`, `2pi`, `-0.5` or `sqrt(2)/2`.
pub fn eval_value(text: &str) -> Result<f64, CliError> {
    let prepared = prepare(text);
    let v = exmex::eval_str::<f64>(&prepared)
        .map_err(|e| CliError::user(format!("cannot evaluate '{text}': {}", e.msg())))?;
    if !v.is_finite() {
        return Err(CliError::user(format!("'{text}' is not a finite number")));
    }
    Ok(v)
}

/// `pi` → `PI`, and an implicit product like `2pi` gets its `*`.
fn prepare(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 4);
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            let word: String = chars[start..k].iter().collect();
            if start > 0 && (chars[start - 1].is_ascii_digit() || chars[start - 1] == '.') {
                out.push('*');
            }
            out.push_str(if word.eq_ignore_ascii_case("pi") { "PI" } else { &word });
            continue;
        }
        out.push(c);
        k += 1;
    }
    out
}

/// One `name=value` assignment. `name` may end in `*` to match every
/// parameter with that prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pattern: String,
    pub value: f64,
}

impl Assignment {
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        let (name, value) = arg
            .split_once('=')
            .ok_or_else(|| CliError::user(format!("expected name=value, got '{arg}'")))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(CliError::user(format!("missing parameter name in '{arg}'")));
        }
        Ok(Self {
            pattern: name.to_string(),
            value: eval_value(value.trim())?,
        })
    }

    pub fn matches(&self, param: &str) -> bool {
        match self.pattern.strip_suffix('*') {
            Some(prefix) => param.starts_with(prefix),
            None => self.pattern == param,
        }
    }
}

/// Applies assignments in order, so later ones win. Every assignment must
/// hit at least one declared parameter.
pub fn bind(params: &[String], assignments: &[Assignment]) -> Result<Binding, CliError> {
    let mut binding = Binding::new();
    for a in assignments {
        let mut hit = false;
        for p in params.iter().filter(|p| a.matches(p)) {
            binding.set(p.clone(), a.value);
            hit = true;
        }
        if !hit {
            return Err(CliError::user(format!(
                "'{}' matches no parameter (declared: {})",
                a.pattern,
                if params.is_empty() { "none".to_string() } else { params.join(", ") }
            )));
        }
    }
    Ok(binding)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// `name=start:stop:steps`; the grid includes both ends.
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        let bad = || CliError::user(format!("expected name=start:stop:steps, got '{arg}'"));
        let (name, range) = arg.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, steps] = parts[..] else {
            return Err(bad());
        };
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| CliError::user(format!("step count '{steps}' is not a positive integer")))?;
        if steps == 0 {
            return Err(CliError::user(format!("sweep '{name}' needs at least one step")));
        }
        Ok(Self {
            name: name.trim().to_string(),
            start: eval_value(start.trim())?,
            stop: eval_value(stop.trim())?,
            steps,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.start + span * k as f64 / last)
            .collect()
    }
}

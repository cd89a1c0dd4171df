//! Config files, grids and quantities with unit suffixes.
//!
//! A config file is flat `key = value` text whose keys are long flag names of
//! the chosen subcommand. Its entries are spliced into the argument list
//! ahead of the user's flags, and later occurrences win, so flags override
//! the file.

use std::ffi::OsString;
use std::fs;

use scatgate::atomphys::FrequencyConvention;

use crate::CliError;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.starts_with('-') {
            return Err(CliError::Config(format!("config line {}: bad key {k:?}", lineno + 1)));
        }
        if k == "config" {
            return Err(CliError::Config("config files cannot include other config files".into()));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(CliError::Config(format!("config line {}: duplicate key {k:?}", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Result<Option<String>, CliError> {
    let mut path = None;
    let mut it = args.iter().skip(2);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            let v = it
                .next()
                .ok_or_else(|| CliError::Config("--config needs a path".into()))?;
            path = Some(v.to_string_lossy().into_owned());
        } else if let Some(v) = a.strip_prefix("--config=") {
            path = Some(v.to_string());
        }
    }
    Ok(path)
}

/// Splices the entries of `--config FILE` into `args` right after the
/// subcommand name. `true`/`false` values toggle switches.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    if args.len() < 2 {
        return Ok(args);
    }
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("config {path}: {e}")))?;
    let mut injected = Vec::new();
    for (k, v) in parse_config(&text)? {
        match v.as_str() {
            "true" => injected.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => injected.push(OsString::from(format!("--{k}={v}"))),
        }
    }
    let mut out = Vec::with_capacity(args.len() + injected.len());
    out.extend(args[..2].iter().cloned());
    out.extend(injected);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

/// `a:b:step` inclusive of both ends, or a comma-separated list. The result
/// is sorted and free of duplicates.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: &str| CliError::Config(format!("grid {s:?}: {m}"));
    let mut values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_, _>>()?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
            return Err(bad("need start <= stop and step > 0"));
        }
        let span = (b - a) / step;
        if span > 1e6 {
            return Err(bad("too many points"));
        }
        let count = (span + 1e-9).floor() as usize;
        (0..=count).map(|k| a + k as f64 * step).collect::<Vec<_>>()
    } else {
        parse_list(s)?
    };
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.is_empty() {
        return Err(bad("empty"));
    }
    Ok(values)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Config(format!("bad number {p:?} in {s:?}")))
        })
        .collect()
}

/// Sorted, de-duplicated positive integers from a comma-separated list.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    let mut v = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad chain length {p:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn split_suffix(s: &str) -> (&str, &str) {
    let s = s.trim();
    let idx = s
        .char_indices()
        .find(|&(i, ch)| {
            ch.is_alphabetic() && !(matches!(ch, 'e' | 'E') && s[i + 1..].starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+'))
                || ch == 'Å'
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    (s[..idx].trim(), s[idx..].trim())
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("bad {what} {s:?}")))
}

/// Length in metres from `5nm`, `50A`, `50Å`, `1.2um`, `3e-9m` or a bare SI number.
pub fn parse_length(s: &str) -> Result<f64, CliError> {
    let (num, unit) = split_suffix(s);
    let scale = match unit {
        "" | "m" => 1.0,
        "nm" => 1e-9,
        "um" | "µm" => 1e-6,
        "mm" => 1e-3,
        "A" | "Å" => 1e-10,
        other => return Err(CliError::Config(format!("unknown length unit {other:?} in {s:?}"))),
    };
    Ok(number(num, "length")? * scale)
}

/// Angular frequency in rad/s. `rad/s` values are taken as given; `Hz`,
/// `kHz`, `MHz` and bare numbers go through `convention`.
pub fn parse_frequency(s: &str, convention: FrequencyConvention) -> Result<f64, CliError> {
    let (num, unit) = split_suffix(s);
    let x = number(num, "frequency")?;
    let hz = match unit {
        "rad/s" => return Ok(x),
        "" | "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        other => return Err(CliError::Config(format!("unknown frequency unit {other:?} in {s:?}"))),
    };
    Ok(convention.to_angular(x * hz))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("0.5:1.5:0.05").unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - 1.5).abs() < 1e-12);
        assert_eq!(parse_grid("1,0.5,1").unwrap(), vec![0.5, 1.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
        assert_eq!(parse_sizes("51,25,25").unwrap(), vec![25, 51]);
    }

    #[test]
    fn units() {
        assert!((parse_length("1064nm").unwrap() - 1.064e-6).abs() < 1e-18);
        assert!((parse_length("50A").unwrap() - 5e-9).abs() < 1e-20);
        assert!((parse_length("50 Å").unwrap() - 5e-9).abs() < 1e-20);
        assert_eq!(parse_length("3e-9").unwrap(), 3e-9);
        assert_eq!(parse_length("3e-9m").unwrap(), 3e-9);
        assert!(parse_length("3 furlongs").is_err());
        let ang = FrequencyConvention::Angular;
        let cyc = FrequencyConvention::Cyclic;
        assert_eq!(parse_frequency("100kHz", ang).unwrap(), 1e5);
        assert!((parse_frequency("100kHz", cyc).unwrap() - 2.0 * std::f64::consts::PI * 1e5).abs() < 1e-6);
        assert_eq!(parse_frequency("5e5rad/s", cyc).unwrap(), 5e5);
        assert!(parse_frequency("1 parsec", ang).is_err());
    }

    #[test]
    fn config_file_parsing() {
        let kv = parse_config("# comment\nN = 25\nU-grid = 0.5:1.5:0.05  # trailing\n\n").unwrap();
        assert_eq!(kv, vec![("N".into(), "25".into()), ("U-grid".into(), "0.5:1.5:0.05".into())]);
        assert!(parse_config("N 25").is_err());
        assert!(parse_config("N = 1\nN = 2").is_err());
        assert!(parse_config("config = x").is_err());
    }
}

//! Parsing of `--snr`, `--M`, `--L` and `--eps` values.
//!
//! A value is a comma-separated list whose items are either numbers or
//! inclusive ranges `start:stop:step` (`start:stop` for integers, step 1).

use super::UsageError;

/// Slack so that `0:1:0.1` includes 1 despite rounding in the step count.
const RANGE_SLACK: f64 = 1e-9;

pub fn parse_reals(flag: &str, text: &str) -> Result<Vec<f64>, UsageError> {
    let mut out = Vec::new();
    for item in items(flag, text)? {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [one] => out.push(real(flag, one)?),
            [start, stop, step] => {
                let (start, stop, step) = (real(flag, start)?, real(flag, stop)?, real(flag, step)?);
                if !(step > 0.0) {
                    return Err(usage(flag, format!("step must be > 0 in '{item}'")));
                }
                if stop < start {
                    return Err(usage(flag, format!("empty range '{item}'")));
                }
                let count = ((stop - start) / step + RANGE_SLACK).floor() as usize + 1;
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => return Err(usage(flag, format!("expected number or start:stop:step, got '{item}'"))),
        }
    }
    Ok(out)
}

pub fn parse_counts(flag: &str, text: &str) -> Result<Vec<usize>, UsageError> {
    let mut out = Vec::new();
    for item in items(flag, text)? {
        let parts: Vec<&str> = item.split(':').collect();
        let (start, stop, step) = match parts.as_slice() {
            [one] => {
                let v = count(flag, one)?;
                (v, v, 1)
            }
            [start, stop] => (count(flag, start)?, count(flag, stop)?, 1),
            [start, stop, step] => (count(flag, start)?, count(flag, stop)?, count(flag, step)?),
            _ => return Err(usage(flag, format!("expected integer or start:stop[:step], got '{item}'"))),
        };
        if step == 0 {
            return Err(usage(flag, format!("step must be > 0 in '{item}'")));
        }
        if stop < start {
            return Err(usage(flag, format!("empty range '{item}'")));
        }
        out.extend((start..=stop).step_by(step));
    }
    if out.contains(&0) {
        return Err(usage(flag, "values must be >= 1".into()));
    }
    Ok(out)
}

pub fn parse_probabilities(flag: &str, text: &str) -> Result<Vec<f64>, UsageError> {
    let values = parse_reals(flag, text)?;
    if let Some(bad) = values.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(usage(flag, format!("{bad} is not in (0, 1)")));
    }
    Ok(values)
}

fn items<'a>(flag: &str, text: &'a str) -> Result<Vec<&'a str>, UsageError> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(usage(flag, format!("empty item in '{text}'")));
    }
    Ok(items)
}

fn real(flag: &str, s: &str) -> Result<f64, UsageError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(usage(flag, format!("'{s}' is not a finite number"))),
    }
}

fn count(flag: &str, s: &str) -> Result<usize, UsageError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| usage(flag, format!("'{s}' is not a non-negative integer")))
}

fn usage(flag: &str, message: String) -> UsageError {
    UsageError(format!("--{flag}: {message}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_ranges_are_inclusive() {
        assert_eq!(parse_reals("snr", "0:40:10").unwrap(), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        assert_eq!(parse_reals("snr", "0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_reals("snr", "5, 1,3").unwrap(), vec![5.0, 1.0, 3.0]);
        assert_eq!(parse_reals("snr", "-10:-10:1").unwrap(), vec![-10.0]);
    }

    #[test]
    fn bad_reals_are_usage_errors() {
        for text in ["", "1,,2", "10:0:1", "0:10:0", "0:10:-1", "a", "1:2", "nan", "inf"] {
            assert!(parse_reals("snr", text).is_err(), "{text}");
        }
    }

    #[test]
    fn count_ranges() {
        assert_eq!(parse_counts("M", "1,2,6").unwrap(), vec![1, 2, 6]);
        assert_eq!(parse_counts("M", "2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_counts("M", "10:100:30").unwrap(), vec![10, 40, 70, 100]);
        for text in ["0", "5:2", "1:4:0", "-1", "1.5"] {
            assert!(parse_counts("M", text).is_err(), "{text}");
        }
    }

    #[test]
    fn probabilities_are_open_interval() {
        assert_eq!(parse_probabilities("eps", "0.01,0.2").unwrap(), vec![0.01, 0.2]);
        assert!(parse_probabilities("eps", "0").is_err());
        assert!(parse_probabilities("eps", "1").is_err());
    }
}

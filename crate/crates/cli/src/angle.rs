//! Angle literals such as `pi/4`, `-3pi/8`, `2*pi/3`, `0.25` or `1/3`.

use std::f64::consts::PI;

use crate::error::CliError;

fn number(s: &str, whole: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("invalid angle literal '{whole}'")))
}

/// Parses an angle in radians.
pub fn parse_angle(text: &str) -> Result<f64, CliError> {
    let s: String = text
        .trim()
        .to_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if s.is_empty() {
        return Err(CliError::Usage("empty angle literal".into()));
    }
    let (numerator, denominator) = match s.split_once('/') {
        Some((n, d)) => (n, Some(number(d, text)?)),
        None => (s.as_str(), None),
    };
    let value = match numerator.split_once("pi") {
        Some((coef, rest)) => {
            if !rest.is_empty() {
                return Err(CliError::Usage(format!("invalid angle literal '{text}'")));
            }
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => number(c, text)?,
            };
            k * PI
        }
        None => number(numerator, text)?,
    };
    match denominator {
        Some(0.0) => Err(CliError::Usage(format!("zero denominator in '{text}'"))),
        Some(d) => Ok(value / d),
        None => Ok(value),
    }
}

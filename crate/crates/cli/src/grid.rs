//! Parsing of list-valued flags: `a,b,c` or `from:to:step`.

use tasrate::quantization::Resolution;

/// Inclusive arithmetic range; the end point is kept when it falls within
/// 1e-9 steps of the grid.
fn range(from: f64, to: f64, step: f64) -> Result<Vec<f64>, String> {
    if step.is_nan() || step <= 0.0 || !from.is_finite() || !to.is_finite() {
        return Err(format!(
            "range {from}:{to}:{step} needs finite ends and a positive step"
        ));
    }
    if to < from {
        return Err(format!("range {from}:{to}:{step} is empty"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(format!("range {from}:{to}:{step} has {count} points"));
    }
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

fn split(input: &str) -> Result<Vec<&str>, String> {
    let parts: Vec<&str> = input.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("empty entry in `{input}`"));
    }
    Ok(parts)
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn count(s: &str) -> Result<usize, String> {
    let x = number(s)?;
    if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(x as usize)
}

fn triple(s: &str) -> Option<[&str; 3]> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    <[&str; 3]>::try_from(parts).ok()
}

/// Real values, e.g. SNR in dB.
pub fn parse_reals(input: &str) -> Result<Vec<f64>, String> {
    if let Some([a, b, c]) = triple(input) {
        return range(number(a)?, number(b)?, number(c)?);
    }
    let values = split(input)?.into_iter().map(number).collect::<Result<Vec<_>, _>>()?;
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(format!("{v} is not finite"));
    }
    Ok(values)
}

/// Antenna counts.
pub fn parse_counts(input: &str) -> Result<Vec<usize>, String> {
    if let Some([a, b, c]) = triple(input) {
        let (a, b, c) = (count(a)?, count(b)?, count(c)?);
        if c == 0 {
            return Err("range step must be positive".into());
        }
        if b < a {
            return Err(format!("range {a}:{b}:{c} is empty"));
        }
        return Ok((a..=b).step_by(c).collect());
    }
    split(input)?.into_iter().map(count).collect()
}

/// ADC resolutions: bit counts or `inf`.
pub fn parse_resolutions(input: &str) -> Result<Vec<Resolution>, String> {
    if let Some([a, b, c]) = triple(input) {
        let bits = parse_counts(&format!("{a}:{b}:{c}"))?;
        return bits.into_iter().map(|b| resolution(&b.to_string())).collect();
    }
    split(input)?.into_iter().map(resolution).collect()
}

fn resolution(s: &str) -> Result<Resolution, String> {
    s.parse::<Resolution>().map_err(|e| e.to_string())
}

/// Trial counts, accepting `100000` as well as `1e5`.
pub fn parse_trials(input: &str) -> Result<u64, String> {
    let x = number(input.trim())?;
    if x.fract() != 0.0 || !(1.0..=1e12).contains(&x) {
        return Err(format!("`{input}` is not a trial count in 1..=1e12"));
    }
    Ok(x as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_include_end_point() {
        assert_eq!(parse_reals("-10:30:2.5").unwrap().len(), 17);
        assert_eq!(parse_reals("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_reals("5").unwrap(), vec![5.0]);
        assert_eq!(parse_reals("0, 5,10").unwrap(), vec![0.0, 5.0, 10.0]);
        assert!(parse_reals("1:0:1").is_err());
        assert!(parse_reals("0:1:0").is_err());
        assert!(parse_reals("1,,2").is_err());
        assert!(parse_reals("nan").is_err());
    }

    #[test]
    fn counts_and_resolutions() {
        assert_eq!(parse_counts("1:16:1").unwrap(), (1..=16).collect::<Vec<_>>());
        assert_eq!(parse_counts("1,4,16,64").unwrap(), vec![1, 4, 16, 64]);
        assert!(parse_counts("2.5").is_err());
        assert_eq!(
            parse_resolutions("1,2,inf").unwrap(),
            vec![Resolution::Bits(1), Resolution::Bits(2), Resolution::Infinite]
        );
        assert_eq!(parse_resolutions("2:4:1").unwrap().len(), 3);
        assert!(parse_resolutions("0").is_err());
        assert_eq!(parse_trials("1e5").unwrap(), 100_000);
        assert!(parse_trials("0").is_err());
        assert!(parse_trials("1.5").is_err());
    }
}

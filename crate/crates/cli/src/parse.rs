//! Value parsers used by the argument definitions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Parses an angle in radians: a plain number, or a multiple of `pi` such as
/// `pi/4`, `-3pi/4`, `0.5*pi`. Anything that looks like degrees is refused.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    if t.is_empty() {
        return Err("empty angle".into());
    }
    if t.contains("deg") || t.contains('°') {
        return Err(format!("'{s}': angles are radians only; degrees are not accepted"));
    }
    let v = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| format!("'{s}' is not a number"))?,
        Some(i) => {
            let coef = t[..i].trim().trim_end_matches('*').trim();
            let coef = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("'{s}': bad coefficient '{c}'"))?,
            };
            let rest = t[i + 2..].trim();
            let den = if rest.is_empty() {
                1.0
            } else {
                let d = rest
                    .strip_prefix('/')
                    .ok_or_else(|| format!("'{s}': expected '/' after pi"))?;
                d.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("'{s}': bad denominator '{d}'"))?
            };
            if den == 0.0 {
                return Err(format!("'{s}': zero denominator"));
            }
            coef * PI / den
        }
    };
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

/// Three comma-separated angles.
pub fn parse_thetas(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("'{s}': expected three comma-separated angles"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_angle(p)?;
    }
    Ok(out)
}

/// `AxBxC` truncation dimensions.
pub fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
    if parts.len() != 3 {
        return Err(format!("'{s}': expected dims like 2x2x2"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| format!("'{s}': bad dimension '{p}'"))?;
    }
    Ok(out)
}

/// Bin labels per phase index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMap(pub Vec<usize>);

impl fmt::Display for BinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// e.g. `0,0,1,1`.
pub fn parse_binning(s: &str) -> Result<BinMap, String> {
    s.split(',')
        .map(|p| match p.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(format!("'{other}': bins are 0 or 1")),
        })
        .collect::<Result<_, _>>()
        .map(BinMap)
}

pub fn parse_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{v} outside [0, 1]"));
    }
    Ok(v)
}

/// How the triplet amplitudes are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Maximal,
    /// Real `c0`, with `c1 = √(1 − c0²)`.
    C0(f64),
    /// Evolve the pump photon for dimensionless time `χt`.
    Evolve { chi_t: f64 },
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if t == "maximal" {
            return Ok(StateSpec::Maximal);
        }
        if let Some(v) = t.strip_prefix("c0=") {
            return parse_unit_interval(v).map(StateSpec::C0);
        }
        if let Some(v) = t.strip_prefix("evolve:chi_t=") {
            return parse_angle(v).map(|chi_t| StateSpec::Evolve { chi_t });
        }
        Err(format!(
            "'{s}': expected 'maximal', 'c0=VALUE' or 'evolve:chi_t=VALUE'"
        ))
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Maximal => write!(f, "maximal"),
            StateSpec::C0(c0) => write!(f, "c0={c0}"),
            StateSpec::Evolve { chi_t } => write!(f, "evolve:chi_t={chi_t}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("π/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
    }

    #[test]
    fn degrees_refused() {
        for s in ["90deg", "90 deg", "90°", "45degrees"] {
            let e = parse_angle(s).unwrap_err();
            assert!(e.contains("radians"), "{s}: {e}");
        }
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pi*2").is_err());
        assert!(parse_angle("inf").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn triples_and_dims() {
        assert_eq!(parse_thetas("0,pi/2,-pi").unwrap(), [0.0, PI / 2.0, -PI]);
        assert!(parse_thetas("0,1").is_err());
        assert_eq!(parse_dims("4x4x2").unwrap(), [4, 4, 2]);
        assert!(parse_dims("4x4").is_err());
        assert_eq!(parse_binning("0,0,1,1").unwrap(), BinMap(vec![0, 0, 1, 1]));
        assert!(parse_binning("0,2").is_err());
    }

    #[test]
    fn state_specs() {
        assert_eq!("maximal".parse::<StateSpec>().unwrap(), StateSpec::Maximal);
        assert_eq!("c0=0.6".parse::<StateSpec>().unwrap(), StateSpec::C0(0.6));
        assert_eq!(
            "evolve:chi_t=pi/4".parse::<StateSpec>().unwrap(),
            StateSpec::Evolve { chi_t: PI / 4.0 }
        );
        assert!("c0=1.5".parse::<StateSpec>().is_err());
        assert!("evolve:t=1".parse::<StateSpec>().is_err());
        for s in [StateSpec::Maximal, StateSpec::C0(0.3), StateSpec::Evolve { chi_t: 0.7 }] {
            assert_eq!(s.to_string().parse::<StateSpec>().unwrap(), s);
        }
    }
}

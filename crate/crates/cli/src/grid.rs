//! Grid specifications: `torus2:64`, `bidisc:rand:40:seed=7`, `product:8x8`,
//! `disc:rand:12`, `ball-2:rand:20`, `polydisc-3:rand:20` and `file:PATH`.

use std::path::Path;

use bidisc_core::factor::companion_grid;
use bidisc_core::function::{Ambient, PointGrid};

use crate::report::CliError;

fn bad(spec: &str, why: &str) -> CliError {
    CliError::parse(format!("grid spec '{spec}': {why}"))
}

fn count(spec: &str, s: &str) -> Result<usize, CliError> {
    s.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| bad(spec, "counts must be positive integers"))
}

/// Splits off an optional trailing `seed=S`.
fn seed_of<'a>(spec: &str, parts: &'a [&'a str], default: u64) -> Result<(&'a [&'a str], u64), CliError> {
    match parts.split_last() {
        Some((last, rest)) if last.starts_with("seed=") => {
            let seed = last["seed=".len()..].parse().map_err(|_| bad(spec, "seed must be an unsigned integer"))?;
            Ok((rest, seed))
        }
        _ => Ok((parts, default)),
    }
}

pub fn parse_grid(spec: &str, default_seed: u64) -> Result<PointGrid, CliError> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(Path::new(path)).map_err(|e| CliError::parse(format!("{path}: {e}")))?;
        return serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{path}: {e}")));
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let (parts, seed) = seed_of(spec, &parts, default_seed)?;
    match parts {
        ["torus2", n] => Ok(PointGrid::torus2(count(spec, n)?)),
        ["product", dims] => {
            let (a, b) = dims.split_once('x').ok_or_else(|| bad(spec, "expected product:AxB"))?;
            let (a, b) = (count(spec, a)?, count(spec, b)?);
            let first: Vec<_> = PointGrid::random(Ambient::Disc, a - 1, seed).points1().collect();
            let second: Vec<_> = PointGrid::random(Ambient::Disc, b - 1, seed.wrapping_add(1)).points1().collect();
            Ok(companion_grid(&first, &second)?)
        }
        [ambient, "rand", n] => {
            let ambient: Ambient = ambient.parse()?;
            if ambient == Ambient::Torus2 {
                return Err(bad(spec, "use torus2:N for boundary grids"));
            }
            Ok(PointGrid::random(ambient, count(spec, n)?, seed))
        }
        _ => Err(bad(spec, "unrecognised form")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_grid("torus2:8", 0).unwrap().len(), 64);
        let g = parse_grid("bidisc:rand:40:seed=7", 0).unwrap();
        assert_eq!(g, PointGrid::random(Ambient::Bidisc, 40, 7));
        assert_eq!(parse_grid("bidisc:rand:40", 7).unwrap(), g);
        let p = parse_grid("product:8x8", 3).unwrap();
        assert_eq!(p.len(), 64);
        assert!(p.points().iter().any(|z| z[0].norm() == 0.0 && z[1].norm() == 0.0));
        assert_eq!(parse_grid("ball-2:rand:5", 0).unwrap().ambient(), Ambient::Ball(2));
    }

    #[test]
    fn malformed_specs_are_parse_errors() {
        for spec in ["torus2", "bidisc:rand:0", "product:8", "moon:rand:3", "bidisc:rand:4:seed=x", "torus2:rand:4"] {
            let e = parse_grid(spec, 0).unwrap_err();
            assert!(matches!(e.name.as_str(), "ParseError" | "UnknownAmbient"), "{spec}: {e:?}");
        }
    }
}

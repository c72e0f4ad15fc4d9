use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{FunctionError, Point2, Result};

/// Interior sample points stay inside this radius.
pub const INTERIOR_RADIUS: f64 = 0.95;

const TORUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ambient {
    Disc,
    Bidisc,
    Torus2,
    Polydisc(usize),
    Ball(usize),
}

impl Ambient {
    pub fn dimension(self) -> usize {
        match self {
            Ambient::Disc => 1,
            Ambient::Bidisc | Ambient::Torus2 => 2,
            Ambient::Polydisc(n) | Ambient::Ball(n) => n,
        }
    }

    /// Membership: open domain for interior ambients, `|z_k| = 1` for the torus.
    pub fn contains(self, z: &[Complex64]) -> bool {
        if z.len() != self.dimension() {
            return false;
        }
        match self {
            Ambient::Disc | Ambient::Bidisc | Ambient::Polydisc(_) => z.iter().all(|x| x.norm() < 1.0),
            Ambient::Torus2 => z.iter().all(|x| (x.norm() - 1.0).abs() <= TORUS_SLACK),
            Ambient::Ball(_) => z.iter().map(|x| x.norm_sqr()).sum::<f64>() < 1.0,
        }
    }

    /// Coordinates as a point of the polydisc, regardless of ambient
    /// (the disc is the one-dimensional polydisc).
    pub fn is_polydisc_like(self) -> bool {
        matches!(self, Ambient::Disc | Ambient::Bidisc | Ambient::Polydisc(_))
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Disc => write!(f, "disc"),
            Ambient::Bidisc => write!(f, "bidisc"),
            Ambient::Torus2 => write!(f, "torus2"),
            Ambient::Polydisc(n) => write!(f, "polydisc-{n}"),
            Ambient::Ball(n) => write!(f, "ball-{n}"),
        }
    }
}

impl FromStr for Ambient {
    type Err = FunctionError;
    fn from_str(s: &str) -> Result<Self> {
        let dim = |rest: &str| rest.parse::<usize>().ok().filter(|&n| n >= 1);
        match s {
            "disc" => Ok(Ambient::Disc),
            "bidisc" => Ok(Ambient::Bidisc),
            "torus2" => Ok(Ambient::Torus2),
            _ => {
                if let Some(n) = s.strip_prefix("polydisc-").and_then(dim) {
                    Ok(Ambient::Polydisc(n))
                } else if let Some(n) = s.strip_prefix("ball-").and_then(dim) {
                    Ok(Ambient::Ball(n))
                } else {
                    Err(FunctionError::UnknownAmbient(s.into()))
                }
            }
        }
    }
}

/// Finite sample set standing in for a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GridJson", try_from = "GridJson")]
pub struct PointGrid {
    ambient: Ambient,
    points: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GridJson {
    ambient: String,
    points: Vec<Vec<Complex64>>,
}

impl From<PointGrid> for GridJson {
    fn from(g: PointGrid) -> Self {
        GridJson { ambient: g.ambient.to_string(), points: g.points }
    }
}

impl TryFrom<GridJson> for PointGrid {
    type Error = FunctionError;
    fn try_from(j: GridJson) -> Result<Self> {
        PointGrid::new(j.ambient.parse()?, j.points)
    }
}

fn disc_sample(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.random::<f64>())
}

impl PointGrid {
    pub fn new(ambient: Ambient, points: Vec<Vec<Complex64>>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|z| !ambient.contains(z)) {
            return Err(FunctionError::OutsideDomain { point: bad.clone(), ambient: ambient.to_string() });
        }
        Ok(PointGrid { ambient, points })
    }

    /// Uniform `resolution x resolution` grid of the distinguished boundary.
    pub fn torus2(resolution: usize) -> Self {
        let angle = |k: usize| Complex64::from_polar(1.0, TAU * k as f64 / resolution as f64);
        let points = (0..resolution).flat_map(|i| (0..resolution).map(move |j| vec![angle(i), angle(j)])).collect();
        PointGrid { ambient: Ambient::Torus2, points }
    }

    /// Deterministic pseudo-random interior points for a given seed. Polydisc-type
    /// ambients keep every coordinate within [`INTERIOR_RADIUS`]; the ball keeps
    /// the Euclidean norm within it.
    ///
    /// # Panics
    /// On `Ambient::Torus2`, which has its own constructor.
    pub fn random(ambient: Ambient, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ambient.dimension();
        let points = (0..count)
            .map(|_| match ambient {
                Ambient::Torus2 => panic!("use PointGrid::torus2 for boundary grids"),
                Ambient::Ball(_) => {
                    let dir: Vec<Complex64> = (0..n)
                        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                        .collect();
                    let norm = dir.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    let r = INTERIOR_RADIUS * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
                    dir.into_iter().map(|x| x * (r / norm)).collect()
                }
                _ => (0..n).map(|_| disc_sample(&mut rng, INTERIOR_RADIUS)).collect(),
            })
            .collect();
        PointGrid { ambient, points }
    }

    /// `G1 x G2` as a bidisc grid, row-major in the first factor.
    pub fn product(first: &[Complex64], second: &[Complex64]) -> Result<Self> {
        let points = first.iter().flat_map(|&a| second.iter().map(move |&b| vec![a, b])).collect();
        PointGrid::new(Ambient::Bidisc, points)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points of a two-dimensional grid.
    ///
    /// # Panics
    /// If the ambient dimension is not 2.
    pub fn points2(&self) -> impl Iterator<Item = Point2> + '_ {
        assert_eq!(self.ambient.dimension(), 2, "points2 on a {} grid", self.ambient);
        self.points.iter().map(|z| [z[0], z[1]])
    }

    /// Points of a one-dimensional grid.
    ///
    /// # Panics
    /// If the ambient dimension is not 1.
    pub fn points1(&self) -> impl Iterator<Item = Complex64> + '_ {
        assert_eq!(self.ambient.dimension(), 1, "points1 on a {} grid", self.ambient);
        self.points.iter().map(|z| z[0])
    }

    pub fn index_of(&self, z: &[Complex64]) -> Option<usize> {
        self.points.iter().position(|p| p.as_slice() == z)
    }
}

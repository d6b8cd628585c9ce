//! Node placement over the sensing area: uniform random and square grid.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::types::{Area, NodeId, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeploymentKind {
    Random,
    Grid,
}

impl DeploymentKind {
    pub const ALL: [DeploymentKind; 2] = [DeploymentKind::Random, DeploymentKind::Grid];

    pub fn name(self) -> &'static str {
        match self {
            DeploymentKind::Random => "random",
            DeploymentKind::Grid => "grid",
        }
    }
}

impl fmt::Display for DeploymentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeploymentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(DeploymentKind::Random),
            "grid" => Ok(DeploymentKind::Grid),
            other => Err(Error::InvalidArgument(format!(
                "unknown deployment kind {other:?} (expected random or grid)"
            ))),
        }
    }
}

/// Where the gateway (node 0) sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GatewayPlacement {
    /// At the origin corner for random fields; the grid node nearest it otherwise.
    #[default]
    Corner,
    Center,
}

impl FromStr for GatewayPlacement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "corner" => Ok(GatewayPlacement::Corner),
            "center" | "centre" => Ok(GatewayPlacement::Center),
            other => Err(Error::InvalidArgument(format!(
                "unknown gateway placement {other:?} (expected corner or center)"
            ))),
        }
    }
}

impl fmt::Display for GatewayPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GatewayPlacement::Corner => "corner",
            GatewayPlacement::Center => "center",
        })
    }
}

/// A placement; `positions[i]` belongs to `NodeId(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub kind: DeploymentKind,
    pub positions: Vec<Position>,
    pub area: Area,
    /// Generator seed, random placements only.
    pub seed: Option<u64>,
}

impl Deployment {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, id: NodeId) -> Position {
        self.positions[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Position)> + '_ {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, p)| (NodeId::from(i), *p))
    }

    /// Placement file: a `#` header with kind, area and seed, then `id x_cm y_cm` per node.
    pub fn to_placement_file(&self) -> String {
        let mut out = format!(
            "# kind={} area={}x{} count={}",
            self.kind,
            self.area.width_cm(),
            self.area.height_cm(),
            self.len()
        );
        if let Some(seed) = self.seed {
            let _ = write!(out, " seed={seed}");
        }
        out.push('\n');
        for (id, p) in self.iter() {
            let _ = writeln!(out, "{id} {} {}", p.x_cm, p.y_cm);
        }
        out
    }

    pub fn from_placement_file(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Data {
            path: "placement".into(),
            message: format!("line {line}: {msg}"),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| bad(1, "missing header"))?;
        let (mut kind, mut area, mut seed) = (None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| bad(1, "header fields must be key=value"))?;
            match k {
                "kind" => kind = Some(v.parse::<DeploymentKind>()?),
                "area" => {
                    let (w, h) = v.split_once('x').ok_or_else(|| bad(1, "area must be WxH"))?;
                    let w = w.parse().map_err(|_| bad(1, "bad area width"))?;
                    let h = h.parse().map_err(|_| bad(1, "bad area height"))?;
                    area = Some(Area::new(w, h)?);
                }
                "seed" => seed = Some(v.parse().map_err(|_| bad(1, "bad seed"))?),
                "count" => {}
                _ => return Err(bad(1, &format!("unknown header field {k}"))),
            }
        }
        let kind = kind.ok_or_else(|| bad(1, "header lacks kind"))?;
        let area = area.ok_or_else(|| bad(1, "header lacks area"))?;
        let mut positions = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let [id, x, y] = f[..] else {
                return Err(bad(i + 1, "expected `id x_cm y_cm`"));
            };
            let id: usize = id.parse().map_err(|_| bad(i + 1, "bad id"))?;
            if id != positions.len() {
                return Err(bad(i + 1, "ids must be consecutive from 0"));
            }
            let p = Position::new(
                x.parse().map_err(|_| bad(i + 1, "bad x"))?,
                y.parse().map_err(|_| bad(i + 1, "bad y"))?,
            );
            if !area.contains(&p) {
                return Err(bad(i + 1, "position outside the area"));
            }
            positions.push(p);
        }
        if positions.len() < 2 {
            return Err(bad(1, "placement needs at least two nodes"));
        }
        Ok(Deployment {
            kind,
            positions,
            area,
            seed,
        })
    }
}

fn check_count(count: usize) -> Result<()> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "a deployment needs at least 2 nodes (gateway plus one sensor), got {count}"
        )));
    }
    if u32::try_from(count).is_err() {
        return Err(Error::InvalidArgument(format!("node count {count} too large")));
    }
    Ok(())
}

/// Uniform random placement with the gateway at the origin corner.
pub fn deploy_random(count: usize, area: Area, seed: u64) -> Result<Deployment> {
    deploy_random_with(count, area, seed, GatewayPlacement::Corner)
}

pub fn deploy_random_with(
    count: usize,
    area: Area,
    seed: u64,
    gateway: GatewayPlacement,
) -> Result<Deployment> {
    check_count(count)?;
    let mut rng = SimRng::new(seed);
    let mut positions = Vec::with_capacity(count);
    positions.push(match gateway {
        GatewayPlacement::Corner => Position::new(0.0, 0.0),
        GatewayPlacement::Center => area.center(),
    });
    for _ in 1..count {
        let x = rng.unit() * area.width_cm();
        let y = rng.unit() * area.height_cm();
        positions.push(Position::new(x, y));
    }
    Ok(Deployment {
        kind: DeploymentKind::Random,
        positions,
        area,
        seed: Some(seed),
    })
}

/// Grid shape `(rows, cols)` with `rows * cols == count` whose cell aspect is
/// closest to square, i.e. minimizing `|width/cols - height/rows|`. Ties go to
/// fewer rows.
pub fn grid_shape(count: usize, area: Area) -> (usize, usize) {
    let mut best = (1, count);
    let mut best_gap = f64::INFINITY;
    for rows in (1..=count).filter(|&r| count.is_multiple_of(r)) {
        let cols = count / rows;
        let gap = (area.width_cm() / cols as f64 - area.height_cm() / rows as f64).abs();
        if gap < best_gap {
            best = (rows, cols);
            best_gap = gap;
        }
    }
    best
}

/// Square-grid placement at cell centers, filled row by row from the origin.
pub fn deploy_grid(count: usize, area: Area) -> Result<Deployment> {
    deploy_grid_with(count, area, GatewayPlacement::Corner)
}

pub fn deploy_grid_with(count: usize, area: Area, gateway: GatewayPlacement) -> Result<Deployment> {
    check_count(count)?;
    let (rows, cols) = grid_shape(count, area);
    let dx = area.width_cm() / cols as f64;
    let dy = area.height_cm() / rows as f64;
    let mut positions: Vec<Position> = (0..rows)
        .flat_map(|r| {
            (0..cols).map(move |c| Position::new((c as f64 + 0.5) * dx, (r as f64 + 0.5) * dy))
        })
        .collect();
    let anchor = match gateway {
        GatewayPlacement::Corner => Position::new(0.0, 0.0),
        GatewayPlacement::Center => area.center(),
    };
    let nearest = positions
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.distance(&anchor).total_cmp(&b.distance(&anchor)))
        .map(|(i, _)| i)
        .expect("count >= 2");
    positions.swap(0, nearest);
    Ok(Deployment {
        kind: DeploymentKind::Grid,
        positions,
        area,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn random_default_field() {
        let d = deploy_random(50, Area::default(), 11).unwrap();
        assert_eq!(d.len(), 50);
        assert_eq!(d.position(NodeId::GATEWAY), Position::new(0.0, 0.0));
        assert!(d.positions.iter().all(|p| d.area.contains(p)));
        assert_eq!(d.seed, Some(11));
    }

    #[test]
    fn random_minimal_and_too_small() {
        let d = deploy_random(2, Area::default(), 1).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.positions[0], Position::new(0.0, 0.0));
        assert!(matches!(
            deploy_random(1, Area::default(), 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(deploy_grid(0, Area::default()).is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let a = deploy_random(50, Area::default(), 99).unwrap();
        let b = deploy_random(50, Area::default(), 99).unwrap();
        assert_eq!(a, b);
        let c = deploy_random(50, Area::default(), 100).unwrap();
        assert_ne!(a.positions, c.positions);
    }

    #[test]
    fn center_gateway() {
        let d = deploy_random_with(10, Area::default(), 3, GatewayPlacement::Center).unwrap();
        assert_eq!(d.positions[0], Position::new(400.0, 250.0));
        let g = deploy_grid_with(9, Area::new(300.0, 300.0).unwrap(), GatewayPlacement::Center)
            .unwrap();
        assert_eq!(g.positions[0], Position::new(150.0, 150.0));
        assert_eq!(g.positions[4], Position::new(50.0, 50.0));
    }

    #[test]
    fn grid_shape_for_default_field() {
        // Enumerate every factor pair of 50 and keep the smallest cell-aspect gap.
        let area = Area::default();
        let oracle = [(1, 50), (2, 25), (5, 10), (10, 5), (25, 2), (50, 1)]
            .into_iter()
            .min_by(|a, b| {
                let gap = |(r, c): (usize, usize)| (800.0 / c as f64 - 500.0 / r as f64).abs();
                gap(*a).total_cmp(&gap(*b))
            })
            .unwrap();
        assert_eq!(oracle, (5, 10));
        assert_eq!(grid_shape(50, area), oracle);

        let d = deploy_grid(50, area).unwrap();
        assert_eq!(d.positions[0], Position::new(40.0, 50.0));
        assert_eq!(d.positions[1], Position::new(120.0, 50.0));
        assert_eq!(d.positions[10], Position::new(40.0, 150.0));
        assert_eq!(d.positions[49], Position::new(760.0, 450.0));
    }

    #[test]
    fn grid_square_case() {
        let d = deploy_grid(4, Area::new(100.0, 100.0).unwrap()).unwrap();
        assert_eq!(
            d.positions,
            vec![
                Position::new(25.0, 25.0),
                Position::new(75.0, 25.0),
                Position::new(25.0, 75.0),
                Position::new(75.0, 75.0),
            ]
        );
        assert_eq!(d, deploy_grid(4, Area::new(100.0, 100.0).unwrap()).unwrap());
    }

    #[test]
    fn prime_count_degenerates_to_a_line() {
        let d = deploy_grid(7, Area::default()).unwrap();
        assert_eq!(grid_shape(7, Area::default()), (1, 7));
        assert!(d.positions.iter().all(|p| p.y_cm == 250.0));
    }

    #[test]
    fn placement_file_round_trip() {
        let d = deploy_random(12, Area::default(), 5).unwrap();
        let text = d.to_placement_file();
        assert!(text.starts_with("# kind=random area=800x500 count=12 seed=5\n"));
        assert_eq!(text.lines().nth(1), Some("0 0 0"));
        assert_eq!(Deployment::from_placement_file(&text).unwrap(), d);

        let g = deploy_grid(6, Area::default()).unwrap();
        assert_eq!(Deployment::from_placement_file(&g.to_placement_file()).unwrap(), g);
        assert!(Deployment::from_placement_file("0 1 1\n").is_err());
        assert!(Deployment::from_placement_file("# kind=grid area=10x10\n0 1 1\n1 20 1\n").is_err());
    }

    proptest! {
        #[test]
        fn every_position_is_in_bounds(
            count in 2usize..120,
            w in 1.0f64..2_000.0,
            h in 1.0f64..2_000.0,
            seed in any::<u64>(),
        ) {
            let area = Area::new(w, h).unwrap();
            let r = deploy_random(count, area, seed).unwrap();
            let g = deploy_grid(count, area).unwrap();
            prop_assert_eq!(r.len(), count);
            prop_assert_eq!(g.len(), count);
            prop_assert!(r.positions.iter().all(|p| area.contains(p)));
            prop_assert!(g.positions.iter().all(|p| area.contains(p)));
        }

        #[test]
        fn grid_spacing_is_uniform_per_axis(count in 2usize..80) {
            let area = Area::default();
            let (rows, cols) = grid_shape(count, area);
            let d = deploy_grid(count, area).unwrap();
            let mut xs: Vec<f64> = d.positions.iter().map(|p| p.x_cm).collect();
            let mut ys: Vec<f64> = d.positions.iter().map(|p| p.y_cm).collect();
            for v in [&mut xs, &mut ys] {
                v.sort_by(f64::total_cmp);
                v.dedup();
            }
            prop_assert_eq!(xs.len(), cols);
            prop_assert_eq!(ys.len(), rows);
            for axis in [&xs, &ys] {
                let gaps: Vec<f64> = axis.windows(2).map(|w| w[1] - w[0]).collect();
                for g in &gaps {
                    prop_assert!((g - gaps[0]).abs() < 1e-9);
                }
            }
        }
    }
}

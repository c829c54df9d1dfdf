use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::Serialize;

use crate::distmat::PointSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlatonicSolid {
    Tetrahedron,
    Octahedron,
    Hexahedron,
    Icosahedron,
    Dodecahedron,
}

impl PlatonicSolid {
    pub const ALL: [PlatonicSolid; 5] = [
        PlatonicSolid::Tetrahedron,
        PlatonicSolid::Octahedron,
        PlatonicSolid::Hexahedron,
        PlatonicSolid::Icosahedron,
        PlatonicSolid::Dodecahedron,
    ];

    pub fn vertex_count(self) -> usize {
        match self {
            PlatonicSolid::Tetrahedron => 4,
            PlatonicSolid::Octahedron => 6,
            PlatonicSolid::Hexahedron => 8,
            PlatonicSolid::Icosahedron => 12,
            PlatonicSolid::Dodecahedron => 20,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlatonicSolid::Tetrahedron => "tetrahedron",
            PlatonicSolid::Octahedron => "octahedron",
            PlatonicSolid::Hexahedron => "hexahedron",
            PlatonicSolid::Icosahedron => "icosahedron",
            PlatonicSolid::Dodecahedron => "dodecahedron",
        }
    }
}

impl fmt::Display for PlatonicSolid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlatonicSolid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetrahedron" | "tetra" | "4" => Ok(PlatonicSolid::Tetrahedron),
            "octahedron" | "octa" | "6" => Ok(PlatonicSolid::Octahedron),
            "hexahedron" | "cube" | "8" => Ok(PlatonicSolid::Hexahedron),
            "icosahedron" | "icosa" | "12" => Ok(PlatonicSolid::Icosahedron),
            "dodecahedron" | "dodeca" | "20" => Ok(PlatonicSolid::Dodecahedron),
            _ => Err(Error::validation(format!("unknown solid {s:?}"))),
        }
    }
}

/// Vertices of the solid inscribed in a sphere of radius `r` centred at the
/// origin.
pub fn platonic_points(solid: PlatonicSolid, r: f64) -> Result<PointSet> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::validation("radius must be positive"));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut raw: Vec<[f64; 3]> = Vec::new();
    match solid {
        PlatonicSolid::Tetrahedron => {
            raw.extend([
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]);
        }
        PlatonicSolid::Octahedron => {
            for axis in 0..3 {
                for s in [1.0, -1.0] {
                    let mut v = [0.0; 3];
                    v[axis] = s;
                    raw.push(v);
                }
            }
        }
        PlatonicSolid::Hexahedron => {
            for x in [1.0, -1.0] {
                for y in [1.0, -1.0] {
                    for z in [1.0, -1.0] {
                        raw.push([x, y, z]);
                    }
                }
            }
        }
        PlatonicSolid::Icosahedron => {
            for a in [1.0, -1.0] {
                for b in [phi, -phi] {
                    raw.push([0.0, a, b]);
                    raw.push([a, b, 0.0]);
                    raw.push([b, 0.0, a]);
                }
            }
        }
        PlatonicSolid::Dodecahedron => {
            for x in [1.0, -1.0] {
                for y in [1.0, -1.0] {
                    for z in [1.0, -1.0] {
                        raw.push([x, y, z]);
                    }
                }
            }
            let inv = 1.0 / phi;
            for a in [inv, -inv] {
                for b in [phi, -phi] {
                    raw.push([0.0, a, b]);
                    raw.push([a, b, 0.0]);
                    raw.push([b, 0.0, a]);
                }
            }
        }
    }
    Ok(raw
        .into_iter()
        .map(|v| {
            let v = Vector3::from(v);
            v * (r / v.norm())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_radius() {
        for solid in PlatonicSolid::ALL {
            let p = platonic_points(solid, 3.0).unwrap();
            assert_eq!(p.len(), solid.vertex_count());
            assert!(p.on_sphere(&Vector3::zeros(), 3.0, 1e-12));
            assert!(p.centroid().norm() < 1e-12);
            p.distances().unwrap();
        }
    }

    #[test]
    fn edges_are_equal() {
        for solid in PlatonicSolid::ALL {
            let d = platonic_points(solid, 1.0).unwrap().distances().unwrap();
            let n = d.n();
            let shortest = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| d.get(i, j))
                .fold(f64::INFINITY, f64::min);
            let edges_at_0 = (1..n)
                .filter(|&j| (d.get(0, j) - shortest).abs() < 1e-12)
                .count();
            let degree = match solid {
                PlatonicSolid::Tetrahedron
                | PlatonicSolid::Hexahedron
                | PlatonicSolid::Dodecahedron => 3,
                PlatonicSolid::Octahedron => 4,
                PlatonicSolid::Icosahedron => 5,
            };
            assert_eq!(edges_at_0, degree, "{solid}");
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            "Cube".parse::<PlatonicSolid>().unwrap(),
            PlatonicSolid::Hexahedron
        );
        assert!("sphere".parse::<PlatonicSolid>().is_err());
    }
}

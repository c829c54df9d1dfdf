//! Reference data sets bundled with the crate.

use crate::distmat::{DistanceKind, DistanceMatrix};
use crate::io::parse_distance_matrix;

pub const VASILIEV_CSV: &str = include_str!("../fixtures/vasiliev.csv");
pub const FLIGHTS_CSV: &str = include_str!("../fixtures/flights.csv");
pub const OCTAHEDRON_CSV: &str = include_str!("../fixtures/octahedron.csv");

/// City codes in the row order of [`FLIGHTS_CSV`].
pub const FLIGHT_CITIES: [&str; 7] = ["SEA", "MOW", "TYO", "DEL", "MVD", "ANC", "SYD"];

/// Measured distances for four points clustered near the poles of a unit
/// sphere; nearly collinear, so the tetrahedron has almost no volume.
pub fn vasiliev() -> DistanceMatrix {
    parse_distance_matrix(VASILIEV_CSV, DistanceKind::Chord).expect("bundled fixture is valid")
}

/// Flight distances (km) between seven cities, treated as surface arcs.
pub fn flights() -> DistanceMatrix {
    parse_distance_matrix(FLIGHTS_CSV, DistanceKind::Arc).expect("bundled fixture is valid")
}

/// Chord distances of the unit octahedron.
pub fn octahedron() -> DistanceMatrix {
    parse_distance_matrix(OCTAHEDRON_CSV, DistanceKind::Chord).expect("bundled fixture is valid")
}

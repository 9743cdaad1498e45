//! Planar geometry: the square observation window, Poisson point process
//! sampling, wrap-around link distances, and building footprint measurement.

use std::collections::HashSet;
use std::io::Read;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::blockage::BuildingStats;
use crate::error::{Error, Result};

/// Square observation window `[0, side) x [0, side)` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    side: f64,
}

impl Window {
    pub fn new(side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::invalid(format!("window side must be > 0, got {side}")));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.side).contains(&p.x) && (0.0..self.side).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn euclidean(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Samples a homogeneous PPP of the given intensity (points per m²) over the window.
pub fn sample_ppp<R: Rng + ?Sized>(intensity: f64, window: Window, rng: &mut R) -> Result<Vec<Point>> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid(format!("intensity must be >= 0, got {intensity}")));
    }
    let mean = intensity * window.area();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let poisson = Poisson::new(mean).map_err(|e| Error::invalid(format!("poisson mean {mean}: {e}")))?;
    let count = poisson.sample(rng) as usize;
    let side = window.side();
    let coord = |rng: &mut R| {
        let v = rng.random::<f64>() * side;
        // u * side can round up to side for u just below 1
        if v < side { v } else { 0.0 }
    };
    Ok((0..count)
        .map(|_| {
            let x = coord(rng);
            let y = coord(rng);
            Point::new(x, y)
        })
        .collect())
}

/// Wrap-around distance on the torus formed by identifying opposite window edges.
pub fn toroidal_distance(p: Point, q: Point, window: Window) -> Result<f64> {
    for pt in [p, q] {
        if !window.contains(pt) {
            return Err(Error::invalid(format!(
                "point ({}, {}) lies outside the {} m window",
                pt.x,
                pt.y,
                window.side()
            )));
        }
    }
    Ok(wrapped_distance(p, q, window.side()))
}

/// Unchecked form of [`toroidal_distance`] for points already known to be inside.
#[inline]
pub(crate) fn wrapped_distance(p: Point, q: Point, side: f64) -> f64 {
    let axis = |d: f64| {
        let d = d.abs();
        d.min(side - d)
    };
    axis(p.x - q.x).hypot(axis(p.y - q.y))
}

/// A building outline: an implicitly closed simple polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    building_id: String,
    vertices: Vec<Point>,
}

impl Footprint {
    /// Validates vertex count, consecutive duplicates (including the closing
    /// edge) and nonzero area. Self-intersection is not detected.
    pub fn new(building_id: impl Into<String>, vertices: Vec<Point>) -> Result<Self> {
        let building_id = building_id.into();
        if vertices.len() < 3 {
            return Err(Error::invalid(format!(
                "building {building_id}: polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::invalid(format!("building {building_id}: non-finite vertex")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::invalid(format!(
                    "building {building_id}: consecutive duplicate vertex at index {}",
                    (i + 1) % n
                )));
            }
        }
        if shoelace(&vertices) == 0.0 {
            return Err(Error::invalid(format!("building {building_id}: polygon has zero area")));
        }
        Ok(Self { building_id, vertices })
    }

    pub fn building_id(&self) -> &str {
        &self.building_id
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
}

fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum();
    (twice / 2.0).abs()
}

fn check_vertex_count(f: &Footprint) -> Result<()> {
    if f.vertices.len() < 3 {
        return Err(Error::invalid(format!(
            "building {}: polygon needs at least 3 vertices",
            f.building_id
        )));
    }
    Ok(())
}

/// Absolute shoelace area in m².
pub fn polygon_area(f: &Footprint) -> Result<f64> {
    check_vertex_count(f)?;
    Ok(shoelace(&f.vertices))
}

/// Sum of edge lengths, closing edge included.
pub fn polygon_perimeter(f: &Footprint) -> Result<f64> {
    check_vertex_count(f)?;
    let n = f.vertices.len();
    Ok((0..n).map(|i| f.vertices[i].euclidean(&f.vertices[(i + 1) % n])).sum())
}

/// Mean area, covered fraction of `region_area`, and mean perimeter.
pub fn footprint_stats(footprints: &[Footprint], region_area: f64) -> Result<BuildingStats> {
    if footprints.is_empty() {
        return Err(Error::invalid("footprint list is empty"));
    }
    if !(region_area.is_finite() && region_area > 0.0) {
        return Err(Error::invalid(format!("region area must be > 0, got {region_area}")));
    }
    let mut total_area = 0.0;
    let mut total_perimeter = 0.0;
    for f in footprints {
        total_area += polygon_area(f)?;
        total_perimeter += polygon_perimeter(f)?;
    }
    let n = footprints.len() as f64;
    BuildingStats::new(total_area / n, total_area / region_area, total_perimeter / n)
}

/// Reads a `building_id,x,y` vertex file. Rows of one building must be
/// contiguous. A trailing vertex repeating the first one is dropped, since
/// GIS exports usually close rings explicitly.
pub fn read_footprints<R: Read>(reader: R) -> Result<Vec<Footprint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let expected = ["building_id", "x", "y"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Footprint {
            line: 1,
            message: format!("expected header `building_id,x,y`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut groups: Vec<(String, Vec<Point>)> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let parse = |idx: usize, name: &str| -> Result<f64> {
            record[idx].parse::<f64>().map_err(|e| Error::Footprint {
                line,
                message: format!("bad {name} coordinate `{}`: {e}", &record[idx]),
            })
        };
        let id = record[0].to_string();
        let p = Point::new(parse(1, "x")?, parse(2, "y")?);
        match groups.last_mut() {
            Some((last, pts)) if *last == id => pts.push(p),
            _ => {
                if !seen.insert(id.clone()) {
                    return Err(Error::Footprint {
                        line,
                        message: format!("rows of building `{id}` are not contiguous"),
                    });
                }
                groups.push((id, vec![p]));
            }
        }
    }

    groups
        .into_iter()
        .map(|(id, mut pts)| {
            if pts.len() > 3 && pts.first() == pts.last() {
                pts.pop();
            }
            Footprint::new(id, pts)
        })
        .collect()
}

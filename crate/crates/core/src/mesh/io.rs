//! Plain-text mesh format:
//!
//! ```text
//! nodes N triangles T
//! x y                      (N lines)
//! i j k region_id          (T lines)
//! i j on_gamma             (one line per boundary edge, on_gamma ∈ {0,1})
//! ```
//!
//! Indices are 0-based. The boundary geometry is inferred on read: if every
//! Γ node lies on the unit circle the Γ edges are treated as arcs.

use std::io::{BufRead, Write};

use crate::error::{EitError, Result};
use crate::mesh::{BoundaryEdge, BoundaryGeometry, Mesh};
use crate::scalar::Real;

pub fn write_mesh<T: Real, W: Write>(mesh: &Mesh<T>, mut out: W) -> Result<()> {
    writeln!(out, "nodes {} triangles {}", mesh.num_nodes(), mesh.num_elements())?;
    for p in mesh.nodes() {
        writeln!(out, "{} {}", p[0], p[1])?;
    }
    for (t, r) in mesh.triangles().iter().zip(mesh.element_region()) {
        writeln!(out, "{} {} {} {}", t[0], t[1], t[2], r)?;
    }
    for e in mesh.boundary_edges() {
        writeln!(out, "{} {} {}", e.nodes[0], e.nodes[1], u8::from(e.on_gamma))?;
    }
    Ok(())
}

pub fn read_mesh<T: Real, R: BufRead>(input: R) -> Result<Mesh<T>> {
    let mut lines = input.lines().enumerate().filter_map(|(no, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((no + 1, other)),
    });
    let bad = |no: usize, what: &str| EitError::Input(format!("mesh line {no}: {what}"));

    let (no, header) = lines.next().ok_or_else(|| EitError::Input("empty mesh file".into()))?;
    let header = header?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "nodes" || h[2] != "triangles" {
        return Err(bad(no, "expected `nodes N triangles T`"));
    }
    let n: usize = h[1].parse().map_err(|_| bad(no, "bad node count"))?;
    let t: usize = h[3].parse().map_err(|_| bad(no, "bad triangle count"))?;

    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines.next().ok_or_else(|| EitError::Input("truncated node list".into()))?;
        let line = line?;
        let v: Vec<f64> = line.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(no, "bad coordinate"))?;
        if v.len() != 2 {
            return Err(bad(no, "expected `x y`"));
        }
        nodes.push([T::lit(v[0]), T::lit(v[1])]);
    }
    let mut triangles = Vec::with_capacity(t);
    let mut regions = Vec::with_capacity(t);
    for _ in 0..t {
        let (no, line) = lines.next().ok_or_else(|| EitError::Input("truncated triangle list".into()))?;
        let line = line?;
        let v: Vec<u64> = line.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(no, "bad triangle"))?;
        if v.len() != 4 {
            return Err(bad(no, "expected `i j k region_id`"));
        }
        triangles.push([v[0] as usize, v[1] as usize, v[2] as usize]);
        regions.push(u32::try_from(v[3]).map_err(|_| bad(no, "region id out of range"))?);
    }
    let mut edges = Vec::new();
    for (no, line) in lines {
        let line = line?;
        let v: Vec<usize> = line.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(no, "bad boundary edge"))?;
        if v.len() != 3 || v[2] > 1 {
            return Err(bad(no, "expected `i j on_gamma` with on_gamma ∈ {0,1}"));
        }
        edges.push(BoundaryEdge { nodes: [v[0], v[1]], on_gamma: v[2] == 1 });
    }
    let on_circle = |i: usize| {
        nodes.get(i).is_some_and(|p: &[T; 2]| (p[0].hypot(p[1]) - T::one()).abs() < T::lit(1e-9).max(T::epsilon() * T::lit(8.0)))
    };
    let geometry = if edges.iter().filter(|e| e.on_gamma).all(|e| on_circle(e.nodes[0]) && on_circle(e.nodes[1])) {
        BoundaryGeometry::UnitCircle
    } else {
        BoundaryGeometry::Polygonal
    };
    Mesh::new(nodes, triangles, edges, regions, geometry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{carve_insulating, generate_disk_mesh, generate_rect_mesh, tag_regions, RegionSpec};

    #[test]
    fn round_trip_preserves_mesh() {
        let mesh = generate_disk_mesh(0.2f64).unwrap();
        let tagged = tag_regions(&mesh, &[(4, RegionSpec::disk(0.2, 0.0, 0.3))]).unwrap().mesh;
        let carved = carve_insulating(&tagged, 4).unwrap();
        for m in [&tagged, &carved] {
            let mut buf = Vec::new();
            write_mesh(m, &mut buf).unwrap();
            let back: Mesh<f64> = read_mesh(buf.as_slice()).unwrap();
            assert_eq!(&back, m);
        }
    }

    #[test]
    fn polygonal_geometry_inferred() {
        let mesh = generate_rect_mesh([0.0f64, 0.0], [2.0, 1.0], 3, 2).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back: Mesh<f64> = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.geometry(), BoundaryGeometry::Polygonal);
        assert_eq!(back, mesh);
    }

    #[test]
    fn malformed_input_is_reported() {
        assert!(read_mesh::<f64, _>("nodes 1 tri 0\n".as_bytes()).is_err());
        assert!(read_mesh::<f64, _>("nodes 3 triangles 1\n0 0\n1 0\n".as_bytes()).is_err());
        let clockwise = "nodes 3 triangles 1\n0 0\n1 0\n0 1\n0 2 1 0\n0 1 1\n1 2 1\n2 0 1\n";
        assert!(read_mesh::<f64, _>(clockwise.as_bytes()).is_err());
    }
}

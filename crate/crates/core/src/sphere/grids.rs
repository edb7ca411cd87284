//! Point sets on the circle and the 2-sphere.

use std::collections::HashMap;
use std::f64::consts::PI;

/// `n` equally spaced unit vectors on the circle.
pub fn circle_grid(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Vertices of the icosahedron after `level` rounds of edge-midpoint
/// subdivision, projected to the unit sphere (`10·4^level + 2` points).
pub fn icosahedral_grid(level: usize) -> Vec<Vec<f64>> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    for v in verts.iter_mut() {
        *v = unit(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                let (a, b) = (verts[i], verts[j]);
                verts.push(unit([a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts.into_iter().map(|v| v.to_vec()).collect()
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Two unit vectors completing `xi` (unit, length 3) to an orthonormal frame.
pub(crate) fn orthonormal_frame(xi: &[f64]) -> ([f64; 3], [f64; 3]) {
    let seed = if xi[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = seed[0] * xi[0] + seed[1] * xi[1] + seed[2] * xi[2];
    let e1 = unit([seed[0] - d * xi[0], seed[1] - d * xi[1], seed[2] - d * xi[2]]);
    let e2 = [
        xi[1] * e1[2] - xi[2] * e1[1],
        xi[2] * e1[0] - xi[0] * e1[2],
        xi[0] * e1[1] - xi[1] * e1[0],
    ];
    (e1, e2)
}

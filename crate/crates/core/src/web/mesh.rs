use std::collections::HashMap;

use rayon::prelude::*;

use super::LeafSpec;
use crate::error::{Error, Result};
use crate::models::TAU_BD;
use crate::numeric::illinois;

/// Regular grid with `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub n: usize,
}

impl Grid {
    pub fn new(bounds: [[f64; 2]; 3], n: usize) -> Self {
        Grid { lo: [bounds[0][0], bounds[1][0], bounds[2][0]], hi: [bounds[0][1], bounds[1][1], bounds[2][1]], n }
    }

    pub fn spacing(&self) -> [f64; 3] {
        let n = self.n as f64;
        [(self.hi[0] - self.lo[0]) / n, (self.hi[1] - self.lo[1]) / n, (self.hi[2] - self.lo[2]) / n]
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().iter().cloned().fold(0.0, f64::max)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.spacing();
        [self.lo[0] + i as f64 * h[0], self.lo[1] + j as f64 * h[1], self.lo[2] + k as f64 * h[2]]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.n + 1;
        (i * m + j) * m + k
    }

    pub fn point_of(&self, g: usize) -> [f64; 3] {
        let m = self.n + 1;
        self.point(g / (m * m), (g / m) % m, g % m)
    }

    pub fn num_points(&self) -> usize {
        (self.n + 1).pow(3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    pub tau_bd: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions { tau_bd: TAU_BD }
    }
}

/// Triangulated leaf with per-vertex implicit residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoMesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub residuals: Vec<f64>,
    pub level: f64,
    pub spacing: f64,
}

type EdgeKey = (usize, usize);

fn key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

const KUHN: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn tet_triangles(g: &[usize; 4], pos: &[bool; 4], out: &mut Vec<[EdgeKey; 3]>) {
    let np = pos.iter().filter(|&&p| p).count();
    match np {
        0 | 4 => {}
        1 | 3 => {
            let lone = (0..4).find(|&i| pos[i] == (np == 1)).unwrap();
            let rest: Vec<usize> = (0..4).filter(|&i| i != lone).collect();
            out.push([key(g[lone], g[rest[0]]), key(g[lone], g[rest[1]]), key(g[lone], g[rest[2]])]);
        }
        _ => {
            let p: Vec<usize> = (0..4).filter(|&i| pos[i]).collect();
            let m: Vec<usize> = (0..4).filter(|&i| !pos[i]).collect();
            let (a, b, c, d) = (g[p[0]], g[p[1]], g[m[0]], g[m[1]]);
            out.push([key(a, c), key(a, d), key(b, d)]);
            out.push([key(a, c), key(b, d), key(b, c)]);
        }
    }
}

fn lerp(a: &[f64; 3], b: &[f64; 3], t: f64) -> [f64; 3] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
}

/// Root of `f` on the segment from a (f ≥ 0) to b (f < 0).
fn segment_root<F: Fn(&[f64]) -> f64>(f: &F, a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    let g = |t: f64| f(&lerp(a, b, t));
    let t = if g(0.0) == 0.0 { 0.0 } else { illinois(g, 0.0, 1.0, 1e-15).unwrap_or(0.5) };
    lerp(a, b, t.clamp(0.0, 1.0))
}

fn grad3<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64; 3]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for i in 0..3 {
        let h = 1e-6 * (1.0 + x[i].abs());
        let mut p = *x;
        let mut m = *x;
        p[i] += h;
        m[i] -= h;
        g[i] = (f(&p) - f(&m)) / (2.0 * h);
    }
    g
}

/// Norm of the FD Hessian.
pub(crate) fn hessian_norm<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        let e = 1e-4 * (1.0 + x[i].abs());
        let mut p = *x;
        let mut m = *x;
        p[i] += e;
        m[i] -= e;
        let (gp, gm) = (grad3(f, &p), grad3(f, &m));
        for j in 0..3 {
            s += ((gp[j] - gm[j]) / (2.0 * e)).powi(2);
        }
    }
    s.sqrt()
}

/// True within about one cell of a critical point of `f`: |∇f| < h‖∇²f‖.
pub fn is_near_critical<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64; 3], h: f64) -> bool {
    let g = crate::lie::norm(&grad3(f, x));
    g < h * hessian_norm(f, x)
}

fn near_critical<F: Fn(&[f64]) -> f64>(f: &F, v: &[[f64; 3]], t: &[usize; 3], h: f64) -> bool {
    let (p0, p1, p2) = (v[t[0]], v[t[1]], v[t[2]]);
    let c = [(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0, (p0[2] + p1[2] + p2[2]) / 3.0];
    is_near_critical(f, &c, h)
}

/// Gauss–Newton projection onto {f = 0, b = 0}.
fn project_two<F, B>(f: &F, b: &B, x0: &[f64; 3], max_move: f64, tangency: f64) -> Option<[f64; 3]>
where
    F: Fn(&[f64]) -> f64,
    B: Fn(&[f64]) -> f64,
{
    let mut x = *x0;
    for _ in 0..30 {
        let r = [f(&x), b(&x)];
        if r[0].abs() < 1e-13 && r[1].abs() < 1e-13 {
            let d = ((x[0] - x0[0]).powi(2) + (x[1] - x0[1]).powi(2) + (x[2] - x0[2]).powi(2)).sqrt();
            return (d <= max_move).then_some(x);
        }
        let gf = grad3(f, &x);
        let gb = grad3(b, &x);
        let d = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let (a11, a12, a22) = (d(&gf, &gf), d(&gf, &gb), d(&gb, &gb));
        let det = a11 * a22 - a12 * a12;
        // near-tangency of the leaf with the boundary: the cut is not transversal
        if !(det > tangency * a11 * a22) {
            return None;
        }
        let y0 = (a22 * r[0] - a12 * r[1]) / det;
        let y1 = (-a12 * r[0] + a11 * r[1]) / det;
        for i in 0..3 {
            x[i] -= y0 * gf[i] + y1 * gb[i];
        }
        if !x.iter().all(|v| v.is_finite()) {
            return None;
        }
    }
    None
}

/// Extract the zero set of `f` clipped to `b ≥ −τ_bd` (when `b` is given).
pub fn extract_with<F, B>(
    f: &F,
    b: &B,
    bounds: [[f64; 2]; 3],
    n: usize,
    level: f64,
    opts: MeshOptions,
) -> Result<IsoMesh>
where
    F: Fn(&[f64]) -> f64 + Sync,
    B: Fn(&[f64]) -> Option<f64> + Sync,
{
    if n < 16 {
        return Err(Error::Config(format!("resolution {n} < 16")));
    }
    let grid = Grid::new(bounds, n);
    let values: Vec<f64> = (0..grid.num_points()).into_par_iter().map(|g| f(&grid.point_of(g))).collect();

    let tris: Vec<[EdgeKey; 3]> = (0..n * n * n)
        .into_par_iter()
        .map(|c| {
            let (i, j, k) = (c / (n * n), (c / n) % n, c % n);
            let corner = |bits: usize| grid.index(i + (bits & 1), j + ((bits >> 1) & 1), k + ((bits >> 2) & 1));
            let gs: Vec<usize> = (0..8).map(corner).collect();
            let vs: Vec<f64> = gs.iter().map(|&g| values[g]).collect();
            let mut out = Vec::new();
            if vs.iter().any(|v| v.is_nan()) {
                return out;
            }
            let npos = vs.iter().filter(|&&v| v >= 0.0).count();
            if npos == 0 || npos == 8 {
                return out;
            }
            for p in KUHN {
                let b1 = 1 << p[0];
                let b2 = b1 | (1 << p[1]);
                let cs = [0, b1, b2, 7];
                let g = [gs[cs[0]], gs[cs[1]], gs[cs[2]], gs[cs[3]]];
                let pos = [vs[cs[0]] >= 0.0, vs[cs[1]] >= 0.0, vs[cs[2]] >= 0.0, vs[cs[3]] >= 0.0];
                tet_triangles(&g, &pos, &mut out);
            }
            out
        })
        .flatten_iter()
        .collect();

    // an exact zero at a grid point is a single vertex shared by every edge through it
    let canon = |e: &EdgeKey| -> EdgeKey {
        if values[e.0] == 0.0 {
            (e.0, e.0)
        } else if values[e.1] == 0.0 {
            (e.1, e.1)
        } else {
            *e
        }
    };
    let mut ids: HashMap<EdgeKey, usize> = HashMap::new();
    let mut edges: Vec<EdgeKey> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(tris.len());
    for t in &tris {
        let mut face = [0; 3];
        for (slot, e) in face.iter_mut().zip(t) {
            let e = canon(e);
            *slot = *ids.entry(e).or_insert_with(|| {
                edges.push(e);
                edges.len() - 1
            });
        }
        if face[0] != face[1] && face[1] != face[2] && face[0] != face[2] {
            faces.push(face);
        }
    }
    let mut verts: Vec<[f64; 3]> = edges
        .par_iter()
        .map(|&(a, c)| {
            let (pa, pc) = (grid.point_of(a), grid.point_of(c));
            if a == c {
                pa
            } else if values[a] >= 0.0 {
                segment_root(f, &pa, &pc)
            } else {
                segment_root(f, &pc, &pa)
            }
        })
        .collect();

    let h = grid.max_spacing();
    if verts.first().and_then(|v| b(v)).is_some() {
        let (nv, nf) = clip(f, b, verts, faces, h, opts.tau_bd);
        verts = nv;
        faces = nf;
    }

    // cut the leaf open at its critical points so pieces meeting at a node stay apart
    faces = faces.into_par_iter().filter(|t| !near_critical(f, &verts, t, h)).collect::<Vec<_>>();

    // weld coincident points and drop slivers left by roots on grid nodes
    let mut weld: HashMap<[u64; 3], usize> = HashMap::new();
    let alias: Vec<usize> = verts
        .iter()
        .enumerate()
        .map(|(i, v)| *weld.entry([v[0].to_bits(), v[1].to_bits(), v[2].to_bits()]).or_insert(i))
        .collect();
    faces = faces
        .into_iter()
        .map(|t| [alias[t[0]], alias[t[1]], alias[t[2]]])
        .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        .collect();

    // drop unused vertices, keep first-use order
    let mut remap = vec![usize::MAX; verts.len()];
    let mut kept = Vec::new();
    for face in faces.iter_mut() {
        for v in face.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = kept.len();
                kept.push(verts[*v]);
            }
            *v = remap[*v];
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptyLeaf);
    }
    for face in faces.iter_mut() {
        let (p0, p1, p2) = (kept[face[0]], kept[face[1]], kept[face[2]]);
        let u = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
        let w = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
        let nrm = crate::lie::cross(&u, &w);
        let c = [(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0, (p0[2] + p1[2] + p2[2]) / 3.0];
        if crate::lie::dot(&nrm, &grad3(f, &c)) < 0.0 {
            face.swap(1, 2);
        }
    }
    let residuals = kept.iter().map(|v| f(v)).collect();
    Ok(IsoMesh { vertices: kept, triangles: faces, residuals, level, spacing: h })
}

#[derive(Clone, Copy)]
enum PolyVert {
    Old(usize),
    Cut(EdgeKey),
}

fn clip<F, B>(
    f: &F,
    b: &B,
    verts: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    h: f64,
    tau: f64,
) -> (Vec<[f64; 3]>, Vec<[usize; 3]>)
where
    F: Fn(&[f64]) -> f64 + Sync,
    B: Fn(&[f64]) -> Option<f64> + Sync,
{
    let bv: Vec<f64> = verts.par_iter().map(|v| b(v).unwrap_or(0.0)).collect();
    let inside = |v: usize| bv[v] >= -tau;
    let mut polys: Vec<Vec<PolyVert>> = Vec::new();
    let mut cuts: Vec<EdgeKey> = Vec::new();
    let mut cut_ids: HashMap<EdgeKey, usize> = HashMap::new();
    for face in &faces {
        let nin = face.iter().filter(|&&v| inside(v)).count();
        if nin == 0 {
            continue;
        }
        if nin == 3 {
            polys.push(face.iter().map(|&v| PolyVert::Old(v)).collect());
            continue;
        }
        let mut poly = Vec::new();
        for e in 0..3 {
            let (u, w) = (face[e], face[(e + 1) % 3]);
            if inside(u) {
                poly.push(PolyVert::Old(u));
            }
            if inside(u) != inside(w) {
                let k = key(u, w);
                cut_ids.entry(k).or_insert_with(|| {
                    cuts.push(k);
                    cuts.len() - 1
                });
                poly.push(PolyVert::Cut(k));
            }
        }
        polys.push(poly);
    }
    let bb = |x: &[f64]| b(x).unwrap_or(0.0);
    let cut_pos: Vec<Option<[f64; 3]>> = cuts
        .par_iter()
        .map(|&(u, w)| {
            let (a, c) = if inside(u) { (u, w) } else { (w, u) };
            let start = if bv[a] >= 0.0 { segment_root(&bb, &verts[a], &verts[c]) } else { verts[a] };
            project_two(f, &bb, &start, 2.0 * h, h * h)
        })
        .collect();
    let mut out_v = verts;
    let mut cut_vid = vec![usize::MAX; cuts.len()];
    for (i, p) in cut_pos.iter().enumerate() {
        if let Some(p) = p {
            cut_vid[i] = out_v.len();
            out_v.push(*p);
        }
    }
    let mut out_f = Vec::new();
    'poly: for poly in polys {
        let mut ids = Vec::with_capacity(poly.len());
        for pv in poly {
            let id = match pv {
                PolyVert::Old(v) => v,
                PolyVert::Cut(k) => {
                    let c = cut_vid[cut_ids[&k]];
                    if c == usize::MAX {
                        continue 'poly;
                    }
                    c
                }
            };
            ids.push(id);
        }
        ids.dedup();
        if ids.len() > 1 && ids[0] == ids[ids.len() - 1] {
            ids.pop();
        }
        for t in 1..ids.len().saturating_sub(1) {
            out_f.push([ids[0], ids[t], ids[t + 1]]);
        }
    }
    (out_v, out_f)
}

/// Leaf mesh for a spec over a box.
pub fn extract_leaf(spec: &LeafSpec, bounds: [[f64; 2]; 3], resolution: usize) -> Result<IsoMesh> {
    spec.validate()?;
    if let super::LeafModel::Ellipsoid(_) = spec.model {
        return Err(Error::Unsupported("ellipsoid leaves are curves in a 2-dimensional shape space".into()));
    }
    extract_with(
        &|x: &[f64]| spec.raw_value(x),
        &|x: &[f64]| spec.boundary(x),
        bounds,
        resolution,
        spec.level,
        MeshOptions::default(),
    )
}

/// Connected components under shared-edge adjacency.
pub fn component_count(mesh: &IsoMesh) -> usize {
    let n = mesh.triangles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut first: HashMap<EdgeKey, usize> = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            let k = key(tri[e], tri[(e + 1) % 3]);
            match first.get(&k) {
                Some(&o) => {
                    let (ra, rb) = (find(&mut parent, o), find(&mut parent, t));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                None => {
                    first.insert(k, t);
                }
            }
        }
    }
    (0..n).filter(|&t| find(&mut parent, t) == t).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_one_component() {
        let f = |x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2];
        let m = extract_with(&f, &|_: &[f64]| None, [[-1.5, 1.5]; 3], 20, 0.0, MeshOptions::default()).unwrap();
        assert_eq!(component_count(&m), 1);
        for r in &m.residuals {
            assert!(r.abs() < 1e-13);
        }
        // closed surface: every edge is shared by exactly two triangles
        let mut cnt: HashMap<EdgeKey, usize> = HashMap::new();
        for t in &m.triangles {
            for e in 0..3 {
                *cnt.entry(key(t[e], t[(e + 1) % 3])).or_default() += 1;
            }
        }
        assert!(cnt.values().all(|&c| c == 2));
        // normals follow the gradient, which points inwards here
        let t = m.triangles[0];
        let (p0, p1, p2) = (m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        let nrm = crate::lie::cross(
            &[p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]],
            &[p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]],
        );
        assert!(crate::lie::dot(&nrm, &p0) < 0.0);
    }

    #[test]
    fn two_spheres_two_components() {
        let f = |x: &[f64]| {
            let a = 0.25 - (x[0] - 0.6).powi(2) - x[1] * x[1] - x[2] * x[2];
            let b = 0.25 - (x[0] + 0.6).powi(2) - x[1] * x[1] - x[2] * x[2];
            a.max(b)
        };
        let m = extract_with(&f, &|_: &[f64]| None, [[-1.5, 1.5]; 3], 24, 0.0, MeshOptions::default()).unwrap();
        assert_eq!(component_count(&m), 2);
    }

    #[test]
    fn clipped_plane_stays_in_domain() {
        let f = |x: &[f64]| x[2] - 0.1;
        let b = |x: &[f64]| Some(0.64 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]);
        let m = extract_with(&f, &b, [[-1.0, 1.0]; 3], 32, 0.0, MeshOptions::default()).unwrap();
        assert_eq!(component_count(&m), 1);
        for v in &m.vertices {
            assert!(b(v).unwrap() >= -1e-7);
            assert!(f(v).abs() < 1e-12);
        }
        let rmax = m.vertices.iter().map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt()).fold(0.0, f64::max);
        assert!((rmax - (0.64f64 - 0.01).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change_is_empty() {
        let f = |_: &[f64]| -1.0;
        let r = extract_with(&f, &|_: &[f64]| None, [[-1.0, 1.0]; 3], 16, 0.0, MeshOptions::default());
        assert_eq!(r.unwrap_err(), Error::EmptyLeaf);
    }
}

//! Multidegree combinatorics on the dual graph of a nodal curve: twists,
//! concentrated multidegrees, the twist-coordinate description of the
//! restricted twist graph, and integral tropical convexity in the quotient of
//! Z^{n+1} by the all-ones vector.

use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error)]
pub enum TropicalError {
    #[error("twist coefficient system has no solutions")]
    EmptyClosure,
    #[error("invalid dual graph: {0}")]
    InvalidGraph(String),
}

/// Dual graph of a nodal curve: vertices are components, edge multiplicities
/// count the nodes joining two components. Loops are excluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    mult: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn new(n: usize, edges: &[(usize, usize, usize)]) -> Result<Self, TropicalError> {
        let mut mult = vec![vec![0usize; n]; n];
        for &(a, b, m) in edges {
            if a == b || a >= n || b >= n {
                return Err(TropicalError::InvalidGraph(format!("bad edge ({a},{b})")));
            }
            mult[a][b] += m;
            mult[b][a] += m;
        }
        let g = DualGraph { mult };
        if !g.is_connected() {
            return Err(TropicalError::InvalidGraph("graph must be connected".into()));
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.mult.len()
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> usize {
        self.mult[i][j]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.mult[v].iter().sum()
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if self.mult[v][w] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Degree change of a single twist at v: +multiplicity on the neighbors,
    /// -degree(v) on v itself. Total degree is preserved.
    pub fn delta(&self, v: usize) -> Vec<i64> {
        (0..self.num_vertices())
            .map(|w| {
                if w == v {
                    -(self.degree(v) as i64)
                } else {
                    self.mult[v][w] as i64
                }
            })
            .collect()
    }
}

pub type Multidegree = Vec<i64>;

/// Row i: how many times each vertex is twisted to reach the multidegree
/// concentrated on vertex i from the base multidegree.
pub type TwistCoeffs = Vec<Vec<i64>>;

pub fn twist(g: &DualGraph, w: &[i64], v: usize) -> Multidegree {
    w.iter().zip(g.delta(v)).map(|(&a, d)| a + d).collect()
}

pub fn negative_twist(g: &DualGraph, w: &[i64], v: usize) -> Multidegree {
    w.iter().zip(g.delta(v)).map(|(&a, d)| a - d).collect()
}

/// Multidegree reached from w0 by x_v twists at each vertex v.
pub fn multidegree_at(g: &DualGraph, w0: &[i64], coords: &[i64]) -> Multidegree {
    let mut w = w0.to_vec();
    for (v, &x) in coords.iter().enumerate() {
        for (wi, d) in w.iter_mut().zip(g.delta(v)) {
            *wi += x * d;
        }
    }
    w
}

/// Whether w is concentrated on v: some ordering of the vertices starts at v
/// and makes each later vertex negative after the negative twists at all
/// earlier ones. Twists commute, so the search runs over vertex subsets.
pub fn is_concentrated(g: &DualGraph, w: &[i64], v: usize) -> bool {
    let n = g.num_vertices();
    let full: u64 = (1 << n) - 1;
    let mut dead: BTreeSet<u64> = BTreeSet::new();
    fn extend(
        g: &DualGraph,
        current: &mut Vec<i64>,
        mask: u64,
        full: u64,
        dead: &mut BTreeSet<u64>,
    ) -> bool {
        if mask == full {
            return true;
        }
        if dead.contains(&mask) {
            return false;
        }
        for v2 in 0..g.num_vertices() {
            if mask & (1 << v2) != 0 || current[v2] >= 0 {
                continue;
            }
            let delta = g.delta(v2);
            for (c, d) in current.iter_mut().zip(&delta) {
                *c -= d;
            }
            let ok = extend(g, current, mask | (1 << v2), full, dead);
            for (c, d) in current.iter_mut().zip(&delta) {
                *c += d;
            }
            if ok {
                return true;
            }
        }
        dead.insert(mask);
        false
    }
    let mut current: Vec<i64> = w.iter().zip(g.delta(v)).map(|(&a, d)| a - d).collect();
    extend(g, &mut current, 1 << v, full, &mut dead)
}

/// Canonical representative in the quotient by the all-ones vector.
pub fn normalize_point(x: &[i64]) -> Vec<i64> {
    let m = *x.iter().min().unwrap();
    x.iter().map(|&a| a - m).collect()
}

/// All twist coordinates x with x_i - x_j >= a_{i,i} - a_{i,j} for all i, j:
/// the multidegrees from which every concentrated multidegree stays reachable
/// without twisting its own vertex. Returned normalized together with the
/// corresponding multidegrees.
pub fn twist_closure_vertices(
    g: &DualGraph,
    w0: &[i64],
    coeffs: &TwistCoeffs,
) -> Result<Vec<(Vec<i64>, Multidegree)>, TropicalError> {
    let n = g.num_vertices();
    assert_eq!(coeffs.len(), n);
    // bound x_i - x_0 between the i-row and 0-row constraints
    let mut out = BTreeSet::new();
    let lows: Vec<i64> = (0..n).map(|i| coeffs[i][i] - coeffs[i][0]).collect();
    let highs: Vec<i64> = (0..n).map(|i| coeffs[0][i] - coeffs[0][0]).collect();
    if lows.iter().zip(&highs).any(|(l, h)| l > h) {
        return Err(TropicalError::EmptyClosure);
    }
    let mut x = lows.clone();
    loop {
        let ok = (0..n).all(|i| (0..n).all(|j| x[i] - x[j] >= coeffs[i][i] - coeffs[i][j]));
        if ok {
            out.insert(normalize_point(&x));
        }
        // odometer over the bounding box
        let mut k = 0;
        loop {
            if k == n {
                let points: Vec<(Vec<i64>, Multidegree)> = out
                    .into_iter()
                    .map(|c| {
                        let w = multidegree_at(g, w0, &c);
                        (c, w)
                    })
                    .collect();
                if points.is_empty() {
                    return Err(TropicalError::EmptyClosure);
                }
                return Ok(points);
            }
            x[k] += 1;
            if x[k] <= highs[k] {
                break;
            }
            x[k] = lows[k];
            k += 1;
        }
    }
}

/// The concentration condition a_{k,i} - a_{k,j} >= a_{i,i} - a_{i,j}:
/// exactly when the restricted twist graph equals the integral tropical hull
/// of the concentrated multidegrees.
pub fn condition_eq1(coeffs: &TwistCoeffs) -> bool {
    let n = coeffs.len();
    (0..n).all(|i| {
        (0..n).all(|j| (0..n).all(|k| coeffs[k][i] - coeffs[k][j] >= coeffs[i][i] - coeffs[i][j]))
    })
}

fn min_combination(p: &[i64], q: &[i64], lambda: i64) -> Vec<i64> {
    normalize_point(
        &p.iter()
            .zip(q)
            .map(|(&a, &b)| a.min(b + lambda))
            .collect::<Vec<i64>>(),
    )
}

fn hull_round(current: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let pairs: Vec<(usize, usize)> = (0..current.len())
        .flat_map(|i| (0..current.len()).map(move |j| (i, j)))
        .collect();
    let candidates = |&(i, j): &(usize, usize)| -> Vec<Vec<i64>> {
        let (p, q) = (&current[i], &current[j]);
        let m = p
            .iter()
            .zip(q)
            .map(|(&a, &b)| (a - b).abs())
            .max()
            .unwrap_or(0);
        (-m..=m).map(|l| min_combination(p, q, l)).collect()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        pairs.par_iter().flat_map_iter(candidates).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        pairs.iter().flat_map(candidates).collect()
    }
}

/// Smallest integrally tropically convex superset: close under coordinatewise
/// minimum of integer all-ones translates, to a fixpoint.
pub fn integral_tropical_hull(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    assert!(!points.is_empty());
    let mut set: BTreeSet<Vec<i64>> = points.iter().map(|p| normalize_point(p)).collect();
    loop {
        let current: Vec<Vec<i64>> = set.iter().cloned().collect();
        let before = set.len();
        set.extend(hull_round(&current));
        if set.len() == before {
            return set.into_iter().collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> DualGraph {
        DualGraph::new(3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]).unwrap()
    }

    /// negative twist at each own vertex: row i is all ones except at i
    fn triangle_coeffs() -> TwistCoeffs {
        vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
    }

    #[test]
    fn twist_basics() {
        let g = triangle();
        assert_eq!(twist(&g, &[1, 1, 1], 0), vec![-1, 2, 2]);
        // inverse and total degree
        let w = vec![4, -2, 1];
        assert_eq!(negative_twist(&g, &twist(&g, &w, 1), 1), w);
        assert_eq!(twist(&g, &w, 2).iter().sum::<i64>(), 3);
        // composing twists at every vertex is the identity
        let mut u = w.clone();
        for v in 0..3 {
            u = twist(&g, &u, v);
        }
        assert_eq!(u, w);
    }

    #[test]
    fn concentration() {
        let g = triangle();
        assert!(is_concentrated(&g, &[3, 0, 0], 0));
        assert!(!is_concentrated(&g, &[1, 1, 1], 0));
        let single = DualGraph {
            mult: vec![vec![0]],
        };
        assert!(is_concentrated(&single, &[5], 0));
    }

    #[test]
    fn closure_of_triangle() {
        let g = triangle();
        let verts = twist_closure_vertices(&g, &[1, 1, 1], &triangle_coeffs()).unwrap();
        let degrees: BTreeSet<Multidegree> = verts.iter().map(|(_, w)| w.clone()).collect();
        let expected: BTreeSet<Multidegree> = [
            vec![1, 1, 1],
            vec![3, 0, 0],
            vec![0, 3, 0],
            vec![0, 0, 3],
            vec![-1, 2, 2],
            vec![2, -1, 2],
            vec![2, 2, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(degrees, expected);
        // the concentrated multidegrees really concentrate
        for v in 0..3 {
            let wv = multidegree_at(&g, &[1, 1, 1], &triangle_coeffs()[v]);
            assert!(is_concentrated(&g, &wv, v));
        }
    }

    #[test]
    fn closure_equals_hull_under_eq1() {
        let coeffs = triangle_coeffs();
        assert!(condition_eq1(&coeffs));
        let g = triangle();
        let verts = twist_closure_vertices(&g, &[1, 1, 1], &coeffs).unwrap();
        let closure: BTreeSet<Vec<i64>> = verts.into_iter().map(|(c, _)| c).collect();
        let hull: BTreeSet<Vec<i64>> =
            integral_tropical_hull(&coeffs).into_iter().collect();
        assert_eq!(closure.len(), 7);
        assert_eq!(closure, hull);
    }

    #[test]
    fn under_concentration_breaks_eq1() {
        let coeffs = vec![vec![0, 1, 3], vec![1, 0, 1], vec![1, 1, 0]];
        assert!(!condition_eq1(&coeffs));
        let g = triangle();
        let verts = twist_closure_vertices(&g, &[1, 1, 1], &coeffs).unwrap();
        let closure: BTreeSet<Vec<i64>> = verts.into_iter().map(|(c, _)| c).collect();
        let hull: BTreeSet<Vec<i64>> =
            integral_tropical_hull(&coeffs).into_iter().collect();
        assert!(closure.is_subset(&hull));
        assert!(closure.len() < hull.len());
    }

    #[test]
    fn hull_basics() {
        assert_eq!(integral_tropical_hull(&[vec![2, 5, 4]]), vec![vec![0, 3, 2]]);
        let pts = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        let h = integral_tropical_hull(&pts);
        assert_eq!(h.len(), 7);
        // idempotent
        assert_eq!(integral_tropical_hull(&h), h);
    }
}

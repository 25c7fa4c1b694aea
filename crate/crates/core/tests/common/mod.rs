//! Reference implementations kept deliberately separate from the library:
//! plain `u64` arithmetic, lexicographic exterior bases, and the coordinate
//! ring presented as monomials modulo the ideal of the points.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn inv(a: u64, p: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Full reduction in place; returns pivot columns.
pub fn rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(sel) = (r..rows).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, sel);
        let s = inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * s % p;
        }
        for k in 0..rows {
            if k != r && m[k][c] != 0 {
                let f = m[k][c];
                for col in 0..cols {
                    m[k][col] = (m[k][col] + p - f * m[r][col] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(m: &[Vec<u64>], p: u64) -> usize {
    let mut copy = m.to_vec();
    rref(&mut copy, p).len()
}

/// Exponent vectors of degree `deg` in `vars` variables, lexicographic.
pub fn monomials(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    if vars == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials(vars - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn eval(mono: &[u32], pt: &[u64], p: u64) -> u64 {
    mono.iter().zip(pt).fold(1, |acc, (&e, &x)| (0..e).fold(acc, |a, _| a * x % p))
}

/// `S_j / I_j` with a basis of standard monomials and a normal form for
/// every monomial of degree `j`.
struct QuotientPiece {
    monos: Vec<Vec<u32>>,
    standard: Vec<usize>,
    /// For each monomial, its coordinates on the standard monomials.
    normal_form: Vec<Vec<u64>>,
}

fn quotient_piece(points: &[Vec<u64>], vars: usize, j: u32, p: u64) -> QuotientPiece {
    let monos = monomials(vars, j);
    let cols = monos.len();
    let mut ev: Vec<Vec<u64>> = points.iter().map(|pt| monos.iter().map(|m| eval(m, pt, p)).collect()).collect();
    let piv = rref(&mut ev, p);
    // Kernel of the evaluation map: the degree-j part of the ideal.
    let mut ideal: Vec<Vec<u64>> = Vec::new();
    for f in (0..cols).filter(|c| !piv.contains(c)) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (k, &pc) in piv.iter().enumerate() {
            v[pc] = (p - ev[k][f]) % p;
        }
        ideal.push(v);
    }
    let lead = if ideal.is_empty() { Vec::new() } else { rref(&mut ideal, p) };
    let standard: Vec<usize> = (0..cols).filter(|c| !lead.contains(c)).collect();
    let normal_form = (0..cols)
        .map(|c| {
            if let Some(pos) = standard.iter().position(|&s| s == c) {
                let mut v = vec![0u64; standard.len()];
                v[pos] = 1;
                v
            } else {
                let row = &ideal[lead.iter().position(|&l| l == c).unwrap()];
                standard.iter().map(|&s| (p - row[s]) % p).collect()
            }
        })
        .collect();
    QuotientPiece { monos, standard, normal_form }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n - first - 1, k - 1) {
            let mut s = vec![first];
            s.extend(rest.into_iter().map(|x| x + first + 1));
            out.push(s);
        }
    }
    out
}

/// Matrix of `∧^i V ⊗ Q_j → ∧^{i-1} V ⊗ Q_{j+1}`, rows indexed by target.
fn differential(pieces: &[QuotientPiece], vars: usize, i: usize, j: usize, p: u64) -> Vec<Vec<u64>> {
    let src_wedge = subsets(vars, i);
    let tgt_wedge = subsets(vars, i - 1);
    let (src, tgt) = (&pieces[j], &pieces[j + 1]);
    let tdim = tgt.standard.len();
    let mut m = vec![vec![0u64; src_wedge.len() * src.standard.len()]; tgt_wedge.len() * tdim];
    for (a, s) in src_wedge.iter().enumerate() {
        for (b, &mono_idx) in src.standard.iter().enumerate() {
            let col = a * src.standard.len() + b;
            for (k, &var) in s.iter().enumerate() {
                let mut face = s.clone();
                face.remove(k);
                let t = tgt_wedge.iter().position(|x| *x == face).unwrap();
                let mut up = src.monos[mono_idx].clone();
                up[var] += 1;
                let target_mono = tgt.monos.iter().position(|x| *x == up).unwrap();
                let sign = if k % 2 == 0 { 1 } else { p - 1 };
                for (c, &coef) in tgt.normal_form[target_mono].iter().enumerate() {
                    let row = t * tdim + c;
                    m[row][col] = (m[row][col] + sign * coef) % p;
                }
            }
        }
    }
    m
}

fn choose(n: usize, k: usize) -> usize {
    subsets(n, k).len()
}

/// Betti table `b[j][i]` of the coordinate ring of `points` in `P^n`,
/// rows `0..=rows`, columns `0..=n+1`.
pub fn naive_betti_table(points: &[Vec<u64>], n: usize, p: u64, rows: usize) -> Vec<Vec<usize>> {
    let vars = n + 1;
    let pieces: Vec<QuotientPiece> = (0..=rows as u32 + 1).map(|j| quotient_piece(points, vars, j, p)).collect();
    let rank_d = |i: usize, j: i64| -> usize {
        if i == 0 || i > vars || j < 0 {
            0
        } else {
            rank(&differential(&pieces, vars, i, j as usize, p), p)
        }
    };
    (0..=rows)
        .map(|j| {
            (0..=vars)
                .map(|i| {
                    let dim = choose(vars, i) * pieces[j].standard.len();
                    dim - rank_d(i, j as i64) - rank_d(i + 1, j as i64 - 1)
                })
                .collect()
        })
        .collect()
}

/// `count` distinct normalized points of `P^n(F_p)`. When `collinear` is
/// positive, that many of them lie on the line through two fixed points.
pub fn random_points(n: usize, count: usize, p: u64, seed: u64, collinear: usize) -> Vec<Vec<u64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let normalize = |mut v: Vec<u64>| -> Option<Vec<u64>> {
        let lead = *v.iter().find(|&&x| x != 0)?;
        let s = inv(lead, p);
        v.iter_mut().for_each(|x| *x = *x * s % p);
        Some(v)
    };
    let mut pts: Vec<Vec<u64>> = Vec::new();
    let a: Vec<u64> = (0..=n).map(|_| rng.gen_range(0..p)).collect();
    let b: Vec<u64> = (0..=n).map(|_| rng.gen_range(0..p)).collect();
    let mut guard = 0;
    while pts.len() < collinear.min(count) && guard < 10_000 {
        guard += 1;
        let (s, t) = (rng.gen_range(0..p), rng.gen_range(0..p));
        let v = a.iter().zip(&b).map(|(&x, &y)| (s * x + t * y) % p).collect();
        if let Some(v) = normalize(v) {
            if !pts.contains(&v) {
                pts.push(v);
            }
        }
    }
    while pts.len() < count {
        if let Some(v) = normalize((0..=n).map(|_| rng.gen_range(0..p)).collect()) {
            if !pts.contains(&v) {
                pts.push(v);
            }
        }
    }
    pts
}

/// Library diagram of the same points, as plain rows.
pub fn library_betti_table(points: &[Vec<u64>], n: usize, p: u64, rows: u32) -> Vec<Vec<usize>> {
    let modulus = mrclab_core::ffla::PrimeModulus::new(p).unwrap();
    let coords: Vec<Vec<i64>> = points.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect();
    let set = mrclab_core::curves::EmbeddedPointSet::from_coordinates(n, modulus, &coords, Default::default()).unwrap();
    mrclab_core::koszul::betti_diagram(&set, rows).rows().to_vec()
}

/// Pascal-triangle binomial as `i128`, zero outside `0 ≤ k ≤ n`.
pub fn pascal(n: i64, k: i64) -> i128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let mut row = vec![1i128];
    for _ in 0..n {
        let mut next = vec![1i128; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row[k as usize]
}

//! Worked examples shared by the tests, the acceptance suite, the CLI
//! golden emitter and the benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactcore::{epsilon, rat, sign_pow, ExactMatrix, ExactScalar, Field, Flag};
use crate::hlcohomology::DifferentialPBHL;
use crate::hodgelefschetz::{BigradedHL, Piece};
use crate::sncdegeneration::{DegenerationSpec, GysinWeights, MapData, OperatorData, StratumData};
use crate::weightfilt::jordan_nilpotent;

fn sc(v: i64) -> ExactScalar {
    ExactScalar::from_int(v)
}

/// A nilpotent matrix `P J P⁻¹` with `J` the Jordan form of a random
/// partition of `dim` and `P` a random unimodular matrix over `ℤ[i]`.
/// Returns the matrix and the partition.
pub fn random_nilpotent(seed: u64, dim: usize) -> (ExactMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut partition = Vec::new();
    let mut left = dim;
    while left > 0 {
        let part = rng.gen_range(1..=left);
        partition.push(part);
        left -= part;
    }
    partition.sort_unstable_by(|a, b| b.cmp(a));
    let j = jordan_nilpotent(&partition);
    let mut lower = ExactMatrix::identity(dim);
    let mut upper = ExactMatrix::identity(dim);
    for r in 0..dim {
        for c in 0..r {
            lower.set(r, c, ExactScalar::new(rat(rng.gen_range(-2..=2), 1), rat(rng.gen_range(-1..=1), 1)));
            upper.set(c, r, ExactScalar::from_int(rng.gen_range(-2..=2)));
        }
    }
    let p = lower.mul(&upper);
    let n = p.mul(&j).mul(&p.inverse().expect("unimodular"));
    (n, partition)
}

/// Every partition of `d`, largest part first.
pub fn partitions(d: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=left.min(max)).rev() {
            prefix.push(part);
            go(left - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, d, &mut Vec::new(), &mut out);
    out
}

/// Cohomology of a compact Kähler manifold in a Hodge basis: per degree the
/// Hodge level of each basis vector, the Lefschetz map `H^m → H^{m+2}` and
/// the Gram matrix of `B` on `H^m × H^{2d−m}`.
#[derive(Clone, Debug)]
struct Coh {
    d: usize,
    levels: Vec<Vec<i64>>,
    lef: Vec<ExactMatrix>,
    pair: Vec<ExactMatrix>,
}

impl Coh {
    fn betti(&self, m: usize) -> usize {
        self.levels.get(m).map_or(0, Vec::len)
    }

    fn points(count: usize) -> Coh {
        Coh { d: 0, levels: vec![vec![0; count]], lef: vec![ExactMatrix::zeros(0, count)], pair: vec![ExactMatrix::identity(count)] }
    }

    /// Genus-`g` curve with `H^1` basis `ω_1, ω̄_1, …`; `B(1, u) = 1` for the
    /// point class `u`.
    fn curve(g: usize) -> Coh {
        let h1: Vec<i64> = (0..g).flat_map(|_| [1, 0]).collect();
        let b1: Vec<ExactScalar> = (0..g).flat_map(|_| [sc(1), sc(-1)]).collect();
        Coh {
            d: 1,
            levels: vec![vec![0], h1, vec![1]],
            lef: vec![ExactMatrix::identity(1), ExactMatrix::zeros(0, 2 * g), ExactMatrix::zeros(0, 1)],
            pair: vec![ExactMatrix::identity(1), ExactMatrix::diagonal(&b1), ExactMatrix::identity(1).neg()],
        }
    }

    /// Basis of `H^m(Y × P^a)`: `y ⊗ h^s` ordered by `s`, then by `y`.
    fn index(&self, m: usize, a: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for s in 0..=a {
            if 2 * s <= m {
                for i in 0..self.betti(m - 2 * s) {
                    out.push((s, m - 2 * s, i));
                }
            }
        }
        out
    }

    /// `Y × P^a` with `h = c_1(O(1))`; `B_P(h^s, h^{a−s}) = ε(a+1)(−1)^{a−s}`
    /// and `B = (−1)^{d a} B_Y ⊗ B_P`, which is valid because `P^a` has only
    /// even cohomology.
    fn times_projective(&self, a: usize) -> Coh {
        if a == 0 {
            return self.clone();
        }
        let d = self.d + a;
        let idx: Vec<Vec<(usize, usize, usize)>> = (0..=2 * d).map(|m| self.index(m, a)).collect();
        let pos = |m: usize, key: (usize, usize, usize)| idx[m].iter().position(|&x| x == key);
        let mut levels = Vec::new();
        let mut lef = Vec::new();
        let mut pair = Vec::new();
        for m in 0..=2 * d {
            levels.push(idx[m].iter().map(|&(s, my, i)| self.levels[my][i] + s as i64).collect());
            let target = idx.get(m + 2).map_or(0, Vec::len);
            let mut l = ExactMatrix::zeros(target, idx[m].len());
            for (c, &(s, my, i)) in idx[m].iter().enumerate() {
                if let Some(ly) = self.lef.get(my) {
                    for r2 in 0..ly.rows() {
                        let v = ly.get(r2, i).clone();
                        if !v.is_zero() {
                            let r = pos(m + 2, (s, my + 2, r2)).expect("Lefschetz target exists");
                            l.set(r, c, v);
                        }
                    }
                }
                if s < a {
                    let r = pos(m + 2, (s + 1, my, i)).expect("h-multiple exists");
                    *l.get_mut(r, c) = l.get(r, c).clone() + sc(1);
                }
            }
            lef.push(l);
            let dual = 2 * d - m;
            let mut b = ExactMatrix::zeros(idx[m].len(), idx[dual].len());
            for (r, &(s, my, i)) in idx[m].iter().enumerate() {
                for i2 in 0..self.betti(2 * self.d - my) {
                    let Some(c) = pos(dual, (a - s, 2 * self.d - my, i2)) else { continue };
                    let sign = sign_pow((self.d * a) as i64) * epsilon(a as i64 + 1) * sign_pow((a - s) as i64);
                    b.set(r, c, self.pair[my].get(i, i2).clone() * sc(sign));
                }
            }
            pair.push(b);
        }
        Coh { d, levels, lef, pair }
    }

    /// `f ⊗ id` for a degree-preserving (`shift = 0`) or degree-raising map
    /// given per degree of the `Y` factor.
    fn tensor_map(src: &Coh, dst: &Coh, base: &[ExactMatrix], base_src: &Coh, base_dst: &Coh, a: usize, m: usize, shift: usize) -> ExactMatrix {
        let from = base_src.index(m, a);
        let to = base_dst.index(m + shift, a);
        debug_assert_eq!(from.len(), src.betti(m));
        debug_assert_eq!(to.len(), dst.betti(m + shift));
        let mut out = ExactMatrix::zeros(to.len(), from.len());
        for (c, &(s, my, i)) in from.iter().enumerate() {
            let Some(f) = base.get(my) else { continue };
            for r2 in 0..f.rows() {
                if let Some(r) = to.iter().position(|&x| x == (s, my + shift, r2)) {
                    out.set(r, c, f.get(r2, i).clone());
                }
            }
        }
        out
    }

    fn hodge(&self) -> Vec<Vec<usize>> {
        self.levels
            .iter()
            .enumerate()
            .map(|(m, ls)| (0..=m as i64).map(|p| ls.iter().filter(|&&x| x == p).count()).collect())
            .collect()
    }
}

/// One irreducible component of a curve degeneration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Curve {
    pub genus: usize,
    pub mult: u32,
}

/// Central fiber whose components are the given curves meeting transversally
/// in one point per listed edge (repeated edges meet several times), all
/// multiplied by `P^a`. Carries Hodge, Lefschetz and pairing data.
pub fn graph_degeneration(curves: &[Curve], edges: &[(u32, u32)], a: usize) -> DegenerationSpec {
    let mut count = std::collections::BTreeMap::<(u32, u32), usize>::new();
    for &(x, y) in edges {
        assert!(x != y, "a component cannot meet itself");
        *count.entry((x.min(y), x.max(y))).or_default() += 1;
    }
    let mut strata = Vec::new();
    let mut maps = Vec::new();
    let mut lefschetz = Vec::new();
    let mut pairings = Vec::new();
    let mut push = |j: Vec<u32>, coh: &Coh, strata: &mut Vec<StratumData>| {
        strata.push(StratumData {
            j: j.clone(),
            dim: Some(coh.d),
            betti: (0..=2 * coh.d).map(|m| coh.betti(m)).collect(),
            hodge: Some(coh.hodge()),
            alpha: Default::default(),
            f: Some(coh.levels.clone()),
        });
        for m in 0..=2 * coh.d {
            if coh.betti(m) > 0 && coh.betti(m + 2) > 0 {
                lefschetz.push(OperatorData { j: j.clone(), degree: m, alpha: Default::default(), matrix: coh.lef[m].clone() });
            }
            if coh.betti(m) > 0 && m <= coh.d {
                pairings.push(OperatorData { j: j.clone(), degree: m, alpha: Default::default(), matrix: coh.pair[m].clone() });
            }
        }
    };
    let curve_coh: Vec<(Coh, Coh)> = curves.iter().map(|c| (Coh::curve(c.genus), Coh::curve(c.genus).times_projective(a))).collect();
    for (i, (_, full)) in curve_coh.iter().enumerate() {
        push(vec![i as u32], full, &mut strata);
    }
    for (&(x, y), &e) in &count {
        let (pts, pts_full) = (Coh::points(e), Coh::points(e).times_projective(a));
        push(vec![x, y], &pts_full, &mut strata);
        let ones_col = ExactMatrix::from_columns(e, &[vec![sc(1); e]]);
        for from in [x, y] {
            let (base, full) = &curve_coh[from as usize];
            let rho = [ones_col.clone()];
            let gamma = [ones_col.transpose()];
            for m in 0..=2 * pts_full.d {
                if pts_full.betti(m) == 0 {
                    continue;
                }
                let restriction = (full.betti(m) > 0).then(|| Coh::tensor_map(full, &pts_full, &rho, base, &pts, a, m, 0));
                let gysin = (full.betti(m + 2) > 0).then(|| Coh::tensor_map(&pts_full, full, &gamma, &pts, base, a, m, 2));
                maps.push(MapData { from: vec![from], to: vec![x, y], degree: m, alpha: Default::default(), restriction, gysin });
            }
        }
    }
    DegenerationSpec {
        rel_dim: 1 + a,
        components: (0..curves.len() as u32).collect(),
        multiplicities: curves.iter().map(|c| c.mult).collect(),
        strata,
        maps,
        lefschetz,
        pairings,
        gysin_weights: GysinWeights::Unit,
    }
}

/// Reduced Kodaira fiber `I_N`: a cycle of `N ≥ 2` rational curves.
pub fn kodaira(n: u32) -> DegenerationSpec {
    let curves = vec![Curve { genus: 0, mult: 1 }; n as usize];
    let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph_degeneration(&curves, &edges, 0)
}

/// Two rational curves of multiplicities 2 and 3 meeting in one point.
pub fn two_three() -> DegenerationSpec {
    graph_degeneration(&[Curve { genus: 0, mult: 2 }, Curve { genus: 0, mult: 3 }], &[(0, 1)], 0)
}

/// A bigraded structure described basis vector by basis vector, before the
/// basis is sorted into pieces.
#[derive(Clone, Debug)]
struct Model {
    n: i64,
    grade: Vec<(i64, i64)>,
    level: Vec<i64>,
    x1: ExactMatrix,
    y2: ExactMatrix,
    s: ExactMatrix,
    d: ExactMatrix,
}

impl Model {
    fn dim(&self) -> usize {
        self.grade.len()
    }

    /// `P^a` as a pure-`l` irreducible: `h^s` at `l = 2s − a`.
    fn projective(a: usize) -> Model {
        let b = Coh::points(1).times_projective(a);
        let dim = a + 1;
        let mut x1 = ExactMatrix::zeros(dim, dim);
        let mut s = ExactMatrix::zeros(dim, dim);
        for i in 0..dim {
            if i + 1 < dim {
                x1.set(i + 1, i, sc(1));
            }
            let l = 2 * i as i64 - a as i64;
            let sign = epsilon(l) * sign_pow(l * a as i64);
            s.set(i, a - i, b.pair[2 * i].get(0, 0).clone() * sc(sign));
        }
        Model {
            n: a as i64,
            grade: (0..dim).map(|i| (2 * i as i64 - a as i64, 0)).collect(),
            level: (0..dim as i64).collect(),
            x1,
            y2: ExactMatrix::zeros(dim, dim),
            s,
            d: ExactMatrix::zeros(dim, dim),
        }
    }

    /// A pure-`k` irreducible of length `b + 1`, as contributed by a point
    /// where `b + 1` components meet: `e_i` at `k = b − 2i`, `Y2 e_i = e_{i+1}`.
    fn string(b: usize) -> Model {
        let dim = b + 1;
        let mut y2 = ExactMatrix::zeros(dim, dim);
        let mut s = ExactMatrix::zeros(dim, dim);
        for i in 0..dim {
            if i + 1 < dim {
                y2.set(i + 1, i, sc(1));
            }
            s.set(i, b - i, sc(1));
        }
        Model {
            n: b as i64,
            grade: (0..dim).map(|i| (0, b as i64 - 2 * i as i64)).collect(),
            level: (0..dim as i64).map(|i| b as i64 - i).collect(),
            x1: ExactMatrix::zeros(dim, dim),
            y2,
            s,
            d: ExactMatrix::zeros(dim, dim),
        }
    }

    /// Acyclic square: `d e1 = λ e4`, `d e3 = −λ̄ e2` over the pieces
    /// `(−1,0), (1,0), (0,1), (0,−1)`.
    fn square(lambda: &ExactScalar) -> Model {
        let mut x1 = ExactMatrix::zeros(4, 4);
        x1.set(1, 0, sc(1));
        let mut y2 = ExactMatrix::zeros(4, 4);
        y2.set(3, 2, sc(1));
        let mut d = ExactMatrix::zeros(4, 4);
        d.set(3, 0, lambda.clone());
        d.set(1, 2, -lambda.conj());
        Model {
            n: 1,
            grade: vec![(-1, 0), (1, 0), (0, 1), (0, -1)],
            level: vec![0, 1, 1, 0],
            x1,
            y2,
            s: ExactMatrix::from_i64_rows(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]),
            d,
        }
    }

    /// `self ⊗ other` with `S = σ · S_1 ⊗ S_2`, `σ = (−1)^{(l_1+n_1)(l_2+n_2) + k_1 k_2}`
    /// and `d = d_1 ⊗ 1`. The differential of `other` must vanish and
    /// `l + n + k` must be even on all of `other`.
    fn tensor(&self, other: &Model) -> Model {
        assert!(other.d.is_zero());
        assert!(other.grade.iter().all(|&(l, k)| (l + other.n + k) % 2 == 0));
        let (p, q) = (self.dim(), other.dim());
        let kron = |a: &ExactMatrix, b: &ExactMatrix| {
            let mut out = ExactMatrix::zeros(p * q, p * q);
            for i in 0..p {
                for j in 0..p {
                    if a.get(i, j).is_zero() {
                        continue;
                    }
                    out.set_block(i * q, j * q, &b.scale(a.get(i, j)));
                }
            }
            out
        };
        let (ia, ib) = (ExactMatrix::identity(p), ExactMatrix::identity(q));
        let mut s = kron(&self.s, &other.s);
        let mut grade = Vec::new();
        let mut level = Vec::new();
        for i in 0..p {
            for j in 0..q {
                let ((l1, k1), (l2, k2)) = (self.grade[i], other.grade[j]);
                grade.push((l1 + l2, k1 + k2));
                level.push(self.level[i] + other.level[j]);
                let sigma = sign_pow((l1 + self.n) * (l2 + other.n) + k1 * k2);
                if sigma < 0 {
                    for c in 0..p * q {
                        let v = -s.get(i * q + j, c).clone();
                        s.set(i * q + j, c, v);
                    }
                }
            }
        }
        Model {
            n: self.n + other.n,
            grade,
            level,
            x1: kron(&self.x1, &ib).add(&kron(&ia, &other.x1)),
            y2: kron(&self.y2, &ib).add(&kron(&ia, &other.y2)),
            s,
            d: kron(&self.d, &ib),
        }
    }

    fn direct_sum(&self, other: &Model) -> Model {
        assert_eq!(self.n, other.n);
        let bd = |a: &ExactMatrix, b: &ExactMatrix| ExactMatrix::block_diag(&[a.clone(), b.clone()]);
        Model {
            n: self.n,
            grade: self.grade.iter().chain(&other.grade).copied().collect(),
            level: self.level.iter().chain(&other.level).copied().collect(),
            x1: bd(&self.x1, &other.x1),
            y2: bd(&self.y2, &other.y2),
            s: bd(&self.s, &other.s),
            d: bd(&self.d, &other.d),
        }
    }

    /// Sorts the basis into pieces ordered by `(l, k)`.
    fn build(&self) -> crate::Result<DifferentialPBHL> {
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&i| self.grade[i]);
        let mut pieces: Vec<Piece> = Vec::new();
        for &i in &order {
            let (l, k) = self.grade[i];
            match pieces.last_mut() {
                Some(p) if (p.l, p.k) == (l, k) => p.dim += 1,
                _ => pieces.push(Piece { l, k, dim: 1 }),
            }
        }
        let perm = |m: &ExactMatrix| ExactMatrix::from_rows(dim, order.iter().map(|&r| order.iter().map(|&c| m.get(r, c).clone()).collect()).collect());
        let levels: Vec<(i64, Vec<ExactScalar>)> = order
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let mut v = vec![sc(0); dim];
                v[pos] = sc(1);
                (self.level[i], v)
            })
            .collect();
        let f = Flag::decreasing_from_levels(dim, &levels);
        let base = BigradedHL::new(self.n, pieces, perm(&self.x1), perm(&self.y2), f, perm(&self.s))?;
        DifferentialPBHL::new(base, perm(&self.d))
    }
}

/// Differential structures built as `(square(λ) ⊕ P^{a+1}… ) ⊗ P^a ⊗ string(b)`
/// style products, with a name for each.
pub fn pbhl_fixtures() -> Vec<(String, DifferentialPBHL)> {
    let lambdas: [(&str, ExactScalar); 3] =
        [("1", sc(1)), ("i", ExactScalar::i()), ("2/3+1/5i", ExactScalar::new(crate::exactcore::rat(2, 3), crate::exactcore::rat(1, 5)))];
    let mut out = Vec::new();
    for (name, lambda) in &lambdas {
        for a in 0..=2 {
            for b in 0..=1 {
                let factor = Model::projective(a).tensor(&Model::string(b));
                let acyclic = Model::square(lambda).tensor(&factor);
                let pure = Model::projective(1).tensor(&factor);
                let m = acyclic.direct_sum(&pure);
                let dp = m.build().unwrap_or_else(|e| panic!("fixture λ={name} a={a} b={b}: {e}"));
                out.push((format!("square[{name}] x P{a} x string{b} + P1 x P{a} x string{b}"), dp));
            }
        }
    }
    out
}

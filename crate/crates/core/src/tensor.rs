//! Dense semiring tensors with contraction and product.
//!
//! A tensor here is a total function from a pair of index vectors (inputs,
//! outputs) into a semiring, stored as a dense table over a finite index
//! set. Sequential composition of processes is tensor contraction,
//! parallel composition is the entrywise product. Everything else in the
//! crate is ultimately checked against this module.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{Fp, Semiring};

/// An explicitly enumerated finite index set; tensors sum over its values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexSet(Vec<u64>);

/// An assignment of one index-set value per wire.
pub type IndexVector = Vec<u64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("index set must be nonempty and duplicate-free")]
    InvalidIndexSet,
    #[error(
        "contraction arity mismatch: left has {left_out} outputs, right has {right_in} inputs"
    )]
    MiddleArity { left_out: usize, right_in: usize },
    #[error("tensors range over different index sets")]
    IndexSetMismatch,
}

impl IndexSet {
    pub fn new(values: Vec<u64>) -> Result<Self, TensorError> {
        if values.is_empty() {
            return Err(TensorError::InvalidIndexSet);
        }
        let mut seen = values.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != values.len() {
            return Err(TensorError::InvalidIndexSet);
        }
        Ok(IndexSet(values))
    }

    /// The two-valued index set `{0, 1}` used throughout the qubit examples.
    pub fn qubit() -> Self {
        IndexSet(vec![0, 1])
    }

    /// The index set `{0, .., d-1}`.
    pub fn of_size(d: usize) -> Self {
        assert!(d > 0, "index set must be nonempty");
        IndexSet((0..d as u64).collect())
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    fn position(&self, value: u64) -> Option<usize> {
        self.0.iter().position(|&v| v == value)
    }

    /// Visit every vector of the given length over this set, in
    /// lexicographic order of positions (first coordinate slowest).
    pub fn for_each_vector(&self, len: usize, mut visit: impl FnMut(&[u64])) {
        let d = self.size();
        let mut positions = vec![0usize; len];
        let mut vector: Vec<u64> = vec![self.0[0]; len];
        loop {
            visit(&vector);
            // odometer increment, last coordinate fastest
            let mut k = len;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                positions[k] += 1;
                if positions[k] < d {
                    vector[k] = self.0[positions[k]];
                    break;
                }
                positions[k] = 0;
                vector[k] = self.0[0];
            }
        }
    }

    /// All vectors of the given length, collected.
    pub fn vectors(&self, len: usize) -> Vec<IndexVector> {
        let mut out = Vec::with_capacity(self.size().pow(len as u32));
        self.for_each_vector(len, |v| out.push(v.to_vec()));
        out
    }
}

/// A dense tensor with `n_in` input wires and `n_out` output wires.
#[derive(Clone, PartialEq, Debug)]
pub struct Tensor<S> {
    n_in: usize,
    n_out: usize,
    index: IndexSet,
    /// Row-major over the concatenated (inputs ++ outputs) positions,
    /// covering exactly `|A|^(n_in + n_out)` entries.
    table: Vec<S>,
}

impl<S: Semiring> Tensor<S> {
    /// Build a tensor by evaluating `entry` on every (inputs, outputs) pair.
    pub fn from_fn(
        n_in: usize,
        n_out: usize,
        index: &IndexSet,
        mut entry: impl FnMut(&[u64], &[u64]) -> S,
    ) -> Self {
        let mut table = Vec::with_capacity(index.size().pow((n_in + n_out) as u32));
        index.for_each_vector(n_in + n_out, |v| {
            table.push(entry(&v[..n_in], &v[n_in..]));
        });
        Tensor { n_in, n_out, index: index.clone(), table }
    }

    pub fn zero(n_in: usize, n_out: usize, index: &IndexSet) -> Self {
        Tensor::from_fn(n_in, n_out, index, |_, _| S::zero())
    }

    /// The 0 -> 0 tensor holding a single scalar.
    pub fn scalar(value: S, index: &IndexSet) -> Self {
        Tensor { n_in: 0, n_out: 0, index: index.clone(), table: vec![value] }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }

    fn offset(&self, inputs: &[u64], outputs: &[u64]) -> usize {
        assert_eq!(inputs.len(), self.n_in, "input arity mismatch");
        assert_eq!(outputs.len(), self.n_out, "output arity mismatch");
        let d = self.index.size();
        let mut off = 0usize;
        for &v in inputs.iter().chain(outputs) {
            let pos = self
                .index
                .position(v)
                .unwrap_or_else(|| panic!("index value {v} not in the index set"));
            off = off * d + pos;
        }
        off
    }

    /// Look up one entry. Panics on arity mismatch or foreign index values;
    /// shape errors are surfaced by the operations, not by lookups.
    pub fn entry(&self, inputs: &[u64], outputs: &[u64]) -> &S {
        &self.table[self.offset(inputs, outputs)]
    }

    /// Entrywise equivalence. Mismatched shapes or index sets are `false`,
    /// not an error.
    pub fn equiv(&self, other: &Self) -> bool {
        self.equiv_by(other, S::equiv)
    }

    /// Entrywise equivalence under a caller-supplied scalar test, for
    /// callers that need a different tolerance.
    pub fn equiv_by(&self, other: &Self, eq: impl Fn(&S, &S) -> bool) -> bool {
        self.n_in == other.n_in
            && self.n_out == other.n_out
            && self.index == other.index
            && self.table.iter().zip(&other.table).all(|(a, b)| eq(a, b))
    }

    /// Sequential composition: sum over the shared middle index vector.
    pub fn contract(&self, other: &Self) -> Result<Self, TensorError> {
        if self.n_out != other.n_in {
            return Err(TensorError::MiddleArity { left_out: self.n_out, right_in: other.n_in });
        }
        if self.index != other.index {
            return Err(TensorError::IndexSetMismatch);
        }
        let middle = self.n_out;
        let result = Tensor::from_fn(self.n_in, other.n_out, &self.index, |i, o| {
            let mut acc = S::zero();
            self.index.for_each_vector(middle, |j| {
                acc = acc + *self.entry(i, j) * *other.entry(j, o);
            });
            acc
        });
        Ok(result)
    }

    /// Parallel composition: entries multiply on concatenated indices.
    /// Both operands must range over the same index set.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.index, other.index, "tensor product over mismatched index sets");
        let (n1, m1) = (self.n_in, self.n_out);
        Tensor::from_fn(self.n_in + other.n_in, self.n_out + other.n_out, &self.index, |i, o| {
            *self.entry(&i[..n1], &o[..m1]) * *other.entry(&i[n1..], &o[m1..])
        })
    }

    /// Map every entry, keeping the shape.
    pub fn map<T: Semiring>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor {
            n_in: self.n_in,
            n_out: self.n_out,
            index: self.index.clone(),
            table: self.table.iter().map(f).collect(),
        }
    }

    /// Entries in table order (inputs vary slowest).
    pub fn entries(&self) -> &[S] {
        &self.table
    }
}

/// The Kronecker delta on `n` wires: 1 where inputs equal outputs.
pub fn delta<S: Semiring>(n: usize, index: &IndexSet) -> Tensor<S> {
    Tensor::from_fn(n, n, index, |i, o| if i == o { S::one() } else { S::zero() })
}

/// The braid on `n + m` wires: the first `n` inputs exit last.
pub fn swap_tensor<S: Semiring>(n: usize, m: usize, index: &IndexSet) -> Tensor<S> {
    Tensor::from_fn(n + m, m + n, index, |i, o| {
        if i[..n] == o[m..] && i[n..] == o[..m] {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// The cup on `n` wires: 0 -> 2n, forcing both output halves equal.
pub fn cup_tensor<S: Semiring>(n: usize, index: &IndexSet) -> Tensor<S> {
    Tensor::from_fn(0, 2 * n, index, |_, o| if o[..n] == o[n..] { S::one() } else { S::zero() })
}

/// The cap on `n` wires: 2n -> 0, forcing both input halves equal.
pub fn cap_tensor<S: Semiring>(n: usize, index: &IndexSet) -> Tensor<S> {
    Tensor::from_fn(2 * n, 0, index, |i, _| if i[..n] == i[n..] { S::one() } else { S::zero() })
}

/// A tensor family defined at every (inputs, outputs) shape.
///
/// Fixed-shape tensors lift by being zero at every other shape; generator
/// formulas (spiders, seeded random tables) can fill every shape.
#[derive(Clone)]
pub struct DimensionlessTensor<S> {
    index: IndexSet,
    rule: Arc<dyn Fn(usize, usize) -> Tensor<S> + Send + Sync>,
}

impl<S: Semiring> DimensionlessTensor<S> {
    pub fn from_rule(
        index: IndexSet,
        rule: impl Fn(usize, usize) -> Tensor<S> + Send + Sync + 'static,
    ) -> Self {
        DimensionlessTensor { index, rule: Arc::new(rule) }
    }

    /// Lift a fixed tensor: itself at its own shape, zero elsewhere.
    pub fn from_tensor(tensor: Tensor<S>) -> Self {
        let index = tensor.index_set().clone();
        DimensionlessTensor::from_rule(index.clone(), move |n, m| {
            if n == tensor.n_in() && m == tensor.n_out() {
                tensor.clone()
            } else {
                Tensor::zero(n, m, &index)
            }
        })
    }

    pub fn at(&self, n_in: usize, n_out: usize) -> Tensor<S> {
        (self.rule)(n_in, n_out)
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index
    }
}

impl<S> fmt::Debug for DimensionlessTensor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DimensionlessTensor").field("index", &self.index).finish_non_exhaustive()
    }
}

/// Deterministic pseudo-random field element keyed by a seed, a generator
/// name, and the index vectors. Same key, same value, on every platform.
pub fn seeded_entry<const P: u64>(seed: u64, name: &str, inputs: &[u64], outputs: &[u64]) -> Fp<P> {
    // FNV-1a over the key material, then a splitmix64 finalizer.
    const FNV_OFFSET: u64 = 0xcbf29ce484222325;
    const FNV_PRIME: u64 = 0x100000001b3;
    let mut h = FNV_OFFSET;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(FNV_PRIME);
    };
    for b in seed.to_le_bytes() {
        eat(b);
    }
    for b in name.bytes() {
        eat(b);
    }
    eat(0xff);
    for v in inputs {
        for b in v.to_le_bytes() {
            eat(b);
        }
    }
    eat(0xfe);
    for v in outputs {
        for b in v.to_le_bytes() {
            eat(b);
        }
    }
    let mut z = h.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    Fp::new(z)
}

/// The total tensor family whose entries are seeded hashes of
/// `(seed, name, inputs, outputs)`, at every shape.
pub fn seeded_tensor_family(seed: u64, name: &str, index: &IndexSet) -> DimensionlessTensor<Fp> {
    let name = name.to_owned();
    let idx = index.clone();
    DimensionlessTensor::from_rule(index.clone(), move |n, m| {
        Tensor::from_fn(n, m, &idx, |i, o| seeded_entry(seed, &name, i, o))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cx;
    use num_traits::Zero;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_tensor(rng: &mut StdRng, n: usize, m: usize, index: &IndexSet) -> Tensor<Fp> {
        Tensor::from_fn(n, m, index, |_, _| Fp::new(rng.gen()))
    }

    #[test]
    fn delta_is_diagonal() {
        let a = IndexSet::qubit();
        let d1: Tensor<i64> = delta(1, &a);
        assert_eq!(*d1.entry(&[0], &[0]), 1);
        assert_eq!(*d1.entry(&[0], &[1]), 0);

        let d0: Tensor<i64> = delta(0, &a);
        assert_eq!(*d0.entry(&[], &[]), 1);

        let d2: Tensor<i64> = delta(2, &a);
        let ones: i64 = d2.entries().iter().sum();
        assert_eq!(ones, 4, "exactly the diagonal of a 4x4 table");
    }

    #[test]
    fn delta_is_identity_for_contraction() {
        let a = IndexSet::qubit();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let t = random_tensor(&mut rng, 2, 1, &a);
            assert!(delta(2, &a).contract(&t).unwrap().equiv(&t));
            assert!(t.contract(&delta(1, &a)).unwrap().equiv(&t));
        }
    }

    #[test]
    fn contraction_is_matrix_product() {
        let a = IndexSet::qubit();
        // [[1,2],[3,4]] then [[5,6],[7,8]] as input->output tables
        let t =
            Tensor::<i64>::from_fn(1, 1, &a, |i, o| [[1, 2], [3, 4]][i[0] as usize][o[0] as usize]);
        let g =
            Tensor::<i64>::from_fn(1, 1, &a, |i, o| [[5, 6], [7, 8]][i[0] as usize][o[0] as usize]);
        let c = t.contract(&g).unwrap();
        // hand-multiplied: [[19,22],[43,50]]
        assert_eq!(*c.entry(&[0], &[0]), 19);
        assert_eq!(*c.entry(&[0], &[1]), 22);
        assert_eq!(*c.entry(&[1], &[0]), 43);
        assert_eq!(*c.entry(&[1], &[1]), 50);
    }

    #[test]
    fn contraction_to_scalar() {
        let a = IndexSet::qubit();
        let ket = Tensor::<i64>::from_fn(0, 1, &a, |_, o| o[0] as i64 + 1);
        let bra = Tensor::<i64>::from_fn(1, 0, &a, |i, _| 3 * i[0] as i64 + 1);
        let s = ket.contract(&bra).unwrap();
        assert_eq!(s.n_in(), 0);
        assert_eq!(s.n_out(), 0);
        assert_eq!(*s.entry(&[], &[]), 1 + 2 * 4);
    }

    #[test]
    fn contraction_shape_error() {
        let a = IndexSet::qubit();
        let t: Tensor<i64> = delta(2, &a);
        let g: Tensor<i64> = delta(1, &a);
        assert_eq!(
            t.contract(&g).unwrap_err(),
            TensorError::MiddleArity { left_out: 2, right_in: 1 }
        );
    }

    #[test]
    fn product_of_deltas_is_delta() {
        let a = IndexSet::qubit();
        let d1: Tensor<i64> = delta(1, &a);
        assert_eq!(d1.product(&d1), delta(2, &a));
    }

    #[test]
    fn product_unit_is_scalar_one() {
        let a = IndexSet::qubit();
        let one = Tensor::scalar(1i64, &a);
        let mut rng = StdRng::seed_from_u64(3);
        let t = random_tensor(&mut rng, 1, 2, &a).map(|x| x.value() as i64);
        assert_eq!(one.product(&t), t);
        assert_eq!(t.product(&one), t);
    }

    #[test]
    fn product_is_kronecker() {
        let a = IndexSet::qubit();
        let t =
            Tensor::<i64>::from_fn(1, 1, &a, |i, o| [[1, 2], [3, 4]][i[0] as usize][o[0] as usize]);
        let g =
            Tensor::<i64>::from_fn(1, 1, &a, |i, o| [[5, 6], [7, 8]][i[0] as usize][o[0] as usize]);
        let p = t.product(&g);
        // Kronecker product by hand: entry((i,k),(j,l)) = t[i][j] * g[k][l]
        for i in 0..2u64 {
            for k in 0..2u64 {
                for j in 0..2u64 {
                    for l in 0..2u64 {
                        let expect = [[1, 2], [3, 4]][i as usize][j as usize]
                            * [[5, 6], [7, 8]][k as usize][l as usize];
                        assert_eq!(*p.entry(&[i, k], &[j, l]), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn equiv_basics() {
        let a = IndexSet::qubit();
        let d: Tensor<i64> = delta(1, &a);
        assert!(d.equiv(&d));
        assert!(d.equiv(&swap_tensor(1, 0, &a)), "swap on one wire is the identity");
        let all_one = Tensor::<i64>::from_fn(1, 1, &a, |_, _| 1);
        assert!(!d.equiv(&all_one));
        assert!(!d.equiv(&delta(2, &a)), "arity mismatch is false, not an error");
    }

    #[test]
    fn swap_tensor_shape() {
        let a = IndexSet::qubit();
        let sw: Tensor<i64> = swap_tensor(1, 1, &a);
        for x in 0..2u64 {
            for y in 0..2u64 {
                for o1 in 0..2u64 {
                    for o2 in 0..2u64 {
                        let expect = if o1 == y && o2 == x { 1 } else { 0 };
                        assert_eq!(*sw.entry(&[x, y], &[o1, o2]), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn cup_cap_and_yanking() {
        let a = IndexSet::qubit();
        let cup: Tensor<i64> = cup_tensor(1, &a);
        assert_eq!(*cup.entry(&[], &[0, 0]), 1);
        assert_eq!(*cup.entry(&[], &[1, 0]), 0);
        let cup0: Tensor<i64> = cup_tensor(0, &a);
        assert_eq!(*cup0.entry(&[], &[]), 1, "empty cup is the scalar 1");

        // (cup x id) ; (id x cap) == delta(1), the snake equation
        let lhs = cup.product(&delta(1, &a));
        let rhs = delta::<i64>(1, &a).product(&cap_tensor(1, &a));
        let snake = lhs.contract(&rhs).unwrap();
        assert!(snake.equiv(&delta(1, &a)));

        // the mirror image: (id x cup) ; (cap x id) == delta(1)
        let lhs = delta::<i64>(1, &a).product(&cup);
        let rhs = cap_tensor::<i64>(1, &a).product(&delta(1, &a));
        assert!(lhs.contract(&rhs).unwrap().equiv(&delta(1, &a)));
    }

    #[test]
    fn contract_associative_randomized() {
        let a = IndexSet::qubit();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..25 {
            let t = random_tensor(&mut rng, 1, 2, &a);
            let g = random_tensor(&mut rng, 2, 1, &a);
            let h = random_tensor(&mut rng, 1, 2, &a);
            let left = t.contract(&g).unwrap().contract(&h).unwrap();
            let right = t.contract(&g.contract(&h).unwrap()).unwrap();
            assert!(left.equiv(&right));
        }
    }

    #[test]
    fn interchange_law_randomized() {
        let a = IndexSet::qubit();
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..25 {
            let t1 = random_tensor(&mut rng, 1, 2, &a);
            let t2 = random_tensor(&mut rng, 2, 1, &a);
            let g1 = random_tensor(&mut rng, 2, 1, &a);
            let g2 = random_tensor(&mut rng, 1, 1, &a);
            let left = t1.product(&t2).contract(&g1.product(&g2)).unwrap();
            let right = t1.contract(&g1).unwrap().product(&t2.contract(&g2).unwrap());
            assert!(left.equiv(&right));
        }
    }

    #[test]
    fn product_associative_randomized() {
        let a = IndexSet::qubit();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..10 {
            let t = random_tensor(&mut rng, 1, 1, &a);
            let g = random_tensor(&mut rng, 0, 1, &a);
            let h = random_tensor(&mut rng, 1, 0, &a);
            assert!(t.product(&g).product(&h).equiv(&t.product(&g.product(&h))));
        }
    }

    #[test]
    fn seeded_entries_deterministic() {
        let e1: Fp = seeded_entry(42, "m", &[0, 1], &[1]);
        let e2: Fp = seeded_entry(42, "m", &[0, 1], &[1]);
        assert_eq!(e1, e2);
        let f = seeded_tensor_family(42, "m", &IndexSet::qubit());
        assert!(f.at(2, 1).equiv(&f.at(2, 1)), "same shape twice agrees");
    }

    #[test]
    fn seeded_tables_differ_across_seeds() {
        let a = IndexSet::qubit();
        let t1 = seeded_tensor_family(1, "g", &a).at(1, 1);
        let t2 = seeded_tensor_family(2, "g", &a).at(1, 1);
        assert!(!t1.equiv(&t2));
    }

    #[test]
    fn seeded_scalar_generator_has_one_entry() {
        let f = seeded_tensor_family(5, "k", &IndexSet::qubit());
        assert_eq!(f.at(0, 0).entries().len(), 1);
    }

    #[test]
    fn dimensionless_lift_is_zero_elsewhere() {
        let a = IndexSet::qubit();
        let lifted = DimensionlessTensor::from_tensor(delta::<i64>(1, &a));
        assert!(lifted.at(1, 1).equiv(&delta(1, &a)));
        assert!(lifted.at(2, 2).equiv(&Tensor::zero(2, 2, &a)));
    }

    #[test]
    fn complex_tolerance_respected() {
        let a = IndexSet::qubit();
        let t =
            Tensor::<Cx>::from_fn(
                1,
                1,
                &a,
                |i, o| {
                    if i == o {
                        Cx::new(1.0, 0.0)
                    } else {
                        Cx::zero()
                    }
                },
            );
        let nudged = t.map(|z| Cx(z.0 + num_complex::Complex64::new(1e-12, 0.0)));
        assert!(t.equiv(&nudged));
        let off = t.map(|z| Cx(z.0 + num_complex::Complex64::new(1e-3, 0.0)));
        assert!(!t.equiv(&off));
    }
}

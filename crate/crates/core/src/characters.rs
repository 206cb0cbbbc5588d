//! Exact characters in Q(ζ_p): Kirillov characters of orbits, inner products
//! and character tables.
//!
//! A [`ClassFunction`] stores one value per group element (in canonical code
//! order) as integer coefficients on `1, ζ, …, ζ^{p-2}` over a single
//! positive common denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coadjoint::{bfs, DualMatrix, DualVector, Orbit, OrbitPartition, orbit_partition};
use crate::error::{ensure_invariant, Error, Result};
use crate::field::CyclotomicNumber;
use crate::linalg::unit;
use crate::nilalg::{AlgebraId, LieAlgebra};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    algebra: AlgebraId,
    p: u32,
    numerators: Vec<i64>,
    denominator: i64,
}

/// Reduces counts on all p powers of ζ to the basis `1, …, ζ^{p-2}`.
#[inline]
fn reduce_counts(counts: &[i64], out: &mut [i64]) {
    let top = counts[counts.len() - 1];
    for (o, &c) in out.iter_mut().zip(counts) {
        *o = c - top;
    }
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Invariant("class function coefficient overflows i64".into()))
}

impl ClassFunction {
    fn normalized(algebra: AlgebraId, p: u32, mut numerators: Vec<i64>, mut denominator: i64) -> Self {
        if denominator < 0 {
            denominator = -denominator;
            numerators.iter_mut().for_each(|n| *n = -*n);
        }
        let g = numerators.iter().fold(denominator, |acc, &n| acc.gcd(&n));
        if g > 1 {
            numerators.iter_mut().for_each(|n| *n /= g);
            denominator /= g;
        }
        Self {
            algebra,
            p,
            numerators,
            denominator,
        }
    }

    /// `f(u) = (Σ_t counts[u·p + t] ζ^t) / denominator` for each group element `u`.
    pub fn from_power_counts(g: &LieAlgebra, counts: &[i64], denominator: i64) -> Result<Self> {
        let p = g.p() as usize;
        let order = g.order();
        if counts.len() as u128 != order * p as u128 {
            return Err(Error::Shape(format!(
                "expected {} power counts for a group of order {order}, got {}",
                order * p as u128,
                counts.len()
            )));
        }
        if denominator == 0 {
            return Err(Error::Shape("zero denominator".into()));
        }
        let mut numerators = vec![0i64; order as usize * (p - 1)];
        for (chunk, out) in counts.chunks(p).zip(numerators.chunks_mut(p - 1)) {
            reduce_counts(chunk, out);
        }
        Ok(Self::normalized(g.id(), g.p(), numerators, denominator))
    }

    /// The function with value `c` at the identity and 0 elsewhere.
    pub fn delta_at_identity(g: &LieAlgebra, c: i64) -> Self {
        let w = g.p() as usize - 1;
        let mut numerators = vec![0i64; g.order() as usize * w];
        numerators[0] = c;
        Self::normalized(g.id(), g.p(), numerators, 1)
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    fn width(&self) -> usize {
        self.p as usize - 1
    }

    /// Number of group elements.
    pub fn len(&self) -> usize {
        self.numerators.len() / self.width()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// Numerators on `1, …, ζ^{p-2}` at one element, over [`Self::denominator`].
    pub(crate) fn raw(&self, code: usize) -> &[i64] {
        let w = self.width();
        &self.numerators[code * w..(code + 1) * w]
    }

    /// Value at the group element with canonical code `code`.
    pub fn value(&self, code: u64) -> CyclotomicNumber {
        let den = BigInt::from(self.denominator);
        let coeffs = self
            .raw(code as usize)
            .iter()
            .map(|&n| BigRational::new(BigInt::from(n), den.clone()))
            .collect();
        CyclotomicNumber::from_coeffs(self.p, coeffs).expect("prime modulus and basis length")
    }

    pub fn values(&self) -> Vec<CyclotomicNumber> {
        (0..self.len() as u64).map(|c| self.value(c)).collect()
    }

    /// Value at the identity (code 0), which is rational for characters.
    pub fn degree(&self) -> Option<BigRational> {
        self.value(0).as_rational()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra || self.numerators.len() != other.numerators.len() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let p = self.p as usize;
        let w = self.width();
        let mut numerators = vec![0i64; self.numerators.len()];
        let mut acc = vec![0i128; p];
        let mut counts = vec![0i64; p];
        for u in 0..self.len() {
            acc.iter_mut().for_each(|a| *a = 0);
            for (s, &a) in self.raw(u).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (t, &b) in other.raw(u).iter().enumerate() {
                    acc[(s + t) % p] += a as i128 * b as i128;
                }
            }
            for (c, &a) in counts.iter_mut().zip(&acc) {
                *c = to_i64(a)?;
            }
            reduce_counts(&counts, &mut numerators[u * w..(u + 1) * w]);
        }
        let den = self
            .denominator
            .checked_mul(other.denominator)
            .ok_or_else(|| Error::Invariant("denominator overflow".into()))?;
        Ok(Self::normalized(self.algebra, self.p, numerators, den))
    }

    /// Complex conjugate, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let w = self.width();
        let mut numerators = vec![0i64; self.numerators.len()];
        let mut counts = vec![0i64; p];
        for u in 0..self.len() {
            counts.iter_mut().for_each(|c| *c = 0);
            for (t, &a) in self.raw(u).iter().enumerate() {
                counts[(p - t) % p] = a;
            }
            reduce_counts(&counts, &mut numerators[u * w..(u + 1) * w]);
        }
        Self::normalized(self.algebra, self.p, numerators, self.denominator)
    }

    /// True when the function takes one value on each conjugacy class.
    pub fn is_constant_on(&self, classes: &ConjugacyClasses) -> bool {
        classes.algebra == self.algebra
            && classes.index.len() == self.len()
            && (0..self.len()).all(|u| self.raw(u) == self.raw(classes.reps[classes.index[u] as usize] as usize))
    }

    /// Checks `f(h u h⁻¹) = f(u)` for every `u` and every generator
    /// `h = exp(b_i)` of G.
    pub fn is_conjugation_invariant(&self, g: &LieAlgebra) -> Result<bool> {
        if g.id() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let enc = g.encoder();
        let mut x = vec![0u32; g.dim()];
        let mut y = vec![0u32; g.dim()];
        for m in adjoint_generators(g)? {
            for u in 0..self.len() {
                enc.decode_into(u as u64, &mut x);
                m.apply(g.p() as u64, &x, &mut y);
                if self.raw(u) != self.raw(enc.encode(&y) as usize) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Accumulates `Σ w(u) f1(u) conj(f2(u))` as counts on powers of ζ.
fn pairing_counts<'a>(
    f1: &ClassFunction,
    f2: &ClassFunction,
    terms: impl Iterator<Item = (usize, u64)> + 'a,
) -> Vec<i128> {
    let p = f1.p as usize;
    let mut v = vec![0i128; p];
    for (u, weight) in terms {
        for (s, &a) in f1.raw(u).iter().enumerate() {
            if a == 0 {
                continue;
            }
            let wa = a as i128 * weight as i128;
            for (t, &b) in f2.raw(u).iter().enumerate() {
                v[(s + p - t) % p] += wa * b as i128;
            }
        }
    }
    v
}

fn finish_pairing(f1: &ClassFunction, f2: &ClassFunction, v: &[i128]) -> Result<BigRational> {
    ensure_invariant!(
        v[1..].windows(2).all(|w| w[0] == w[1]),
        "inner product is not rational: power counts {v:?}"
    );
    let tail = v.get(1).copied().unwrap_or(0);
    let num = BigInt::from(v[0] - tail);
    let den = BigInt::from(f1.len() as u64) * BigInt::from(f1.denominator) * BigInt::from(f2.denominator);
    Ok(BigRational::new(num, den))
}

/// `(f1, f2) = |G|⁻¹ Σ_u f1(u) conj(f2(u))`, required to be rational.
pub fn inner_product(f1: &ClassFunction, f2: &ClassFunction) -> Result<BigRational> {
    f1.check_same(f2)?;
    let v = pairing_counts(f1, f2, (0..f1.len()).map(|u| (u, 1)));
    finish_pairing(f1, f2, &v)
}

/// Same as [`inner_product`] for functions constant on conjugacy classes,
/// summing once per class weighted by its size.
pub fn inner_product_by_classes(f1: &ClassFunction, f2: &ClassFunction, classes: &ConjugacyClasses) -> Result<BigRational> {
    f1.check_same(f2)?;
    if classes.algebra != f1.algebra {
        return Err(Error::AlgebraMismatch);
    }
    let terms = classes.reps.iter().zip(&classes.sizes).map(|(&r, &s)| (r as usize, s));
    let v = pairing_counts(f1, f2, terms);
    finish_pairing(f1, f2, &v)
}

/// `Σ_{x∈g} ζ^{η(x)}`, which is `|G|` for `η = 0` and 0 otherwise.
pub fn dual_kernel_sum(g: &LieAlgebra, eta: &DualVector) -> Result<CyclotomicNumber> {
    if eta.algebra() != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let enc = g.encoder();
    let mut counts = vec![0i64; g.p() as usize];
    let mut x = vec![0u32; g.dim()];
    for code in 0..g.check_budget(u64::MAX)? {
        enc.decode_into(code, &mut x);
        counts[eta.eval(g, &x) as usize] += 1;
    }
    Ok(CyclotomicNumber::from_power_counts(g.p(), &counts, &BigInt::from(1)))
}

/// Orbit elements flattened into one coordinate buffer.
fn orbit_coords(g: &LieAlgebra, orbit: &Orbit) -> Result<Vec<u32>> {
    if orbit.algebra() != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let enc = g.encoder();
    let d = g.dim();
    let mut out = vec![0u32; orbit.elements().len() * d];
    for (chunk, &c) in out.chunks_mut(d).zip(orbit.elements()) {
        enc.decode_into(c, chunk);
    }
    Ok(out)
}

/// `counts[t] = #{μ ∈ Ω : μ(x) = t}`.
fn kirillov_counts(g: &LieAlgebra, mus: &[u32], x: &[u32], counts: &mut [i64]) {
    let p = g.p() as u64;
    counts.iter_mut().for_each(|c| *c = 0);
    for mu in mus.chunks(g.dim()) {
        let mut acc = 0u64;
        for (&a, &b) in mu.iter().zip(x) {
            acc += a as u64 * b as u64;
        }
        counts[(acc % p) as usize] += 1;
    }
}

fn kirillov_denominator(g: &LieAlgebra, orbit: &Orbit) -> Result<i64> {
    let root = orbit.sqrt_size(g);
    ensure_invariant!(
        root.checked_mul(root) == Some(orbit.size()),
        "orbit size {} is not q^(2k)",
        orbit.size()
    );
    Ok(root as i64)
}

/// `χ_Ω(exp x) = |Ω|^{-1/2} Σ_{μ∈Ω} ζ^{μ(x)}` on every group element.
pub fn kirillov_character(g: &LieAlgebra, orbit: &Orbit) -> Result<ClassFunction> {
    let mus = orbit_coords(g, orbit)?;
    let den = kirillov_denominator(g, orbit)?;
    let order = g.check_budget(u64::MAX)? as usize;
    let p = g.p() as usize;
    let enc = g.encoder();
    let mut numerators = vec![0i64; order * (p - 1)];
    numerators.par_chunks_mut(p - 1).enumerate().for_each_init(
        || (vec![0u32; g.dim()], vec![0i64; p]),
        |(x, counts), (code, out)| {
            enc.decode_into(code as u64, x);
            kirillov_counts(g, &mus, x, counts);
            reduce_counts(counts, out);
        },
    );
    Ok(ClassFunction::normalized(g.id(), g.p(), numerators, den))
}

/// Single value `χ_Ω(g)` for the group element with the given code.
pub fn kirillov_value(g: &LieAlgebra, orbit: &Orbit, code: u64) -> Result<CyclotomicNumber> {
    let mus = orbit_coords(g, orbit)?;
    let den = kirillov_denominator(g, orbit)?;
    let mut counts = vec![0i64; g.p() as usize];
    kirillov_counts(g, &mus, &g.encoder().decode(code), &mut counts);
    Ok(CyclotomicNumber::from_power_counts(g.p(), &counts, &BigInt::from(den)))
}

/// Kirillov character evaluated on class representatives and spread over
/// each class.
pub fn kirillov_on_classes(g: &LieAlgebra, orbit: &Orbit, classes: &ConjugacyClasses) -> Result<ClassFunction> {
    if classes.algebra != g.id() {
        return Err(Error::AlgebraMismatch);
    }
    let mus = orbit_coords(g, orbit)?;
    let den = kirillov_denominator(g, orbit)?;
    let p = g.p() as usize;
    let w = p - 1;
    let enc = g.encoder();
    let mut counts = vec![0i64; p];
    let mut per_class = vec![0i64; classes.reps.len() * w];
    for (&rep, out) in classes.reps.iter().zip(per_class.chunks_mut(w)) {
        kirillov_counts(g, &mus, &enc.decode(rep), &mut counts);
        reduce_counts(&counts, out);
    }
    let mut numerators = vec![0i64; classes.index.len() * w];
    for (out, &ci) in numerators.chunks_mut(w).zip(&classes.index) {
        out.copy_from_slice(&per_class[ci as usize * w..(ci as usize + 1) * w]);
    }
    Ok(ClassFunction::normalized(g.id(), g.p(), numerators, den))
}

/// `Ad_{exp(b_i)}` acting on algebra coordinates, one map per basis vector.
fn adjoint_generators(g: &LieAlgebra) -> Result<Vec<DualMatrix>> {
    let d = g.dim();
    (0..d)
        .map(|i| {
            let rows = g.adjoint_matrix(&g.element(&unit(d, i)).exp()?)?;
            // x ↦ x · rows, stored transposed for DualMatrix::apply
            let mut entries = vec![0u32; d * d];
            for (r, row) in rows.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    entries[c * d + r] = v;
                }
            }
            Ok(DualMatrix::from_entries(d, entries))
        })
        .collect()
}

/// Conjugacy classes of G, i.e. adjoint orbits on g transported by `exp`.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    algebra: AlgebraId,
    reps: Vec<u64>,
    sizes: Vec<u64>,
    index: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Smallest element code in each class.
    pub fn reps(&self) -> &[u64] {
        &self.reps
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn class_of(&self, code: u64) -> usize {
        self.index[code as usize] as usize
    }
}

pub fn conjugacy_classes(g: &LieAlgebra, budget: u64) -> Result<ConjugacyClasses> {
    let total = g.check_budget(budget)?;
    let gens = adjoint_generators(g)?;
    let enc = g.encoder();
    let mut index = vec![u32::MAX; total as usize];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for code in 0..total {
        if index[code as usize] != u32::MAX {
            continue;
        }
        let class = bfs(&enc, g.p(), &gens, &enc.decode(code));
        for &c in &class {
            index[c as usize] = reps.len() as u32;
        }
        reps.push(code);
        sizes.push(class.len() as u64);
    }
    Ok(ConjugacyClasses {
        algebra: g.id(),
        reps,
        sizes,
        index,
    })
}

/// One Kirillov character per coadjoint orbit, rows ordered by orbit
/// representative.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    partition: OrbitPartition,
    classes: ConjugacyClasses,
    characters: Vec<ClassFunction>,
}

impl CharacterTable {
    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    pub fn classes(&self) -> &ConjugacyClasses {
        &self.classes
    }

    pub fn characters(&self) -> &[ClassFunction] {
        &self.characters
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    pub fn degrees(&self, g: &LieAlgebra) -> Vec<u64> {
        self.partition.orbits().iter().map(|o| o.sqrt_size(g)).collect()
    }

    pub fn to_json(&self, g: &LieAlgebra, approx: bool) -> Value {
        let enc = g.encoder();
        let elements: Vec<Vec<u32>> = (0..g.order() as u64).map(|c| enc.decode(c)).collect();
        let rows: Vec<Value> = self
            .partition
            .orbits()
            .iter()
            .zip(&self.characters)
            .map(|(o, chi)| {
                let values = chi.values();
                let mut row = json!({
                    "orbit_rep": o.rep().coords(),
                    "orbit_size": o.size(),
                    "degree": o.sqrt_size(g),
                    "values": values,
                });
                if approx {
                    let approx: Vec<[f64; 2]> = values
                        .iter()
                        .map(|v| {
                            let (re, im) = v.to_complex();
                            [round6(re), round6(im)]
                        })
                        .collect();
                    row["approx"] = json!(approx);
                }
                row
            })
            .collect();
        json!({
            "algebra": g.dump(),
            "group_elements": elements,
            "characters": rows,
        })
    }

    /// Rows are orbits, columns group elements labelled by log coordinates.
    pub fn to_csv(&self, g: &LieAlgebra, approx: bool) -> String {
        let enc = g.encoder();
        let mut out = String::from("orbit_rep,degree");
        for c in 0..g.order() as u64 {
            out.push(',');
            out.push_str(&label(&enc.decode(c)));
        }
        out.push('\n');
        for (o, chi) in self.partition.orbits().iter().zip(&self.characters) {
            out.push_str(&label(o.rep().coords()));
            out.push_str(&format!(",{}", o.sqrt_size(g)));
            for v in chi.values() {
                out.push(',');
                out.push_str(&v.to_string());
                if approx {
                    let (re, im) = v.to_complex();
                    out.push_str(&format!(" ~ {:.4}{:+.4}i", re, im));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `[a b c]`, used for CSV labels.
pub fn label(coords: &[u32]) -> String {
    let inner: Vec<String> = coords.iter().map(u32::to_string).collect();
    format!("[{}]", inner.join(" "))
}

/// Full character table, with `Σ χ(1)² = |G|` and exact orthonormality checked.
pub fn character_table(g: &LieAlgebra, budget: u64) -> Result<CharacterTable> {
    let partition = orbit_partition(g, budget)?;
    let classes = conjugacy_classes(g, budget)?;
    ensure_invariant!(
        classes.len() == partition.len(),
        "{} conjugacy classes but {} coadjoint orbits",
        classes.len(),
        partition.len()
    );
    let characters: Vec<ClassFunction> = partition
        .orbits()
        .par_iter()
        .map(|o| kirillov_on_classes(g, o, &classes))
        .collect::<Result<_>>()?;

    let order = BigInt::from(g.order() as u64);
    let mut square_sum = BigInt::from(0);
    for (o, chi) in partition.orbits().iter().zip(&characters) {
        let deg = chi.degree().ok_or_else(|| Error::Invariant("irrational degree".into()))?;
        ensure_invariant!(
            deg == BigRational::from_integer(BigInt::from(o.sqrt_size(g))),
            "degree {deg} differs from sqrt|orbit|"
        );
        square_sum += deg.to_integer().pow(2);
    }
    ensure_invariant!(square_sum == order, "sum of squared degrees {square_sum} != |G| = {order}");

    let n = characters.len();
    let bad = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, usize)>> {
            for j in i..n {
                let ip = inner_product_by_classes(&characters[i], &characters[j], &classes)?;
                let expected = BigRational::from_integer(BigInt::from((i == j) as u8));
                if ip != expected {
                    return Ok(Some((i, j)));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    if let Some((i, j)) = bad {
        return Err(Error::Invariant(format!("characters {i} and {j} are not orthonormal")));
    }
    Ok(CharacterTable {
        partition,
        classes,
        characters,
    })
}

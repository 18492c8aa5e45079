//! Structural operators: swap, symmetric/antisymmetric projectors, permutation
//! operators on `(C^d)^{⊗m}`, matrix units and Haar-random unitaries.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, ComplexMatrix, C64, ONE};

/// A permutation of `{1, …, m}` in one-line notation: `image[j - 1] = s(j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermutationRepr", into = "PermutationRepr")]
pub struct Permutation {
    image: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    m: usize,
    image: Vec<usize>,
}

impl TryFrom<PermutationRepr> for Permutation {
    type Error = Error;

    fn try_from(repr: PermutationRepr) -> Result<Self> {
        if repr.image.len() != repr.m {
            return Err(Error::InvalidPermutation(format!(
                "m = {} but image has {} entries",
                repr.m,
                repr.image.len()
            )));
        }
        Permutation::new(repr.image)
    }
}

impl From<Permutation> for PermutationRepr {
    fn from(p: Permutation) -> Self {
        PermutationRepr {
            m: p.m(),
            image: p.image,
        }
    }
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let m = image.len();
        if m == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; m];
        for &v in &image {
            if v == 0 || v > m {
                return Err(Error::InvalidPermutation(format!(
                    "entry {v} outside 1..={m}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("entry {v} repeated")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn identity(m: usize) -> Self {
        assert!(m >= 1, "permutation degree must be positive");
        Permutation {
            image: (1..=m).collect(),
        }
    }

    /// The transposition `(a b)` on `{1, …, m}`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 || a > m || b > m {
            return Err(Error::InvalidPermutation(format!(
                "transposition ({a} {b}) outside 1..={m}"
            )));
        }
        let mut image: Vec<usize> = (1..=m).collect();
        image.swap(a - 1, b - 1);
        Ok(Permutation { image })
    }

    /// Builds a permutation of degree `m` from disjoint or overlapping cycles,
    /// composed right to left as written.
    pub fn from_cycles(m: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        let mut acc = Permutation::identity(m);
        for cycle in cycles.iter().rev() {
            let mut image: Vec<usize> = (1..=m).collect();
            let mut seen = vec![false; m];
            for &v in cycle {
                if v == 0 || v > m {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle entry {v} outside 1..={m}"
                    )));
                }
                if std::mem::replace(&mut seen[v - 1], true) {
                    return Err(Error::InvalidPermutation(format!(
                        "entry {v} repeated within a cycle"
                    )));
                }
            }
            for (k, &v) in cycle.iter().enumerate() {
                image[v - 1] = cycle[(k + 1) % cycle.len()];
            }
            acc = Permutation { image }.compose(&acc);
        }
        Ok(acc)
    }

    /// Parses one-line notation (`"2 3 1"`, `"[2,3,1]"`) or cycle notation
    /// (`"(1 2 3)"`, `"(12)(3)"`, `"()"`). Cycle notation needs the degree `m`;
    /// one-line notation checks it against `m` when given.
    pub fn parse(s: &str, m: Option<usize>) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('(') {
            let m = m.ok_or_else(|| {
                Error::InvalidPermutation("cycle notation needs the degree m".into())
            })?;
            return Permutation::from_cycles(m, &parse_cycles(t)?);
        }
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(t);
        let tokens: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .collect();
        let image = if tokens.len() == 1 && tokens[0].len() > 1 && tokens[0].len() <= 9 {
            // compact form such as "231"
            tokens[0]
                .chars()
                .map(|c| digit(c, s))
                .collect::<Result<Vec<_>>>()?
        } else {
            tokens
                .iter()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::InvalidPermutation(format!("cannot parse {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        let p = Permutation::new(image)?;
        if let Some(m) = m {
            if p.m() != m {
                return Err(Error::InvalidPermutation(format!(
                    "expected degree {m}, got {}",
                    p.m()
                )));
            }
        }
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `s(j)` for 1-based `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &v)| v == k + 1)
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.m(),
            other.m(),
            "composing permutations of different degree"
        );
        Permutation {
            image: other.image.iter().map(|&j| self.image[j - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.m()];
        for (k, &v) in self.image.iter().enumerate() {
            image[v - 1] = k + 1;
        }
        Permutation { image }
    }

    /// Disjoint cycles including fixed points, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.m()];
        let mut out = Vec::new();
        for start in 1..=self.m() {
            if seen[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j - 1] {
                seen[j - 1] = true;
                cycle.push(j);
                j = self.apply(j);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// `+1` for even permutations, `-1` for odd.
    pub fn sign(&self) -> i32 {
        if (self.m() - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All `m!` permutations, lexicographic in one-line notation
    /// (the identity first).
    pub fn all(m: usize) -> Vec<Permutation> {
        assert!(m >= 1, "permutation degree must be positive");
        let mut current: Vec<usize> = (1..=m).collect();
        let mut out = vec![Permutation {
            image: current.clone(),
        }];
        while next_permutation(&mut current) {
            out.push(Permutation {
                image: current.clone(),
            });
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with fixed points omitted; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// One-line notation only; cycle notation needs [`Permutation::parse`] with a degree.
    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse(s, None)
    }
}

fn digit(c: char, whole: &str) -> Result<usize> {
    c.to_digit(10)
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidPermutation(format!("cannot parse {whole:?}")))
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let bad = || Error::InvalidPermutation(format!("malformed cycle notation {s:?}"));
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = body_start.find(')').ok_or_else(bad)?;
        let body = &body_start[..close];
        let tokens: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        let cycle = if tokens.len() == 1 && tokens[0].len() > 1 {
            tokens[0]
                .chars()
                .map(|c| digit(c, s))
                .collect::<Result<Vec<_>>>()?
        } else {
            tokens
                .iter()
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?
        };
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = body_start[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Seed for every randomized routine. Sample `k` of a run draws from the
/// independent stream `seed + k`, so results never depend on evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn stream(self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0.wrapping_add(index))
    }

    /// A seed far away from `self` for auxiliary randomness (probes, checks)
    /// that must not overlap the main sample streams.
    pub fn derive(self, salt: u64) -> RngSeed {
        RngSeed(self.0 ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

fn require_d2(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "d must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// The swap `S(x ⊗ y) = y ⊗ x` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> Result<ComplexMatrix> {
    require_d2(d)?;
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = ONE;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// `(I ⊗ I ± S) / 2`: the projector onto the symmetric (`Plus`) or
/// antisymmetric (`Minus`) subspace.
pub fn sym_projector(d: usize, sign: Sign) -> Result<ComplexMatrix> {
    let s = swap_operator(d)?;
    let sgn = match sign {
        Sign::Plus => 0.5,
        Sign::Minus => -0.5,
    };
    let mut q = ComplexMatrix::identity(d * d).scale_real(0.5);
    q.add_scaled(C64::new(sgn, 0.0), &s);
    Ok(q)
}

/// Digits of a flat tensor index in base `d`, most significant (slot 1) first.
pub(crate) fn tensor_digits(mut flat: usize, d: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for k in (0..m).rev() {
        out[k] = flat % d;
        flat /= d;
    }
    out
}

pub(crate) fn tensor_flat(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// The flat-index permutation underlying `Γ(s)`: input basis tensor at
/// `k` lands at `map[k]`.
pub(crate) fn permutation_index_map(p: &Permutation, d: usize) -> Vec<usize> {
    let m = p.m();
    let n = d.pow(m as u32);
    (0..n)
        .map(|k| {
            let input = tensor_digits(k, d, m);
            let mut output = vec![0; m];
            for (j, &x) in input.iter().enumerate() {
                output[p.image[j] - 1] = x;
            }
            tensor_flat(&output, d)
        })
        .collect()
}

/// `Γ(s)`, which moves the vector in tensor slot `j` to slot `s(j)`:
/// `Γ(s)(x_1 ⊗ … ⊗ x_m) = x_{s⁻¹(1)} ⊗ … ⊗ x_{s⁻¹(m)}`.
/// With this convention `Γ(s)Γ(t) = Γ(s ∘ t)`.
pub fn permutation_operator(p: &Permutation, d: usize) -> Result<ComplexMatrix> {
    require_d2(d)?;
    let map = permutation_index_map(p, d);
    let n = map.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for (k, &image) in map.iter().enumerate() {
        g[(image, k)] = ONE;
    }
    Ok(g)
}

/// `e_i e_j^*` with 1-based indices.
pub fn matrix_unit(i: usize, j: usize, d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    if i == 0 || j == 0 || i > d || j > d {
        return Err(Error::IndexOutOfRange { i, j, d });
    }
    let mut e = ComplexMatrix::zeros(d, d);
    e[(i - 1, j - 1)] = ONE;
    Ok(e)
}

/// `d × d` matrix of i.i.d. standard complex Gaussians (`E|z|² = 1`).
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(h * re, h * im)
    })
}

/// Random Hermitian matrix `(G + G^*) / 2` with `G` complex Gaussian.
pub fn gaussian_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(d, d, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Haar-distributed unitary drawn from `rng`.
pub fn haar_unitary_from<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(d, d, rng);
    let (q, r_diag) = householder_qr(&g);
    let phases: Vec<C64> = r_diag
        .iter()
        .map(|&r| if r.norm() == 0.0 { ONE } else { r / r.norm() })
        .collect();
    ComplexMatrix::from_fn(d, d, |i, j| q[(i, j)] * phases[j])
}

/// Haar-random `d × d` unitary, deterministic in `seed`.
pub fn haar_unitary(d: usize, seed: RngSeed) -> Result<ComplexMatrix> {
    haar_unitary_indexed(d, seed, 0)
}

/// The `index`-th Haar sample of the run seeded by `seed`.
pub fn haar_unitary_indexed(d: usize, seed: RngSeed, index: u64) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    Ok(haar_unitary_from(d, &mut seed.stream(index)))
}

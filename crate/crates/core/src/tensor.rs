//! Fixed-size rank-3 and rank-4 tensors over the four phase-space indices.
//!
//! Indices run over `0..4` in the order `(q_a, p_a, q_b, p_b)`. Storage is
//! row-major. The `symmetric` constructors evaluate the generator once per
//! sorted index tuple and copy the value to every permutation, so the result
//! is exactly (bitwise) symmetric.

use std::ops::{Add, Mul, Sub};

pub const DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3<T> {
    data: [T; 64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor4<T> {
    data: [T; 256],
}

#[inline]
fn idx3(i: usize, j: usize, k: usize) -> usize {
    (i * DIM + j) * DIM + k
}

#[inline]
fn idx4(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * DIM + j) * DIM + k) * DIM + l
}

impl<T: Copy + Default> Tensor3<T> {
    pub fn zeros() -> Self {
        Self {
            data: [T::default(); 64],
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    t.data[idx3(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Evaluates `f` on sorted index triples only and fills all permutations.
    pub fn symmetric(mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in i..DIM {
                for k in j..DIM {
                    let v = f(i, j, k);
                    for p in permutations3([i, j, k]) {
                        t.data[idx3(p[0], p[1], p[2])] = v;
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[idx3(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        self.data[idx3(i, j, k)] = v;
    }

    pub fn map<U: Copy + Default>(&self, mut f: impl FnMut(T) -> U) -> Tensor3<U> {
        Tensor3::from_fn(|i, j, k| f(self.get(i, j, k)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Copy + Default> Tensor4<T> {
    pub fn zeros() -> Self {
        Self {
            data: [T::default(); 256],
        }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        t.data[idx4(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// Evaluates `f` on sorted index quadruples only and fills all permutations.
    pub fn symmetric(mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Self {
        let mut t = Self::zeros();
        for i in 0..DIM {
            for j in i..DIM {
                for k in j..DIM {
                    for l in k..DIM {
                        let v = f(i, j, k, l);
                        for p in permutations4([i, j, k, l]) {
                            t.data[idx4(p[0], p[1], p[2], p[3])] = v;
                        }
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.data[idx4(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) {
        self.data[idx4(i, j, k, l)] = v;
    }

    pub fn map<U: Copy + Default>(&self, mut f: impl FnMut(T) -> U) -> Tensor4<U> {
        Tensor4::from_fn(|i, j, k, l| f(self.get(i, j, k, l)))
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl Tensor3<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation between any entry and its index permutations.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let v = self.get(i, j, k);
                    for p in permutations3([i, j, k]) {
                        worst = worst.max((v - self.get(p[0], p[1], p[2])).abs());
                    }
                }
            }
        }
        worst
    }
}

impl Tensor4<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let v = self.get(i, j, k, l);
                        for p in permutations4([i, j, k, l]) {
                            worst = worst.max((v - self.get(p[0], p[1], p[2], p[3])).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

macro_rules! elementwise {
    ($ty:ident) => {
        impl<T: Copy + Default + Add<Output = T>> Add for $ty<T> {
            type Output = Self;
            fn add(mut self, rhs: Self) -> Self {
                for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
                    *a = *a + *b;
                }
                self
            }
        }

        impl<T: Copy + Default + Sub<Output = T>> Sub for $ty<T> {
            type Output = Self;
            fn sub(mut self, rhs: Self) -> Self {
                for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
                    *a = *a - *b;
                }
                self
            }
        }

        impl<T: Copy + Default + Mul<Output = T>> Mul<T> for $ty<T> {
            type Output = Self;
            fn mul(mut self, rhs: T) -> Self {
                for a in self.data.iter_mut() {
                    *a = *a * rhs;
                }
                self
            }
        }
    };
}

elementwise!(Tensor3);
elementwise!(Tensor4);

/// All orderings of three indices (with repeats when indices coincide).
pub fn permutations3(ix: [usize; 3]) -> [[usize; 3]; 6] {
    let [a, b, c] = ix;
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

/// All 24 orderings of four indices (with repeats when indices coincide).
pub fn permutations4(ix: [usize; 4]) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([ix[a], ix[b], ix[c], ix[d]]);
            }
        }
    }
    out
}

/// Sorted copy of an index tuple; canonical key for symmetric tensors.
pub fn canonical<const N: usize>(mut ix: [usize; N]) -> [usize; N] {
    ix.sort_unstable();
    ix
}

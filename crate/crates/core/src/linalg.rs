//! 2-vectors and 2x2 matrices over a generic scalar.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec2<T>(pub [T; 2]);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Copy> Copy for Vec2<T> {}
impl<T: Copy> Copy for Mat2<T> {}

impl<T> Vec2<T> {
    pub const fn new(a: T, b: T) -> Self {
        Vec2([a, b])
    }
}

impl<T: Scalar> Vec2<T> {
    pub fn zero() -> Self {
        Vec2([T::zero(), T::zero()])
    }

    pub fn ones() -> Self {
        Vec2([T::one(), T::one()])
    }

    pub fn dot(&self, other: &Self) -> T {
        self[0].clone() * other[0].clone() + self[1].clone() * other[1].clone()
    }

    pub fn sum(&self) -> T {
        self[0].clone() + self[1].clone()
    }

    /// Componentwise (Hadamard) product, written `x ⊗ y` in the equations.
    pub fn hadamard(&self, other: &Self) -> Self {
        Vec2([
            self[0].clone() * other[0].clone(),
            self[1].clone() * other[1].clone(),
        ])
    }

    pub fn scale(&self, k: T) -> Self {
        Vec2([self[0].clone() * k.clone(), self[1].clone() * k])
    }

    /// L1 norm, the norm used throughout for vectors and matrices.
    pub fn norm1(&self) -> T {
        self[0].abs() + self[1].abs()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Vec2<U> {
        Vec2([f(&self[0]), f(&self[1])])
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        self.map(|x| x.to_f64_lossy())
    }
}

impl<T: Scalar> Mat2<T> {
    pub fn zero() -> Self {
        Mat2([[T::zero(), T::zero()], [T::zero(), T::zero()]])
    }

    pub fn identity() -> Self {
        Mat2([[T::one(), T::zero()], [T::zero(), T::one()]])
    }

    pub fn diag(a: T, b: T) -> Self {
        Mat2([[a, T::zero()], [T::zero(), b]])
    }

    pub fn row(&self, i: usize) -> Vec2<T> {
        Vec2(self.0[i].clone())
    }

    pub fn col(&self, j: usize) -> Vec2<T> {
        Vec2([self.0[0][j].clone(), self.0[1][j].clone()])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j].clone()
    }

    pub fn trace(&self) -> T {
        self.get(0, 0) + self.get(1, 1)
    }

    pub fn det(&self) -> T {
        self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0)
    }

    pub fn transpose(&self) -> Self {
        Mat2([
            [self.get(0, 0), self.get(1, 0)],
            [self.get(0, 1), self.get(1, 1)],
        ])
    }

    pub fn mul_vec(&self, x: &Vec2<T>) -> Vec2<T> {
        Vec2([self.row(0).dot(x), self.row(1).dot(x)])
    }

    /// Row vector times matrix, `x M`.
    pub fn left_mul_vec(&self, x: &Vec2<T>) -> Vec2<T> {
        Vec2([self.col(0).dot(x), self.col(1).dot(x)])
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn norm1(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |acc, x| acc + x.abs())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2([
            [f(&self.0[0][0]), f(&self.0[0][1])],
            [f(&self.0[1][0]), f(&self.0[1][1])],
        ])
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        self.map(|x| x.to_f64_lossy())
    }

    /// Entrywise quotient, used for asymptotic ratio checks.
    pub fn ratio(&self, other: &Self) -> Self {
        Mat2([
            [
                self.get(0, 0) / other.get(0, 0),
                self.get(0, 1) / other.get(0, 1),
            ],
            [
                self.get(1, 0) / other.get(1, 0),
                self.get(1, 1) / other.get(1, 1),
            ],
        ])
    }

    pub fn entries(&self) -> [T; 4] {
        [self.get(0, 0), self.get(0, 1), self.get(1, 0), self.get(1, 1)]
    }
}

impl<T> Index<usize> for Vec2<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec2<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Vec2<T>;
    fn add(self, o: Self) -> Self {
        Vec2([self[0].clone() + o[0].clone(), self[1].clone() + o[1].clone()])
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Vec2<T>;
    fn sub(self, o: Self) -> Self {
        Vec2([self[0].clone() - o[0].clone(), self[1].clone() - o[1].clone()])
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, o: Self) -> Self {
        Mat2([
            [self.get(0, 0) + o.get(0, 0), self.get(0, 1) + o.get(0, 1)],
            [self.get(1, 0) + o.get(1, 0), self.get(1, 1) + o.get(1, 1)],
        ])
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, o: Self) -> Self {
        Mat2([
            [self.get(0, 0) - o.get(0, 0), self.get(0, 1) - o.get(0, 1)],
            [self.get(1, 0) - o.get(1, 0), self.get(1, 1) - o.get(1, 1)],
        ])
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: Self) -> Self {
        let c = |i: usize, j: usize| self.row(i).dot(&o.col(j));
        Mat2([[c(0, 0), c(0, 1)], [c(1, 0), c(1, 1)]])
    }
}

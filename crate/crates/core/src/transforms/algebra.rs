//! Basis multiplication tables of the Cayley–Dickson algebras ℝ, ℂ, ℍ, 𝕆.
//!
//! Doubling rule on pairs: (a, b)(c, d) = (ac − d̄b, da + bc̄).

/// Product of two basis elements: `e_a e_b = sign · e_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisProduct {
    pub sign: i8,
    pub index: usize,
}

/// Multiplication table of a Cayley–Dickson algebra of dimension `2^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyDickson {
    dim: usize,
    table: Vec<BasisProduct>,
}

impl CayleyDickson {
    /// Builds the table by repeated doubling from ℝ. `dim` must be a power of two.
    pub fn new(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "Cayley–Dickson dimension must be a power of two");
        let mut alg = CayleyDickson {
            dim: 1,
            table: vec![BasisProduct { sign: 1, index: 0 }],
        };
        while alg.dim < dim {
            alg = alg.double();
        }
        alg
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `e_a e_b`.
    pub fn mul(&self, a: usize, b: usize) -> BasisProduct {
        self.table[a * self.dim + b]
    }

    /// Sign picked up by `e_a` under conjugation.
    pub fn conj_sign(a: usize) -> i8 {
        if a == 0 {
            1
        } else {
            -1
        }
    }

    fn double(&self) -> Self {
        let h = self.dim;
        let n = 2 * h;
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let p = match (i < h, j < h) {
                    // a·c
                    (true, true) => self.mul(i, j),
                    // (a,0)(0,d) = (0, d a)
                    (true, false) => {
                        let p = self.mul(j - h, i);
                        BasisProduct { sign: p.sign, index: p.index + h }
                    }
                    // (0,b)(c,0) = (0, b c̄)
                    (false, true) => {
                        let p = self.mul(i - h, j);
                        BasisProduct { sign: p.sign * Self::conj_sign(j), index: p.index + h }
                    }
                    // (0,b)(0,d) = (−d̄ b, 0)
                    (false, false) => {
                        let p = self.mul(j - h, i - h);
                        BasisProduct { sign: -p.sign * Self::conj_sign(j - h), index: p.index }
                    }
                };
                table.push(p);
            }
        }
        CayleyDickson { dim: n, table }
    }
}

use std::fmt;

/// Variables of the coefficient ring, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    E,
    S,
    X1,
    X2,
    X3,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::E, Var::S, Var::X1, Var::X2, Var::X3];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::E => "e",
            Var::S => "s",
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
        }
    }
}

/// Exponents of `(E, S, X1, X2, X3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub [u16; 5]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 5]);

    pub fn var(v: Var) -> Self {
        let mut e = [0; 5];
        e[v.slot()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&a| a as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.slot()]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    pub fn with_exp(mut self, v: Var, exp: u16) -> Monomial {
        self.0[v.slot()] = exp;
        self
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Var::ALL
            .iter()
            .map(|&v| format!("{}^{}", v.name(), self.exp(v)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

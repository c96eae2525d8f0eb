//! Problem files bundled with the binary.

/// `f(u) = u(1 - e^{-u})`, `a(t) = t²`: `f₀ = 0`, `f∞ = 1`.
pub const EXAMPLE_ONE: &str = include_str!("../fixtures/example_one.problem");

/// `f(u) = 1 - e^{-u}`, `a(t) = t²`: `f₀ = 1`, `f∞ = 0`.
pub const EXAMPLE_TWO: &str = include_str!("../fixtures/example_two.problem");

pub const EXAMPLES: [(&str, &str); 2] =
    [("example-one", EXAMPLE_ONE), ("example-two", EXAMPLE_TWO)];

"""Shared generators for the test-suite."""
import numpy as np

# templates stay finite and smooth on [-1, 1]^n
_UNARY = ("sin({})", "cos({})", "tanh({})", "exp(0.5*{})", "log(1 + ({})^2)",
          "sqrt(2 + {})", "sinh({})", "({})^2", "({})^3", "-({})", "1/(2 + cos({}))")
_BINARY = ("({}) + ({})", "({}) - ({})", "({}) * ({})", "({}) / (3 + sin({}))")


def random_expression(rng: np.random.Generator, dim: int, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.75:
            return f"x{rng.integers(1, dim + 1)}"
        return repr(round(float(rng.uniform(-2, 2)), 3))
    if rng.random() < 0.45:
        return _UNARY[rng.integers(len(_UNARY))].format(random_expression(rng, dim, depth - 1))
    template = _BINARY[rng.integers(len(_BINARY))]
    return template.format(random_expression(rng, dim, depth - 1), random_expression(rng, dim, depth - 1))


def seeded_expressions(count: int, dim: int, seed: int = 0, depth: int = 4):
    rng = np.random.default_rng(seed)
    return [random_expression(rng, dim, depth) for _ in range(count)]

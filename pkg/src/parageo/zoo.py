"""Builtin metrics used by the CLI, the check suite and the tests."""
from __future__ import annotations

from .geometry import GeometryError, MetricField


class UnknownMetricError(GeometryError, KeyError):
    pass


def _sq_norm(n):
    return " + ".join(f"x{i}^2" for i in range(1, n + 1))


def _diagonal(entries, n):
    return [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]


def euclidean(n: int = 3) -> MetricField:
    return MetricField.from_strings(_diagonal(["1"] * n, n), (n, 0), f"euclidean({n})")


def minkowski(p: int = 2, q: int = 1) -> MetricField:
    """``diag(-1 (q times), +1 (p times))``: ``p`` positive, ``q`` negative directions."""
    n = p + q
    entries = ["-1"] * q + ["1"] * p
    return MetricField.from_strings(_diagonal(entries, n), (p, q), f"minkowski({p},{q})")


def sphere_stereographic(n: int = 3) -> MetricField:
    """Unit round sphere in stereographic coordinates, ``(2 / (1 + |x|^2))^2 delta``."""
    factor = f"4/(1 + {_sq_norm(n)})^2"
    return MetricField.from_strings(_diagonal([factor] * n, n), (n, 0), f"sphere_stereographic({n})")


def hyperbolic_halfspace(n: int = 3) -> MetricField:
    """Upper half-space model ``delta / x_n^2`` (valid for ``x_n > 0``)."""
    factor = f"1/x{n}^2"
    return MetricField.from_strings(_diagonal([factor] * n, n), (n, 0), f"hyperbolic_halfspace({n})")


def conformal(f: str, n: int = 3) -> MetricField:
    """``exp(2 f) delta`` for a user expression ``f``."""
    factor = f"exp(2*({f}))"
    return MetricField.from_strings(_diagonal([factor] * n, n), (n, 0), f"conformal({f},{n})")


def warped_lorentzian() -> MetricField:
    """``diag(-1, 1 + x1^2, 1)``: a curved Lorentzian test metric (x1 is timelike)."""
    return MetricField.from_strings(_diagonal(["-1", "1 + x1^2", "1"], 3), (2, 1), "warped_lorentzian")


BUILTINS = {
    "euclidean": (euclidean, {"n": 3}),
    "minkowski": (minkowski, {"p": 2, "q": 1}),
    "sphere_stereographic": (sphere_stereographic, {"n": 3}),
    "hyperbolic_halfspace": (hyperbolic_halfspace, {"n": 3}),
    "conformal": (conformal, {"f": "0", "n": 3}),
    "warped_lorentzian": (warped_lorentzian, {}),
}


def builtin_metric(name: str, params: dict | None = None) -> MetricField:
    try:
        factory, defaults = BUILTINS[name]
    except KeyError:
        raise UnknownMetricError(f"unknown builtin metric {name!r}") from None
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise GeometryError(f"bad parameters for {name}: {sorted(unknown)}")
    kwargs = {**defaults, **params}
    for key, value in kwargs.items():
        if key in ("n", "p", "q"):
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise GeometryError(f"parameter {key!r} of {name} must be a nonnegative integer")
        elif not isinstance(value, str):
            raise GeometryError(f"parameter {key!r} of {name} must be an expression string")
    if kwargs.get("n", 2) < 2 or ("p" in kwargs and kwargs["p"] + kwargs["q"] < 2):
        raise GeometryError(f"{name} needs dimension at least 2")
    return factory(**kwargs)

"""Explicit Runge-Kutta pairs with embedded error estimators.

Tableaux are immutable after construction and safe to share across threads.
The built-in registry carries the representative methods used by the
experiment drivers; the two optimized low-storage pairs are loaded from
coefficient files if present (see ``COEFFICIENT_DIR``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

COEFFICIENT_DIR = Path(__file__).parent / "data"

_ROWSUM_TOL = 1e-13
_ORDER_TOL = 1e-12


class UnknownMethodError(KeyError):
    """Requested method name is not in the registry."""


class TableauIntegrityError(ValueError):
    """Tableau coefficients violate a structural or order invariant."""


class TableauUnavailableError(TableauIntegrityError):
    """Method is registered but its coefficient file is not shipped."""


@dataclass(frozen=True)
class ButcherTableau:
    """Coefficients of an explicit embedded RK pair.

    ``a`` is strictly lower triangular (s x s), ``b`` has length s and
    ``b_hat`` length s+1: a nonzero last embedded weight marks a FSAL pair,
    where the derivative at the step end enters the error estimator and is
    reused as the first stage of the next step.
    """

    a: np.ndarray
    b: np.ndarray
    b_hat: np.ndarray
    c: np.ndarray
    order_q: int
    order_q_hat: int
    fsal: bool
    name: str = ""

    def __post_init__(self):
        a = np.ascontiguousarray(np.atleast_2d(self.a), dtype=float)
        b = np.ascontiguousarray(self.b, dtype=float)
        b_hat = np.ascontiguousarray(self.b_hat, dtype=float)
        c = np.ascontiguousarray(self.c, dtype=float)
        for name, val in (("a", a), ("b", b), ("b_hat", b_hat), ("c", c)):
            object.__setattr__(self, name, val)
        s = self.s
        if a.shape != (s, s) or c.shape != (s,) or b_hat.shape != (s + 1,):
            raise TableauIntegrityError(
                f"{self.name}: inconsistent shapes a={a.shape} b={b.shape} "
                f"b_hat={b_hat.shape} c={c.shape}"
            )
        if np.any(np.triu(a) != 0.0):
            raise TableauIntegrityError(f"{self.name}: a is not strictly lower triangular")
        if np.max(np.abs(a.sum(axis=1) - c)) > _ROWSUM_TOL:
            raise TableauIntegrityError(f"{self.name}: row sums of a do not match c")
        if abs(b.sum() - 1.0) > _ROWSUM_TOL:
            raise TableauIntegrityError(f"{self.name}: sum(b) != 1")
        if abs(b_hat.sum() - 1.0) > _ROWSUM_TOL:
            raise TableauIntegrityError(f"{self.name}: sum(b_hat) != 1")
        if self.fsal != (abs(b_hat[-1]) > 0.0):
            raise TableauIntegrityError(f"{self.name}: fsal flag inconsistent with b_hat[s]")
        if self.order_q_hat != self.order_q - 1:
            raise TableauIntegrityError(f"{self.name}: embedded order must be order_q - 1")
        for arr in (a, b, b_hat, c):
            arr.setflags(write=False)

    @property
    def s(self) -> int:
        """Number of stages of the main method."""
        return len(self.b)

    def extended(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(s+1)-stage view used by the embedded weights.

        The extra stage has row equal to b and abscissa 1, i.e. it is the
        derivative evaluated at the step end point.
        """
        s = self.s
        a_ext = np.zeros((s + 1, s + 1))
        a_ext[:s, :s] = self.a
        a_ext[s, :s] = self.b
        c_ext = np.append(self.c, 1.0)
        return a_ext, self.b_hat.copy(), c_ext


@dataclass(frozen=True)
class MethodInfo:
    """Registry metadata: enough to reason about cost and control defaults."""

    name: str
    stages: int
    fsal: bool
    order_q: int
    order_q_hat: int
    beta: tuple[float, float, float]
    default_tol: float = 1e-4


#: Controller parameters per method follow the recommendations shipped with
#: each pair (beta triples as used in the experiment tables).
METHOD_INFO: dict[str, MethodInfo] = {
    "BS3_3F": MethodInfo("BS3_3F", 3, True, 3, 2, (0.60, -0.20, 0.00)),
    "RDPK3_5F": MethodInfo("RDPK3_5F", 5, True, 3, 2, (0.70, -0.23, 0.00)),
    "RDPK4_9F": MethodInfo("RDPK4_9F", 9, True, 4, 3, (0.38, -0.18, 0.01), 1e-5),
    "SSP3_4": MethodInfo("SSP3_4", 4, False, 3, 2, (0.55, -0.27, 0.05)),
}


def _bs3_3f() -> ButcherTableau:
    # Bogacki-Shampine 3(2) pair, FSAL embedded weight b_hat[3].
    a = np.array([
        [0.0, 0.0, 0.0],
        [1 / 2, 0.0, 0.0],
        [0.0, 3 / 4, 0.0],
    ])
    b = np.array([2 / 9, 1 / 3, 4 / 9])
    b_hat = np.array([7 / 24, 1 / 4, 1 / 3, 1 / 8])
    c = np.array([0.0, 1 / 2, 3 / 4])
    return ButcherTableau(a, b, b_hat, c, 3, 2, True, "BS3_3F")


def _ssp3_4() -> ButcherTableau:
    # Four-stage third-order SSP method (Kraaijevanger) with the equal-weight
    # second-order embedded estimator; not FSAL.
    a = np.array([
        [0.0, 0.0, 0.0, 0.0],
        [1 / 2, 0.0, 0.0, 0.0],
        [1 / 2, 1 / 2, 0.0, 0.0],
        [1 / 6, 1 / 6, 1 / 6, 0.0],
    ])
    b = np.array([1 / 6, 1 / 6, 1 / 6, 1 / 2])
    b_hat = np.array([1 / 4, 1 / 4, 1 / 4, 1 / 4, 0.0])
    c = np.array([0.0, 1 / 2, 1.0, 1 / 2])
    return ButcherTableau(a, b, b_hat, c, 3, 2, False, "SSP3_4")


_INLINE_BUILDERS = {"BS3_3F": _bs3_3f, "SSP3_4": _ssp3_4}


def builtin(name: str) -> ButcherTableau:
    """Return a named built-in tableau.

    Raises UnknownMethodError for names outside the registry and
    TableauUnavailableError when a registered method's coefficient file is
    not shipped (the optimized low-storage pairs are distributed as data
    files; see ``COEFFICIENT_DIR``).
    """
    if name not in METHOD_INFO:
        raise UnknownMethodError(name)
    if name in _INLINE_BUILDERS:
        return _INLINE_BUILDERS[name]()
    path = COEFFICIENT_DIR / f"{name.lower()}.txt"
    if not path.exists():
        raise TableauUnavailableError(
            f"{name}: coefficient file {path} not shipped; the accounting "
            f"metadata remains available via METHOD_INFO"
        )
    tab = load_tableau_file(path, name=name)
    info = METHOD_INFO[name]
    report = validate_order(tab)
    if report.order_main != info.order_q or report.order_embedded != info.order_q_hat:
        raise TableauIntegrityError(
            f"{name}: coefficient file yields orders "
            f"({report.order_main},{report.order_embedded}), expected "
            f"({info.order_q},{info.order_q_hat})"
        )
    return tab


def method_info(name: str) -> MethodInfo:
    try:
        return METHOD_INFO[name]
    except KeyError:
        raise UnknownMethodError(name) from None


def load_tableau_file(path: str | Path, name: str | None = None) -> ButcherTableau:
    """Parse a labeled-block coefficient file.

    Blocks ``A``, ``b``, ``bhat``, ``c``, ``order``, ``order_hat``, ``fsal``
    hold whitespace-separated numbers; ``#`` starts a comment. The A block is
    given row by row (s rows of s entries).
    """
    path = Path(path)
    labels = {"A", "b", "bhat", "c", "order", "order_hat", "fsal"}
    blocks: dict[str, list[float]] = {}
    current: str | None = None
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split():
            if tok in labels:
                current = tok
                blocks.setdefault(current, [])
            else:
                if current is None:
                    raise TableauIntegrityError(f"{path}: data before any block label")
                try:
                    blocks[current].append(float(tok))
                except ValueError:
                    raise TableauIntegrityError(f"{path}: bad number {tok!r}") from None
    missing = labels - blocks.keys()
    if missing:
        raise TableauIntegrityError(f"{path}: missing blocks {sorted(missing)}")
    b = np.array(blocks["b"])
    s = len(b)
    if len(blocks["A"]) != s * s:
        raise TableauIntegrityError(f"{path}: A block has {len(blocks['A'])} entries, expected {s * s}")
    if len(blocks["bhat"]) != s + 1:
        raise TableauIntegrityError(f"{path}: bhat must have s+1 = {s + 1} entries")
    tab = ButcherTableau(
        a=np.array(blocks["A"]).reshape(s, s),
        b=b,
        b_hat=np.array(blocks["bhat"]),
        c=np.array(blocks["c"]),
        order_q=int(blocks["order"][0]),
        order_q_hat=int(blocks["order_hat"][0]),
        fsal=bool(int(blocks["fsal"][0])),
        name=name or path.stem,
    )
    return tab


def dump_tableau_file(tab: ButcherTableau, path: str | Path) -> None:
    """Write a tableau in the labeled-block format with 17 significant digits."""
    def fmt(x: float) -> str:
        return format(x, ".17g")

    lines = [f"# {tab.name}", f"order {tab.order_q}", f"order_hat {tab.order_q_hat}",
             f"fsal {int(tab.fsal)}", "A"]
    lines += [" ".join(fmt(x) for x in row) for row in tab.a]
    lines.append("b")
    lines.append(" ".join(fmt(x) for x in tab.b))
    lines.append("bhat")
    lines.append(" ".join(fmt(x) for x in tab.b_hat))
    lines.append("c")
    lines.append(" ".join(fmt(x) for x in tab.c))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class OrderReport:
    """Rooted-tree residuals for orders 1..4 and the attained orders."""

    order_main: int
    order_embedded: int
    residuals_main: dict[str, float] = field(default_factory=dict)
    residuals_embedded: dict[str, float] = field(default_factory=dict)


def _order_residuals(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> dict[str, float]:
    """Residuals of the eight classical conditions up to order 4."""
    ac = a @ c
    return {
        "1:sum_b": abs(b.sum() - 1.0),
        "2:b.c": abs(b @ c - 1 / 2),
        "3:b.c2": abs(b @ c**2 - 1 / 3),
        "3:b.Ac": abs(b @ ac - 1 / 6),
        "4:b.c3": abs(b @ c**3 - 1 / 4),
        "4:b.cAc": abs(b @ (c * ac) - 1 / 8),
        "4:b.Ac2": abs(b @ (a @ c**2) - 1 / 12),
        "4:b.AAc": abs(b @ (a @ ac) - 1 / 24),
    }


def _attained_order(residuals: dict[str, float], tol: float = _ORDER_TOL) -> int:
    order = 0
    for k in (1, 2, 3, 4):
        conds = [v for key, v in residuals.items() if key.startswith(f"{k}:")]
        if all(v <= tol for v in conds):
            order = k
        else:
            break
    return order


def validate_order(tab: ButcherTableau) -> OrderReport:
    """Evaluate order conditions for both weight vectors (orders 1..4).

    The embedded weights act on the (s+1)-stage extension where the extra
    stage is the step-end derivative.
    """
    if tab.s > 16 or tab.order_q > 4:
        raise TableauIntegrityError(f"{tab.name}: validation supports s <= 16, order <= 4")
    res_main = _order_residuals(tab.a, tab.b, tab.c)
    a_ext, b_hat, c_ext = tab.extended()
    res_emb = _order_residuals(a_ext, b_hat, c_ext)
    return OrderReport(
        order_main=_attained_order(res_main),
        order_embedded=_attained_order(res_emb),
        residuals_main=res_main,
        residuals_embedded=res_emb,
    )


def stability_coefficients(tab: ButcherTableau) -> np.ndarray:
    """Coefficients [1, b'1, b'A1, ...] of the stability polynomial R."""
    coeffs = [1.0]
    v = np.ones(tab.s)
    for _ in range(tab.s):
        coeffs.append(float(tab.b @ v))
        v = tab.a @ v
    return np.array(coeffs)


def stability_function(tab: ButcherTableau, z: complex) -> complex:
    """R(z) = 1 + z b'(I - zA)^{-1} 1, as the explicit degree-s polynomial."""
    if not np.all(np.isfinite([z.real, z.imag] if isinstance(z, complex) else [z])):
        raise ValueError("z must be finite")
    coeffs = stability_coefficients(tab)
    result = 0.0 + 0.0j
    for ck in coeffs[::-1]:
        result = result * z + ck
    return result


def effective_stage_count(tab: ButcherTableau) -> int:
    """New RHS evaluations per accepted step.

    For FSAL pairs the step-end evaluation replaces the next step's first
    stage, so the effective count equals s for FSAL and non-FSAL methods
    alike; the distinction shows up only in the one-off startup cost.
    """
    return tab.s


def stability_boundary_real_axis(tab: ButcherTableau, hi: float = 100.0) -> float:
    """Largest x > 0 with |R(-x)| <= 1, by bisection to 1e-10."""
    lo = 0.0
    if abs(stability_function(tab, -hi)) <= 1.0:
        return hi
    hi_b = hi
    # grow lo to the last stable point on a coarse grid first
    for x in np.linspace(0.0, hi, 2001):
        if abs(stability_function(tab, -x)) <= 1.0:
            lo = x
        else:
            hi_b = x
            break
    while hi_b - lo > 1e-10:
        mid = 0.5 * (lo + hi_b)
        if abs(stability_function(tab, -mid)) <= 1.0:
            lo = mid
        else:
            hi_b = mid
    return lo

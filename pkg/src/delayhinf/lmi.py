"""Block-affine matrix inequalities for delay-dependent H-infinity filtering.

An :class:`AffineMatrixInequality` is a symmetric block matrix

    F(v) = F0 + sum_k He_k(L_k op(V_k) R_k)

where each term sits in block ``(i, j)`` and its transpose is mirrored into
block ``(j, i)``; a term on a diagonal block contributes ``T + T^T``. The
inequality means ``F(v) <= -epsilon * I``.

Scalar vectorization of the variables is fixed: variables in declaration
order; a symmetric variable contributes its upper triangle row by row
(``i <= j``), a general variable all entries row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import DomainError, InternalConsistencyError, SingularityError
from .model import AugmentedDelaySystem


@dataclass(frozen=True)
class MatrixVariable:
    name: str
    rows: int
    cols: int
    symmetric: bool = False

    def __post_init__(self):
        if self.symmetric and self.rows != self.cols:
            raise DomainError(f"symmetric variable {self.name} must be square")

    @property
    def size(self) -> int:
        if self.symmetric:
            return self.rows * (self.rows + 1) // 2
        return self.rows * self.cols

    def unvec(self, v: np.ndarray) -> np.ndarray:
        if self.symmetric:
            out = np.zeros((self.rows, self.rows))
            iu = np.triu_indices(self.rows)
            out[iu] = v
            out.T[iu] = v
            return out
        return np.asarray(v, dtype=float).reshape(self.rows, self.cols).copy()

    def vec(self, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=float).reshape(self.rows, self.cols)
        if self.symmetric:
            return value[np.triu_indices(self.rows)].copy()
        return value.ravel().copy()


@dataclass(frozen=True)
class Term:
    """``left @ V @ right`` (``V.T`` when ``transpose``) placed at ``(row, col)``."""

    row: int
    col: int
    left: np.ndarray
    var: str
    right: np.ndarray
    transpose: bool = False

    def value(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        V = values[self.var]
        if self.transpose:
            V = V.T
        return self.left @ V @ self.right


@dataclass(frozen=True)
class AffineMatrixInequality:
    block_sizes: tuple[int, ...]
    constant: np.ndarray
    terms: tuple[Term, ...] = ()
    label: str = ""

    @property
    def dimension(self) -> int:
        return int(sum(self.block_sizes))

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_sizes)]).astype(int)

    def evaluate(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        off = self.offsets
        F = np.array(self.constant, dtype=float, copy=True)
        for term in self.terms:
            T = term.value(values)
            r0, r1 = off[term.row], off[term.row + 1]
            c0, c1 = off[term.col], off[term.col + 1]
            if T.shape != (r1 - r0, c1 - c0):
                raise InternalConsistencyError(
                    f"{self.label}: term on {term.var} has shape {T.shape}, "
                    f"block ({term.row},{term.col}) needs {(r1 - r0, c1 - c0)}"
                )
            if term.row == term.col:
                F[r0:r1, c0:c1] += T + T.T
            else:
                F[r0:r1, c0:c1] += T
                F[c0:c1, r0:r1] += T.T
        return F


@dataclass(frozen=True)
class LmiProblem:
    """Find variable values with ``F_k(v) <= -epsilon I`` for every constraint."""

    variables: tuple[MatrixVariable, ...]
    constraints: tuple[AffineMatrixInequality, ...]
    epsilon: float

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise DomainError("duplicate variable names")
        declared = {v.name: v for v in self.variables}
        for con in self.constraints:
            C = np.asarray(con.constant)
            if C.shape != (con.dimension, con.dimension):
                raise DomainError(f"{con.label}: constant has shape {C.shape}")
            if not np.array_equal(C, C.T):
                raise InternalConsistencyError(f"{con.label}: constant block is not symmetric")
            for term in con.terms:
                if term.var not in declared:
                    raise DomainError(f"{con.label}: undeclared variable {term.var!r}")
                var = declared[term.var]
                vr, vc = (var.cols, var.rows) if term.transpose else (var.rows, var.cols)
                if term.left.shape[1] != vr or term.right.shape[0] != vc:
                    raise DomainError(f"{con.label}: coefficient shapes do not match {term.var}")
                if term.row >= len(con.block_sizes) or term.col >= len(con.block_sizes):
                    raise DomainError(f"{con.label}: block index out of range")

    @property
    def n_scalars(self) -> int:
        return sum(v.size for v in self.variables)

    def variable(self, name: str) -> MatrixVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def unpack(self, vec: np.ndarray) -> dict[str, np.ndarray]:
        out, pos = {}, 0
        for var in self.variables:
            out[var.name] = var.unvec(vec[pos:pos + var.size])
            pos += var.size
        return out

    def pack(self, values: Mapping[str, np.ndarray]) -> np.ndarray:
        missing = [v.name for v in self.variables if v.name not in values]
        if missing:
            raise DomainError(f"missing values for variables {missing}")
        if not self.variables:
            return np.zeros(0)
        return np.concatenate([var.vec(values[var.name]) for var in self.variables])

    def evaluate(self, values: Mapping[str, np.ndarray]) -> list[np.ndarray]:
        missing = [v.name for v in self.variables if v.name not in values]
        if missing:
            raise DomainError(f"missing values for variables {missing}")
        clean = {}
        for var in self.variables:
            val = np.asarray(values[var.name], dtype=float).reshape(var.rows, var.cols)
            if var.symmetric and not np.allclose(val, val.T, rtol=0, atol=1e-12 * (1 + np.abs(val).max())):
                raise DomainError(f"value for symmetric variable {var.name} is not symmetric")
            clean[var.name] = val
        return [con.evaluate(clean) for con in self.constraints]

    def zero_values(self) -> dict[str, np.ndarray]:
        return {v.name: np.zeros((v.rows, v.cols)) for v in self.variables}


def default_epsilon(constraints: Sequence[AffineMatrixInequality]) -> float:
    """``1e-7 * (1 + max_k ||F_k0||_inf)``."""
    worst = max((np.abs(c.constant).sum(axis=1).max() for c in constraints), default=0.0)
    return 1e-7 * (1.0 + float(worst))


# -- error system ---------------------------------------------------------------

@dataclass(frozen=True)
class ErrorSystem:
    """``eta_dot = A_bar eta + A_bar_d x_a(t - tau) + B_bar w``, ``e = C_bar eta``."""

    A_bar: np.ndarray
    A_bar_d: np.ndarray
    B_bar: np.ndarray
    C_bar: np.ndarray

    @property
    def I0(self) -> np.ndarray:
        n = self.A_bar_d.shape[1]
        return np.hstack([np.eye(n), np.zeros((n, self.A_bar.shape[0] - n))])


def _check_gains(sys: AugmentedDelaySystem, gains) -> None:
    n, ny, nz = sys.n, sys.ny, sys.nz
    expected = {"K_A": (n, n), "K_B": (n, ny), "K_C": (nz, n)}
    for name, shape in expected.items():
        got = np.shape(getattr(gains, name))
        if got != shape:
            raise DomainError(f"{name} has shape {got}, expected {shape}")


def build_error_system(sys: AugmentedDelaySystem, gains) -> ErrorSystem:
    _check_gains(sys, gains)
    K_A, K_B, K_C = (np.asarray(g, dtype=float) for g in (gains.K_A, gains.K_B, gains.K_C))
    n = sys.n
    A_bar = np.block([[sys.A_a, np.zeros((n, n))], [K_B @ sys.C_a0, K_A]])
    A_bar_d = np.vstack([np.zeros((n, n)), K_B @ sys.C_a1])
    B_bar = np.vstack([sys.B_a, K_B @ sys.D_a])
    C_bar = np.hstack([sys.E_a, -K_C])
    return ErrorSystem(A_bar, A_bar_d, B_bar, C_bar)


# -- delay-dependent verification LMI -----------------------------------------

def assemble_verification_lmi(
    sys: AugmentedDelaySystem,
    gains,
    gamma: float,
    tau_max: float | None = None,
    epsilon: float | None = None,
) -> LmiProblem:
    """Analysis LMI for fixed filter gains, variables ``P``, ``Q1``, ``Q2``.

    Blocks (eta, w, e, [x_a-integral, w-integral]). A second constraint
    enforces ``P > 0``. ``tau_max == 0`` drops the delay blocks (the
    delay-free limit).
    """
    tau = sys.tau_max if tau_max is None else float(tau_max)
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if not tau >= 0:
        raise DomainError(f"tau_max must be non-negative, got {tau}")
    es = build_error_system(sys, gains)
    n, nw, nz = sys.n, sys.nw, sys.nz
    ne = 2 * n
    A_hat = es.A_bar + es.A_bar_d @ es.I0
    I0 = es.I0

    variables = [MatrixVariable("P", ne, ne, True)]
    delayed = tau > 0
    if delayed:
        variables += [MatrixVariable("Q1", n, n, True), MatrixVariable("Q2", nw, nw, True)]
        sizes = (ne, nw, nz, n + nw)
    else:
        sizes = (ne, nw, nz)
    dim = sum(sizes)
    off = np.concatenate([[0], np.cumsum(sizes)])

    C = np.zeros((dim, dim))
    C[off[0]:off[1], off[2]:off[3]] = es.C_bar.T
    C[off[2]:off[3], off[0]:off[1]] = es.C_bar
    C[off[1]:off[2], off[1]:off[2]] = -gamma ** 2 * np.eye(nw)
    C[off[2]:off[3], off[2]:off[3]] = -np.eye(nz)

    I_ne = np.eye(ne)
    terms = [
        Term(0, 0, I_ne, "P", A_hat),
        Term(0, 1, I_ne, "P", es.B_bar),
    ]
    if delayed:
        gamma_right = np.hstack([es.A_bar_d @ sys.A_a, es.A_bar_d @ sys.B_a])
        S1 = np.vstack([np.eye(n), np.zeros((nw, n))])
        S2 = np.vstack([np.zeros((n, nw)), np.eye(nw)])
        terms += [
            Term(0, 0, 0.5 * tau * I0.T, "Q1", I0),
            Term(0, 3, I_ne, "P", gamma_right),
            Term(1, 1, 0.5 * tau * np.eye(nw), "Q2", np.eye(nw)),
            Term(3, 3, -0.5 / tau * S1, "Q1", S1.T),
            Term(3, 3, -0.5 / tau * S2, "Q2", S2.T),
        ]
    main = AffineMatrixInequality(sizes, C, tuple(terms), label="verification")
    pos = AffineMatrixInequality((ne,), np.zeros((ne, ne)), (Term(0, 0, -0.5 * I_ne, "P", I_ne),), label="P>0")
    cons = (main, pos)
    eps = default_epsilon(cons) if epsilon is None else float(epsilon)
    return LmiProblem(tuple(variables), cons, eps)


# -- synthesis LMIs after the linearizing change of variables -------------------

SYNTHESIS_VARIABLES = ("X", "Y", "script_A", "script_B", "script_C", "Q2")


def assemble_synthesis_lmi(
    sys: AugmentedDelaySystem,
    gamma: float,
    tau_max: float | None = None,
    q1: float = 1.0,
    epsilon: float | None = None,
) -> LmiProblem:
    """Linearized synthesis LMI plus the coupling constraint ``[[X, I], [I, Y]] > 0``.

    ``Q1`` is frozen to ``q1 * I`` so that both ``Q1`` and its inverse stay
    constant blocks. Block layout of the main constraint::

        0: X-part (n)   1: Y-part (n)   2: w (nw)   3: e (nz)
        4: Q1 (n)       5: Q2 (nw)      6: Q1^-1 (n)
    """
    tau = sys.tau_max if tau_max is None else float(tau_max)
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if not tau >= 0:
        raise DomainError(f"tau_max must be non-negative, got {tau}")
    if not q1 > 0:
        raise DomainError(f"q1 must be positive, got {q1}")
    n, ny, nz, nw = sys.n, sys.ny, sys.nz, sys.nw
    A_a, B_a, E_a = sys.A_a, sys.B_a, sys.E_a
    C_sum = sys.C_a0 + sys.C_a1
    delayed = tau > 0

    variables = (
        MatrixVariable("X", n, n, True),
        MatrixVariable("Y", n, n, True),
        MatrixVariable("script_A", n, n),
        MatrixVariable("script_B", n, ny),
        MatrixVariable("script_C", nz, n),
        MatrixVariable("Q2", nw, nw, True),
    )
    sizes = (n, n, nw, nz, n, nw, n) if delayed else (n, n, nw, nz)
    dim = sum(sizes)
    off = np.concatenate([[0], np.cumsum(sizes)])

    def put(C, i, j, block):
        C[off[i]:off[i + 1], off[j]:off[j + 1]] = block
        C[off[j]:off[j + 1], off[i]:off[i + 1]] = block.T

    I_n, I_w, I_z = np.eye(n), np.eye(nw), np.eye(nz)
    C = np.zeros((dim, dim))
    put(C, 1, 0, A_a.T)
    put(C, 0, 2, B_a)
    put(C, 1, 3, E_a.T)
    C[off[2]:off[3], off[2]:off[3]] = -gamma ** 2 * I_w
    C[off[3]:off[4], off[3]:off[4]] = -I_z

    terms = [
        Term(0, 0, A_a, "X", I_n),
        Term(1, 0, I_n, "script_A", I_n),
        Term(1, 1, I_n, "Y", A_a),
        Term(1, 1, I_n, "script_B", C_sum),
        Term(1, 2, I_n, "Y", B_a),
        Term(1, 2, I_n, "script_B", sys.D_a),
        Term(0, 3, I_n, "X", E_a.T),
        Term(0, 3, -I_n, "script_C", I_z, transpose=True),
    ]
    if delayed:
        put(C, 1, 6, I_n)
        C[off[4]:off[5], off[4]:off[5]] = -(q1 / tau) * I_n
        C[off[6]:off[7], off[6]:off[7]] = -(1.0 / (tau * q1)) * I_n
        terms += [
            Term(1, 4, I_n, "script_B", sys.C_a1 @ A_a),
            Term(1, 5, I_n, "script_B", sys.C_a1 @ B_a),
            Term(0, 6, I_n, "X", I_n),
            Term(2, 2, 0.5 * tau * I_w, "Q2", I_w),
            Term(5, 5, -0.5 / tau * I_w, "Q2", I_w),
        ]
    main = AffineMatrixInequality(sizes, C, tuple(terms), label="synthesis")

    Cc = np.zeros((2 * n, 2 * n))
    Cc[:n, n:] = -I_n
    Cc[n:, :n] = -I_n
    coupling = AffineMatrixInequality(
        (n, n), Cc,
        (Term(0, 0, -0.5 * I_n, "X", I_n), Term(1, 1, -0.5 * I_n, "Y", I_n)),
        label="coupling",
    )
    cons = (main, coupling)
    eps = default_epsilon(cons) if epsilon is None else float(epsilon)
    return LmiProblem(variables, cons, eps)


# -- Schur complement test ------------------------------------------------------

def schur_check(S11, S12, S22, rcond: float = 1e-12) -> bool:
    """Whether ``[[S11, S12], [S12^T, S22]] < 0`` via ``S22 < 0`` and its complement."""
    S11 = np.atleast_2d(np.asarray(S11, dtype=float))
    S12 = np.atleast_2d(np.asarray(S12, dtype=float))
    S22 = np.atleast_2d(np.asarray(S22, dtype=float))
    ev22 = np.linalg.eigvalsh(S22)
    scale = max(np.abs(ev22).max(), np.finfo(float).tiny)
    if np.abs(ev22).min() <= rcond * scale:
        raise SingularityError("S22 is singular; the Schur complement is undefined")
    if ev22.max() >= 0:
        return False
    comp = S11 - S12 @ np.linalg.solve(S22, S12.T)
    comp = 0.5 * (comp + comp.T)
    return bool(np.linalg.eigvalsh(comp).max() < 0)

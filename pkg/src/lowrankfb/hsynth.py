"""Synthesis of a stabilizing feedback H from F by analytic interpolation.

The output sensitivity ``Q = (I - F H)^{-1}`` must vanish at the unstable
poles of F and equal one at its non-minimum-phase zeros, while staying
bounded by ``gamma`` on the unit circle.  With ``xi = 1/z`` these become
interpolation conditions on a Schur function ``f = Q / gamma``, which
are moved to a Caratheodory function ``phi`` and solved there.

Two solvers are provided.  For one node at the origin plus one more node,
the quadratic closed form covers a whole one-parameter family indexed by
``sigma``.  For any number of nodes, the central (``sigma = 0``) solution
is the one whose real part on the circle is ``kappa / |a(z)|^2``; it is
computed by moment matching followed by spectral factorization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import root

from .errors import (
    BoundaryDegeneracy, ContractViolation, ImproperResultWarning, MultiplicityUnsupported, NoAdmissibleRoot,
    PoleAtMinusOne, PseudoInverseFailure,
)
from .ratcore import Polynomial, RationalFunction, RationalMatrix, UnitCircleGrid, rm_equal_on_grid, rm_inverse, simplify

DEFAULT_GAMMA = 10.0
_BOUNDARY = 1e-9


# ---------------------------------------------------------------------------
# problem data


@dataclass(frozen=True)
class Node:
    """Interpolation node in the ``xi = 1/z`` plane.

    ``kind`` is ``"pole"`` (Q must vanish), ``"zero"`` (Q must be one) or
    ``"other"`` (a node of another channel, where a weighted problem needs
    the Schur function to vanish).
    """

    xi: complex
    kind: str
    channel: int = 0

    @property
    def z(self):
        return np.inf if self.xi == 0 else 1 / self.xi


@dataclass
class InterpProblem:
    """Nodes ``z_k`` in the disc (after recentring) with Caratheodory targets.

    Attributes
    ----------
    nodes : ndarray
        Recentred nodes, ``nodes[0] = 0`` whenever a real node exists.
    schur_values : ndarray
        Target values of the Schur function ``f``.
    gamma : float
    sigma : float
    xi0 : float
        Centre of the Moebius map ``z = (xi - xi0) / (1 - xi0 xi)``.
    xi_nodes : ndarray
        The same nodes before recentring.
    """

    nodes: np.ndarray
    schur_values: np.ndarray
    gamma: float = DEFAULT_GAMMA
    sigma: float = 0.0
    xi0: float = 0.0
    xi_nodes: np.ndarray = field(default_factory=lambda: np.zeros(0))
    flipped: bool = False

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex)
        self.schur_values = np.asarray(self.schur_values, dtype=complex)
        if np.any(np.abs(self.nodes) >= 1):
            raise BoundaryDegeneracy("interpolation nodes must lie in the open unit disc")
        if not -1 < self.sigma < 1:
            raise ValueError("sigma must lie in (-1, 1)")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def phi_values(self):
        return schur_to_caratheodory(self.schur_values, flipped=self.flipped)

    def __len__(self):
        return len(self.nodes)


def _finite_roots(p: Polynomial):
    return p.roots() if p.degree >= 1 else np.zeros(0, complex)


def interpolation_data(F, gamma: float = DEFAULT_GAMMA, channel: int = 0):
    """Nodes ``xi = 1/pi`` (unstable poles) and ``xi = 1/zeta`` (nmp zeros).

    A strictly proper F has a zero at infinity, which gives the node
    ``xi = 0`` of ``"zero"`` kind with multiplicity equal to the relative
    degree.  The same node is added when F has unstable poles but no
    zero nodes at all, since otherwise the only interpolant is ``Q = 0``.
    The Schur target is 0 at pole nodes and ``1/gamma`` at zero nodes.

    Raises
    ------
    BoundaryDegeneracy
        If a pole or zero lies on the unit circle.
    """
    if isinstance(F, RationalMatrix):
        if F.shape != (1, 1):
            raise ValueError("interpolation_data expects a scalar F; use synthesize_diagonal for diagonal F")
        F = F[0, 0]
    F = simplify(F)
    if F.is_zero():
        return []
    nodes = []
    for kind, rts in (("pole", _finite_roots(F.den)), ("zero", _finite_roots(F.num))):
        for r in rts:
            if abs(abs(r) - 1) <= _BOUNDARY:
                raise BoundaryDegeneracy(f"{kind} at {r:.6g} lies on the unit circle")
            if abs(r) > 1:
                xi = 1 / r
                nodes.append(Node(complex(xi.real, xi.imag if abs(xi.imag) > 1e-12 else 0.0), kind, channel))
    for _ in range(max(F.relative_degree, 0)):
        nodes.append(Node(0j, "zero", channel))
    if nodes and not any(n.kind == "zero" for n in nodes):
        # only vanishing targets would give Q = 0; pin Q(inf) = 1, i.e. H(inf) = 0
        nodes.append(Node(0j, "zero", channel))
    return nodes


def _check_simple(nodes):
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            if abs(a.xi - b.xi) <= 1e-9:
                raise MultiplicityUnsupported(f"repeated interpolation node at xi = {a.xi:.6g}")


def choose_centre(nodes) -> float:
    """Real pole node with the largest ``xi``, else real zero node, else 0."""
    for kind in ("pole", "zero", "other"):
        real = sorted((n.xi.real for n in nodes if n.kind == kind and abs(n.xi.imag) <= 1e-12), reverse=True)
        if real:
            return float(real[0])
    return 0.0


def mobius_recentre(xi, xi0: float):
    """``z = (xi - xi0) / (1 - xi0 xi)``; sends ``xi0`` to the origin."""
    xi = np.asarray(xi, dtype=complex)
    return (xi - xi0) / (1 - np.conj(xi0) * xi)


def mobius_restore(z, xi0: float):
    z = np.asarray(z, dtype=complex)
    return (z + xi0) / (1 + np.conj(xi0) * z)


def blaschke(points) -> RationalFunction:
    """Scalar Blaschke product ``prod (xi - a) / (1 - conj(a) xi)`` in ``xi``."""
    num = Polynomial([1.0])
    den = Polynomial([1.0])
    for a in points:
        num = num * Polynomial([-a, 1.0])
        den = den * Polynomial([1.0, -np.conj(a)])
    return RationalFunction(num, den)


def schur_to_caratheodory(f, flipped: bool = False):
    """``phi = (1 - f) / (2 (1 + f))``, or its reciprocal form when ``flipped``.

    ``flipped=True`` uses ``phi = (1 + f) / (2 (1 - f))``.  Both forms
    lead to the same central Schur function.
    """
    f = np.asarray(f, dtype=complex)
    bad = np.isclose(f, 1.0 if flipped else -1.0, atol=1e-14)
    if np.any(bad):
        raise PoleAtMinusOne("Schur value makes the Cayley transform singular")
    if flipped:
        out = 0.5 * (1 + f) / (1 - f)
    else:
        out = 0.5 * (1 - f) / (1 + f)
    return out if out.ndim else complex(out)


def caratheodory_to_schur_rf(phi: RationalFunction, flipped: bool = False) -> RationalFunction:
    two = RationalFunction.const(2.0)
    if flipped:
        return (two * phi - 1.0) / (two * phi + 1.0)
    return (1.0 - two * phi) / (1.0 + two * phi)


def pick_matrix(problem: InterpProblem):
    w = problem.phi_values
    z = problem.nodes
    return (w[:, None] + np.conj(w)[None, :]) / (1 - z[:, None] * np.conj(z)[None, :])


def pick_feasible(problem: InterpProblem) -> bool:
    if len(problem) == 0:
        return True
    P = pick_matrix(problem)
    P = 0.5 * (P + P.conj().T)
    return bool(np.min(np.linalg.eigvalsh(P)) > 1e-12 * max(1.0, np.max(np.abs(P))))


# ---------------------------------------------------------------------------
# two-node closed form


def solve_ceq(u: float, U: float, sigma: float = 0.0) -> float:
    """Unique root in ``[0, 1)`` of ``p = sigma^2 (p - p^2) + (u + U sigma - U sigma p)^2``.

    Raises
    ------
    NoAdmissibleRoot
        When no root lies in ``[0, 1)``.
    """
    if not -1 < sigma < 1:
        raise ValueError("sigma must lie in (-1, 1)")
    c = u + U * sigma
    d = U * sigma
    a2, a1, a0 = d * d - sigma * sigma, sigma * sigma - 2 * c * d - 1, c * c
    if abs(a2) < 1e-15:
        cands = np.array([-a0 / a1])
    else:
        cands = np.roots([a2, a1, a0])
    cands = [float(r.real) for r in np.atleast_1d(cands) if abs(np.imag(r)) < 1e-12]
    good = [r for r in cands if -1e-15 <= r < 1]
    if not good:
        raise NoAdmissibleRoot(f"no root of the quadratic lies in [0, 1) (u={u:.6g}, U={U:.6g}, sigma={sigma:.6g})")
    return max(0.0, min(good))


def closed_form_phi(z1, f1, sigma: float = 0.0) -> RationalFunction:
    """Two-node solution with ``f(0) = 0`` and ``f(z1) = f1``.

    Returns ``phi = (1 + b z) / (2 (1 + a z))`` with ``u = -f1/z1``,
    ``U = -f1``, ``a = (1-U) sigma (1-p) - u`` and ``b = (1+U) sigma (1-p) + u``.
    """
    z1, f1 = float(np.real(z1)), float(np.real(f1))
    u = -f1 / z1
    U = -f1
    p = solve_ceq(u, U, sigma)
    a = (1 - U) * sigma * (1 - p) - u
    b = (1 + U) * sigma * (1 - p) + u
    return RationalFunction(Polynomial([0.5, 0.5 * b]), Polynomial([1.0, a]))


# ---------------------------------------------------------------------------
# general central solution


def _grid_size(nodes):
    r = max([abs(z) for z in nodes] + [0.5])
    return int(2 ** np.ceil(np.log2(max(4096, 40 / -np.log(r)))))


def _moment_residual(t, nodes, targets, e, cos_table, kernels):
    T = t[0] + 2 * cos_table @ t[1:] if len(t) > 1 else np.full(len(e), t[0])
    Phi = 1 / T
    out = []
    for (k, z), w in zip(enumerate(nodes), targets):
        val = np.mean(kernels[k] * Phi)
        out.append(val.real - w.real)
        if z.imag > 1e-12:
            out.append(val.imag - w.imag)
    return np.array(out)


def _unknown_layout(nodes):
    """Keep one node from each conjugate pair, since data is conjugate-symmetric."""
    keep = []
    for i, z in enumerate(nodes):
        if z.imag < -1e-12:
            continue
        keep.append(i)
    return keep


def central_phi(problem: InterpProblem, continuation_steps: int = 8) -> RationalFunction:
    """Central Caratheodory interpolant for any number of simple nodes.

    Finds the positive trigonometric polynomial ``T`` of degree ``n`` with
    ``Phi = 1/T`` reproducing the targets through the Herglotz integral,
    then factors ``T = |a|^2 / kappa`` and solves for ``b`` with
    ``Re(b conj(a)) = kappa`` on the circle.  ``phi = b / (2 a)``.
    """
    nodes = problem.nodes
    targets = problem.phi_values
    N = len(nodes)
    if N == 0:
        return RationalFunction.const(0.5)
    keep = _unknown_layout(nodes)
    kn, kt = nodes[keep], targets[keep]
    n = N - 1
    G = _grid_size(nodes)
    th = 2 * np.pi * np.arange(G) / G
    e = np.exp(1j * th)
    cos_table = np.cos(np.outer(th, np.arange(1, n + 1)))
    kernels = [0.5 * (e + z) / (e - z) for z in kn]

    def solve(tg, t0):
        sol = root(_moment_residual, t0, args=(kn, tg, e, cos_table, kernels), method="hybr",
                   options={"xtol": 1e-14, "maxfev": 4000})
        return sol.x, np.max(np.abs(_moment_residual(sol.x, kn, tg, e, cos_table, kernels)))

    def positive(t):
        T = t[0] + 2 * cos_table @ t[1:] if n else np.full(G, t[0])
        return np.min(T) > 0

    t0 = np.r_[1.0, np.zeros(n)]
    t, res = solve(kt, t0)
    if res > 1e-11 or not positive(t):
        # homotopy from the trivial data phi = 1/2
        t = t0
        for lam in np.linspace(0, 1, continuation_steps + 1)[1:]:
            t, res = solve(0.5 + lam * (kt - 0.5), t)
            if not positive(t):
                break
        if res > 1e-10 or not positive(t):
            raise NoAdmissibleRoot("moment equations have no positive solution; gamma may be too small")
    if n == 0:
        return RationalFunction.const(float(0.5 / t[0]))
    c = np.r_[t[::-1][:-1], t]
    r = npoly.polyroots(c)
    outside = r[np.abs(r) > 1]
    if len(outside) != n:
        raise NoAdmissibleRoot("spectral factorization failed: T has roots on the unit circle")
    a = np.real_if_close(npoly.polyfromroots(outside))
    a = np.real(a / a[0]) if np.max(np.abs(np.imag(a))) < 1e-9 * np.max(np.abs(a)) else a / a[0]
    T = t[0] + 2 * cos_table @ t[1:]
    kappa = float(np.mean(np.abs(npoly.polyval(e, a)) ** 2 / T))
    M = np.zeros((n + 1, n + 1), dtype=a.dtype)
    for lag in range(n + 1):
        for j in range(n + 1):
            if 0 <= j - lag <= n:
                M[lag, j] += a[j - lag]
            if 0 <= j + lag <= n:
                M[lag, j] += a[j + lag]
    rhs = np.zeros(n + 1)
    rhs[0] = 2 * kappa
    b = np.linalg.solve(M, rhs)
    return RationalFunction(Polynomial(0.5 * b), Polynomial(a))


def central_solution(problem: InterpProblem) -> RationalFunction:
    """Caratheodory interpolant for ``problem``.

    Uses the quadratic closed form when there are exactly two nodes, the
    first at the origin with ``f = 0`` (this is the only case where
    ``sigma != 0`` is supported), otherwise the moment-matching solver.
    """
    if not pick_feasible(problem):
        raise NoAdmissibleRoot("Pick matrix is not positive definite", suggested_gamma=suggest_gamma(problem))
    two_node = (len(problem) == 2 and abs(problem.nodes[0]) < 1e-14 and abs(problem.schur_values[0]) < 1e-15
                and abs(problem.nodes[1].imag) < 1e-14 and abs(problem.schur_values[1].imag) < 1e-15)
    if two_node:
        phi = closed_form_phi(problem.nodes[1].real, problem.schur_values[1].real, problem.sigma)
        if problem.flipped:
            phi = RationalFunction.const(0.25) / phi
        return simplify(phi)
    if problem.sigma != 0:
        raise NotImplementedError("sigma != 0 is supported only for one node at the origin plus one further node")
    return simplify(central_phi(problem))


def suggest_gamma(problem: InterpProblem, factor: float = 1.25) -> float | None:
    """Smallest doubling of gamma that makes the Pick matrix definite, padded by ``factor``."""
    base = problem.schur_values * problem.gamma
    g = problem.gamma
    for _ in range(60):
        g *= 2
        trial = InterpProblem(problem.nodes, base / g, g, 0.0, problem.xi0, problem.xi_nodes, problem.flipped)
        if np.all(np.abs(trial.schur_values) < 1) and pick_feasible(trial):
            return g * factor
    return None


# ---------------------------------------------------------------------------
# back to Q and H


@dataclass
class ChannelSynthesis:
    """Everything produced for one scalar channel."""

    F: RationalFunction
    Q: RationalFunction
    H: RationalFunction
    phi: RationalFunction
    f: RationalFunction
    problem: InterpProblem
    nodes: list
    weight: RationalFunction
    residuals: dict


@dataclass
class SensitivityPair:
    Q: RationalMatrix
    P: RationalMatrix


def q_from_phi(phi: RationalFunction, problem: InterpProblem, weight: RationalFunction | None = None):
    """Undo the Cayley and Moebius maps and return ``(Q, f)``.

    ``f(z)`` is the Schur function in recentred coordinates and
    ``Q(z) = gamma * f(xi) / weight(xi)`` evaluated at ``xi = 1/z``.
    """
    f = caratheodory_to_schur_rf(phi, problem.flipped)
    xi0 = problem.xi0
    # recentred variable as a function of z through xi = 1/z
    fq = f.substitute_mobius(-xi0, 1.0, 1.0, -xi0)
    Q = fq * problem.gamma
    if weight is not None:
        Q = Q / weight.paraconj()
    return simplify(Q), f


def _scalar_checks(F: RationalFunction, Q: RationalFunction, nodes, gamma, grid):
    res = {}
    pole_vals = [abs(Q(n.z)) for n in nodes if n.kind == "pole"]
    zero_vals = [abs(Q(n.z) - 1) for n in nodes if n.kind == "zero" and n.xi != 0]
    if any(n.kind == "zero" and n.xi == 0 for n in nodes):
        lead = Q.num.lead / Q.den.lead if Q.num.degree == Q.den.degree else (0.0 if Q.num.degree < Q.den.degree else np.inf)
        zero_vals.append(abs(lead - 1))
    res["pole_interp"] = float(max(pole_vals, default=0.0))
    res["zero_interp"] = float(max(zero_vals, default=0.0))
    qp = Q.poles()
    res["q_radius"] = float(np.max(np.abs(qp))) if len(qp) else 0.0
    res["q_hinf"] = float(np.max(np.abs(Q(grid.points))))
    res["gamma"] = gamma
    return res


def h_from_q(F: RationalMatrix, Q: RationalMatrix | None = None, P: RationalMatrix | None = None,
             probe: complex = 2.0) -> RationalMatrix:
    """Solve ``F H = I - Q^{-1}`` (or ``H F = I - P^{-1}``) for H.

    For square F both routes coincide and the Q route is used.  Otherwise
    the Gram matrices ``F* F`` and ``F F*`` are compared by condition
    number at ``probe`` and the better conditioned one decides the route.

    Raises
    ------
    PseudoInverseFailure
        If the needed Gram matrix is singular or the needed sensitivity is
        missing.
    """
    rows, cols = F.shape
    Fs = F.para()
    if rows == cols:
        path = "Q"
    else:
        g1 = (Fs @ F)(probe)
        g2 = (F @ Fs)(probe)
        c1, c2 = np.linalg.cond(g1), np.linalg.cond(g2)
        path = "Q" if c1 <= c2 else "P"
    try:
        if path == "Q":
            if Q is None:
                raise PseudoInverseFailure("the Q route was selected but Q was not supplied")
            left = rm_inverse(F) if rows == cols else rm_inverse(Fs @ F) @ Fs
            return (left @ (RationalMatrix.identity(Q.rows) - rm_inverse(Q))).simplify()
        if P is None:
            raise PseudoInverseFailure("the P route was selected but P was not supplied")
        right = Fs @ rm_inverse(F @ Fs)
        return ((RationalMatrix.identity(P.rows) - rm_inverse(P)) @ right).simplify()
    except Exception as exc:
        if isinstance(exc, PseudoInverseFailure):
            raise
        raise PseudoInverseFailure(f"pseudo-inverse of F does not exist: {exc}") from exc


def _build_problem(nodes, own_channel, gamma, sigma, xi0, weight, flipped):
    xi = np.array([n.xi for n in nodes], dtype=complex)
    vals = []
    for n in nodes:
        if n.channel != own_channel or n.kind == "pole":
            vals.append(0.0)
        else:
            w = weight(n.xi) if weight is not None else 1.0
            vals.append(w / gamma)
    vals = np.array(vals, dtype=complex)
    z = mobius_recentre(xi, xi0)
    order = np.lexsort((z.imag, np.abs(z)))
    return InterpProblem(z[order], vals[order], gamma, sigma, xi0, xi[order], flipped)


def synthesize_diagonal(F: RationalMatrix, gamma: float = DEFAULT_GAMMA, sigma: float = 0.0,
                        coupled: bool = True, flipped: bool = False, grid: UnitCircleGrid | None = None):
    """Per-channel synthesis for a square diagonal F.

    With ``coupled=True`` every channel sees the nodes of all channels:
    its Schur target is weighted by the Blaschke product of the other
    channels' nodes and must vanish there, and a common Moebius centre is
    used.  ``coupled=False`` solves each channel on its own nodes.

    Returns
    -------
    Q, H : RationalMatrix
    channels : list of ChannelSynthesis
    """
    if not F.is_square() or any(not F[i, j].is_zero() for i in range(F.rows) for j in range(F.cols) if i != j):
        raise ValueError("synthesize_diagonal needs a square diagonal F")
    grid = grid or UnitCircleGrid.default()
    k = F.rows
    per = []
    errors = []
    for i in range(k):
        try:
            per.append(interpolation_data(F[i, i], gamma, channel=i))
        except Exception as exc:  # aggregate with channel index
            errors.append((i, exc))
            per.append([])
    if errors:
        i, exc = errors[0]
        raise type(exc)(f"channel {i}: {exc}") from exc
    all_nodes = [n for ch in per for n in ch]
    if coupled:
        _check_simple(all_nodes)
        xi0 = choose_centre(all_nodes)
    channels = []
    for i in range(k):
        Fi = simplify(F[i, i])
        own = per[i]
        _check_simple(own)
        if not own:
            channels.append(_trivial_channel(Fi, gamma, sigma, flipped))
            continue
        if coupled:
            others = [n.xi for n in all_nodes if n.channel != i]
            weight = blaschke(others) if others else None
            nodes = [n if n.channel == i else Node(n.xi, "other", n.channel) for n in all_nodes]
            centre = xi0
        else:
            weight, nodes, centre = None, own, choose_centre(own)
        try:
            prob = _build_problem(nodes, i, gamma, sigma, centre, weight, flipped)
            phi = central_solution(prob)
            Q, f = q_from_phi(phi, prob, weight)
        except Exception as exc:
            raise type(exc)(f"channel {i}: {exc}") from exc
        H = simplify(Fi.inv() * (1.0 - Q.inv())) if not Fi.is_zero() else RationalFunction.const(0.0)
        res = _scalar_checks(Fi, Q, own, gamma, grid)
        loop = (1.0 - Fi * H)
        res["loop_identity"] = float(np.max(np.abs(loop(grid.points) * Q(grid.points) - 1)))
        channels.append(ChannelSynthesis(Fi, Q, H, phi, f, prob, own, weight or RationalFunction.const(1.0), res))
    Q = RationalMatrix.diag([c.Q for c in channels])
    H = RationalMatrix.diag([c.H for c in channels])
    for idx, c in enumerate(channels):
        bad = (c.residuals["pole_interp"] > 1e-8 or c.residuals["zero_interp"] > 1e-8
               or c.residuals["q_radius"] >= 1 - 1e-10)
        if bad:
            raise ContractViolation(f"channel {idx}: sensitivity fails its interpolation or stability conditions "
                                    f"({c.residuals})")
    return Q, H, channels


def _trivial_channel(Fi, gamma, sigma, flipped):
    one = RationalFunction.const(1.0)
    prob = InterpProblem(np.zeros(0), np.zeros(0), gamma, sigma, 0.0, np.zeros(0), flipped)
    res = {"pole_interp": 0.0, "zero_interp": 0.0, "q_radius": 0.0, "q_hinf": 1.0, "gamma": gamma,
           "loop_identity": 0.0}
    return ChannelSynthesis(Fi, one, RationalFunction.const(0.0), RationalFunction.const(0.5),
                            RationalFunction.const(0.0), prob, [], one, res)


def synthesize_scalar(F, gamma: float = DEFAULT_GAMMA, sigma: float = 0.0, flipped: bool = False, grid=None):
    """Scalar synthesis; returns a :class:`ChannelSynthesis`."""
    if isinstance(F, RationalFunction):
        F = RationalMatrix.scalar(F)
    _, _, ch = synthesize_diagonal(F, gamma, sigma, coupled=False, flipped=flipped, grid=grid)
    return ch[0]


def sensitivities(F: RationalMatrix, H: RationalMatrix, Q: RationalMatrix | None = None) -> SensitivityPair:
    """``Q = (I - F H)^{-1}`` (if not given) and ``P = I + H Q F``."""
    if Q is None:
        Q = rm_inverse(RationalMatrix.identity(F.rows) - F @ H)
    P = RationalMatrix.identity(H.rows) + H @ Q @ F
    return SensitivityPair(Q.simplify(), P.simplify())


# ---------------------------------------------------------------------------
# bilinear map


def tustin(F: RationalMatrix) -> RationalMatrix:
    """``G(s) = F((1 + s) / (1 - s))``.

    Warns with :class:`ImproperResultWarning` when F has a pole at
    ``z = -1``, where G is not proper.
    """
    poles = F.poles()
    if poles.size and np.min(np.abs(poles + 1)) < 1e-9:
        warnings.warn("F has a pole at z = -1; the transformed function is improper", ImproperResultWarning,
                      stacklevel=2)
    return F.map(lambda e: e.substitute_mobius(1.0, 1.0, -1.0, 1.0))


def inverse_tustin(G: RationalMatrix) -> RationalMatrix:
    """``F(z) = G((z - 1) / (z + 1))``."""
    return G.map(lambda e: e.substitute_mobius(1.0, -1.0, 1.0, 1.0))


def interpolation_points_s(G: RationalMatrix):
    """Right-half-plane poles and zeros of a diagonal ``G(s)``, per channel."""
    out = []
    for i in range(min(G.shape)):
        g = simplify(G[i, i])
        pts = {"pole": [complex(r) for r in _finite_roots(g.den) if r.real > 0],
               "zero": [complex(r) for r in _finite_roots(g.num) if r.real > 0]}
        out.append(pts)
    return out

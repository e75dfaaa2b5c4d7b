"""Closed-form expected landscape of the recovery objective under wide
Gaussian layers: the angle contraction map, the expected step direction,
the expected risk, and the spurious-point multiplier on the negative ray.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LandscapeEval:
    """Expected-landscape diagnostics at one point (x relative to xstar)."""

    d: int
    theta_bars: np.ndarray
    h: np.ndarray
    f_expected: float


@dataclass(frozen=True)
class RhoTable:
    """Spurious-point multipliers rho_d with their 1 - rho_d bound."""

    d_values: tuple
    rho_values: tuple

    def rows(self):
        for d, r in zip(self.d_values, self.rho_values):
            yield d, r, 250.0 / (d + 1)


def g_theta(theta):
    """One-layer angle contraction: acos(((pi - t) cos t + sin t) / pi).

    Maps [0, pi] into itself; fixes 0 and pulls every other angle down.
    The acos argument is clamped to [-1, 1] against floating-point drift
    at the endpoints.
    """
    if theta < 0 or theta > math.pi:
        raise ValueError(f"angle must lie in [0, pi], got {theta}")
    u = ((math.pi - theta) * math.cos(theta) + math.sin(theta)) / math.pi
    return math.acos(min(1.0, max(-1.0, u)))


def theta_sequence(theta0, d):
    """[theta_0, g(theta_0), ..., g^{d-1}(theta_0)]."""
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    thetas = np.empty(d)
    thetas[0] = theta0
    if theta0 < 0 or theta0 > math.pi:
        raise ValueError(f"angle must lie in [0, pi], got {theta0}")
    for i in range(1, d):
        thetas[i] = g_theta(thetas[i - 1])
    return thetas


def angle(x, y):
    """Angle between nonzero vectors in [0, pi].

    Uses atan2 of the orthogonal decomposition, which stays accurate for
    nearly parallel and nearly antiparallel pairs where acos of the dot
    product loses precision.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("angle is undefined for zero vectors")
    xh = x / nx
    yh = y / ny
    c = float(xh @ yh)
    s = float(np.linalg.norm(yh - c * xh))
    return math.atan2(s, c)


def _tail_products(thetas):
    """tail[i] = prod_{j > i} (pi - theta_j) / pi, tail[d-1] = 1."""
    d = len(thetas)
    tail = np.ones(d)
    for i in range(d - 2, -1, -1):
        tail[i] = tail[i + 1] * (math.pi - thetas[i + 1]) / math.pi
    return tail


def _sine_weighted_sum(thetas):
    tail = _tail_products(thetas)
    return float(np.sum(np.sin(thetas) / math.pi * tail))


def _h_tilde(x, y, d, thetas):
    full_prod = float(np.prod((math.pi - thetas) / math.pi))
    coeff = _sine_weighted_sum(thetas)
    xh = x / np.linalg.norm(x)
    return (full_prod * y + coeff * np.linalg.norm(y) * xh) / 2.0 ** d


def h_direction(x, y, d):
    """Expected step direction x / 2^d - h~_{x,y} for a depth-d network.

    Vanishes at x = y and at x = -rho_d * y, the two points where the
    expected landscape is stationary away from the origin.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not np.any(x) or not np.any(y):
        raise ValueError("h_direction requires nonzero x and y")
    thetas = theta_sequence(angle(x, y), d)
    return x / 2.0 ** d - _h_tilde(x, y, d, thetas)


def expected_risk(x, xstar, d):
    """Closed-form expected objective at x for ground truth xstar.

    Zero at xstar (the global minimum).  At x = 0, where the angle is
    undefined, returns the analytic limit ||xstar||^2 / 2^{d+1}, the value
    of the local maximum at the origin.
    """
    x = np.asarray(x, dtype=np.float64)
    xstar = np.asarray(xstar, dtype=np.float64)
    if not np.any(xstar):
        raise ValueError("expected_risk requires nonzero xstar")
    quad_star = float(xstar @ xstar) / 2.0 ** (d + 1)
    if not np.any(x):
        return quad_star
    thetas = theta_sequence(angle(x, xstar), d)
    ht = _h_tilde(x, xstar, d, thetas)
    return float(x @ x) / 2.0 ** (d + 1) - float(x @ ht) + quad_star


def rho(d):
    """Multiplier rho_d of the spurious stationary point -rho_d * xstar.

    Defined by the angle recursion started at pi: rho_1 = 0, rho_2 = 1/pi,
    and rho_d increases toward 1 as depth grows.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    return _sine_weighted_sum(theta_sequence(math.pi, d))


def rho_table(d_values):
    d_values = tuple(int(d) for d in d_values)
    return RhoTable(d_values=d_values, rho_values=tuple(rho(d) for d in d_values))


def landscape_eval(x, xstar, d):
    """Bundle of expected-landscape quantities at x; for diagnostics."""
    x = np.asarray(x, dtype=np.float64)
    xstar = np.asarray(xstar, dtype=np.float64)
    return LandscapeEval(
        d=d,
        theta_bars=theta_sequence(angle(x, xstar), d),
        h=h_direction(x, xstar, d),
        f_expected=expected_risk(x, xstar, d),
    )


def q_matrix(x, y):
    """Expected masked Gram matrix ((pi - t)/2pi) I + (sin t / 2pi) M.

    M is the symmetric map exchanging the unit directions of x and y and
    annihilating their orthocomplement; for parallel inputs it degenerates
    to the rank-one projector onto the common direction.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not np.any(x) or not np.any(y):
        raise ValueError("q_matrix requires nonzero x and y")
    k = x.shape[0]
    xh = x / np.linalg.norm(x)
    yh = y / np.linalg.norm(y)

    # c, s are the exact cosine and sine of the angle; using s directly
    # (rather than sin(theta) for the rounded theta) keeps Q exactly zero
    # at antiparallel inputs
    c = float(xh @ yh)
    p = yh - c * xh
    s = float(np.linalg.norm(p))
    theta = math.atan2(s, c)
    if s > 1e-12:
        u = p / s
        # reflection of span{x, y} across the bisector of xh and yh
        M = (
            c * np.outer(xh, xh)
            + s * (np.outer(xh, u) + np.outer(u, xh))
            - c * np.outer(u, u)
        )
    elif c >= 0:
        M = np.outer(xh, xh)
    else:
        M = -np.outer(xh, xh)
    return ((math.pi - theta) / (2 * math.pi)) * np.eye(k) + (
        s / (2 * math.pi)
    ) * M

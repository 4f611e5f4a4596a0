"""2x2 su(1,1) machinery behind the closed-form propagator.

The Lindblad part of the vectorized master equation is generated by an
su(1,1) element; in the defining representation that element is

    A = [[-(mu+nu)/2, nu], [-mu, (mu+nu)/2]],

which satisfies A^2 = ((mu-nu)/2)^2 * I. Its exponential therefore has the
hyperbolic closed form implemented by :func:`flow`, and a Gauss
decomposition of exp(tA) into upper * diagonal * lower triangular factors
yields the three scalars (raising amplitude G, scaling F, lowering
amplitude E) that disentangle the full superoperator exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Switch to the mu -> nu limit formulas when |mu - nu| * t / 2 falls below
#: this; the discarded Taylor remainder is O(threshold^2) ~ 1e-12.
DEGENERACY_THRESHOLD = 1e-6

# cosh/sinh overflow just above 710; refuse earlier with a clear message.
_MAX_HALF_SPREAD = 700.0


@dataclass(frozen=True)
class DisentanglingCoefficients:
    """Scalars (E, F, G) of the factored propagator at time t.

    F scales the number operator (the diagonal factor is diag(1/F, F) in the
    2x2 picture), E weights powers of the lowering sandwich a^m rho a^dag^m,
    and G weights the raising sandwich. Sign convention: the lower Gauss
    factor of exp(tA) is [[1, 0], [-E, 1]], which equals exp(E k_minus)
    because k_minus carries the -1 entry.
    """

    e_coef: float
    f_coef: float
    g_coef: float
    t: float
    mu: float
    nu: float
    degenerate_branch: bool

    def __post_init__(self):
        if not self.f_coef > 0:
            raise ValueError(f"scaling coefficient must be positive, got {self.f_coef!r}")


def k_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Defining 2x2 matrices (k_plus, k_minus, k3) of su(1,1).

    Note k_minus is not the adjoint of k_plus: it is -k_plus^T.
    """
    k_plus = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    k_minus = np.array([[0.0, 0.0], [-1.0, 0.0]], dtype=complex)
    k3 = np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex)
    return k_plus, k_minus, k3


def generator(mu: float, nu: float) -> np.ndarray:
    """The traceless 2x2 generator nu*k_plus + mu*k_minus - (mu+nu)*k3."""
    return np.array(
        [[-0.5 * (mu + nu), nu], [-mu, 0.5 * (mu + nu)]], dtype=complex
    )


def flow(
    mu: float,
    nu: float,
    t: float,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> np.ndarray:
    """exp(t * generator(mu, nu)) in closed form.

    With x = (mu-nu)t/2 the entries are cosh(x) -/+ ((mu+nu)/(mu-nu))sinh(x)
    on the diagonal and (2nu/(mu-nu))sinh(x), -(2mu/(mu-nu))sinh(x) off it.
    Below the degeneracy threshold on |x| the formulas are 0/0 and the exact
    nilpotent limit I + tA is returned instead (A^2 = x^2/t^2 * I). The
    result has determinant 1 up to rounding.
    """
    if not (math.isfinite(mu) and math.isfinite(nu) and math.isfinite(t)):
        raise ValueError("mu, nu, t must be finite")
    if mu < 0 or nu < 0:
        raise ValueError(f"mu and nu must be non-negative, got mu={mu}, nu={nu}")
    x = 0.5 * (mu - nu) * t
    if abs(x) <= degeneracy_threshold:
        return np.eye(2, dtype=complex) + t * generator(mu, nu)
    if abs(x) > _MAX_HALF_SPREAD:
        raise ValueError(f"|mu - nu| * t / 2 = {abs(x):.3g} overflows double precision")
    ch = math.cosh(x)
    sh = math.sinh(x)
    ratio = (mu + nu) / (mu - nu)
    return np.array(
        [
            [ch - ratio * sh, (2.0 * nu / (mu - nu)) * sh],
            [-(2.0 * mu / (mu - nu)) * sh, ch + ratio * sh],
        ],
        dtype=complex,
    )


def gauss_decompose(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factor a determinant-one 2x2 matrix as upper * diagonal * lower.

    [[a, b], [c, d]] = [[1, b/d], [0, 1]] [[1/d, 0], [0, d]] [[1, 0], [c/d, 1]]
    requires det = 1 (within 1e-10) and d != 0.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > 1e-10 * max(1.0, float(np.abs(m).max()) ** 2):
        raise ValueError(f"matrix must have determinant 1, got {det}")
    d = m[1, 1]
    if abs(d) <= 1e-12:
        raise ValueError("lower-right entry vanishes; Gauss decomposition is singular")
    upper = np.array([[1.0, m[0, 1] / d], [0.0, 1.0]], dtype=complex)
    diag = np.array([[1.0 / d, 0.0], [0.0, d]], dtype=complex)
    lower = np.array([[1.0, 0.0], [m[1, 0] / d, 1.0]], dtype=complex)
    return upper, diag, lower


def disentangling_coefficients(
    mu: float,
    nu: float,
    t: float,
    degeneracy_threshold: float = DEGENERACY_THRESHOLD,
) -> DisentanglingCoefficients:
    """The scalars (E, F, G) factoring exp(t * generator(mu, nu)).

    Away from the degenerate direction, with x = (mu-nu)t/2:

        F = cosh(x) + ((mu+nu)/(mu-nu)) sinh(x)
        E = (2mu/(mu-nu)) sinh(x) / F
        G = (2nu/(mu-nu)) sinh(x) / F

    For |x| at or below the threshold the mu -> nu limit is used instead:
    F = 1 + t(mu+nu)/2, E = mu*t/F, G = nu*t/F. These are the Gauss factors
    of :func:`flow`: G = b/d, F = d and E = -c/d in the [[a,b],[c,d]]
    notation, so exp(tA) = exp(G k_plus) exp(-2 ln F k3) exp(E k_minus).
    """
    if not (math.isfinite(mu) and math.isfinite(nu) and math.isfinite(t)):
        raise ValueError("mu, nu, t must be finite")
    if mu < 0 or nu < 0:
        raise ValueError(f"mu and nu must be non-negative, got mu={mu}, nu={nu}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    x = 0.5 * (mu - nu) * t
    if abs(x) <= degeneracy_threshold:
        mean_rate = 0.5 * (mu + nu)
        f = 1.0 + mean_rate * t
        return DisentanglingCoefficients(
            e_coef=mu * t / f,
            f_coef=f,
            g_coef=nu * t / f,
            t=t,
            mu=mu,
            nu=nu,
            degenerate_branch=True,
        )
    if abs(x) > _MAX_HALF_SPREAD:
        raise ValueError(f"|mu - nu| * t / 2 = {abs(x):.3g} overflows double precision")
    sh = math.sinh(x)
    f = math.cosh(x) + ((mu + nu) / (mu - nu)) * sh
    return DisentanglingCoefficients(
        e_coef=(2.0 * mu / (mu - nu)) * sh / f,
        f_coef=f,
        g_coef=(2.0 * nu / (mu - nu)) * sh / f,
        t=t,
        mu=mu,
        nu=nu,
        degenerate_branch=False,
    )

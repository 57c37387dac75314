"""Flow engine for the Ansatz reduction of the modified Laplacian coflow.

The family phi_t = b^3 ReUpsilon + a b^2 eta ^ omega solves the modified
coflow iff a_t = eps b_t^-3 and

    db/dt = (1/2) eps b^-9 (A b^5 - eps).                       (rhs)

This module integrates that ODE with an embedded adaptive Runge-Kutta
pair, evaluates the closed-form A=0 solution, checks the implicit
separable relation, classifies the (A, eps) regime, locates blow-up, and
computes the curvature/torsion aggregate Lambda(t) with its Type I / IIa
singularity verdict.

Aside (recorded here only): a nearly parallel structure with
d phi = lam psi, d psi = 0 is a fixed point of the modified coflow when
A = (5/4) lam; no fixed-point analysis beyond this remark is implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_B_MIN = 1e-4
STEADY_TOL = 1e-14


@dataclass(frozen=True)
class AnsatzParams:
    """Flow parameters.

    epsilon: initial fiber radius (a_0 = epsilon, b_0 = 1).
    A: modification constant of the coflow correction term.
    c0: coefficient of |grad T|^2 = c0 a^4 b^-8 (model constant, default 0).
    rm0_sq: |Rm_0|^2 of the initial transverse metric (default 0 = flat).
    """

    epsilon: float
    A: float = 0.0
    c0: float = 0.0
    rm0_sq: float = 0.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.c0 < 0 or self.rm0_sq < 0:
            raise ValueError("c0 and rm0_sq must be nonnegative")


@dataclass(frozen=True)
class AnsatzState:
    t: float
    b: float

    @property
    def a(self):
        raise AttributeError("a depends on epsilon; use state_a(state, params)")


def make_state(t, b, params):
    if b <= 0:
        raise ValueError("b must be positive")
    return AnsatzState(t=t, b=b)


def state_a(state, params):
    """a_t = eps b_t^-3, the conserved-quantity constraint."""
    return params.epsilon * state.b**-3


def rhs(b, params):
    """db/dt = (1/2) eps b^-9 (A b^5 - eps)."""
    if b <= 0:
        raise ValueError("b must be positive")
    return 0.5 * params.epsilon * b**-9 * (params.A * b**5 - params.epsilon)


def rhs_b10(u, params):
    """The same flow for u = b^10: du/dt = 5 eps (A u^(1/2) - eps).

    Linear for A = 0 (du/dt = -5 eps^2), which makes this substitution an
    exact internal oracle for the primary integrator.
    """
    if u <= 0:
        raise ValueError("u must be positive")
    return 5.0 * params.epsilon * (params.A * math.sqrt(u) - params.epsilon)


@dataclass
class Trajectory:
    params: AnsatzParams
    times: list = field(default_factory=list)
    bs: list = field(default_factory=list)
    termination: str = "horizon"  # horizon | steady | blow-up
    n_accepted: int = 0
    n_rejected: int = 0
    b_min: float = DEFAULT_B_MIN

    def states(self):
        return [AnsatzState(t=t, b=b) for t, b in zip(self.times, self.bs)]

    @property
    def final_t(self):
        return self.times[-1]

    @property
    def final_b(self):
        return self.bs[-1]

    def a_series(self):
        return [self.params.epsilon * b**-3 for b in self.bs]

    def volume_series(self):
        """Relative total volume a b^6 = eps b^3 along the flow."""
        return [self.params.epsilon * b**3 for b in self.bs]


# Dormand-Prince 5(4) embedded pair.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)


def integrate(params, t_end, tol=1e-10, b_min=DEFAULT_B_MIN, max_steps=2_000_000,
              variable="b"):
    """Adaptive embedded Runge-Kutta integration of the coflow ODE.

    Integrates b (or u = b^10 with ``variable='u'`` as a cross-check) from
    b_0 = 1, recomputing a = eps b^-3 per accepted step.  Stops early at a
    steady state (|db/dt| < 1e-14) or at the blow-up guard b < b_min; step
    underflow near collapse is reported as blow-up, not as a failure.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    if variable == "b":
        f = lambda y: rhs(y, params)
        to_b = lambda y: y
        guard = b_min
        y = 1.0
    elif variable == "u":
        f = lambda y: rhs_b10(y, params)
        to_b = lambda y: y ** (1 / 10)
        guard = b_min**10
        y = 1.0
    else:
        raise ValueError("variable must be 'b' or 'u'")

    traj = Trajectory(params=params, b_min=b_min)
    t = 0.0
    traj.times.append(t)
    traj.bs.append(to_b(y))

    dy = f(y)
    if abs(dy) < STEADY_TOL:
        traj.termination = "steady"
        # constant solution: record the horizon endpoint as well
        traj.times.append(t_end)
        traj.bs.append(to_b(y))
        traj.n_accepted = 1
        return traj

    h = min(0.01, t_end / 10, 0.1 / abs(dy))
    safety, minscale, maxscale = 0.9, 0.2, 5.0
    for _ in range(max_steps):
        if t >= t_end:
            traj.termination = "horizon"
            return traj
        h = min(h, t_end - t)
        if h < 1e-16 * max(1.0, t):
            traj.termination = "blow-up"
            return traj
        try:
            k = [f(y)]
            ok = True
            for i in range(1, 7):
                yi = y + h * sum(a * kk for a, kk in zip(_DP_A[i], k))
                if yi <= guard * 0.5:
                    ok = False
                    break
                k.append(f(yi))
        except ValueError:
            ok = False
        if not ok:
            h *= 0.5
            traj.n_rejected += 1
            if h < 1e-16 * max(1.0, t):
                traj.termination = "blow-up"
                return traj
            continue
        y5 = y + h * sum(b * kk for b, kk in zip(_DP_B5, k))
        y4 = y + h * sum(b * kk for b, kk in zip(_DP_B4, k))
        err = abs(y5 - y4)
        scale = tol * max(1.0, abs(y), abs(y5))
        if err <= scale or h <= 1e-15 * max(1.0, t):
            t += h
            y = y5
            traj.n_accepted += 1
            traj.times.append(t)
            traj.bs.append(to_b(y))
            if y <= guard:
                traj.termination = "blow-up"
                return traj
            if abs(f(y)) < STEADY_TOL:
                traj.termination = "steady"
                return traj
        else:
            traj.n_rejected += 1
        ratio = (scale / err) ** 0.2 if err > 0 else maxscale
        h *= min(maxscale, max(minscale, safety * ratio))
    raise RuntimeError("integrator exceeded max_steps")


def closed_form_A0(t, epsilon):
    """Exact A = 0 solution: a = eps (1-5 eps^2 t)^(-3/10), b = (1-5 eps^2 t)^(1/10)."""
    blow = 1.0 / (5.0 * epsilon**2)
    if t >= blow:
        raise ValueError(f"t = {t} is at or beyond the blow-up time {blow}")
    s = 1.0 - 5.0 * epsilon**2 * t
    return AnsatzState(t=t, b=s**0.1)


def implicit_residual(state, params):
    """LHS - RHS of the separable implicit solution (A != 0, A != eps):

    b^5/(5A) + eps/(5A^2) ln|A b^5 - eps| = eps t/2 + 1/(5A) + eps/(5A^2) ln|A - eps|.
    """
    A, eps = params.A, params.epsilon
    if A == 0 or A == eps:
        raise ValueError("implicit relation requires A != 0 and A != eps")
    b5 = state.b**5
    if A * b5 == eps:
        raise ValueError("relation is singular at A b^5 = eps")
    lhs = b5 / (5 * A) + eps / (5 * A**2) * math.log(abs(A * b5 - eps))
    rhs_val = 0.5 * eps * state.t + 1 / (5 * A) + eps / (5 * A**2) * math.log(abs(A - eps))
    return lhs - rhs_val


@dataclass
class RegimeReport:
    condition: str               # 'A<0' | 'A=0' | '0<A<eps' | 'A=eps' | 'A>eps'
    steady_state: float | None   # admissible steady value (b > 0), else None
    steady_state_formal: float | None  # formal value (eps/A)^(1/5), sign included
    stability: str | None        # 'unstable' for admissible A>0 states
    monotonicity: str            # 'decreasing' | 'constant' | 'increasing'
    outcome: str                 # 'collapses' | 'constant' | 'grows'
    T_max: float                 # blow-up time, may be inf

    def to_dict(self):
        return {
            "condition": self.condition,
            "steady_state": self.steady_state,
            "steady_state_formal": self.steady_state_formal,
            "stability": self.stability,
            "monotonicity": self.monotonicity,
            "outcome": self.outcome,
            "T_max": self.T_max,
        }


def blowup_time(params):
    """Collapse time of b from b_0 = 1.

    A = 0: T = 1/(5 eps^2).  For A < eps (A != 0) the separable relation
    gives T = 2/(5 eps A) [ (eps/A) ln|eps/(eps-A)| - 1 ].  A >= eps: inf.
    """
    A, eps = params.A, params.epsilon
    if A >= eps:
        return math.inf
    if A == 0:
        return 1.0 / (5.0 * eps**2)
    return 2.0 / (5.0 * eps * A) * (eps / A * math.log(abs(eps / (eps - A))) - 1.0)


def extrapolate_blowup(traj):
    """Blow-up time from a guarded trajectory plus the exact tail integral.

    The remaining time from b_hit to 0 is the closed form of
    int_0^{b} 2 s^9 / (eps (eps - A s^5)) ds, obtained from the separable
    ODE; no integration into the stiff region is needed.
    """
    p = traj.params
    if traj.termination != "blow-up":
        raise ValueError("trajectory did not terminate by blow-up")
    b, t = traj.final_b, traj.final_t
    eps, A = p.epsilon, p.A
    v = b**5
    if A == 0:
        tail = v**2 / (5 * eps**2)
    else:
        tail = (2.0 / (5 * eps)) * (-v / A + eps / A**2 * math.log(eps / (eps - A * v)))
    return t + tail


def classify_regime(params):
    """Table row of the (A, eps) regime: steady state, monotonicity, outcome."""
    A, eps = params.A, params.epsilon
    formal = math.copysign(abs(eps / A) ** 0.2, eps / A) if A != 0 else None
    slope = rhs(1.0, params)
    if A < 0:
        return RegimeReport("A<0", None, formal, None, "decreasing", "collapses",
                            blowup_time(params))
    if A == 0:
        return RegimeReport("A=0", None, None, None, "decreasing", "collapses",
                            blowup_time(params))
    if A < eps:
        return RegimeReport("0<A<eps", formal, formal, "unstable", "decreasing",
                            "collapses", blowup_time(params))
    if A == eps:
        return RegimeReport("A=eps", 1.0, 1.0, "unstable", "constant", "constant",
                            math.inf)
    assert slope > 0
    return RegimeReport("A>eps", formal, formal, "unstable", "increasing", "grows",
                        math.inf)


def steady_state_slope(params):
    """d(rhs)/db at the steady state b* = (eps/A)^(1/5); positive = unstable."""
    if params.A == 0:
        raise ValueError("no steady state for A = 0")
    bstar = (params.epsilon / params.A) ** (1 / 5) if params.A > 0 else None
    if bstar is None:
        raise ValueError("no admissible steady state for A < 0")
    h = 1e-6 * bstar
    return (rhs(bstar + h, params) - rhs(bstar - h, params)) / (2 * h)


def lambda_t(state, params):
    """Curvature/torsion aggregate

    Lambda = b^-10 sqrt(b^16 |Rm_0|^2 + 2 c0 eps^4 + (15/4)^2 eps^4),

    the pointwise supremum of (|Rm|^2 + |T|^4 + |grad T|^2)^(1/2) along the
    Ansatz flow.  With c0 = rm0_sq = 0 this is (15/4) eps^2 b^-10.
    """
    eps = params.epsilon
    b = state.b
    inner = b**16 * params.rm0_sq + 2 * params.c0 * eps**4 + (15 / 4) ** 2 * eps**4
    return b**-10 * math.sqrt(inner)


def rm_sq(state, params):
    """|Rm_t|^2 = b^-4 |Rm_0|^2 + b^-20 c0 eps^4."""
    b = state.b
    return b**-4 * params.rm0_sq + b**-20 * params.c0 * params.epsilon**4


@dataclass
class SingularityReport:
    T_max: float
    type: str                    # 'TypeI' | 'TypeIIa' | 'none'
    sup_quantity: float | None   # observed sup over the sampled tail
    lambda_series: list

    def to_dict(self):
        return {
            "T_max": self.T_max,
            "type": self.type,
            "sup_quantity": self.sup_quantity,
            "n_samples": len(self.lambda_series),
        }


def classify_singularity(traj, params, T_max=None):
    """Type I iff (T - t) Lambda(t) stays bounded approaching the singularity.

    Operationally the tail samples over the last decade of (T - t) must be
    bounded by 10x their median (a non-increasing tail passes trivially).
    Returns type 'none' when there is no finite-time singularity.
    """
    if T_max is None:
        if traj.termination == "blow-up":
            T_max = extrapolate_blowup(traj)
        else:
            T_max = blowup_time(traj.params)
    lam = [lambda_t(s, params) for s in traj.states()]
    if not math.isfinite(T_max):
        return SingularityReport(math.inf, "none", None, lam)
    series = [(T_max - t) * l for t, l in zip(traj.times, lam) if T_max - t > 0]
    if len(series) < 3:
        raise ValueError("trajectory has too few samples before T_max")
    gaps = [T_max - t for t in traj.times if T_max - t > 0]
    d_min = gaps[-1]
    tail = [v for g, v in zip(gaps, series) if g <= 10 * d_min]
    if len(tail) < 3:
        tail = series[-3:]
    med = sorted(tail)[len(tail) // 2]
    sup = max(tail)
    nonincreasing = all(x >= y - 1e-12 * max(1.0, abs(x)) for x, y in zip(tail, tail[1:]))
    bounded = nonincreasing or sup <= 10 * med
    return SingularityReport(T_max, "TypeI" if bounded else "TypeIIa", sup, lam)

# Copyright (c) The lgmech Authors
#
# All rights reserved.
#
# MIT License
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED *AS IS*, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING
# FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

# stdlib imports
import collections
import enum
import functools
import logging
import math
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors

# create logger
logger = logging.getLogger(__name__)
# global defines
BOX_TOLERANCE = 1e-12
CONCAVITY_TOLERANCE = 1e-9

ConcavityCheck = collections.namedtuple(
    'ConcavityCheck', ['concave', 'worst_violation'])


@functools.total_ordering
class _NegativeInfinity(object):
    """Extended-real -inf: compares below every finite value and supports
    no arithmetic"""
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return hash('lgmech.NEG_INF')

    def __float__(self):
        return -math.inf

    def __reduce__(self):
        return 'NEG_INF'

    def __repr__(self):
        return 'NEG_INF'


NEG_INF = _NegativeInfinity()


def is_neg_inf(value):
    # type: (object) -> bool
    """Check for the -inf sentinel"""
    return value is NEG_INF


class UtilityFamily(enum.Enum):
    Power = 'power'
    Linear = 'linear'
    Quadratic = 'quadratic'


class ActionBox(object):
    """Feasible action interval A_i = [lo, hi] containing 0"""
    __slots__ = ['_lo', '_hi']

    def __init__(self, lo, hi):
        # type: (ActionBox, float, float) -> None
        """Ctor for ActionBox
        :param ActionBox self: this
        :param float lo: lower bound
        :param float hi: upper bound
        """
        lo = float(lo)
        hi = float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise lgmech.errors.ValidationError(
                'action box [{}, {}] is not compact'.format(
                    lo, hi), assumption='action box')
        if not lo <= 0 <= hi or not lo < hi:
            raise lgmech.errors.ValidationError(
                'action box [{}, {}] must satisfy '
                'lo <= 0 <= hi and lo < hi'.format(lo, hi),
                assumption='action box')
        self._lo = lo
        self._hi = hi

    @property
    def lo(self):
        return self._lo

    @property
    def hi(self):
        return self._hi

    @property
    def midpoint(self):
        return 0.5 * (self._lo + self._hi)

    def contains(self, x, tol=BOX_TOLERANCE):
        # type: (ActionBox, float, float) -> bool
        """Membership with a tolerance band
        :param ActionBox self: this
        :param float x: action
        :param float tol: tolerance
        :rtype: bool
        :return: if x in [lo - tol, hi + tol]
        """
        return self._lo - tol <= x <= self._hi + tol

    def clamp(self, x):
        # type: (ActionBox, float) -> float
        """Project onto the box"""
        return min(max(x, self._lo), self._hi)

    def constraint_value(self, x):
        # type: (ActionBox, float) -> float
        """Convex characterization f(x) = max(lo - x, x - hi), <= 0
        exactly on the box
        :param ActionBox self: this
        :param float x: action
        :rtype: float
        :return: constraint value
        """
        return max(self._lo - x, x - self._hi)

    def to_list(self):
        return [self._lo, self._hi]

    def __eq__(self, other):
        if not isinstance(other, ActionBox):
            return NotImplemented
        return self._lo == other._lo and self._hi == other._hi

    def __hash__(self):
        return hash((self._lo, self._hi))

    def __repr__(self):
        return 'ActionBox({!r}, {!r})'.format(self._lo, self._hi)


def _coefficient_vector(params, name, keys, user):
    # type: (dict, str, tuple, int) -> np.ndarray
    """Read a coefficient map keyed by user id into a vector ordered
    like keys"""
    raw = params.get(name)
    if not isinstance(raw, dict):
        raise lgmech.errors.ValidationError(
            'user {}: utility parameter "{}" must be a map keyed by user '
            'id'.format(user, name), assumption='utility parameters')
    try:
        coeffs = {int(k): float(v) for k, v in raw.items()}
    except (TypeError, ValueError):
        raise lgmech.errors.ValidationError(
            'user {}: utility parameter "{}" has non-numeric entries'.format(
                user, name), assumption='utility parameters') from None
    if set(coeffs.keys()) != set(keys):
        raise lgmech.errors.ValidationError(
            'user {}: utility parameter "{}" keys {} must be exactly '
            '{}'.format(user, name, sorted(coeffs.keys()), list(keys)),
            assumption='utility parameters')
    return np.array([coeffs[k] for k in keys], dtype=float)


def _scalar(params, name, user):
    try:
        return float(params[name])
    except KeyError:
        raise lgmech.errors.ValidationError(
            'user {}: utility parameter "{}" is missing'.format(user, name),
            assumption='utility parameters') from None
    except (TypeError, ValueError):
        raise lgmech.errors.ValidationError(
            'user {}: utility parameter "{}" is not a number'.format(
                user, name), assumption='utility parameters') from None


class UtilitySpec(object):
    """Concave utility u_i over the actions of R_i"""
    def __init__(self, user, family, params, neighbors, validate=True):
        # type: (UtilitySpec, int, UtilityFamily, dict, tuple, bool) -> None
        """Ctor for UtilitySpec
        :param UtilitySpec self: this
        :param int user: owning user i
        :param UtilityFamily family: family
        :param dict params: coefficients keyed by user id
        :param tuple neighbors: R_i in ascending order
        :param bool validate: check parameter domains
        """
        self._user = int(user)
        self._family = UtilityFamily(family)
        self._neighbors = tuple(int(j) for j in neighbors)
        if self._user not in self._neighbors:
            raise lgmech.errors.ValidationError(
                'user {} missing from its own neighborhood'.format(user),
                assumption='self loop')
        self._own = self._neighbors.index(self._user)
        others = tuple(j for j in self._neighbors if j != self._user)
        if self._family == UtilityFamily.Power:
            self._alpha = _scalar(params, 'alpha', user)
            beta = _coefficient_vector(params, 'beta', others, user)
            self._beta = np.insert(beta, self._own, 0.0)
            self._others_mask = np.ones(len(self._neighbors), dtype=bool)
            self._others_mask[self._own] = False
        elif self._family == UtilityFamily.Linear:
            self._c = _coefficient_vector(
                params, 'c', self._neighbors, user)
            self._b = _scalar(params, 'b', user)
        else:
            self._p = _coefficient_vector(
                params, 'p', self._neighbors, user)
            self._q = _coefficient_vector(
                params, 'q', self._neighbors, user)
        if validate:
            self._validate()

    def _validate(self):
        # type: (UtilitySpec) -> None
        """Check parameter domains
        :param UtilitySpec self: this
        """
        def fail(msg):
            raise lgmech.errors.ValidationError(
                'user {}: {}'.format(self._user, msg),
                assumption='concavity')
        if self._family == UtilityFamily.Power:
            if not 0 < self._alpha < 1:
                fail('own exponent alpha={} must lie in (0, 1)'.format(
                    self._alpha))
            beta = self._beta[self._others_mask]
            if not np.all(np.isfinite(beta)) or np.any(beta <= 1):
                fail('neighbor exponents beta={} must lie in (1, inf)'.format(
                    beta.tolist()))
        elif self._family == UtilityFamily.Linear:
            if not np.all(np.isfinite(self._c)) or np.any(self._c < 0):
                fail('linear coefficients c={} must be >= 0'.format(
                    self._c.tolist()))
            if not math.isfinite(self._b) or self._b < 0:
                fail('own cost b={} must be >= 0'.format(self._b))
        else:
            if not np.all(np.isfinite(self._p)):
                fail('quadratic coefficients p={} must be finite'.format(
                    self._p.tolist()))
            if not np.all(np.isfinite(self._q)) or np.any(self._q < 0):
                fail('quadratic coefficients q={} must be >= 0'.format(
                    self._q.tolist()))

    @property
    def user(self):
        return self._user

    @property
    def family(self):
        return self._family

    @property
    def neighbors(self):
        # type: (UtilitySpec) -> tuple
        """R_i in the order action vectors use"""
        return self._neighbors

    @property
    def own_position(self):
        return self._own

    @property
    def params(self):
        # type: (UtilitySpec) -> dict
        """Coefficients keyed by user id as JSON-ready values
        :param UtilitySpec self: this
        :rtype: dict
        :return: parameter map
        """
        def keyed(vec, skip_own=False):
            return {
                str(j): float(vec[p])
                for p, j in enumerate(self._neighbors)
                if not (skip_own and p == self._own)
            }
        if self._family == UtilityFamily.Power:
            return {'alpha': self._alpha, 'beta': keyed(self._beta, True)}
        elif self._family == UtilityFamily.Linear:
            return {'c': keyed(self._c), 'b': self._b}
        return {'p': keyed(self._p), 'q': keyed(self._q)}

    @property
    def requires_nonnegative(self):
        # type: (UtilitySpec) -> bool
        """Whether the family is defined on the nonnegative orthant only"""
        return self._family == UtilityFamily.Power

    def value(self, a):
        # type: (UtilitySpec, np.ndarray) -> np.ndarray
        """Family formula without domain checks; accepts a vector or a
        stack of vectors along the last axis
        :param UtilitySpec self: this
        :param np.ndarray a: actions over R_i
        :rtype: float or np.ndarray
        :return: value(s)
        """
        a = np.asarray(a, dtype=float)
        if self._family == UtilityFamily.Power:
            own = a[..., self._own] ** self._alpha
            others = a[..., self._others_mask] ** self._beta[
                self._others_mask]
            return own - others.sum(axis=-1)
        elif self._family == UtilityFamily.Linear:
            return a @ self._c - self._b * a[..., self._own]
        return a @ self._p - (a * a) @ self._q

    def gradient(self, a):
        # type: (UtilitySpec, np.ndarray) -> np.ndarray
        """Family gradient without domain checks
        :param UtilitySpec self: this
        :param np.ndarray a: actions over R_i
        :rtype: np.ndarray
        :return: partial derivatives over R_i
        """
        a = np.asarray(a, dtype=float)
        if self._family == UtilityFamily.Power:
            grad = np.zeros_like(a)
            grad[self._others_mask] = -self._beta[self._others_mask] * (
                a[self._others_mask] ** (self._beta[self._others_mask] - 1))
            grad[self._own] = self._alpha * a[self._own] ** (self._alpha - 1)
            return grad
        elif self._family == UtilityFamily.Linear:
            grad = self._c.copy()
            grad[self._own] -= self._b
            return grad
        return self._p - 2.0 * self._q * a

    def to_dict(self):
        return {'family': self._family.value, 'params': self.params}

    def __repr__(self):
        return 'UtilitySpec(user={}, family={}, neighbors={})'.format(
            self._user, self._family.value, list(self._neighbors))


def _as_vector(spec, a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.shape[0] != len(spec.neighbors):
        raise lgmech.errors.DimensionMismatchError(
            len(spec.neighbors), a.shape[0] if a.ndim == 1 else a.shape,
            what='action vector of user {}'.format(spec.user))
    return a


def evaluate_utility(spec, box, a):
    # type: (UtilitySpec, ActionBox, np.ndarray) -> float
    """u_i(a_{R_i}), or NEG_INF when a_i is outside A_i or a PowerFamily
    argument is negative
    :param UtilitySpec spec: utility
    :param ActionBox box: A_i
    :param np.ndarray a: actions over R_i
    :rtype: float or NEG_INF
    :return: extended-real utility
    """
    a = _as_vector(spec, a)
    if not box.contains(a[spec.own_position]):
        return NEG_INF
    if spec.requires_nonnegative:
        if np.any(a < -BOX_TOLERANCE):
            return NEG_INF
        a = np.maximum(a, 0.0)
    return float(spec.value(a))


def utility_gradient(spec, a):
    # type: (UtilitySpec, np.ndarray) -> np.ndarray
    """Analytic gradient of u_i over R_i
    :param UtilitySpec spec: utility
    :param np.ndarray a: actions over R_i
    :rtype: np.ndarray
    :return: gradient
    """
    a = _as_vector(spec, a)
    if spec.requires_nonnegative:
        if a[spec.own_position] <= 0:
            raise lgmech.errors.NotDifferentiableAtError(
                a, 'own PowerFamily term needs a strictly positive action')
        if np.any(a < 0):
            raise lgmech.errors.NotDifferentiableAtError(
                a, 'PowerFamily is undefined for negative actions')
    return spec.gradient(a)


def aggregate_utility(spec, box, a, t):
    # type: (UtilitySpec, ActionBox, np.ndarray, float) -> float
    """u_i^A = u_i(a) - t when a_i is in A_i, NEG_INF otherwise
    :param UtilitySpec spec: utility
    :param ActionBox box: A_i
    :param np.ndarray a: actions over R_i
    :param float t: tax
    :rtype: float or NEG_INF
    :return: aggregate utility
    """
    u = evaluate_utility(spec, box, a)
    if u is NEG_INF:
        return NEG_INF
    return u - float(t)


def sampling_bounds(spec, box):
    # type: (UtilitySpec, ActionBox) -> Tuple[np.ndarray, np.ndarray]
    """Bounds of the region check_concavity samples from
    :param UtilitySpec spec: utility
    :param ActionBox box: A_i
    :rtype: tuple
    :return: (lower, upper) over R_i
    """
    k = len(spec.neighbors)
    m = 2.0 * max(1.0, abs(box.lo), abs(box.hi))
    if spec.requires_nonnegative:
        lo = np.zeros(k)
    else:
        lo = np.full(k, -m)
    hi = np.full(k, m)
    lo[spec.own_position] = box.lo
    hi[spec.own_position] = box.hi
    if spec.requires_nonnegative:
        lo[spec.own_position] = max(box.lo, 0.0)
    return lo, hi


def check_concavity(spec, box, sample_count=256, seed=0):
    # type: (UtilitySpec, ActionBox, int, int) -> ConcavityCheck
    """Sampled midpoint test u((x+y)/2) >= (u(x)+u(y))/2 - 1e-9
    :param UtilitySpec spec: utility
    :param ActionBox box: A_i
    :param int sample_count: number of pairs
    :param int seed: rng seed
    :rtype: ConcavityCheck
    :return: (concave, worst violation)
    """
    rng = np.random.default_rng(seed)
    lo, hi = sampling_bounds(spec, box)
    x = rng.uniform(lo, hi, size=(sample_count, len(lo)))
    y = rng.uniform(lo, hi, size=(sample_count, len(lo)))
    slack = spec.value(0.5 * (x + y)) - 0.5 * (spec.value(x) + spec.value(y))
    worst = float(max(0.0, -float(np.min(slack)))) if sample_count > 0 \
        else 0.0
    return ConcavityCheck(worst <= CONCAVITY_TOLERANCE, worst)

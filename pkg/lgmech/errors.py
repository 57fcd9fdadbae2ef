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
# non-stdlib imports
# local imports


class _ContextMixin(object):
    """Adds a machine-readable view of an exception"""
    _context_fields = ()

    def to_dict(self):
        # type: (_ContextMixin) -> dict
        """Machine-readable error record
        :param _ContextMixin self: this
        :rtype: dict
        :return: error name, message and context fields
        """
        ret = {
            'error': type(self).__name__,
            'message': str(self),
        }
        for field in self._context_fields:
            val = getattr(self, field, None)
            if val is not None and not isinstance(
                    val, (int, float, str, bool, list, tuple)):
                val = str(val)
            ret[field] = list(val) if isinstance(val, tuple) else val
        return ret


class ValidationError(_ContextMixin, ValueError):
    """A model assumption does not hold"""
    _context_fields = ('assumption',)

    def __init__(self, message, assumption=None):
        super().__init__(message)
        self.assumption = assumption


class NonSquareError(ValidationError):
    """Adjacency matrix is not square"""
    def __init__(self, shape):
        super().__init__(
            'adjacency matrix is not square: shape {}'.format(shape))
        self.shape = tuple(shape)


class MissingSelfLoopError(ValidationError):
    """A user does not affect itself"""
    _context_fields = ('assumption', 'user')

    def __init__(self, user):
        super().__init__(
            'user {} has no self loop: g[{}][{}] must be 1'.format(
                user, user, user), assumption='self loop')
        self.user = user


class CycleTooSmallError(ValidationError):
    """A good affects fewer than three users"""
    _context_fields = ('assumption', 'good', 'size')

    def __init__(self, good, size):
        super().__init__(
            'good {} affects {} < 3 users'.format(good, size),
            assumption='cycle size')
        self.good = good
        self.size = size


class DimensionMismatchError(ValidationError):
    """A vector has the wrong length"""
    _context_fields = ('expected', 'actual')

    def __init__(self, expected, actual, what='vector'):
        super().__init__('{} has length {}, expected {}'.format(
            what, actual, expected))
        self.expected = expected
        self.actual = actual


class InconsistentColumnError(ValidationError):
    """Personalized price column does not sum to zero"""
    _context_fields = ('residual',)

    def __init__(self, residual):
        super().__init__(
            'price column sums to {!r}, expected 0'.format(residual))
        self.residual = residual


class NonConcaveUtilityError(ValidationError):
    """Sampled midpoint test found a convexity violation"""
    _context_fields = ('assumption', 'user', 'violation')

    def __init__(self, user, violation):
        super().__init__(
            'utility of user {} is not concave '
            '(midpoint violation {!r})'.format(user, violation),
            assumption='concavity')
        self.user = user
        self.violation = violation


class NotInCycleError(_ContextMixin, ValueError):
    """User is not affected by a good"""
    _context_fields = ('user', 'good')

    def __init__(self, user, good):
        super().__init__('user {} is not in C_{}'.format(user, good))
        self.user = user
        self.good = good


class ParseError(_ContextMixin, ValueError):
    """Input file could not be parsed"""
    _context_fields = ('path', 'line', 'column', 'field')

    def __init__(self, message, path=None, line=None, column=None,
                 field=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append('line {}'.format(line))
            if column is not None:
                loc.append('column {}'.format(column))
        if field is not None:
            loc.append('field {}'.format(field))
        if len(loc) > 0:
            message = '{}: {}'.format(', '.join(loc), message)
        super().__init__(message)
        self.path = None if path is None else str(path)
        self.line = line
        self.column = column
        self.field = field


class NotDifferentiableAtError(_ContextMixin, ValueError):
    """Utility has no gradient at the requested point"""
    _context_fields = ('point',)

    def __init__(self, point, reason):
        super().__init__('not differentiable at {}: {}'.format(
            point, reason))
        self.point = [float(x) for x in point]


class KKTNotSatisfiedError(_ContextMixin, RuntimeError):
    """Action profile is not a KKT point"""
    _context_fields = ('max_residual',)

    def __init__(self, report, tol):
        super().__init__(
            'KKT max residual {!r} exceeds tolerance {!r}'.format(
                report.max_residual, tol))
        self.report = report
        self.max_residual = report.max_residual


class NotConvergedError(_ContextMixin, RuntimeError):
    """Centralized solver hit its iteration limit"""
    _context_fields = ('iterations',)

    def __init__(self, solution):
        super().__init__(
            'centralized solver did not converge in {} iterations '
            '(projected gradient norm {!r})'.format(
                solution.iterations, solution.gradient_norm))
        self.solution = solution
        self.iterations = solution.iterations


class InnerNotConvergedError(_ContextMixin, RuntimeError):
    """Best-response ascent hit its iteration limit"""
    _context_fields = ('user', 'iterations')

    def __init__(self, user, message, iterations):
        super().__init__(
            'best response of user {} did not converge in {} '
            'iterations'.format(user, iterations))
        self.user = user
        self.message = message
        self.iterations = iterations

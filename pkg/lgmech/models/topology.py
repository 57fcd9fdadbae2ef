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
import enum
import logging
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors

# create logger
logger = logging.getLogger(__name__)
# global defines
MIN_CYCLE_SIZE = 3


class IndexPolicy(enum.Enum):
    Ascending = 'ascending'
    Shuffled = 'shuffled'


class NetworkTopology(object):
    """Directed influence graph: g[i][j] = 1 means j affects i"""
    def __init__(self, g):
        # type: (NetworkTopology, np.ndarray) -> None
        """Ctor for NetworkTopology. Use build_topology to validate
        :param NetworkTopology self: this
        :param np.ndarray g: n x n binary matrix
        """
        self._g = np.array(g, dtype=np.int8)
        self._g.setflags(write=False)
        self._n = self._g.shape[0]
        self._r_sets = tuple(
            tuple(int(j) for j in np.flatnonzero(self._g[i]))
            for i in range(self._n))
        self._c_sets = tuple(
            tuple(int(i) for i in np.flatnonzero(self._g[:, j]))
            for j in range(self._n))
        self._r_pos = tuple(
            {j: p for p, j in enumerate(r)} for r in self._r_sets)

    @classmethod
    def from_r_sets(cls, n, r_sets):
        # type: (type, int, list) -> NetworkTopology
        """Build the graph matrix from neighborhoods
        :param type cls: class
        :param int n: number of users
        :param list r_sets: R_i for each user
        :rtype: NetworkTopology
        :return: topology
        """
        g = np.zeros((n, n), dtype=np.int8)
        for i, r in enumerate(r_sets):
            g[i, list(r)] = 1
        return build_topology(g)

    @property
    def n(self):
        # type: (NetworkTopology) -> int
        """Number of users
        :param NetworkTopology self: this
        :rtype: int
        :return: n
        """
        return self._n

    @property
    def g(self):
        # type: (NetworkTopology) -> np.ndarray
        """Read-only graph matrix
        :param NetworkTopology self: this
        :rtype: np.ndarray
        :return: g
        """
        return self._g

    @property
    def r_sets(self):
        # type: (NetworkTopology) -> tuple
        """R_i: users whose actions affect i, ascending
        :param NetworkTopology self: this
        :rtype: tuple
        :return: tuple of tuples
        """
        return self._r_sets

    @property
    def c_sets(self):
        # type: (NetworkTopology) -> tuple
        """C_j: users affected by j's action, ascending
        :param NetworkTopology self: this
        :rtype: tuple
        :return: tuple of tuples
        """
        return self._c_sets

    def position(self, i, j):
        # type: (NetworkTopology, int, int) -> int
        """Position of good j within R_i
        :param NetworkTopology self: this
        :param int i: user
        :param int j: good
        :rtype: int
        :return: zero-based position
        """
        try:
            return self._r_pos[i][j]
        except KeyError:
            raise lgmech.errors.NotInCycleError(i, j) from None

    def own_position(self, i):
        # type: (NetworkTopology, int) -> int
        """Position of i's own action within R_i"""
        return self._r_pos[i][i]

    def to_adjacency(self):
        # type: (NetworkTopology) -> list
        """Adjacency as nested lists of ints
        :param NetworkTopology self: this
        :rtype: list
        :return: rows of g
        """
        return self._g.tolist()

    def __eq__(self, other):
        if not isinstance(other, NetworkTopology):
            return NotImplemented
        return np.array_equal(self._g, other._g)

    def __hash__(self):
        return hash(self._g.tobytes())

    def __repr__(self):
        return 'NetworkTopology(n={}, edges={})'.format(
            self._n, int(self._g.sum()))


def build_topology(adjacency):
    # type: (object) -> NetworkTopology
    """Validate an adjacency matrix and derive R_i and C_j
    :param object adjacency: square nested sequence or array of 0/1
    :rtype: NetworkTopology
    :return: topology
    """
    try:
        g = np.asarray(adjacency, dtype=float)
    except (TypeError, ValueError):
        raise lgmech.errors.ValidationError(
            'adjacency matrix is ragged or non-numeric') from None
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
        raise lgmech.errors.NonSquareError(g.shape)
    if not np.all((g == 0) | (g == 1)):
        raise lgmech.errors.ValidationError(
            'adjacency entries must be 0 or 1', assumption='graph matrix')
    for i in range(g.shape[0]):
        if g[i, i] != 1:
            raise lgmech.errors.MissingSelfLoopError(i)
    sizes = g.sum(axis=0)
    for j in range(g.shape[0]):
        if sizes[j] < MIN_CYCLE_SIZE:
            raise lgmech.errors.CycleTooSmallError(j, int(sizes[j]))
    return NetworkTopology(g)


class CyclicIndexTable(object):
    """Cyclic order of C_j for every good j; positions start at 1"""
    def __init__(self, cycles):
        # type: (CyclicIndexTable, list) -> None
        """Ctor for CyclicIndexTable
        :param CyclicIndexTable self: this
        :param list cycles: for each good, users in position order
        """
        self._cycles = tuple(tuple(int(i) for i in c) for c in cycles)
        self._index = tuple(
            {i: k + 1 for k, i in enumerate(c)} for c in self._cycles)

    @property
    def cycles(self):
        # type: (CyclicIndexTable) -> tuple
        """Users of each C_j in cyclic position order"""
        return self._cycles

    def index_of(self, i, j):
        # type: (CyclicIndexTable, int, int) -> int
        """I_ij in 1..|C_j|, or 0 when i is not in C_j
        :param CyclicIndexTable self: this
        :param int i: user
        :param int j: good
        :rtype: int
        :return: index
        """
        return self._index[j].get(i, 0)

    def user_at(self, j, k):
        # type: (CyclicIndexTable, int, int) -> int
        """User at position k of C_j, wrapping around
        :param CyclicIndexTable self: this
        :param int j: good
        :param int k: position (any integer; 1 is the first)
        :rtype: int
        :return: user
        """
        cycle = self._cycles[j]
        return cycle[(k - 1) % len(cycle)]

    def successor(self, j, i, offset):
        # type: (CyclicIndexTable, int, int, int) -> int
        """User offset positions after i in C_j
        :param CyclicIndexTable self: this
        :param int j: good
        :param int i: user
        :param int offset: positive offset
        :rtype: int
        :return: user
        """
        k = self.index_of(i, j)
        if k == 0:
            raise lgmech.errors.NotInCycleError(i, j)
        return self.user_at(j, k + offset)

    def to_list(self):
        # type: (CyclicIndexTable) -> list
        """Cycles as nested lists"""
        return [list(c) for c in self._cycles]

    def __eq__(self, other):
        if not isinstance(other, CyclicIndexTable):
            return NotImplemented
        return self._cycles == other._cycles

    def __hash__(self):
        return hash(self._cycles)

    def __repr__(self):
        return 'CyclicIndexTable(goods={})'.format(len(self._cycles))


def assign_cyclic_indices(topology, policy=IndexPolicy.Ascending, seed=None):
    # type: (NetworkTopology, IndexPolicy, int) -> CyclicIndexTable
    """Assign cycle positions 1..|C_j| to the members of every C_j
    :param NetworkTopology topology: topology
    :param IndexPolicy policy: ordering policy
    :param int seed: seed for the shuffled policy
    :rtype: CyclicIndexTable
    :return: index table
    """
    policy = IndexPolicy(policy)
    if policy == IndexPolicy.Ascending:
        return CyclicIndexTable(topology.c_sets)
    rng = np.random.default_rng(seed)
    return CyclicIndexTable(
        [rng.permutation(np.asarray(c, dtype=np.int64)).tolist()
         for c in topology.c_sets])


def cyclic_successor(table, j, i, offset):
    # type: (CyclicIndexTable, int, int, int) -> int
    """C_{j(I_ij + offset)} with wraparound
    :param CyclicIndexTable table: index table
    :param int j: good
    :param int i: user
    :param int offset: 1 or 2
    :rtype: int
    :return: successor user
    """
    if offset < 1:
        raise ValueError('offset must be positive: {}'.format(offset))
    return table.successor(j, i, offset)

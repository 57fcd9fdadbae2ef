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
import logging
import math
# non-stdlib imports
import numpy as np
# local imports
import lgmech.errors

# create logger
logger = logging.getLogger(__name__)


class Message(object):
    """A user's message: action and price proposals over R_i"""
    __slots__ = ['_actions', '_prices']

    def __init__(self, actions, prices):
        # type: (Message, np.ndarray, np.ndarray) -> None
        """Ctor for Message
        :param Message self: this
        :param np.ndarray actions: proposed actions ^i a_j over R_i
        :param np.ndarray prices: proposed prices ^i pi_j over R_i
        """
        self._actions = np.array(actions, dtype=float).reshape(-1)
        self._prices = np.array(prices, dtype=float).reshape(-1)
        if self._actions.shape != self._prices.shape:
            raise lgmech.errors.DimensionMismatchError(
                self._actions.shape[0], self._prices.shape[0],
                what='price proposals')
        if not np.all(np.isfinite(self._actions)):
            raise lgmech.errors.ValidationError(
                'action proposals must be finite', assumption='message space')
        if not np.all(np.isfinite(self._prices)) or np.any(self._prices < 0):
            raise lgmech.errors.ValidationError(
                'price proposals must be finite and >= 0',
                assumption='message space')
        self._actions.setflags(write=False)
        self._prices.setflags(write=False)

    @property
    def actions(self):
        return self._actions

    @property
    def prices(self):
        return self._prices

    def __len__(self):
        return self._actions.shape[0]

    def distance(self, other):
        # type: (Message, Message) -> float
        """Max absolute entry difference to another message"""
        return float(max(
            np.max(np.abs(self._actions - other._actions), initial=0.0),
            np.max(np.abs(self._prices - other._prices), initial=0.0)))

    def blend(self, other, theta):
        # type: (Message, Message, float) -> Message
        """(1 - theta) * self + theta * other
        :param Message self: this
        :param Message other: target message
        :param float theta: weight in (0, 1]
        :rtype: Message
        :return: blended message
        """
        if theta == 1:
            return other
        return Message(
            (1 - theta) * self._actions + theta * other._actions,
            np.maximum(
                (1 - theta) * self._prices + theta * other._prices, 0.0))

    def to_dict(self):
        return {
            'actions': self._actions.tolist(),
            'prices': self._prices.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, Message):
            return NotImplemented
        return (np.array_equal(self._actions, other._actions) and
                np.array_equal(self._prices, other._prices))

    def __hash__(self):
        return hash((self._actions.tobytes(), self._prices.tobytes()))

    def __repr__(self):
        return 'Message(actions={}, prices={})'.format(
            self._actions.tolist(), self._prices.tolist())


def _parse_index(value, n, field):
    # type: (object, int, str) -> int
    """User index in [0, n) from a JSON value"""
    try:
        i = int(value)
    except (TypeError, ValueError):
        raise lgmech.errors.ParseError(
            'not a user index: {!r}'.format(value), field=field) from None
    if i != value or not 0 <= i < n:
        raise lgmech.errors.ParseError(
            'user index {!r} not in [0, {})'.format(value, n),
            field=field)
    return i


class MessageProfile(object):
    """One message per user, aligned with the topology"""
    def __init__(self, topology, messages):
        # type: (MessageProfile, lgmech.models.topology.NetworkTopology,
        #        list) -> None
        """Ctor for MessageProfile
        :param MessageProfile self: this
        :param NetworkTopology topology: topology
        :param list messages: Message per user
        """
        self._topology = topology
        self._messages = tuple(messages)
        if len(self._messages) != topology.n:
            raise lgmech.errors.DimensionMismatchError(
                topology.n, len(self._messages), what='message profile')
        for i, msg in enumerate(self._messages):
            if not isinstance(msg, Message):
                raise TypeError('message {} is not a Message'.format(i))
            if len(msg) != len(topology.r_sets[i]):
                raise lgmech.errors.DimensionMismatchError(
                    len(topology.r_sets[i]), len(msg),
                    what='message of user {}'.format(i))

    @classmethod
    def zeros(cls, topology):
        # type: (type, NetworkTopology) -> MessageProfile
        """All-zero profile"""
        return cls(topology, [
            Message(np.zeros(len(r)), np.zeros(len(r)))
            for r in topology.r_sets])

    @classmethod
    def random(cls, topology, rng, action_scale=1.0, price_scale=1.0):
        # type: (type, NetworkTopology, np.random.Generator, float,
        #        float) -> MessageProfile
        """Random profile: actions uniform in [-s, s], prices in [0, p]
        :param type cls: class
        :param NetworkTopology topology: topology
        :param np.random.Generator rng: random generator
        :param float action_scale: action half-width
        :param float price_scale: price upper bound
        :rtype: MessageProfile
        :return: profile
        """
        return cls(topology, [
            Message(
                rng.uniform(-action_scale, action_scale, len(r)),
                rng.uniform(0.0, price_scale, len(r)))
            for r in topology.r_sets])

    @property
    def topology(self):
        return self._topology

    @property
    def messages(self):
        return self._messages

    def __getitem__(self, i):
        return self._messages[i]

    def __len__(self):
        return len(self._messages)

    def action_proposal(self, k, j):
        # type: (MessageProfile, int, int) -> float
        """^k a_j, the action user k proposes for user j"""
        return float(self._messages[k].actions[self._topology.position(k, j)])

    def price_proposal(self, k, j):
        # type: (MessageProfile, int, int) -> float
        """^k pi_j, the price user k proposes for good j"""
        return float(self._messages[k].prices[self._topology.position(k, j)])

    def replace(self, i, message):
        # type: (MessageProfile, int, Message) -> MessageProfile
        """New profile with user i's message replaced
        :param MessageProfile self: this
        :param int i: user
        :param Message message: replacement
        :rtype: MessageProfile
        :return: new profile
        """
        msgs = list(self._messages)
        msgs[i] = message
        return MessageProfile(self._topology, msgs)

    def distance(self, other):
        # type: (MessageProfile, MessageProfile) -> float
        """Max absolute entry difference across all messages"""
        return max(
            (a.distance(b) for a, b in zip(self._messages, other._messages)),
            default=0.0)

    def to_dict(self):
        # type: (MessageProfile) -> dict
        """Message-profile JSON object"""
        return {
            'version': 1,
            'n': self._topology.n,
            'messages': [
                {'user': i, 'goods': list(self._topology.r_sets[i]),
                 'actions': m.actions.tolist(), 'prices': m.prices.tolist()}
                for i, m in enumerate(self._messages)
            ],
        }

    @classmethod
    def from_dict(cls, topology, data):
        # type: (type, NetworkTopology, dict) -> MessageProfile
        """Parse a message-profile JSON object
        :param type cls: class
        :param NetworkTopology topology: topology of the scenario
        :param dict data: parsed JSON
        :rtype: MessageProfile
        :return: profile
        """
        try:
            entries = data['messages']
        except (KeyError, TypeError):
            raise lgmech.errors.ParseError(
                'message profile needs a "messages" list',
                field='messages') from None
        if len(entries) != topology.n:
            raise lgmech.errors.DimensionMismatchError(
                topology.n, len(entries), what='message profile')
        msgs = [None] * topology.n
        for idx, entry in enumerate(entries):
            field = 'messages[{}]'.format(idx)
            try:
                i = _parse_index(
                    entry.get('user', idx), topology.n, field + '.user')
                goods = entry.get('goods')
                if goods is not None and [
                        _parse_index(j, topology.n, field + '.goods')
                        for j in goods] != list(topology.r_sets[i]):
                    raise lgmech.errors.ValidationError(
                        '{}: goods {} do not match R_{} = {}'.format(
                            field, goods, i, list(topology.r_sets[i])),
                        assumption='message space')
                msgs[i] = Message(entry['actions'], entry['prices'])
            except (KeyError, TypeError, IndexError, AttributeError) as exc:
                raise lgmech.errors.ParseError(
                    'malformed message: {}'.format(exc),
                    field=field) from None
        if any(m is None for m in msgs):
            raise lgmech.errors.ParseError(
                'duplicate user entries', field='messages')
        return cls(topology, msgs)

    def __eq__(self, other):
        if not isinstance(other, MessageProfile):
            return NotImplemented
        return (self._topology == other._topology and
                self._messages == other._messages)

    def __hash__(self):
        return hash(self._messages)

    def __repr__(self):
        return 'MessageProfile(n={})'.format(len(self._messages))


class Allocation(object):
    """Outcome of the game form: actions, taxes and personalized prices"""
    def __init__(self, actions, taxes, prices):
        # type: (Allocation, np.ndarray, np.ndarray, dict) -> None
        """Ctor for Allocation
        :param Allocation self: this
        :param np.ndarray actions: allocated actions per user
        :param np.ndarray taxes: taxes per user
        :param dict prices: (i, j) -> l_ij for j in R_i
        """
        self._actions = np.array(actions, dtype=float)
        self._taxes = np.array(taxes, dtype=float)
        self._actions.setflags(write=False)
        self._taxes.setflags(write=False)
        self._prices = dict(prices)

    @property
    def actions(self):
        return self._actions

    @property
    def taxes(self):
        return self._taxes

    @property
    def prices(self):
        # type: (Allocation) -> dict
        """Sparse personalized prices keyed by (i, j)"""
        return self._prices

    @property
    def tax_sum(self):
        return math.fsum(self._taxes)

    @property
    def budget_residual(self):
        # type: (Allocation) -> float
        """|sum of taxes|"""
        return abs(self.tax_sum)

    @property
    def budget_scale(self):
        # type: (Allocation) -> float
        """max(1, sum |t_i|), the scale budget balance is judged on"""
        return max(1.0, math.fsum(np.abs(self._taxes)))

    def price_column_sum(self, j, c_set):
        # type: (Allocation, int, tuple) -> float
        """Sum over k in C_j of l_kj"""
        return math.fsum(self._prices[(k, j)] for k in c_set)

    def to_dict(self):
        return {
            'actions': self._actions.tolist(),
            'taxes': self._taxes.tolist(),
            'prices': [
                {'i': i, 'j': j, 'value': v}
                for (i, j), v in sorted(self._prices.items())
            ],
        }

    def __repr__(self):
        return 'Allocation(n={}, tax_sum={!r})'.format(
            self._actions.shape[0], self.tax_sum)

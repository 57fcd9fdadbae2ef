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

# models
from .models.options import (  # noqa
    BestResponse as BestResponseOptions,
    Dynamics as DynamicsOptions,
    General as GeneralOptions,
    Solver as SolverOptions,
    Verification as VerificationOptions,
)
from .models.topology import (  # noqa
    CyclicIndexTable,
    IndexPolicy,
    NetworkTopology,
    assign_cyclic_indices,
    build_topology,
    cyclic_successor,
)
from .models.utility import (  # noqa
    NEG_INF,
    ActionBox,
    UtilityFamily,
    UtilitySpec,
    aggregate_utility,
    check_concavity,
    evaluate_utility,
    utility_gradient,
)
from .models.message import (  # noqa
    Allocation,
    Message,
    MessageProfile,
)
from .models.scenario import (  # noqa
    Scenario,
    load_scenario,
    read_profile,
    save_scenario,
)

# operations
from .operations.mechanism import (  # noqa
    compute_actions,
    compute_outcome,
    compute_tax,
    personalized_price,
)
from .operations.centralized import (  # noqa
    kkt_residual,
    social_welfare,
    solve_centralized,
)
from .operations.ne import (  # noqa
    check_ne_conditions,
    check_price_taking,
    construct_ne,
    personalized_prices_from_optimum,
    solve_price_system,
    verify_ne,
)
from .operations.dynamics import (  # noqa
    Schedule,
    best_response,
    run_dynamics,
)
from .operations.audit import (  # noqa
    certify_scenario,
    full_audit,
)
from .operations.generate import (  # noqa
    generate_scenario,
)
from .operations.batch import (  # noqa
    run_batch,
)

# Copyright 2024 D-Wave Systems Inc.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""This file stores input parameters for the analyzer."""

from pathlib import Path

# Bumped whenever the JSON report layout changes.
SCHEMA_VERSION = 1

# Environment variable that overrides the default arithmetic mode ("exact" or "float").
# An explicit ``--mode`` on the command line always wins.
MODE_ENV_VAR = "COPZERO_MODE"
DEFAULT_MODE = None  # None means: exact when every entry parses as a rational

# Float-mode tolerances. Exact mode ignores them, but they are still echoed in reports.
RANK_EPS = 1e-9  # relative to the largest singular value
ZERO_EPS = 1e-10
POSITIVITY_EPS = 1e-10

# The copositivity gate runs its eigen step in floats even for exact matrices;
# this is the widened threshold used in that case.
EXACT_EIGEN_EPS = 1e-8

# 2**p principal submatrices are inspected, so keep p small.
COPOSITIVITY_MAX_DIMENSION = 16

# Grid denominator used to re-verify borderline eigen witnesses.
COPOSITIVITY_REVERIFY_GRID = 12

# Maximum number of simplex grid points an oracle may enumerate.
GRID_POINT_CAP = 2_000_000
GRID_CHUNK_SIZE = 50_000

# Limits of the brute-force oracles.
# The unpruned subset scan runs inside ``analyze`` only up to this dimension.
ENUMERATION_ORACLE_MAX_DIMENSION = 10
CLIQUE_ORACLE_MAX_VERTICES = 12
CLIQUE_EXTENSION_MAX_SIZE = 4
UNPRUNED_SCAN_MAX_DIMENSION = 16

# Random graph corpus used by the graph generator and the round-trip tests.
RANDOM_GRAPH_EDGE_PROBABILITIES = (0.2, 0.5, 0.8)
RANDOM_GRAPH_SEED = 20240613

INPUT_PATH = Path(__file__).parent.resolve() / "input"

# Built-in fixtures, runnable with ``--fixture <name>``. These can be found in the
# 'input' directory.
FIXTURES = {
    "example-x": "example_x.txt",
    "example-xbar": "example_xbar.txt",
    "horn": "horn.txt",
    "identity-3": "identity_3.txt",
    "zero-3": "zero_3.txt",
}

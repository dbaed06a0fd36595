# Copyright 2026 The photocount Authors
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


"""Photon-count conditioned simulation of heralded spin-spin entanglement.

Configuration text uses the same INI sections as the command-line tool; ``preset`` selects one of
``preset_names()`` as the base.
"""

import json

from ._photocount import (
    ConfigError,
    DomainError,
    InvariantError,
    TermOverflowError,
    __version__,
    axis_keys,
    conditional_states,
    echo_config,
    optical_limits,
    preset_names,
    run_cli,
    simulate_json,
    sweep_csv,
    verify,
    wavepacket_overlap,
)


def simulate(config="", preset="", protocol=None, oracle_only=False):
    """Evaluate one parameter point and return the report as a dict."""
    return json.loads(simulate_json(config, preset, protocol, oracle_only))


def sweep(axis, grid, config="", preset="", protocol=None, workers=1, oracle_only=False):
    """Evaluate a grid along one axis; returns a list of row dicts with float values."""
    lines = sweep_csv(config, preset, protocol, axis, grid, workers, oracle_only).strip().split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        row = {"axis": fields[0]}
        row.update({k: float(v) for k, v in zip(header[1:], fields[1:])})
        rows.append(row)
    return rows


__all__ = [
    "ConfigError",
    "DomainError",
    "InvariantError",
    "TermOverflowError",
    "__version__",
    "axis_keys",
    "conditional_states",
    "echo_config",
    "optical_limits",
    "preset_names",
    "run_cli",
    "simulate",
    "simulate_json",
    "sweep",
    "sweep_csv",
    "verify",
    "wavepacket_overlap",
]

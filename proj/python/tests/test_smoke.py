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


import json
import math

import numpy as np
import pytest

import photocount


def test_version_and_catalogues():
    assert photocount.__version__ == "0.1.0"
    assert "fig2" in photocount.preset_names()
    assert "sigma_phi" in photocount.axis_keys()


def test_simulate_preset():
    report = photocount.simulate(preset="fig2")
    assert report["protocol"] == "N"
    assert report["merit"]["eta_gen"] == pytest.approx(0.5, abs=1e-6)
    assert report["optical_limit"]["F_op"] == pytest.approx(11 / 12)
    assert report["diagnostics"]["invariants_ok"]


def test_oracle_only_has_no_engine_fields():
    report = photocount.simulate(preset="fig3", oracle_only=True)
    assert report["mode"] == "oracle"
    assert "stats" not in report


def test_sweep_rows_and_determinism():
    a = photocount.sweep_csv(preset="fig2", axis="T_d", grid="1:20:5", workers=1)
    b = photocount.sweep_csv(preset="fig2", axis="T_d", grid="1:20:5", workers=3)
    assert a == b
    rows = photocount.sweep("T_d", "1:20:5", preset="fig2")
    assert len(rows) == 5
    for r in rows:
        assert 0.0 <= r["p1"] <= 1.0
        assert r["p0"] + r["p1"] + r["p2"] + r["p11"] + r["p3plus"] + r["residual"] == pytest.approx(1.0, abs=1e-9)


def test_conditional_states_are_hermitian_and_complete():
    out = photocount.conditional_states(preset="fig4")
    total = sum(rho for rho in out["states"].values())
    np.testing.assert_allclose(total, out["rho_full"], atol=1e-9)
    for rho in out["states"].values():
        assert rho.shape == (9, 9)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)


def test_optical_limits_reference_point():
    lim = photocount.optical_limits(1.0, 1.0, 0.1, 0.1)
    assert lim["F_N"] == pytest.approx(11 / 12, abs=1e-9)
    assert lim["F_T"] == pytest.approx(0.8472222222, abs=1e-9)
    assert lim["M12"] == pytest.approx(photocount.wavepacket_overlap(1.0, 1.0, 1.2, 1.2, 0.0))


def test_config_errors_raise():
    with pytest.raises(ValueError, match="emitter1.gamma_up"):
        photocount.simulate(config="[protocol]\nname = N\n")
    with pytest.raises(ValueError):
        photocount.sweep_csv(preset="fig2", axis="nope", grid="0:1:2")


def test_cli_entry_point():
    code, out, err = photocount.run_cli(["simulate", "--preset", "fig2", "--oracle-only"])
    assert code == 0, err
    assert json.loads(out)["mode"] == "oracle"
    code, _, err = photocount.run_cli(["sweep", "--preset", "fig2", "--axis", "bogus", "--grid", "0:1:2"])
    assert code == 2 and "bogus" in err


def test_verify_negative_control():
    suites = {name: ok for name, _, ok in photocount.verify(inject_sign_error=True)}
    assert not suites["bound-chain"]
    assert suites["oracle-vs-engine"]

import json

import pytest

from secmsr.msr import SystemParams, repair_download
from secmsr.pipeline import SecureMSRCode, draw_randomness
from secmsr.secrecy import eve_labels, eve_matrix, verify_secrecy
from secmsr.sim import (
    EveLedger, Scenario, ScenarioError, Stage, eve_view_matrix, repeated_failure_scenario, run,
    worst_case_scenario,
)


@pytest.fixture(scope="module")
def code431():
    return SecureMSRCode(SystemParams(4, 2, 3, 1))


def test_empty_run_sees_only_storage(code431):
    rep = run(Scenario(code431.params, (3,), 0, ()), code431)
    assert rep.ok
    assert rep.ledger.summary()["download_pairs"] == []
    assert rep.ledger.summary()["stored_nodes"] == [3]
    assert rep.certificate["secret"]


@pytest.mark.parametrize("E", [(1,), (4,)])
def test_worst_case_matches_analysis(code431, E):
    p = code431.params
    rep = run(worst_case_scenario(p, E), code431)
    assert rep.ok
    assert set(rep.ledger.labels(p)) == set(eve_labels(p, E))
    assert rep.certificate == verify_secrecy(eve_matrix(code431, E)).as_dict()


def test_worst_case_with_partial_helper_sets():
    p = SystemParams(6, 3, 4, 1)
    code = SecureMSRCode(p)
    rep = run(worst_case_scenario(p, [2]), code)
    assert rep.ok
    assert set(rep.ledger.labels(p)) == set(eve_labels(p, [2]))


def test_partial_view_rank_bounded(code431):
    p = code431.params
    part = run(Scenario(p, (2,), 0, (Stage(2, (1, 3, 4)),)), code431)
    worst = verify_secrecy(eve_matrix(code431, (2,)))
    one = run(Scenario(p, (2,), 0, ()), code431)
    assert one.certificate["rank_T"] <= part.certificate["rank_T"] <= worst.rank_T


def test_stability_across_helper_groups():
    p = SystemParams(6, 3, 4, 1)
    code = SecureMSRCode(p)
    payload = tuple(range(1, p.secure_size + 1))
    base = repeated_failure_scenario(p, [6], nodes=[6, 2])
    rep = run(Scenario(p, base.E, base.seed, base.stages, payload), code)
    assert rep.ok and rep.stable
    groups = {tuple(st["helpers"]) for st in rep.per_stage if st["fail"] == 6}
    assert len(groups) == 5
    # recorded downloads equal the ones computed from the original codeword
    cw = code.encode_message(list(payload), draw_randomness(code.ctx, p.R, base.seed))
    assert len(rep.ledger.downloads) == p.n - 1
    for (j, i), mu in rep.ledger.downloads.items():
        assert mu == repair_download(cw.node(j), i, p).mu


def test_view_matches_ledger_values(code431):
    rep = run(worst_case_scenario(code431.params, (3,), seed=4), code431)
    assert rep.view_consistent


def test_ledger_confinement():
    led = EveLedger((2,))
    led.see_download(0, 2, 3, (1,))      # from E: ignored
    led.see_download(0, 1, 3, (1,))      # into a node outside E: ignored
    led.see_download(0, 1, 2, (5,))
    led.see_download(1, 1, 2, (5,))
    assert list(led.downloads) == [(1, 2)]
    assert led.provenance[(1, 2)] == [0, 1]


def test_policies_and_determinism(code431):
    p = code431.params
    scn = Scenario(p, (4,), 9, tuple(Stage(i, policy=pol) for i in (4, 1, 4, 2)
                                     for pol in ("random", "round-robin")))
    a, b = run(scn, code431), run(scn, code431)
    assert a.to_json() == b.to_json()
    assert a.ok
    for st in a.per_stage:
        assert st["fail"] not in st["helpers"] and len(st["helpers"]) == p.d
        assert st["bytes_downloaded"] == p.d * p.beta * 4


@pytest.mark.parametrize("stage,msg", [
    ({"fail": 2, "helpers": [1, 2, 3]}, "own helper"),
    ({"fail": 2, "helpers": [1, 3]}, "distinct helpers"),
    ({"fail": 9, "helpers": [1, 2, 3]}, "out of range"),
    ({"fail": 1, "policy": "psychic"}, "policy"),
])
def test_invalid_stages(stage, msg):
    doc = {"params": {"n": 4, "k": 2, "d": 3, "l": 1}, "E": [4], "seed": 0,
           "stages": [{"fail": 1, "helpers": [2, 3, 4]}, stage]}
    with pytest.raises(ScenarioError, match=f"stage 1.*{msg}"):
        Scenario.from_dict(doc)


def test_scenario_json_round_trip():
    doc = {"params": {"n": 4, "k": 2, "d": 3, "l": 1}, "E": [4], "seed": 3,
           "stages": [{"fail": 4, "policy": "random"}, {"fail": 1, "helpers": [2, 3, 4]}],
           "payload": ["1", "2", "3", "4", "5", "6", "7", "8"]}
    scn = Scenario.from_json(json.dumps(doc))
    assert Scenario.from_dict(scn.to_dict()) == scn


def test_payload_is_stored(code431):
    p = code431.params
    scn = Scenario(p, (4,), 0, (Stage(4, (1, 2, 3)),), tuple(range(1, 9)))
    rep = run(scn, code431)
    assert rep.ok
    # Eve's stored view is the original node content, and downloads agree with it
    file = list(range(1, 9))
    cw = code431.encode_message(file, draw_randomness(code431.ctx, p.R, 0))
    assert rep.ledger.stored[4] == cw.node(4).symbols
    for (j, i), mu in rep.ledger.downloads.items():
        assert mu == repair_download(cw.node(j), i, p).mu


def test_eve_view_matrix_empty(code431):
    ev = eve_view_matrix(EveLedger((1,)), code431)
    assert ev.width == 0
    assert verify_secrecy(ev).secret

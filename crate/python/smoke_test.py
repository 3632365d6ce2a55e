"""Smoke test for the `qid` extension module.

Run through run_smoke.sh, which builds the module and puts it on the path.
"""

import json
import math
import tempfile

import qid


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def check_channels():
    assert len(qid.attack_kinds()) == 7
    ch = qid.Channel.attack("universal_cloner", 1)
    assert ch.in_dim == 2 and ch.dim_b == 2 and ch.dim_e == 2
    assert ch.completeness_violation() < 1e-12
    out = ch.apply([[1, 0], [0, 0]])
    assert close(sum(out[i][i].real for i in range(len(out))), 1.0)

    # round trip through the JSON channel format
    again = qid.Channel.from_json(ch.to_json())
    assert again.num_kraus == ch.num_kraus

    resend = qid.Channel.attack("intercept_resend_angle", 1, theta=math.pi / 4)
    proto = qid.Protocol(resend, 1)
    rho = proto.receiver_state("0", "Z", "B")
    assert close(rho[1][1].real, 0.25)


def check_protocol():
    proto = qid.Protocol(qid.Channel.attack("cnot_probe", 3), 3)
    prob_dev, state_dev, ok = proto.equivalence()
    assert ok and prob_dev < 1e-10 and state_dev < 1e-10
    assert proto.profile("B") == [1] * 8
    assert proto.profile("E") == [4] * 8
    assert proto.catalogue("B") == [("0", [format(i, "03b") for i in range(8)])]
    assert proto.catalogue("E") == []

    report = json.loads(proto.verify())
    assert report["corollary1"]["max_b"] == 1
    assert all(g["holds"] for g in report["grid"])


def check_bounds():
    assert qid.tradeoff_bound(2, 2, 1) == 18.0
    assert close(qid.theorem_bound(12, 8, 24), 1.25 * 2**24)
    assert close(qid.conjugate_overlap_norm("01", "10"), 0.25)
    assert close(qid.mutual_information([[0.5, 0], [0, 0.5]]), 1.0)
    avg, count, theorem, pre = qid.average_versus_counting(24)
    assert avg == 27.0 and count > theorem and count < pre

    c, s = math.cos(math.pi / 8), math.sin(math.pi / 8)
    lhs, rhs, holds = qid.landau_pollak(
        [[[1, 0], [0, 0]], [[0.5, 0.5], [0.5, 0.5]]],
        [[c * c, c * s], [c * s, s * s]],
    )
    assert holds and close(lhs, 1 + 1 / math.sqrt(2)) and close(rhs, 2.0)


def check_errors():
    try:
        qid.Channel.attack("teleport", 1)
    except qid.QidError:
        pass
    else:
        raise AssertionError("unknown attack accepted")
    try:
        qid.run_experiment(json.dumps({"n": 9, "attacks": [{"kind": "identity"}]}))
    except qid.CapacityError:
        pass
    else:
        raise AssertionError("oversized run accepted")
    assert issubclass(qid.CapacityError, ValueError)


def check_experiment():
    cfg = json.dumps({"n_values": [1, 2], "attacks": [{"kind": "measure_x"}, {"kind": "identity"}]})
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        code_a, summary_a = qid.run_experiment(cfg, a)
        code_b, summary_b = qid.run_experiment(cfg, b)
    assert code_a == code_b == 0
    assert summary_a == summary_b
    assert json.loads(summary_a)["all_hold"] is True


if __name__ == "__main__":
    for check in (check_channels, check_protocol, check_bounds, check_errors, check_experiment):
        check()
        print(f"ok  {check.__name__}")
    print("python smoke test passed")

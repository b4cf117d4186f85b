"""Smoke test for the pyrailnet extension module.

Build and install first, e.g. `pip install maturin && maturin develop -m crates/py/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import json
import math
from pathlib import Path

import pyrailnet

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def main():
    tri = pyrailnet.Network.load(str(FIXTURES / "triangle.json"))
    assert tri.station_ids == ["A", "B", "C"]
    assert tri.validate()["sections"] == 3

    dist = tri.expand("distance")
    assert (dist.node_count, dist.arc_count) == (12, 18)
    pairs = dist.all_pairs()
    assert pairs["total"] == 60.0
    assert dist.all_pairs(removed=["s1"])["total"] == 120.0
    assert dist.flows() == {"s1": 2, "s2": 2, "s3": 0}

    assert dist.nri("s1") == 60.0
    assert dist.nri("s3") == 0.0
    assert math.isinf(dist.nri_pair("s1", "s3"))

    (r,) = dist.redundancy(["s3"])
    assert abs(r["r_u_prime"] - 0.4727272727) < 1e-9, r["r_u_prime"]
    assert all(v["reciprocal"] >= 0 for v in r["per_v"])

    spur = pyrailnet.Network.load(str(FIXTURES / "spur.json"))
    path = spur.expand("time").shortest_path("X", "Z")
    assert (path["cost"], path["sections"], path["reversals"]) == (35.0, ["s4", "s5"], 1)

    shortcut = json.dumps(
        {
            "name": "shortcut",
            "add_sections": [
                {
                    "id": "s4",
                    "a": {"station": "A", "side": "L"},
                    "b": {"station": "C", "side": "R"},
                    "length_km": 20,
                    "speed_kmh": 60,
                }
            ],
        }
    )
    report = pyrailnet.compare(tri, shortcut, weight_kind="distance")
    metrics = report["scenarios"][0]["metrics"][0]
    assert abs(metrics["total_decrease_percent"] - 16.6667) < 1e-3
    assert metrics["busiest_section"] == "s1"

    try:
        dist.nri("nope")
    except ValueError as e:
        assert "nope" in str(e)
    else:
        raise AssertionError("unknown section accepted")

    print("pyrailnet smoke test passed:", repr(tri))


if __name__ == "__main__":
    main()

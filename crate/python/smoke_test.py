"""End-to-end smoke test for the sparse_ot_py extension module.

Build the module first, then run this script from the repository root:

    cargo build -p sparse-ot-py --release
    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libsparse_ot_py.so",
        root / "target" / "debug" / "libsparse_ot_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p sparse-ot-py --release")
    staging = Path(tempfile.mkdtemp(prefix="sparse_ot_py."))
    shutil.copy2(built, staging / "sparse_ot_py.so")
    sys.path.insert(0, str(staging))
    import sparse_ot_py

    return sparse_ot_py


def main():
    ot = load_module()

    # Uniform 20x30: the plan must stay sparse (<= 3 out, <= 2 in).
    instance = ot.generate(20, 30, seed=7)
    parsed = json.loads(instance)
    assert len(parsed["mu"]["points"]) == 20
    assert parsed["mu"]["weights"] == ["1/20"] * 20

    result = json.loads(ot.solve(instance))
    stats = result["stats"]
    assert result["atoms"] == 60
    assert stats["max_out"] <= 3, stats
    assert stats["max_in"] <= 2, stats
    assert stats["support_size"] == len(result["plan"]["entries"])

    # Marginals of the returned plan are exact rationals.
    row_sums = [Fraction(0)] * 20
    for i, _, mass in result["plan"]["entries"]:
        row_sums[i] += Fraction(mass)
    assert all(s == Fraction(1, 20) for s in row_sums)

    # The verifier agrees, and a tampered mass is caught.
    report = json.loads(ot.verify(json.dumps(result["plan"]), instance))
    assert report["passed"], report
    assert [c["name"] for c in report["checks"]] == [
        "structure",
        "marginals",
        "mass_positivity",
        "quantization",
        "degree_bounds",
        "cost_agreement",
    ]

    tampered = json.loads(json.dumps(result["plan"]))
    i, j, mass = tampered["entries"][0]
    tampered["entries"][0] = [i, j, str(Fraction(mass) / 2)]
    bad = json.loads(ot.verify(json.dumps(tampered), instance))
    assert not bad["passed"]
    failed = {c["name"] for c in bad["checks"] if not c["passed"]}
    assert "marginals" in failed, bad

    # Replication counts for the same shape.
    counts = json.loads(ot.uniform_expansion_counts(20, 30))
    assert counts == {
        "gcd": 10,
        "src_copies": 3,
        "dst_copies": 2,
        "atoms": 60,
        "atom_mass": "1/60",
    }

    # Rational weights solve exactly too, and the figure renders.
    rational = ot.generate(3, 4, seed=11, max_denominator=9)
    solved = json.loads(ot.solve(rational, path="compressed"))
    assert solved["path"] == "compressed"
    report = json.loads(ot.verify(json.dumps(solved["plan"]), rational))
    assert report["passed"], report

    svg = ot.figure_svg(json.dumps(solved["plan"]), rational, width=640, height=480)
    assert svg.startswith("<svg ")
    assert svg.count("<line ") == solved["stats"]["support_size"]
    assert svg.count("<circle ") == 7

    # Errors surface as ValueError with the library's message.
    try:
        ot.solve("{ not json")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed JSON must raise ValueError")

    try:
        ot.solve(
            json.dumps(
                {
                    "mu": {
                        "points": [[0.0], [1.0], [2.0], [3.0]],
                        "weights": ["1/97", "1/89", "1/101", "844514/871933"],
                    },
                    "nu": {"points": [[0.0], [1.0]]},
                }
            )
        )
    except ValueError as err:
        assert "1743866" in str(err), err
    else:
        raise AssertionError("atom budget must raise ValueError")

    print("smoke test OK")


if __name__ == "__main__":
    main()

"""Smoke test for the noiseless_py extension.

Build first, e.g. `maturin develop -m crates/python/Cargo.toml`, then run
`python crates/python/python/smoke_test.py`.
"""

import math
import pathlib
import tempfile

import noiseless_py as nc

CONFIGS = pathlib.Path(__file__).resolve().parents[3] / "configs"


def main():
    assert [nc.singlet_multiplicity(n) for n in (2, 4, 6, 8)] == [1, 2, 5, 14]
    assert nc.singlet_multiplicity(6, rank=2) == 5
    assert nc.cg_sl2(6) == [(6, 1), (4, 5), (2, 9), (0, 5)]
    log2_n, per_replica, _ = nc.encoding_efficiency(100)
    assert abs(log2_n - (100 - 1.5 * math.log2(100))) < 1

    code = nc.CodeSubspace(4)
    assert code.dimension == 2 and code.register_dim == 16
    assert code.annihilation_residual() < 1e-10
    assert max(code.principal_angles(nc.reference_c4_basis())) < 1e-10

    s = math.sqrt(0.5)
    ket = code.encode([s, 1j * s])
    amps, leakage = code.decode(ket)
    assert leakage < 1e-12 and abs(amps[1] - 1j * s) < 1e-12

    try:
        nc.CodeSubspace(5)
    except ValueError as e:
        assert "no singlets" in str(e)
    else:
        raise AssertionError("odd N must fail")

    assert nc.fixed_point_deviation(steps=20, occupations=[1, 0]) < 1e-9

    with tempfile.TemporaryDirectory() as out:
        enc, ref, ref_final, passed = nc.simulate_config(str(CONFIGS / "default_n4.json"), out)
        assert passed and enc < 1e-8 and ref_final < 0.9
        rows = nc.robustness_config(str(CONFIGS / "default_n4.json"), out, parallel=True)
        infid = [r[1] for r in rows]
        assert infid[0] < 1e-8 and infid == sorted(infid)

    print("noiseless_py", nc.__version__, "smoke test ok")


if __name__ == "__main__":
    main()

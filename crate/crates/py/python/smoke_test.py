"""Smoke test for the pyshipctl extension.

Build and install first:
    pip install --no-build-isolation crates/py
"""

import math

import pyshipctl as sc


def main():
    p = sc.ShipParams()
    a, b, c, d = p.reduced()
    assert math.isclose(d, 2.8909 / 33.8)
    assert math.isclose(p.delta(), 33.8 * 2.76 - 1.0115**2)

    vel, tau = (0.4, -0.2, 0.3), (1.5, -0.7)
    back = p.true_inputs(vel, p.reduce_inputs(vel, tau))
    assert all(math.isclose(x, y, rel_tol=1e-12) for x, y in zip(back, tau))

    try:
        sc.ShipParams(m23=0.0).validate()
    except ValueError:
        pass
    else:
        raise AssertionError("zero coupling accepted")

    stab = sc.Scenario.preset("stabilize_offset")
    run = stab.simulate()
    assert run.mode == "stabilize" and len(run) == 30_001
    assert run.decay_ratio() < 0.1, run.decay_ratio()

    track = sc.Scenario.from_config(sc.Scenario.preset("track_circle").to_config())
    run = track.simulate()
    errs = run.error_norms()
    assert run.excited and errs[-1] < 1e-3 * errs[0], errs[-1] / errs[0]
    assert run.to_csv().splitlines()[0] == sc.header("track")

    try:
        sc.Scenario.from_config("mode = stabilize\n")
    except ValueError as e:
        assert "init" in str(e)
    else:
        raise AssertionError("missing init accepted")

    failed = [name for name, ok, _ in sc.verify() if not ok]
    assert not failed, failed
    print("pyshipctl smoke test passed")


if __name__ == "__main__":
    main()

"""Smoke test for the momdet_py extension module.

Build and install it first, for example:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/momdet_py-*.whl

then run ``python python/smoke_test.py``.
"""

import json
import math

import momdet_py as md


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(md.lambert_w0(1.0), 0.567143290409784, 1e-12)
    assert close(md.lambert_w0(math.e), 1.0, 1e-12)
    lo, hi = md.lambert_w_bounds(100.0)
    assert lo <= md.lambert_w0(100.0) <= hi

    k2 = md.integrate_logweighted(2.0)
    assert close(k2.value, 0.5319307700648184, 1e-9), k2
    k100 = md.integrate_logweighted(100.0, 1e-10)
    assert close(k100.logmag, math.log(4.471835801346083e41), 1e-8)

    g1 = md.gamma_derivative(1)
    assert close(g1.value, -0.5772156649015329, 1e-10)
    assert g1.sign == -1

    sp = md.saddle_point(100.0)
    assert close(sp["x_t"], 100.0 / sp["w"] - 1.0, 1e-10)

    seq = md.generate_moments("product[(1,1),(1,1)]", 200)
    assert seq.n_max == 200 and len(seq) == 201
    assert seq.family == "product[(1,1),(1,1)]"
    back = md.MomentSequence.from_json(seq.to_json())
    assert back.log_moments() == seq.log_moments()
    back = md.MomentSequence.from_csv(seq.to_csv())
    assert back.log_moments() == seq.log_moments()

    report = md.analyze(seq, "log")
    status = {v["criterion"]: v["status"] for v in report["verdicts"]}
    assert status["carleman"] == "satisfied-evidence", status
    assert status["growth_rate"] == "violated-evidence", status
    assert status["growth_rate_q"] == "satisfied-evidence", status
    assert status["hardy"] == "violated-evidence", status

    sym = md.generate_moments("symroot[(1,1),(1,1)]", 200)
    assert sym.support == "hamburger-symmetric"
    assert md.check_carleman(sym)["status"] == "satisfied-evidence"
    assert md.check_growth_rate(sym)["status"] == "violated-evidence"
    try:
        md.check_hardy(sym)
    except md.MomdetError:
        pass
    else:
        raise AssertionError("Hardy check must reject symmetric sequences")

    assert md.check_q_divergence("power(0.1)", 200)["status"] == "violated-evidence"

    exp = md.MomentSequence.from_log_moments([math.lgamma(n + 1) for n in range(61)])
    assert md.check_hardy(exp)["diagnostics"]["c0"] <= 1.0

    for bad in (lambda: md.generate_moments("product[(1,1)", 10), lambda: md.lambert_w0(-1.0)):
        try:
            bad()
        except md.MomdetError:
            pass
        else:
            raise AssertionError("expected MomdetError")
    try:
        md.integrate_logweighted(1e20)
    except md.NumericError:
        pass
    else:
        raise AssertionError("expected NumericError")

    print(json.dumps({"smoke_test": "ok", "carleman_p": report["verdicts"][0]["diagnostics"]["p"]}))


if __name__ == "__main__":
    main()

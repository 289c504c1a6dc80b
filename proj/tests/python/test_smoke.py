import json
import math
import os
from pathlib import Path

import pytest

import trapoptics

SOURCE = Path(os.environ.get("TRAPOPTICS_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURE = SOURCE / "fixtures" / "scheme_a.json"


def test_gaussian_optics():
    assert trapoptics.rayleigh_length(1.5e-6, 313e-9) == pytest.approx(22.6e-6, abs=0.1e-6)
    w0 = trapoptics.optimal_waist(10e-3, 313e-9)
    assert w0 == pytest.approx(22.3e-6, abs=0.1e-6)
    assert trapoptics.beam_radius(313e-9, w0, 0.0, 5e-3) == pytest.approx(31.6e-6, abs=0.1e-6)
    clip = trapoptics.clipping_fraction(313e-9, w0, 5e-3, 10e-3, 50e-6)
    assert 0.0 < clip < 8e-4


def test_relay():
    zones = trapoptics.relay_zones(10e-3, 4, 0.2, 0.99, 0.99)
    assert len(zones) == 5
    products = {round(z["product"], 15) for z in zones}
    assert len(products) == 1
    assert sorted(trapoptics.prism_zone_positions(10e-3, 4, 0.2)) == pytest.approx([0.2, 0.4, 0.6, 0.8, 1.0])


def test_detection():
    names = [d.name for d in trapoptics.detector_presets()]
    assert names == ["UVPC", "PMT", "CCD", "EMCCD", "APD"]
    assert trapoptics.thermal_noise_electrons(300.0, 1e-12) == pytest.approx(804, rel=0.005)
    r = trapoptics.ber("UVPC", 1e6, 50e-6)
    assert 0.0 < r["ber"] < 1e-3
    assert r["snr"] > 1.0
    ber, lo, hi = trapoptics.ber_monte_carlo("APD", 1e6, 10e-6, 500.0, 20000, 3)
    assert lo <= ber <= hi
    t = trapoptics.min_integration_time("EMCCD", 1e6, 1e-3)
    assert t is not None and 1e-5 < t < 1e-4
    assert trapoptics.min_integration_time("PMT", 1e3, 1e-12) is None
    with pytest.raises(ValueError):
        trapoptics.detector_preset("nope")


def test_microcavity_and_entanglement():
    rep = trapoptics.coupling_report(1.5e-6, 22.583e-6, 1.0, 0.99)
    assert rep["C1"] == pytest.approx(rep["C1_closed"], rel=1e-9)
    assert rep["C1"] == pytest.approx(1.314, abs=0.002)
    assert trapoptics.capture_fraction(2.0) == pytest.approx(0.8)
    assert trapoptics.max_scatter_rate(20e6) == pytest.approx(math.pi * 20e6)
    p, factor, saturated = trapoptics.scaled_success(1e-8, 0.004, 0.8)
    assert factor == 40000.0
    assert not saturated
    assert trapoptics.mean_wait(0.0, 1e6) == math.inf


def test_layout():
    text = FIXTURE.read_text()
    assert trapoptics.validate_layout(text) == []
    doc = json.loads(text)
    doc["b_field"]["elevation_deg"] = 10.0
    violations = trapoptics.validate_layout(json.dumps(doc))
    assert [v[0] for v in violations] == ["R2"]
    with pytest.raises(ValueError):
        trapoptics.validate_layout("{broken")
    assert len(trapoptics.canonical_table_text().splitlines()) == 8


def test_cli_round_trip():
    code, out, err = trapoptics.run_cli(["beam", "waist"])
    assert code == 0
    assert json.loads(out)["w0_um"] == pytest.approx(22.3, abs=0.1)
    code, out, _ = trapoptics.run_cli(["layout", "validate", str(FIXTURE)])
    assert code == 0
    code, _, err = trapoptics.run_cli(["nonsense"])
    assert code == 2 and err

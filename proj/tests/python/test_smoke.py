import json
import os
import pathlib

import pytest

import llmbi

ROOT = pathlib.Path(os.environ.get("LLMBI_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_simulate_and_csv_round_trip():
    data = llmbi.simulate(n=50, seed=7)
    assert data.n_rows == 50
    assert sorted(data.names) == ["X", "y"]
    again = llmbi.parse_csv(data.to_csv())
    assert again.column("X") == pytest.approx(data.column("X"))
    assert llmbi.simulate(n=50, seed=7).column("y") == data.column("y")


def test_formula_helpers():
    assert llmbi.format_formula("alpha+beta*X") == "alpha + beta * X"
    assert llmbi.free_variables("alpha + beta * X") == {"alpha", "beta", "X"}
    assert llmbi.evaluate("alpha + beta * X", {"alpha": 1.0, "beta": 2.0, "X": 3.0}) == 7.0
    assert llmbi.evaluate(llmbi.differentiate("beta * X * X", "X"), {"beta": 1.5, "X": 2.0}) == pytest.approx(6.0)


def test_error_carries_code_and_position():
    with pytest.raises(llmbi.Error) as info:
        llmbi.format_formula("alpha ** 2")
    assert info.value.code == "IllegalCharacter"
    assert info.value.position == 6


def test_fit_recovers_slope():
    data = llmbi.simulate(n=100, seed=42)
    model = (ROOT / "experiments" / "exp1_manual_model.json").read_text()
    fit = llmbi.fit(model, data, chains=2, warmup=500, draws=500, seed=1)
    beta = fit["summary"]["beta"]
    assert abs(beta["mean"] - 1.8) < 0.2
    assert beta["r_hat"] < 1.05
    assert set(beta) == {"mean", "mode", "sd", "hdi_3%", "hdi_97%", "ess_bulk", "r_hat"}
    assert len(fit["draws"]["sigma"]) == 2
    assert len(fit["draws"]["sigma"][0]) == 500
    assert "beta" in fit["summary_text"]


def test_replayed_elicitation():
    beliefs = json.loads((ROOT / "experiments" / "exp1_beliefs.json").read_text())["beliefs"]
    prior = json.loads(llmbi.elicit_prior("beta", beliefs["beta"], ROOT / "fixtures"))
    assert prior["distribution"] == "Normal"
    description = (ROOT / "experiments" / "exp2_description.txt").read_text()
    model = json.loads(llmbi.elicit_model(description, ROOT / "fixtures"))
    assert model["likelihood"]["formula"] == "alpha + beta * X"
    with pytest.raises(llmbi.Error) as info:
        llmbi.elicit_prior("gamma", "unseen belief", ROOT / "fixtures")
    assert info.value.code == "FixtureMiss"

import json
import os
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

import locoscore

CORPUS = Path(os.environ.get("LOCOSCORE_CORPUS_DIR", Path(__file__).parents[1] / "fixtures" / "corpus"))


@pytest.fixture(scope="module")
def rdb():
    study = json.loads((CORPUS / "study.json").read_text())
    return locoscore.ingest(CORPUS / "logs", CORPUS / "questionnaires", study)


def test_registry():
    reg = locoscore.registry()
    assert len(reg["tasks"]) == 18
    keys = {m["key"] for m in reg["metrics"]}
    assert "S1.T1.ComplTime" in keys
    assert "S3.PE" in keys


def test_trajectory_helpers():
    assert locoscore.st_path_dev([(0, 2), (10, 2)]) == 20.0
    assert locoscore.st_path_dev([(0, 0), (5, 2), (10, 0)]) == 10.0
    assert locoscore.compound_accuracy(0.8, 0.5) == pytest.approx(0.4)
    assert locoscore.score_rate(25) == 0.5


def test_stats_against_scipy():
    rng = np.random.default_rng(3)
    groups = [list(rng.normal(m, 1.0, 12)) for m in (0.0, 0.4, 1.5)]
    f, p = locoscore.anova_oneway(groups)
    ref = stats.f_oneway(*groups)
    assert f == pytest.approx(ref.statistic, rel=1e-9)
    assert p == pytest.approx(ref.pvalue, abs=1e-9)
    h, p = locoscore.kruskal_wallis(groups)
    ref = stats.kruskal(*groups)
    assert h == pytest.approx(ref.statistic, rel=1e-9)
    assert p == pytest.approx(ref.pvalue, abs=1e-9)
    w, p = locoscore.shapiro_wilk(groups[0])
    ref = stats.shapiro(groups[0])
    assert w == pytest.approx(ref.statistic, abs=1e-4)
    assert p == pytest.approx(ref.pvalue, abs=1e-3)


def test_assign_points():
    p = [[1, 0.6, 0.004, 0.6], [0.6, 1, 0.6, 0.6], [0.004, 0.6, 1, 0.004], [0.6, 0.6, 0.004, 1]]
    pts = locoscore.assign_points(["AS", "WIP", "CV", "JS"], [0.971, 0.953, 0.884, 0.973], p, 0.05, "positive")
    assert pts == {"AS": 1, "WIP": 0, "CV": 0, "JS": 1}


def test_corpus_to_wdb(rdb):
    assert locoscore.validate_rdb(rdb) == []
    wdb = locoscore.build_wdb(rdb)
    assert wdb["techniques"] == ["AS", "WIP", "CV", "JS"]
    assert [r["rank"] for r in wdb["ranking"]] == [1, 2, 3, 4]
    total = wdb["scores"]["total"]
    assert wdb["ranking"][0]["score"] == max(total.values())

    subset = locoscore.build_wdb(rdb, {"technique_subset": ["AS", "WIP", "JS"]})
    assert subset["techniques"] == ["AS", "WIP", "JS"]


def test_errors_surface_as_exceptions(rdb):
    assert issubclass(locoscore.ConfigError, locoscore.Error)
    with pytest.raises(locoscore.ConfigError):
        locoscore.build_wdb(rdb, {"w_ST": 1, "w_RA": 1})
    with pytest.raises(locoscore.SubsetError):
        locoscore.build_wdb(rdb, {"technique_subset": ["AS"]})

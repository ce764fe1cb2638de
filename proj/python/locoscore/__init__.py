"""Python access to the locomotion scoring engine.

Document-level calls (registry, ingest, build_wdb) exchange JSON; the helpers here
decode it so callers work with plain dicts.
"""

import json as _json

from ._locoscore import (  # noqa: F401
    ConfigError,
    Error,
    ParseError,
    SubsetError,
    UntestableError,
    anova_oneway,
    assign_points,
    average_over_targets,
    compare_groups,
    compound_accuracy,
    cumulative_points,
    dunn_test,
    kruskal_wallis,
    likert_metric,
    nr_st_path_dev,
    physical_effort,
    score_rate,
    shapiro_wilk,
    ssq_scores,
    st_path_dev,
    tukey_hsd,
    zscore_filter,
)
from . import _locoscore as _core


def registry():
    return _json.loads(_core.registry_json())


def ingest(log_dir, questionnaire_dir, study=None):
    return _json.loads(_core.ingest(str(log_dir), str(questionnaire_dir), _json.dumps(study) if study else ""))


def validate_rdb(rdb):
    return _core.validate_rdb(_json.dumps(rdb))


def build_wdb(rdb, config=None):
    return _json.loads(_core.build_wdb(_json.dumps(rdb), _json.dumps(config or {})))

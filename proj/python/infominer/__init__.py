# Copyright 2026 The InfoMiner Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the infominer C++ core."""

import json

from ._core import *  # noqa: F401,F403
from ._core import InfominerError, run_pipeline as _run_pipeline, run_score as _run_score


def pipeline(config):
    """Runs the full pipeline from a config dict and returns the score report."""
    return json.loads(_run_pipeline(json.dumps(config)))


def score(gold, prediction_files):
    return json.loads(_run_score(gold, list(prediction_files)))

# Copyright 2026 The svbias Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Speaker verification bias audits: error curves, detection costs and
per-subgroup bias ratios."""

import json

from ._svbias import (
    ErrorCounts,
    ErrorCurve,
    EvaluationError,
    InputError,
    IoError,
    OperatingPoint,
    dcf,
    eer,
    error_curve,
    inverse_normal_cdf,
    min_dcf,
    normal_cdf,
    operating_point_at,
    probit,
    subgroup_bias,
    synthesize,
    threshold_bias,
)
from ._svbias import audit_files as _audit_files

__version__ = "0.1.0"


def audit(scores, metadata, attributes, output_dir, *, p_target=0.05,
          c_fn=1.0, c_fp=1.0, jobs=1):
    """Audit a trial list and return the report as a dict.

    Artifacts (report.json, report.csv, det.svg, det/*.csv, composition.csv)
    are written under ``output_dir``. Undefined ratios come back as the
    string ``"undefined"``.
    """
    if isinstance(attributes, str):
        attributes = [a.strip() for a in attributes.split(",") if a.strip()]
    text = _audit_files(str(scores), str(metadata), list(attributes),
                        str(output_dir), p_target, c_fn, c_fp, jobs)
    return json.loads(text)


__all__ = [
    "ErrorCounts", "ErrorCurve", "EvaluationError", "InputError", "IoError",
    "OperatingPoint", "audit", "dcf", "eer", "error_curve",
    "inverse_normal_cdf", "min_dcf", "normal_cdf", "operating_point_at",
    "probit", "subgroup_bias", "synthesize", "threshold_bias",
]

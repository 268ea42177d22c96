# Copyright 2026 The LabelDP Authors
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

"""Python bindings for the labeldp library."""

from labeldp._labeldp import (
    LabelDpError,
    clopper_pearson,
    epsilon_from_cgr,
    gaussian_epsilon,
    gaussian_perturb,
    gaussian_posterior,
    gaussian_sigma_classic,
    generate_mixture,
    laplace_epsilon,
    laplace_perturb,
    laplace_posterior,
    min_projection,
    pate_budget,
    randomized_response,
    run_cli,
)

__all__ = [
    "LabelDpError",
    "clopper_pearson",
    "epsilon_from_cgr",
    "gaussian_epsilon",
    "gaussian_perturb",
    "gaussian_posterior",
    "gaussian_sigma_classic",
    "generate_mixture",
    "laplace_epsilon",
    "laplace_perturb",
    "laplace_posterior",
    "min_projection",
    "pate_budget",
    "randomized_response",
    "run_cli",
]

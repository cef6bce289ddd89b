// Copyright 2026 The alri Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <utility>

namespace alri {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Student t cumulative distribution function.
double t_cdf(double t, double dof);

/// Inverse of t_cdf. Requires 0 < p < 1 and dof >= 1.
double t_quantile(double p, double dof);

/// Two-sided 95% critical value, cached per integer dof.
double t_critical_95(long dof);

/// Weighted median of `values`: the first value, in ascending order, whose
/// cumulative weight reaches half of the total (lower median on ties).
/// Throws ConfigError on empty input or non-positive total weight.
double weighted_median(std::span<const double> values, std::span<const double> weights);

/// Same rule over (value, weight) pairs, reordering them in place. Requires
/// a non-empty span with positive total weight.
double weighted_median_select(std::span<std::pair<double, double>> vw);

/// Mean of angles taken modulo `period`, returned in [0, period).
/// Throws FitError when the resultant vector vanishes.
double circular_mean(std::span<const double> values, double period);

}  // namespace alri

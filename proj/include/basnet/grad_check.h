/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef BASNET_GRAD_CHECK_H_
#define BASNET_GRAD_CHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "basnet/graph.h"

namespace basnet {

// Loss closure for the checker. Returns the loss at `params`; when `grads` is
// non-null it must also add the analytic gradient into it.
using LossClosure = std::function<double(const ParameterSet<double>& params,
                                         ParameterSet<double>* grads)>;

struct GradCheckOptions {
  double eps = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|,
  // floor), so coordinates whose true gradient is ~0 are judged absolutely.
  double floor = 1e-6;
};

struct GradCheckEntry {
  std::string name;
  std::size_t size = 0;
  double max_rel_error = 0;
  double max_abs_error = 0;
  std::size_t worst_index = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0;

  bool Passed(double tol) const { return max_rel_error < tol; }
  std::string ToString() const;
};

// Central-difference check of every coordinate of every parameter.
GradCheckReport GradCheck(const LossClosure& loss, ParameterSet<double> params,
                          const GradCheckOptions& options = {});

}  // namespace basnet

#endif  // BASNET_GRAD_CHECK_H_

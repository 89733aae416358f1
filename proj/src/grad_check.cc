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
#include "basnet/grad_check.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace basnet {

GradCheckReport GradCheck(const LossClosure& loss, ParameterSet<double> params,
                          const GradCheckOptions& options) {
  GradCheckReport report;
  ParameterSet<double> analytic = params.ZerosLike();
  loss(params, &analytic);

  for (std::size_t p = 0; p < params.size(); ++p) {
    GradCheckEntry entry{.name = params.name(p),
                         .size = params.value(p).size()};
    auto coords = params.value(p).values();
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double saved = coords[i];
      coords[i] = saved + options.eps;
      const double up = loss(params, nullptr);
      coords[i] = saved - options.eps;
      const double down = loss(params, nullptr);
      coords[i] = saved;

      const double numeric = (up - down) / (2 * options.eps);
      const double a = analytic.value(p)[i];
      const double abs_err = std::abs(a - numeric);
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.floor});
      const double rel = abs_err / denom;
      if (rel > entry.max_rel_error) {
        entry.max_rel_error = rel;
        entry.worst_index = i;
      }
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string GradCheckReport::ToString() const {
  std::string out;
  char line[256];
  for (const auto& e : entries) {
    std::snprintf(line, sizeof(line),
                  "%-22s size=%-6zu max_rel=%.3e max_abs=%.3e (at %zu)\n",
                  e.name.c_str(), e.size, e.max_rel_error, e.max_abs_error,
                  e.worst_index);
    out += line;
  }
  std::snprintf(line, sizeof(line), "overall max relative error: %.3e\n",
                max_rel_error);
  out += line;
  return out;
}

}  // namespace basnet

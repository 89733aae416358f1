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
#include "basnet/run_config.h"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "basnet/error.h"

namespace basnet {
namespace {

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    Fail(ErrorKind::kInvalidArgument,
         std::string(key) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

bool ParseBool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  Fail(ErrorKind::kInvalidArgument,
       std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view key,
                                  std::string_view value)>;

template <typename T, typename Pick>
Setter Number(Pick pick) {
  return [pick](RunConfig& c, std::string_view key, std::string_view v) {
    pick(c) = ParseNumber<T>(key, v);
  };
}

template <typename Pick>
Setter Flag(Pick pick) {
  return [pick](RunConfig& c, std::string_view key, std::string_view v) {
    pick(c) = ParseBool(key, v);
  };
}

const std::map<std::string, Setter, std::less<>>& Table() {
  static const auto* table = new std::map<std::string, Setter, std::less<>>{
      {"model.num_segments", Number<int>([](RunConfig& c) -> auto& { return c.model.num_segments; })},
      {"model.hidden_dim", Number<int>([](RunConfig& c) -> auto& { return c.model.hidden_dim; })},
      {"model.cas_kernel", Number<int>([](RunConfig& c) -> auto& { return c.model.cas_kernel; })},
      {"model.filter_hidden", Number<int>([](RunConfig& c) -> auto& { return c.model.filter_hidden; })},
      {"model.seed", Number<std::uint64_t>([](RunConfig& c) -> auto& { return c.model.seed; })},
      {"train.mode",
       [](RunConfig& c, std::string_view, std::string_view v) {
         c.train.objective.mode = ParseTrainMode(v);
       }},
      {"train.alpha", Number<double>([](RunConfig& c) -> auto& { return c.train.objective.alpha; })},
      {"train.beta", Number<double>([](RunConfig& c) -> auto& { return c.train.objective.beta; })},
      {"train.gamma", Number<double>([](RunConfig& c) -> auto& { return c.train.objective.gamma; })},
      {"train.r", Number<double>([](RunConfig& c) -> auto& { return c.train.objective.r; })},
      {"train.normalize_labels", Flag([](RunConfig& c) -> auto& { return c.train.objective.normalize_labels; })},
      {"train.lr", Number<double>([](RunConfig& c) -> auto& { return c.train.lr; })},
      {"train.batch_size", Number<int>([](RunConfig& c) -> auto& { return c.train.batch_size; })},
      {"train.max_steps", Number<int>([](RunConfig& c) -> auto& { return c.train.max_steps; })},
      {"train.seed", Number<std::uint64_t>([](RunConfig& c) -> auto& { return c.train.seed; })},
      {"train.checkpoint_interval", Number<int>([](RunConfig& c) -> auto& { return c.train.checkpoint_interval; })},
      {"train.threads", Number<int>([](RunConfig& c) -> auto& { return c.train.threads; })},
      {"infer.theta_class", Number<double>([](RunConfig& c) -> auto& { return c.infer.theta_class; })},
      {"infer.theta_act_step", Number<double>([](RunConfig& c) -> auto& { return c.theta_act_step; })},
      {"infer.theta_act_max", Number<double>([](RunConfig& c) -> auto& { return c.theta_act_max; })},
      {"infer.nms_iou", Number<double>([](RunConfig& c) -> auto& { return c.infer.nms_iou; })},
      {"infer.multiply_class_prob", Flag([](RunConfig& c) -> auto& { return c.infer.multiply_class_prob; })},
      {"infer.pool_before_nms", Flag([](RunConfig& c) -> auto& { return c.infer.pool_before_nms; })},
      {"data.num_classes", Number<int>([](RunConfig& c) -> auto& { return c.data.num_classes; })},
      {"data.feature_dim", Number<int>([](RunConfig& c) -> auto& { return c.data.feature_dim; })},
      {"data.min_segments", Number<int>([](RunConfig& c) -> auto& { return c.data.min_segments; })},
      {"data.max_segments", Number<int>([](RunConfig& c) -> auto& { return c.data.max_segments; })},
      {"data.num_train", Number<int>([](RunConfig& c) -> auto& { return c.data.num_train; })},
      {"data.num_test", Number<int>([](RunConfig& c) -> auto& { return c.data.num_test; })},
      {"data.min_classes_per_video", Number<int>([](RunConfig& c) -> auto& { return c.data.min_classes_per_video; })},
      {"data.max_classes_per_video", Number<int>([](RunConfig& c) -> auto& { return c.data.max_classes_per_video; })},
      {"data.min_intervals", Number<int>([](RunConfig& c) -> auto& { return c.data.min_intervals; })},
      {"data.max_intervals", Number<int>([](RunConfig& c) -> auto& { return c.data.max_intervals; })},
      {"data.min_interval_length", Number<int>([](RunConfig& c) -> auto& { return c.data.min_interval_length; })},
      {"data.max_interval_length", Number<int>([](RunConfig& c) -> auto& { return c.data.max_interval_length; })},
      {"data.separation", Number<double>([](RunConfig& c) -> auto& { return c.data.separation; })},
      {"data.noise", Number<double>([](RunConfig& c) -> auto& { return c.data.noise; })},
      {"data.fps", Number<double>([](RunConfig& c) -> auto& { return c.data.fps; })},
      {"data.seed", Number<std::uint64_t>([](RunConfig& c) -> auto& { return c.data.seed; })},
  };
  return *table;
}

}  // namespace

void RunConfig::SyncThresholds() {
  Require(theta_act_step > 0, ErrorKind::kInvalidArgument,
          "infer.theta_act_step must be positive");
  Require(theta_act_max >= 0 && theta_act_max <= 1, ErrorKind::kInvalidArgument,
          "infer.theta_act_max must lie in [0, 1]");
  // Index-based so 0.5 / 0.025 lands on exactly 21 values.
  const auto count =
      static_cast<int>(std::floor(theta_act_max / theta_act_step + 1e-9));
  infer.theta_act.clear();
  for (int i = 0; i <= count; ++i) infer.theta_act.push_back(i * theta_act_step);
}

void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value) {
  const auto it = Table().find(key);
  if (it == Table().end()) {
    Fail(ErrorKind::kInvalidArgument,
         "unknown configuration key '" + std::string(key) + "'");
  }
  it->second(config, key, value);
}

void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(ErrorKind::kInvalidArgument, e.what());
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      Fail(ErrorKind::kInvalidArgument,
           path.string() + ": key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : entries) {
      ApplySetting(config, section + "." + key, value.data());
    }
  }
}

std::vector<std::string> SettingKeys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : Table()) keys.push_back(key);
  return keys;
}

}  // namespace basnet

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
#include "basnet/data.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "basnet/json_util.h"

namespace basnet {

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  Fail(ErrorKind::kParse, "unknown subset '" + std::string(name) +
                              "' (expected train or test)");
}

void VideoRecord::Validate(std::size_t num_classes) const {
  Require(features.rank() == 2 && features.rows() >= 1, ErrorKind::kShape,
          "video " + id + " has no segments");
  for (float v : features.values()) {
    Require(std::isfinite(v), ErrorKind::kInvalidArgument,
            "video " + id + " has non-finite features");
  }
  Require(fps > 0, ErrorKind::kInvalidArgument, "video " + id + " has fps <= 0");
  Require(label.num_classes() == num_classes, ErrorKind::kMismatch,
          "video " + id + " label has " + std::to_string(label.num_classes()) +
              " classes, dataset has " + std::to_string(num_classes));
  label.Validate();
  for (const GtInterval& g : gt) {
    Require(g.start_sec >= 0 && g.start_sec < g.end_sec,
            ErrorKind::kInvalidArgument,
            "video " + id + " has an invalid ground-truth interval");
    Require(g.class_id >= 0 && static_cast<std::size_t>(g.class_id) < num_classes,
            ErrorKind::kInvalidArgument,
            "video " + id + " has a ground-truth interval of unknown class");
  }
}

int Dataset::ClassIndex(std::string_view name) const {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<const VideoRecord*> Dataset::Select(Split split) const {
  std::vector<const VideoRecord*> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(&r);
  }
  return out;
}

void Dataset::Validate() const {
  Require(!class_names.empty(), ErrorKind::kInvalidArgument,
          "dataset has no classes");
  std::set<std::string> ids;
  std::size_t dim = 0;
  for (const auto& r : records) {
    r.Validate(class_names.size());
    Require(ids.insert(r.id).second, ErrorKind::kInvalidArgument,
            "duplicate video id " + r.id);
    if (dim == 0) dim = r.feature_dim();
    Require(r.feature_dim() == dim, ErrorKind::kMismatch,
            "video " + r.id + " has feature dimension " +
                std::to_string(r.feature_dim()) + ", expected " +
                std::to_string(dim));
  }
}

std::vector<std::size_t> SampleTrain(std::size_t num_raw, std::size_t target,
                                     Rng& rng) {
  Require(num_raw >= 1 && target >= 1, ErrorKind::kInvalidArgument,
          "sampling needs at least one raw and one target segment");
  std::vector<std::size_t> indices(target);
  const double l = static_cast<double>(num_raw);
  const double t = static_cast<double>(target);
  for (std::size_t i = 0; i < target; ++i) {
    const double lo = static_cast<double>(i) * l / t;
    const double hi = static_cast<double>(i + 1) * l / t;
    const double u = UniformRange(rng, lo, hi);
    const auto first = static_cast<std::size_t>(std::floor(lo));
    const auto last = std::max(
        first, static_cast<std::size_t>(std::ceil(hi)) - std::size_t{1});
    auto idx = static_cast<std::size_t>(std::floor(u));
    idx = std::clamp(idx, first, last);
    indices[i] = std::min(idx, num_raw - 1);
  }
  return indices;
}

std::vector<std::size_t> SampleTest(std::size_t num_raw, std::size_t target) {
  Require(num_raw >= 1 && target >= 1, ErrorKind::kInvalidArgument,
          "sampling needs at least one raw and one target segment");
  std::vector<std::size_t> indices(target);
  for (std::size_t i = 0; i < target; ++i) indices[i] = i * num_raw / target;
  return indices;
}

Tensor BuildFeatureMap(const VideoRecord& record,
                       std::span<const std::size_t> indices) {
  const std::size_t dim = record.feature_dim();
  Tensor map({dim, indices.size()});
  for (std::size_t t = 0; t < indices.size(); ++t) {
    Require(indices[t] < record.num_segments(), ErrorKind::kInvalidArgument,
            "segment index " + std::to_string(indices[t]) + " outside video " +
                record.id + " with " + std::to_string(record.num_segments()) +
                " segments");
    const auto src = record.features.row(indices[t]);
    for (std::size_t d = 0; d < dim; ++d) map(d, t) = src[d];
  }
  return map;
}

namespace {

constexpr char kManifestFile[] = "manifest.json";
constexpr char kAnnotationsFile[] = "annotations.json";

[[noreturn]] void SchemaError(const std::string& source, std::size_t line,
                              const std::string& what) {
  Fail(ErrorKind::kParse,
       source + ":" + std::to_string(line) + ": " + what);
}

std::size_t LineAt(const std::vector<std::size_t>& lines, std::size_t i) {
  return i < lines.size() ? lines[i] : 0;
}

}  // namespace

Annotations AnnotationsOf(const Dataset& dataset) {
  Annotations out;
  for (const auto& r : dataset.records) {
    auto& list = out[r.id];
    for (const auto& g : r.gt) {
      list.push_back({dataset.class_names[g.class_id], g.start_sec, g.end_sec});
    }
  }
  return out;
}

void WriteAnnotations(const Annotations& annotations,
                      const std::filesystem::path& path) {
  Json root = Json::object();
  for (const auto& [id, list] : annotations) {
    Json entries = Json::array();
    for (const auto& a : list) {
      entries.push_back(
          {{"label", a.label}, {"start_sec", a.start_sec}, {"end_sec", a.end_sec}});
    }
    root[id] = std::move(entries);
  }
  WriteTextFile(path, root.dump(1) + "\n");
}

Annotations ReadAnnotations(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  const std::string source = path.string();
  const Json root = ParseJsonText(text, source);
  if (!root.is_object()) SchemaError(source, 1, "expected an object of videos");
  Annotations out;
  for (const auto& [id, list] : root.items()) {
    const auto lines = ArrayElementLines(text, id);
    if (!list.is_array()) {
      SchemaError(source, 1, "annotations for '" + id + "' must be a list");
    }
    auto& dst = out[id];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Json& e = list[i];
      const std::size_t line = LineAt(lines, i);
      if (!e.is_object() || !e.contains("label") || !e["label"].is_string() ||
          !e.contains("start_sec") || !e["start_sec"].is_number() ||
          !e.contains("end_sec") || !e["end_sec"].is_number()) {
        SchemaError(source, line,
                    "annotation needs string 'label' and numeric "
                    "'start_sec'/'end_sec'");
      }
      NamedInterval a{e["label"].get<std::string>(),
                      e["start_sec"].get<double>(), e["end_sec"].get<double>()};
      if (!(a.start_sec >= 0 && a.start_sec < a.end_sec)) {
        SchemaError(source, line, "annotation needs 0 <= start_sec < end_sec");
      }
      dst.push_back(std::move(a));
    }
  }
  return out;
}

void WriteDataset(const Dataset& dataset, const std::filesystem::path& dir) {
  dataset.Validate();
  std::filesystem::create_directories(dir / "features");
  Json manifest = Json::object();
  manifest["classes"] = dataset.class_names;
  Json videos = Json::array();
  for (const auto& r : dataset.records) {
    const std::string rel = "features/" + r.id + ".bsnf";
    WriteFeatureFile(dir / rel, r.features);
    Json labels = Json::array();
    for (std::size_t c = 0; c < r.label.num_classes(); ++c) {
      if (r.label.Has(c)) labels.push_back(dataset.class_names[c]);
    }
    videos.push_back({{"id", r.id},
                      {"feature_path", rel},
                      {"label", labels},
                      {"fps", r.fps},
                      {"duration_sec", r.duration_sec()},
                      {"subset", SplitName(r.split)}});
  }
  manifest["videos"] = std::move(videos);
  WriteTextFile(dir / kManifestFile, manifest.dump(1) + "\n");
  WriteAnnotations(AnnotationsOf(dataset), dir / kAnnotationsFile);
}

Dataset ReadDataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  const std::string source = manifest_path.string();
  const std::string text = ReadTextFile(manifest_path);
  const Json root = ParseJsonText(text, source);
  if (!root.is_object() || !root.contains("classes") ||
      !root["classes"].is_array() || !root.contains("videos") ||
      !root["videos"].is_array()) {
    SchemaError(source, 1, "manifest needs 'classes' and 'videos' lists");
  }
  Dataset dataset;
  for (const auto& c : root["classes"]) {
    if (!c.is_string()) SchemaError(source, 1, "class names must be strings");
    dataset.class_names.push_back(c.get<std::string>());
  }
  const auto lines = ArrayElementLines(text, "videos");
  const Json& videos = root["videos"];
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const Json& v = videos[i];
    const std::size_t line = LineAt(lines, i);
    const bool ok = v.is_object() && v.contains("id") && v["id"].is_string() &&
                    v.contains("feature_path") &&
                    v["feature_path"].is_string() && v.contains("label") &&
                    v["label"].is_array() && v.contains("fps") &&
                    v["fps"].is_number() && v.contains("subset") &&
                    v["subset"].is_string();
    if (!ok) {
      SchemaError(source, line,
                  "video entry needs id, feature_path, label, fps, subset");
    }
    VideoRecord r;
    r.id = v["id"].get<std::string>();
    r.fps = v["fps"].get<double>();
    try {
      r.split = ParseSplit(v["subset"].get<std::string>());
    } catch (const Error& e) {
      SchemaError(source, line, e.what());
    }
    std::vector<int> classes;
    for (const auto& name : v["label"]) {
      const int c = name.is_string() ? dataset.ClassIndex(name.get<std::string>())
                                     : -1;
      if (c < 0) SchemaError(source, line, "unknown class in label of " + r.id);
      classes.push_back(c);
    }
    r.label = VideoLabel::FromClasses(dataset.num_classes(), classes);
    std::filesystem::path feature_path = v["feature_path"].get<std::string>();
    if (feature_path.is_relative()) feature_path = dir / feature_path;
    r.features = ReadFeatureFile(feature_path);
    if (v.contains("duration_sec") && v["duration_sec"].is_number()) {
      const double declared = v["duration_sec"].get<double>();
      Require(std::abs(declared - r.duration_sec()) <= 1e-6 * std::max(1.0, declared),
              ErrorKind::kMismatch,
              source + ":" + std::to_string(line) + ": duration_sec " +
                  std::to_string(declared) + " disagrees with " +
                  std::to_string(r.num_segments()) + " segments at " +
                  std::to_string(r.fps) + " fps");
    }
    dataset.records.push_back(std::move(r));
  }

  const auto annotations_path = dir / kAnnotationsFile;
  if (std::filesystem::exists(annotations_path)) {
    const Annotations annotations = ReadAnnotations(annotations_path);
    for (auto& r : dataset.records) {
      const auto it = annotations.find(r.id);
      if (it == annotations.end()) continue;
      for (const auto& a : it->second) {
        const int c = dataset.ClassIndex(a.label);
        Require(c >= 0, ErrorKind::kParse,
                annotations_path.string() + ": unknown class '" + a.label + "'");
        r.gt.push_back({c, a.start_sec, a.end_sec});
      }
    }
  }
  dataset.Validate();
  return dataset;
}

}  // namespace basnet

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
#include "basnet/commands.h"

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "basnet/json_util.h"
#include "basnet/run_config.h"
#include "basnet/synthetic.h"
#include "basnet/trainer.h"

namespace basnet {

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
    case ErrorKind::kCheckFailed:
      return kExitCheck;
    default:
      return kExitData;
  }
}

std::vector<VideoProposals> InferSplit(const Checkpoint& checkpoint,
                                       const Dataset& dataset,
                                       const InferConfig& config, Split split) {
  RequireCompatible(checkpoint.meta, dataset);
  std::vector<VideoProposals> out;
  for (const VideoRecord* video : dataset.Select(split)) {
    const VideoOutputs outputs = RunVideo(checkpoint, *video);
    out.push_back({video->id, InferVideo(checkpoint, outputs, config)});
  }
  return out;
}

std::vector<Detection> ToDetections(std::span<const VideoProposals> videos) {
  std::vector<Detection> out;
  for (const auto& v : videos) {
    for (const auto& p : v.proposals) {
      out.push_back({v.video_id, p.class_id, p.start_sec, p.end_sec, p.score});
    }
  }
  return out;
}

std::vector<GroundTruth> SplitGroundTruth(const Dataset& dataset, Split split) {
  std::vector<GroundTruth> out;
  for (const VideoRecord* video : dataset.Select(split)) {
    for (const auto& g : video->gt) {
      out.push_back({video->id, g.class_id, g.start_sec, g.end_sec});
    }
  }
  return out;
}

BackgroundRule ParseBackgroundRule(std::string_view name) {
  if (name == "cas") return BackgroundRule::kCasArgmax;
  if (name == "weights") return BackgroundRule::kFilterWeight;
  Fail(ErrorKind::kInvalidArgument,
       "unknown background rule '" + std::string(name) + "' (cas, weights)");
}

double BackgroundFMeasure(const Checkpoint& checkpoint, const Dataset& dataset,
                          Split split, BackgroundRule rule) {
  RequireCompatible(checkpoint.meta, dataset);
  Require(checkpoint.meta.mode != TrainMode::kBaseline,
          ErrorKind::kInvalidArgument,
          "baseline checkpoints have no background class to evaluate");
  const int num_classes = checkpoint.meta.model.num_classes;
  const bool supp =
      InferenceBranch(checkpoint.meta.mode) == Branch::kSuppression;
  std::vector<std::vector<bool>> predicted;
  std::vector<std::vector<bool>> truth;
  for (const VideoRecord* video : dataset.Select(split)) {
    const VideoOutputs outputs = RunVideo(checkpoint, *video);
    if (supp && rule == BackgroundRule::kFilterWeight) {
      predicted.push_back(BackgroundMaskFromWeights(outputs.weights));
    } else {
      predicted.push_back(BackgroundMask(
          supp ? outputs.cas_supp : outputs.cas_base, num_classes));
    }
    truth.push_back(GtBackgroundMask(video->gt, outputs.time_map));
  }
  return FMeasureBackground(predicted, truth);
}

GradCheckReport TinyGradCheck(std::uint64_t seed, bool inject_error) {
  ModelConfig config;
  config.num_classes = 3;
  config.feature_dim = 8;
  config.num_segments = 12;
  config.hidden_dim = 8;
  config.filter_hidden = 16;
  config.seed = seed;
  const BasNet<double> model = BasNet<float>::Create(config).Cast<double>();

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TensorD> maps;
  std::vector<VideoLabel> labels;
  for (int b = 0; b < 2; ++b) {
    TensorD x({8, 12});
    for (double& v : x.values()) v = UniformRange(rng, -1.0, 1.0);
    maps.push_back(std::move(x));
    std::vector<int> classes = {static_cast<int>(UniformInt(rng, 0, 2))};
    if (b == 1) classes.push_back((classes[0] + 1) % 3);
    labels.push_back(VideoLabel::FromClasses(3, classes));
  }
  std::vector<LabeledMap<double>> batch;
  for (int b = 0; b < 2; ++b) batch.push_back({&maps[b], &labels[b]});

  ObjectiveConfig objective;
  objective.mode = TrainMode::kFull;
  // T = 12 with r = 8 keeps k = 1; r = 4 exercises a top-3 mean instead.
  objective.r = 4;
  // A larger norm weight makes that term visible to the checker.
  objective.gamma = 0.1;

  const LossClosure loss = [&](const ParameterSet<double>& params,
                               ParameterSet<double>* grads) {
    const BasNet<double> probe(config, params);
    const LossBreakdown l = BatchObjective<double>(probe, batch, objective, grads);
    if (grads != nullptr && inject_error) {
      grads->value(0)[0] += 1e-3;
    }
    return l.l_overall;
  };
  return GradCheck(loss, model.params());
}

namespace {

void ConfigureLogging() {
  static bool done = false;
  if (!done) {
    spdlog::set_default_logger(spdlog::stderr_color_st("basnet"));
    done = true;
  }
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("BSN_LOG")) {
    const std::string level(env);
    if (level == "error") spdlog::set_level(spdlog::level::err);
    if (level == "info") spdlog::set_level(spdlog::level::info);
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
  }
}

// Raw override text keyed by configuration key; applied after --config.
class Overrides {
 public:
  void Add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app->add_option(flag, values_[key], help);
  }
  void ApplyTo(RunConfig& config) const {
    for (const auto& [key, value] : values_) {
      if (value) ApplySetting(config, key, *value);
    }
  }

 private:
  std::map<std::string, std::optional<std::string>> values_;
};

bool DirectoryHasEntries(const std::filesystem::path& dir) {
  return std::filesystem::is_directory(dir) &&
         !std::filesystem::is_empty(dir);
}

int CmdSynth(const RunConfig& config, const std::filesystem::path& out,
             bool force) {
  if (std::filesystem::exists(out) && !std::filesystem::is_directory(out)) {
    Fail(ErrorKind::kInvalidArgument, out.string() + " is not a directory");
  }
  if (DirectoryHasEntries(out)) {
    if (!force) {
      Fail(ErrorKind::kInvalidArgument,
           out.string() + " is not empty; pass --force to overwrite");
    }
    std::filesystem::remove(out / "manifest.json");
    std::filesystem::remove(out / "annotations.json");
    std::filesystem::remove_all(out / "features");
  }
  const SyntheticData data = GenerateSynthetic(config.data);
  WriteDataset(data.dataset, out);
  std::cout << "wrote " << data.dataset.records.size() << " videos to "
            << out.string() << "\n";
  return kExitOk;
}

int CmdTrain(RunConfig config, const std::filesystem::path& data_dir,
             const std::filesystem::path& out) {
  const Dataset dataset = ReadDataset(data_dir);
  config.model.num_classes = dataset.num_classes();
  Require(!dataset.records.empty(), ErrorKind::kMismatch, "dataset is empty");
  config.model.feature_dim =
      static_cast<int>(dataset.records.front().feature_dim());
  TrainOutputs outputs;
  outputs.dir = out;
  const TrainResult result = Train(dataset, config.model, config.train, outputs);
  if (!result.history.empty()) {
    std::printf("trained %zu steps: l_overall %.6f -> %.6f\n",
                result.history.size(), result.history.front().l_overall,
                result.history.back().l_overall);
  }
  std::cout << "checkpoint: " << (out / "checkpoint.bsnc").string() << "\n";
  return kExitOk;
}

int CmdInfer(const RunConfig& config, const std::filesystem::path& checkpoint_path,
             const std::filesystem::path& data_dir,
             const std::filesystem::path& out,
             const std::optional<std::filesystem::path>& dump_cas,
             const std::string& dump_branch, Split split) {
  config.infer.Validate();
  const Checkpoint checkpoint = LoadCheckpoint(checkpoint_path);
  const Dataset dataset = ReadDataset(data_dir);
  RequireCompatible(checkpoint.meta, dataset);
  bool supp = InferenceBranch(checkpoint.meta.mode) == Branch::kSuppression;
  if (dump_branch == "base") {
    supp = false;
  } else if (dump_branch == "supp") {
    supp = true;
  } else {
    Require(dump_branch == "inference", ErrorKind::kInvalidArgument,
            "--dump-branch must be inference, base or supp");
  }
  if (dump_cas) std::filesystem::create_directories(*dump_cas);

  std::vector<VideoProposals> videos;
  std::size_t count = 0;
  for (const VideoRecord* video : dataset.Select(split)) {
    const VideoOutputs outputs = RunVideo(checkpoint, *video);
    videos.push_back({video->id, InferVideo(checkpoint, outputs, config.infer)});
    count += videos.back().proposals.size();
    if (dump_cas) {
      WriteTextFile(*dump_cas / (video->id + ".csv"),
                    CasTraceCsv(supp ? outputs.cas_supp : outputs.cas_base,
                                outputs.weights));
    }
  }
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  WriteTextFile(out, ProposalsToJson(videos, dataset.class_names));
  std::cout << "wrote " << count << " proposals for " << videos.size()
            << " videos to " << out.string() << "\n";
  return kExitOk;
}

int CmdEval(const std::filesystem::path& proposals_path,
            const std::filesystem::path& data_dir,
            const std::optional<std::filesystem::path>& annotations_path,
            const std::optional<std::filesystem::path>& checkpoint_path,
            bool fmeasure, BackgroundRule rule,
            const std::optional<std::filesystem::path>& out, Split split) {
  const Dataset dataset = ReadDataset(data_dir);
  const auto predictions = ParseProposals(ReadTextFile(proposals_path),
                                          proposals_path.string(),
                                          dataset.class_names);
  std::vector<GroundTruth> gt;
  if (annotations_path) {
    std::set<std::string> ids;
    for (const VideoRecord* v : dataset.Select(split)) ids.insert(v->id);
    gt = GroundTruthFrom(ReadAnnotations(*annotations_path),
                         dataset.class_names, ids);
  } else {
    gt = SplitGroundTruth(dataset, split);
  }
  EvalReport report = MapAt(predictions, gt, dataset.class_names);
  if (fmeasure) {
    Require(checkpoint_path.has_value(), ErrorKind::kInvalidArgument,
            "--fmeasure needs --checkpoint");
    report.background_f =
        BackgroundFMeasure(LoadCheckpoint(*checkpoint_path), dataset, split, rule);
  }
  std::cout << report.ToTable();
  if (out) {
    if (out->has_parent_path()) {
      std::filesystem::create_directories(out->parent_path());
    }
    WriteTextFile(*out, report.ToJson());
  }
  return kExitOk;
}

int CmdGradcheck(std::uint64_t seed, bool inject_error) {
  const GradCheckReport report = TinyGradCheck(seed, inject_error);
  std::cout << report.ToString();
  constexpr double kTolerance = 1e-5;
  if (!report.Passed(kTolerance)) {
    std::cout << "FAIL: max relative error " << report.max_rel_error
              << " >= " << kTolerance << "\n";
    return kExitCheck;
  }
  std::cout << "PASS\n";
  return kExitOk;
}

int Dispatch(const std::vector<std::string>& args) {
  CLI::App app(
      "Weakly-supervised temporal action localization with background "
      "suppression",
      "basnet");
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::filesystem::path data_dir;
  std::filesystem::path out;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> proposals;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> dump_cas;
  std::optional<std::uint64_t> seed;
  std::optional<int> videos;
  std::string split_name = "test";
  std::string dump_branch = "inference";
  std::string bg_rule = "cas";
  bool force = false;
  bool fmeasure = false;
  bool inject_error = false;
  Overrides overrides;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--config", config_path, "INI configuration file");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--videos", videos,
                    "Total video count, split 4:1 into train and test");
  synth->add_flag("--force", force, "Overwrite a non-empty output directory");
  overrides.Add(synth, "--classes", "data.num_classes", "Action classes");
  overrides.Add(synth, "--feature-dim", "data.feature_dim", "Feature width");
  overrides.Add(synth, "--noise", "data.noise", "Gaussian noise sigma");
  overrides.Add(synth, "--separation", "data.separation", "Prototype scale");

  auto* train = app.add_subcommand("train", "Train a model");
  train->add_option("--config", config_path, "INI configuration file");
  train->add_option("--data-dir", data_dir, "Dataset directory")->required();
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--seed", seed, "Model and training seed");
  overrides.Add(train, "--mode", "train.mode",
                "baseline, base_only, supp_only or full");
  overrides.Add(train, "--max-steps", "train.max_steps", "Update steps");
  overrides.Add(train, "--lr", "train.lr", "Adam learning rate");
  overrides.Add(train, "--batch-size", "train.batch_size", "Videos per step");
  overrides.Add(train, "--r", "train.r", "Top-k ratio, k = floor(T / r)");
  overrides.Add(train, "--alpha", "train.alpha", "Base branch loss weight");
  overrides.Add(train, "--beta", "train.beta", "Suppression loss weight");
  overrides.Add(train, "--gamma", "train.gamma", "Weight norm loss weight");
  overrides.Add(train, "--threads", "train.threads", "Worker threads");
  overrides.Add(train, "--checkpoint-interval", "train.checkpoint_interval",
                "Steps between intermediate checkpoints");
  overrides.Add(train, "--num-segments", "model.num_segments",
                "Sampled segments per video");
  overrides.Add(train, "--filter-hidden", "model.filter_hidden",
                "Filtering module hidden width");

  auto* infer = app.add_subcommand("infer", "Produce proposals");
  infer->add_option("--config", config_path, "INI configuration file");
  infer->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  infer->add_option("--data-dir", data_dir, "Dataset directory")->required();
  infer->add_option("--out", out, "Proposals file")->required();
  infer->add_option("--dump-cas", dump_cas, "Directory for per-video CSV traces");
  infer->add_option("--dump-branch", dump_branch,
                    "Sequence to trace: inference (default), base or supp");
  infer->add_option("--split", split_name, "Subset to run on");
  overrides.Add(infer, "--theta-class", "infer.theta_class",
                "Class probability threshold");
  overrides.Add(infer, "--theta-act-step", "infer.theta_act_step",
                "Activation threshold step over [0, 0.5]");
  overrides.Add(infer, "--nms-iou", "infer.nms_iou", "NMS tIoU threshold");
  overrides.Add(infer, "--multiply-class-prob", "infer.multiply_class_prob",
                "Scale proposal scores by the class probability");
  overrides.Add(infer, "--pool-before-nms", "infer.pool_before_nms",
                "Pool thresholds before NMS (default true)");

  auto* eval = app.add_subcommand("eval", "Score proposals");
  eval->add_option("--proposals", proposals, "Proposals file")->required();
  eval->add_option("--data-dir", data_dir, "Dataset directory")->required();
  eval->add_option("--annotations", annotations,
                   "Annotations file (default: the dataset's own)");
  eval->add_option("--out", out, "Report file");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint for --fmeasure");
  eval->add_option("--split", split_name, "Subset to score");
  eval->add_flag("--fmeasure", fmeasure, "Also report background F-measure");
  eval->add_option("--bg-rule", bg_rule,
                   "Background prediction: cas (default) or weights");

  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients");
  gradcheck->add_option("--config", config_path, "Accepted for symmetry");
  gradcheck->add_option("--seed", seed, "Seed of the tiny model");
  gradcheck->add_flag("--inject-error", inject_error,
                      "Corrupt one gradient entry (negative control)");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1),
                                    args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  if (config_path) ApplyConfigFile(config, *config_path);
  overrides.ApplyTo(config);
  config.SyncThresholds();

  if (synth->parsed()) {
    if (seed) config.data.seed = *seed;
    if (videos) {
      Require(*videos > 0, ErrorKind::kInvalidArgument,
              "--videos must be positive");
      config.data.num_test = *videos / 5;
      config.data.num_train = *videos - config.data.num_test;
    }
    return CmdSynth(config, out, force);
  }
  if (train->parsed()) {
    if (seed) {
      config.model.seed = *seed;
      config.train.seed = *seed;
    }
    return CmdTrain(config, data_dir, out);
  }
  const Split split = ParseSplit(split_name);
  if (infer->parsed()) {
    return CmdInfer(config, *checkpoint, data_dir, out, dump_cas, dump_branch,
                    split);
  }
  if (eval->parsed()) {
    std::optional<std::filesystem::path> report_path;
    if (!out.empty()) report_path = out;
    return CmdEval(*proposals, data_dir, annotations, checkpoint, fmeasure,
                   ParseBackgroundRule(bg_rule), report_path, split);
  }
  return CmdGradcheck(seed.value_or(0), inject_error);
}

}  // namespace

int RunCli(const std::vector<std::string>& args) {
  ConfigureLogging();
  try {
    return Dispatch(args);
  } catch (const Error& e) {
    spdlog::error("{}: {}", ErrorKindName(e.kind()), e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("io: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("internal: {}", e.what());
    return kExitCheck;
  }
}

}  // namespace basnet

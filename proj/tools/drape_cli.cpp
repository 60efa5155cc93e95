// Copyright 2026 The Drape Authors
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


#include <cstdint>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "drape/eval_metrics.hpp"
#include "drape/manifest.hpp"
#include "drape/pipeline.hpp"
#include "drape/toy_data.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Blanket-occlusion augmentation for motion-capture sequences"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate, render and package augmented videos");
  drape::GenerationConfig config;
  fs::path input, output;
  std::uint64_t seed = 0;
  std::string encoder = "png";
  bool no_telemetry = false;
  gen->set_config("--config", "", "Flat key=value file mirroring these flags");
  gen->add_option("--input", input, "Sequence folder or folder of sequence folders")->required();
  gen->add_option("--output", output, "Dataset root")->required();
  gen->add_option("--seed", seed, "Run seed")->capture_default_str();
  gen->add_option("--grid-res", config.grid_res, "Cloth particles per side")->capture_default_str();
  gen->add_option("--substeps", config.sim.substeps, "Solver substeps per frame")->capture_default_str();
  gen->add_option("--collision-iters", config.sim.collision_iterations, "Collision passes per substep")
      ->capture_default_str();
  gen->add_option("--constraint-iters", config.sim.constraint_iterations, "Constraint sweeps per substep")
      ->capture_default_str();
  gen->add_option("--margin", config.margin, "Collision distance in meters")->capture_default_str();
  gen->add_option("--warmup", config.warmup_frames, "Settling frames before each segment")->capture_default_str();
  gen->add_option("--min-restart-gap", config.min_restart_gap, "Minimum frames between segment starts")
      ->capture_default_str();
  gen->add_option("--detach-threshold", config.scene.detach_threshold, "Cloth-to-body distance that ends a segment")
      ->capture_default_str();
  gen->add_option("--encoder", encoder, "Frame format")->check(CLI::IsMember({"png", "jpeg", "jpg"}))
      ->capture_default_str();
  gen->add_option("--jobs", config.jobs, "Worker threads")->capture_default_str();
  gen->add_option("--model", config.model, "Body model folder (overrides sequence.json)");
  gen->add_option("--render-subdivision", config.render_subdivision, "Cloth refinement levels for rendering")
      ->capture_default_str();
  gen->add_option("--holdout-bias", config.render.holdout_bias, "Depth tolerance of the body holdout in meters")
      ->capture_default_str();
  gen->add_flag("--supersample", config.render.supersample, "2x2 supersampled blanket edges");
  gen->add_flag("--no-telemetry", no_telemetry, "Skip per-video telemetry files");

  // audit
  auto* aud = app.add_subcommand("audit", "Check manifest against the file tree");
  fs::path audit_dir;
  aud->add_option("--output", audit_dir, "Dataset root")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "PA-MPJPE of predictions against a manifest");
  fs::path pred, gt_manifest;
  std::string filter = "occluded", joints = "all";
  ev->add_option("--pred", pred, "Prediction header (JSON)")->required();
  ev->add_option("--gt-manifest", gt_manifest, "Split manifest")->required();
  ev->add_option("--filter", filter, "Subjects to keep")->check(CLI::IsMember({"occluded", "all"}))
      ->capture_default_str();
  ev->add_option("--joints", joints, "Joint set")->check(CLI::IsMember({"all", "subset14"}))->capture_default_str();

  // make-toy
  auto* toy = app.add_subcommand("make-toy", "Write a synthetic sequence folder");
  fs::path toy_dir;
  drape::ToySequenceOptions toy_options;
  std::string toy_split = "train";
  toy->add_option("--output", toy_dir, "Sequence folder to create")->required();
  toy->add_option("--id", toy_options.id)->capture_default_str();
  toy->add_option("--frames", toy_options.frames)->capture_default_str();
  toy->add_option("--subjects", toy_options.subjects)->capture_default_str();
  toy->add_option("--width", toy_options.width)->capture_default_str();
  toy->add_option("--height", toy_options.height)->capture_default_str();
  toy->add_option("--split", toy_split)->check(CLI::IsMember({"train", "test", "validation"}))->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*gen) {
      config.encoder = drape::parse_encoder(encoder);
      config.telemetry = !no_telemetry;
      const auto summary = drape::generate_dataset(input, output, config, seed);
      fmt::print("sequences {}  videos {}  frames {}  detached {}  sim_errors {}  failed_jobs {}\n",
                 summary.sequences, summary.videos, summary.frames, summary.detached, summary.sim_errors,
                 summary.failed_jobs);
      return summary.failed_jobs == 0 ? 0 : 1;
    }
    if (*aud) {
      const auto report = drape::audit_output(audit_dir);
      for (const auto& p : report.problems) fmt::print("problem: {}\n", p);
      fmt::print("{}: {} videos, {} files\n", report.ok() ? "ok" : "FAILED", report.videos, report.files);
      return report.ok() ? 0 : 1;
    }
    if (*ev) {
      const auto report = drape::evaluate_predictions(
          pred, gt_manifest, filter == "all" ? drape::EvalFilter::All : drape::EvalFilter::OccludedOnly,
          joints == "subset14");
      fmt::print("PA-MPJPE {:.2f} mm\nMPJPE {:.2f} mm\nsamples {}\n", report.pa_mpjpe, report.mpjpe, report.count);
      return 0;
    }
    if (*toy) {
      toy_options.split = drape::parse_split(toy_split);
      drape::write_toy_sequence(toy_dir, toy_options);
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

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


#include "drape/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "drape/binary_io.hpp"

namespace drape {

namespace fs = std::filesystem;

void GenerationConfig::validate() const {
  scene.validate();
  sim.validate();
  if (grid_res < 2) throw InvalidInput(fmt::format("grid_res must be >= 2 (got {})", grid_res));
  if (!(blanket_mass > 0)) throw InvalidInput("blanket mass must be > 0");
  if (warmup_frames < 0) throw InvalidInput("warm-up frame count must be >= 0");
  if (min_restart_gap < 1) throw InvalidInput("min restart gap must be >= 1");
  if (!(margin >= 0)) throw InvalidInput("collision margin must be >= 0");
  if (render_subdivision < 0 || render_subdivision > 3) throw InvalidInput("render subdivision must be in [0, 3]");
  if (!(render.holdout_bias >= 0)) throw InvalidInput("holdout bias must be >= 0");
  if (jobs < 1) throw InvalidInput("jobs must be >= 1");
}

std::vector<SegmentRecord> schedule_segments(int num_frames, int subject, int min_gap, SegmentSimulator& sim) {
  std::vector<SegmentRecord> records;
  int start = 0;
  while (start < num_frames) {
    SegmentRecord rec;
    rec.subject = subject;
    rec.start_frame = start;
    int f = start;
    try {
      sim.begin(start);
      for (; f < num_frames; ++f) {
        const FrameOutcome outcome = sim.advance(f);
        if (outcome == FrameOutcome::Detached) {
          rec.status = SegmentStatus::Detached;
          break;
        }
        if (outcome == FrameOutcome::SimError) {
          rec.status = SegmentStatus::SimError;
          break;
        }
        sim.emit(f);
      }
    } catch (const SimulationError& e) {
      rec.status = SegmentStatus::SimError;
      rec.message = e.what();
    }
    rec.frame_count = f - start;
    rec.end_frame = rec.status == SegmentStatus::Completed ? num_frames - 1 : f;
    sim.end(rec);
    records.push_back(rec);
    if (rec.status == SegmentStatus::Completed) break;
    start = std::max(f + 1, start + min_gap);
  }
  return records;
}

std::string video_id(const std::string& sequence_id, int subject, int start_frame) {
  return fmt::format("{}_s{}_f{:06d}", sequence_id, subject, start_frame);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BlanketMaterial video_material(std::uint64_t seed, const std::string& video) {
  return sample_blanket_color(seed, fnv1a64(video));
}

std::string frame_relpath(const SequenceInput& seq, const std::string& video, int frame, ImageEncoder encoder) {
  return fmt::format("{}/{}/{}/frame_{:06d}.{}", to_string(seq.split), seq.id, video, frame, extension(encoder));
}

void write_frame(const fs::path& out, const std::string& relpath, const FrameImage& image, ImageEncoder encoder) {
  const fs::path path = out / relpath;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
  write_image(path, image, encoder);
}

namespace {

PoseParams pose_at(const SequenceInput& seq, int subject, int frame) {
  return seq.subjects[static_cast<std::size_t>(subject)].poses[static_cast<std::size_t>(frame)];
}

SubjectAnnotation annotate(const SequenceInput& seq, const BodyTemplate& body, int subject, int frame, bool occluded) {
  const CameraModel cam = seq.camera(frame);
  const auto& track = seq.subjects[static_cast<std::size_t>(subject)];
  const Points joints = pose_joints(body, track.shape, pose_at(seq, subject, frame));
  SubjectAnnotation a;
  a.subject = subject;
  a.occluded = occluded;
  double lo_u = std::numeric_limits<double>::infinity(), lo_v = lo_u, hi_u = -lo_u, hi_v = -lo_u;
  for (const auto& j : joints) {
    const Vec3 c = cam.to_camera(j);
    a.joints_3d.push_back(c);
    if (const auto p = project(cam, j)) {
      a.keypoints.push_back({p->u, p->v, 2.0});
      lo_u = std::min(lo_u, p->u);
      lo_v = std::min(lo_v, p->v);
      hi_u = std::max(hi_u, p->u);
      hi_v = std::max(hi_v, p->v);
    } else {
      a.keypoints.push_back({0.0, 0.0, 0.0});
    }
  }
  if (hi_u >= lo_u) a.bbox = {lo_u, lo_v, hi_u - lo_u, hi_v - lo_v};
  return a;
}

// Real simulator: the subject is posed relative to its root translation at
// the segment start, so the bed and cloth live near the origin while the
// camera carries the offset.
class ClothSegmentSimulator final : public SegmentSimulator {
 public:
  ClothSegmentSimulator(const SequenceInput& seq, const BodyTemplate& body, int subject, const fs::path& out,
                        const GenerationConfig& config, std::uint64_t seed, SubjectRun& run)
      : seq_(seq), body_(body), subject_(subject), out_(out), config_(config), seed_(seed), run_(run) {}

  void begin(int start) override {
    start_ = start;
    video_ = video_id(seq_.id, subject_, start);
    material_ = video_material(seed_, video_);
    frames_.clear();
    telemetry_.close();
    if (config_.telemetry) {
      fs::create_directories(out_ / "telemetry");
      telemetry_.open(out_ / "telemetry" / (video_ + ".tsv"), std::ios::binary | std::ios::trunc);
      if (!telemetry_) throw IoError(fmt::format("cannot write telemetry for {}", video_));
      telemetry_ << "frame\tmin_body_distance\tkinetic_energy\n";
    }

    origin_ = pose_at(seq_, subject_, start).root_translation;
    const SkinnedMesh body = posed(subject_, start);
    const CameraModel cam = camera(start);
    const FarthestVertex far = farthest_vertex(body.mesh.vertices, cam);
    bed_ = build_bed_frame(body.mesh.vertices[far.index], cam, config_.scene, body.mesh.vertices);
    light_ = sun_light(config_.scene, bed_);
    const BlanketPlacement placement = init_blanket_placement(bed_, body.mesh.vertices, config_.scene);

    params_ = config_.sim;
    params_.dt = 1.0 / seq_.frame_rate;
    params_.gravity_direction = bed_.a1;
    colliders_ = ColliderSet{};
    colliders_.body.emplace(body.mesh);
    colliders_.bed = bed_;
    colliders_.margin = config_.margin;
    body_mesh_ = body.mesh;

    cloth_ = build_cloth(placement, config_.grid_res, config_.blanket_mass);
    TelemetrySink sink;
    if (config_.telemetry) sink = [this](const FrameTelemetry& t) { write_telemetry_line(telemetry_, t); };
    cloth_ = warmup(std::move(cloth_), colliders_, params_, config_.warmup_frames, sink);
  }

  FrameOutcome advance(int frame) override {
    // The start frame was reached by the warm-up against the frozen body.
    if (frame != start_) {
      body_mesh_ = posed(subject_, frame).mesh;
      colliders_.body->update(body_mesh_.vertices);
      cloth_ = step(std::move(cloth_), colliders_, params_);
    }
    const double d = min_distance_to_body(cloth_.positions, colliders_.body->bvh());
    if (config_.telemetry) write_telemetry_line(telemetry_, {frame, d, cloth_.kinetic_energy()});
    return is_detached(d, config_.scene.detach_threshold) ? FrameOutcome::Detached : FrameOutcome::Ok;
  }

  void emit(int frame) override {
    const CameraModel cam = camera(frame);
    std::vector<TriangleMesh> holdouts{body_mesh_};
    for (int k = 0; k < static_cast<int>(seq_.subjects.size()); ++k)
      if (k != subject_) holdouts.push_back(posed(k, frame).mesh);
    const DepthMap holdout = rasterize_depth(holdouts, config_.render.supersample ? scaled_camera(cam, 2) : cam);

    const QuadGrid grid = subdivide_for_render({cloth_.grid_res, cloth_.positions}, config_.render_subdivision);
    const FrameImage original = read_image(seq_.frame_path(frame));
    if (original.width != cam.width || original.height != cam.height)
      throw IoError(fmt::format("{} is {}x{}, intrinsics say {}x{}", seq_.frame_path(frame).string(), original.width,
                                original.height, cam.width, cam.height));
    const FrameImage image = render_blanket(grid.triangulate(), material_, light_, cam, holdout, original, config_.render);

    FrameRecord rec;
    rec.frame = frame;
    rec.file = frame_relpath(seq_, video_, frame, config_.encoder);
    write_frame(out_, rec.file, image, config_.encoder);
    for (int k = 0; k < static_cast<int>(seq_.subjects.size()); ++k)
      rec.subjects.push_back(annotate(seq_, body_, k, frame, k == subject_));
    frames_.push_back(std::move(rec));
  }

  void end(SegmentRecord& record) override {
    record.blanket_color = material_.albedo;
    record.seed = seed_;
    telemetry_.close();
    run_.segments.push_back({video_, seq_.id, seq_.split, record});
    if (!frames_.empty()) {
      VideoFragment v;
      v.video_id = video_;
      v.sequence_id = seq_.id;
      v.split = seq_.split;
      v.width = seq_.intrinsics.width;
      v.height = seq_.intrinsics.height;
      v.segment = record;
      v.frames = std::move(frames_);
      run_.videos.push_back(std::move(v));
    }
    frames_.clear();
    if (record.status != SegmentStatus::Completed)
      spdlog::info("{}: {} at frame {} after {} frames{}", video_, to_string(record.status), record.end_frame,
                   record.frame_count, record.message.empty() ? "" : fmt::format(" ({})", record.message));
  }

 private:
  SkinnedMesh posed(int subject, int frame) const {
    PoseParams p = pose_at(seq_, subject, frame);
    p.root_translation -= origin_;
    return pose_mesh(body_, seq_.subjects[static_cast<std::size_t>(subject)].shape, p, config_.pose);
  }
  CameraModel camera(int frame) const { return recenter_subject(origin_, seq_.camera(frame)); }

  const SequenceInput& seq_;
  const BodyTemplate& body_;
  int subject_;
  fs::path out_;
  const GenerationConfig& config_;
  std::uint64_t seed_;
  SubjectRun& run_;

  int start_ = 0;
  std::string video_;
  BlanketMaterial material_;
  Vec3 origin_ = Vec3::Zero();
  BedFrame bed_;
  DirectionalLight light_;
  SimParams params_;
  ColliderSet colliders_;
  TriangleMesh body_mesh_;
  ClothGrid cloth_;
  std::vector<FrameRecord> frames_;
  std::ofstream telemetry_;
};

std::vector<fs::path> discover_sequences(const fs::path& input) {
  if (fs::is_regular_file(input / "sequence.json")) return {input};
  if (!fs::is_directory(input)) throw IngestError(fmt::format("input {} is not a directory", input.string()));
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(input))
    if (e.is_directory() && fs::is_regular_file(e.path() / "sequence.json")) dirs.push_back(e.path());
  std::ranges::sort(dirs);
  if (dirs.empty()) throw IngestError(fmt::format("no sequence.json under {}", input.string()));
  return dirs;
}

}  // namespace

SubjectRun run_video(const SequenceInput& seq, const BodyTemplate& body, int subject, const fs::path& out,
                     const GenerationConfig& config, std::uint64_t seed) {
  if (subject < 0 || subject >= static_cast<int>(seq.subjects.size()))
    throw InvalidInput(fmt::format("subject {} out of range ({} subjects)", subject, seq.subjects.size()));
  config.validate();
  SubjectRun run;
  ClothSegmentSimulator sim(seq, body, subject, out, config, seed, run);
  schedule_segments(seq.num_frames(), subject, config.min_restart_gap, sim);
  return run;
}

RunSummary generate_dataset(const fs::path& input, const fs::path& out, const GenerationConfig& config,
                            std::uint64_t seed) {
  config.validate();
  std::vector<SequenceInput> sequences;
  std::set<std::string> ids;
  for (const auto& dir : discover_sequences(input)) {
    sequences.push_back(ingest_sequence(dir));
    if (!ids.insert(sequences.back().id).second)
      throw IngestError(fmt::format("sequence id '{}' appears twice", sequences.back().id));
  }

  std::map<fs::path, std::shared_ptr<const BodyTemplate>> templates;
  std::vector<std::shared_ptr<const BodyTemplate>> bodies;
  for (const auto& seq : sequences) {
    fs::path path = config.model;
    if (path.empty()) {
      if (!seq.body_model) throw IngestError(fmt::format("sequence '{}' names no body model and none was given", seq.id));
      path = seq.root / *seq.body_model;
    }
    path = fs::weakly_canonical(path);
    auto& slot = templates[path];
    if (!slot) slot = std::make_shared<const BodyTemplate>(load_body_template(path));
    for (const auto& s : seq.subjects) {
      if (static_cast<int>(s.shape.betas.size()) > slot->num_betas() || s.poses.empty() ||
          static_cast<int>(s.poses.front().joint_rotations.size()) != slot->num_joints())
        throw IngestError(fmt::format("sequence '{}' does not match body model {} ({} joints, {} betas)", seq.id,
                                      path.string(), slot->num_joints(), slot->num_betas()));
    }
    bodies.push_back(slot);
  }

  struct Job {
    std::size_t sequence;
    int subject;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < sequences.size(); ++s)
    for (int k = 0; k < static_cast<int>(sequences[s].subjects.size()); ++k) jobs.push_back({s, k});

  std::vector<SubjectRun> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      try {
        results[i] = run_video(sequences[job.sequence], *bodies[job.sequence], job.subject, out, config, seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(config.jobs, std::max<int>(1, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  RunSummary summary;
  summary.sequences = sequences.size();
  ManifestInput manifest;
  if (!bodies.empty()) {
    manifest.num_joints = bodies.front()->num_joints();
    manifest.parents = bodies.front()->parents;
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      ++summary.failed_jobs;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        spdlog::error("{} subject {}: {}", sequences[jobs[i].sequence].id, jobs[i].subject, e.what());
      }
      continue;
    }
    for (auto& v : results[i].videos) {
      summary.frames += v.frames.size();
      manifest.videos.push_back(std::move(v));
    }
    for (auto& s : results[i].segments) {
      summary.detached += s.segment.status == SegmentStatus::Detached;
      summary.sim_errors += s.segment.status == SegmentStatus::SimError;
      manifest.segments.push_back(std::move(s));
    }
  }
  summary.videos = manifest.videos.size();
  write_manifests(manifest, out);
  return summary;
}

// ---------------------------------------------------------------------------
// Evaluation against a manifest.

void write_predictions(const fs::path& file, const std::vector<PredictionEntry>& entries) {
  using nlohmann::json;
  const std::size_t J = entries.empty() ? 0 : entries.front().joints.size();
  json header;
  header["format"] = "drape-predictions";
  header["endianness"] = "little";
  header["num_joints"] = J;
  header["entries"] = json::array();
  std::vector<float> data;
  for (const auto& e : entries) {
    if (e.joints.size() != J) throw InvalidInput("predictions must all have the same joint count");
    header["entries"].push_back({{"image_id", e.image_id}, {"subject", e.subject}});
    for (const auto& j : e.joints)
      for (int c = 0; c < 3; ++c) data.push_back(static_cast<float>(j[c]));
  }
  const std::string bin = file.stem().string() + ".bin";
  header["joints"] = {{"file", bin}, {"shape", {entries.size(), J, 3}}};
  binio::write_f32(file.parent_path() / bin, data);
  const std::string text = header.dump(1) + "\n";
  binio::write_file(file, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

EvalReport evaluate_predictions(const fs::path& predictions, const fs::path& manifest_file, EvalFilter filter,
                                bool subset14) {
  using nlohmann::json;
  json header;
  {
    std::ifstream in(predictions);
    if (!in) throw IoError(fmt::format("cannot open {}", predictions.string()));
    try {
      header = json::parse(in);
    } catch (const json::exception& e) {
      throw IngestError(fmt::format("{}: {}", predictions.string(), e.what()));
    }
  }
  std::vector<PredictionEntry> entries;
  try {
    if (header.at("format").get<std::string>() != "drape-predictions")
      throw IngestError(fmt::format("{}: not a prediction file", predictions.string()));
    if (header.value("endianness", "little") != "little")
      throw IngestError(fmt::format("{}: only little-endian data is supported", predictions.string()));
    const auto J = header.at("num_joints").get<std::size_t>();
    const auto& list = header.at("entries");
    const auto shape = header.at("joints").at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3 || shape[0] != list.size() || shape[1] != J || shape[2] != 3)
      throw IngestError(fmt::format("{}: joints shape does not match {} entries of {} joints", predictions.string(),
                                    list.size(), J));
    const auto data = binio::read_f32(predictions.parent_path() / header.at("joints").at("file").get<std::string>(),
                                      list.size() * J * 3);
    for (std::size_t e = 0; e < list.size(); ++e) {
      PredictionEntry p;
      p.image_id = list[e].at("image_id").get<std::int64_t>();
      p.subject = list[e].at("subject").get<int>();
      for (std::size_t j = 0; j < J; ++j) {
        const float* v = &data[(e * J + j) * 3];
        p.joints.emplace_back(v[0], v[1], v[2]);
      }
      entries.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("{}: {}", predictions.string(), e.what()));
  }

  const Manifest manifest = read_manifest(manifest_file);
  std::map<std::pair<std::int64_t, int>, const ManifestAnnotation*> gt;
  for (const auto& a : manifest.annotations) gt[{a.image_id, a.subject}] = &a;

  std::vector<EvalSample> pa, plain;
  for (const auto& p : entries) {
    auto it = gt.find({p.image_id, p.subject});
    if (it == gt.end())
      throw MetricError(fmt::format("no annotation for image {} subject {}", p.image_id, p.subject));
    const ManifestAnnotation& a = *it->second;
    if (a.joints_3d.size() != p.joints.size())
      throw MetricError(fmt::format("image {} subject {}: {} predicted joints vs {} annotated", p.image_id, p.subject,
                                    p.joints.size(), a.joints_3d.size()));
    if (filter == EvalFilter::OccludedOnly && !a.occluded) continue;
    Points pred = p.joints, truth = a.joints_3d;
    if (subset14) {
      pred = select_joints(pred, joint_subset14());
      truth = select_joints(truth, joint_subset14());
    }
    pa.push_back({pa_mpjpe(pred, truth), a.occluded});
    plain.push_back({mpjpe(pred, truth), a.occluded});
  }
  EvalReport report;
  report.pa_mpjpe = aggregate(pa, filter);
  report.mpjpe = aggregate(plain, filter);
  report.count = pa.size();
  return report;
}

}  // namespace drape

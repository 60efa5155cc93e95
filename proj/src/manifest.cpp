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


#include "drape/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "drape/binary_io.hpp"

namespace drape {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Test, Split::Validation};

// SMPL joint names; other joint counts get numbered names.
constexpr std::array<const char*, 24> kSmplJoints = {
    "pelvis",     "left_hip",       "right_hip",      "spine1",      "left_knee",  "right_knee",
    "spine2",     "left_ankle",     "right_ankle",    "spine3",      "left_foot",  "right_foot",
    "neck",       "left_collar",    "right_collar",   "head",        "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow",    "left_wrist",     "right_wrist", "left_hand",  "right_hand"};

json category(int num_joints, const std::vector<int>& parents) {
  json names = json::array();
  for (int j = 0; j < num_joints; ++j)
    names.push_back(num_joints == 24 ? std::string(kSmplJoints[static_cast<std::size_t>(j)]) : fmt::format("joint_{}", j));
  json skeleton = json::array();
  for (std::size_t j = 1; j < parents.size(); ++j)
    if (parents[j] >= 0) skeleton.push_back({parents[j] + 1, static_cast<int>(j) + 1});  // COCO is 1-based
  return json::array({{{"id", 1}, {"name", "person"}, {"supercategory", "person"}, {"keypoints", names},
                       {"skeleton", skeleton}}});
}

json segment_json(const std::string& video_id, const std::string& sequence_id, const SegmentRecord& s) {
  return {{"video_id", video_id},
          {"sequence", sequence_id},
          {"subject", s.subject},
          {"start_frame", s.start_frame},
          {"end_frame", s.end_frame},
          {"frame_count", s.frame_count},
          {"status", to_string(s.status)},
          {"seed", s.seed},
          {"blanket_color", {s.blanket_color[0], s.blanket_color[1], s.blanket_color[2]}},
          {"message", s.message}};
}

}  // namespace

std::string_view to_string(SegmentStatus status) {
  switch (status) {
    case SegmentStatus::Completed: return "completed";
    case SegmentStatus::Detached: return "detached";
    case SegmentStatus::SimError: return "sim_error";
  }
  return "completed";
}

SegmentStatus parse_segment_status(std::string_view name) {
  if (name == "completed") return SegmentStatus::Completed;
  if (name == "detached") return SegmentStatus::Detached;
  if (name == "sim_error") return SegmentStatus::SimError;
  throw InvalidInput(fmt::format("unknown segment status '{}'", name));
}

fs::path manifest_path(const fs::path& out, Split split) {
  return out / "annotations" / fmt::format("{}.json", to_string(split));
}

void write_manifests(const ManifestInput& input, const fs::path& out) {
  std::vector<const VideoFragment*> videos;
  std::set<std::string> ids;
  for (const auto& v : input.videos) {
    if (!ids.insert(v.video_id).second) throw InvalidInput(fmt::format("duplicate video id '{}'", v.video_id));
    videos.push_back(&v);
  }
  std::ranges::sort(videos, {}, &VideoFragment::video_id);
  std::vector<const SegmentEntry*> segments;
  for (const auto& s : input.segments) segments.push_back(&s);
  std::ranges::sort(segments, {}, &SegmentEntry::video_id);

  fs::create_directories(out / "annotations");
  for (Split split : kSplits) {
    json doc;
    doc["info"] = {{"schema", "drape-manifest"}, {"version", kManifestVersion}, {"split", to_string(split)}};
    doc["categories"] = category(input.num_joints, input.parents);
    doc["videos"] = json::array();
    doc["images"] = json::array();
    doc["annotations"] = json::array();
    doc["segments"] = json::array();
    std::int64_t image_id = 0, annotation_id = 0;
    for (const VideoFragment* v : videos) {
      if (v->split != split) continue;
      json video = segment_json(v->video_id, v->sequence_id, v->segment);
      video["id"] = v->video_id;
      video["directory"] = fmt::format("{}/{}/{}", to_string(split), v->sequence_id, v->video_id);
      doc["videos"].push_back(std::move(video));
      for (const auto& f : v->frames) {
        ++image_id;
        doc["images"].push_back({{"id", image_id},
                                 {"video_id", v->video_id},
                                 {"frame_index", f.frame},
                                 {"file_name", f.file},
                                 {"width", v->width},
                                 {"height", v->height}});
        for (const auto& a : f.subjects) {
          json kp = json::array(), j3 = json::array();
          int visible = 0;
          for (const auto& k : a.keypoints) {
            kp.insert(kp.end(), {k[0], k[1], k[2]});
            visible += k[2] > 0;
          }
          for (const auto& j : a.joints_3d) j3.push_back({j[0], j[1], j[2]});
          doc["annotations"].push_back({{"id", ++annotation_id},
                                        {"image_id", image_id},
                                        {"category_id", 1},
                                        {"subject", a.subject},
                                        {"occluded", a.occluded},
                                        {"keypoints", kp},
                                        {"num_keypoints", visible},
                                        {"joints_3d", j3},
                                        {"bbox", a.bbox},
                                        {"area", a.bbox[2] * a.bbox[3]},
                                        {"iscrowd", 0}});
        }
      }
    }
    for (const SegmentEntry* s : segments)
      if (s->split == split) doc["segments"].push_back(segment_json(s->video_id, s->sequence_id, s->segment));

    const std::string text = doc.dump(1) + "\n";
    binio::write_file(manifest_path(out, split),
                      std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
}

Manifest read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError(fmt::format("cannot open manifest {}", file.string()));
  Manifest m;
  try {
    const json doc = json::parse(in);
    const auto& info = doc.at("info");
    if (info.at("schema").get<std::string>() != "drape-manifest")
      throw IngestError(fmt::format("{}: not a drape manifest", file.string()));
    m.version = info.at("version").get<int>();
    if (m.version != kManifestVersion)
      throw IngestError(fmt::format("{}: unsupported manifest version {}", file.string(), m.version));
    m.split = parse_split(info.at("split").get<std::string>());
    for (const auto& v : doc.at("videos")) {
      m.videos.push_back({v.at("id").get<std::string>(), v.at("sequence").get<std::string>(), v.at("subject").get<int>(),
                          v.at("start_frame").get<int>(), v.at("end_frame").get<int>(),
                          v.at("frame_count").get<int>(), v.at("status").get<std::string>()});
    }
    for (const auto& i : doc.at("images")) {
      m.images.push_back({i.at("id").get<std::int64_t>(), i.at("video_id").get<std::string>(),
                          i.at("frame_index").get<int>(), i.at("file_name").get<std::string>()});
    }
    for (const auto& a : doc.at("annotations")) {
      ManifestAnnotation ann;
      ann.id = a.at("id").get<std::int64_t>();
      ann.image_id = a.at("image_id").get<std::int64_t>();
      ann.subject = a.at("subject").get<int>();
      ann.occluded = a.at("occluded").get<bool>();
      for (const auto& j : a.at("joints_3d")) ann.joints_3d.emplace_back(j.at(0), j.at(1), j.at(2));
      const auto& kp = a.at("keypoints");
      for (std::size_t k = 0; k + 2 < kp.size(); k += 3)
        ann.keypoints.push_back({kp[k].get<double>(), kp[k + 1].get<double>(), kp[k + 2].get<double>()});
      m.annotations.push_back(std::move(ann));
    }
  } catch (const json::exception& e) {
    throw IngestError(fmt::format("{}: malformed manifest: {}", file.string(), e.what()));
  }
  return m;
}

AuditReport audit_output(const fs::path& out) {
  AuditReport report;
  auto problem = [&](std::string msg) { report.problems.push_back(std::move(msg)); };
  static const std::regex kFrameName(R"(frame_(\d{6})\.(png|jpg))");

  for (Split split : kSplits) {
    const std::string split_name(to_string(split));
    const fs::path mpath = manifest_path(out, split);
    if (!fs::exists(mpath)) {
      problem(fmt::format("missing manifest {}", mpath.string()));
      continue;
    }
    Manifest m;
    try {
      m = read_manifest(mpath);
    } catch (const Error& e) {
      problem(e.what());
      continue;
    }
    if (m.split != split) problem(fmt::format("{} declares split '{}'", mpath.string(), to_string(m.split)));

    std::map<std::string, const ManifestVideo*> videos;
    for (const auto& v : m.videos) {
      if (!videos.emplace(v.id, &v).second) problem(fmt::format("duplicate video id '{}'", v.id));
    }
    report.videos += m.videos.size();

    // Manifest side: every image sits at its canonical path and exists.
    std::set<std::string> listed;
    std::map<std::string, std::vector<int>> frames_of;
    for (const auto& img : m.images) {
      if (!listed.insert(img.file).second) problem(fmt::format("file listed twice: {}", img.file));
      auto it = videos.find(img.video_id);
      if (it == videos.end()) {
        problem(fmt::format("image {} refers to unknown video '{}'", img.id, img.video_id));
        continue;
      }
      const ManifestVideo& v = *it->second;
      const fs::path rel(img.file);
      std::vector<std::string> parts;
      for (const auto& p : rel) parts.push_back(p.string());
      std::smatch match;
      if (parts.size() != 4 || parts[0] != split_name || parts[1] != v.sequence_id || parts[2] != v.id ||
          !std::regex_match(parts[3], match, kFrameName) || std::stoi(match[1].str()) != img.frame) {
        problem(fmt::format("{} does not follow {}/{}/{}/frame_{:06d}.<ext>", img.file, split_name, v.sequence_id,
                            v.id, img.frame));
      }
      if (!fs::is_regular_file(out / rel)) problem(fmt::format("listed file missing on disk: {}", img.file));
      frames_of[v.id].push_back(img.frame);
    }
    for (const auto& v : m.videos) {
      auto frames = frames_of[v.id];
      std::ranges::sort(frames);
      bool consecutive = static_cast<int>(frames.size()) == v.frame_count;
      for (std::size_t k = 0; consecutive && k < frames.size(); ++k)
        consecutive = frames[k] == v.start_frame + static_cast<int>(k);
      if (!consecutive)
        problem(fmt::format("video '{}' frames do not cover [{}, {}) exactly", v.id, v.start_frame,
                            v.start_frame + v.frame_count));
    }

    // Disk side: nothing extra under the split folder.
    const fs::path split_dir = out / split_name;
    if (!fs::exists(split_dir)) {
      if (!m.images.empty()) problem(fmt::format("split folder {} is missing", split_dir.string()));
      continue;
    }
    for (auto it = fs::recursive_directory_iterator(split_dir); it != fs::recursive_directory_iterator(); ++it) {
      const fs::path rel = fs::relative(it->path(), out);
      const auto depth = std::distance(rel.begin(), rel.end());
      if (it->is_directory()) {
        if (depth > 3) problem(fmt::format("unexpected nested folder {}", rel.generic_string()));
        continue;
      }
      ++report.files;
      if (depth != 4) problem(fmt::format("file outside a video folder: {}", rel.generic_string()));
      if (!listed.contains(rel.generic_string())) problem(fmt::format("file not in manifest: {}", rel.generic_string()));
    }
  }
  return report;
}

}  // namespace drape

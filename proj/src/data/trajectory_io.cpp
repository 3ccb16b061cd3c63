// Copyright 2026 The contactflow Authors
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

#include "data/trajectory_io.hpp"

#include <zlib.h>

#include <bit>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "error.hpp"

namespace cf::data {

namespace {

constexpr std::uint64_t kMaxDims = 4;

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void PutStream(std::string& out, const std::vector<std::uint64_t>& dims,
               std::span<const double> data) {
  PutU64(out, data.size());
  PutU64(out, dims.size());
  for (std::uint64_t d : dims) PutU64(out, d);
  for (double v : data) PutU64(out, std::bit_cast<std::uint64_t>(v));
}

class StreamReader {
 public:
  explicit StreamReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t U64() {
    Require(bytes_.size() - pos_ >= 8, ErrorCode::kTruncated, "stream ends inside a header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  // Reads one stream, checking its element count against the dims header.
  std::vector<double> Stream(std::vector<std::uint64_t>& dims) {
    const std::uint64_t count = U64();
    const std::uint64_t ndims = U64();
    Require(ndims >= 1 && ndims <= kMaxDims, ErrorCode::kTruncated, "corrupt stream dims header");
    dims.assign(ndims, 0);
    std::uint64_t product = 1;
    for (auto& d : dims) {
      d = U64();
      product = d == 0 ? 0 : (product > UINT64_MAX / d ? UINT64_MAX : product * d);
    }
    Require(product == count, ErrorCode::kTruncated,
            "stream length prefix " + std::to_string(count) + " disagrees with its dims header");
    Require(count <= (bytes_.size() - pos_) / 8, ErrorCode::kTruncated,
            "stream length exceeds the remaining file");
    std::vector<double> out(count);
    for (auto& v : out) v = std::bit_cast<double>(U64());
    return out;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t Crc32(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string Hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08" PRIx32, v);
  return buf;
}

namespace {

std::uint64_t ParseU64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  Require(ec == std::errc{} && ptr == text.data() + text.size(), ErrorCode::kIo,
          "bad integer for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::vector<std::string> SplitSpaces(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

const std::string& Get(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  Require(it != kv.end(), ErrorCode::kIo, "manifest is missing '" + key + "'");
  return it->second;
}

}  // namespace

std::string FormatExact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double ParseDouble(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  Require(!s.empty() && end == s.c_str() + s.size(), ErrorCode::kIo,
          "bad number '" + s + "'");
  return v;
}

std::map<std::string, std::string> ParseKeyValues(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    Require(eq != std::string::npos, ErrorCode::kIo, "expected key=value, got '" + line + "'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string SerializeTrajectory(const Trajectory& t) {
  t.Validate();
  const std::uint64_t n = t.size();
  std::string payload;
  PutStream(payload, {n}, t.timestamps);
  for (const nn::Matrix& cam : t.cameras) PutStream(payload, {n, cam.cols()}, cam.values());
  auto flat = [](const auto& rows) {
    std::vector<double> out;
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
  };
  PutStream(payload, {n, 7}, flat(t.poses));
  PutStream(payload, {n, 6}, flat(t.wrenches));
  PutStream(payload, {n, flow::kActionDim}, flat(t.actions));
  PutStream(payload, {n}, t.progress);
  std::vector<double> skills;
  for (SkillLabel s : t.skills) skills.push_back(static_cast<double>(s));
  PutStream(payload, {skills.size()}, skills);
  std::vector<double> targets;
  for (const auto& target : t.targets) {
    targets.insert(targets.end(), target.pose.begin(), target.pose.end());
    targets.push_back(target.force ? 1.0 : 0.0);
    targets.push_back(target.force ? target.force->lower : 0.0);
    targets.push_back(target.force ? target.force->upper : 0.0);
  }
  PutStream(payload, {t.targets.size(), 10}, targets);

  std::ostringstream head;
  head << kTrajectoryMagic << ' ' << kFormatVersion << '\n';
  head << "task=" << t.task << '\n';
  head << "seed=" << t.seed << '\n';
  head << "object=" << FormatExact(t.object[0]) << ' ' << FormatExact(t.object[1]) << ' '
       << FormatExact(t.object[2]) << '\n';
  head << "task_prompt=" << t.task_prompt << '\n';
  head << "steps=" << n << '\n';
  head << "cameras=" << t.cameras.size() << '\n';
  head << "camera_tokens=" << t.camera_tokens << '\n';
  head << "boundaries=";
  for (std::size_t i = 0; i < t.boundaries.size(); ++i) head << (i ? " " : "") << t.boundaries[i];
  head << '\n';
  for (std::size_t i = 0; i < t.subtask_prompts.size(); ++i)
    head << "subtask_prompt." << i << '=' << t.subtask_prompts[i] << '\n';
  head << "payload_bytes=" << payload.size() << '\n';
  head << "checksum=" << Hex32(Crc32(payload)) << '\n';
  head << '\n';
  return head.str() + payload;
}

Trajectory DeserializeTrajectory(std::string_view bytes) {
  const auto eol = bytes.find('\n');
  Require(eol != std::string_view::npos, ErrorCode::kTruncated, "file ends inside the header");
  const auto magic = SplitSpaces(bytes.substr(0, eol));
  Require(magic.size() == 2 && magic[0] == kTrajectoryMagic, ErrorCode::kVersionMismatch,
          "not a contactflow trajectory file");
  Require(magic[1] == std::to_string(kFormatVersion), ErrorCode::kVersionMismatch,
          "trajectory format version " + magic[1] + " is not supported (expected " +
              std::to_string(kFormatVersion) + ")");
  const auto sep = bytes.find("\n\n", eol);
  Require(sep != std::string_view::npos, ErrorCode::kTruncated, "file ends inside the manifest");
  const auto kv = ParseKeyValues(bytes.substr(eol + 1, sep - eol));
  const std::string_view payload = bytes.substr(sep + 2);

  Trajectory t;
  t.task = Get(kv, "task");
  t.seed = ParseU64(Get(kv, "seed"), "seed");
  const auto obj = SplitSpaces(Get(kv, "object"));
  Require(obj.size() == 3, ErrorCode::kIo, "object needs three coordinates");
  for (std::size_t i = 0; i < 3; ++i) t.object[i] = ParseDouble(obj[i]);
  t.task_prompt = Get(kv, "task_prompt");
  const std::uint64_t steps = ParseU64(Get(kv, "steps"), "steps");
  const std::uint64_t cameras = ParseU64(Get(kv, "cameras"), "cameras");
  t.camera_tokens = ParseU64(Get(kv, "camera_tokens"), "camera_tokens");
  for (const auto& b : SplitSpaces(Get(kv, "boundaries")))
    t.boundaries.push_back(ParseU64(b, "boundary"));
  for (std::size_t i = 0; i < t.boundaries.size(); ++i)
    t.subtask_prompts.push_back(Get(kv, "subtask_prompt." + std::to_string(i)));
  const std::uint64_t payload_bytes = ParseU64(Get(kv, "payload_bytes"), "payload_bytes");
  const std::string& checksum = Get(kv, "checksum");

  StreamReader in(payload);
  std::vector<std::uint64_t> dims;
  auto expect = [&](std::vector<double> data, std::vector<std::uint64_t> want,
                    std::string_view name) {
    Require(dims == want, ErrorCode::kTruncated,
            "stream '" + std::string(name) + "' has unexpected dims");
    return data;
  };
  t.timestamps = expect(in.Stream(dims), {steps}, "timestamps");
  for (std::uint64_t c = 0; c < cameras; ++c) {
    auto data = in.Stream(dims);
    Require(dims.size() == 2 && dims[0] == steps, ErrorCode::kTruncated,
            "camera stream has unexpected dims");
    const auto width = dims[1];
    t.cameras.emplace_back(steps, width, std::move(data));
  }
  auto rows = [&](std::size_t width, std::string_view name, auto& out) {
    auto data = expect(in.Stream(dims), {steps, width}, name);
    out.resize(steps);
    for (std::size_t i = 0; i < steps; ++i)
      std::copy(data.begin() + i * width, data.begin() + (i + 1) * width, out[i].begin());
  };
  rows(7, "poses", t.poses);
  rows(6, "wrenches", t.wrenches);
  rows(flow::kActionDim, "actions", t.actions);
  t.progress = expect(in.Stream(dims), {steps}, "progress");
  for (double v : in.Stream(dims)) {
    Require(v >= 0.0 && v < static_cast<double>(kSkillCount) && v == static_cast<int>(v),
            ErrorCode::kChecksum, "invalid skill label in stream");
    t.skills.push_back(static_cast<SkillLabel>(static_cast<int>(v)));
  }
  const auto targets = in.Stream(dims);
  Require(dims.size() == 2 && dims[1] == 10, ErrorCode::kTruncated, "target stream has bad dims");
  for (std::uint64_t i = 0; i < dims[0]; ++i) {
    transition::SubtaskTarget target;
    std::copy(targets.begin() + i * 10, targets.begin() + i * 10 + 7, target.pose.begin());
    if (targets[i * 10 + 7] != 0.0)
      target.force = transition::ForceBounds{targets[i * 10 + 8], targets[i * 10 + 9]};
    t.targets.push_back(target);
  }
  Require(in.done() && payload.size() == payload_bytes, ErrorCode::kTruncated,
          "payload size disagrees with the manifest");
  Require(Hex32(Crc32(payload)) == checksum, ErrorCode::kChecksum,
          "payload checksum mismatch (expected " + checksum + ")");
  t.Validate();
  return t;
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo, "write failed for '" + path + "'");
}

void WriteTrajectory(const Trajectory& t, const std::string& path) {
  WriteFileBytes(path, SerializeTrajectory(t));
}

Trajectory ReadTrajectory(const std::string& path) {
  return DeserializeTrajectory(ReadFileBytes(path));
}

void DatasetManifest::Validate() const {
  Require(wrench_rate > 0.0 && camera_rate > 0.0, ErrorCode::kDomain, "rates must be positive");
  Require(force_scale > 0.0 && torque_scale > 0.0, ErrorCode::kDomain,
          "normalization constants must be positive");
  Require(files.size() == count, ErrorCode::kDomain, "manifest file list disagrees with count");
}

std::string FormatDatasetManifest(const DatasetManifest& m) {
  m.Validate();
  std::ostringstream out;
  out << "# contactflow dataset\n";
  out << "version = " << m.version << '\n';
  out << "task = " << m.task << '\n';
  out << "seed = " << m.seed << '\n';
  out << "count = " << m.count << '\n';
  out << "wrench_rate_hz = " << m.wrench_rate << '\n';
  out << "camera_rate_hz = " << m.camera_rate << '\n';
  out << "force_scale_n = " << m.force_scale << '\n';
  out << "torque_scale_nm = " << m.torque_scale << '\n';
  out << "corpus = " << m.corpus << '\n';
  out << "files =";
  for (const auto& f : m.files) out << ' ' << f;
  out << '\n';
  return out.str();
}

DatasetManifest ParseDatasetManifest(std::string_view text) {
  const auto kv = ParseKeyValues(text);
  DatasetManifest m;
  m.version = static_cast<int>(ParseU64(Get(kv, "version"), "version"));
  Require(m.version == kFormatVersion, ErrorCode::kVersionMismatch,
          "dataset version " + std::to_string(m.version) + " is not supported");
  m.task = Get(kv, "task");
  m.seed = ParseU64(Get(kv, "seed"), "seed");
  m.count = ParseU64(Get(kv, "count"), "count");
  m.wrench_rate = ParseDouble(Get(kv, "wrench_rate_hz"));
  m.camera_rate = ParseDouble(Get(kv, "camera_rate_hz"));
  m.force_scale = ParseDouble(Get(kv, "force_scale_n"));
  m.torque_scale = ParseDouble(Get(kv, "torque_scale_nm"));
  m.corpus = Get(kv, "corpus");
  m.files = SplitSpaces(Get(kv, "files"));
  m.Validate();
  return m;
}

}  // namespace cf::data

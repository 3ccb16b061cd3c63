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

#ifndef CONTACTFLOW_DATA_TRAJECTORY_IO_HPP_
#define CONTACTFLOW_DATA_TRAJECTORY_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "data/trajectory.hpp"

namespace cf::data {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kTrajectoryMagic = "contactflow-trajectory";

// File layout: "<magic> <version>\n", key=value manifest lines, a blank line,
// then binary streams. Each stream is an 8-byte little-endian element count,
// an 8-byte dimension count, the dimensions (8 bytes each) and the elements
// as little-endian IEEE-754 doubles. The manifest carries the CRC-32 of the
// binary section.
std::string SerializeTrajectory(const Trajectory& t);
Trajectory DeserializeTrajectory(std::string_view bytes);

void WriteTrajectory(const Trajectory& t, const std::string& path);
Trajectory ReadTrajectory(const std::string& path);

std::string ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::string_view bytes);

std::uint32_t Crc32(std::string_view bytes);
std::string Hex32(std::uint32_t v);

// Exact text form of a double (hexadecimal float).
std::string FormatExact(double v);
double ParseDouble(std::string_view text);

struct DatasetManifest {
  int version = kFormatVersion;
  std::string task;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  double wrench_rate = 300.0;  // Hz
  double camera_rate = 30.0;   // frames per second
  double force_scale = 100.0;  // N
  double torque_scale = 15.0;  // N m
  std::string corpus = "prompts.txt";
  std::vector<std::string> files;

  void Validate() const;
};

std::string FormatDatasetManifest(const DatasetManifest& m);
DatasetManifest ParseDatasetManifest(std::string_view text);

// Parses key=value lines, skipping blanks and '#' comments.
std::map<std::string, std::string> ParseKeyValues(std::string_view text);

}  // namespace cf::data

#endif  // CONTACTFLOW_DATA_TRAJECTORY_IO_HPP_

// Copyright 2026 The SumGD Engine Authors.
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

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "sumgd/mock_backends.hpp"

namespace sumgd::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sumgd-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << bytes;
}

// Dataset, annotations and vocabulary matching the synthetic backend with
// `params`; returns the dataset path.
inline std::filesystem::path write_synthetic_dataset(
    const std::filesystem::path& dir, std::size_t images,
    const SyntheticHallucinationBackend::Params& params = {}) {
  const SyntheticHallucinationBackend backend(params);
  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json annotations = nlohmann::json::object();
  for (std::size_t i = 0; i < images; ++i) {
    const std::string id = "img-" + std::to_string(i);
    ids.push_back(id);
    annotations[id] = backend.objects_for(id);
  }
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& noun : backend.nouns()) vocab[noun] = {noun};
  spit(dir / "annotations.json", annotations.dump());
  spit(dir / "vocab.json", vocab.dump());
  spit(dir / "dataset.json", nlohmann::json{{"schema_version", 1},
                                            {"images", ids},
                                            {"annotations", "annotations.json"},
                                            {"vocab", "vocab.json"}}
                                 .dump());
  return dir / "dataset.json";
}

}  // namespace sumgd::testing

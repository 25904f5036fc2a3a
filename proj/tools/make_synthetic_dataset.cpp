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

// Writes a dataset (image ids, annotations, object vocabulary) whose ground
// truth matches the synthetic hallucination backend, for desk-scale runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sumgd/cli.hpp"
#include "sumgd/mock_backends.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  CLI::App app{"Generate a dataset for the synthetic backend"};
  std::string out_dir;
  std::size_t images = 200;
  std::size_t objects = 4;
  std::uint64_t seed = 0;
  std::string prefix = "syn";
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--images", images, "Number of images")->capture_default_str();
  app.add_option("--objects-per-image", objects, "Ground-truth objects per image")->capture_default_str();
  app.add_option("--seed", seed, "Backend seed the dataset must match")->capture_default_str();
  app.add_option("--prefix", prefix, "Image id prefix")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? sumgd::kExitOk : sumgd::kExitUsage;
  }

  sumgd::SyntheticHallucinationBackend::Params params;
  params.objects_per_image = objects;
  params.seed = seed;
  const sumgd::SyntheticHallucinationBackend backend(params);

  nlohmann::json ids = nlohmann::json::array();
  nlohmann::json annotations = nlohmann::json::object();
  for (std::size_t i = 0; i < images; ++i) {
    const std::string id = prefix + "-" + std::to_string(i);
    ids.push_back(id);
    annotations[id] = backend.objects_for(id);
  }
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& noun : backend.nouns()) vocab[noun] = {noun};

  fs::create_directories(out_dir);
  const auto write = [&](const char* name, const nlohmann::json& j) {
    std::ofstream(fs::path(out_dir) / name) << j.dump(2) << '\n';
  };
  write("dataset.json", {{"schema_version", 1},
                         {"images", ids},
                         {"annotations", "annotations.json"},
                         {"vocab", "vocab.json"}});
  write("annotations.json", annotations);
  write("vocab.json", vocab);
  std::cout << images << " images -> " << out_dir << '\n';
  return sumgd::kExitOk;
}

// Copyright 2026 The voicemark Authors
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

// Writes a synthetic speech corpus for the CLI tests:
//   make_corpus DIR COUNT BASE_SEED [DURATION_S]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "speech_synth.hpp"
#include "voicemark/audio_io.hpp"

int main(int argc, char** argv) {
  if (argc < 4 || argc > 5) {
    std::fprintf(stderr, "usage: %s DIR COUNT BASE_SEED [DURATION_S]\n", argv[0]);
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const auto count = static_cast<std::size_t>(std::stoul(argv[2]));
  const auto seed = static_cast<std::uint64_t>(std::stoull(argv[3]));
  voicemark::testing::SynthOptions opts;
  if (argc == 5) opts.duration_s = std::stod(argv[4]);
  std::filesystem::create_directories(dir);
  const auto corpus = voicemark::testing::synthesize_corpus(count, seed, opts);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "utt%03zu.wav", i);
    voicemark::write_wav(corpus[i], dir / name);
  }
  return 0;
}

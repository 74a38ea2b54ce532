// Copyright 2026 The obbkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OBBKIT_TOOLS_CLI_H_
#define OBBKIT_TOOLS_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace obbkit::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // unreadable/invalid input, I/O errors
inline constexpr int kExitUsage = 2;    // unknown command or bad flags

struct CommandOutcome {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> artifacts;  // files written
};

// Runs one command line. args[0] is the program name. Human-readable output
// goes to `out`, diagnostics to `err`.
//
//   orp   --box x1,y1,x2,y2 --theta D
//   eval  --gts FILE --dets FILE [--kind axis|oriented] [--iou 0.4,0.5,0.6]
//   sweep --gts FILE --dets FILE [--levels 0.1..0.9]
//   synth --seed N --scenes K --out DIR [--noise P]
//   bench --kernel iou_obb|oaroi|nms [--n N]
//
// eval/sweep/orp/bench accept --format jsonl to print line-delimited JSON
// instead of a table, and --out FILE (eval/sweep) to also write it to a file.
// The OBBKIT_THREADS environment variable sets the worker count for eval and
// synth; output does not depend on it.
CommandOutcome run(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err);

struct BenchReport {
  std::string kernel;
  std::size_t n = 0;
  std::vector<double> items_per_second;  // one per repetition
  double median_items_per_second = 0.0;
};

inline constexpr int kBenchRepetitions = 5;

// Single-threaded throughput of one kernel over n random inputs, median of
// kBenchRepetitions runs. Kernels: "iou_obb" (box pairs), "oaroi" (7x7
// pooling over 64 channels, proposals), "nms" (oriented detections).
// Throws std::invalid_argument for an unknown kernel.
BenchReport bench_kernel(std::string_view kernel, std::size_t n,
                         std::uint64_t seed = 7);

// "a..b" (step 0.1), "a..b:step", or a comma list.
std::vector<double> parse_levels(const std::string& text);

}  // namespace obbkit::cli

#endif  // OBBKIT_TOOLS_CLI_H_

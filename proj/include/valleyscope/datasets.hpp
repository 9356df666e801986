// Copyright 2026 The Valleyscope Authors
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

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "valleyscope/rbm.hpp"

namespace valleyscope {

// raw UCI record: 8x8 pixels in [0,16] plus a 0-9 label
struct DigitRecord {
    std::array<int, 64> pixels{};
    int label = 0;
};

// 64 Ising visibles: 56 pixels (8 rows x 7 cols, row-major) then 8 one-hot
// label spins
struct PatternRecord {
    Vec visible;
    int cls = 0;
};

inline constexpr int kPatternPixels = 56;
inline constexpr int kPatternLabels = 8;
inline constexpr int kPatternVisible = kPatternPixels + kPatternLabels;

enum class ColumnDrop { Right, Left, MergeMax };

struct PreprocessOptions {
    int threshold = 8;       // pixel >= threshold -> +1
    int train_count = 1024;
    int test_count = 440;
    ColumnDrop drop = ColumnDrop::Right;
};

// All n x n patterns whose rows are constant (stripes) followed by those
// whose columns are constant (bars), all-equal patterns emitted once;
// 2^{n+1} - 2 in total, deterministic order.
std::vector<Vec> gen_bas(int n);

// UCI optdigits text format: 65 comma-separated integers per line.
// Malformed input reports the 1-based line number.
std::vector<DigitRecord> load_optdigits(const std::string& path);

// Keeps labels 0-7, drops a pixel column to reach 8x7, binarizes at the
// threshold, and selects train/test sets in file order balanced by
// round-robin over the classes (skipping exhausted ones).
std::pair<std::vector<PatternRecord>, std::vector<PatternRecord>> preprocess(
    const std::vector<DigitRecord>& records, const PreprocessOptions& opts = {});

void validate_pattern(const PatternRecord& rec);

// pattern file: one line per pattern, 64 space-separated spins + class
void save_patterns(const std::string& path, const std::vector<PatternRecord>& patterns);
std::vector<PatternRecord> load_patterns(const std::string& path);

}  // namespace valleyscope

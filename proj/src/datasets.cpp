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

#include "valleyscope/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace valleyscope {

std::vector<Vec> gen_bas(int n) {
    if (n < 1) throw std::invalid_argument("gen_bas: n must be >= 1");
    std::vector<Vec> out;
    const std::uint64_t codes = std::uint64_t{1} << n;
    out.reserve(2 * codes - 2);
    for (std::uint64_t code = 0; code < codes; ++code) {  // stripes: constant rows
        Vec pat(n * n);
        for (int r = 0; r < n; ++r) {
            const double s = (code >> r) & 1 ? 1.0 : -1.0;
            for (int col = 0; col < n; ++col) pat[r * n + col] = s;
        }
        out.push_back(std::move(pat));
    }
    for (std::uint64_t code = 1; code + 1 < codes; ++code) {  // bars: constant columns
        Vec pat(n * n);
        for (int col = 0; col < n; ++col) {
            const double s = (code >> col) & 1 ? 1.0 : -1.0;
            for (int r = 0; r < n; ++r) pat[r * n + col] = s;
        }
        out.push_back(std::move(pat));
    }
    return out;
}

std::vector<DigitRecord> load_optdigits(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_optdigits: cannot open " + path);
    std::vector<DigitRecord> records;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<int> fields;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                std::size_t used = 0;
                const int value = std::stoi(token, &used);
                while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used])))
                    ++used;
                if (used != token.size()) throw std::invalid_argument("trailing junk");
                fields.push_back(value);
            } catch (const std::exception&) {
                throw std::runtime_error("load_optdigits: bad field '" + token + "' on line " +
                                         std::to_string(line_no));
            }
        }
        if (fields.size() != 65)
            throw std::runtime_error("load_optdigits: expected 65 fields, got " +
                                     std::to_string(fields.size()) + " on line " +
                                     std::to_string(line_no));
        DigitRecord rec;
        for (int k = 0; k < 64; ++k) {
            if (fields[k] < 0 || fields[k] > 16)
                throw std::runtime_error("load_optdigits: pixel value " +
                                         std::to_string(fields[k]) + " out of [0,16] on line " +
                                         std::to_string(line_no));
            rec.pixels[k] = fields[k];
        }
        if (fields[64] < 0 || fields[64] > 9)
            throw std::runtime_error("load_optdigits: label " + std::to_string(fields[64]) +
                                     " out of [0,9] on line " + std::to_string(line_no));
        rec.label = fields[64];
        records.push_back(rec);
    }
    return records;
}

namespace {

PatternRecord to_pattern(const DigitRecord& rec, const PreprocessOptions& opts) {
    PatternRecord out;
    out.cls = rec.label;
    out.visible = Vec::Constant(kPatternVisible, -1.0);
    for (int r = 0; r < 8; ++r) {
        for (int col = 0; col < 7; ++col) {
            int value;
            switch (opts.drop) {
                case ColumnDrop::Right:
                    value = rec.pixels[r * 8 + col];
                    break;
                case ColumnDrop::Left:
                    value = rec.pixels[r * 8 + col + 1];
                    break;
                case ColumnDrop::MergeMax:
                    value = col == 6 ? std::max(rec.pixels[r * 8 + 6], rec.pixels[r * 8 + 7])
                                     : rec.pixels[r * 8 + col];
                    break;
                default:
                    throw std::logic_error("unknown column drop mode");
            }
            out.visible[r * 7 + col] = value >= opts.threshold ? 1.0 : -1.0;
        }
    }
    out.visible[kPatternPixels + rec.label] = 1.0;
    return out;
}

}  // namespace

std::pair<std::vector<PatternRecord>, std::vector<PatternRecord>> preprocess(
    const std::vector<DigitRecord>& records, const PreprocessOptions& opts) {
    if (opts.threshold < 1 || opts.threshold > 16)
        throw std::invalid_argument("preprocess: threshold must be in [1,16]");
    if (opts.train_count < 0 || opts.test_count < 0)
        throw std::invalid_argument("preprocess: negative counts");

    // per-class queues in file order; only classes 0-7 fit the label units
    std::array<std::vector<const DigitRecord*>, kPatternLabels> by_class;
    for (const DigitRecord& rec : records)
        if (rec.label < kPatternLabels) by_class[rec.label].push_back(&rec);

    long available = 0;
    for (const auto& q : by_class) available += static_cast<long>(q.size());
    if (available < static_cast<long>(opts.train_count) + opts.test_count)
        throw std::runtime_error("preprocess: only " + std::to_string(available) +
                                 " class-0..7 records available, need " +
                                 std::to_string(opts.train_count + opts.test_count));

    std::array<std::size_t, kPatternLabels> next{};
    const auto take_round_robin = [&](int want) {
        std::vector<PatternRecord> out;
        out.reserve(want);
        while (static_cast<int>(out.size()) < want) {
            bool progressed = false;
            for (int cls = 0; cls < kPatternLabels && static_cast<int>(out.size()) < want; ++cls) {
                if (next[cls] >= by_class[cls].size()) continue;
                out.push_back(to_pattern(*by_class[cls][next[cls]++], opts));
                progressed = true;
            }
            if (!progressed)
                throw std::runtime_error("preprocess: ran out of records mid-selection");
        }
        return out;
    };

    auto train = take_round_robin(opts.train_count);
    auto test = take_round_robin(opts.test_count);
    return {std::move(train), std::move(test)};
}

void validate_pattern(const PatternRecord& rec) {
    if (rec.visible.size() != kPatternVisible)
        throw std::invalid_argument("pattern: wrong visible size");
    if (rec.cls < 0 || rec.cls >= kPatternLabels)
        throw std::invalid_argument("pattern: class out of range");
    int plus_labels = 0;
    for (int k = 0; k < kPatternVisible; ++k) {
        if (rec.visible[k] != 1.0 && rec.visible[k] != -1.0)
            throw std::invalid_argument("pattern: entries must be +/-1");
        if (k >= kPatternPixels && rec.visible[k] == 1.0) ++plus_labels;
    }
    if (plus_labels != 1 || rec.visible[kPatternPixels + rec.cls] != 1.0)
        throw std::invalid_argument("pattern: label spins must be one-hot at the class");
}

void save_patterns(const std::string& path, const std::vector<PatternRecord>& patterns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_patterns: cannot open " + path);
    for (const PatternRecord& rec : patterns) {
        for (int k = 0; k < rec.visible.size(); ++k)
            out << (rec.visible[k] > 0 ? "1 " : "-1 ");
        out << rec.cls << "\n";
    }
}

std::vector<PatternRecord> load_patterns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_patterns: cannot open " + path);
    std::vector<PatternRecord> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        PatternRecord rec;
        rec.visible = Vec(kPatternVisible);
        for (int k = 0; k < kPatternVisible; ++k) {
            int spin;
            if (!(ss >> spin) || (spin != 1 && spin != -1))
                throw std::runtime_error("load_patterns: bad spin on line " +
                                         std::to_string(line_no));
            rec.visible[k] = spin;
        }
        if (!(ss >> rec.cls))
            throw std::runtime_error("load_patterns: missing class on line " +
                                     std::to_string(line_no));
        validate_pattern(rec);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace valleyscope

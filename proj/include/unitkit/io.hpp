#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unitkit/lengthreg.hpp"
#include "unitkit/quantize.hpp"
#include "unitkit/unitcore.hpp"

namespace unitkit {

// Text corpora: one sequence per line, base-10 numbers separated by single
// spaces, newline-terminated, no trailing spaces. An empty line is an empty
// sequence. Loaders reject malformed lines with the 1-based line number.

std::vector<std::vector<UnitId>> read_unit_lines(const std::string& path);
std::vector<RealDurations> read_duration_lines(const std::string& path);
std::vector<IntDurations> read_int_duration_lines(const std::string& path);
std::vector<std::int64_t> read_length_lines(const std::string& path);

std::string format_unit_lines(const std::vector<std::vector<UnitId>>& lines);
std::string format_int_duration_lines(const std::vector<IntDurations>& lines);

// Binary feature file: magic "UFLT", version u8=1, u32-LE rows, u32-LE dims,
// then rows*dims float32-LE values, row-major. Codebooks use magic "UFCB"
// with rows = K.
FeatureMatrix read_feature_file(const std::string& path);
void write_feature_file(const std::string& path, const FeatureMatrix& x);
Codebook read_codebook_file(const std::string& path);
void write_codebook_file(const std::string& path, const Codebook& cb);

// Duration table JSON: {"fallback": <real>, "mean_duration": {"<id>": <real>}}.
DurationTable read_duration_table(const std::string& path);
std::string format_duration_table(const DurationTable& table);

// Whole-file write via temp file + rename, so failures never leave partial
// output at the destination.
void atomic_write(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace unitkit

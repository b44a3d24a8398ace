#include "unitkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace unitkit {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (in.bad()) {
        throw IoError("read failure on " + path);
    }
    return lines;
}

[[noreturn]] void bad_line(const std::string& path, std::size_t line_no,
                           const std::string& what) {
    throw ValidationError("BadFormat", path + " line " +
                                           std::to_string(line_no) + ": " +
                                           what);
}

// Splits on single spaces; doubled or trailing spaces are format errors.
std::vector<std::string_view> split_tokens(const std::string& line,
                                           const std::string& path,
                                           std::size_t line_no) {
    std::vector<std::string_view> tokens;
    if (line.empty()) return tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t space = line.find(' ', start);
        const std::size_t end = space == std::string::npos ? line.size() : space;
        if (end == start) bad_line(path, line_no, "empty field");
        tokens.emplace_back(line.data() + start, end - start);
        if (space == std::string::npos) break;
        start = space + 1;
        if (start == line.size()) bad_line(path, line_no, "trailing space");
    }
    return tokens;
}

std::int64_t parse_int(std::string_view token, const std::string& path,
                       std::size_t line_no) {
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        bad_line(path, line_no,
                 "not an integer: '" + std::string(token) + "'");
    }
    return value;
}

double parse_real(std::string_view token, const std::string& path,
                  std::size_t line_no) {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() ||
        !std::isfinite(value)) {
        bad_line(path, line_no, "not a number: '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

std::vector<std::vector<UnitId>> read_unit_lines(const std::string& path) {
    std::vector<std::vector<UnitId>> out;
    const auto lines = read_lines(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::vector<UnitId> units;
        for (const auto token : split_tokens(lines[i], path, i + 1)) {
            const std::int64_t id = parse_int(token, path, i + 1);
            if (id < 0) {
                throw ValidationError("UnitOutOfRange",
                                      path + " line " + std::to_string(i + 1) +
                                          ": negative unit id " +
                                          std::to_string(id));
            }
            units.push_back(id);
        }
        out.push_back(std::move(units));
    }
    return out;
}

std::vector<RealDurations> read_duration_lines(const std::string& path) {
    std::vector<RealDurations> out;
    const auto lines = read_lines(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        RealDurations durations;
        for (const auto token : split_tokens(lines[i], path, i + 1)) {
            durations.push_back(parse_real(token, path, i + 1));
        }
        out.push_back(std::move(durations));
    }
    return out;
}

std::vector<IntDurations> read_int_duration_lines(const std::string& path) {
    std::vector<IntDurations> out;
    const auto lines = read_lines(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        IntDurations durations;
        for (const auto token : split_tokens(lines[i], path, i + 1)) {
            durations.push_back(parse_int(token, path, i + 1));
        }
        out.push_back(std::move(durations));
    }
    return out;
}

std::vector<std::int64_t> read_length_lines(const std::string& path) {
    std::vector<std::int64_t> out;
    const auto lines = read_lines(path);
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tokens = split_tokens(lines[i], path, i + 1);
        if (tokens.size() != 1) {
            bad_line(path, i + 1, "expected exactly one integer");
        }
        out.push_back(parse_int(tokens[0], path, i + 1));
    }
    return out;
}

std::string format_unit_lines(const std::vector<std::vector<UnitId>>& lines) {
    std::string out;
    for (const auto& units : lines) {
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (i > 0) out += ' ';
            out += std::to_string(units[i]);
        }
        out += '\n';
    }
    return out;
}

std::string format_int_duration_lines(const std::vector<IntDurations>& lines) {
    std::string out;
    for (const auto& durations : lines) {
        for (std::size_t i = 0; i < durations.size(); ++i) {
            if (i > 0) out += ' ';
            out += std::to_string(durations[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

constexpr std::size_t kHeaderSize = 4 + 1 + 4 + 4;

std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) |
           static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 |
           static_cast<std::uint32_t>(p[3]) << 24;
}

void append_u32le(std::string& out, std::uint32_t v) {
    out += static_cast<char>(v & 0xff);
    out += static_cast<char>((v >> 8) & 0xff);
    out += static_cast<char>((v >> 16) & 0xff);
    out += static_cast<char>((v >> 24) & 0xff);
}

struct RawMatrix {
    std::size_t rows = 0;
    std::size_t dims = 0;
    std::vector<float> data;
};

RawMatrix read_matrix_file(const std::string& path, const char magic[4]) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure on " + path);
    }
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), magic, 4) != 0) {
        throw ValidationError("BadFormat",
                              path + ": missing " + std::string(magic, 4) +
                                  " header");
    }
    if (static_cast<unsigned char>(bytes[4]) != 1) {
        throw ValidationError("BadFormat", path + ": unsupported version");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    RawMatrix m;
    m.rows = read_u32le(p + 5);
    m.dims = read_u32le(p + 9);
    const std::size_t want = m.rows * m.dims * sizeof(float);
    if (bytes.size() != kHeaderSize + want) {
        throw ValidationError("BadFormat",
                              path + ": payload size mismatch");
    }
    m.data.resize(m.rows * m.dims);
    // Little-endian host assumed for the float payload, as everywhere else
    // this format is produced.
    std::memcpy(m.data.data(), bytes.data() + kHeaderSize, want);
    for (const float v : m.data) {
        if (!std::isfinite(v)) {
            throw ValidationError("NonFiniteInput",
                                  path + ": non-finite value");
        }
    }
    return m;
}

void write_matrix_file(const std::string& path, const char magic[4],
                       std::size_t rows, std::size_t dims,
                       const float* data) {
    if (rows > std::numeric_limits<std::uint32_t>::max() ||
        dims > std::numeric_limits<std::uint32_t>::max()) {
        throw ValidationError("BadFormat", "matrix too large for format");
    }
    std::string bytes;
    bytes.reserve(kHeaderSize + rows * dims * sizeof(float));
    bytes.append(magic, 4);
    bytes += static_cast<char>(1);
    append_u32le(bytes, static_cast<std::uint32_t>(rows));
    append_u32le(bytes, static_cast<std::uint32_t>(dims));
    bytes.append(reinterpret_cast<const char*>(data),
                 rows * dims * sizeof(float));
    atomic_write(path, bytes);
}

}  // namespace

FeatureMatrix read_feature_file(const std::string& path) {
    RawMatrix m = read_matrix_file(path, "UFLT");
    if (m.dims < 1) {
        throw ValidationError("BadFormat", path + ": zero feature dimension");
    }
    return FeatureMatrix{m.rows, m.dims, std::move(m.data)};
}

void write_feature_file(const std::string& path, const FeatureMatrix& x) {
    write_matrix_file(path, "UFLT", x.rows, x.dims, x.data.data());
}

Codebook read_codebook_file(const std::string& path) {
    RawMatrix m = read_matrix_file(path, "UFCB");
    if (m.rows < 1 || m.dims < 1) {
        throw ValidationError("BadFormat", path + ": empty codebook");
    }
    Codebook cb;
    cb.k = m.rows;
    cb.dims = m.dims;
    cb.centroids.assign(m.data.begin(), m.data.end());
    return cb;
}

void write_codebook_file(const std::string& path, const Codebook& cb) {
    std::vector<float> narrowed(cb.centroids.size());
    for (std::size_t i = 0; i < cb.centroids.size(); ++i) {
        narrowed[i] = static_cast<float>(cb.centroids[i]);
    }
    write_matrix_file(path, "UFCB", cb.k, cb.dims, narrowed.data());
}

DurationTable read_duration_table(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("BadFormat", path + ": " + e.what());
    }
    DurationTable table;
    try {
        table.fallback = doc.at("fallback").get<double>();
        for (const auto& [key, value] : doc.at("mean_duration").items()) {
            table.mean_duration[std::stoll(key)] = value.get<double>();
        }
    } catch (const std::exception& e) {
        throw ValidationError("BadFormat", path + ": " + e.what());
    }
    if (table.fallback < 1.0) {
        throw ValidationError("BadFormat",
                              path + ": fallback below 1 frame");
    }
    for (const auto& [unit, mean] : table.mean_duration) {
        if (!(mean >= 1.0)) {
            throw ValidationError("BadFormat",
                                  path + ": mean below 1 frame for unit " +
                                      std::to_string(unit));
        }
    }
    return table;
}

std::string format_duration_table(const DurationTable& table) {
    // ordered_json keeps insertion order; plain json would re-sort the unit
    // keys lexicographically ("11" before "3").
    nlohmann::ordered_json means(nlohmann::ordered_json::value_t::object);
    std::vector<UnitId> ids;
    ids.reserve(table.mean_duration.size());
    for (const auto& [unit, mean] : table.mean_duration) ids.push_back(unit);
    std::sort(ids.begin(), ids.end());
    for (const UnitId id : ids) {
        means[std::to_string(id)] = table.mean_duration.at(id);
    }
    nlohmann::ordered_json doc;
    doc["fallback"] = table.fallback;
    doc["mean_duration"] = std::move(means);
    return doc.dump(2) + "\n";
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open " + tmp + " for writing");
        }
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failure on " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move " + tmp + " to " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure on " + path);
    }
    return content;
}

}  // namespace unitkit

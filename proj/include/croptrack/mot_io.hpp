// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/metrics.hpp>
#include <croptrack/synth.hpp>
#include <croptrack/tracker.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace croptrack {

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of a MOT-Challenge file.
struct MotRecord {
    int frame = 0;
    int id = -1;
    Box box;
    double score = 1.0;
};

/// Records grouped by frame: frames[f - 1] keeps file order within frame f.
struct MotTable {
    std::vector<std::vector<MotRecord>> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& f : frames) n += f.size();
        return n;
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(trim(field));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline double to_double(const std::string& s, const std::string& where) {
    if (s.empty()) throw parse_error(where + ": empty numeric field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw parse_error(where + ": '" + s + "' is not a number");
    }
    return v;
}

inline int to_int(const std::string& s, const std::string& where) {
    const double v = to_double(s, where);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw parse_error(where + ": '" + s + "' is not an integer");
    return static_cast<int>(v);
}

inline std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace detail

/**
 * Parses MOT-Challenge CSV: frame,id,x,y,w,h[,score,...]. Blank lines and
 * lines starting with '#' are skipped. Frames are 1-based; records are
 * grouped by frame (stable, so out-of-order files are tolerated).
 */
inline MotTable parse_mot(std::istream& in, const std::string& name = "<stream>") {
    std::vector<MotRecord> records;
    std::string line;
    int line_no = 0;
    int max_frame = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const auto fields = detail::split(t, ',');
        if (fields.size() < 6) throw parse_error(where + ": expected at least 6 comma-separated fields");
        MotRecord r;
        r.frame = detail::to_int(fields[0], where);
        r.id = detail::to_int(fields[1], where);
        r.box = {detail::to_double(fields[2], where), detail::to_double(fields[3], where),
                 detail::to_double(fields[4], where), detail::to_double(fields[5], where)};
        if (fields.size() >= 7) r.score = detail::to_double(fields[6], where);
        if (r.frame < 1) throw parse_error(where + ": frame index must be >= 1");
        if (!(r.box.w > 0.0 && r.box.h > 0.0)) throw parse_error(where + ": box width and height must be positive");
        max_frame = std::max(max_frame, r.frame);
        records.push_back(r);
    }
    MotTable table;
    table.frames.resize(static_cast<std::size_t>(max_frame));
    for (const auto& r : records) table.frames[static_cast<std::size_t>(r.frame - 1)].push_back(r);
    return table;
}

inline MotTable load_mot(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return parse_mot(in, path.string());
}

/// Detection file: the id column is ignored; scores must lie in [0, 1].
inline MotTable load_detections(const std::filesystem::path& path) {
    MotTable t = load_mot(path);
    for (const auto& frame : t.frames) {
        for (const auto& r : frame) {
            if (!(r.score >= 0.0 && r.score <= 1.0)) {
                throw parse_error(path.string() + ": frame " + std::to_string(r.frame) + " has score " +
                                  std::to_string(r.score) + " outside [0, 1]");
            }
        }
    }
    return t;
}

inline GtSequence to_gt_sequence(const MotTable& t, std::size_t frame_count) {
    GtSequence out(std::max(frame_count, t.frames.size()));
    for (std::size_t f = 0; f < t.frames.size(); ++f) {
        for (const auto& r : t.frames[f]) out[f].push_back({r.id, r.box});
    }
    return out;
}

inline void write_mot_line(std::ostream& os, int frame, int id, const Box& b, double score) {
    os << frame << ',' << id << ',' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << ',' << score
       << ",-1,-1,-1\n";
}

/// frame,id,x,y,w,h,score,-1,-1,-1 with six decimals, ordered by frame then id.
inline void write_results(std::ostream& os, const std::vector<FrameResult>& results) {
    std::vector<const FrameResult*> order;
    for (const auto& r : results) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->frame < b->frame; });
    os << std::fixed << std::setprecision(6);
    for (const auto* r : order) {
        auto entries = r->entries;
        std::stable_sort(entries.begin(), entries.end(), [](auto& a, auto& b) { return a.track_id < b.track_id; });
        for (const auto& e : entries) write_mot_line(os, r->frame, e.track_id, e.box, e.score);
    }
}

inline void write_results(const std::filesystem::path& path, const std::vector<FrameResult>& results) {
    auto out = detail::open_out(path);
    write_results(out, results);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void write_detections(std::ostream& os, const std::vector<std::vector<Detection>>& frames) {
    os << std::fixed << std::setprecision(6);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (const auto& d : frames[f]) write_mot_line(os, static_cast<int>(f + 1), -1, d.box, d.score);
    }
}

inline void write_gt(std::ostream& os, const GtSequence& gt) {
    os << std::fixed << std::setprecision(6);
    for (std::size_t f = 0; f < gt.size(); ++f) {
        auto objects = gt[f];
        std::stable_sort(objects.begin(), objects.end(), [](auto& a, auto& b) { return a.id < b.id; });
        for (const auto& o : objects) write_mot_line(os, static_cast<int>(f + 1), o.id, o.box, 1.0);
    }
}

// ---------------------------------------------------------------------------
// Embedding container.
//
// Little-endian: "CTEB", u32 dim, then per detection u32 frame, u32 index
// within frame, dim x f32. Records follow detection-file order.

inline constexpr std::array<char, 4> kEmbeddingMagic{'C', 'T', 'E', 'B'};

struct EmbeddingRecord {
    std::uint32_t frame = 0;
    std::uint32_t index = 0;
    std::vector<float> values;
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    const std::array<unsigned char, 4> b{static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                         static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 4)) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

inline void put_f32(std::ostream& os, float f) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(os, bits);
}

inline bool get_f32(std::istream& is, float& f) {
    std::uint32_t bits = 0;
    if (!get_u32(is, bits)) return false;
    std::memcpy(&f, &bits, sizeof f);
    return true;
}

}  // namespace detail

inline void write_embeddings(std::ostream& os, std::uint32_t dim, const std::vector<EmbeddingRecord>& records) {
    os.write(kEmbeddingMagic.data(), 4);
    detail::put_u32(os, dim);
    for (const auto& r : records) {
        if (r.values.size() != dim) throw std::invalid_argument("write_embeddings: record dimension mismatch");
        detail::put_u32(os, r.frame);
        detail::put_u32(os, r.index);
        for (float v : r.values) detail::put_f32(os, v);
    }
}

/// Records for every detection of a bundle, in detection-file order.
inline std::vector<EmbeddingRecord> embedding_records(const std::vector<std::vector<Detection>>& frames) {
    std::vector<EmbeddingRecord> out;
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (std::size_t i = 0; i < frames[f].size(); ++i) {
            const auto& e = frames[f][i].embedding;
            EmbeddingRecord r{static_cast<std::uint32_t>(f + 1), static_cast<std::uint32_t>(i), {}};
            for (double v : e.values()) r.values.push_back(static_cast<float>(v));
            out.push_back(std::move(r));
        }
    }
    return out;
}

inline std::vector<EmbeddingRecord> read_embeddings(std::istream& is, std::uint32_t& dim,
                                                    const std::string& name = "<stream>") {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || magic != kEmbeddingMagic) {
        throw parse_error(name + ": bad magic (expected CTEB)");
    }
    if (!detail::get_u32(is, dim) || dim == 0) throw parse_error(name + ": missing or zero dimension");
    std::vector<EmbeddingRecord> out;
    while (true) {
        EmbeddingRecord r;
        if (!detail::get_u32(is, r.frame)) {
            if (is.gcount() == 0) break;
            throw parse_error(name + ": truncated record header");
        }
        if (!detail::get_u32(is, r.index)) throw parse_error(name + ": truncated record header");
        r.values.resize(dim);
        for (auto& v : r.values) {
            if (!detail::get_f32(is, v)) throw parse_error(name + ": truncated record " + std::to_string(out.size()));
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Plain-text fallback for hand-written fixtures: frame,index,v0,v1,...
inline std::vector<EmbeddingRecord> read_embeddings_csv(std::istream& is, std::uint32_t& dim,
                                                        const std::string& name = "<stream>") {
    std::vector<EmbeddingRecord> out;
    std::string line;
    int line_no = 0;
    dim = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const auto fields = detail::split(t, ',');
        if (fields.size() < 3) throw parse_error(where + ": expected frame,index,values...");
        EmbeddingRecord r;
        r.frame = static_cast<std::uint32_t>(detail::to_int(fields[0], where));
        r.index = static_cast<std::uint32_t>(detail::to_int(fields[1], where));
        for (std::size_t i = 2; i < fields.size(); ++i) r.values.push_back(static_cast<float>(detail::to_double(fields[i], where)));
        if (dim == 0) dim = static_cast<std::uint32_t>(r.values.size());
        if (r.values.size() != dim) throw parse_error(where + ": dimension differs from earlier lines");
        out.push_back(std::move(r));
    }
    return out;
}

/**
 * Attaches embeddings to detections. Every detection needs exactly one record
 * (matched by frame and within-frame index); anything else is an error.
 */
inline std::vector<std::vector<Detection>> align_embeddings(const MotTable& dets,
                                                            const std::vector<EmbeddingRecord>& records) {
    const std::size_t n = dets.record_count();
    if (records.size() != n) {
        throw parse_error("embedding count " + std::to_string(records.size()) + " does not match detection count " +
                          std::to_string(n));
    }
    std::vector<std::vector<Detection>> out(dets.frames.size());
    std::vector<std::vector<bool>> seen(dets.frames.size());
    for (std::size_t f = 0; f < dets.frames.size(); ++f) {
        for (const auto& r : dets.frames[f]) out[f].push_back({r.box, r.score, {}});
        seen[f].assign(dets.frames[f].size(), false);
    }
    for (const auto& rec : records) {
        if (rec.frame < 1 || rec.frame > out.size() || rec.index >= out[rec.frame - 1].size()) {
            throw parse_error("embedding record (frame " + std::to_string(rec.frame) + ", index " +
                              std::to_string(rec.index) + ") has no matching detection");
        }
        if (seen[rec.frame - 1][rec.index]) {
            throw parse_error("duplicate embedding for frame " + std::to_string(rec.frame) + ", index " +
                              std::to_string(rec.index));
        }
        seen[rec.frame - 1][rec.index] = true;
        std::vector<double> v(rec.values.begin(), rec.values.end());
        try {
            out[rec.frame - 1][rec.index].embedding = Embedding(std::move(v));
        } catch (const std::invalid_argument&) {
            throw parse_error("zero embedding for frame " + std::to_string(rec.frame) + ", index " +
                              std::to_string(rec.index));
        }
    }
    return out;
}

/// Loads a CTEB file (or the CSV fallback for *.csv / *.txt) aligned with a detection table.
inline std::vector<std::vector<Detection>> load_embeddings(const std::filesystem::path& path, const MotTable& dets) {
    std::uint32_t dim = 0;
    std::vector<EmbeddingRecord> records;
    const auto ext = path.extension().string();
    if (ext == ".csv" || ext == ".txt") {
        auto in = detail::open_in(path);
        records = read_embeddings_csv(in, dim, path.string());
    } else {
        auto in = detail::open_in(path, std::ios::binary);
        records = read_embeddings(in, dim, path.string());
    }
    return align_embeddings(dets, records);
}

/// Detections without appearance (for motion-only runs).
inline std::vector<std::vector<Detection>> detections_without_embeddings(const MotTable& dets) {
    std::vector<std::vector<Detection>> out(dets.frames.size());
    for (std::size_t f = 0; f < dets.frames.size(); ++f) {
        for (const auto& r : dets.frames[f]) out[f].push_back({r.box, r.score, {}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sequence info: "width=...\nheight=...\nframes=...\n"

struct SequenceInfo {
    double width = 0.0;
    double height = 0.0;
    int frames = 0;
};

inline void write_sequence_info(std::ostream& os, const SequenceInfo& info) {
    os << "width=" << info.width << "\nheight=" << info.height << "\nframes=" << info.frames << "\n";
}

inline SequenceInfo read_sequence_info(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    SequenceInfo info;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key == "width") info.width = detail::to_double(val, path.string());
        if (key == "height") info.height = detail::to_double(val, path.string());
        if (key == "frames") info.frames = detail::to_int(val, path.string());
    }
    return info;
}

}  // namespace croptrack

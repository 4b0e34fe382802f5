// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/mot_io.hpp>
#include <croptrack/tracker.hpp>

#include <filesystem>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace croptrack {

/**
 * Reads `key = value` lines ('#' starts a comment). Later keys win.
 */
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& name = "<config>") {
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw parse_error(name + ":" + std::to_string(line_no) + ": expected key = value");
        }
        out[detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    return out;
}

namespace detail {

inline bool to_bool(const std::string& s, const std::string& where) {
    if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "off" || s == "no") return false;
    throw parse_error(where + ": '" + s + "' is not a boolean");
}

}  // namespace detail

/// Overrides fields of `config` from key-value pairs; unknown keys are errors.
inline void apply_overrides(TrackerConfig& config, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        const std::string where = "config key '" + key + "'";
        if (key == "preset") {
            const auto flags = preset_config(value).flags;
            config.flags = flags;
        } else if (key == "tau") {
            config.tau = detail::to_double(value, where);
        } else if (key == "delta") {
            config.rerank.delta = detail::to_double(value, where);
        } else if (key == "lambda") {
            config.lambda_fusion = detail::to_double(value, where);
        } else if (key == "iou_candidate_gate") {
            config.iou_candidate_gate = detail::to_double(value, where);
        } else if (key == "iou_match_gate") {
            config.iou_match_gate = detail::to_double(value, where);
        } else if (key == "low_score_gate") {
            config.low_score_gate = detail::to_double(value, where);
        } else if (key == "appearance_gate") {
            config.appearance_gate = detail::to_double(value, where);
        } else if (key == "retention") {
            config.retention_frames = detail::to_int(value, where);
        } else if (key == "k1") {
            config.rerank.k1 = static_cast<std::size_t>(detail::to_int(value, where));
        } else if (key == "k2") {
            config.rerank.k2 = static_cast<std::size_t>(detail::to_int(value, where));
        } else if (key == "lambda_rr") {
            config.rerank.lambda_rr = detail::to_double(value, where);
        } else if (key == "alphas") {
            std::vector<double> alphas;
            for (const auto& a : detail::split(value, ',')) alphas.push_back(detail::to_double(a, where));
            config.prototype_alphas = alphas;
        } else if (key == "use_nsa") {
            config.flags.use_nsa = detail::to_bool(value, where);
        } else if (key == "use_reid") {
            config.flags.use_reid = detail::to_bool(value, where);
        } else if (key == "use_reranking") {
            config.flags.use_reranking = detail::to_bool(value, where);
        } else if (key == "use_greedy_one_to_many") {
            config.flags.use_greedy_one_to_many = detail::to_bool(value, where);
        } else {
            throw parse_error("unknown config key '" + key + "'");
        }
    }
    config.validate();
}

inline TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base = {}) {
    auto in = detail::open_in(path);
    apply_overrides(base, parse_key_values(in, path.string()));
    return base;
}

/// Writes the config in the same key-value format load_config() reads.
inline void print_config(std::ostream& os, const TrackerConfig& c) {
    std::ostringstream alphas;
    for (std::size_t i = 0; i < c.prototype_alphas.size(); ++i) {
        alphas << (i ? "," : "") << c.prototype_alphas[i];
    }
    os << "tau = " << c.tau << "\n"
       << "delta = " << c.rerank.delta << "\n"
       << "lambda = " << c.lambda_fusion << "\n"
       << "iou_candidate_gate = " << c.iou_candidate_gate << "\n"
       << "iou_match_gate = " << c.iou_match_gate << "\n"
       << "low_score_gate = " << c.low_score_gate << "\n"
       << "appearance_gate = " << c.appearance_gate << "\n"
       << "retention = " << c.retention_frames << "\n"
       << "k1 = " << c.rerank.k1 << "\n"
       << "k2 = " << c.rerank.k2 << "\n"
       << "lambda_rr = " << c.rerank.lambda_rr << "\n"
       << "alphas = " << alphas.str() << "\n"
       << "use_nsa = " << (c.flags.use_nsa ? "true" : "false") << "\n"
       << "use_reid = " << (c.flags.use_reid ? "true" : "false") << "\n"
       << "use_reranking = " << (c.flags.use_reranking ? "true" : "false") << "\n"
       << "use_greedy_one_to_many = " << (c.flags.use_greedy_one_to_many ? "true" : "false") << "\n";
}

}  // namespace croptrack

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#include <croptrack/croptrack.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace croptrack;

namespace {

struct FrameSize {
    double width = 0.0;
    double height = 0.0;
    std::string seqinfo;

    void add(CLI::App* app) {
        app->add_option("--width", width, "Frame width in px");
        app->add_option("--height", height, "Frame height in px");
        app->add_option("--seqinfo", seqinfo, "seqinfo file with width/height (written by synth)");
    }

    void resolve() {
        if (!seqinfo.empty()) {
            const auto info = read_sequence_info(seqinfo);
            if (width <= 0.0) width = info.width;
            if (height <= 0.0) height = info.height;
        }
        if (!(width > 0.0 && height > 0.0)) throw CLI::ValidationError("frame size: pass --width/--height or --seqinfo");
    }
};

void print_header(const std::string& command) { std::cout << "# croptrack " << command << " resolved config\n"; }

int cmd_track(const std::string& det, const std::string& emb, const std::string& config_path,
              const std::string& preset_name, const std::string& out) {
    TrackerConfig config = preset_config(preset_name);
    if (!config_path.empty()) config = load_config(config_path, config);
    print_header("track");
    std::cout << "detections = " << det << "\n"
              << "embeddings = " << (emb.empty() ? "none" : emb) << "\n"
              << "preset = " << preset_name << "\n"
              << "output = " << out << "\n";
    print_config(std::cout, config);

    const MotTable table = load_detections(det);
    std::vector<std::vector<Detection>> frames;
    if (!emb.empty()) {
        frames = load_embeddings(emb, table);
    } else if (config.flags.use_reid) {
        throw CLI::ValidationError("--emb is required when appearance is enabled (use_reid)");
    } else {
        frames = detections_without_embeddings(table);
    }
    const auto results = run(frames, config);
    write_results(fs::path(out), results);
    std::size_t lines = 0;
    for (const auto& r : results) lines += r.entries.size();
    std::cout << "wrote " << lines << " boxes over " << results.size() << " frames\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"croptrack: multi-object tracking with appearance reranking and confidence-adaptive filtering"};
    app.require_subcommand(1);

    // track
    std::string t_det, t_emb, t_config, t_out;
    std::string t_preset = "croptrack";
    auto* track = app.add_subcommand("track", "Track detections (+ embeddings) into a MOT results file");
    track->add_option("--det", t_det, "MOT detection file")->required();
    track->add_option("--emb", t_emb, "Embedding file (CTEB binary, or .csv fallback)");
    track->add_option("--config", t_config, "key = value config overriding the preset");
    track->add_option("--preset", t_preset, "Ablation preset")
        ->check(CLI::IsMember({"bytetrack", "+nsa", "+reid", "+rerank", "croptrack"}));
    track->add_option("--out", t_out, "Results file")->required();

    // perturb
    std::string p_gt, p_out, p_emb_out;
    std::string p_level = "D";
    std::optional<double> p_ln, p_fn, p_fp, p_floor;
    std::uint64_t p_seed = 0;
    double p_similarity = 0.5, p_jitter = 0.1;
    std::size_t p_dim = 128;
    FrameSize p_size;
    auto* perturb = app.add_subcommand("perturb", "Turn ground truth into noisy detections");
    perturb->add_option("--gt", p_gt, "MOT ground-truth file")->required();
    perturb->add_option("--level", p_level, "Noise level preset")->check(CLI::IsMember({"A", "B", "C", "D"}));
    perturb->add_option("--ln", p_ln, "Override: localization-noise probability");
    perturb->add_option("--fn", p_fn, "Override: miss rate");
    perturb->add_option("--fp", p_fp, "Override: spurious boxes per ground-truth box");
    perturb->add_option("--score-floor", p_floor, "Override: score of a perturbed box at zero overlap");
    perturb->add_option("--seed", p_seed, "Random seed");
    perturb->add_option("--out", p_out, "Detection file to write")->required();
    perturb->add_option("--emb-out", p_emb_out, "Also write CTEB embeddings for the detections");
    perturb->add_option("--similarity", p_similarity, "Mutual cosine similarity of identity embeddings");
    perturb->add_option("--dim", p_dim, "Embedding dimension");
    perturb->add_option("--jitter", p_jitter, "Per-observation embedding jitter");
    p_size.add(perturb);

    // synth
    std::string s_scenario = "benchmark", s_out;
    std::uint64_t s_seed = 0;
    std::optional<int> s_objects, s_frames;
    std::optional<double> s_similarity, s_shake;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence (gt, detections, embeddings)");
    synth->add_option("--scenario", s_scenario, "Scenario")
        ->check(CLI::IsMember({"benchmark", "crossing", "drift-occlusion"}));
    synth->add_option("--seed", s_seed, "Random seed");
    synth->add_option("--objects", s_objects, "Override object count");
    synth->add_option("--frames", s_frames, "Override frame count");
    synth->add_option("--similarity", s_similarity, "Override identity similarity");
    synth->add_option("--shake", s_shake, "Override camera shake");
    synth->add_option("--out", s_out, "Output directory")->required();

    // eval
    std::string e_gt, e_res, e_csv;
    double e_iou = 0.5;
    auto* eval = app.add_subcommand("eval", "Score a results file against ground truth");
    eval->add_option("--gt", e_gt, "MOT ground-truth file")->required();
    eval->add_option("--results", e_res, "MOT results file")->required();
    eval->add_option("--csv", e_csv, "Also write the report as CSV");
    eval->add_option("--iou", e_iou, "IoU threshold for a match")->check(CLI::Range(0.0, 1.0));

    // overlay
    std::string o_res, o_out;
    std::optional<int> o_frame;
    FrameSize o_size;
    auto* overlay = app.add_subcommand("overlay", "Render per-frame SVG box overlays");
    overlay->add_option("--results", o_res, "MOT results file")->required();
    overlay->add_option("--out", o_out, "Output directory")->required();
    overlay->add_option("--frame", o_frame, "Only this frame");
    o_size.add(overlay);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*track) return cmd_track(t_det, t_emb, t_config, t_preset, t_out);

        if (*perturb) {
            p_size.resolve();
            NoiseParams noise = preset(p_level);
            if (p_ln) noise.ln_probability = *p_ln;
            if (p_fn) noise.fn_rate = *p_fn;
            if (p_fp) noise.fp_rate = *p_fp;
            if (p_floor) noise.ln_score_floor = *p_floor;
            noise.seed = p_seed;
            noise.validate();
            print_header("perturb");
            std::cout << "gt = " << p_gt << "\nlevel = " << p_level << "\nseed = " << p_seed
                      << "\nln_probability = " << noise.ln_probability << "\nln_center_sigma = " << noise.ln_center_sigma
                      << "\nln_scale_sigma = " << noise.ln_scale_sigma << "\nln_score_floor = " << noise.ln_score_floor
                      << "\nfn_rate = " << noise.fn_rate << "\nfp_rate = " << noise.fp_rate
                      << "\nfp_size_sigma = " << noise.fp_size_sigma << "\nfp_score_min = " << noise.fp_score_min
                      << "\nwidth = " << p_size.width << "\nheight = " << p_size.height
                      << "\nembeddings = " << (p_emb_out.empty() ? "none" : p_emb_out) << "\nsimilarity = " << p_similarity
                      << "\ndim = " << p_dim << "\njitter = " << p_jitter << "\n";
            const MotTable table = load_mot(p_gt);
            const GtSequence gt = to_gt_sequence(table, table.frames.size());
            const IdentityEmbedder embedder(p_dim, p_similarity, p_jitter, p_seed);
            const SequenceBundle bundle = perturb_sequence(gt, noise, p_size.width, p_size.height, embedder);
            {
                auto os = detail::open_out(p_out);
                write_detections(os, bundle.detections);
            }
            if (!p_emb_out.empty()) {
                auto os = detail::open_out(p_emb_out, std::ios::binary);
                write_embeddings(os, static_cast<std::uint32_t>(p_dim), embedding_records(bundle.detections));
            }
            return 0;
        }

        if (*synth) {
            ScenarioSpec spec = named_scenario(s_scenario);
            if (s_objects) spec.objects = *s_objects;
            if (s_frames) spec.frames = *s_frames;
            if (s_similarity) spec.similarity = *s_similarity;
            if (s_shake) spec.camera_shake = *s_shake;
            print_header("synth");
            std::cout << "scenario = " << s_scenario << "\nseed = " << s_seed << "\nobjects = " << spec.objects
                      << "\nframes = " << spec.frames << "\nwidth = " << spec.width << "\nheight = " << spec.height
                      << "\nsimilarity = " << spec.similarity << "\nembedding_dim = " << spec.embedding_dim
                      << "\nembedding_jitter = " << spec.embedding_jitter << "\nrandom_occlusions = " << spec.random_occlusions
                      << "\ncamera_shake = " << spec.camera_shake << "\noutput = " << s_out << "\n";
            const SequenceBundle bundle = synth_sequence(spec, s_seed);
            fs::create_directories(s_out);
            const fs::path dir(s_out);
            {
                auto os = detail::open_out(dir / "gt.txt");
                write_gt(os, *bundle.gt);
            }
            {
                auto os = detail::open_out(dir / "det.txt");
                write_detections(os, bundle.detections);
            }
            {
                auto os = detail::open_out(dir / "emb.bin", std::ios::binary);
                write_embeddings(os, static_cast<std::uint32_t>(spec.embedding_dim), embedding_records(bundle.detections));
            }
            {
                auto os = detail::open_out(dir / "seqinfo.ini");
                write_sequence_info(os, {spec.width, spec.height, bundle.frame_count()});
            }
            return 0;
        }

        if (*eval) {
            print_header("eval");
            std::cout << "gt = " << e_gt << "\nresults = " << e_res << "\niou = " << e_iou
                      << "\ncsv = " << (e_csv.empty() ? "none" : e_csv) << "\n";
            const MotTable gt_table = load_mot(e_gt);
            const MotTable res_table = load_mot(e_res);
            const std::size_t frames = std::max(gt_table.frames.size(), res_table.frames.size());
            const auto report =
                evaluate(to_gt_sequence(gt_table, frames), to_gt_sequence(res_table, frames), e_iou);
            print_report(std::cout, report);
            if (!e_csv.empty()) {
                auto os = detail::open_out(e_csv);
                write_report_csv(os, report);
            }
            return 0;
        }

        if (*overlay) {
            o_size.resolve();
            print_header("overlay");
            std::cout << "results = " << o_res << "\nwidth = " << o_size.width << "\nheight = " << o_size.height
                      << "\nframe = " << (o_frame ? std::to_string(*o_frame) : std::string("all")) << "\noutput = " << o_out
                      << "\n";
            const MotTable table = load_mot(o_res);
            fs::create_directories(o_out);
            int written = 0;
            for (std::size_t f = 0; f < table.frames.size(); ++f) {
                const int frame = static_cast<int>(f + 1);
                if (o_frame && *o_frame != frame) continue;
                FrameResult fr{frame, {}};
                for (const auto& r : table.frames[f]) fr.entries.push_back({r.id, r.box, r.score});
                char name[32];
                std::snprintf(name, sizeof(name), "frame_%06d.svg", frame);
                auto os = detail::open_out(fs::path(o_out) / name);
                write_svg_overlay(os, fr, o_size.width, o_size.height);
                ++written;
            }
            std::cout << "wrote " << written << " overlays\n";
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

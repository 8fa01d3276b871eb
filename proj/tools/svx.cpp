#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "svx/analysis.hpp"
#include "svx/error.hpp"
#include "svx/motion.hpp"
#include "svx/pipeline.hpp"
#include "svx/recognition.hpp"
#include "svx/segmentation.hpp"
#include "svx/ssc.hpp"
#include "svx/study.hpp"
#include "svx/synthetic.hpp"
#include "svx/video_io.hpp"
#include "svx/visualization.hpp"

namespace fs = std::filesystem;
using namespace svx;

namespace {

std::pair<int, int> parse_size(const std::string& text) {
    static const std::regex pattern(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, pattern)) throw ParameterError("size must look like 320x240, got '" + text + "'");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

std::string level_file(int level) {
    char name[32];
    std::snprintf(name, sizeof(name), "level_%02d.svxl", level);
    return name;
}

StudyDataset dataset_or_canonical(const std::string& manifest) {
    return manifest.empty() ? StudyDataset::canonical() : StudyDataset::load(manifest);
}

void save_output(const VideoVolume& volume, const fs::path& out) {
    if (out.extension() == ".svxv") {
        save_volume(volume, out);
    } else {
        write_frames(volume, out);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming hierarchical supervoxels, SSC descriptors and perception-study tools"};
    app.require_subcommand(1);

    // segment
    SegmentationParams seg;
    std::string seg_input, seg_out, seg_resize;
    int seg_connectivity = 6;
    bool seg_batch = false;
    auto* segment = app.add_subcommand("segment", "Build a supervoxel hierarchy and write one label map per level");
    segment->add_option("--input", seg_input, "PPM frame directory or .svxv volume")->required();
    segment->add_option("--c", seg.c, "Threshold constant at level 1")->capture_default_str();
    segment->add_option("--c-reg", seg.c_reg, "Threshold constant above level 1")->capture_default_str();
    segment->add_option("--min", seg.min_size, "Minimum region size in voxels")->capture_default_str();
    segment->add_option("--sigma", seg.sigma, "Gaussian smoothing sigma")->capture_default_str();
    segment->add_option("--range", seg.stream_range, "Frames per streaming window")->capture_default_str();
    segment->add_option("--levels", seg.hie_num, "Hierarchy levels")->capture_default_str();
    segment->add_option("--connectivity", seg_connectivity, "6 or 26")->check(CLI::IsMember({6, 26}));
    segment->add_option("--resize", seg_resize, "Resize to fit WxH (aspect preserved) before segmenting");
    segment->add_flag("--batch", seg_batch, "Segment the whole volume at once instead of streaming");
    segment->add_option("--out", seg_out, "Output directory")->required();

    // render
    std::string render_labels, render_mode = "color", render_out;
    std::uint64_t render_seed = 0;
    auto* render = app.add_subcommand("render", "Render a label map as colors or boundaries");
    render->add_option("--labels", render_labels, "SVXL label map")->required();
    render->add_option("--mode", render_mode, "color or boundary")->check(CLI::IsMember({"color", "boundary"}));
    render->add_option("--seed", render_seed, "Color seed");
    render->add_option("--out", render_out, "PPM directory or .svxv file")->required();

    // flow
    HornSchunckParams hs;
    std::string flow_input, flow_out, flow_points;
    auto* flow = app.add_subcommand("flow", "Horn-Schunck flow and per-frame reference points");
    flow->add_option("--input", flow_input, "PPM frame directory or .svxv volume")->required();
    flow->add_option("--alpha", hs.alpha)->capture_default_str();
    flow->add_option("--iterations", hs.iterations)->capture_default_str();
    flow->add_option("--presmooth", hs.presmooth_sigma)->capture_default_str();
    flow->add_option("--out", flow_out, "SVXF flow file")->required();
    flow->add_option("--points", flow_points, "CSV of reference points");

    // ssc
    std::string ssc_labels, ssc_flow, ssc_out, ssc_text;
    LabeledDescriptor ssc_row;
    std::string ssc_actor = "human", ssc_action = "walking", ssc_background = "static";
    auto* ssc = app.add_subcommand("ssc", "Supervoxel shape context descriptor");
    ssc->add_option("--labels", ssc_labels, "SVXL label map")->required();
    ssc->add_option("--flow", ssc_flow, "SVXF flow file")->required();
    ssc->add_option("--out", ssc_out, "SVXD descriptor file");
    ssc->add_option("--text", ssc_text, "Append a labeled descriptor line to this file");
    ssc->add_option("--video-id", ssc_row.video_id, "Video id for --text")->default_val("video");
    ssc->add_option("--actor", ssc_actor);
    ssc->add_option("--action", ssc_action);
    ssc->add_option("--background", ssc_background);
    ssc->add_option("--level", ssc_row.level)->default_val("n/a");

    // synth
    int synth_clips = 10;
    std::uint64_t synth_seed = 2024;
    std::string synth_out;
    bool synth_describe = false;
    auto* synth = app.add_subcommand("synth", "Generate the synthetic shape/motion corpus");
    synth->add_option("--clips", synth_clips, "Clips per (shape, motion) class")->capture_default_str();
    synth->add_option("--seed", synth_seed)->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_flag("--describe", synth_describe, "Also write descriptors_<level>.txt for fine/medium/coarse");

    // classify
    std::string cls_task = "actor", cls_features, cls_kind = "nc", cls_distance = "euclidean", cls_report;
    int cls_k = 1;
    auto* classify = app.add_subcommand("classify", "Leave-one-out recognition over a descriptor file");
    classify->add_option("--task", cls_task)->check(CLI::IsMember({"actor", "action"}));
    classify->add_option("--features", cls_features, "Descriptor text file")->required();
    classify->add_option("--classifier", cls_kind)->check(CLI::IsMember({"nc", "knn"}));
    classify->add_option("--k", cls_k, "Neighbours for knn")->capture_default_str();
    classify->add_option("--distance", cls_distance)->check(CLI::IsMember({"euclidean", "chi2"}));
    classify->add_option("--report", cls_report, "JSON report path");

    // analyze
    std::string an_log, an_truth, an_out, an_correct = "both", an_judged = "action", an_stratum, an_value;
    auto* analyze = app.add_subcommand("analyze", "Confusion tables, strata and response-time densities");
    analyze->add_option("--log", an_log, "Record log (ndjson)")->required();
    analyze->add_option("--truth", an_truth, "Dataset manifest; the canonical dataset when omitted");
    analyze->add_option("--out", an_out, "Output directory")->required();
    analyze->add_option("--correctness", an_correct, "Extra density selection")
        ->check(CLI::IsMember({"correct", "incorrect", "both"}));
    analyze->add_option("--judged-on", an_judged)->check(CLI::IsMember({"actor", "action"}));
    analyze->add_option("--stratum", an_stratum)->check(CLI::IsMember({"level", "actor", "background", "action"}));
    analyze->add_option("--value", an_value, "Stratum value for --stratum");

    // serve
    std::string srv_dataset, srv_host = "127.0.0.1", srv_log;
    int srv_port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the perception-study HTTP service");
    serve->add_option("--dataset", srv_dataset, "Dataset manifest; the canonical dataset when omitted");
    serve->add_option("--host", srv_host)->capture_default_str();
    serve->add_option("--port", srv_port)->capture_default_str();
    serve->add_option("--log-dir", srv_log, "Directory for the append-only logs (replayed on start)");

    // splits / dataset
    std::string splits_dataset;
    auto* splits = app.add_subcommand("splits", "Print the alpha/beta/gamma level rotation");
    splits->add_option("--dataset", splits_dataset, "Dataset manifest; the canonical dataset when omitted");
    std::string ds_out;
    auto* dataset_cmd = app.add_subcommand("dataset", "Write the canonical 32-video dataset manifest");
    dataset_cmd->add_option("--out", ds_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*segment) {
            seg.connectivity = seg_connectivity == 26 ? Connectivity::twenty_six : Connectivity::six;
            seg.validate();
            VideoVolume volume = load_volume(seg_input);
            if (!seg_resize.empty()) {
                const auto [w, h] = parse_size(seg_resize);
                volume = resize_bilinear(volume, w, h, true);
            }
            Hierarchy hierarchy;
            if (seg_batch) {
                hierarchy = build_hierarchy(volume, seg);
            } else {
                VolumeFrameStream stream(volume);
                hierarchy = stream_segment(stream, seg);
            }
            fs::create_directories(seg_out);
            for (int level = 1; level <= hierarchy.level_count(); ++level) {
                write_labels(fs::path(seg_out) / level_file(level), hierarchy.labeling(level));
                std::cout << "level " << level << ": " << hierarchy.region_count(level) << " supervoxels\n";
            }
        } else if (*render) {
            const SupervoxelLabeling labeling = read_labels(render_labels);
            save_output(render_mode == "color" ? colorize(labeling, render_seed) : render_boundaries(labeling),
                        render_out);
        } else if (*flow) {
            const VideoVolume volume = load_volume(flow_input);
            const FlowField field = compute_flow(volume, hs);
            write_flow(flow_out, field);
            if (!flow_points.empty()) {
                std::ofstream out(flow_points);
                out << "frame,x,y\n";
                for (const auto& p : reference_points(field, volume.frame_count())) {
                    out << p.frame_index << ',' << p.x << ',' << p.y << '\n';
                }
            }
        } else if (*ssc) {
            const SscVideoDescriptor d = ssc_descriptor(read_labels(ssc_labels), read_flow(ssc_flow));
            if (!ssc_out.empty()) write_descriptor(ssc_out, d);
            if (!ssc_text.empty()) {
                ssc_row.actor = parse_actor(ssc_actor);
                ssc_row.action = parse_action(ssc_action);
                ssc_row.background = parse_background(ssc_background);
                ssc_row.vector.assign(d.aggregate.begin(), d.aggregate.end());
                append_descriptor_text(ssc_text, ssc_row);
            }
            if (ssc_out.empty() && ssc_text.empty()) {
                for (double v : d.aggregate) std::cout << v << ' ';
                std::cout << '\n';
            }
        } else if (*synth) {
            fs::create_directories(synth_out);
            std::map<LevelPreset, std::vector<LabeledDescriptor>> rows;
            for (const auto& entry : synth::corpus(synth_clips, synth_seed)) {
                const VideoVolume volume = synth::render_clip(entry.spec);
                save_volume(volume, fs::path(synth_out) / (entry.id + ".svxv"));
                if (!synth_describe) continue;
                const auto levels = describe_levels(volume, {}, {}, kStudyLevels);
                for (const auto& [level, bins] : levels) {
                    LabeledDescriptor row{entry.id, synth::actor_for(entry.spec.shape),
                                          synth::action_for(entry.spec.motion), Background::static_scene,
                                          std::string(to_string(level)), {bins.begin(), bins.end()}};
                    rows[level].push_back(std::move(row));
                }
            }
            for (const auto& [level, data] : rows) {
                std::ofstream out(fs::path(synth_out) / ("descriptors_" + std::string(to_string(level)) + ".txt"));
                write_descriptor_text(out, data);
            }
        } else if (*classify) {
            const auto data = read_descriptor_text(fs::path(cls_features));
            ClassifierConfig config{parse_classifier(cls_kind), cls_k, parse_distance(cls_distance)};
            const LooReport report = loo_evaluate(data, parse_task(cls_task), config);
            const std::string json = report_json(report);
            if (!cls_report.empty()) {
                std::ofstream out(cls_report);
                out << json << '\n';
            }
            std::cout << cls_task << " accuracy " << report.accuracy << " over " << data.size() << " videos ("
                      << to_string(config.kind) << ", " << to_string(config.distance) << ")\n";
        } else if (*analyze) {
            const StudyDataset dataset = dataset_or_canonical(an_truth);
            const auto records = read_record_log(an_log);
            write_analysis(records, dataset, an_out);
            if (an_correct != "both" || !an_stratum.empty()) {
                DensityFilter filter;
                filter.correctness = an_correct == "correct"     ? Correctness::correct
                                     : an_correct == "incorrect" ? Correctness::incorrect
                                                                 : Correctness::both;
                filter.judged_on = an_judged == "actor" ? Dimension::actor : Dimension::action;
                if (!an_stratum.empty()) {
                    filter.stratum = parse_stratum(an_stratum);
                    filter.stratum_value = an_value;
                }
                double max_seconds = 0.0;
                for (const auto& v : dataset.videos) {
                    max_seconds = std::max(max_seconds, StudyDataset::half_rate_duration_ms(v) / 1000.0);
                }
                const auto est = response_time_density(match_records(records, dataset), filter, max_seconds);
                std::ofstream(fs::path(an_out) / "density" / "selection.csv") << density_csv(est);
                render_density_plot(est, fs::path(an_out) / "density" / "selection.ppm");
            }
            const auto agg = aggregate_rates(match_records(records, dataset));
            std::cout << agg.n << " records; actor match " << agg.actor_rate << ", action match " << agg.action_rate
                      << '\n';
        } else if (*serve) {
            StudyServiceOptions options;
            options.log_dir = srv_log;
            StudyDataset dataset = dataset_or_canonical(srv_dataset);
            std::unique_ptr<StudyService> service = srv_log.empty()
                                                        ? std::make_unique<StudyService>(std::move(dataset), options)
                                                        : StudyService::replay(std::move(dataset), options);
            StudyServer server(*service);
            std::cout << "serving on " << srv_host << ':' << srv_port << std::endl;
            server.listen(srv_host, srv_port);
        } else if (*splits) {
            const StudyDataset dataset = dataset_or_canonical(splits_dataset);
            const auto assignments = build_splits(dataset);
            std::printf("%-28s %-8s %-8s %-8s\n", "video", "alpha", "beta", "gamma");
            for (std::size_t i = 0; i < dataset.videos.size(); ++i) {
                std::printf("%-28s %-8s %-8s %-8s\n", dataset.videos[i].id.c_str(),
                            std::string(to_string(assignments[0].levels[i])).c_str(),
                            std::string(to_string(assignments[1].levels[i])).c_str(),
                            std::string(to_string(assignments[2].levels[i])).c_str());
            }
        } else if (*dataset_cmd) {
            StudyDataset::canonical().save(ds_out);
        }
    } catch (const svx::Error& e) {
        std::cerr << "svx: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "svx: unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

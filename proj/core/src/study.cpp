#include "svx/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "svx/error.hpp"

namespace svx {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---- dataset -------------------------------------------------------------

std::string segmentation_video_id(const std::string& base_id, LevelPreset level) {
    return base_id + "/" + std::string(to_string(level));
}

StudyDataset StudyDataset::canonical(double fps, int frame_count) {
    StudyDataset dataset;
    for (Actor actor : kActors) {
        for (Action action : kActions) {
            for (Background background : kBackgrounds) {
                BaseVideo video;
                video.id = std::string(to_string(actor)) + "-" + std::string(to_string(action)) + "-" +
                           std::string(to_string(background));
                video.actor = actor;
                video.action = action;
                video.background = background;
                video.fps = fps;
                video.frame_count = frame_count;
                dataset.videos.push_back(std::move(video));
            }
        }
    }
    return dataset;
}

StudyDataset StudyDataset::load(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IngestError("cannot open dataset manifest " + manifest.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IngestError("dataset manifest " + manifest.string() + ": " + e.what());
    }
    StudyDataset dataset;
    const fs::path root = manifest.parent_path();
    try {
        for (const auto& v : j.at("videos")) {
            BaseVideo video;
            video.id = v.at("id").get<std::string>();
            video.actor = parse_actor(v.at("actor").get<std::string>());
            video.action = parse_action(v.at("action").get<std::string>());
            video.background = parse_background(v.at("background").get<std::string>());
            video.fps = v.value("fps", 30.0);
            video.frame_count = v.at("frame_count").get<int>();
            if (v.contains("levels")) {
                for (const auto& [name, path] : v.at("levels").items()) {
                    fs::path p = path.get<std::string>();
                    video.level_frames[parse_level_preset(name)] = p.is_absolute() ? p : root / p;
                }
            }
            dataset.videos.push_back(std::move(video));
        }
    } catch (const json::exception& e) {
        throw IngestError("dataset manifest " + manifest.string() + ": " + e.what());
    }
    dataset.validate();
    return dataset;
}

void StudyDataset::save(const fs::path& manifest) const {
    ordered_json j;
    j["videos"] = ordered_json::array();
    for (const auto& video : videos) {
        ordered_json v;
        v["id"] = video.id;
        v["actor"] = to_string(video.actor);
        v["action"] = to_string(video.action);
        v["background"] = to_string(video.background);
        v["fps"] = video.fps;
        v["frame_count"] = video.frame_count;
        if (!video.level_frames.empty()) {
            ordered_json levels;
            for (const auto& [level, path] : video.level_frames) levels[std::string(to_string(level))] = path.string();
            v["levels"] = levels;
        }
        j["videos"].push_back(v);
    }
    std::ofstream out(manifest);
    if (!out) throw IngestError("cannot write " + manifest.string());
    out << j.dump(2) << '\n';
}

void StudyDataset::validate() const {
    std::set<std::string> ids;
    for (const auto& video : videos) {
        if (video.id.empty() || video.id.find('/') != std::string::npos) {
            throw ValidationError("invalid base video id '" + video.id + "'");
        }
        if (!ids.insert(video.id).second) throw ValidationError("duplicate base video id '" + video.id + "'");
        if (video.frame_count <= 0 || !(video.fps > 0.0)) {
            throw ValidationError("video '" + video.id + "' needs a positive frame count and frame rate");
        }
        if (video.level_frames.empty()) continue;
        for (LevelPreset level : kStudyLevels) {
            if (!video.level_frames.contains(level)) {
                throw ValidationError("video '" + video.id + "' is missing level " + std::string(to_string(level)));
            }
        }
    }
}

const BaseVideo* StudyDataset::find(const std::string& base_id) const {
    for (const auto& video : videos) {
        if (video.id == base_id) return &video;
    }
    return nullptr;
}

double StudyDataset::half_rate_frame_ms(const BaseVideo& video) {
    return 2000.0 / video.fps;
}

std::int64_t StudyDataset::half_rate_duration_ms(const BaseVideo& video) {
    return std::llround(video.frame_count * half_rate_frame_ms(video));
}

std::optional<VideoTruth> lookup_truth(const StudyDataset& dataset, const std::string& video_id) {
    const auto slash = video_id.rfind('/');
    if (slash == std::string::npos) return std::nullopt;
    const BaseVideo* video = dataset.find(video_id.substr(0, slash));
    if (!video) return std::nullopt;
    VideoTruth truth;
    try {
        truth.level = parse_level_preset(video_id.substr(slash + 1));
    } catch (const ParameterError&) {
        return std::nullopt;
    }
    truth.base_id = video->id;
    truth.actor = video->actor;
    truth.action = video->action;
    truth.background = video->background;
    truth.duration_ms = StudyDataset::half_rate_duration_ms(*video);
    return truth;
}

// ---- splits --------------------------------------------------------------

std::string_view to_string(Split split) {
    switch (split) {
        case Split::alpha: return "alpha";
        case Split::beta: return "beta";
        case Split::gamma: return "gamma";
    }
    return "alpha";
}

Split parse_split(std::string_view name) {
    for (Split split : kSplits) {
        if (to_string(split) == name) return split;
    }
    throw ParameterError("unknown split '" + std::string(name) + "'");
}

std::vector<std::string> SplitAssignment::video_ids(const StudyDataset& dataset) const {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < levels.size(); ++i) ids.push_back(segmentation_video_id(dataset.videos[i].id, levels[i]));
    return ids;
}

std::array<SplitAssignment, 3> build_splits(const StudyDataset& dataset) {
    dataset.validate();
    static constexpr std::array<LevelPreset, 3> rotation = {LevelPreset::coarse, LevelPreset::medium,
                                                           LevelPreset::fine};
    std::array<SplitAssignment, 3> out;
    for (std::size_t s = 0; s < kSplits.size(); ++s) {
        out[s].split = kSplits[s];
        for (std::size_t i = 0; i < dataset.videos.size(); ++i) out[s].levels.push_back(rotation[(s + i) % 3]);
    }
    return out;
}

std::vector<std::string> shuffled_playlist(const StudyDataset& dataset, Split split, std::uint64_t seed) {
    std::vector<std::string> ids = build_splits(dataset)[static_cast<std::size_t>(split)].video_ids(dataset);
    std::mt19937_64 engine(seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(engine() % i);
        std::swap(ids[i - 1], ids[j]);
    }
    return ids;
}

// ---- records -------------------------------------------------------------

namespace {

ordered_json perception_json(const PerceptionRecord& r) {
    ordered_json j;
    j["participant_id"] = r.participant_id;
    j["video_id"] = r.video_id;
    j["level"] = to_string(r.level);
    j["actor"] = r.actor_choice ? std::string(to_string(*r.actor_choice)) : "unknown";
    j["action"] = r.action_choice ? std::string(to_string(*r.action_choice)) : "unknown";
    j["response_time_ms"] = r.response_time_ms;
    j["watched_full"] = r.watched_full;
    return j;
}

PerceptionRecord perception_from(const json& j) {
    PerceptionRecord r;
    r.participant_id = j.at("participant_id").get<std::string>();
    r.video_id = j.at("video_id").get<std::string>();
    r.level = parse_level_preset(j.at("level").get<std::string>());
    const std::string actor = j.at("actor").get<std::string>();
    const std::string action = j.at("action").get<std::string>();
    if (actor != "unknown") r.actor_choice = parse_actor(actor);
    if (action != "unknown") r.action_choice = parse_action(action);
    r.response_time_ms = j.at("response_time_ms").get<std::int64_t>();
    r.watched_full = j.at("watched_full").get<bool>();
    return r;
}

template <typename F>
auto parse_guard(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(what + ": " + e.what());
    } catch (const ParameterError& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

}  // namespace

PerceptionRecord perception_from_json(const std::string& body) {
    return parse_guard("malformed perception record", [&] { return perception_from(json::parse(body)); });
}

std::string perception_to_json(const PerceptionRecord& record) {
    return perception_json(record).dump();
}

std::string to_json_line(const StoredRecord& stored) {
    ordered_json j;
    j["record_id"] = stored.record_id;
    j["server_time_ms"] = stored.server_time_ms;
    const ordered_json fields = perception_json(stored.record);
    for (const auto& [key, value] : fields.items()) j[key] = value;
    return j.dump();
}

StoredRecord parse_record_line(const std::string& line) {
    return parse_guard("malformed record line", [&] {
        const json j = json::parse(line);
        StoredRecord stored;
        stored.record_id = j.at("record_id").get<std::uint64_t>();
        stored.server_time_ms = j.at("server_time_ms").get<std::int64_t>();
        stored.record = perception_from(j);
        return stored;
    });
}

std::vector<StoredRecord> read_record_log(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open record log " + path.string());
    std::vector<StoredRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(parse_record_line(line));
    }
    return out;
}

std::string to_json(const VideoManifest& manifest) {
    ordered_json j;
    j["video_id"] = manifest.video_id;
    j["level"] = to_string(manifest.level);
    j["ready_token"] = manifest.ready_token;
    j["position"] = manifest.position;
    j["playlist_size"] = manifest.playlist_size;
    j["total_duration_ms"] = manifest.total_duration_ms;
    j["frames"] = ordered_json::array();
    for (const auto& f : manifest.frames) j["frames"].push_back({{"url", f.url}, {"duration_ms", f.duration_ms}});
    return j.dump();
}

// ---- service -------------------------------------------------------------

StudyService::StudyService(StudyDataset dataset, StudyServiceOptions options)
    : dataset_(std::move(dataset)), options_(std::move(options)) {
    dataset_.validate();
    if (!options_.clock) {
        options_.clock = [] {
            return std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                .count();
        };
    }
    if (!options_.log_dir.empty()) fs::create_directories(options_.log_dir);
}

std::vector<std::string> StudyService::start_session(const std::string& participant_id, Split split,
                                                     std::uint64_t seed) {
    std::lock_guard lock(mutex_);
    return start_session_locked(participant_id, split, seed, true);
}

std::vector<std::string> StudyService::start_session_locked(const std::string& participant_id, Split split,
                                                            std::uint64_t seed, bool log) {
    if (participant_id.empty()) throw ValidationError("participant id must not be empty");
    if (sessions_.contains(participant_id)) {
        throw ConflictError("participant '" + participant_id + "' already has an active session");
    }
    Session session;
    session.split = split;
    session.seed = seed;
    session.playlist = shuffled_playlist(dataset_, split, seed);
    if (log) {
        ordered_json j;
        j["participant_id"] = participant_id;
        j["split"] = to_string(split);
        j["seed"] = seed;
        append_line("sessions.ndjson", j.dump());
    }
    auto playlist = session.playlist;
    sessions_.emplace(participant_id, std::move(session));
    return playlist;
}

std::string StudyService::ready_token(const std::string& participant_id, const std::string& video_id) const {
    // FNV-1a over participant, video and session seed.
    const Session& session = sessions_.at(participant_id);
    std::uint64_t hash = 14695981039346656037ull;
    auto mix = [&](std::string_view bytes) {
        for (unsigned char ch : bytes) {
            hash ^= ch;
            hash *= 1099511628211ull;
        }
        hash ^= 0xff;
        hash *= 1099511628211ull;
    };
    mix(participant_id);
    mix(video_id);
    mix(std::to_string(session.seed));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::optional<VideoManifest> StudyService::next_video(const std::string& participant_id) {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(participant_id);
    if (it == sessions_.end()) throw NotFoundError("no session for participant '" + participant_id + "'");
    const Session& session = it->second;
    for (std::size_t i = 0; i < session.playlist.size(); ++i) {
        const std::string& id = session.playlist[i];
        if (session.answered.contains(id)) continue;
        const VideoTruth truth = *lookup_truth(dataset_, id);
        const BaseVideo& video = *dataset_.find(truth.base_id);
        VideoManifest manifest;
        manifest.video_id = id;
        manifest.level = truth.level;
        manifest.ready_token = ready_token(participant_id, id);
        manifest.position = static_cast<int>(i);
        manifest.playlist_size = static_cast<int>(session.playlist.size());
        manifest.total_duration_ms = StudyDataset::half_rate_duration_ms(video);
        const double frame_ms = StudyDataset::half_rate_frame_ms(video);
        for (int f = 0; f < video.frame_count; ++f) {
            manifest.frames.push_back({"/frames/" + id + "/" + std::to_string(f), frame_ms});
        }
        return manifest;
    }
    return std::nullopt;
}

std::uint64_t StudyService::record_perception(const PerceptionRecord& record,
                                              const std::optional<std::string>& token) {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(record.participant_id);
    if (it == sessions_.end()) throw NotFoundError("no session for participant '" + record.participant_id + "'");
    const Session& session = it->second;
    const auto truth = lookup_truth(dataset_, record.video_id);
    if (!truth) throw NotFoundError("unknown video '" + record.video_id + "'");
    if (std::find(session.playlist.begin(), session.playlist.end(), record.video_id) == session.playlist.end()) {
        throw ValidationError("video '" + record.video_id + "' is not in this participant's playlist");
    }
    if (session.answered.contains(record.video_id)) {
        throw ConflictError("video '" + record.video_id + "' already answered");
    }
    if (record.level != truth->level) throw ValidationError("level does not match video '" + record.video_id + "'");
    if (record.actor_choice.has_value() != record.action_choice.has_value()) {
        throw ValidationError("unknown is a joint choice: actor and action must both be known or both unknown");
    }
    if (record.response_time_ms <= 0) throw ValidationError("response time must be positive");
    if (record.watched_full && record.response_time_ms != truth->duration_ms) {
        throw ValidationError("full-watch response time " + std::to_string(record.response_time_ms) +
                              " ms differs from video duration " + std::to_string(truth->duration_ms) + " ms");
    }
    if (token && *token != ready_token(record.participant_id, record.video_id)) {
        throw ValidationError("ready token does not match video '" + record.video_id + "'");
    }
    StoredRecord stored;
    stored.record_id = records_.size() + 1;
    stored.server_time_ms = options_.clock();
    stored.record = record;
    const std::string line = to_json_line(stored);
    append_line("records.ndjson", line);
    apply_record_locked(stored, line);
    if (options_.snapshot_interval > 0 && records_.size() % options_.snapshot_interval == 0) {
        write_snapshot_locked();
    }
    return stored.record_id;
}

void StudyService::apply_record_locked(const StoredRecord& stored, const std::string& line) {
    sessions_.at(stored.record.participant_id).answered.insert(stored.record.video_id);
    records_.push_back(stored);
    lines_.push_back(line);
}

std::vector<StoredRecord> StudyService::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::string StudyService::record_line(std::uint64_t record_id) const {
    std::lock_guard lock(mutex_);
    if (record_id == 0 || record_id > lines_.size()) {
        throw RangeError("no record with id " + std::to_string(record_id));
    }
    return lines_[record_id - 1];
}

std::string StudyService::export_log() const {
    std::lock_guard lock(mutex_);
    std::string out;
    for (const auto& line : lines_) out += line + "\n";
    return out;
}

std::size_t StudyService::session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::string StudyService::state_json() const {
    std::lock_guard lock(mutex_);
    return state_json_locked();
}

std::string StudyService::state_json_locked() const {
    ordered_json j;
    j["sessions"] = ordered_json::object();
    for (const auto& [id, session] : sessions_) {
        ordered_json s;
        s["split"] = to_string(session.split);
        s["seed"] = session.seed;
        s["playlist"] = session.playlist;
        s["answered"] = session.answered;
        j["sessions"][id] = s;
    }
    j["records"] = lines_;
    return j.dump();
}

void StudyService::write_snapshot() const {
    std::lock_guard lock(mutex_);
    write_snapshot_locked();
}

void StudyService::write_snapshot_locked() const {
    if (options_.log_dir.empty()) return;
    const fs::path target = options_.log_dir / "snapshot.json";
    const fs::path tmp = options_.log_dir / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IngestError("cannot write " + tmp.string());
        out << state_json_locked() << '\n';
    }
    fs::rename(tmp, target);
}

void StudyService::append_line(const std::string& file, const std::string& line) const {
    if (options_.log_dir.empty()) return;
    std::ofstream out(options_.log_dir / file, std::ios::app);
    if (!out) throw IngestError("cannot append to " + (options_.log_dir / file).string());
    out << line << '\n';
    out.flush();
    if (!out) throw IngestError("write failed on " + (options_.log_dir / file).string());
}

std::unique_ptr<StudyService> StudyService::replay(StudyDataset dataset, StudyServiceOptions options) {
    if (options.log_dir.empty()) throw ParameterError("replay needs a log directory");
    auto service = std::make_unique<StudyService>(std::move(dataset), options);
    std::lock_guard lock(service->mutex_);
    const fs::path sessions = options.log_dir / "sessions.ndjson";
    if (fs::exists(sessions)) {
        std::ifstream in(sessions);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            parse_guard("malformed session line", [&] {
                const json j = json::parse(line);
                service->start_session_locked(j.at("participant_id").get<std::string>(),
                                              parse_split(j.at("split").get<std::string>()),
                                              j.at("seed").get<std::uint64_t>(), false);
                return 0;
            });
        }
    }
    const fs::path records = options.log_dir / "records.ndjson";
    if (fs::exists(records)) {
        std::ifstream in(records);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const StoredRecord stored = parse_record_line(line);
            if (stored.record_id != service->records_.size() + 1) {
                throw IngestError("record log out of sequence at id " + std::to_string(stored.record_id));
            }
            if (!service->sessions_.contains(stored.record.participant_id)) {
                throw IngestError("record " + std::to_string(stored.record_id) + " has no session");
            }
            service->apply_record_locked(stored, line);
        }
    }
    return service;
}

}  // namespace svx

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "svx/segmentation.hpp"
#include "svx/taxonomy.hpp"

namespace svx {

inline constexpr std::array<LevelPreset, 3> kStudyLevels = {LevelPreset::fine, LevelPreset::medium,
                                                            LevelPreset::coarse};

/// One original RGB video and its three segmentation renderings.
struct BaseVideo {
    std::string id;
    Actor actor = Actor::human;
    Action action = Action::walking;
    Background background = Background::static_scene;
    double fps = 30.0;
    int frame_count = 0;
    /// Rendered segmentation frames per level (PPM directory); may be empty
    /// when the dataset is metadata only.
    std::map<LevelPreset, std::filesystem::path> level_frames;
};

/// Segmentation video identifier: "<base id>/<level>".
std::string segmentation_video_id(const std::string& base_id, LevelPreset level);

struct StudyDataset {
    std::vector<BaseVideo> videos;  ///< database order

    /// The full 2 actors x 8 actions x 2 backgrounds grid, actor-major.
    static StudyDataset canonical(double fps = 30.0, int frame_count = 120);

    /// JSON manifest: {"videos": [{id, actor, action, background, fps,
    /// frame_count, levels: {fine, medium, coarse}}]}. Relative level paths
    /// resolve against the manifest's directory.
    static StudyDataset load(const std::filesystem::path& manifest);
    void save(const std::filesystem::path& manifest) const;

    /// Every base video must carry all three levels when frames are given,
    /// and ids must be unique.
    void validate() const;

    const BaseVideo* find(const std::string& base_id) const;

    /// Playback duration at half frame rate, rounded to whole milliseconds.
    static std::int64_t half_rate_duration_ms(const BaseVideo& video);
    static double half_rate_frame_ms(const BaseVideo& video);
};

/// Resolved ground truth for one segmentation video.
struct VideoTruth {
    std::string base_id;
    LevelPreset level = LevelPreset::fine;
    Actor actor = Actor::human;
    Action action = Action::walking;
    Background background = Background::static_scene;
    std::int64_t duration_ms = 0;
};

std::optional<VideoTruth> lookup_truth(const StudyDataset& dataset, const std::string& video_id);

enum class Split { alpha, beta, gamma };
inline constexpr std::array<Split, 3> kSplits = {Split::alpha, Split::beta, Split::gamma};
std::string_view to_string(Split split);
Split parse_split(std::string_view name);

struct SplitAssignment {
    Split split = Split::alpha;
    std::vector<LevelPreset> levels;  ///< per base video, database order

    std::vector<std::string> video_ids(const StudyDataset& dataset) const;
};

/// Level rotation in database order: base video i is shown at
/// (coarse, medium, fine)[(offset + i) mod 3] with offsets 0/1/2 for
/// alpha/beta/gamma.
std::array<SplitAssignment, 3> build_splits(const StudyDataset& dataset);

/// Seeded Fisher-Yates order of a split's videos.
std::vector<std::string> shuffled_playlist(const StudyDataset& dataset, Split split,
                                           std::uint64_t seed);

struct PerceptionRecord {
    std::string participant_id;
    std::string video_id;
    LevelPreset level = LevelPreset::fine;
    std::optional<Actor> actor_choice;    ///< nullopt = unknown
    std::optional<Action> action_choice;  ///< nullopt = unknown
    std::int64_t response_time_ms = 0;
    bool watched_full = false;

    bool joint_unknown() const { return !actor_choice && !action_choice; }
};

struct StoredRecord {
    std::uint64_t record_id = 0;
    std::int64_t server_time_ms = 0;
    PerceptionRecord record;
};

std::string to_json_line(const StoredRecord& stored);
StoredRecord parse_record_line(const std::string& line);

/// Reads a newline-delimited record log.
std::vector<StoredRecord> read_record_log(const std::filesystem::path& path);

struct FrameRef {
    std::string url;
    double duration_ms = 0.0;
};

struct VideoManifest {
    std::string video_id;
    LevelPreset level = LevelPreset::fine;
    std::string ready_token;
    std::vector<FrameRef> frames;
    std::int64_t total_duration_ms = 0;
    int position = 0;  ///< 0-based index within the playlist
    int playlist_size = 0;
};

std::string to_json(const VideoManifest& manifest);

struct StudyServiceOptions {
    /// Directory for `sessions.ndjson`, `records.ndjson` and `snapshot.json`.
    /// Empty keeps everything in memory.
    std::filesystem::path log_dir;
    /// Write a snapshot after every N accepted records (0 disables).
    std::size_t snapshot_interval = 32;
    std::function<std::int64_t()> clock;  ///< server time in ms; defaults to system clock
};

/// Perception-study backend: sessions, playlists and the append-only record log.
/// Thread-safe; every mutation is serialized and appended in one total order.
class StudyService {
public:
    explicit StudyService(StudyDataset dataset, StudyServiceOptions options = {});

    const StudyDataset& dataset() const { return dataset_; }

    /// Creates the participant's session; rejects a second active session.
    std::vector<std::string> start_session(const std::string& participant_id, Split split,
                                           std::uint64_t seed);

    /// Manifest for the first unanswered video, or nullopt when done.
    std::optional<VideoManifest> next_video(const std::string& participant_id);

    /// Validates and appends; returns the record id.
    std::uint64_t record_perception(const PerceptionRecord& record,
                                    const std::optional<std::string>& ready_token = std::nullopt);

    std::vector<StoredRecord> records() const;
    /// The stored record exactly as logged.
    std::string record_line(std::uint64_t record_id) const;
    /// Full log, one JSON record per line.
    std::string export_log() const;

    /// Canonical JSON of sessions and answers, used to compare replays.
    std::string state_json() const;
    void write_snapshot() const;

    /// Rebuilds a service from the logs in `options.log_dir`.
    static std::unique_ptr<StudyService> replay(StudyDataset dataset, StudyServiceOptions options);

    std::size_t session_count() const;

private:
    struct Session {
        Split split = Split::alpha;
        std::uint64_t seed = 0;
        std::vector<std::string> playlist;
        std::set<std::string> answered;
    };

    std::vector<std::string> start_session_locked(const std::string& participant_id, Split split,
                                                  std::uint64_t seed, bool log);
    void apply_record_locked(const StoredRecord& stored, const std::string& line);
    std::string ready_token(const std::string& participant_id, const std::string& video_id) const;
    std::string state_json_locked() const;
    void write_snapshot_locked() const;
    void append_line(const std::string& file, const std::string& line) const;

    StudyDataset dataset_;
    StudyServiceOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
    std::vector<StoredRecord> records_;
    std::vector<std::string> lines_;
};

/// HTTP front end for StudyService:
///   POST /session/start   {participant_id, split, seed}
///   GET  /session/next?participant=<id>
///   POST /session/answer  PerceptionRecord JSON (+ optional ready_token)
///   GET  /admin/export
///   GET  /frames/<base id>/<level>/<index>   segmentation frames only
class StudyServer {
public:
    explicit StudyServer(StudyService& service);
    ~StudyServer();
    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

PerceptionRecord perception_from_json(const std::string& body);
std::string perception_to_json(const PerceptionRecord& record);

}  // namespace svx

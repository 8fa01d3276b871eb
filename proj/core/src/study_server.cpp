#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "svx/error.hpp"
#include "svx/study.hpp"

namespace svx {
namespace {

using nlohmann::json;

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

template <typename F>
void guarded(httplib::Response& res, F&& handler) {
    try {
        handler();
    } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
    } catch (const ConflictError& e) {
        send_error(res, 409, e.what());
    } catch (const ValidationError& e) {
        send_error(res, 422, e.what());
    } catch (const ParameterError& e) {
        send_error(res, 400, e.what());
    } catch (const json::exception& e) {
        send_error(res, 400, std::string("malformed request: ") + e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return bytes.str();
}

}  // namespace

struct StudyServer::Impl {
    explicit Impl(StudyService& s) : service(s) {}

    void install_routes() {
        server.Post("/session/start", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = json::parse(req.body);
                const auto playlist = service.start_session(body.at("participant_id").get<std::string>(),
                                                            parse_split(body.at("split").get<std::string>()),
                                                            body.value("seed", std::uint64_t{0}));
                res.set_content(json{{"playlist", playlist}}.dump(), "application/json");
            });
        });

        server.Get("/session/next", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                if (!req.has_param("participant")) throw ParameterError("missing participant parameter");
                const auto manifest = service.next_video(req.get_param_value("participant"));
                if (!manifest) {
                    res.status = 204;
                    return;
                }
                res.set_content(to_json(*manifest), "application/json");
            });
        });

        server.Post("/session/answer", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const json body = json::parse(req.body);
                std::optional<std::string> token;
                if (body.contains("ready_token")) token = body.at("ready_token").get<std::string>();
                PerceptionRecord record;
                try {
                    record = perception_from_json(req.body);
                } catch (const ValidationError& e) {
                    throw ParameterError(e.what());
                }
                const std::uint64_t id = service.record_perception(record, token);
                res.status = 201;
                res.set_content(json{{"record_id", id}}.dump(), "application/json");
            });
        });

        server.Get("/admin/export", [this](const httplib::Request&, httplib::Response& res) {
            guarded(res, [&] { res.set_content(service.export_log(), "application/x-ndjson"); });
        });

        // Only rendered segmentation frames are routable; the RGB sources never are.
        server.Get(R"(/frames/([^/]+)/(fine|medium|coarse)/(\d+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           const BaseVideo* video = service.dataset().find(req.matches[1].str());
                           if (!video) throw NotFoundError("unknown video '" + req.matches[1].str() + "'");
                           const LevelPreset level = parse_level_preset(req.matches[2].str());
                           const int index = std::stoi(req.matches[3].str());
                           const auto dir = video->level_frames.find(level);
                           if (dir == video->level_frames.end() || index >= video->frame_count) {
                               throw NotFoundError("no such frame");
                           }
                           char name[32];
                           std::snprintf(name, sizeof(name), "frame_%05d.ppm", index);
                           const auto path = dir->second / name;
                           if (!std::filesystem::exists(path)) throw NotFoundError("no such frame");
                           res.set_content(read_file(path), "image/x-portable-pixmap");
                       });
                   });
    }

    StudyService& service;
    httplib::Server server;
    std::thread worker;
};

StudyServer::StudyServer(StudyService& service) : impl_(std::make_unique<Impl>(service)) {
    impl_->install_routes();
}

StudyServer::~StudyServer() {
    stop();
}

int StudyServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void StudyServer::listen(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void StudyServer::stop() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace svx

#pragma once

// Interactive floorplan sessions behind an HTTP API. Warm-up and expansion run
// on a per-session worker thread; clients poll the status.

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ucme/floorplan/domain.hpp"
#include "ucme/floorplan/export.hpp"
#include "ucme/harness.hpp"

namespace ucme {

enum class SessionStatus { Initializing, AwaitingSelection, Evolving, Failed };

inline std::string to_string(SessionStatus s) {
    switch (s) {
    case SessionStatus::Initializing: return "initializing";
    case SessionStatus::AwaitingSelection: return "awaiting_selection";
    case SessionStatus::Evolving: return "evolving";
    case SessionStatus::Failed: return "failed";
    }
    return "?";
}

/// Error with a machine-readable code and the HTTP status it maps to.
class ServiceError : public Error {
  public:
    ServiceError(int http_status, std::string code, const std::string& what, std::string field = {})
        : Error(what), status_(http_status), code_(std::move(code)), field_(std::move(field)) {}
    int http_status() const { return status_; }
    const std::string& code() const { return code_; }
    const std::string& field() const { return field_; }

  private:
    int status_;
    std::string code_;
    std::string field_;
};

inline ServiceError not_found(const std::string& what) { return {404, "not_found", what}; }
inline ServiceError conflict(const std::string& what) { return {409, "conflict", what}; }
inline ServiceError invalid(const std::string& what, std::string field = {}) {
    return {400, "invalid_request", what, std::move(field)};
}

struct ServiceSessionConfig {
    SessionConfig session;
    DasMethod das = DasMethod::Corners;
    floorplan::FloorplanParams params;
    std::size_t snapshot_every = 1000;
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw invalid(e.what(), std::string("config.") + key);
    }
}

} // namespace detail

inline ServiceSessionConfig parse_service_config(const nlohmann::json& doc) {
    ServiceSessionConfig c;
    if (doc.is_null()) return c;
    if (!doc.is_object()) throw invalid("expected an object", "config");
    detail::read_opt(doc, "seed", c.session.seed);
    detail::read_opt(doc, "evals_per_selection", c.session.evals_per_selection);
    detail::read_opt(doc, "window_size", c.session.window_size);
    detail::read_opt(doc, "alternatives", c.session.alternatives);
    detail::read_opt(doc, "initial_population", c.session.initial_population);
    detail::read_opt(doc, "warmup_coverage", c.session.warmup_coverage);
    detail::read_opt(doc, "warmup_eval_cap", c.session.warmup_eval_cap);
    detail::read_opt(doc, "resolution", c.session.archive.resolution);
    detail::read_opt(doc, "site_count", c.params.site_count);
    detail::read_opt(doc, "snapshot_every", c.snapshot_every);
    if (doc.contains("das")) {
        const auto das = doc.at("das").is_string() ? parse_das_method(doc.at("das").get<std::string>()) : std::nullopt;
        if (!das) throw invalid("unknown DAS method", "config.das");
        c.das = *das;
    }
    try {
        c.session.archive.validate();
        validate_window_size(c.session.window_size, c.session.archive.resolution);
    } catch (const Error& e) {
        throw invalid(e.what(), "config");
    }
    if (c.session.alternatives == 0) throw invalid("must be positive", "config.alternatives");
    if (c.session.evals_per_selection == 0) throw invalid("must be positive", "config.evals_per_selection");
    if (c.snapshot_every == 0) throw invalid("must be positive", "config.snapshot_every");
    if (c.params.site_count < 10) throw invalid("must be at least 10", "config.site_count");
    return c;
}

class SessionService {
  public:
    using FloorplanSession = Session<floorplan::FloorplanDomain>;

    SessionService() = default;
    SessionService(const SessionService&) = delete;
    SessionService& operator=(const SessionService&) = delete;

    ~SessionService() {
        std::map<std::string, std::shared_ptr<Entry>> entries;
        {
            std::lock_guard lock(mutex_);
            entries.swap(sessions_);
        }
        for (auto& [id, e] : entries) {
            std::jthread worker;
            {
                std::lock_guard lock(e->mutex);
                worker = std::move(e->worker);
            }
            worker.request_stop();
        }
    }

    /// Validates the request and starts warm-up in the background. Returns the session id.
    std::string create(const nlohmann::json& body) {
        if (!body.is_object() || !body.contains("ds")) throw invalid("missing design spec", "ds");
        floorplan::DesignSpec ds;
        try {
            ds = floorplan::parse_design_spec(body.at("ds"));
        } catch (const ParseError& e) {
            throw invalid(e.what(), "ds." + e.field());
        }
        ServiceSessionConfig config = parse_service_config(body.contains("config") ? body.at("config") : nlohmann::json());
        auto entry = std::make_shared<Entry>();
        entry->ds = ds;
        entry->config = config;
        std::string id;
        {
            std::lock_guard lock(mutex_);
            id = "s" + std::to_string(++next_id_);
            sessions_[id] = entry;
        }
        std::lock_guard lock(entry->mutex);
        entry->worker = std::jthread([entry](std::stop_token stop) { warm_up(*entry, stop); });
        return id;
    }

    nlohmann::json status(const std::string& id) const {
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        nlohmann::json j{{"id", id},
                         {"status", to_string(e->status)},
                         {"das", to_string(e->config.das)},
                         {"selections", e->selections.size()}};
        if (e->status == SessionStatus::Failed) j["reason"] = e->failure;
        if (e->session) {
            const auto& s = *e->session;
            j["evaluations"] = s.evaluations() - s.warmup_evaluations();
            j["warmup_evaluations"] = s.warmup_evaluations();
            j["feasible_coverage"] = s.feasible().coverage();
            j["window"] = window_json(s.window());
        }
        return j;
    }

    /// The pending batch; a different DAS method resamples it before any selection is made.
    nlohmann::json alternatives(const std::string& id, std::optional<DasMethod> das = std::nullopt) {
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        require_awaiting(*e);
        if (das && *das != e->batch_method) {
            e->session->sample_alternatives(*das);
            e->batch_method = *das;
        }
        nlohmann::json out = nlohmann::json::array();
        const auto& pending = e->session->pending();
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const auto& p = pending[i];
            out.push_back({{"alt_id", i},
                           {"cell", {p.cell.col, p.cell.row}},
                           {"bc", {p.evaluation.bc.x, p.evaluation.bc.y}},
                           {"fitness", p.evaluation.fitness},
                           {"geometry", floorplan::layout_geometry(p.genome, e->ds)}});
        }
        return {{"das", to_string(e->batch_method)}, {"alternatives", std::move(out)}};
    }

    /// Accepts a selection and starts the expansion in the background.
    nlohmann::json select(const std::string& id, std::size_t alt_id) {
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        require_awaiting(*e);
        if (alt_id >= e->session->pending().size()) throw not_found("no alternative " + std::to_string(alt_id));
        e->status = SessionStatus::Evolving;
        const std::size_t index = e->selections.size() + 1;
        const auto& chosen = e->session->pending()[alt_id];
        e->selections.push_back(
            {index, chosen.cell, chosen.evaluation.bc, chosen.evaluation.fitness, 0.0, e->batch_method});
        e->snapshots.push_back(take_snapshot(e->session->feasible(),
                                             e->session->evaluations() - e->session->warmup_evaluations(), index,
                                             std::nullopt));
        auto working = std::make_shared<FloorplanSession>(*e->session);
        e->worker = std::jthread(
            [e, working, alt_id](std::stop_token stop) { expand(*e, std::move(*working), alt_id, stop); });
        return {{"accepted", true}, {"selection", index}, {"status", to_string(e->status)}};
    }

    nlohmann::json archive(const std::string& id, const std::string& which) const {
        if (which != "feasible" && which != "infeasible") throw invalid("which must be feasible or infeasible", "which");
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        if (!e->session) throw conflict("session has no archive yet");
        const auto& s = *e->session;
        const auto& a = which == "feasible" ? s.feasible() : s.infeasible();
        const int res = a.resolution();
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < res; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < res; ++c) {
                const auto& slot = a.at({c, r});
                row.push_back(slot ? nlohmann::json(a.quality_of(*slot)) : nlohmann::json());
            }
            rows.push_back(std::move(row));
        }
        const auto& cfg = s.config().archive;
        return {{"which", which},
                {"quality", which == "feasible" ? "fitness" : "feasibility_score"},
                {"resolution", res},
                {"bc1_range", {cfg.bc1_range.lo, cfg.bc1_range.hi}},
                {"bc2_range", {cfg.bc2_range.lo, cfg.bc2_range.hi}},
                {"window", window_json(s.window())},
                {"occupied", a.size()},
                {"cells", std::move(rows)}};
    }

    nlohmann::json history(const std::string& id) const {
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        nlohmann::json out = nlohmann::json::array();
        for (const auto& sel : e->selections) {
            out.push_back({{"index", sel.index},
                           {"cell", {sel.cell.col, sel.cell.row}},
                           {"bc", {sel.bc.x, sel.bc.y}},
                           {"fitness", sel.fitness},
                           {"das", to_string(sel.method)}});
        }
        return out;
    }

    /// Run log of the session so far, as line-delimited JSON.
    std::string export_log(const std::string& id) const {
        auto e = find(id);
        std::lock_guard lock(e->mutex);
        if (!e->session) throw conflict("session has not finished warming up");
        const auto& s = *e->session;
        RunLog log;
        log.config.interactive = true;
        log.config.das = e->config.das;
        log.config.runs = 1;
        log.config.selections = e->selections.size();
        log.config.snapshot_every = e->config.snapshot_every;
        log.config.session = s.config();
        log.config.ds = floorplan::to_json(e->ds);
        log.seed = s.config().seed;
        log.warmup_evaluations = s.warmup_evaluations();
        log.snapshots = e->snapshots;
        const std::size_t done = s.evaluations() - s.warmup_evaluations();
        if (log.snapshots.empty() || log.snapshots.back().evals < done) {
            log.snapshots.push_back(
                take_snapshot(s.feasible(), done, std::max<std::size_t>(1, e->selections.size()), std::nullopt));
        }
        log.selections = e->selections;
        log.feasible = dump_archive(s.feasible(), "feasible");
        log.infeasible = dump_archive(s.infeasible(), "infeasible");
        std::ostringstream out;
        write_run_log(out, log);
        return out.str();
    }

    /// Blocks until the session leaves Initializing/Evolving or the timeout passes.
    SessionStatus wait_idle(const std::string& id, std::chrono::milliseconds timeout) const {
        auto e = find(id);
        std::unique_lock lock(e->mutex);
        e->changed.wait_for(lock, timeout, [&] {
            return e->status != SessionStatus::Initializing && e->status != SessionStatus::Evolving;
        });
        return e->status;
    }

  private:
    struct Cancelled {};

    struct Entry {
        mutable std::mutex mutex;
        mutable std::condition_variable changed;
        SessionStatus status = SessionStatus::Initializing;
        std::string failure;
        floorplan::DesignSpec ds;
        ServiceSessionConfig config;
        std::optional<FloorplanSession> session; ///< last completed state
        DasMethod batch_method = DasMethod::Corners;
        std::vector<Snapshot> snapshots;
        std::vector<SelectionEntry> selections;
        std::jthread worker;
    };

    static nlohmann::json window_json(const SelectionWindow& w) {
        return {{"origin", {w.origin.col, w.origin.row}}, {"size", w.size}};
    }

    static void require_awaiting(const Entry& e) {
        if (e.status != SessionStatus::AwaitingSelection) {
            throw conflict("session is " + to_string(e.status) + ", not awaiting a selection");
        }
    }

    static void finish(Entry& e, SessionStatus status, std::string failure = {}) {
        std::lock_guard lock(e.mutex);
        e.status = status;
        e.failure = std::move(failure);
        e.changed.notify_all();
    }

    static void warm_up(Entry& e, std::stop_token stop) {
        try {
            floorplan::FloorplanDomain domain{e.ds, e.config.params};
            auto session = FloorplanSession::initialize(std::move(domain), e.config.session, [&](const FloorplanSession&) {
                if (stop.stop_requested()) throw Cancelled{};
            });
            session.sample_alternatives(e.config.das);
            std::lock_guard lock(e.mutex);
            e.session = std::move(session);
            e.batch_method = e.config.das;
            e.status = SessionStatus::AwaitingSelection;
            e.changed.notify_all();
        } catch (const Cancelled&) {
        } catch (const std::exception& ex) {
            finish(e, SessionStatus::Failed, ex.what());
        }
    }

    static void expand(Entry& e, FloorplanSession working, std::size_t alt_id, std::stop_token stop) {
        try {
            const std::size_t base = working.warmup_evaluations();
            const std::size_t start = working.evaluations();
            const std::size_t n = working.config().evals_per_selection;
            std::size_t index = 0;
            {
                std::lock_guard lock(e.mutex);
                index = e.selections.size();
            }
            std::vector<Snapshot> snaps;
            working.apply_selection(alt_id, [&](const FloorplanSession& s) {
                if (stop.stop_requested()) throw Cancelled{};
                const std::size_t done = s.evaluations() - start;
                if ((s.evaluations() - base) % e.config.snapshot_every == 0 && done != n) {
                    snaps.push_back(take_snapshot(s.feasible(), s.evaluations() - base, index, std::nullopt));
                }
            });
            working.sample_alternatives(e.config.das);
            std::lock_guard lock(e.mutex);
            e.session = std::move(working);
            e.batch_method = e.config.das;
            e.snapshots.insert(e.snapshots.end(), snaps.begin(), snaps.end());
            e.status = SessionStatus::AwaitingSelection;
            e.changed.notify_all();
        } catch (const Cancelled&) {
        } catch (const std::exception& ex) {
            finish(e, SessionStatus::Failed, ex.what());
        }
    }

    std::shared_ptr<Entry> find(const std::string& id) const {
        std::lock_guard lock(mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw not_found("no session " + id);
        return it->second;
    }

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t next_id_ = 0;
};

// ---------------------------------------------------------------- HTTP binding

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, const ServiceError& e) {
    nlohmann::json err{{"code", e.code()}, {"message", e.what()}};
    if (!e.field().empty()) err["field"] = e.field();
    send_json(res, e.http_status(), {{"error", std::move(err)}});
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
        send_error(res, invalid(e.what()));
    } catch (const std::exception& e) {
        send_error(res, ServiceError(500, "internal", e.what()));
    }
}

inline nlohmann::json parse_body(const httplib::Request& req) {
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid(e.what(), "body");
    }
}

} // namespace detail

/// Registers the session routes on `server`. The service must outlive the server.
inline void mount(httplib::Server& server, SessionService& service) {
    using httplib::Request;
    using httplib::Response;
    const std::string id = R"(/sessions/([A-Za-z0-9]+))";

    server.Post("/sessions", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] {
            const std::string sid = service.create(detail::parse_body(req));
            detail::send_json(res, 201, service.status(sid));
        });
    });
    server.Get(id, [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] { detail::send_json(res, 200, service.status(req.matches[1])); });
    });
    server.Get(id + "/alternatives", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] {
            std::optional<DasMethod> das;
            if (req.has_param("das")) {
                das = parse_das_method(req.get_param_value("das"));
                if (!das) throw invalid("unknown DAS method", "das");
            }
            detail::send_json(res, 200, service.alternatives(req.matches[1], das));
        });
    });
    server.Post(id + "/selection", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] {
            const auto body = detail::parse_body(req);
            if (!body.is_object() || !body.contains("alt_id") || !body.at("alt_id").is_number_unsigned()) {
                throw invalid("expected a non-negative integer", "alt_id");
            }
            detail::send_json(res, 202, service.select(req.matches[1], body.at("alt_id").get<std::size_t>()));
        });
    });
    server.Get(id + "/archive", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] {
            const std::string which = req.has_param("which") ? req.get_param_value("which") : "feasible";
            detail::send_json(res, 200, service.archive(req.matches[1], which));
        });
    });
    server.Get(id + "/history", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] { detail::send_json(res, 200, service.history(req.matches[1])); });
    });
    server.Get(id + "/export", [&service](const Request& req, Response& res) {
        detail::guarded(res, [&] {
            res.status = 200;
            res.set_content(service.export_log(req.matches[1]), "application/x-ndjson");
        });
    });
}

} // namespace ucme

#pragma once

// Headless experiment runner: scripted users drive sessions, metrics are
// snapshotted over evaluations and compared across experiments by AUC.

#include <algorithm>
#include <atomic>
#include <istream>
#include <array>
#include <exception>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucme/metrics.hpp"
#include "ucme/session.hpp"

namespace ucme {

using ojson = nlohmann::ordered_json;

struct ExperimentConfig {
    std::optional<UserId> user; ///< empty for the unguided baseline or a human driver
    bool interactive = false;   ///< selections came from a person through the service
    DasMethod das = DasMethod::Corners;
    std::size_t runs = 10;
    std::size_t selections = 10;
    std::size_t snapshot_every = 1000;
    SessionConfig session;
    ojson ds; ///< echo of the design spec, stored verbatim in every log
};

inline std::string user_label(const std::optional<UserId>& user) { return user ? to_string(*user) : "baseline"; }

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.user == b.user && a.interactive == b.interactive && a.das == b.das && a.runs == b.runs && a.selections == b.selections &&
           a.snapshot_every == b.snapshot_every && a.session.seed == b.session.seed &&
           a.session.evals_per_selection == b.session.evals_per_selection &&
           a.session.window_size == b.session.window_size && a.session.alternatives == b.session.alternatives &&
           a.session.archive.resolution == b.session.archive.resolution && a.ds == b.ds;
}

struct UserMetrics {
    UserId user;
    UscMetrics usc;

    friend bool operator==(const UserMetrics&, const UserMetrics&) = default;
};

struct Snapshot {
    std::size_t evals = 0; ///< evaluations since the end of warm-up
    std::size_t selection_index = 0;
    double coverage = 0.0;
    double max_fitness = 0.0;
    double qd_score = 0.0;
    std::vector<UserMetrics> users;
    std::optional<LocalMetrics> local;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;

    const UscMetrics& for_user(UserId u) const {
        for (const auto& m : users) {
            if (m.user == u) return m.usc;
        }
        throw Error("snapshot has no metrics for user " + to_string(u));
    }
};

struct SelectionEntry {
    std::size_t index = 0;
    Cell cell;
    Bc bc;
    double fitness = 0.0;
    double usc = 0.0;
    DasMethod method = DasMethod::Random;

    friend bool operator==(const SelectionEntry&, const SelectionEntry&) = default;
};

struct ArchiveDump {
    struct Entry {
        Cell cell;
        double quality = 0.0;
        double fitness = 0.0;
        double feasibility_score = 0.0;
        Bc bc;

        friend bool operator==(const Entry&, const Entry&) = default;
    };
    std::string which;
    int resolution = 0;
    std::vector<Entry> cells;

    friend bool operator==(const ArchiveDump&, const ArchiveDump&) = default;
};

struct RunLog {
    ExperimentConfig config;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::size_t warmup_evaluations = 0;
    std::vector<Snapshot> snapshots;
    std::vector<SelectionEntry> selections;
    ArchiveDump feasible;
    ArchiveDump infeasible;

    friend bool operator==(const RunLog&, const RunLog&) = default;
};

/// Seed of the evolution stream of run `run`, derived from the experiment seed.
inline std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run), 0x75636d65u};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

template <typename Genome>
ArchiveDump dump_archive(const EliteArchive<Genome>& archive, std::string which) {
    ArchiveDump d{std::move(which), archive.resolution(), {}};
    archive.for_each([&](const Elite<Genome>& e) {
        d.cells.push_back({e.cell, archive.quality_of(e.evaluation), e.evaluation.fitness,
                           e.evaluation.feasibility_score, e.evaluation.bc});
    });
    return d;
}

template <typename Genome>
Snapshot take_snapshot(const EliteArchive<Genome>& feasible, std::size_t evals, std::size_t s,
                       const std::optional<UserId>& user) {
    Snapshot snap;
    snap.evals = evals;
    snap.selection_index = s;
    snap.coverage = feasible.coverage();
    snap.max_fitness = feasible.max_fitness().value_or(0.0);
    snap.qd_score = feasible.qd_score();
    if (user) {
        snap.users.push_back({*user, usc_metrics(feasible, *user, s)});
    } else {
        for (UserId u : kAllUsers) snap.users.push_back({u, usc_metrics(feasible, u, s)});
    }
    return snap;
}

/// Drives one run from an already warmed-up session. Snapshots are taken at
/// every selection (after the choice, before expansion), every
/// `snapshot_every` evaluations in between, and once at the end.
template <Domain D>
RunLog run_session(Session<D> session, const ExperimentConfig& config, std::size_t run) {
    if (config.selections == 0) throw Error("run: at least one selection is required");
    if (config.snapshot_every == 0) throw Error("run: snapshot cadence must be positive");
    RunLog log;
    log.config = config;
    log.run = run;
    log.seed = run_seed(config.session.seed, run);
    log.warmup_evaluations = session.warmup_evaluations();
    session.reseed(log.seed);

    const std::size_t base = session.evaluations();
    const std::size_t n = config.session.evals_per_selection;
    std::size_t s = 1;
    auto observer = [&](const Session<D>& sess) {
        const std::size_t done = sess.evaluations() - base;
        if (done % config.snapshot_every == 0 && done % n != 0) {
            log.snapshots.push_back(take_snapshot(sess.feasible(), done, s, config.user));
        }
    };

    for (; s <= config.selections; ++s) {
        const std::size_t done = session.evaluations() - base;
        if (!config.user) {
            log.snapshots.push_back(take_snapshot(session.feasible(), done, s, config.user));
            session.baseline_step(n, observer);
            continue;
        }
        const auto& alternatives = session.sample_alternatives(config.das);
        std::vector<Bc> bcs;
        std::vector<Evaluation> evals;
        for (const auto& a : alternatives) {
            bcs.push_back(a.evaluation.bc);
            evals.push_back(a.evaluation);
        }
        const std::size_t pick = choose(*config.user, bcs, s);
        const auto& chosen = alternatives[pick];
        log.selections.push_back({s, chosen.cell, chosen.evaluation.bc, chosen.evaluation.fitness,
                                  usc(*config.user, chosen.evaluation.bc, s), config.das});
        Snapshot snap = take_snapshot(session.feasible(), done, s, config.user);
        snap.local = local_metrics(evals, *config.user, s);
        log.snapshots.push_back(std::move(snap));
        session.apply_selection(pick, observer);
    }
    log.snapshots.push_back(
        take_snapshot(session.feasible(), session.evaluations() - base, config.selections, config.user));
    log.feasible = dump_archive(session.feasible(), "feasible");
    log.infeasible = dump_archive(session.infeasible(), "infeasible");
    return log;
}

/// Runs `config.runs` independent runs forked from one shared warm-up.
/// Runs are distributed over `threads` workers; results do not depend on it.
template <Domain D>
std::vector<RunLog> run_experiment(const Session<D>& warmed, const ExperimentConfig& config, unsigned threads = 0) {
    if (config.runs == 0) throw Error("run_experiment: at least one run is required");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.runs));
    std::vector<RunLog> logs(config.runs);
    std::vector<std::exception_ptr> errors(config.runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < config.runs; r = next++) {
            try {
                logs[r] = run_session(warmed, config, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return logs;
}

template <Domain D>
std::vector<RunLog> run_experiment(D domain, const ExperimentConfig& config, unsigned threads = 0) {
    const auto warmed = Session<D>::initialize(std::move(domain), config.session);
    return run_experiment(warmed, config, threads);
}

// ---------------------------------------------------------------- metrics over logs

enum class Metric {
    Coverage,
    MaxFitness,
    QdScore,
    MaxUsc,
    MeanUsc,
    MeanWusc,
    SumWusc,
    LocalDiversity,
    LocalMeanFitness,
    LocalMeanUsc,
    UscEfficiency,
};

inline constexpr std::array<std::pair<Metric, const char*>, 11> kMetricNames{{
    {Metric::Coverage, "coverage"},
    {Metric::MaxFitness, "max_fitness"},
    {Metric::QdScore, "qd_score"},
    {Metric::MaxUsc, "max_usc"},
    {Metric::MeanUsc, "mean_usc"},
    {Metric::MeanWusc, "mean_wusc"},
    {Metric::SumWusc, "sum_wusc"},
    {Metric::LocalDiversity, "local_diversity"},
    {Metric::LocalMeanFitness, "local_mean_fitness"},
    {Metric::LocalMeanUsc, "local_mean_usc"},
    {Metric::UscEfficiency, "usc_efficiency"},
}};

inline std::string to_string(Metric m) {
    for (const auto& [k, name] : kMetricNames) {
        if (k == m) return name;
    }
    return "?";
}

inline std::optional<Metric> parse_metric(std::string_view name) {
    for (const auto& [k, n] : kMetricNames) {
        if (name == n) return k;
    }
    return std::nullopt;
}

/// Time series of a metric over evaluations. Local metrics exist only at selection snapshots.
inline std::vector<SeriesPoint> metric_series(const RunLog& log, Metric metric, UserId user) {
    std::vector<SeriesPoint> out;
    for (const Snapshot& s : log.snapshots) {
        double v = 0.0;
        switch (metric) {
        case Metric::Coverage: v = s.coverage; break;
        case Metric::MaxFitness: v = s.max_fitness; break;
        case Metric::QdScore: v = s.qd_score; break;
        case Metric::MaxUsc: v = s.for_user(user).max_usc; break;
        case Metric::MeanUsc: v = s.for_user(user).mean_usc; break;
        case Metric::MeanWusc: v = s.for_user(user).mean_wusc; break;
        case Metric::SumWusc: v = s.for_user(user).sum_wusc; break;
        case Metric::LocalDiversity:
        case Metric::LocalMeanFitness:
        case Metric::LocalMeanUsc:
            if (!s.local) continue;
            v = metric == Metric::LocalDiversity     ? s.local->diversity
                : metric == Metric::LocalMeanFitness ? s.local->mean_fitness
                                                     : s.local->mean_usc;
            break;
        case Metric::UscEfficiency: throw Error("usc_efficiency is a per-run value, not a series");
        }
        out.push_back({static_cast<double>(s.evals), v});
    }
    return out;
}

/// Scalar summary of one run: AUC of the metric series, or the USC efficiency of the selections.
inline double run_score(const RunLog& log, Metric metric, UserId user) {
    if (metric == Metric::UscEfficiency) {
        if (!log.config.user) throw Error("usc_efficiency needs a scripted user");
        std::vector<double> picks;
        for (const auto& sel : log.selections) picks.push_back(sel.usc);
        return usc_efficiency(picks);
    }
    return auc(metric_series(log, metric, user));
}

struct ComparisonRow {
    Metric metric;
    double mean_a = 0.0;
    double mean_b = 0.0;
    TTest test;
    double threshold = 0.0;
    bool significant = false;
    std::string winner; ///< "a", "b" or "none"
};

/// Per metric: AUC per run on each side, Student's t-test, Bonferroni-corrected
/// significance. The user scoring USC metrics is taken from whichever side has
/// one unless given explicitly.
inline std::vector<ComparisonRow> compare(const std::vector<RunLog>& a, const std::vector<RunLog>& b,
                                          const std::vector<Metric>& metrics, double alpha = 0.05,
                                          std::size_t bonferroni_m = 1, std::optional<UserId> user = std::nullopt) {
    if (a.empty() || b.empty()) throw Error("compare: both experiments need runs");
    if (a.size() != b.size()) throw Error("compare: experiments have different run counts");
    if (bonferroni_m == 0) throw Error("compare: bonferroni_m must be positive");
    if (!user) user = a.front().config.user ? a.front().config.user : b.front().config.user;
    if (!user) user = UserId::U1;
    std::vector<ComparisonRow> rows;
    for (Metric m : metrics) {
        std::vector<double> sa;
        std::vector<double> sb;
        for (const auto& log : a) sa.push_back(run_score(log, m, *user));
        for (const auto& log : b) sb.push_back(run_score(log, m, *user));
        ComparisonRow row{m, 0.0, 0.0, t_test(sa, sb), alpha / static_cast<double>(bonferroni_m), false, "none"};
        for (double v : sa) row.mean_a += v / static_cast<double>(sa.size());
        for (double v : sb) row.mean_b += v / static_cast<double>(sb.size());
        row.significant = row.test.p < row.threshold;
        if (row.significant) row.winner = row.mean_a > row.mean_b ? "a" : "b";
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "metric,mean_auc_a,mean_auc_b,t,p,threshold,significant,winner\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << to_string(r.metric) << ',' << r.mean_a << ',' << r.mean_b << ',' << r.test.t << ',' << r.test.p << ','
            << r.threshold << ',' << (r.significant ? "true" : "false") << ',' << r.winner << '\n';
    }
}

/// Resolution x resolution matrix of qualities, row 0 first; empty cells are blank.
inline void write_heatmap_csv(std::ostream& out, const ArchiveDump& dump) {
    std::vector<std::optional<double>> grid(static_cast<std::size_t>(dump.resolution) * dump.resolution);
    for (const auto& e : dump.cells) grid[static_cast<std::size_t>(e.cell.row) * dump.resolution + e.cell.col] = e.quality;
    out.precision(17);
    for (int r = 0; r < dump.resolution; ++r) {
        for (int c = 0; c < dump.resolution; ++c) {
            if (c > 0) out << ',';
            if (const auto& q = grid[static_cast<std::size_t>(r) * dump.resolution + c]) out << *q;
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------- serialization

inline ojson to_json(const UscMetrics& m) {
    return {{"max_usc", m.max_usc}, {"mean_usc", m.mean_usc}, {"mean_wusc", m.mean_wusc}, {"sum_wusc", m.sum_wusc}};
}

inline ojson to_json(const Snapshot& s) {
    ojson j{{"record", "snapshot"},       {"evals", s.evals},       {"selection_index", s.selection_index},
            {"coverage", s.coverage},     {"max_fitness", s.max_fitness}, {"qd_score", s.qd_score}};
    ojson users = ojson::object();
    for (const auto& u : s.users) users[to_string(u.user)] = to_json(u.usc);
    j["users"] = std::move(users);
    if (s.local) {
        j["local"] = {{"diversity", s.local->diversity},
                      {"mean_fitness", s.local->mean_fitness},
                      {"mean_usc", s.local->mean_usc}};
    }
    return j;
}

inline ojson to_json(const SelectionEntry& e) {
    return {{"record", "selection"}, {"index", e.index},     {"cell", {e.cell.col, e.cell.row}},
            {"bc", {e.bc.x, e.bc.y}},  {"fitness", e.fitness}, {"usc", e.usc},
            {"das", to_string(e.method)}};
}

inline ojson to_json(const ArchiveDump& d) {
    ojson cells = ojson::array();
    for (const auto& e : d.cells) {
        cells.push_back({{"cell", {e.cell.col, e.cell.row}},
                         {"quality", e.quality},
                         {"fitness", e.fitness},
                         {"feasibility_score", e.feasibility_score},
                         {"bc", {e.bc.x, e.bc.y}}});
    }
    return {{"record", "archive"}, {"which", d.which}, {"resolution", d.resolution}, {"cells", std::move(cells)}};
}

inline ojson header_json(const RunLog& log) {
    const auto& c = log.config;
    return {{"record", "header"},
            {"user", c.interactive ? std::string("interactive") : user_label(c.user)},
            {"das", to_string(c.das)},
            {"runs", c.runs},
            {"selections", c.selections},
            {"evals_per_selection", c.session.evals_per_selection},
            {"snapshot_every", c.snapshot_every},
            {"window_size", c.session.window_size},
            {"alternatives", c.session.alternatives},
            {"resolution", c.session.archive.resolution},
            {"bc1_range", {c.session.archive.bc1_range.lo, c.session.archive.bc1_range.hi}},
            {"bc2_range", {c.session.archive.bc2_range.lo, c.session.archive.bc2_range.hi}},
            {"initial_population", c.session.initial_population},
            {"warmup_coverage", c.session.warmup_coverage},
            {"warmup_eval_cap", c.session.warmup_eval_cap},
            {"experiment_seed", c.session.seed},
            {"run", log.run},
            {"seed", log.seed},
            {"warmup_evaluations", log.warmup_evaluations},
            {"ds", c.ds}};
}

/// One JSON record per line: header, snapshots, selections, then both archives.
inline void write_run_log(std::ostream& out, const RunLog& log) {
    out << header_json(log).dump() << '\n';
    for (const auto& s : log.snapshots) out << to_json(s).dump() << '\n';
    for (const auto& s : log.selections) out << to_json(s).dump() << '\n';
    out << to_json(log.feasible).dump() << '\n';
    out << to_json(log.infeasible).dump() << '\n';
}

namespace detail {

inline Cell cell_from(const ojson& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }
inline Bc bc_from(const ojson& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline UscMetrics usc_from(const ojson& j) {
    return {j.at("max_usc").get<double>(), j.at("mean_usc").get<double>(), j.at("mean_wusc").get<double>(),
            j.at("sum_wusc").get<double>()};
}

} // namespace detail

inline RunLog read_run_log(std::istream& in) {
    RunLog log;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ojson j = ojson::parse(line);
        const std::string kind = j.at("record").get<std::string>();
        if (kind == "header") {
            auto& c = log.config;
            const std::string user = j.at("user").get<std::string>();
            if (user == "interactive") {
                c.interactive = true;
            } else if (user != "baseline") {
                c.user = parse_user(user);
                if (!c.user) throw ParseError("user", "unknown user " + user);
            }
            const auto das = parse_das_method(j.at("das").get<std::string>());
            if (!das) throw ParseError("das", "unknown DAS method");
            c.das = *das;
            c.runs = j.at("runs").get<std::size_t>();
            c.selections = j.at("selections").get<std::size_t>();
            c.snapshot_every = j.at("snapshot_every").get<std::size_t>();
            c.session.evals_per_selection = j.at("evals_per_selection").get<std::size_t>();
            c.session.window_size = j.at("window_size").get<int>();
            c.session.alternatives = j.at("alternatives").get<std::size_t>();
            c.session.archive.resolution = j.at("resolution").get<int>();
            c.session.archive.bc1_range = {j.at("bc1_range").at(0).get<double>(), j.at("bc1_range").at(1).get<double>()};
            c.session.archive.bc2_range = {j.at("bc2_range").at(0).get<double>(), j.at("bc2_range").at(1).get<double>()};
            c.session.initial_population = j.at("initial_population").get<std::size_t>();
            c.session.warmup_coverage = j.at("warmup_coverage").get<double>();
            c.session.warmup_eval_cap = j.at("warmup_eval_cap").get<std::size_t>();
            c.session.seed = j.at("experiment_seed").get<std::uint64_t>();
            c.ds = j.at("ds");
            log.run = j.at("run").get<std::size_t>();
            log.seed = j.at("seed").get<std::uint64_t>();
            log.warmup_evaluations = j.at("warmup_evaluations").get<std::size_t>();
            header = true;
        } else if (kind == "snapshot") {
            Snapshot s;
            s.evals = j.at("evals").get<std::size_t>();
            s.selection_index = j.at("selection_index").get<std::size_t>();
            s.coverage = j.at("coverage").get<double>();
            s.max_fitness = j.at("max_fitness").get<double>();
            s.qd_score = j.at("qd_score").get<double>();
            for (const auto& [name, m] : j.at("users").items()) {
                const auto u = parse_user(name);
                if (!u) throw ParseError("users", "unknown user " + name);
                s.users.push_back({*u, detail::usc_from(m)});
            }
            if (j.contains("local")) {
                const auto& l = j.at("local");
                s.local = LocalMetrics{l.at("diversity").get<double>(), l.at("mean_fitness").get<double>(),
                                       l.at("mean_usc").get<double>()};
            }
            log.snapshots.push_back(std::move(s));
        } else if (kind == "selection") {
            const auto das = parse_das_method(j.at("das").get<std::string>());
            if (!das) throw ParseError("das", "unknown DAS method");
            log.selections.push_back({j.at("index").get<std::size_t>(), detail::cell_from(j.at("cell")),
                                      detail::bc_from(j.at("bc")), j.at("fitness").get<double>(),
                                      j.at("usc").get<double>(), *das});
        } else if (kind == "archive") {
            ArchiveDump d{j.at("which").get<std::string>(), j.at("resolution").get<int>(), {}};
            for (const auto& e : j.at("cells")) {
                d.cells.push_back({detail::cell_from(e.at("cell")), e.at("quality").get<double>(),
                                   e.at("fitness").get<double>(), e.at("feasibility_score").get<double>(),
                                   detail::bc_from(e.at("bc"))});
            }
            (d.which == "feasible" ? log.feasible : log.infeasible) = std::move(d);
        } else {
            throw ParseError("record", "unknown record kind " + kind);
        }
    }
    if (!header) throw ParseError("header", "run log has no header record");
    return log;
}

} // namespace ucme

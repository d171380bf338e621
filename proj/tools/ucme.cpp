// Command-line entry point: headless experiments, comparisons and the session server.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ucme/floorplan/domain.hpp"
#include "ucme/harness.hpp"
#include "ucme/service.hpp"

namespace fs = std::filesystem;
using namespace ucme;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<RunLog> read_logs(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no run logs in " + dir.string());
    std::vector<RunLog> logs;
    for (const auto& f : files) {
        std::ifstream in(f);
        logs.push_back(read_run_log(in));
    }
    return logs;
}

std::string run_name(std::size_t r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%03zu", r);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"User-controllable MAP-Elites for floorplans"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run scripted-user experiments and write one log per run");
    std::string ds_path;
    std::string user = "U1";
    std::string das = "corners";
    std::size_t runs = 10;
    std::size_t selections = 10;
    std::size_t evals = 10'000;
    std::uint64_t seed = 42;
    std::string out_dir = "results";
    unsigned threads = 0;
    std::size_t sites = floorplan::FloorplanParams{}.site_count;
    std::size_t snapshot_every = 1000;
    std::vector<double> bc1_range{0.0, 1.0};
    std::vector<double> bc2_range{0.0, 1.0};
    bool heatmaps = false;
    run->add_option("--ds", ds_path, "design spec JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--user", user, "U1..U12 or baseline");
    run->add_option("--das", das, "random|quadrants|squares|edges|corners|medoids");
    run->add_option("--runs", runs)->check(CLI::PositiveNumber);
    run->add_option("--selections", selections)->check(CLI::PositiveNumber);
    run->add_option("--evals", evals, "evaluations per selection")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed);
    run->add_option("--out", out_dir);
    run->add_option("--threads", threads, "worker threads (0 = all cores)");
    run->add_option("--sites", sites, "Voronoi sites per layout");
    run->add_option("--snapshot-every", snapshot_every)->check(CLI::PositiveNumber);
    run->add_option("--bc1-range", bc1_range, "compactness axis bounds: lo hi")->expected(2)->delimiter(',');
    run->add_option("--bc2-range", bc2_range, "orthogonality axis bounds: lo hi")->expected(2)->delimiter(',');
    run->add_flag("--heatmaps", heatmaps, "also write final archive heatmaps as CSV");

    auto* cmp = app.add_subcommand("compare", "compare two experiments by per-run AUC");
    std::string dir_a;
    std::string dir_b;
    std::string metrics = "coverage,max_fitness,qd_score,max_usc,mean_usc,mean_wusc,sum_wusc";
    double alpha = 0.05;
    std::size_t bonferroni = 1;
    std::string cmp_user;
    std::string cmp_out;
    cmp->add_option("--a", dir_a)->required()->check(CLI::ExistingDirectory);
    cmp->add_option("--b", dir_b)->required()->check(CLI::ExistingDirectory);
    cmp->add_option("--metrics", metrics, "comma-separated metric names");
    cmp->add_option("--alpha", alpha);
    cmp->add_option("--bonferroni", bonferroni, "number of comparisons per metric")->check(CLI::PositiveNumber);
    cmp->add_option("--user", cmp_user, "user scoring USC metrics (default: the scripted side's user)");
    cmp->add_option("--out", cmp_out, "CSV file (default: stdout)");

    auto* serve = app.add_subcommand("serve", "serve interactive sessions over HTTP");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port);
    serve->add_option("--host", host);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig config;
            if (user != "baseline") {
                config.user = parse_user(user);
                if (!config.user) throw Error("unknown user " + user);
            }
            const auto method = parse_das_method(das);
            if (!method) throw Error("unknown DAS method " + das);
            config.das = *method;
            config.runs = runs;
            config.selections = selections;
            config.snapshot_every = snapshot_every;
            config.session.evals_per_selection = evals;
            config.session.seed = seed;
            config.session.archive.bc1_range = {bc1_range[0], bc1_range[1]};
            config.session.archive.bc2_range = {bc2_range[0], bc2_range[1]};
            config.session.archive.validate();
            const std::string text = slurp(ds_path);
            const auto ds = floorplan::parse_design_spec(std::string_view(text));
            config.ds = floorplan::to_json(ds);
            floorplan::FloorplanParams params;
            params.site_count = sites;

            const auto logs = run_experiment(floorplan::FloorplanDomain{ds, params}, config, threads);
            fs::create_directories(out_dir);
            for (const auto& log : logs) {
                std::ofstream out(fs::path(out_dir) / (run_name(log.run) + ".jsonl"));
                write_run_log(out, log);
                if (heatmaps) {
                    std::ofstream f(fs::path(out_dir) / (run_name(log.run) + "_feasible.csv"));
                    write_heatmap_csv(f, log.feasible);
                    std::ofstream i(fs::path(out_dir) / (run_name(log.run) + "_infeasible.csv"));
                    write_heatmap_csv(i, log.infeasible);
                }
            }
            std::cerr << "wrote " << logs.size() << " run logs to " << out_dir << '\n';
        } else if (*cmp) {
            std::vector<Metric> list;
            for (const auto& name : split(metrics, ',')) {
                const auto m = parse_metric(name);
                if (!m) throw Error("unknown metric " + name);
                list.push_back(*m);
            }
            std::optional<UserId> u;
            if (!cmp_user.empty()) {
                u = parse_user(cmp_user);
                if (!u) throw Error("unknown user " + cmp_user);
            }
            const auto rows = compare(read_logs(dir_a), read_logs(dir_b), list, alpha, bonferroni, u);
            if (cmp_out.empty()) {
                write_comparison_csv(std::cout, rows);
            } else {
                std::ofstream out(cmp_out);
                write_comparison_csv(out, rows);
            }
        } else if (*serve) {
            SessionService service;
            httplib::Server server;
            mount(server, service);
            std::cerr << "listening on " << host << ':' << port << '\n';
            if (!server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

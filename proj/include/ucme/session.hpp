#pragma once

// User-controllable MAP-Elites over a feasible and an infeasible archive.

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "ucme/archive.hpp"
#include "ucme/das.hpp"
#include "ucme/window.hpp"

namespace ucme {

template <typename D>
concept Domain = requires(const D& d, const typename D::Genome& g, Rng& rng) {
    typename D::Genome;
    { d.generate_initial(rng) } -> std::convertible_to<typename D::Genome>;
    { d.mutate(g, rng) } -> std::convertible_to<typename D::Genome>;
    { d.evaluate(g) } -> std::convertible_to<Evaluation>;
};

struct SessionConfig {
    int window_size = 9;
    std::size_t alternatives = 4;
    std::size_t evals_per_selection = 10'000;
    std::size_t initial_population = 100;
    double warmup_coverage = 0.01;
    std::size_t warmup_eval_cap = 500'000;
    ArchiveConfig archive;
    std::uint64_t seed = 42;
};

template <typename Genome>
struct SelectionRecord {
    std::size_t index; ///< 1-based selection number
    Elite<Genome> chosen;
    DasMethod method;
};

/// Interactive session state. A session is a value: copying it forks the search.
template <Domain D>
class Session {
  public:
    using Genome = typename D::Genome;
    using ArchiveT = EliteArchive<Genome>;
    using EliteT = Elite<Genome>;
    /// Called after every evaluation with the running evaluation count.
    using Observer = std::function<void(const Session&)>;

    /// Seeds both archives from the initial population, runs unwindowed
    /// feasible/infeasible MAP-Elites until the feasible coverage gate is met,
    /// then places the first window. The observer sees every warm-up evaluation.
    static Session initialize(D domain, SessionConfig config, const Observer& observer = {}) {
        Session s(std::move(domain), std::move(config));
        s.warm_up(observer);
        return s;
    }

    const D& domain() const { return domain_; }
    const SessionConfig& config() const { return config_; }
    const ArchiveT& feasible() const { return feasible_; }
    const ArchiveT& infeasible() const { return infeasible_; }
    const SelectionWindow& window() const { return window_; }
    const std::vector<SelectionRecord<Genome>>& history() const { return history_; }
    const std::vector<EliteT>& pending() const { return pending_; }
    std::size_t evaluations() const { return evaluations_; }
    std::size_t warmup_evaluations() const { return warmup_evaluations_; }

    /// Restarts the random stream, e.g. to fork independent runs from one warm-up.
    void reseed(std::uint64_t seed) { rng_.seed(seed); }

    /// Samples alternatives from the feasible archive inside the window and
    /// remembers them as the batch the next selection must come from.
    const std::vector<EliteT>& sample_alternatives(DasMethod method) {
        std::vector<Cell> occupied;
        for (const EliteT* e : feasible_.occupied_in(window_.rect())) occupied.push_back(e->cell);
        const auto cells = sample_alternative_cells(method, window_, occupied, config_.alternatives, rng_);
        pending_.clear();
        for (const Cell& c : cells) pending_.push_back(*feasible_.at(c));
        pending_method_ = method;
        return pending_;
    }

    /// Moves the window onto the chosen alternative and spends the per-selection budget.
    void apply_selection(std::size_t pending_index, const Observer& observer = {}) {
        if (pending_index >= pending_.size()) {
            throw ProtocolError("apply_selection: chosen elite was not among the last alternatives");
        }
        EliteT chosen = pending_[pending_index];
        pending_.clear();
        window_ = recenter(window_, chosen.cell, feasible_.resolution());
        history_.push_back({history_.size() + 1, std::move(chosen), pending_method_});
        expand_window(config_.evals_per_selection, observer);
    }

    void apply_selection(const EliteT& chosen, const Observer& observer = {}) {
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const EliteT& p = pending_[i];
            if (p.cell == chosen.cell && p.evaluation.bc == chosen.evaluation.bc &&
                p.evaluation.fitness == chosen.evaluation.fitness) {
                apply_selection(i, observer);
                return;
            }
        }
        throw ProtocolError("apply_selection: chosen elite was not among the last alternatives");
    }

    /// Windowed expansion: parents alternate between archives (feasible on odd
    /// steps) and come from inside the window; offspring land anywhere.
    void expand_window(std::size_t n_evals, const Observer& observer = {}) {
        evolve(n_evals, window_.rect(), observer);
    }

    /// Unguided baseline: as expand_window but parents come from the whole grid.
    void baseline_step(std::size_t n_evals, const Observer& observer = {}) {
        const int res = feasible_.resolution();
        evolve(n_evals, {{0, 0}, {res, res}}, observer);
    }

  private:
    Session(D domain, SessionConfig config)
        : domain_(std::move(domain)), config_(std::move(config)), rng_(config_.seed),
          feasible_(config_.archive, QualityRole::Fitness),
          infeasible_(config_.archive, QualityRole::FeasibilityScore) {
        validate_window_size(config_.window_size, config_.archive.resolution);
        if (config_.alternatives == 0) throw Error("session: at least one alternative is required");
        window_.size = config_.window_size;
    }

    void place(Genome genome) {
        Evaluation ev = domain_.evaluate(genome);
        ++evaluations_;
        auto& archive = ev.feasible ? feasible_ : infeasible_;
        archive.try_insert(std::move(genome), std::move(ev));
    }

    void warm_up(const Observer& observer) {
        for (std::size_t i = 0; i < config_.initial_population; ++i) {
            place(domain_.generate_initial(rng_));
            if (observer) observer(*this);
        }
        const int res = feasible_.resolution();
        const CellRect everywhere{{0, 0}, {res, res}};
        while (feasible_.coverage() < config_.warmup_coverage) {
            if (evaluations_ >= config_.warmup_eval_cap) {
                throw InitializationError("warm-up exceeded the evaluation cap before reaching coverage");
            }
            if (feasible_.empty() && infeasible_.empty()) {
                throw InitializationError("warm-up: both archives are empty");
            }
            step(warmup_parity_++ % 2 == 0, everywhere);
            if (observer) observer(*this);
        }
        warmup_evaluations_ = evaluations_;
        window_ = initial_window(feasible_, config_.window_size);
    }

    void evolve(std::size_t n_evals, CellRect region, const Observer& observer) {
        if (n_evals == 0) throw Error("evolve: evaluation budget must be positive");
        for (std::size_t i = 1; i <= n_evals; ++i) {
            step(i % 2 == 1, region);
            if (observer) observer(*this);
        }
    }

    void step(bool feasible_turn, CellRect region) {
        const ArchiveT& first = feasible_turn ? feasible_ : infeasible_;
        const ArchiveT& second = feasible_turn ? infeasible_ : feasible_;
        auto parents = first.occupied_in(region);
        if (parents.empty()) parents = second.occupied_in(region);
        if (parents.empty()) throw Error("evolve: both archives are empty inside the parent region");
        const EliteT* parent = parents[detail::uniform_index(parents.size(), rng_)];
        place(domain_.mutate(parent->genome, rng_));
    }

    D domain_;
    SessionConfig config_;
    Rng rng_;
    ArchiveT feasible_;
    ArchiveT infeasible_;
    SelectionWindow window_;
    std::vector<SelectionRecord<Genome>> history_;
    std::vector<EliteT> pending_;
    DasMethod pending_method_ = DasMethod::Random;
    std::size_t evaluations_ = 0;
    std::size_t warmup_evaluations_ = 0;
    std::uint64_t warmup_parity_ = 0;
};

} // namespace ucme

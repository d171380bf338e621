#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ucme/error.hpp"
#include "ucme/evaluation.hpp"

namespace ucme {

struct Cell {
    int col = 0;
    int row = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

struct ArchiveConfig {
    int resolution = 64;
    Interval bc1_range{0.0, 1.0};
    Interval bc2_range{0.0, 1.0};

    void validate() const {
        if (resolution < 2) throw Error("archive resolution must be at least 2");
        if (!(bc1_range.width() > 0.0) || !(bc2_range.width() > 0.0)) {
            throw Error("archive BC ranges must have positive width");
        }
    }
    int cell_count() const { return resolution * resolution; }
};

namespace detail {
inline int bin(double v, Interval range, int res) {
    const double scaled = (v - range.lo) / range.width() * res;
    if (scaled <= 0.0) return 0;
    if (scaled >= res) return res - 1;
    return std::min(static_cast<int>(std::floor(scaled)), res - 1);
}
} // namespace detail

/// Bins a BC into its archive cell. Out-of-range values clamp to the boundary bins.
inline Cell cell_of(Bc bc, const ArchiveConfig& config) {
    if (!std::isfinite(bc.x) || !std::isfinite(bc.y)) {
        throw EvaluationError("cell_of: non-finite behavioural characterization");
    }
    return {detail::bin(bc.x, config.bc1_range, config.resolution),
            detail::bin(bc.y, config.bc2_range, config.resolution)};
}

template <typename Genome>
struct Elite {
    Genome genome;
    Evaluation evaluation;
    Cell cell;
};

enum class QualityRole { Fitness, FeasibilityScore };

enum class InsertResult { InsertedEmpty, Replaced, Rejected };

/// Rectangle of cells, inclusive of `lo` and exclusive of `hi`.
struct CellRect {
    Cell lo;
    Cell hi;
    bool contains(Cell c) const {
        return c.col >= lo.col && c.col < hi.col && c.row >= lo.row && c.row < hi.row;
    }
};

/// One MAP-Elites grid. The quality role decides which scalar of the
/// evaluation competes for a cell.
template <typename Genome>
class EliteArchive {
  public:
    using elite_type = Elite<Genome>;

    explicit EliteArchive(ArchiveConfig config = {}, QualityRole role = QualityRole::Fitness)
        : config_(config), role_(role) {
        config_.validate();
        grid_.resize(static_cast<std::size_t>(config_.cell_count()));
    }

    const ArchiveConfig& config() const { return config_; }
    QualityRole quality_role() const { return role_; }
    int resolution() const { return config_.resolution; }

    double quality_of(const Evaluation& e) const {
        return role_ == QualityRole::Fitness ? e.fitness : e.feasibility_score;
    }
    double quality_of(const elite_type& e) const { return quality_of(e.evaluation); }

    const std::optional<elite_type>& at(Cell c) const { return grid_[index(c)]; }
    bool occupied(Cell c) const { return grid_[index(c)].has_value(); }

    InsertResult try_insert(elite_type candidate) {
        const double q = quality_of(candidate);
        if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
            throw EvaluationError("try_insert: quality outside [0, 1]");
        }
        auto& slot = grid_[index(candidate.cell)];
        if (!slot) {
            slot = std::move(candidate);
            ++occupied_;
            return InsertResult::InsertedEmpty;
        }
        if (q > quality_of(*slot)) {
            slot = std::move(candidate);
            return InsertResult::Replaced;
        }
        return InsertResult::Rejected;
    }

    /// Evaluates placement from the BC and inserts.
    InsertResult try_insert(Genome genome, Evaluation evaluation) {
        const Cell c = cell_of(evaluation.bc, config_);
        return try_insert(elite_type{std::move(genome), std::move(evaluation), c});
    }

    std::size_t size() const { return occupied_; }
    bool empty() const { return occupied_ == 0; }

    double coverage() const {
        return static_cast<double>(occupied_) / static_cast<double>(config_.cell_count());
    }

    double qd_score() const {
        double total = 0.0;
        for (const auto& slot : grid_) {
            if (slot) total += quality_of(*slot);
        }
        return total;
    }

    std::optional<double> max_fitness() const {
        std::optional<double> best;
        for (const auto& slot : grid_) {
            if (slot && (!best || quality_of(*slot) > *best)) best = quality_of(*slot);
        }
        return best;
    }

    /// Elites inside `region`, row-major (row outer, column inner).
    std::vector<const elite_type*> occupied_in(CellRect region) const {
        std::vector<const elite_type*> out;
        const int res = config_.resolution;
        for (int r = std::max(0, region.lo.row); r < std::min(res, region.hi.row); ++r) {
            for (int c = std::max(0, region.lo.col); c < std::min(res, region.hi.col); ++c) {
                const auto& slot = grid_[index({c, r})];
                if (slot) out.push_back(&*slot);
            }
        }
        return out;
    }

    std::vector<const elite_type*> elites() const {
        return occupied_in({{0, 0}, {config_.resolution, config_.resolution}});
    }

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& slot : grid_) {
            if (slot) f(*slot);
        }
    }

  private:
    std::size_t index(Cell c) const {
        if (c.col < 0 || c.row < 0 || c.col >= config_.resolution || c.row >= config_.resolution) {
            throw Error("archive cell out of range");
        }
        return static_cast<std::size_t>(c.row * config_.resolution + c.col);
    }

    ArchiveConfig config_;
    QualityRole role_;
    std::vector<std::optional<elite_type>> grid_;
    std::size_t occupied_ = 0;
};

} // namespace ucme

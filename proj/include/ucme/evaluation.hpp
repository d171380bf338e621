#pragma once

#include <vector>

namespace ucme {

/// Behavioural characterization: a point in the 2-D feature space.
struct Bc {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Bc&, const Bc&) = default;
};

struct Evaluation {
    bool feasible = false;
    double feasibility_score = 0.0;
    std::vector<double> constraint_scores;
    double fitness = 0.0;
    Bc bc;
};

} // namespace ucme

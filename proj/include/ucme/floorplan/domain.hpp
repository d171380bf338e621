#pragma once

#include "ucme/floorplan/design_spec.hpp"
#include "ucme/floorplan/evaluate.hpp"
#include "ucme/floorplan/operators.hpp"

namespace ucme::floorplan {

/// Binds a design spec and operator parameters into the engine's domain interface.
struct FloorplanDomain {
    using Genome = LayoutGenome;

    DesignSpec spec;
    FloorplanParams params;

    Genome generate_initial(Rng& rng) const { return floorplan::generate_initial(spec, params, rng); }
    Genome mutate(const Genome& g, Rng& rng) const { return floorplan::mutate(g, spec, params, rng); }
    Evaluation evaluate(const Genome& g) const { return floorplan::evaluate(g, spec); }
};

} // namespace ucme::floorplan

#pragma once

#include <string>

#include "gbf/fock.hpp"
#include "gbf/report.hpp"
#include "gbf/spacetime.hpp"

// Single-header nlohmann/json from vendor/.
#include <json.hpp>

namespace gbf {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::uint64_t seed = 1;
    double tol = 1e-9;
    int nmax = 6;
    int mmax = 6;
    std::string suite = "all";
    std::string out;
};

// Theory ingestion. Component refs are "label" (standard orientation) or
// "~label" (reversed); `orientation_pairs` may declare alias labels for
// reversed hypersurfaces. A `dirac` block delegates to the slab builders.
TheorySpec theory_from_json(const json& j);
TheorySpec load_theory(const std::string& path);

json theory_to_json(const TheorySpec& theory);

// State description: list of {coeff: [re,im], vectors: [[ [re,im] x dim ]...]}
// terms, each denoting coeff * psi[vectors...] on the given space.
struct StateDescription {
    struct Term {
        cplx coeff;
        std::vector<Eigen::VectorXcd> vectors;
    };
    std::vector<Term> terms;
};

StateDescription state_from_json(const json& j, int dim);
StateDescription load_state(const std::string& path, int dim);

json report_to_json(const Report& rep);

}  // namespace gbf

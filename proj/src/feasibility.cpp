#include "iadas/feasibility.hpp"

#include <algorithm>

namespace iadas {

std::int64_t count_free_variables(const SystemShape& shape) {
    shape.validate();
    const std::int64_t k = shape.users;
    const std::int64_t ns = shape.streams;
    return k * (shape.tx_antennas + shape.rx_antennas - 2 * ns) * ns;
}

std::int64_t count_alignment_equations(const SystemShape& shape) {
    shape.validate();
    const std::int64_t k = shape.users;
    const std::int64_t ns = shape.streams;
    return k * (k - 1) * ns * ns;
}

std::int64_t count_power_equations(const SystemShape& shape) {
    shape.validate();
    const std::int64_t k = shape.users;
    return std::max<std::int64_t>(k * (shape.rrus - shape.streams), 0);
}

bool strict_properness_inequality(const SystemShape& shape) {
    shape.validate();
    const std::int64_t ns = shape.streams;
    const std::int64_t lhs = static_cast<std::int64_t>(shape.rx_antennas + shape.tx_antennas) * ns;
    const std::int64_t rhs = (shape.users + 1) * ns * ns + std::max<std::int64_t>(shape.rrus - ns, 0);
    return lhs >= rhs;
}

bool unconstrained_properness_inequality(const SystemShape& shape) {
    shape.validate();
    return shape.tx_antennas + shape.rx_antennas >= (shape.users + 1) * shape.streams;
}

PropernessReport is_proper(const SystemShape& shape, ConstraintMode /*mode*/) {
    PropernessReport r;
    r.shape = shape;
    r.n_vars = count_free_variables(shape);
    r.n_eqs_alignment = count_alignment_equations(shape);
    r.n_eqs_power = count_power_equations(shape);
    r.proper_unconstrained = unconstrained_properness_inequality(shape);
    r.proper_strict = r.n_vars >= r.n_eqs_alignment + r.n_eqs_power;
    return r;
}

FeasibilityClass classify(const PropernessReport& report) {
    if (report.proper_strict) return FeasibilityClass::strictly_feasible;
    if (report.proper_unconstrained) return FeasibilityClass::feasible_unconstrained_only;
    return FeasibilityClass::infeasible;
}

const char* to_string(FeasibilityClass c) {
    switch (c) {
        case FeasibilityClass::infeasible: return "infeasible";
        case FeasibilityClass::feasible_unconstrained_only: return "feasible only without per-RRU constraints";
        case FeasibilityClass::strictly_feasible: return "strictly feasible";
    }
    return "?";
}

}  // namespace iadas

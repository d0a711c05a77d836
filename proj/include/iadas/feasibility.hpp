#pragma once

#include <cstdint>

#include "iadas/channel.hpp"

namespace iadas {

enum class ConstraintMode { unconstrained, strict_per_rru };

/// Counting summary for one symmetric configuration.
struct PropernessReport {
    SystemShape shape;
    std::int64_t n_vars = 0;             // N_v
    std::int64_t n_eqs_alignment = 0;    // N_e^(1)
    std::int64_t n_eqs_power = 0;        // N_e^(2)
    bool proper_unconstrained = false;
    bool proper_strict = false;
};

/// N_v = K (Nt + Nr - 2 Ns) Ns.
[[nodiscard]] std::int64_t count_free_variables(const SystemShape& shape);
/// N_e^(1) = K (K - 1) Ns^2.
[[nodiscard]] std::int64_t count_alignment_equations(const SystemShape& shape);
/// N_e^(2) = max{K (N_RRU - Ns), 0}.
[[nodiscard]] std::int64_t count_power_equations(const SystemShape& shape);

/// Closed-form strict-constraint test:
/// (Nr + Nt) Ns >= (K + 1) Ns^2 + max{N_RRU - Ns, 0}.
[[nodiscard]] bool strict_properness_inequality(const SystemShape& shape);
/// Classic test: Nt + Nr >= (K + 1) Ns.
[[nodiscard]] bool unconstrained_properness_inequality(const SystemShape& shape);

/// Both booleans are always populated; `mode` only selects which one the
/// caller considers primary and is kept for interface symmetry.
[[nodiscard]] PropernessReport is_proper(const SystemShape& shape, ConstraintMode mode = ConstraintMode::strict_per_rru);

/// Three-way label used by the properness table.
enum class FeasibilityClass { infeasible, feasible_unconstrained_only, strictly_feasible };

[[nodiscard]] FeasibilityClass classify(const PropernessReport& report);
[[nodiscard]] const char* to_string(FeasibilityClass c);

}  // namespace iadas

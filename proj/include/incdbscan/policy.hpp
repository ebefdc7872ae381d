#pragma once

// Delta-change bookkeeping and the rerun decision.

#include "incdbscan/model.hpp"

#include <cstddef>
#include <string_view>

namespace incdbscan {

/// Added points as a percentage of the original size. Throws when the
/// original size is 0, since there is no baseline to compare against.
inline double delta_percent(std::size_t old_size, std::size_t added)
{
    if (old_size == 0)
        throw InvalidInput("delta change is undefined for an empty original dataset");
    return static_cast<double>(added) / static_cast<double>(old_size) * 100.0;
}

struct DeltaStats {
    std::size_t old_size = 0;
    std::size_t added = 0;
    double delta_percent = 0.0;

    static DeltaStats of(std::size_t old_size, std::size_t added)
    {
        return {old_size, added, incdbscan::delta_percent(old_size, added)};
    }
};

struct RerunPolicy {
    double threshold_x = 10.0;
};

enum class Decision { use_incremental, rerun_full };

inline std::string_view to_string(Decision d) noexcept
{
    return d == Decision::use_incremental ? "use_incremental" : "rerun_full";
}

/// A change of exactly threshold_x still keeps the incremental result.
inline Decision should_rerun(const DeltaStats& stats, const RerunPolicy& policy) noexcept
{
    return stats.delta_percent > policy.threshold_x ? Decision::rerun_full : Decision::use_incremental;
}

} // namespace incdbscan

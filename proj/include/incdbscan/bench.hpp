#pragma once

// Full-rerun (T1) versus incremental-update (T2) timing, the Rand-index
// agreement between the two results, and the delta sweep that locates the
// crossover threshold.

#include "incdbscan/batch.hpp"
#include "incdbscan/incremental.hpp"
#include "incdbscan/model.hpp"
#include "incdbscan/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace incdbscan {

/// Point id -> cluster id, with 0 marking noise.
using Labeling = std::map<PointId, ClusterId>;
inline constexpr ClusterId noise_label = 0;

inline Labeling labeling_of(const ClusterModel& model)
{
    Labeling out;
    for (PointId id : model.outliers)
        out.emplace(id, noise_label);
    for (const auto& [cid, c] : model.clusters) {
        for (PointId id : c.members)
            out.emplace(id, cid);
    }
    return out;
}

enum class NoiseHandling {
    singletons, ///< each noise point is its own group
    ignore,     ///< drop points that are noise in either labeling
};

/// Fraction of unordered point pairs on which the two labelings agree
/// (together in both, or apart in both). 1.0 for fewer than two points.
inline double rand_index(const Labeling& a, const Labeling& b, NoiseHandling noise = NoiseHandling::singletons)
{
    if (a.size() != b.size())
        throw InvalidInput("rand index: labelings cover different point sets");
    struct PairHash {
        std::size_t operator()(const std::pair<ClusterId, ClusterId>& k) const noexcept
        {
            return std::hash<ClusterId>{}(k.first) * 1000003u ^ std::hash<ClusterId>{}(k.second);
        }
    };
    std::unordered_map<ClusterId, std::uint64_t> rows, cols;
    std::unordered_map<std::pair<ClusterId, ClusterId>, std::uint64_t, PairHash> cells;
    std::uint64_t n = 0;
    // Noise singletons get fresh negative labels so they never share a group.
    ClusterId fresh = -1;
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first)
            throw InvalidInput("rand index: labelings cover different point sets");
        ClusterId la = ia->second;
        ClusterId lb = ib->second;
        if (la == noise_label || lb == noise_label) {
            if (noise == NoiseHandling::ignore)
                continue;
            if (la == noise_label)
                la = fresh--;
            if (lb == noise_label)
                lb = fresh--;
        }
        ++rows[la];
        ++cols[lb];
        ++cells[{la, lb}];
        ++n;
    }
    if (n < 2)
        return 1.0;
    auto pairs = [](std::uint64_t k) { return static_cast<double>(k) * static_cast<double>(k - 1) / 2.0; };
    double together_both = 0.0, together_a = 0.0, together_b = 0.0;
    for (const auto& [k, v] : cells)
        together_both += pairs(v);
    for (const auto& [k, v] : rows)
        together_a += pairs(v);
    for (const auto& [k, v] : cols)
        together_b += pairs(v);
    const double total = pairs(n);
    const double agree = total + 2.0 * together_both - together_a - together_b;
    return std::clamp(agree / total, 0.0, 1.0);
}

struct TrialResult {
    double delta_fraction = 0.0;
    std::size_t added = 0;
    double t1 = 0.0; ///< seconds, median full dbscan on base + additions
    double t2 = 0.0; ///< seconds, median batch_insert into the stored model
    double speedup = 0.0;
    double agreement = 1.0;
};

struct BenchReport {
    std::vector<TrialResult> trials;
    /// Percent; smallest measured delta with t2 >= t1.
    std::optional<double> crossover_x;
    /// Percent; largest measured delta with agreement >= floor and t2 < t1.
    std::optional<double> recommended_x;
    double agreement_floor = 0.95;
};

namespace detail {

using bench_clock = std::chrono::steady_clock;

// Floor keeps t1, t2 and the speedup finite for no-op trials.
inline constexpr double min_timing = 1e-9;

inline double seconds_since(bench_clock::time_point start)
{
    const std::chrono::duration<double> d = bench_clock::now() - start;
    return std::max(d.count(), min_timing);
}

inline double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

} // namespace detail

/// Times a full rerun against an incremental update of `stored` (the model of
/// `base`). Dataset assembly and model copies happen outside the timers.
inline TrialResult run_trial(const Dataset& base, const ClusterModel& stored, const Dataset& additions,
                             const Params& params, std::size_t repeats = 5)
{
    if (repeats < 1)
        throw InvalidInput("repeats must be at least 1");
    if (!base.empty() && !additions.empty() && base.dimension() != additions.dimension())
        throw InvalidInput("additions have dimension " + std::to_string(additions.dimension()) + ", base has " +
                           std::to_string(base.dimension()));
    std::unordered_set<PointId> base_ids;
    for (const auto& p : base)
        base_ids.insert(p.id);
    for (const auto& p : additions) {
        if (base_ids.contains(p.id))
            throw InvalidInput("addition id " + std::to_string(p.id) + " collides with a base point");
    }

    std::vector<Point> all(base.points());
    all.insert(all.end(), additions.begin(), additions.end());
    const Dataset combined = validate_dataset(std::move(all));
    const std::span<const Point> added(additions.points());

    std::vector<double> t1s, t2s;
    std::optional<ClusterModel> full, incremental;
    for (std::size_t r = 0; r < repeats; ++r) {
        auto start = detail::bench_clock::now();
        ClusterModel rerun = dbscan(combined, params);
        t1s.push_back(detail::seconds_since(start));

        ClusterModel working = stored;
        working.params = params;
        start = detail::bench_clock::now();
        batch_insert(working, added);
        t2s.push_back(detail::seconds_since(start));

        if (!full) {
            full = std::move(rerun);
            incremental = std::move(working);
        }
    }

    TrialResult tr;
    tr.delta_fraction = base.empty() ? 0.0 : static_cast<double>(additions.size()) / static_cast<double>(base.size());
    tr.added = additions.size();
    tr.t1 = detail::median(t1s);
    tr.t2 = detail::median(t2s);
    tr.speedup = tr.t1 / tr.t2;
    tr.agreement = rand_index(labeling_of(*incremental), labeling_of(*full));
    return tr;
}

inline TrialResult run_trial(const Dataset& base, const Dataset& additions, const Params& params,
                             std::size_t repeats = 5)
{
    const ClusterModel stored = dbscan(base, params);
    return run_trial(base, stored, additions, params, repeats);
}

/// Recomputes crossover_x and recommended_x from the trials.
inline void summarize(BenchReport& report)
{
    report.crossover_x.reset();
    report.recommended_x.reset();
    for (const auto& t : report.trials) {
        const double pct = t.delta_fraction * 100.0;
        if (!report.crossover_x && t.t2 >= t.t1)
            report.crossover_x = pct;
        if (t.agreement >= report.agreement_floor && t.t2 < t.t1)
            report.recommended_x = pct;
    }
}

/// How sweep draws its additions: Gaussian samples around centers (by default
/// the base model's core points) mixed with uniform noise over the base's
/// bounding box.
struct AdditionSpec {
    std::uint64_t seed = 1;
    double noise_fraction = 0.1;
    /// Per-coordinate standard deviation; defaults to eps / 2.
    std::optional<double> spread;
    /// Overrides the default centers when non-empty.
    std::vector<std::vector<double>> centers;
};

/// Draws `count` additions with ids starting at `first_id`.
inline std::vector<Point> draw_additions(const Dataset& base, const ClusterModel& stored, const AdditionSpec& spec,
                                         const Params& params, std::size_t count, PointId first_id)
{
    const std::size_t dim = base.dimension();
    std::vector<std::vector<double>> centers = spec.centers;
    for (const auto& c : centers) {
        if (c.size() != dim)
            throw InvalidInput("addition center has dimension " + std::to_string(c.size()) + ", base has " +
                               std::to_string(dim));
    }
    if (centers.empty()) {
        for (const auto& [cid, c] : stored.clusters) {
            for (PointId core : c.cores)
                centers.push_back(stored.point(core).coords);
        }
    }
    if (spec.noise_fraction < 0.0 || spec.noise_fraction > 1.0)
        throw InvalidInput("noise fraction must lie in [0, 1]");

    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& p : base) {
        for (std::size_t k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], p.coords[k]);
            hi[k] = std::max(hi[k], p.coords[k]);
        }
    }

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, spec.spread.value_or(params.eps / 2.0));
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Point p{first_id + i, std::vector<double>(dim)};
        if (centers.empty() || unit(rng) < spec.noise_fraction) {
            for (std::size_t k = 0; k < dim; ++k)
                p.coords[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
        } else {
            const auto& c = centers[static_cast<std::size_t>(unit(rng) * static_cast<double>(centers.size())) %
                                    centers.size()];
            for (std::size_t k = 0; k < dim; ++k)
                p.coords[k] = c[k] + gauss(rng);
        }
        out.push_back(std::move(p));
    }
    return out;
}

/// One trial per delta fraction, additions taken as growing prefixes of a
/// single seeded stream.
inline BenchReport sweep(const Dataset& base, const AdditionSpec& spec, const Params& params,
                         const std::vector<double>& deltas, std::size_t repeats = 5, double agreement_floor = 0.95)
{
    params.validate();
    if (base.empty())
        throw InvalidInput("sweep needs a non-empty base dataset");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] <= 1.0))
            throw InvalidInput("delta fractions must lie in (0, 1]");
        if (i > 0 && deltas[i] < deltas[i - 1])
            throw InvalidInput("delta fractions must be sorted ascending");
    }

    const ClusterModel stored = dbscan(base, params);
    PointId first_id = 0;
    for (const auto& p : base)
        first_id = std::max(first_id, p.id + 1);

    auto count_for = [&](double f) {
        return static_cast<std::size_t>(std::llround(f * static_cast<double>(base.size())));
    };
    const std::size_t max_count = deltas.empty() ? 0 : count_for(deltas.back());
    const std::vector<Point> stream = draw_additions(base, stored, spec, params, max_count, first_id);

    BenchReport report;
    report.agreement_floor = agreement_floor;
    for (double f : deltas) {
        const std::size_t k = count_for(f);
        const Dataset additions = validate_dataset(std::vector<Point>(stream.begin(), stream.begin() + k));
        TrialResult tr = run_trial(base, stored, additions, params, repeats);
        tr.delta_fraction = f;
        report.trials.push_back(tr);
    }
    summarize(report);
    return report;
}

/// Report rows as `delta_percent,t1_seconds,t2_seconds,speedup,rand_index`
/// followed by `#` lines for the crossover and recommended thresholds.
inline void write_report_csv(std::ostream& os, const BenchReport& report)
{
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << "delta_percent,t1_seconds,t2_seconds,speedup,rand_index\n";
    for (const auto& t : report.trials) {
        os << std::setprecision(12) << t.delta_fraction * 100.0 << ',' << std::setprecision(9) << t.t1 << ','
           << t.t2 << ',' << t.speedup << ',' << t.agreement << '\n';
    }
    os << std::setprecision(12);
    os << "# crossover_x=";
    if (report.crossover_x)
        os << *report.crossover_x;
    else
        os << "none";
    os << "\n# recommended_x=";
    if (report.recommended_x)
        os << *report.recommended_x;
    else
        os << "none";
    os << "\n# agreement_floor=" << report.agreement_floor << '\n';
    os.flags(flags);
    os.precision(prec);
}

} // namespace incdbscan

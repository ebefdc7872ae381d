#pragma once

// Domain types shared by the batch and incremental engines: points, datasets,
// clustering parameters, distance metrics and the cluster model.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace incdbscan {

using PointId = std::uint64_t;
using ClusterId = std::int64_t;

/// Raised for malformed inputs: dimension mismatches, duplicate ids,
/// non-finite coordinates, bad parameters.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Point {
    PointId id{};
    std::vector<double> coords;

    std::size_t dimension() const noexcept { return coords.size(); }
    friend bool operator==(const Point&, const Point&) = default;
};

enum class Metric { manhattan, euclidean };
enum class OutlierRule { count_only, density };

inline std::string_view to_string(Metric m) noexcept
{
    return m == Metric::manhattan ? "manhattan" : "euclidean";
}

inline std::string_view to_string(OutlierRule r) noexcept
{
    return r == OutlierRule::count_only ? "count_only" : "density";
}

inline Metric parse_metric(std::string_view s)
{
    if (s == "manhattan")
        return Metric::manhattan;
    if (s == "euclidean")
        return Metric::euclidean;
    throw InvalidInput("unknown metric '" + std::string(s) + "'");
}

inline OutlierRule parse_outlier_rule(std::string_view s)
{
    if (s == "count_only")
        return OutlierRule::count_only;
    if (s == "density")
        return OutlierRule::density;
    throw InvalidInput("unknown outlier rule '" + std::string(s) + "'");
}

struct Params {
    double eps = 0.0;
    std::size_t min_pts = 1;
    Metric metric = Metric::manhattan;
    OutlierRule outlier_rule = OutlierRule::count_only;

    void validate() const
    {
        if (!(eps >= 0.0) || !std::isfinite(eps))
            throw InvalidInput("eps must be a finite non-negative number");
        if (min_pts < 1)
            throw InvalidInput("min_pts must be at least 1");
    }

    friend bool operator==(const Params&, const Params&) = default;
};

/// Unchecked distance over raw coordinate spans of equal length.
inline double distance(std::span<const double> a, std::span<const double> b, Metric metric) noexcept
{
    double acc = 0.0;
    if (metric == Metric::manhattan) {
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::abs(a[i] - b[i]);
        return acc;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline double distance(const Point& a, const Point& b, Metric metric)
{
    if (a.dimension() != b.dimension()) {
        std::ostringstream os;
        os << "dimension mismatch: point " << a.id << " has " << a.dimension() << " coordinates, point "
           << b.id << " has " << b.dimension();
        throw InvalidInput(os.str());
    }
    return distance(std::span<const double>(a.coords), std::span<const double>(b.coords), metric);
}

inline void check_finite(const Point& p)
{
    for (double c : p.coords) {
        if (!std::isfinite(c))
            throw InvalidInput("point " + std::to_string(p.id) + " has a non-finite coordinate");
    }
}

/// Validated, ordered point collection of uniform dimension. Iteration order
/// is load order.
class Dataset {
public:
    Dataset() = default;

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    /// 0 for an empty dataset.
    std::size_t dimension() const noexcept { return dimension_; }

    const Point& operator[](std::size_t i) const { return points_[i]; }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }
    const std::vector<Point>& points() const noexcept { return points_; }

    friend Dataset validate_dataset(std::vector<Point> points);

private:
    std::vector<Point> points_;
    std::size_t dimension_ = 0;
};

inline Dataset validate_dataset(std::vector<Point> points)
{
    Dataset ds;
    std::unordered_set<PointId> seen;
    seen.reserve(points.size());
    for (const auto& p : points) {
        if (p.coords.empty())
            throw InvalidInput("point " + std::to_string(p.id) + " has no coordinates");
        check_finite(p);
        if (!seen.insert(p.id).second)
            throw InvalidInput("duplicate point id " + std::to_string(p.id));
        if (ds.dimension_ == 0) {
            ds.dimension_ = p.dimension();
        } else if (p.dimension() != ds.dimension_) {
            std::ostringstream os;
            os << "point " << p.id << " has dimension " << p.dimension() << ", expected " << ds.dimension_;
            throw InvalidInput(os.str());
        }
    }
    ds.points_ = std::move(points);
    return ds;
}

struct Cluster {
    ClusterId id = 0;
    std::set<PointId> members;
    std::set<PointId> cores;

    std::size_t size() const noexcept { return members.size(); }
    friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// Clusters, the outlier pool and the registry of every known point.
///
/// Every registered point lives in exactly one cluster or in the outlier
/// pool. `find_violation` checks this together with the structural rules
/// (cores within members, unique ids, next_cluster_id above all ids).
struct ClusterModel {
    Params params;
    std::map<ClusterId, Cluster> clusters;
    std::set<PointId> outliers;
    std::map<PointId, Point> points;
    ClusterId next_cluster_id = 1;

    /// 0 while the registry is empty.
    std::size_t dimension() const noexcept
    {
        return points.empty() ? 0 : points.begin()->second.dimension();
    }

    const Point& point(PointId id) const
    {
        auto it = points.find(id);
        if (it == points.end())
            throw InvalidInput("unknown point id " + std::to_string(id));
        return it->second;
    }

    /// Cluster owning `id`, or nullopt when the point is pooled or unknown.
    std::optional<ClusterId> cluster_of(PointId id) const
    {
        for (const auto& [cid, c] : clusters) {
            if (c.members.contains(id))
                return cid;
        }
        return std::nullopt;
    }

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

inline std::optional<std::string> find_violation(const ClusterModel& model)
{
    std::ostringstream os;
    std::map<PointId, int> homes;
    std::size_t dim = 0;
    for (const auto& [id, p] : model.points) {
        if (p.id != id) {
            os << "registry key " << id << " holds point " << p.id;
            return os.str();
        }
        if (p.coords.empty()) {
            os << "point " << id << " has no coordinates";
            return os.str();
        }
        for (double c : p.coords) {
            if (!std::isfinite(c)) {
                os << "point " << id << " has a non-finite coordinate";
                return os.str();
            }
        }
        if (dim == 0)
            dim = p.dimension();
        else if (p.dimension() != dim) {
            os << "point " << id << " has dimension " << p.dimension() << ", expected " << dim;
            return os.str();
        }
        homes[id] = 0;
    }
    auto claim = [&](PointId id, const char* where) -> bool {
        auto it = homes.find(id);
        if (it == homes.end()) {
            os << "point " << id << " in " << where << " is not registered";
            return false;
        }
        if (++it->second > 1) {
            os << "point " << id << " has more than one home";
            return false;
        }
        return true;
    };
    for (const auto& [cid, c] : model.clusters) {
        if (c.id != cid) {
            os << "cluster key " << cid << " holds cluster " << c.id;
            return os.str();
        }
        if (cid < 1) {
            os << "cluster id " << cid << " is below 1";
            return os.str();
        }
        if (cid >= model.next_cluster_id) {
            os << "cluster id " << cid << " is not below next_cluster_id " << model.next_cluster_id;
            return os.str();
        }
        if (c.members.empty()) {
            os << "cluster " << cid << " has no members";
            return os.str();
        }
        for (PointId core : c.cores) {
            if (!c.members.contains(core)) {
                os << "core " << core << " of cluster " << cid << " is not a member";
                return os.str();
            }
        }
        for (PointId m : c.members) {
            if (!claim(m, "a cluster"))
                return os.str();
        }
    }
    for (PointId o : model.outliers) {
        if (!claim(o, "the outlier pool"))
            return os.str();
    }
    for (const auto& [id, n] : homes) {
        if (n == 0) {
            os << "point " << id << " has no home";
            return os.str();
        }
    }
    return std::nullopt;
}

inline void check_invariants(const ClusterModel& model)
{
    if (auto v = find_violation(model))
        throw InvalidInput("invalid cluster model: " + *v);
}

} // namespace incdbscan

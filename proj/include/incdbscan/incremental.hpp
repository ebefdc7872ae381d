#pragma once

// Incremental insertion into an existing ClusterModel. An arriving point joins
// the cluster of its nearest core object when that core lies within eps and
// the cluster already has at least min_pts members; otherwise it is pooled as
// an outlier, and the pool may turn into new clusters.
//
// Existing points are never relabelled. Only the inserted point's own core
// status is computed, against the full registry.

#include "incdbscan/batch.hpp"
#include "incdbscan/model.hpp"

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace incdbscan {

struct CoreHit {
    ClusterId cluster_id = 0;
    PointId core_id = 0;
    double distance = 0.0;

    friend bool operator==(const CoreHit&, const CoreHit&) = default;
};

struct Assigned {
    ClusterId cluster_id = 0;
    PointId nearest_core_id = 0;
    double distance = 0.0;

    friend bool operator==(const Assigned&, const Assigned&) = default;
};

struct PooledOutlier {
    friend bool operator==(const PooledOutlier&, const PooledOutlier&) = default;
};

/// Reported when the pool formation rule fired during an insert. If several
/// clusters formed at once, this names the one holding the inserted point,
/// or the lowest new id if the point stayed in the pool.
struct NewClusterFormed {
    ClusterId cluster_id = 0;
    std::set<PointId> members;

    friend bool operator==(const NewClusterFormed&, const NewClusterFormed&) = default;
};

using InsertOutcome = std::variant<Assigned, PooledOutlier, NewClusterFormed>;

namespace detail {

inline void require_dimension(const ClusterModel& model, const Point& p)
{
    const std::size_t d = model.dimension();
    if (d != 0 && p.dimension() != d)
        throw InvalidInput("point " + std::to_string(p.id) + " has dimension " + std::to_string(p.dimension()) +
                           ", model has " + std::to_string(d));
}

} // namespace detail

/// Closest core of each cluster, in cluster id order. Clusters without cores
/// are skipped. Ties go to the lower core id.
inline std::vector<CoreHit> nearest_core_per_cluster(const ClusterModel& model, const Point& p)
{
    detail::require_dimension(model, p);
    std::vector<CoreHit> hits;
    const std::span<const double> pc(p.coords);
    for (const auto& [cid, c] : model.clusters) {
        std::optional<CoreHit> best;
        for (PointId core : c.cores) {
            const double d = distance(std::span<const double>(model.point(core).coords), pc, model.params.metric);
            if (!best || d < best->distance)
                best = CoreHit{cid, core, d};
        }
        if (best)
            hits.push_back(*best);
    }
    return hits;
}

/// Globally nearest core object. Ties: lower distance, then lower cluster id,
/// then lower core id.
inline std::optional<CoreHit> nearest_core(const ClusterModel& model, const Point& p)
{
    std::optional<CoreHit> best;
    for (const auto& hit : nearest_core_per_cluster(model, p)) {
        if (!best || hit.distance < best->distance)
            best = hit;
    }
    return best;
}

/// Applies the outlier-pool formation rule once. Returns the ids of the
/// clusters created, ascending; empty when the rule did not fire.
inline std::vector<ClusterId> form_clusters_from_pool(ClusterModel& model)
{
    std::vector<ClusterId> formed;
    const Params& params = model.params;
    if (model.outliers.size() < params.min_pts)
        return formed;

    if (params.outlier_rule == OutlierRule::count_only) {
        Cluster c;
        c.id = model.next_cluster_id++;
        c.members = model.outliers;
        c.cores = model.outliers;
        model.outliers.clear();
        formed.push_back(c.id);
        model.clusters.emplace(c.id, std::move(c));
        return formed;
    }

    std::vector<Point> pool;
    pool.reserve(model.outliers.size());
    for (PointId id : model.outliers)
        pool.push_back(model.point(id));
    const ClusterModel local = dbscan(validate_dataset(std::move(pool)), params);
    for (const auto& [local_id, lc] : local.clusters) {
        Cluster c;
        c.id = model.next_cluster_id++;
        c.members = lc.members;
        c.cores = lc.cores;
        for (PointId id : c.members)
            model.outliers.erase(id);
        formed.push_back(c.id);
        model.clusters.emplace(c.id, std::move(c));
    }
    return formed;
}

/// Value-returning form: the new model and the first formed cluster id, if any.
inline std::pair<ClusterModel, std::optional<ClusterId>> form_cluster_from_pool(ClusterModel model)
{
    auto formed = form_clusters_from_pool(model);
    std::optional<ClusterId> first;
    if (!formed.empty())
        first = formed.front();
    return {std::move(model), first};
}

namespace detail {

inline bool closer(const CoreHit& a, const CoreHit& b) noexcept
{
    if (a.distance != b.distance)
        return a.distance < b.distance;
    if (a.cluster_id != b.cluster_id)
        return a.cluster_id < b.cluster_id;
    return a.core_id < b.core_id;
}

} // namespace detail

/// Runs a stream of inserts against one model, keeping flat copies of the
/// core and registry coordinates so each insert is a pair of linear scans
/// instead of a walk through the model's node-based containers.
///
/// The model must not be modified by anything else while an Inserter is live.
class Inserter {
public:
    explicit Inserter(ClusterModel& model) : model_(model), dim_(model.dimension())
    {
        registry_.reserve(model.points.size() * dim_);
        for (const auto& [id, p] : model.points)
            registry_.insert(registry_.end(), p.coords.begin(), p.coords.end());
        for (const auto& [cid, c] : model.clusters)
            add_cores(c);
        load_pool();
    }

    /// On error the model is left untouched.
    InsertOutcome insert(const Point& p)
    {
        if (p.coords.empty())
            throw InvalidInput("point " + std::to_string(p.id) + " has no coordinates");
        check_finite(p);
        detail::require_dimension(model_, p);
        if (model_.points.contains(p.id))
            throw InvalidInput("duplicate point id " + std::to_string(p.id));
        if (dim_ == 0)
            dim_ = p.dimension();

        const Params& params = model_.params;
        const std::span<const double> pc(p.coords);
        std::optional<CoreHit> hit;
        for (std::size_t i = 0; i < cores_.size(); ++i) {
            const CoreHit h{cores_[i].first, cores_[i].second, distance(core_row(i), pc, params.metric)};
            if (!hit || detail::closer(h, *hit))
                hit = h;
        }

        model_.points.emplace(p.id, p);
        registry_.insert(registry_.end(), p.coords.begin(), p.coords.end());

        if (hit && hit->distance <= params.eps && model_.clusters.at(hit->cluster_id).size() >= params.min_pts) {
            auto& cluster = model_.clusters.at(hit->cluster_id);
            cluster.members.insert(p.id);
            if (neighborhood_reaches(pc, params)) {
                cluster.cores.insert(p.id);
                cores_.emplace_back(cluster.id, p.id);
                core_coords_.insert(core_coords_.end(), p.coords.begin(), p.coords.end());
            }
            return Assigned{hit->cluster_id, hit->core_id, hit->distance};
        }

        model_.outliers.insert(p.id);
        pool_.insert(pool_.end(), p.coords.begin(), p.coords.end());
        if (params.outlier_rule == OutlierRule::density && pool_settled_ && !pool_may_form(params))
            return PooledOutlier{};
        const auto formed = form_clusters_from_pool(model_);
        pool_settled_ = true;
        if (formed.empty())
            return PooledOutlier{};
        for (ClusterId cid : formed)
            add_cores(model_.clusters.at(cid));
        load_pool();
        ClusterId reported = formed.front();
        for (ClusterId cid : formed) {
            if (model_.clusters.at(cid).members.contains(p.id)) {
                reported = cid;
                break;
            }
        }
        return NewClusterFormed{reported, model_.clusters.at(reported).members};
    }

private:
    std::span<const double> core_row(std::size_t i) const noexcept
    {
        return {core_coords_.data() + i * dim_, dim_};
    }

    void add_cores(const Cluster& c)
    {
        for (PointId core : c.cores) {
            cores_.emplace_back(c.id, core);
            const auto& coords = model_.point(core).coords;
            core_coords_.insert(core_coords_.end(), coords.begin(), coords.end());
        }
    }

    /// At least min_pts registered points (the new one included) within eps.
    bool neighborhood_reaches(std::span<const double> center, const Params& params) const noexcept
    {
        std::size_t within = 0;
        const std::size_t n = registry_.size() / dim_;
        for (std::size_t i = 0; i < n; ++i) {
            const std::span<const double> row(registry_.data() + i * dim_, dim_);
            if (distance(row, center, params.metric) <= params.eps && ++within >= params.min_pts)
                return true;
        }
        return false;
    }

    void load_pool()
    {
        pool_.clear();
        for (PointId id : model_.outliers) {
            const auto& coords = model_.point(id).coords;
            pool_.insert(pool_.end(), coords.begin(), coords.end());
        }
    }

    std::span<const double> pool_row(std::size_t i) const noexcept { return {pool_.data() + i * dim_, dim_}; }

    std::size_t pool_neighbors(std::size_t i, const Params& params) const noexcept
    {
        std::size_t within = 0;
        const std::size_t n = pool_.size() / dim_;
        for (std::size_t j = 0; j < n && within < params.min_pts; ++j)
            within += distance(pool_row(i), pool_row(j), params.metric) <= params.eps;
        return within;
    }

    /// Once the pool has been evaluated it holds no core, so the point just
    /// pooled (the last row) can only create cores at itself or its neighbors.
    bool pool_may_form(const Params& params) const noexcept
    {
        const std::size_t n = pool_.size() / dim_;
        const std::size_t last = n - 1;
        std::vector<std::size_t> near;
        for (std::size_t j = 0; j < n; ++j) {
            if (distance(pool_row(last), pool_row(j), params.metric) <= params.eps)
                near.push_back(j);
        }
        if (near.size() >= params.min_pts)
            return true;
        for (std::size_t j : near) {
            if (j != last && pool_neighbors(j, params) >= params.min_pts)
                return true;
        }
        return false;
    }

    ClusterModel& model_;
    std::size_t dim_;
    std::vector<double> pool_;
    bool pool_settled_ = false;
    std::vector<std::pair<ClusterId, PointId>> cores_;
    std::vector<double> core_coords_;
    std::vector<double> registry_;
};

/// In-place insert. On error the model is left untouched.
inline InsertOutcome insert(ClusterModel& model, const Point& p)
{
    return Inserter(model).insert(p);
}

/// Value-returning insert.
inline std::pair<ClusterModel, InsertOutcome> inserted(ClusterModel model, const Point& p)
{
    auto outcome = insert(model, p);
    return {std::move(model), std::move(outcome)};
}

/// Error from batch_insert: `applied` holds the outcomes of the points that
/// went in before `failed_index`; the model passed in keeps those insertions.
class BatchInsertError : public InvalidInput {
public:
    BatchInsertError(const std::string& what, std::size_t failed_index, std::vector<InsertOutcome> applied)
        : InvalidInput(what), failed_index_(failed_index), applied_(std::move(applied))
    {
    }

    std::size_t failed_index() const noexcept { return failed_index_; }
    const std::vector<InsertOutcome>& applied() const noexcept { return applied_; }

private:
    std::size_t failed_index_;
    std::vector<InsertOutcome> applied_;
};

/// Left fold of insert over `points`, outcomes in input order.
inline std::vector<InsertOutcome> batch_insert(ClusterModel& model, std::span<const Point> points)
{
    std::vector<InsertOutcome> outcomes;
    outcomes.reserve(points.size());
    Inserter inserter(model);
    for (std::size_t i = 0; i < points.size(); ++i) {
        try {
            outcomes.push_back(inserter.insert(points[i]));
        } catch (const InvalidInput& e) {
            throw BatchInsertError("point #" + std::to_string(i) + " (id " + std::to_string(points[i].id) +
                                       "): " + e.what(),
                                   i, std::move(outcomes));
        }
    }
    return outcomes;
}

} // namespace incdbscan

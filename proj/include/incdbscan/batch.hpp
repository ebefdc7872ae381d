#pragma once

// Batch DBSCAN over a Dataset. Region queries are linear scans.

#include "incdbscan/model.hpp"

#include <deque>
#include <map>
#include <set>
#include <span>
#include <vector>

namespace incdbscan {

enum class PointLabel { core, border, noise };

inline std::string_view to_string(PointLabel l) noexcept
{
    switch (l) {
    case PointLabel::core:
        return "core";
    case PointLabel::border:
        return "border";
    default:
        return "noise";
    }
}

namespace detail {

/// Row-major copy of a dataset's coordinates; keeps the scan loops on one
/// contiguous buffer.
class FlatCoords {
public:
    explicit FlatCoords(const Dataset& ds) : dim_(ds.dimension())
    {
        data_.reserve(ds.size() * dim_);
        for (const auto& p : ds)
            data_.insert(data_.end(), p.coords.begin(), p.coords.end());
    }

    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

    /// Indices i with distance(row(i), center) <= eps, ascending.
    void neighbors(std::span<const double> center, const Params& params, std::vector<std::size_t>& out) const
    {
        out.clear();
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            if (distance(row(i), center, params.metric) <= params.eps)
                out.push_back(i);
        }
    }

private:
    std::size_t dim_;
    std::vector<double> data_;
};

} // namespace detail

/// Ids of every dataset point within eps of `center` (inclusive).
inline std::set<PointId> region_query(const Dataset& dataset, const Point& center, const Params& params)
{
    std::set<PointId> out;
    if (dataset.empty())
        return out;
    if (center.dimension() != dataset.dimension())
        throw InvalidInput("region query center " + std::to_string(center.id) + " has dimension " +
                           std::to_string(center.dimension()) + ", dataset has " +
                           std::to_string(dataset.dimension()));
    for (const auto& p : dataset) {
        if (distance(std::span<const double>(p.coords), std::span<const double>(center.coords), params.metric) <=
            params.eps)
            out.insert(p.id);
    }
    return out;
}

inline std::map<PointId, PointLabel> label_points(const Dataset& dataset, const Params& params)
{
    params.validate();
    const detail::FlatCoords flat(dataset);
    const std::size_t n = flat.size();
    std::vector<bool> core(n, false);
    std::vector<std::size_t> nbrs;
    for (std::size_t i = 0; i < n; ++i) {
        flat.neighbors(flat.row(i), params, nbrs);
        core[i] = nbrs.size() >= params.min_pts;
    }
    std::map<PointId, PointLabel> labels;
    for (std::size_t i = 0; i < n; ++i) {
        PointLabel l = PointLabel::noise;
        if (core[i]) {
            l = PointLabel::core;
        } else {
            flat.neighbors(flat.row(i), params, nbrs);
            for (std::size_t j : nbrs) {
                if (core[j]) {
                    l = PointLabel::border;
                    break;
                }
            }
        }
        labels.emplace(dataset[i].id, l);
    }
    return labels;
}

/// Classic DBSCAN. Clusters are numbered 1, 2, ... in the order their first
/// core appears in the dataset; a border point reachable from several
/// clusters stays with the first one expanded. Noise goes to the outlier pool.
inline ClusterModel dbscan(const Dataset& dataset, const Params& params)
{
    params.validate();
    ClusterModel model;
    model.params = params;
    for (const auto& p : dataset)
        model.points.emplace(p.id, p);

    constexpr long unclassified = -1;
    constexpr long noise = 0;
    const detail::FlatCoords flat(dataset);
    const std::size_t n = flat.size();
    std::vector<long> label(n, unclassified);
    std::vector<bool> is_core(n, false);
    std::vector<std::size_t> nbrs;
    std::vector<std::size_t> q_nbrs;
    std::deque<std::size_t> frontier;
    long next = 1;

    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != unclassified)
            continue;
        flat.neighbors(flat.row(i), params, nbrs);
        if (nbrs.size() < params.min_pts) {
            label[i] = noise;
            continue;
        }
        const long cid = next++;
        label[i] = cid;
        is_core[i] = true;
        frontier.assign(nbrs.begin(), nbrs.end());
        while (!frontier.empty()) {
            const std::size_t q = frontier.front();
            frontier.pop_front();
            if (label[q] == noise) {
                label[q] = cid;
                continue;
            }
            if (label[q] != unclassified)
                continue;
            label[q] = cid;
            flat.neighbors(flat.row(q), params, q_nbrs);
            if (q_nbrs.size() >= params.min_pts) {
                is_core[q] = true;
                for (std::size_t r : q_nbrs) {
                    if (label[r] == unclassified || label[r] == noise)
                        frontier.push_back(r);
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const PointId id = dataset[i].id;
        if (label[i] == noise) {
            model.outliers.insert(id);
            continue;
        }
        auto& c = model.clusters[label[i]];
        c.id = label[i];
        c.members.insert(id);
        if (is_core[i])
            c.cores.insert(id);
    }
    model.next_cluster_id = next;
    return model;
}

} // namespace incdbscan

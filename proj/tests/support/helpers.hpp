#pragma once

#include "incdbscan/model.hpp"
#include "incdbscan/synth.hpp"

#include <random>
#include <set>
#include <vector>

namespace incdbscan::testkit {

/// Clusters as a set of member sets, plus the outlier pool; cluster ids ignored.
inline std::pair<std::set<std::set<PointId>>, std::set<PointId>> partition_shape(const ClusterModel& m)
{
    std::set<std::set<PointId>> groups;
    for (const auto& [cid, c] : m.clusters)
        groups.insert(c.members);
    return {groups, m.outliers};
}

inline bool same_partition(const ClusterModel& a, const ClusterModel& b)
{
    return partition_shape(a) == partition_shape(b);
}

inline std::set<PointId> all_cores(const ClusterModel& m)
{
    std::set<PointId> out;
    for (const auto& [cid, c] : m.clusters)
        out.insert(c.cores.begin(), c.cores.end());
    return out;
}

/// Mix of uniform scatter and Gaussian blobs, seeded.
inline Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t dim)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> blobs(0, 4);
    const int k = blobs(rng);
    std::vector<std::vector<double>> centers;
    for (int i = 0; i < k; ++i) {
        std::vector<double> c(dim);
        for (auto& x : c)
            x = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
        centers.push_back(c);
    }
    std::vector<Point> pts;
    if (k > 0)
        pts = synth::gaussian_blobs(centers, n / (2 * static_cast<std::size_t>(k)), 0.6, seed * 7 + 1);
    auto uni = synth::uniform_points(n - pts.size(), dim, 0.0, 10.0, seed * 13 + 5, pts.size() + 1);
    pts.insert(pts.end(), uni.begin(), uni.end());
    std::shuffle(pts.begin(), pts.end(), rng);
    return validate_dataset(std::move(pts));
}

/// Arbitrary model that satisfies the partition invariant, with awkward
/// coordinates (subnormals, huge magnitudes, negative zero) mixed in.
inline ClusterModel random_model(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto below = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    ClusterModel m;
    m.params.eps = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    m.params.min_pts = 1 + below(8);
    m.params.metric = below(2) ? Metric::euclidean : Metric::manhattan;
    m.params.outlier_rule = below(2) ? OutlierRule::density : OutlierRule::count_only;

    const std::size_t n = below(60);
    const std::size_t dim = 1 + below(4);
    const std::size_t groups = 1 + below(6);
    const double odd[] = {0.1, -0.0, 1e-310, 1.7976931348623157e308, -2.5e-17, 123456789.123456789};
    std::vector<ClusterId> ids;
    ClusterId cid = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        cid += 1 + static_cast<ClusterId>(below(3));
        ids.push_back(cid);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const PointId id = 1 + i * (1 + below(5)) + below(1000) * 1000;
        if (m.points.contains(id))
            continue;
        Point p{id, std::vector<double>(dim)};
        for (auto& c : p.coords)
            c = below(5) == 0 ? odd[below(6)] : std::normal_distribution<double>(0.0, 100.0)(rng);
        m.points.emplace(id, p);
        const std::size_t home = below(groups + 1);
        if (home == groups) {
            m.outliers.insert(id);
        } else {
            auto& c = m.clusters[ids[home]];
            c.id = ids[home];
            c.members.insert(id);
            if (below(2))
                c.cores.insert(id);
        }
    }
    m.next_cluster_id = cid + 1 + static_cast<ClusterId>(below(4));
    return m;
}

} // namespace incdbscan::testkit

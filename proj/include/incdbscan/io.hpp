#pragma once

// CSV point ingestion and cluster-model snapshots.
//
// CSV rows are `id,c1,...,cd`. Blank lines and lines starting with `#` are
// skipped; CRLF is accepted.
//
// Snapshots are JSON with a fixed key order (format_version first) and every
// collection sorted by id, so equal models serialize to identical bytes.

#include "incdbscan/model.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace incdbscan {

class ParseError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class SnapshotError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

inline constexpr int snapshot_format_version = 1;

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    s = trim(s);
    if (s.empty())
        return false;
    if constexpr (std::is_floating_point_v<T>) {
        if (s.front() == '+')
            s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace detail

inline Dataset parse_csv(std::istream& in)
{
    std::vector<Point> points;
    std::unordered_map<PointId, std::size_t> first_line;
    std::size_t dim = 0;
    std::string raw;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError("line " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (fields.size() < 2)
            throw fail("expected id followed by at least one coordinate");
        Point p;
        if (!detail::parse_number(fields[0], p.id))
            throw fail("invalid point id '" + std::string(detail::trim(fields[0])) + "'");
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double v = 0.0;
            if (!detail::parse_number(fields[k], v))
                throw fail("invalid coordinate '" + std::string(detail::trim(fields[k])) + "'");
            if (!std::isfinite(v))
                throw fail("non-finite coordinate for point " + std::to_string(p.id));
            p.coords.push_back(v);
        }
        if (dim == 0)
            dim = p.dimension();
        else if (p.dimension() != dim)
            throw fail("point " + std::to_string(p.id) + " has dimension " + std::to_string(p.dimension()) +
                       ", expected " + std::to_string(dim));
        if (auto [it, fresh] = first_line.emplace(p.id, line_no); !fresh)
            throw fail("duplicate point id " + std::to_string(p.id) + " (first seen on line " +
                       std::to_string(it->second) + ")");
        points.push_back(std::move(p));
    }
    return validate_dataset(std::move(points));
}

inline Dataset parse_csv(const std::string& text)
{
    std::istringstream in(text);
    return parse_csv(in);
}

inline Dataset load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open " + path.string());
    return parse_csv(in);
}

inline void write_csv(std::ostream& os, const Dataset& ds)
{
    os.precision(17);
    for (const auto& p : ds) {
        os << p.id;
        for (double c : p.coords)
            os << ',' << c;
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const ClusterModel& model)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["format_version"] = snapshot_format_version;
    j["params"] = ordered_json{{"eps", model.params.eps},
                               {"min_pts", model.params.min_pts},
                               {"metric", to_string(model.params.metric)},
                               {"outlier_rule", to_string(model.params.outlier_rule)}};
    j["next_cluster_id"] = model.next_cluster_id;
    ordered_json clusters = ordered_json::array();
    for (const auto& [cid, c] : model.clusters) {
        clusters.push_back(ordered_json{{"id", cid}, {"members", c.members}, {"cores", c.cores}});
    }
    j["clusters"] = std::move(clusters);
    j["outliers"] = model.outliers;
    ordered_json points = ordered_json::array();
    for (const auto& [id, p] : model.points)
        points.push_back(ordered_json{{"id", id}, {"coords", p.coords}});
    j["points"] = std::move(points);
    return j;
}

inline std::string serialize(const ClusterModel& model)
{
    return to_json(model).dump(1) + "\n";
}

namespace detail {

inline void require_keys(const nlohmann::ordered_json& obj, std::initializer_list<std::string_view> keys,
                         const std::string& where)
{
    if (!obj.is_object())
        throw SnapshotError(where + " must be an object");
    for (auto k : keys) {
        if (!obj.contains(std::string(k)))
            throw SnapshotError(where + " is missing '" + std::string(k) + "'");
    }
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (auto want : keys)
            known = known || k == want;
        if (!known)
            throw SnapshotError(where + " has unknown field '" + k + "'");
    }
}

template <typename T>
T get_as(const nlohmann::ordered_json& v, const std::string& what)
{
    if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number())
            throw SnapshotError(what + " must be a number");
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned())
            throw SnapshotError(what + " must be a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer())
            throw SnapshotError(what + " must be an integer");
    } else {
        if (!v.is_string())
            throw SnapshotError(what + " must be a string");
    }
    return v.get<T>();
}

inline std::set<PointId> id_set(const nlohmann::ordered_json& v, const std::string& what)
{
    if (!v.is_array())
        throw SnapshotError(what + " must be an array");
    std::set<PointId> out;
    for (const auto& e : v) {
        if (!out.insert(get_as<PointId>(e, what + " entry")).second)
            throw SnapshotError(what + " lists point " + std::to_string(e.get<PointId>()) + " twice");
    }
    return out;
}

} // namespace detail

inline ClusterModel from_json(const nlohmann::ordered_json& j)
{
    using detail::get_as;
    if (!j.is_object() || !j.contains("format_version"))
        throw SnapshotError("snapshot is missing 'format_version'");
    const auto version = get_as<std::int64_t>(j["format_version"], "format_version");
    if (version != snapshot_format_version)
        throw SnapshotError("unsupported format_version " + std::to_string(version) + " (expected " +
                            std::to_string(snapshot_format_version) + ")");
    detail::require_keys(j, {"format_version", "params", "next_cluster_id", "clusters", "outliers", "points"},
                         "snapshot");

    ClusterModel model;
    const auto& jp = j["params"];
    detail::require_keys(jp, {"eps", "min_pts", "metric", "outlier_rule"}, "params");
    try {
        model.params.eps = get_as<double>(jp["eps"], "params.eps");
        model.params.min_pts = get_as<std::size_t>(jp["min_pts"], "params.min_pts");
        model.params.metric = parse_metric(get_as<std::string>(jp["metric"], "params.metric"));
        model.params.outlier_rule = parse_outlier_rule(get_as<std::string>(jp["outlier_rule"], "params.outlier_rule"));
        model.params.validate();
    } catch (const SnapshotError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw SnapshotError(std::string("params: ") + e.what());
    }
    model.next_cluster_id = get_as<ClusterId>(j["next_cluster_id"], "next_cluster_id");

    if (!j["clusters"].is_array())
        throw SnapshotError("clusters must be an array");
    for (const auto& jc : j["clusters"]) {
        detail::require_keys(jc, {"id", "members", "cores"}, "cluster");
        Cluster c;
        c.id = get_as<ClusterId>(jc["id"], "cluster id");
        const std::string where = "cluster " + std::to_string(c.id);
        c.members = detail::id_set(jc["members"], where + " members");
        c.cores = detail::id_set(jc["cores"], where + " cores");
        if (!model.clusters.emplace(c.id, std::move(c)).second)
            throw SnapshotError("duplicate cluster id " + std::to_string(jc["id"].get<ClusterId>()));
    }
    model.outliers = detail::id_set(j["outliers"], "outliers");

    if (!j["points"].is_array())
        throw SnapshotError("points must be an array");
    for (const auto& jpt : j["points"]) {
        detail::require_keys(jpt, {"id", "coords"}, "point");
        Point p;
        p.id = get_as<PointId>(jpt["id"], "point id");
        const std::string where = "point " + std::to_string(p.id) + " coords";
        if (!jpt["coords"].is_array())
            throw SnapshotError(where + " must be an array");
        for (const auto& c : jpt["coords"])
            p.coords.push_back(get_as<double>(c, where));
        if (!model.points.emplace(p.id, p).second)
            throw SnapshotError("duplicate point id " + std::to_string(p.id));
    }

    if (auto v = find_violation(model))
        throw SnapshotError("partition violation: " + *v);
    return model;
}

inline ClusterModel deserialize(const std::string& text)
{
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SnapshotError(std::string("malformed snapshot: ") + e.what());
    }
    return from_json(j);
}

/// Writes to a sibling temporary file, then renames over `path`, so a reader
/// never sees a half-written snapshot.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InvalidInput("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out)
            throw InvalidInput("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InvalidInput("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline void save_model(const ClusterModel& model, const std::filesystem::path& path)
{
    check_invariants(model);
    write_file_atomic(path, serialize(model));
}

inline ClusterModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

} // namespace incdbscan

#include "meroloc/cli/document.hpp"

#include <charconv>
#include <cmath>

namespace meroloc::cli {

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

// Non-finite values become null so the document stays valid JSON.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
Json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>)
        return number_or_null(*v);
    else
        return *v;
}

}  // namespace

Json rectangle_to_json(const Rectangle& r) {
    const auto v = r.vertices();
    return {{"z0", complex_json(r.z0)},
            {"alpha", r.alpha},
            {"length", r.length},
            {"height", r.height},
            {"eps0", r.eps0},
            {"corners", Json::array({complex_json(v[Rectangle::A]), complex_json(v[Rectangle::C])})}};
}

Json root_to_json(const RootReport& root) {
    return {{"location", complex_json(root.location)},
            {"multiplicity", root.multiplicity},
            {"error_estimate", number_or_null(root.error_estimate)},
            {"region", root.region_path},
            {"kappa_sq", number_or_null(root.kappa_sq)},
            {"flagged", root.flagged}};
}

Json region_to_json(const RegionDiagnostics& node) {
    Json children = Json::array();
    for (const auto& c : node.children) children.push_back(region_to_json(c));
    return {{"path", node.path},
            {"rect", rectangle_to_json(node.rect)},
            {"work_rect", rectangle_to_json(node.work_rect)},
            {"depth", node.depth},
            {"status", std::string(to_string(node.status))},
            {"reason", node.reason},
            {"winding", optional_json(node.winding)},
            {"owned_winding", node.owned_winding},
            {"root_count", optional_json(node.root_count)},
            {"kappa_sq", optional_json(node.kappa_sq)},
            {"achieved_eps", optional_json(node.achieved_eps)},
            {"evaluations", node.evaluations},
            {"jitter_attempts", node.jitter_attempts},
            {"warnings", node.warnings},
            {"children", std::move(children)}};
}

std::string status_of(const SearchResult& result) {
    const auto open = result.unresolved();
    if (open.empty()) return "complete";
    for (const auto* n : open)
        if (n->status == RegionStatus::BoundaryRoot) return "boundary-root";
    return "partial";
}

Json result_document(const Job& job, const SearchResult& result, std::optional<double> wall_seconds) {
    Json roots = Json::array();
    for (const auto& r : result.roots) roots.push_back(root_to_json(r));
    Json unresolved = Json::array();
    for (const auto* n : result.unresolved())
        unresolved.push_back({{"path", n->path},
                              {"status", std::string(to_string(n->status))},
                              {"reason", n->reason},
                              {"rect", rectangle_to_json(n->rect)}});
    Json doc = {{"version", kVersion},
                {"job",
                 {{"description", job.description},
                  {"function", job.function},
                  {"region", job.region},
                  {"search", search_to_json(job.search)}}},
                {"status", status_of(result)},
                {"roots", std::move(roots)},
                {"unresolved", std::move(unresolved)},
                {"diagnostics", region_to_json(result.tree)},
                {"evaluations", result.evaluations}};
    if (wall_seconds) doc["timing"] = {{"wall_seconds", *wall_seconds}};
    return doc;
}

std::string dump(const Json& document) { return document.dump(2) + "\n"; }

std::string format_number(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace meroloc::cli

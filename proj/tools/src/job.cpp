#include "meroloc/cli/job.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace meroloc::cli {

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& where, const std::string& what) const {
        throw ConfigError(origin_ + ": " + (where.empty() ? "/" : where) + ": " + what);
    }

    void expect_object(const Json& j, const std::string& where) const {
        if (!j.is_object()) fail(where, "expected an object");
    }

    void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) const {
        expect_object(j, where);
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : j.items())
            if (!ok.count(key)) fail(where + "/" + key, "unknown key");
    }

    double number(const Json& j, const std::string& where) const {
        if (!j.is_number()) fail(where, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(where, "expected a finite number");
        return v;
    }

    long long integer(const Json& j, const std::string& where) const {
        if (!j.is_number_integer()) fail(where, "expected an integer");
        return j.get<long long>();
    }

    std::string string(const Json& j, const std::string& where) const {
        if (!j.is_string()) fail(where, "expected a string");
        return j.get<std::string>();
    }

    Complex complex(const Json& j, const std::string& where) const {
        if (!j.is_array() || j.size() != 2) fail(where, "expected [re, im]");
        return {number(j[0], where + "/0"), number(j[1], where + "/1")};
    }

    template <typename F>
    void optional(const Json& obj, const char* key, const std::string& where, F&& apply) const {
        if (obj.contains(key)) apply(obj.at(key), where + "/" + key);
    }

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
};

std::vector<RootSpec> read_roots(const Reader& r, const Json& j, const std::string& where) {
    if (!j.is_array()) r.fail(where, "expected an array");
    std::vector<RootSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = where + "/" + std::to_string(i);
        r.only_keys(j[i], at, {"location", "multiplicity"});
        if (!j[i].contains("location")) r.fail(at, "missing key \"location\"");
        RootSpec s;
        s.location = r.complex(j[i]["location"], at + "/location");
        r.optional(j[i], "multiplicity", at, [&](const Json& v, const std::string& w) {
            s.multiplicity = static_cast<int>(r.integer(v, w));
        });
        out.push_back(s);
    }
    return out;
}

Matrix3 read_matrix(const Reader& r, const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) r.fail(where, "expected a 3x3 array");
    Matrix3 m{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_array() || j[i].size() != 3) r.fail(where + "/" + std::to_string(i), "expected 3 entries");
        for (std::size_t k = 0; k < 3; ++k)
            m[i][k] = r.number(j[i][k], where + "/" + std::to_string(i) + "/" + std::to_string(k));
    }
    return m;
}

FunctionHandle build(const Reader& r, const Json& function) {
    const std::string where = "/function";
    r.expect_object(function, where);
    if (function.size() != 1) r.fail(where, "expected exactly one of rational, nlevp3, plasma_z, gyrokinetic, external");
    const auto& [kind, body] = *function.items().begin();
    const std::string at = where + "/" + kind;

    try {
        if (kind == "rational") {
            r.only_keys(body, at, {"zeros", "poles"});
            RationalSpec spec;
            r.optional(body, "zeros", at, [&](const Json& v, const std::string& w) { spec.zeros = read_roots(r, v, w); });
            r.optional(body, "poles", at, [&](const Json& v, const std::string& w) { spec.poles = read_roots(r, v, w); });
            return make_rational(spec);
        }
        if (kind == "nlevp3") {
            r.only_keys(body, at, {"a0", "a1", "a2"});
            Nlevp3Spec spec;
            for (const char* key : {"a0", "a1", "a2"})
                if (!body.contains(key)) r.fail(at, std::string("missing key \"") + key + "\"");
            spec.a0 = read_matrix(r, body["a0"], at + "/a0");
            spec.a1 = read_matrix(r, body["a1"], at + "/a1");
            spec.a2 = read_matrix(r, body["a2"], at + "/a2");
            return make_nlevp3(spec);
        }
        if (kind == "plasma_z") {
            r.only_keys(body, at, {});
            return make_plasma_z();
        }
        if (kind == "gyrokinetic") {
            r.only_keys(body, at, {"beta_i_perp", "b_i", "tau", "a_i", "a_e", "mass_ratio"});
            GyrokineticParams p;
            auto num = [&](const char* key, double& dst) {
                r.optional(body, key, at, [&](const Json& v, const std::string& w) { dst = r.number(v, w); });
            };
            num("beta_i_perp", p.beta_i_perp);
            num("b_i", p.b_i);
            num("tau", p.tau);
            num("a_i", p.a_i);
            num("a_e", p.a_e);
            num("mass_ratio", p.mass_ratio);
            return make_gyrokinetic(p);
        }
        if (kind == "external") {
            r.only_keys(body, at, {"command", "timeout_ms"});
            ExternalCommand cmd;
            if (!body.contains("command") || !body["command"].is_array() || body["command"].empty())
                r.fail(at + "/command", "expected a non-empty array of strings");
            for (std::size_t i = 0; i < body["command"].size(); ++i)
                cmd.argv.push_back(r.string(body["command"][i], at + "/command/" + std::to_string(i)));
            r.optional(body, "timeout_ms", at, [&](const Json& v, const std::string& w) {
                const auto ms = r.integer(v, w);
                if (ms <= 0) r.fail(w, "must be positive");
                cmd.timeout = std::chrono::milliseconds(ms);
            });
            return external_function(cmd);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        r.fail(at, e.what());
    }
    r.fail(at, "unknown function kind");
}

Rectangle read_region(const Reader& r, const Json& region, SearchConfig& search) {
    const std::string at = "/region";
    r.only_keys(region, at, {"corners", "alpha", "eps0"});
    if (!region.contains("corners") || !region["corners"].is_array() || region["corners"].size() != 2)
        r.fail(at + "/corners", "expected two corner points");
    const Complex c1 = r.complex(region["corners"][0], at + "/corners/0");
    const Complex c2 = r.complex(region["corners"][1], at + "/corners/1");
    double alpha = 0.0;
    r.optional(region, "alpha", at, [&](const Json& v, const std::string& w) { alpha = r.number(v, w); });
    r.optional(region, "eps0", at, [&](const Json& v, const std::string& w) { search.eps0 = r.number(v, w); });
    try {
        Rectangle rect = Rectangle::from_corners(c1, c2, alpha, search.eps0);
        rect.validate();
        return rect;
    } catch (const Error& e) {
        r.fail(at, e.what());
    }
}

void read_search(const Reader& r, const Json& s, SearchConfig& c, bool eps0_in_region) {
    const std::string at = "/search";
    r.only_keys(s, at, {"kappa_c", "eps_i", "eps0", "n_max_region", "max_depth", "jitter_fraction", "eval_budget",
                        "workers", "rank_tol"});
    if (eps0_in_region && s.contains("eps0")) r.fail(at + "/eps0", "eps0 is already given in /region");
    auto num = [&](const char* key, double& dst) {
        r.optional(s, key, at, [&](const Json& v, const std::string& w) { dst = r.number(v, w); });
    };
    auto positive_int = [&](const char* key, auto& dst) {
        r.optional(s, key, at, [&](const Json& v, const std::string& w) {
            const auto n = r.integer(v, w);
            if (n < 0) r.fail(w, "must be non-negative");
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(n);
        });
    };
    num("kappa_c", c.kappa_c_sq);
    num("eps_i", c.eps_i);
    num("eps0", c.eps0);
    positive_int("n_max_region", c.n_max_region);
    positive_int("max_depth", c.max_depth);
    num("jitter_fraction", c.jitter_fraction);
    positive_int("eval_budget", c.eval_budget);
    positive_int("workers", c.workers);
    r.optional(s, "rank_tol", at, [&](const Json& v, const std::string& w) { c.rank_tol = r.number(v, w); });
}

Json parse_document(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

Job read_job(const Reader& r, const Json& doc, std::initializer_list<const char*> extra_keys) {
    std::vector<const char*> keys{"description", "function", "region", "search", "output"};
    keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
    r.expect_object(doc, "");
    for (const auto& [key, value] : doc.items())
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
            r.fail("/" + key, "unknown key");
    for (const char* key : {"function", "region"})
        if (!doc.contains(key)) r.fail("", std::string("missing key \"") + key + "\"");

    Job job;
    job.origin = r.origin();
    r.optional(doc, "description", "", [&](const Json& v, const std::string& w) { job.description = r.string(v, w); });
    job.function = doc["function"];
    job.region = doc["region"];
    const bool eps0_in_region = job.region.is_object() && job.region.contains("eps0");
    if (doc.contains("search")) read_search(r, doc["search"], job.search, eps0_in_region);
    job.rect = read_region(r, job.region, job.search);
    r.optional(doc, "output", "", [&](const Json& v, const std::string& w) {
        r.only_keys(v, w, {"path", "timing"});
        r.optional(v, "path", w, [&](const Json& p, const std::string& pw) { job.output_path = r.string(p, pw); });
        r.optional(v, "timing", w, [&](const Json& t, const std::string& tw) {
            if (!t.is_boolean()) r.fail(tw, "expected true or false");
            job.timing = t.get<bool>();
        });
    });
    try {
        job.search.validate();
    } catch (const Error& e) {
        r.fail("/search", e.what());
    }
    (void)build(r, job.function);  // reject bad functions before any work starts
    return job;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Job parse_job(const std::string& text, const std::string& origin) {
    const Reader r(origin);
    return read_job(r, parse_document(text, origin), {});
}

Job load_job(const std::filesystem::path& path) { return parse_job(slurp(path), path.string()); }

ScanJob parse_scan_job(const std::string& text, const std::string& origin) {
    const Reader r(origin);
    const Json doc = parse_document(text, origin);
    ScanJob scan;
    scan.job = read_job(r, doc, {"sweep"});
    if (!doc.contains("sweep")) r.fail("", "missing key \"sweep\"");
    const Json& s = doc["sweep"];
    const std::string at = "/sweep";
    r.only_keys(s, at, {"parameter", "start", "stop", "step", "values"});
    if (!s.contains("parameter")) r.fail(at, "missing key \"parameter\"");
    auto& sw = scan.sweep;
    sw.parameter = r.string(s["parameter"], at + "/parameter");
    try {
        sw.pointer = Json::json_pointer(sw.parameter.starts_with("/") ? sw.parameter : "/gyrokinetic/" + sw.parameter);
    } catch (const Json::exception& e) {
        r.fail(at + "/parameter", e.what());
    }
    if (!scan.job.function.contains(sw.pointer) || !scan.job.function[sw.pointer].is_number())
        r.fail(at + "/parameter", "does not name a numeric field of /function");

    if (s.contains("values")) {
        if (s.contains("start") || s.contains("stop") || s.contains("step"))
            r.fail(at, "give either values or start/stop/step");
        if (!s["values"].is_array()) r.fail(at + "/values", "expected an array");
        for (std::size_t i = 0; i < s["values"].size(); ++i)
            sw.values.push_back(r.number(s["values"][i], at + "/values/" + std::to_string(i)));
    } else {
        for (const char* key : {"start", "stop", "step"})
            if (!s.contains(key)) r.fail(at, std::string("missing key \"") + key + "\"");
        const double start = r.number(s["start"], at + "/start");
        const double stop = r.number(s["stop"], at + "/stop");
        const double step = r.number(s["step"], at + "/step");
        if (step <= 0.0) r.fail(at + "/step", "must be positive");
        const double slack = 1e-9 * step;
        for (long k = 0;; ++k) {
            const double v = start + static_cast<double>(k) * step;
            if (v > stop + slack) break;
            sw.values.push_back(v);
            if (k > 1000000) r.fail(at, "too many sweep points");
        }
    }
    if (sw.values.empty()) r.fail(at, "empty sweep range");
    for (double v : sw.values) {
        Json f = scan.job.function;
        f[sw.pointer] = v;
        (void)build(r, f);
    }
    return scan;
}

ScanJob load_scan_job(const std::filesystem::path& path) { return parse_scan_job(slurp(path), path.string()); }

void apply(Job& job, const Overrides& o) {
    if (o.kappa_c) job.search.kappa_c_sq = *o.kappa_c;
    if (o.eps_i) job.search.eps_i = *o.eps_i;
    if (o.eps0) job.search.eps0 = *o.eps0;
    if (o.max_depth) job.search.max_depth = *o.max_depth;
    if (o.workers) job.search.workers = *o.workers;
    if (o.rank_tol) job.search.rank_tol = *o.rank_tol;
    job.rect.eps0 = job.search.eps0;
    try {
        job.search.validate();
        job.rect.validate();
    } catch (const Error& e) {
        throw ConfigError(job.origin + ": command-line override: " + e.what());
    }
}

FunctionHandle make_handle(const Json& function, const std::string& origin) { return build(Reader(origin), function); }

Json search_to_json(const SearchConfig& c) {
    Json j = {{"kappa_c", c.kappa_c_sq},
              {"eps_i", c.eps_i},
              {"eps0", c.eps0},
              {"n_max_region", c.n_max_region},
              {"max_depth", c.max_depth},
              {"jitter_fraction", c.jitter_fraction},
              {"eval_budget", c.eval_budget}};
    j["rank_tol"] = c.rank_tol ? Json(*c.rank_tol) : Json(nullptr);
    return j;
}

}  // namespace meroloc::cli

#include "meroloc/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "meroloc/cli/document.hpp"

namespace meroloc::cli {

namespace {

bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "meroloc: cannot write " << path << "\n";
        return false;
    }
    f << text;
    f.close();
    if (!f) {
        err << "meroloc: error writing " << path << "\n";
        return false;
    }
    return true;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--kappa-c", o.kappa_c, "Critical squared condition number (default 128)");
    cmd->add_option("--eps-i", o.eps_i, "Absolute tolerance of the contour moments");
    cmd->add_option("--eps0", o.eps0, "Angular width of the annulus slot");
    cmd->add_option("--max-depth", o.max_depth, "Maximum subdivision depth");
    cmd->add_option("--workers", o.workers, "Worker threads");
    cmd->add_option("--rank-tol", o.rank_tol, "Absolute rank threshold for root counting");
}

}  // namespace

int run_locate(const LocateArgs& args, std::ostream& out, std::ostream& err) {
    Job job;
    FunctionHandle handle("unset", [](Complex) { return Complex(1.0); });
    try {
        job = load_job(args.config);
        apply(job, args.overrides);
        handle = make_handle(job.function, job.origin);
    } catch (const Error& e) {
        err << "meroloc: " << e.what() << "\n";
        return kFailure;
    }

    SearchResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
        result = locate_detailed(handle, job.rect, job.search);
    } catch (const Error& e) {
        err << "meroloc: " << job.origin << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
        return kFailure;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    const bool timing = job.timing && !args.no_timing;
    const std::string text =
        dump(result_document(job, result, timing ? std::optional<double>(elapsed.count()) : std::nullopt));
    const auto path = args.output ? args.output : job.output_path;
    if (path) {
        if (!write_text(*path, text, err)) return kFailure;
    } else {
        out << text;
    }

    if (!result.complete()) {
        for (const auto* n : result.unresolved())
            err << "meroloc: unresolved region " << n->path << " (" << n->reason << ")\n";
        return kPartial;
    }
    return kSuccess;
}

int run_scan(const ScanArgs& args, std::ostream&, std::ostream& err) {
    ScanJob scan;
    try {
        scan = load_scan_job(args.config);
        apply(scan.job, args.overrides);
    } catch (const Error& e) {
        err << "meroloc: " << e.what() << "\n";
        return kFailure;
    }

    std::ostringstream csv;
    csv << "sweep_value,re,im,multiplicity,error,status\n";
    bool all_complete = true;
    for (const double value : scan.sweep.values) {
        const std::string v = format_number(value);
        Json function = scan.job.function;
        function[scan.sweep.pointer] = value;
        try {
            const auto result = locate_detailed(make_handle(function, scan.job.origin), scan.job.rect, scan.job.search);
            const std::string status = status_of(result);
            all_complete = all_complete && result.complete();
            for (const auto& r : result.roots)
                csv << v << ',' << format_number(r.location.real()) << ',' << format_number(r.location.imag()) << ','
                    << r.multiplicity << ',' << format_number(r.error_estimate) << ','
                    << (r.flagged ? "flagged" : status == "complete" ? "ok" : status) << '\n';
        } catch (const Error& e) {
            all_complete = false;
            csv << v << ",,,,," << csv_field(std::string("error: ") + e.what()) << '\n';
            err << "meroloc: " << scan.sweep.parameter << " = " << v << ": " << e.what() << "\n";
        }
    }
    if (!write_text(args.output, csv.str(), err)) return kFailure;
    return all_complete ? kSuccess : kPartial;
}

int run_selftest(const SelftestArgs& args, std::ostream& out, std::ostream&) {
    int failed = 0;
    for (const auto& s : selftest_suites(args)) {
        out << (s.passed ? "PASS " : "FAIL ") << s.name;
        if (!s.detail.empty()) out << ": " << s.detail;
        out << "\n";
        failed += !s.passed;
    }
    if (failed == 0) {
        out << "selftest: all suites passed\n";
        return kSuccess;
    }
    out << "selftest: " << failed << " suite(s) failed\n";
    return kFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Locate zeros and poles of meromorphic functions in a rectangle", "meroloc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    LocateArgs locate;
    auto* cmd_locate = app.add_subcommand("locate", "Run one locate job");
    cmd_locate->add_option("--config", locate.config, "Job file (JSON)")->required();
    cmd_locate->add_option("--output", locate.output, "Result document path (default: job output path or stdout)");
    cmd_locate->add_flag("--no-timing", locate.no_timing, "Omit wall-clock timing from the document");
    add_overrides(cmd_locate, locate.overrides);

    ScanArgs scan;
    auto* cmd_scan = app.add_subcommand("scan", "Run a parameter sweep and write CSV");
    cmd_scan->add_option("--config", scan.config, "Sweep job file (JSON)")->required();
    cmd_scan->add_option("--output", scan.output, "CSV output path")->required();
    add_overrides(cmd_scan, scan.overrides);

    SelftestArgs self;
    auto* cmd_self = app.add_subcommand("selftest", "Run the built-in regression suites");
    cmd_self->add_option("--rank-tol", self.rank_tol, "Force the rank threshold (fault injection)");
    cmd_self->add_option("--workers", self.workers, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kFailure;
    }

    if (*cmd_locate) return run_locate(locate, out, err);
    if (*cmd_scan) return run_scan(scan, out, err);
    return run_selftest(self, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace meroloc::cli

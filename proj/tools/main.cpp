// Command-line driver: tabulates the two-point kernels, demonstrates the
// image-sum convergence rates, runs the thermal verification pipeline, and
// runs the covariance law suite.  All artifacts are written atomically and
// contain no timestamps, so repeated runs are byte-identical.
//
// Exit codes: 0 on success, 1 when a verification fails or a computation
// reports a runtime error, 2 for usage or configuration errors.
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cylkms/correlators.hpp"
#include "cylkms/covariance.hpp"
#include "cylkms/errors.hpp"
#include "cylkms/kms.hpp"
#include "cylkms/numerics.hpp"
#include "cylkms/rng.hpp"
#include "cylkms/series.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cylkms;

namespace {
constexpr double kTwoPi = 6.283185307179586;

std::string fmt17(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    std::vector<double> points() const {
        std::vector<double> xs;
        const double step = (max - min) / (count - 1);
        for (int i = 0; i < count; ++i) xs.push_back(min + i * step);
        return xs;
    }
};

GridSpec parse_grid(const std::string& text) {
    GridSpec spec;
    char trailing = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &spec.min, &spec.max, &spec.count,
                    &trailing) != 3)
        throw std::invalid_argument("--grid expects min:max:count, got '" + text + "'");
    if (spec.count < 2) throw std::invalid_argument("--grid needs at least two points");
    if (!(spec.max > spec.min))
        throw std::invalid_argument("--grid needs max greater than min");
    return spec;
}

fs::path resolve_output(const std::string& cliOut, const std::string& defaultName) {
    if (!cliOut.empty()) return fs::path(cliOut);
    if (const char* dir = std::getenv("CYLKMS_OUT_DIR")) {
        fs::create_directories(dir);
        return fs::path(dir) / defaultName;
    }
    return fs::path(defaultName);
}

void write_atomic(const fs::path& out, const std::string& content) {
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    fs::path tmp = out;
    tmp += ".tmp";
    {
        std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
        stream << content;
        if (!stream) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, out);
}

std::string csv_header(const json& config, const std::string& columns) {
    std::string text;
    for (const auto& [key, value] : config.items()) {
        text += "# " + key + " = ";
        text += value.is_string() ? value.get<std::string>() : value.dump();
        text += "\n";
    }
    text += columns + "\n";
    return text;
}

// Deterministic test-function pair matching the verification fixtures: two
// bumps separated by about 4.5 units, which fits both the plane and one
// fundamental domain of the standard cylinder.
std::pair<TestFunction2D, TestFunction2D> fixture_pair(SeededRng& rng,
                                                       const Chart& chart) {
    auto bump = [&](double t, double x) {
        const double hu = rng.uniform(0.15, 0.3);
        const double hv = rng.uniform(0.15, 0.3);
        const SpacetimePoint center = chart.is_plane()
                                          ? SpacetimePoint::plane(t, x)
                                          : SpacetimePoint::cylinder(t, x, chart.period);
        return centered_test_function(Diamond(center, hu, hv),
                                      rng.uniform(0.7, 0.95), rng.uniform(0.8, 1.5));
    };
    const double xf = rng.uniform(0.75, 0.95);
    const double separation = rng.uniform(4.4, 4.6);
    TestFunction2D f = bump(0.0, xf);
    TestFunction2D g = bump(0.0, xf + separation);
    return {std::move(f), std::move(g)};
}

int emit(const fs::path& out, const std::string& content, bool pass) {
    write_atomic(out, content);
    std::printf("%s: wrote %s\n", pass ? "pass" : "FAIL", out.string().c_str());
    return pass ? 0 : 1;
}

// ---- w2-table ------------------------------------------------------------

int run_w2_table(const std::string& gridText, double epsilonValue, double period,
                 const std::string& format, const std::string& outText) {
    const GridSpec grid = parse_grid(gridText);
    const Epsilon eps(epsilonValue);
    if (!(period > 0.0)) throw std::invalid_argument("--period must be positive");

    json config;
    config["command"] = "w2-table";
    config["grid"] = gridText;
    config["epsilon"] = epsilonValue;
    config["period"] = period;
    config["format"] = format;

    struct Row {
        const char* kernel;
        double dU, dV;
        complex value{0.0, 0.0};
        bool singular = false;
    };
    std::vector<Row> rows;
    const std::vector<double> xs = grid.points();
    for (const char* kernel : {"plane", "cylinder"}) {
        for (double dU : xs) {
            for (double dV : xs) {
                Row row{kernel, dU, dV};
                try {
                    row.value = (kernel == std::string("plane"))
                                    ? w2_plane_vacuum(dU, dV, eps)
                                    : w2_cylinder_vacuum(dU, dV, period, eps);
                } catch (const SingularityError&) {
                    row.singular = true;
                    row.value = complex(std::nan(""), std::nan(""));
                }
                rows.push_back(row);
            }
        }
    }

    const fs::path out = resolve_output(outText, "w2-table." + format);
    if (format == "csv") {
        std::string text =
            csv_header(config, "kernel,dU,dV,epsilon,re_w2,im_w2,singular");
        for (const Row& row : rows) {
            text += std::string(row.kernel) + "," + fmt17(row.dU) + "," + fmt17(row.dV) +
                    "," + fmt17(epsilonValue) + "," + fmt17(row.value.real()) + "," +
                    fmt17(row.value.imag()) + "," + (row.singular ? "1" : "0") + "\n";
        }
        return emit(out, text, true);
    }
    json results = json::array();
    for (const Row& row : rows) {
        json r;
        r["kernel"] = row.kernel;
        r["dU"] = row.dU;
        r["dV"] = row.dV;
        r["epsilon"] = epsilonValue;
        r["re_w2"] = row.value.real();
        r["im_w2"] = row.value.imag();
        r["singular"] = row.singular;
        results.push_back(std::move(r));
    }
    json doc;
    doc["config"] = std::move(config);
    doc["results"] = std::move(results);
    doc["pass"] = true;
    return emit(out, doc.dump(2) + "\n", true);
}

// ---- images-converge -----------------------------------------------------

int run_images_converge(long seriesN, double period, double epsilonValue,
                        const std::string& tailText, const std::string& format,
                        const std::string& outText) {
    if (seriesN < 100) throw std::invalid_argument("--series-n must be at least 100");
    if (!(period > 0.0)) throw std::invalid_argument("--period must be positive");
    const TailCorrection tail =
        tailText == "none" ? TailCorrection::None : TailCorrection::IntegralTail;
    const Epsilon eps(epsilonValue);
    const double delta = 0.7;
    const complex reference = dd_cylinder_closed(delta, period, eps);

    json config;
    config["command"] = "images-converge";
    config["series_n"] = seriesN;
    config["period"] = period;
    config["epsilon"] = epsilonValue;
    config["tail_correction"] = tailText;
    config["delta"] = delta;
    config["format"] = format;

    struct Row {
        long n;
        double rawError, correctedError;
    };
    std::vector<Row> rows;
    std::vector<double> ns, rawErrors;
    for (long n : {100L, 316L, 1000L, 3162L, 10000L, 31623L, 100000L}) {
        if (n > seriesN) break;
        const SeriesSpec rawSpec(static_cast<int>(n), TailCorrection::None);
        const SeriesSpec corrSpec(static_cast<int>(n), tail);
        const double rawError =
            std::abs(dd_image_sum(delta, period, eps, rawSpec) - reference) /
            std::abs(reference);
        const double corrError =
            std::abs(dd_image_sum(delta, period, eps, corrSpec) - reference) /
            std::abs(reference);
        rows.push_back({n, rawError, corrError});
        ns.push_back(static_cast<double>(n));
        rawErrors.push_back(rawError);
    }
    const double exponent = fit_log_slope(ns, rawErrors);

    bool pass = std::abs(exponent + 1.0) < 0.1;
    if (tail == TailCorrection::IntegralTail) {
        for (const Row& row : rows) {
            if (row.n == 10000) pass = pass && row.correctedError < 1e-8;
        }
    }

    const fs::path out = resolve_output(outText, "images-converge." + format);
    if (format == "csv") {
        std::string text = csv_header(config, "n,raw_rel_error,corrected_rel_error");
        for (const Row& row : rows) {
            text += std::to_string(row.n) + "," + fmt17(row.rawError) + "," +
                    fmt17(row.correctedError) + "\n";
        }
        text += "# raw_convergence_exponent = " + fmt17(exponent) + "\n";
        text += std::string("# pass = ") + (pass ? "true" : "false") + "\n";
        return emit(out, text, pass);
    }
    json results = json::array();
    for (const Row& row : rows) {
        json r;
        r["n"] = row.n;
        r["raw_rel_error"] = row.rawError;
        r["corrected_rel_error"] = row.correctedError;
        results.push_back(std::move(r));
    }
    json doc;
    doc["config"] = std::move(config);
    doc["results"] = json{{"rows", std::move(results)},
                          {"raw_convergence_exponent", exponent},
                          {"reference_re", reference.real()},
                          {"reference_im", reference.imag()}};
    doc["pass"] = pass;
    return emit(out, doc.dump(2) + "\n", pass);
}

// ---- kms-verify ----------------------------------------------------------

json report_to_json(const KmsReport& report) {
    json r;
    r["kernel_label"] = report.kernelLabel;
    r["function_descriptor"] = report.functionDescriptor;
    r["beta"] = report.beta;
    r["tolerance"] = report.tolerance;
    r["max_residual"] = report.maxResidual;
    r["complex_time_residual"] = report.complexTimeResidual;
    r["transport_deviation"] = report.transportDeviation;
    r["frequencies"] = report.frequencies;
    r["ratio_residuals"] = report.ratioResiduals;
    r["pass"] = report.pass;
    return r;
}

int run_kms_verify(double beta, std::uint64_t seed, bool lifted, std::int64_t branch,
                   double period, const std::string& format,
                   const std::string& outText) {
    if (format != "json")
        throw std::invalid_argument("kms-verify writes JSON reports only");
    if (!(beta > 0.0)) throw std::invalid_argument("--beta must be positive");
    if (!(period > 0.0)) throw std::invalid_argument("--period must be positive");

    json config;
    config["command"] = "kms-verify";
    config["beta"] = beta;
    config["seed"] = seed;
    config["lifted"] = lifted;
    config["branch"] = branch;
    config["period"] = period;
    config["format"] = format;

    SeededRng rng(seed);
    const Chart chart = lifted ? Chart::cylinder(period) : Chart::plane();
    const auto [f, g] = fixture_pair(rng, chart);
    const KmsReport report = lifted ? verify_lifted_kms(beta, f, g, branch)
                                    : verify_thermal_kms(beta, f, g);

    json doc;
    doc["config"] = std::move(config);
    doc["results"] = report_to_json(report);
    doc["pass"] = report.pass;
    const fs::path out = resolve_output(outText, "kms-verify.json");
    return emit(out, doc.dump(2) + "\n", report.pass);
}

// ---- functor-check -------------------------------------------------------

int run_functor_check(std::uint64_t seed, const std::string& format,
                      const std::string& outText) {
    if (format != "json")
        throw std::invalid_argument("functor-check writes JSON reports only");

    json config;
    config["command"] = "functor-check";
    config["seed"] = seed;
    config["format"] = format;

    std::vector<LawReport> laws = run_functor_checks(seed);

    // One more law checked directly at the geometry level: the covering
    // projection is invariant under every deck translation.
    {
        SeededRng rng(seed);
        const CoveringMap pi(kTwoPi);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpacetimePoint q =
                SpacetimePoint::plane(rng.uniform(-5.0, 5.0), rng.uniform(-15.0, 15.0));
            const DeckTransformation deck{rng.uniform_int(-10, 10), kTwoPi};
            const SpacetimePoint a = pi.project(q);
            const SpacetimePoint b = pi.project(deck.apply(q));
            const double dx = std::abs(wrap_coordinate(a.x - b.x, kTwoPi));
            worst = std::max(worst, std::min(dx, kTwoPi - dx));
            worst = std::max(worst, std::abs(a.t - b.t));
        }
        LawReport projection;
        projection.name = "projection-deck-invariance";
        projection.deviation = worst;
        projection.tolerance = 1e-10;
        projection.pass = worst <= projection.tolerance;
        laws.push_back(std::move(projection));
    }

    bool pass = true;
    json results = json::array();
    for (const LawReport& law : laws) {
        pass = pass && law.pass;
        json r;
        r["name"] = law.name;
        r["deviation"] = law.deviation;
        r["tolerance"] = law.tolerance;
        r["pass"] = law.pass;
        results.push_back(std::move(r));
    }

    json doc;
    doc["config"] = std::move(config);
    doc["results"] = std::move(results);
    doc["pass"] = pass;
    const fs::path out = resolve_output(outText, "functor-check.json");
    return emit(out, doc.dump(2) + "\n", pass);
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "correlators of the free massless scalar field on the two-dimensional "
        "plane and the spatial cylinder"};
    app.require_subcommand(1);

    std::string w2Grid = "-3:3:13", w2Format = "csv", w2Out;
    double w2Epsilon = 1e-8, w2Period = kTwoPi;
    CLI::App* w2 = app.add_subcommand("w2-table",
                                      "tabulate the integrated vacuum kernels on a "
                                      "null-coordinate grid");
    w2->add_option("--grid", w2Grid, "evaluation grid, min:max:count");
    w2->add_option("--epsilon", w2Epsilon, "contour regulator");
    w2->add_option("--period", w2Period, "cylinder circumference");
    w2->add_option("--format", w2Format)->check(CLI::IsMember({"csv", "json"}));
    w2->add_option("--out", w2Out, "output path");

    long imgN = 100000;
    double imgPeriod = kTwoPi, imgEpsilon = 1e-6;
    std::string imgTail = "integral", imgFormat = "csv", imgOut;
    CLI::App* img = app.add_subcommand(
        "images-converge", "error of the truncated image sum against the closed form");
    img->add_option("--series-n", imgN, "largest truncation order");
    img->add_option("--period", imgPeriod, "cylinder circumference");
    img->add_option("--epsilon", imgEpsilon, "contour regulator");
    img->add_option("--tail-correction", imgTail)
        ->check(CLI::IsMember({"none", "integral"}));
    img->add_option("--format", imgFormat)->check(CLI::IsMember({"csv", "json"}));
    img->add_option("--out", imgOut, "output path");

    double kmsBeta = 0.0, kmsPeriod = kTwoPi;
    std::uint64_t kmsSeed = 20260823;
    bool kmsLifted = false;
    std::int64_t kmsBranch = 0;
    std::string kmsFormat = "json", kmsOut;
    CLI::App* kms = app.add_subcommand(
        "kms-verify", "thermal equilibrium of the seeded correlator pair");
    kms->add_option("--beta", kmsBeta, "inverse temperature")->required();
    kms->add_option("--seed", kmsSeed, "fixture seed");
    kms->add_flag("--lifted", kmsLifted, "verify the pulled-back cylinder state");
    kms->add_option("--branch", kmsBranch, "lift branch (implies --lifted)");
    kms->add_option("--period", kmsPeriod, "cylinder circumference");
    kms->add_option("--format", kmsFormat)->check(CLI::IsMember({"csv", "json"}));
    kms->add_option("--out", kmsOut, "output path");

    std::uint64_t funSeed = 20260823;
    std::string funFormat = "json", funOut;
    CLI::App* fun = app.add_subcommand("functor-check",
                                       "covariance law suite for the covering maps");
    fun->add_option("--seed", funSeed, "suite seed");
    fun->add_option("--format", funFormat)->check(CLI::IsMember({"csv", "json"}));
    fun->add_option("--out", funOut, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (w2->parsed())
            return run_w2_table(w2Grid, w2Epsilon, w2Period, w2Format, w2Out);
        if (img->parsed())
            return run_images_converge(imgN, imgPeriod, imgEpsilon, imgTail, imgFormat,
                                       imgOut);
        if (kms->parsed()) {
            if (kms->count("--branch") > 0) kmsLifted = true;
            return run_kms_verify(kmsBeta, kmsSeed, kmsLifted, kmsBranch, kmsPeriod,
                                  kmsFormat, kmsOut);
        }
        if (fun->parsed()) return run_functor_check(funSeed, funFormat, funOut);
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "configuration error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 2;
}

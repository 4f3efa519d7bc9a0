// Acceptance harness: one line per criterion, exit 0 only if all pass.
// Criterion 9 needs the command-line tool; its path is taken from the
// CYLKMS_CLI_PATH environment variable.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cylkms/correlators.hpp"
#include "cylkms/covariance.hpp"
#include "cylkms/kms.hpp"
#include "cylkms/numerics.hpp"
#include "cylkms/rng.hpp"
#include "cylkms/series.hpp"
#include "test_support.hpp"

using namespace cylkms;
using cylkms::testing::kms_bump_pair;
using cylkms::testing::rel_diff;

namespace {
constexpr double kPi = 3.141592653589793;
constexpr double kTwoPi = 6.283185307179586;

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool check(bool condition, std::string& detail, const std::string& message) {
    if (!condition && detail.empty()) detail = message;
    return condition;
}

// ---- criterion 1: image sum converges at rate 1/N, tail correction to 1e-8.
bool run_image_convergence(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const Epsilon eps(1e-6);
    SeededRng rng(20260823);
    bool ok = true;
    std::vector<double> deltas;
    for (int i = 0; i < 100; ++i) deltas.push_back(kTwoPi * rng.uniform(0.02, 0.98));
    for (double delta : deltas) {
        const complex target = dd_cylinder_closed(delta, kTwoPi, eps);
        const complex corrected = dd_image_sum(
            delta, kTwoPi, eps, SeriesSpec(10000, TailCorrection::IntegralTail));
        const double err = rel_diff(corrected, target);
        ok &= check(err < 1e-8, detail,
                    "tail-corrected error " + std::to_string(err) + " at delta " +
                        std::to_string(delta));
    }
    const std::vector<long> ns = {100, 1000, 10000, 100000};
    for (int i = 0; i < 5; ++i) {
        const double delta = deltas[static_cast<std::size_t>(i)];
        const complex target = dd_cylinder_closed(delta, kTwoPi, eps);
        std::vector<double> xs, errs;
        for (long n : ns) {
            const complex raw = dd_image_sum(
                delta, kTwoPi, eps,
                SeriesSpec(static_cast<int>(n), TailCorrection::None));
            xs.push_back(static_cast<double>(n));
            errs.push_back(rel_diff(raw, target));
        }
        const double slope = fit_log_slope(xs, errs);
        ok &= check(std::abs(slope + 1.0) < 0.1, detail,
                    "raw convergence exponent " + std::to_string(slope));
    }
    const double elapsed = seconds_since(t0);
    ok &= check(elapsed < 10.0, detail,
                "exceeded 10 s budget: " + std::to_string(elapsed));
    return ok;
}

// ---- criterion 2: partial-fraction cotangent against the library cotangent.
bool run_cotangent_series(std::string& detail) {
    bool ok = true;
    const complex quarter = cot_series(complex(kPi / 4.0, 0.0), 1000,
                                       TailCorrection::IntegralTail);
    ok &= check(std::abs(quarter - complex(1.0, 0.0)) < 1e-7, detail,
                "cot(pi/4) error " + std::to_string(std::abs(quarter - 1.0)));
    SeededRng rng(20260824);
    for (int i = 0; i < 20; ++i) {
        const double x = rng.uniform(0.05, kPi - 0.05);
        const complex series =
            cot_series(complex(x, 0.0), 1000, TailCorrection::IntegralTail);
        const complex reference = std::cos(complex(x, 0.0)) / std::sin(complex(x, 0.0));
        ok &= check(std::abs(series - reference) < 1e-7, detail,
                    "cot series error at x " + std::to_string(x));
    }
    return ok;
}

// ---- criterion 3: periodization discrepancy is affine in the two times.
bool run_periodization(std::string& detail) {
    const DiscrepancyReport report = periodization_discrepancy(
        default_discrepancy_grid(kTwoPi), kTwoPi, Epsilon(1e-6));
    bool ok = check(report.maxResidual < 1e-10, detail,
                    "affine residual " + std::to_string(report.maxResidual));
    ok &= check(report.secondTimeDerivative < 1e-6, detail,
                "second time derivative " + std::to_string(report.secondTimeDerivative));
    return ok;
}

// ---- criterion 4: thermal kernel vs imaginary-time images and vacuum limit.
bool run_thermal_oracle(std::string& detail) {
    bool ok = true;
    SeededRng rng(20260825);
    const double epsVal = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const double beta = rng.uniform(0.5, 2.0);
        // Separations within two thermal lengths keep the closed form large
        // enough for the truncated image sum to resolve it relatively.
        double delta = rng.uniform(0.05, 2.0 * beta);
        if (rng.uniform01() < 0.5) delta = -delta;
        const complex oracle =
            -1.0 / (4.0 * kPi) *
            lattice_inverse_square(complex(delta, -epsVal), complex(0.0, beta),
                                   SeriesSpec(10000, TailCorrection::IntegralTail));
        const double err =
            rel_diff(dd_plane_thermal(delta, beta, Epsilon(epsVal)), oracle);
        ok &= check(err < 1e-8, detail, "image oracle error " + std::to_string(err));
    }
    const Epsilon eps(1e-8);
    for (double delta : {0.1, 0.3, 0.5}) {
        const double dev =
            rel_diff(dd_plane_thermal(delta, 1e3, eps), dd_plane_vacuum(delta, eps));
        ok &= check(dev < 1e-6, detail,
                    "vacuum limit deviation " + std::to_string(dev) + " at delta " +
                        std::to_string(delta));
    }
    return ok;
}

std::vector<std::pair<TestFunction2D, TestFunction2D>> seeded_pairs(const Chart& chart) {
    SeededRng rng(20260823);
    std::vector<std::pair<TestFunction2D, TestFunction2D>> pairs;
    for (int i = 0; i < 3; ++i) pairs.push_back(kms_bump_pair(rng, chart));
    return pairs;
}

// ---- criterion 5: plane thermal states satisfy detailed balance and the
// complex-time identity across temperatures and function pairs.
bool run_plane_kms(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const auto pairs = seeded_pairs(Chart::plane());
    for (double beta : {0.5, 1.0, 2.0}) {
        for (const auto& [f, g] : pairs) {
            const KmsReport report = verify_thermal_kms(beta, f, g);
            ok &= check(report.pass && report.maxResidual < 1e-4, detail,
                        "detailed balance residual " +
                            std::to_string(report.maxResidual) + " at beta " +
                            std::to_string(beta));
            ok &= check(report.complexTimeResidual < 1e-5, detail,
                        "complex time residual " +
                            std::to_string(report.complexTimeResidual) + " at beta " +
                            std::to_string(beta));
        }
    }
    const double elapsed = seconds_since(t0);
    ok &= check(elapsed < 60.0, detail,
                "exceeded 60 s budget: " + std::to_string(elapsed));
    return ok;
}

// ---- criterion 6: the lifted cylinder states pass the same checks, agree
// with the plane series pointwise, and are branch independent.
bool run_lifted_kms(std::string& detail) {
    bool ok = true;
    const auto pairs = seeded_pairs(Chart::cylinder(kTwoPi));
    std::vector<KmsReport> branch0;
    for (const auto& [f, g] : pairs) {
        const KmsReport report = verify_lifted_kms(1.0, f, g, 0);
        branch0.push_back(report);
        ok &= check(report.pass && report.maxResidual < 1e-4, detail,
                    "lifted residual " + std::to_string(report.maxResidual));
        ok &= check(report.complexTimeResidual < 1e-5, detail,
                    "lifted complex time residual " +
                        std::to_string(report.complexTimeResidual));
        ok &= check(report.transportDeviation < 1e-10, detail,
                    "transport deviation " + std::to_string(report.transportDeviation));
    }

    for (std::int64_t branch : {-1L, 1L}) {
        const KmsReport other =
            verify_lifted_kms(1.0, pairs[0].first, pairs[0].second, branch);
        ok &= check(std::abs(other.maxResidual - branch0[0].maxResidual) < 1e-10, detail,
                    "branch dependence of the balance residual");
        ok &= check(
            std::abs(other.complexTimeResidual - branch0[0].complexTimeResidual) < 1e-10,
            detail, "branch dependence of the continuation residual");
    }

    // Pointwise agreement between the lifted sweep and the plane sweep over
    // the pushed-forward functions.
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-8));
    const QuasiFreeState base = QuasiFreeState::from_kernel(kernel, "plane-thermal");
    const QuasiFreeState lifted =
        state_pullback(base, EmbeddingMorphism::lift(kTwoPi, 0));
    const TestFunction2D pf = pushforward(EmbeddingMorphism::lift(kTwoPi, 0), pairs[0].first);
    const TestFunction2D pg = pushforward(EmbeddingMorphism::lift(kTwoPi, 0), pairs[0].second);
    std::vector<complex> shifts;
    for (int k = -8; k <= 8; ++k) shifts.emplace_back(0.25 * k, 0.0);
    const std::vector<complex> cylinderSide =
        lifted.pair_correlator_sweep(pairs[0].first, pairs[0].second, shifts);
    const std::vector<complex> planeSide = base.pair_correlator_sweep(pf, pg, shifts);
    double maxMag = 0.0;
    for (const complex& v : planeSide) maxMag = std::max(maxMag, std::abs(v));
    for (std::size_t k = 0; k < shifts.size(); ++k) {
        ok &= check(std::abs(cylinderSide[k] - planeSide[k]) <= 1e-12 * maxMag, detail,
                    "lifted series deviates from the plane series");
    }
    return ok;
}

// ---- criterion 7: functor law property suite.
bool run_functor_laws(std::string& detail) {
    bool ok = true;
    for (const LawReport& law : run_functor_checks(20260823)) {
        ok &= check(law.pass, detail,
                    law.name + " deviation " + std::to_string(law.deviation));
    }
    return ok;
}

// ---- criterion 8: vacuum correlator spectrum vanishes at negative
// frequencies beyond the bump bandwidth.
bool run_positive_frequency(std::string& detail) {
    SeededRng rng(20260823);
    const auto [f, g] = kms_bump_pair(rng, Chart::plane());
    const PositiveFrequencyReport report = positive_frequency_check(f, g, Epsilon(1e-8));
    bool ok = check(report.pass, detail, "spectral check reported failure");
    ok &= check(report.maxBelowCutoff < 1e-4, detail,
                "negative-frequency magnitude " + std::to_string(report.maxBelowCutoff));
    return ok;
}

// ---- criterion 9: the command-line tool is byte-for-byte deterministic.
std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool run_cli_determinism(std::string& detail) {
    const char* cli = std::getenv("CYLKMS_CLI_PATH");
    if (cli == nullptr || !std::filesystem::exists(cli)) {
        detail = "CYLKMS_CLI_PATH not set or missing; build the tools target";
        return false;
    }
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() /
        ("cylkms-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"w2", " w2-table --grid=-3:3:13 --epsilon 1e-8 --format csv --out "},
        {"images", " images-converge --series-n 100000 --format csv --out "},
        {"kms", " kms-verify --beta 1 --format json --out "},
        {"functor", " functor-check --seed 7 --format json --out "},
    };
    bool ok = true;
    for (const auto& [tag, args] : commands) {
        std::string first, second;
        for (int round = 0; round < 2; ++round) {
            const std::filesystem::path out =
                dir / (tag + "-" + std::to_string(round) + (tag == "kms" || tag == "functor" ? ".json" : ".csv"));
            const std::string command = std::string("\"") + cli + "\"" + args + "\"" +
                                        out.string() + "\" >/dev/null 2>&1";
            const int status = std::system(command.c_str());
            ok &= check(status == 0, detail, tag + " run exited with status " +
                                                 std::to_string(status));
            (round == 0 ? first : second) = read_bytes(out);
        }
        ok &= check(!first.empty(), detail, tag + " produced no output");
        ok &= check(first == second, detail, tag + " output differs between runs");
    }
    std::filesystem::remove_all(dir);
    return ok;
}
}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"image-sum-convergence", run_image_convergence},
        {"cotangent-series", run_cotangent_series},
        {"periodization-affine", run_periodization},
        {"thermal-kernel-oracle", run_thermal_oracle},
        {"plane-kms", run_plane_kms},
        {"lifted-kms", run_lifted_kms},
        {"functor-laws", run_functor_laws},
        {"positive-frequency", run_positive_frequency},
        {"cli-determinism", run_cli_determinism},
    };

    const auto start = std::chrono::steady_clock::now();
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criteria[i].run(detail);
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        const double elapsed = seconds_since(t0);
        std::printf("criterion %zu (%s): %s  [%.2f s]%s%s\n", i + 1,
                    criteria[i].name.c_str(), pass ? "PASS" : "FAIL", elapsed,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    const double total = seconds_since(start);
    if (total >= 300.0) {
        std::printf("total runtime %.2f s exceeded the 300 s budget\n", total);
        ++failures;
    }
    std::printf("acceptance: %zu/%zu criteria passed in %.2f s\n",
                criteria.size() - static_cast<std::size_t>(failures), criteria.size(),
                total);
    return failures == 0 ? 0 : 1;
}

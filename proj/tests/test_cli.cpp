// End-to-end tests of the command-line tool.  The binary path arrives via
// the CYLKMS_CLI_PATH environment variable, set by the test harness.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {
struct RunResult {
    int status = -1;
    std::string output;
};

std::string cli_path() {
    const char* path = std::getenv("CYLKMS_CLI_PATH");
    REQUIRE_MESSAGE(path != nullptr, "CYLKMS_CLI_PATH must point at the tool binary");
    REQUIRE(fs::exists(path));
    return path;
}

RunResult run(const std::string& command) {
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[4096];
    while (std::size_t n = std::fread(buffer, 1, sizeof(buffer), pipe))
        output.append(buffer, n);
    const int raw = ::pclose(pipe);
    RunResult result;
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.output = std::move(output);
    return result;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    return fields;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cylkms-cli-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static inline int counter = 0;
};

void check_no_temp_files(const fs::path& dir) {
    for (const auto& entry : fs::directory_iterator(dir)) {
        CHECK(entry.path().extension() != ".tmp");
    }
}
}  // namespace

TEST_CASE("usage errors exit with code 2") {
    const std::string cli = cli_path();
    CHECK(run(cli).status == 2);
    CHECK(run(cli + " no-such-command").status == 2);
    CHECK(run(cli + " kms-verify").status == 2);
    CHECK(run(cli + " kms-verify --beta 1 --format csv").status == 2);
    CHECK(run(cli + " w2-table --grid=bogus").status == 2);
    CHECK(run(cli + " w2-table --grid=3:1:5").status == 2);
    CHECK(run(cli + " images-converge --series-n 10").status == 2);
    CHECK(run(cli + " --help").status == 0);
}

TEST_CASE("w2-table emits a deterministic annotated table") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path outA = dir.path / "a.csv";
    const fs::path outB = dir.path / "b.csv";
    const std::string flags = " w2-table --grid=-3:3:13 --epsilon 1e-8 --format csv --out ";
    CHECK(run(cli + flags + outA.string()).status == 0);
    CHECK(run(cli + flags + outB.string()).status == 0);

    const std::string text = read_file(outA);
    CHECK(text == read_file(outB));
    CHECK(!text.empty());
    CHECK(text.back() == '\n');
    CHECK(text.find('\r') == std::string::npos);

    const std::vector<std::string> lines = lines_of(text);
    std::size_t headerIndex = 0;
    while (headerIndex < lines.size() && lines[headerIndex].front() == '#') ++headerIndex;
    REQUIRE(headerIndex < lines.size());
    CHECK(headerIndex > 0);
    CHECK(lines[headerIndex] == "kernel,dU,dV,epsilon,re_w2,im_w2,singular");
    CHECK(lines.size() - headerIndex - 1 == 2 * 13 * 13);

    bool foundPlane = false;
    for (const std::string& line : lines) {
        if (line.rfind("plane,1,1,", 0) == 0) {
            const std::vector<std::string> fields = split_csv(line);
            REQUIRE(fields.size() == 7);
            CHECK(std::abs(std::stod(fields[4])) < 1e-6);
            CHECK(std::abs(std::stod(fields[5])) < 1e-6);
            CHECK(fields[6] == "0");
            foundPlane = true;
        }
    }
    CHECK(foundPlane);
    check_no_temp_files(dir.path);
}

TEST_CASE("w2-table reproduces the cylinder antipodal value") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path out = dir.path / "cyl.csv";
    CHECK(run(cli + " w2-table --grid=0:3.141592653589793:2 --out " + out.string())
              .status == 0);
    bool found = false;
    for (const std::string& line : lines_of(read_file(out))) {
        if (line.rfind("cylinder,3.14", 0) == 0) {
            const std::vector<std::string> fields = split_csv(line);
            REQUIRE(fields.size() == 7);
            if (fields[2].rfind("3.14", 0) != 0) continue;
            CHECK(std::stod(fields[4]) ==
                  doctest::Approx(-0.11031862623588465).epsilon(1e-5));
            CHECK(std::abs(std::stod(fields[5])) < 1e-6);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("w2-table json carries config, results, and pass") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path out = dir.path / "table.json";
    CHECK(run(cli + " w2-table --grid=-1:1:3 --format json --out " + out.string())
              .status == 0);
    const nlohmann::json doc = nlohmann::json::parse(read_file(out));
    REQUIRE(doc.contains("config"));
    REQUIRE(doc.contains("results"));
    REQUIRE(doc.contains("pass"));
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["config"]["command"] == "w2-table");
    REQUIRE(doc["results"].is_array());
    CHECK(doc["results"].size() == 2 * 3 * 3);
    const auto& first = doc["results"][0];
    for (const char* key : {"kernel", "dU", "dV", "epsilon", "re_w2", "im_w2", "singular"})
        CHECK(first.contains(key));
}

TEST_CASE("images-converge reports the expected rates") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path outA = dir.path / "img-a.csv";
    const fs::path outB = dir.path / "img-b.csv";
    const std::string flags = " images-converge --series-n 100000 --format csv --out ";
    CHECK(run(cli + flags + outA.string()).status == 0);
    CHECK(run(cli + flags + outB.string()).status == 0);
    const std::string text = read_file(outA);
    CHECK(text == read_file(outB));

    double exponent = 0.0;
    int dataRows = 0;
    bool sawTail = false;
    for (const std::string& line : lines_of(text)) {
        if (line.rfind("# raw_convergence_exponent = ", 0) == 0) {
            exponent = std::stod(line.substr(line.find('=') + 1));
        } else if (!line.empty() && line.front() != '#' && line.front() != 'n') {
            const std::vector<std::string> fields = split_csv(line);
            REQUIRE(fields.size() == 3);
            ++dataRows;
            if (fields[0] == "10000") {
                CHECK(std::stod(fields[2]) < 1e-8);
                sawTail = true;
            }
        }
    }
    CHECK(dataRows == 7);
    CHECK(sawTail);
    CHECK(exponent == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("kms-verify passes at unit beta and is deterministic") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path outA = dir.path / "kms-a.json";
    const fs::path outB = dir.path / "kms-b.json";
    const std::string flags = " kms-verify --beta 1 --format json --out ";
    CHECK(run(cli + flags + outA.string()).status == 0);
    CHECK(run(cli + flags + outB.string()).status == 0);
    const std::string text = read_file(outA);
    CHECK(text == read_file(outB));

    const nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["results"]["max_residual"].get<double>() < 1e-4);
    CHECK(doc["results"]["complex_time_residual"].get<double>() < 1e-5);
    CHECK(doc["results"]["kernel_label"] == "plane-thermal");
    CHECK(!doc["results"]["frequencies"].empty());
}

TEST_CASE("kms-verify runs the lifted pipeline") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path out = dir.path / "lifted.json";
    CHECK(run(cli + " kms-verify --beta 1 --lifted --branch 1 --out " + out.string())
              .status == 0);
    const nlohmann::json doc = nlohmann::json::parse(read_file(out));
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["results"]["kernel_label"].get<std::string>().find("branch 1") !=
          std::string::npos);
    CHECK(doc["results"]["transport_deviation"].get<double>() < 1e-10);
}

TEST_CASE("kms-verify fails honestly when the grid cannot hold the decay") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path out = dir.path / "wide.json";
    const RunResult result =
        run(cli + " kms-verify --beta 30 --out " + out.string());
    CHECK(result.status == 1);
}

TEST_CASE("functor-check passes all laws deterministically") {
    const std::string cli = cli_path();
    TempDir dir;
    const fs::path outA = dir.path / "laws-a.json";
    const fs::path outB = dir.path / "laws-b.json";
    const std::string flags = " functor-check --seed 7 --out ";
    CHECK(run(cli + flags + outA.string()).status == 0);
    CHECK(run(cli + flags + outB.string()).status == 0);
    const std::string text = read_file(outA);
    CHECK(text == read_file(outB));

    const nlohmann::json doc = nlohmann::json::parse(text);
    CHECK(doc["pass"].get<bool>());
    REQUIRE(doc["results"].is_array());
    CHECK(doc["results"].size() == 7);
    for (const auto& law : doc["results"]) {
        CHECK(law["pass"].get<bool>());
        CHECK(law["deviation"].get<double>() <= law["tolerance"].get<double>());
    }
}

TEST_CASE("unset output path falls back to the environment directory") {
    const std::string cli = cli_path();
    TempDir dir;
    const std::string command = "CYLKMS_OUT_DIR=\"" + dir.path.string() + "\" " + cli +
                                " w2-table --grid=0:1:2 --format csv";
    CHECK(run(command).status == 0);
    CHECK(fs::exists(dir.path / "w2-table.csv"));
    check_no_temp_files(dir.path);
}

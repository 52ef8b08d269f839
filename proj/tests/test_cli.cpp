#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "hybisim/serialize.hpp"

namespace {

const std::string kModel = std::string(TEST_MODELS_DIR) + "/thermostat.hds";

struct CmdResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CmdResult run_cli(const std::string& args) {
    const std::string err_path = "cli_stderr.tmp";
    std::string cmd = std::string(HYBISIM_BIN) + " " + args + " 2>" + err_path;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out, slurp(err_path)};
}

std::string eta0_arg() {
    return hybisim::format_double(0.05 * std::sqrt(2.0));
}

}  // namespace

TEST_CASE("check accepts the bundled model") {
    auto r = run_cli("check --model " + kModel);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "model OK: 4 modes, 10 edges\n");
}

TEST_CASE("check reports diagnostics with exit code 1") {
    const char* path = "strict_guard.hds";
    {
        std::ofstream out(path);
        out << "vars x\n"
               "mode a output o\n"
               "  flow x' = -x + 1\n"
               "  invariant x >= 0; x < 0.5\n"
               "edge a -> a input u\n"
               "  guard x = 0.5\n"
               "  reset x = 0.25\n";
    }
    auto r = run_cli(std::string("check --model ") + path);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("strict") != std::string::npos);
}

TEST_CASE("check fails loudly on a missing file") {
    auto r = run_cli("check --model no_such_file.hds");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("a malformed model is a hard error") {
    const char* path = "malformed.hds";
    {
        std::ofstream out(path);
        out << "vars x\nmode a\n";
    }
    auto r = run_cli(std::string("bisim --eta 0.1 --model ") + path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("bisim streams the artifact to stdout and the summary to stderr") {
    auto r = run_cli("bisim --model " + kModel + " --eta " + eta0_arg());
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("{\n", 0) == 0);  // JSON artifact only
    CHECK(r.out.find("\"grid_size\": 68") != std::string::npos);
    CHECK(r.err.find("k=2 classes=12 grid=68") != std::string::npos);
    CHECK(r.err.find("status=fixed-point") != std::string::npos);
}

TEST_CASE("bisim with --out writes the file and summarizes on stdout") {
    auto r = run_cli("bisim --model " + kModel + " --eta " + eta0_arg() +
                     " --format dot --out quotient.tmp.dot --dump-points points.tmp.tsv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("k=2 classes=12 grid=68") != std::string::npos);
    std::string dot = slurp("quotient.tmp.dot");
    CHECK(dot.rfind("digraph quotient {", 0) == 0);
    std::string tsv = slurp("points.tmp.tsv");
    std::size_t rows = 0;
    for (char c : tsv) rows += c == '\n';
    CHECK(rows == 69);  // header + 68 samples
}

TEST_CASE("a refinement cap makes bisim exit with code 3") {
    auto r = run_cli("bisim --model " + kModel + " --eta " + eta0_arg() + " --k-max 1");
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("status=inconclusive") != std::string::npos);
}

TEST_CASE("the sweep prints one line per round and a verdict") {
    auto r = run_cli("bisim --model " + kModel + " --eta " + eta0_arg() +
                     " --sweep --sweep-rounds 2 --out sweep.tmp.json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("round=0 ") != std::string::npos);
    CHECK(r.out.find("round=1 ") != std::string::npos);
    CHECK(r.out.find("grid=128") != std::string::npos);
    CHECK(r.out.find("sweep=stable rounds=2 final_classes=12") != std::string::npos);
    CHECK(slurp("sweep.tmp.json").rfind("{\n", 0) == 0);
}

TEST_CASE("example validates and runs the bundled model end to end") {
    auto r = run_cli("example --format dot");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("model OK: 4 modes, 10 edges\n") != std::string::npos);
    CHECK(r.out.find("digraph quotient {") != std::string::npos);
    CHECK(r.err.find("status=fixed-point") != std::string::npos);
}

TEST_CASE("bad invocations are rejected by the argument parser") {
    CHECK(run_cli("bisim --model " + kModel).exit_code != 0);  // missing --eta
    CHECK(run_cli("bisim --model " + kModel + " --eta 0.1 --format yaml").exit_code != 0);
    CHECK(run_cli("").exit_code != 0);  // a subcommand is required
}

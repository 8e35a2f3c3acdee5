#include "mwc/script.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args)
{
    std::string cmd = std::string(MWC_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("mwc_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("golden tables match over the catalog")
{
    Run r = run("golden --all");
    CHECK(r.status == 0);
    CHECK(r.out.find("mismatch") == std::string::npos);
    CHECK(r.out.find("GOLDEN com12b match") != std::string::npos);
}

TEST_CASE("a corrupted golden file is reported")
{
    fs::path d = scratch("golden");
    fs::copy(fs::path(mwc::catalog_dir()) / "golden", d, fs::copy_options::recursive);
    {
        std::ifstream in(d / "com1.tsv");
        std::string text((std::istreambuf_iterator<char>(in)), {});
        auto at = text.rfind("Whole");
        REQUIRE(at != std::string::npos);
        text.replace(at, 5, "lf");
        std::ofstream(d / "com1.tsv") << text;
    }
    Run r = run("golden com1 com2 --golden-dir " + d.string());
    CHECK(r.status == 2);
    CHECK(r.out.find("GOLDEN com1 mismatch") != std::string::npos);
    CHECK(r.out.find("GOLDEN com2 match") != std::string::npos);
    fs::remove(d / "com2.tsv");
    CHECK(run("golden com2 --golden-dir " + d.string()).status == 1);
    fs::remove_all(d);
}

TEST_CASE("reports are byte-identical across runs")
{
    for (const char* a : {"golden --all", "replay thm_le46", "roots worked_h1", "faces m3_kphi", "derive m3_kphi --h 2"}) {
        Run x = run(a), y = run(a);
        CAPTURE(a);
        CHECK(x.status == y.status);
        CHECK(x.out == y.out);
        CHECK(!x.out.empty());
    }
}

TEST_CASE("replay exit codes")
{
    CHECK(run("replay thm_le46 --eps 1/4 --eps1 5/4").status == 0);
    CHECK(run("replay thm_le46 --no-asserts").status == 0);
    CHECK(run("replay lemma_le38 --h 2").status == 0);
    CHECK(run("replay thm_le46 --eps 1/2 --eps1 1/4").status == 1);
    CHECK(run("replay no_such_scenario").status == 1);
}

TEST_CASE("spectral commands")
{
    Run roots = run("roots worked_h1");
    CHECK(roots.status == 0);
    CHECK(roots.out.find("-1+sqrt(3)\t") != std::string::npos);
    CHECK(roots.out.find("symmetric\tyes") != std::string::npos);

    Run chk = run("check equality_case --profile gs --eps1 5/4");
    CHECK(chk.status == 0);
    CHECK(chk.out.find("user-asserted") != std::string::npos);
    CHECK(run("check worked_h1 --profile other").status == 1);

    fs::path d = scratch("spec");
    std::ofstream(d / "bad.json") << R"({"name": "bad", "h": 1, "spec_d_delta": {"1": ["-2"]}})";
    CHECK(run("roots " + (d / "bad.json").string()).status == 1);
    fs::remove_all(d);

    Run b = run("bessel --alpha 1");
    CHECK(b.status == 0);
    CHECK(b.out.find("verdict\tnot_in_L2b") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(run("").status == 1);
    CHECK(run("faces").status == 1);
    CHECK(run("faces no_such_space").status == 1);
    CHECK(run("--help").status == 0);
}
